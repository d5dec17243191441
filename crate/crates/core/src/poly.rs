//! Integer polynomials and their sparse text encodings.
//!
//! Both encodings are canonical: a header line, then one line per nonzero
//! term sorted by exponent, each line newline-terminated with single spaces
//! and no trailing whitespace. The parsers accept exactly the byte strings the
//! writers produce, so `parse(s)` succeeding implies `write(parse(s)) == s`.
//!
//! ```text
//! PHI N 2          HCLASS D -4
//! 0 0 -157464...   0 -1728
//! ...              1 1
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::Ball;
use crate::error::{Error, Result};

/// Longest decimal coefficient accepted by the parsers.
const MAX_COEFF_DIGITS: usize = 100_000;
/// Largest exponent accepted by the parsers.
const MAX_EXPONENT: u32 = 10_000;

/// Sparse polynomial in `Z[X, Y]`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigInt)>>(terms: I) -> Self {
        let mut p = Self::new();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Adds `c·X^i·Y^j`, dropping the term if it cancels.
    pub fn add_term(&mut self, i: u32, j: u32, c: BigInt) {
        let slot = self.terms.entry((i, j)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coefficient(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// `P(Y, X)`.
    pub fn swap_variables(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((j, i), c.clone()))
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(&(i, j), c)| self.terms.get(&(j, i)) == Some(c))
    }

    /// Monic in `X`: the top `X`-power appears only as `1·X^d`.
    pub fn is_monic_in_x(&self) -> bool {
        let Some(d) = self.degree_x() else {
            return false;
        };
        let top: Vec<_> = self.terms.range((d, 0)..).collect();
        top.len() == 1 && *top[0].0 == (d, 0) && top[0].1.is_one()
    }

    /// Coefficients reduced into `[0, m)`, zeros dropped.
    pub fn reduce_mod(&self, m: &BigInt) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, c.mod_floor(m)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &other.terms {
                out.add_term(i + k, j + l, c * d);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, -c);
        }
        out
    }

    /// Exact evaluation, Horner in `X` over `Y`-polynomials.
    pub fn eval_rational(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let Some(dx) = self.degree_x() else {
            return BigRational::zero();
        };
        let dy = self.degree_y().unwrap_or(0) as usize;
        let mut ypow = Vec::with_capacity(dy + 1);
        ypow.push(BigRational::one());
        for k in 1..=dy {
            let next = &ypow[k - 1] * y;
            ypow.push(next);
        }
        let mut acc = BigRational::zero();
        for i in (0..=dx).rev() {
            acc *= x;
            for (&(_, j), c) in self.terms.range((i, 0)..=(i, u32::MAX)) {
                acc += &ypow[j as usize] * BigRational::from_integer(c.clone());
            }
        }
        acc
    }

    /// Ball evaluation at working precision `prec`.
    pub fn eval_ball(&self, x: &Ball, y: &Ball, prec: u32) -> Ball {
        let Some(dx) = self.degree_x() else {
            return Ball::zero(prec);
        };
        let x = x.with_prec(prec);
        let y = y.with_prec(prec);
        let dy = self.degree_y().unwrap_or(0) as usize;
        let mut ypow = Vec::with_capacity(dy + 1);
        ypow.push(Ball::from_i64(1, prec));
        for k in 1..=dy {
            let next = &ypow[k - 1] * &y;
            ypow.push(next);
        }
        let mut acc = Ball::zero(prec);
        for i in (0..=dx).rev() {
            acc = &acc * &x;
            for (&(_, j), c) in self.terms.range((i, 0)..=(i, u32::MAX)) {
                acc = &acc + &ypow[j as usize].mul_int(c);
            }
        }
        acc
    }

    /// Largest `log2 |c|` over the coefficients.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Canonical `PHI N <n>` encoding.
    pub fn to_phi_text(&self, n: u64) -> String {
        let mut out = format!("PHI N {n}\n");
        for (&(i, j), c) in &self.terms {
            out.push_str(&format!("{i} {j} {c}\n"));
        }
        out
    }

    /// Parses the canonical `PHI` encoding, returning the level and polynomial.
    pub fn parse_phi_text(text: &str) -> Result<(u64, Self)> {
        let mut lines = split_lines(text)?;
        let header = lines.next().ok_or_else(|| perr("empty input"))?;
        let n = header
            .strip_prefix("PHI N ")
            .and_then(parse_unsigned)
            .ok_or_else(|| perr("bad PHI header"))?;
        let mut terms = BTreeMap::new();
        let mut last: Option<(u32, u32)> = None;
        for line in lines {
            let mut it = line.split(' ');
            let (Some(i), Some(j), Some(c), None) = (it.next(), it.next(), it.next(), it.next())
            else {
                return Err(perr("PHI term line needs three fields"));
            };
            let key = (parse_exponent(i)?, parse_exponent(j)?);
            if last.is_some_and(|l| l >= key) {
                return Err(perr("PHI terms must be strictly increasing"));
            }
            last = Some(key);
            terms.insert(key, parse_coefficient(c)?);
        }
        Ok((n, Self { terms }))
    }
}

/// Dense univariate integer polynomial, low degree first, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            })
    }

    pub fn eval_ball(&self, x: &Ball, prec: u32) -> Ball {
        let x = x.with_prec(prec);
        self.coeffs.iter().rev().fold(Ball::zero(prec), |acc, c| {
            &(&acc * &x) + &Ball::from_int(c, prec)
        })
    }

    /// Canonical `HCLASS D <d>` encoding, one `i coefficient` line per
    /// nonzero term in increasing degree.
    pub fn to_hclass_text(&self, disc: i64) -> String {
        let mut out = format!("HCLASS D {disc}\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.push_str(&format!("{i} {c}\n"));
            }
        }
        out
    }

    pub fn parse_hclass_text(text: &str) -> Result<(i64, Self)> {
        let mut lines = split_lines(text)?;
        let header = lines.next().ok_or_else(|| perr("empty input"))?;
        let disc = header
            .strip_prefix("HCLASS D ")
            .and_then(parse_canonical_int)
            .and_then(|d| i64::try_from(d).ok())
            .ok_or_else(|| perr("bad HCLASS header"))?;
        let mut coeffs: Vec<BigInt> = Vec::new();
        for line in lines {
            let mut it = line.split(' ');
            let (Some(i), Some(c), None) = (it.next(), it.next(), it.next()) else {
                return Err(perr("HCLASS term line needs two fields"));
            };
            let i = parse_exponent(i)? as usize;
            if i < coeffs.len() {
                return Err(perr("HCLASS terms must be strictly increasing"));
            }
            coeffs.resize(i, BigInt::zero());
            coeffs.push(parse_coefficient(c)?);
        }
        Ok((disc, Self { coeffs }))
    }
}

fn perr(msg: &str) -> Error {
    Error::Parse(msg.to_string())
}

/// Splits newline-terminated lines, rejecting a missing final newline and
/// carriage returns.
fn split_lines(text: &str) -> Result<impl Iterator<Item = &str>> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| perr("input must end with a newline"))?;
    if text.contains('\r') {
        return Err(perr("carriage return in input"));
    }
    Ok(body.split('\n'))
}

fn parse_unsigned(s: &str) -> Option<u64> {
    let n = parse_canonical_int(s)?;
    if n.is_negative() {
        return None;
    }
    u64::try_from(n).ok()
}

fn parse_exponent(s: &str) -> Result<u32> {
    parse_unsigned(s)
        .and_then(|n| u32::try_from(n).ok())
        .filter(|&n| n <= MAX_EXPONENT)
        .ok_or_else(|| perr("bad exponent"))
}

fn parse_coefficient(s: &str) -> Result<BigInt> {
    if s.len() > MAX_COEFF_DIGITS {
        return Err(perr("coefficient too long"));
    }
    parse_canonical_int(s)
        .filter(|c| !c.is_zero())
        .ok_or_else(|| perr("bad coefficient"))
}

/// Decimal integer in the form `Display` produces: optional `-`, no leading
/// zeros, no `+`, no `-0`.
fn parse_canonical_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    if digits == "0" && s.starts_with('-') {
        return None;
    }
    s.parse().ok()
}
