//! Special points on the field side: reduced binary quadratic forms, class
//! polynomials `H_D`, and detection of CM j-values.
//!
//! Non-fundamental discriminants are accepted throughout, so `H_D` is the
//! ring class polynomial of the order of discriminant `D`.

use std::collections::HashMap;
use std::f64::consts::{LN_10, PI};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::ball::Ball;
use crate::cache;
use crate::error::{Error, Result};
use crate::halfplane::{HalfPlanePoint, QuadraticPoint};
use crate::jfun::evaluate_j;
use crate::poly::IntPolynomial;
use crate::value::{ball_is_zero, JValue, Truth};

/// Doublings attempted by [`class_polynomial_auto`].
const MAX_DOUBLINGS: u32 = 6;

/// `a·x² + b·x·y + c·y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `|b| ≤ a ≤ c`, with `b ≥ 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The CM point `(−b + √D)/(2a)` of a positive definite form.
    pub fn root(&self) -> Result<HalfPlanePoint> {
        Ok(HalfPlanePoint::Exact(QuadraticPoint::from_i64(
            self.a,
            self.b,
            self.discriminant(),
        )?))
    }
}

pub fn validate_discriminant(d: i64) -> Result<()> {
    if d < 0 && matches!(d.rem_euclid(4), 0 | 1) {
        Ok(())
    } else {
        Err(Error::InvalidDiscriminant(d.to_string()))
    }
}

/// All reduced primitive forms of discriminant `d`, sorted by `(a, b)`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadraticForm>> {
    validate_discriminant(d)?;
    let n = d.unsigned_abs();
    let mut forms = Vec::new();
    let mut a: u64 = 1;
    // reduced forms have 3a² ≤ |D|
    while 3 * a * a <= n {
        let a_i = a as i64;
        for b in -a_i + 1..=a_i {
            let num = b * b - d;
            if num % (4 * a_i) != 0 {
                continue;
            }
            let f = QuadraticForm::new(a_i, b, num / (4 * a_i));
            if f.is_reduced() && f.is_primitive() {
                forms.push(f);
            }
        }
        a += 1;
    }
    Ok(forms)
}

pub fn class_number(d: i64) -> Result<usize> {
    Ok(reduced_forms(d)?.len())
}

/// Valid discriminants `D` with `|D| ≤ bound`, by increasing `|D|`.
pub fn discriminants_up_to(bound: u64) -> impl Iterator<Item = i64> {
    (3..=bound as i64)
        .map(|n| -n)
        .filter(|&d| validate_discriminant(d).is_ok())
}

/// The monic integer polynomial `H_D` whose roots are the CM j-values of
/// discriminant `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassPolynomial {
    disc: i64,
    poly: IntPolynomial,
}

impl ClassPolynomial {
    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        self.poly.to_hclass_text(self.disc)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let (disc, poly) = IntPolynomial::parse_hclass_text(text)?;
        validate_discriminant(disc)?;
        if !poly.is_monic() {
            return Err(Error::Parse("class polynomial must be monic".into()));
        }
        Ok(Self { disc, poly })
    }

    /// `H_D(j)`: decided exactly for rationals, three-valued for balls.
    pub fn vanishes_at(&self, j: &JValue) -> Truth {
        match j {
            JValue::Exact(q) => Truth::from_bool(self.poly.eval_rational(q).is_zero()),
            JValue::Approx(b) => ball_is_zero(&self.poly.eval_ball(b, b.prec())),
        }
    }
}

/// `log10 |j(τ)|` upper estimate for the CM point of a reduced form.
fn log10_j_estimate(f: &QuadraticForm) -> f64 {
    let im = (f.discriminant().unsigned_abs() as f64).sqrt() / (2.0 * f.a as f64);
    (2.0 * PI * im / LN_10).max(0.0) + 4.0
}

/// Starting precision `15 + (π√|D|/ln 10)·Σ 1/a` over the reduced forms.
pub fn suggested_digits(d: i64) -> Result<u32> {
    let forms = reduced_forms(d)?;
    let s: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    Ok((15.0 + PI * (d.unsigned_abs() as f64).sqrt() / LN_10 * s).ceil() as u32)
}

/// `H_D` from the CM values at working precision `digits`.
///
/// Each j-value is computed to `digits` places beyond the magnitude of the
/// product, and every coefficient must be certified within 0.01 of an
/// integer, else [`Error::PrecisionTooLow`].
pub fn class_polynomial(d: i64, digits: u32) -> Result<ClassPolynomial> {
    if digits == 0 {
        return Err(Error::Domain("precision must be at least one digit".into()));
    }
    let forms = reduced_forms(d)?;
    let loss: f64 = forms.iter().map(log10_j_estimate).sum();
    let work = digits + loss.ceil() as u32;
    let roots: Vec<Ball> = forms
        .par_iter()
        .map(|f| evaluate_j(&f.root()?, work))
        .collect::<Result<_>>()?;
    let prec = roots.iter().map(Ball::prec).min().unwrap_or(64);
    let mut coeffs = vec![Ball::from_i64(1, prec)];
    for r in &roots {
        let mut next = vec![Ball::zero(prec); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
        }
        coeffs = next;
    }
    let tol = BigRational::new(BigInt::one(), BigInt::from(100));
    let ints = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.certified_integer(&tol).ok_or_else(|| {
                Error::PrecisionTooLow(format!(
                    "coefficient {i} of H_{d} not certified at {digits} digits (defect {:.3e})",
                    c.integer_defect()
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassPolynomial {
        disc: d,
        poly: IntPolynomial::new(ints),
    })
}

type Slot = Arc<Mutex<Option<Arc<ClassPolynomial>>>>;
static MEMO: Mutex<Option<HashMap<i64, Slot>>> = Mutex::new(None);

/// `H_D` starting from [`suggested_digits`] and doubling until certified;
/// memoized in memory and, when configured, on disk.
pub fn class_polynomial_auto(d: i64) -> Result<Arc<ClassPolynomial>> {
    validate_discriminant(d)?;
    let slot = {
        let mut memo = MEMO.lock().unwrap_or_else(|e| e.into_inner());
        memo.get_or_insert_with(HashMap::new)
            .entry(d)
            .or_default()
            .clone()
    };
    let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(h) = guard.as_ref() {
        return Ok(h.clone());
    }
    let name = cache::hclass_file_name(d);
    let expected_degree = class_number(d)?;
    let cached = cache::read(&name)
        .and_then(|text| ClassPolynomial::parse_text(&text).ok())
        .filter(|h| h.disc == d && h.degree() == expected_degree);
    let h = match cached {
        Some(h) => h,
        None => {
            let h = compute_with_retry(d)?;
            cache::write(&name, &h.to_text())?;
            h
        }
    };
    let h = Arc::new(h);
    *guard = Some(h.clone());
    Ok(h)
}

fn compute_with_retry(d: i64) -> Result<ClassPolynomial> {
    let mut digits = suggested_digits(d)?;
    let mut last = String::new();
    for _ in 0..=MAX_DOUBLINGS {
        match class_polynomial(d, digits) {
            Err(Error::PrecisionTooLow(msg)) => {
                last = msg;
                digits *= 2;
            }
            other => return other,
        }
    }
    Err(Error::PrecisionTooLow(last))
}

/// Result of a bounded CM search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmSearch {
    /// `H_D(j) = 0` for this `D`, the one of least `|D|`.
    Found(i64),
    /// No `H_D` with `|D| ≤ bound` vanishes at `j`.
    NotFound { bound: u64 },
    /// The numeric test at this `D` could not be decided.
    Indeterminate(i64),
}

/// Smallest `|D| ≤ bound` with `H_D(j) = 0`.
pub fn is_cm_value(j: &JValue, bound: u64) -> Result<CmSearch> {
    if bound < 3 {
        return Err(Error::Domain(format!(
            "discriminant bound {bound} must be at least 3"
        )));
    }
    if let JValue::Exact(q) = j {
        // a rational root of a monic integer polynomial is an integer
        if !q.is_integer() {
            return Ok(CmSearch::NotFound { bound });
        }
    }
    for d in discriminants_up_to(bound) {
        let h = class_polynomial_auto(d)?;
        if let JValue::Exact(q) = j {
            // rational roots only occur for class number one
            if h.degree() != 1 {
                continue;
            }
            if h.poly.coefficients()[0] == -q.to_integer() {
                return Ok(CmSearch::Found(d));
            }
            continue;
        }
        match h.vanishes_at(j) {
            Truth::True => return Ok(CmSearch::Found(d)),
            Truth::False => {}
            Truth::Indeterminate => return Ok(CmSearch::Indeterminate(d)),
        }
    }
    Ok(CmSearch::NotFound { bound })
}

/// The exact discriminant of the primitive integer form with root `τ`, if
/// `τ` is imaginary quadratic. Numeric points are exact dyadic rationals and
/// so always have one, typically of enormous size.
pub fn point_discriminant(tau: &HalfPlanePoint) -> BigInt {
    match tau {
        HalfPlanePoint::Exact(q) => q.discriminant().clone(),
        HalfPlanePoint::Numeric(n) => {
            // τ = r + i·s is a root of z² − 2r·z + (r² + s²)
            let (r, s) = (n.re(), n.im());
            let lin = -(&r * BigInt::from(2));
            let cst = &r * &r + &s * &s;
            let l = lin.denom().lcm(cst.denom());
            let a = l.clone();
            let b = (lin * BigRational::from_integer(l.clone())).to_integer();
            let c = (cst * BigRational::from_integer(l)).to_integer();
            let g = a.gcd(&b).gcd(&c);
            let (a, b, c) = (a / &g, b / &g, c / &g);
            &b * &b - a * c * 4
        }
    }
}

/// A point counts as special within a search bound when its exact
/// discriminant satisfies `|D| ≤ bound`; returns that discriminant.
pub fn special_discriminant(tau: &HalfPlanePoint, bound: u64) -> Option<BigInt> {
    let d = point_discriminant(tau);
    (d.abs() <= BigInt::from(bound)).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_forms(d: i64) -> Vec<QuadraticForm> {
        // exhaustive over a box, independent of the 3a² ≤ |D| cutoff
        let n = d.abs();
        let mut out = Vec::new();
        for a in 1..=n {
            for b in -n..=n {
                let num = b * b - d;
                if num % (4 * a) == 0 {
                    let f = QuadraticForm::new(a, b, num / (4 * a));
                    if f.is_reduced() && f.is_primitive() {
                        out.push(f);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn reduced_form_examples() {
        assert_eq!(
            reduced_forms(-4).unwrap(),
            vec![QuadraticForm::new(1, 0, 1)]
        );
        assert_eq!(
            reduced_forms(-3).unwrap(),
            vec![QuadraticForm::new(1, 1, 1)]
        );
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![
                QuadraticForm::new(1, 1, 6),
                QuadraticForm::new(2, -1, 3),
                QuadraticForm::new(2, 1, 3)
            ]
        );
        assert!(reduced_forms(-5).is_err());
        assert!(reduced_forms(8).is_err());
    }

    #[test]
    fn reduced_forms_match_oracle() {
        for d in discriminants_up_to(120) {
            assert_eq!(reduced_forms(d).unwrap(), oracle_forms(d), "D = {d}");
        }
    }

    #[test]
    fn small_class_polynomials() {
        assert_eq!(
            class_polynomial(-3, 30).unwrap().polynomial(),
            &IntPolynomial::from_i64(&[0, 1])
        );
        assert_eq!(
            class_polynomial(-4, 30).unwrap().polynomial(),
            &IntPolynomial::from_i64(&[-1728, 1])
        );
        assert_eq!(
            class_polynomial(-7, 30).unwrap().polynomial(),
            &IntPolynomial::from_i64(&[3375, 1])
        );
        assert_eq!(
            class_polynomial(-16, 30).unwrap().polynomial(),
            &IntPolynomial::from_i64(&[-287496, 1])
        );
    }

    #[test]
    fn cm_detection() {
        assert_eq!(
            is_cm_value(&JValue::int(1728), 50).unwrap(),
            CmSearch::Found(-4)
        );
        assert_eq!(
            is_cm_value(&JValue::int(0), 50).unwrap(),
            CmSearch::Found(-3)
        );
        assert_eq!(
            is_cm_value(&JValue::int(287496), 50).unwrap(),
            CmSearch::Found(-16)
        );
        assert_eq!(
            is_cm_value(&JValue::int(1), 50).unwrap(),
            CmSearch::NotFound { bound: 50 }
        );
        let approx =
            JValue::Approx(evaluate_j(&HalfPlanePoint::exact(1, 1, -7).unwrap(), 40).unwrap());
        assert_eq!(is_cm_value(&approx, 50).unwrap(), CmSearch::Found(-7));
    }

    #[test]
    fn numeric_point_discriminant() {
        let two_i = HalfPlanePoint::parse_numeric("0", "2", 20).unwrap();
        assert_eq!(point_discriminant(&two_i), BigInt::from(-16));
        let half = HalfPlanePoint::parse_numeric("0.5", "1.5", 20).unwrap();
        // 2z² − 2z + 5 = 0 → D = 4 − 40
        assert_eq!(point_discriminant(&half), BigInt::from(-36));
        let generic = HalfPlanePoint::parse_numeric("0.1234567", "1.2345678", 30).unwrap();
        assert!(special_discriminant(&generic, 1_000_000).is_none());
    }
}
