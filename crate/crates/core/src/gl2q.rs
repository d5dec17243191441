//! Exact arithmetic in `G = GL2+(Q)` modulo scalars.
//!
//! Every element has a unique representative: a primitive integer matrix with
//! positive determinant (the *level*) whose first nonzero entry, read as
//! `a, b, c, d`, is positive. The level stratifies `G` into the double cosets
//! `G_N = Γ·diag(N, 1)·Γ`, `Γ = SL2(Z)`, and each `Γ\G_N` has the `ψ(N)`
//! Hermite-form representatives produced by [`coset_representatives`].

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
    level: BigInt,
}

impl GroupElement {
    /// Canonical representative of the class of the integer matrix `[[a,b],[c,d]]`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_positive() {
            return Err(Error::DeterminantSign(det.to_string()));
        }
        let g = a.gcd(&b).gcd(&c).gcd(&d);
        let (mut a, mut b, mut c, mut d) = (a / &g, b / &g, c / &g, d / &g);
        let first = [&a, &b, &c, &d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("det > 0");
        if first.is_negative() {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
        let level = &a * &d - &b * &c;
        Ok(GroupElement { a, b, c, d, level })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1).unwrap()
    }

    /// `S = [[0,−1],[1,0]]`.
    pub fn s() -> Self {
        Self::from_i64(0, -1, 1, 0).unwrap()
    }

    /// `T = [[1,1],[0,1]]`.
    pub fn t() -> Self {
        Self::from_i64(1, 1, 0, 1).unwrap()
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// The determinant of the primitive representative.
    pub fn level(&self) -> &BigInt {
        &self.level
    }

    pub fn level_u64(&self) -> Option<u64> {
        self.level.to_u64()
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        self.level.is_one() && self.b.is_zero() && self.c.is_zero() && self.a.is_one()
    }

    /// Inverse in `G`: the adjugate, already primitive.
    pub fn inverse(&self) -> Self {
        Self::new(self.d.clone(), -&self.b, -&self.c, self.a.clone()).expect("adjugate keeps det")
    }

    pub fn multiply(&self, other: &GroupElement) -> Self {
        multiply(self, other)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical representative of a rational matrix with positive determinant.
pub fn normalize(m: &[[BigRational; 2]; 2]) -> Result<GroupElement> {
    if m.iter().flatten().any(|x| x.denom().is_zero()) {
        return Err(Error::ZeroDenominator);
    }
    let lcm = m
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let int = |x: &BigRational| (x * BigRational::from_integer(lcm.clone())).to_integer();
    GroupElement::new(int(&m[0][0]), int(&m[0][1]), int(&m[1][0]), int(&m[1][1]))
}

pub fn multiply(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement::new(
        &g.a * &h.a + &g.b * &h.c,
        &g.a * &h.b + &g.b * &h.d,
        &g.c * &h.a + &g.d * &h.c,
        &g.c * &h.b + &g.d * &h.d,
    )
    .expect("product of positive-determinant matrices")
}

/// `ψ(N) = N·∏_{p|N}(1 + 1/p)`.
pub fn psi(n: u64) -> u64 {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            result = result / p * (p + 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        result = result / m * (m + 1);
    }
    result
}

/// Primes dividing `n`, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The Hermite-form representatives of `Γ\G_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSystem {
    level: u64,
    representatives: Vec<GroupElement>,
}

impl CosetSystem {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn representatives(&self) -> &[GroupElement] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Position of the coset `Γg` among the representatives.
    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        let label = coset_label(g);
        self.representatives
            .binary_search_by(|r| hermite_key(r).cmp(&hermite_key(&label)))
            .ok()
    }
}

fn hermite_key(g: &GroupElement) -> (BigInt, BigInt) {
    (g.a.clone(), g.b.clone())
}

/// All `[[a,b],[0,d]]` with `ad = N`, `gcd(a,b,d) = 1`, `0 ≤ b < d`, sorted by `(a, b)`.
pub fn coset_representatives(n: u64) -> CosetSystem {
    assert!(n >= 1, "level must be positive");
    let mut reps = Vec::new();
    for a in divisors(n) {
        let d = n / a;
        for b in 0..d {
            if a.gcd(&b).gcd(&d) == 1 {
                reps.push(GroupElement::from_i64(a as i64, b as i64, 0, d as i64).unwrap());
            }
        }
    }
    reps.sort_by_key(hermite_key);
    CosetSystem {
        level: n,
        representatives: reps,
    }
}

/// Hermite-form representative of the left coset `Γg`.
pub fn coset_label(g: &GroupElement) -> GroupElement {
    // row-reduce the first column (a, c) to (gcd, 0) with an SL2(Z) matrix
    let ext = g.a.extended_gcd(&g.c);
    let (x, y, g0) = if ext.gcd.is_negative() {
        (-ext.x, -ext.y, -ext.gcd)
    } else {
        (ext.x, ext.y, ext.gcd)
    };
    let (ca, cc) = (&g.a / &g0, &g.c / &g0);
    // γ = [[x, y], [−c/g0, a/g0]]
    let b1 = &x * &g.b + &y * &g.d;
    let d1 = -&cc * &g.b + &ca * &g.d;
    // det = g0·d1 = N > 0, so d1 > 0
    let b1 = b1.mod_floor(&d1);
    GroupElement::new(g0, b1, BigInt::zero(), d1).expect("coset label has positive determinant")
}

/// Whether `Γg = Γh`.
pub fn same_left_coset(g: &GroupElement, h: &GroupElement) -> bool {
    if g.level != h.level {
        return false;
    }
    multiply(g, &h.inverse()).level.is_one()
}

/// Membership in the principal congruence subgroup `Γ(N)` up to sign.
pub fn principal_congruence_member(g: &GroupElement, n: u64) -> Result<bool> {
    if !g.level.is_one() {
        return Err(Error::NotInGamma(g.level.to_string()));
    }
    let m = BigInt::from(n);
    let r = |x: &BigInt| x.mod_floor(&m);
    let (a, b, c, d) = (r(&g.a), r(&g.b), r(&g.c), r(&g.d));
    let zero = BigInt::zero();
    let one = BigInt::one().mod_floor(&m);
    let minus_one = (-BigInt::one()).mod_floor(&m);
    Ok(b == zero && c == zero && ((a == one && d == one) || (a == minus_one && d == minus_one)))
}

/// `[Γ : Γ_ḡ]`, where `Γ_ḡ` fixes every coset `Γg_i`: the size of the orbit of
/// the tuple of coset labels under right multiplication by `S` and `T`.
pub fn stabilizer_index(gs: &[GroupElement]) -> u64 {
    assert!(!gs.is_empty(), "stabilizer_index needs a nonempty tuple");
    let gens = [GroupElement::s(), GroupElement::t()];
    let start: Vec<GroupElement> = gs.iter().map(coset_label).collect();
    let mut seen: HashSet<Vec<GroupElement>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(t) = queue.pop_front() {
        for gamma in &gens {
            let next: Vec<GroupElement> =
                t.iter().map(|x| coset_label(&multiply(x, gamma))).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.len() as u64
}

// JSON form: [["a","b"],["c","d"]] with decimal integer (or p/q) strings.

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [self.a.to_string(), self.b.to_string()],
            [self.c.to_string(), self.d.to_string()],
        ];
        rows.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Str(String),
    Int(i64),
}

fn parse_entry(e: &Entry) -> Result<BigRational> {
    match e {
        Entry::Int(n) => Ok(BigRational::from_integer((*n).into())),
        Entry::Str(s) => {
            parse_rational(s).ok_or_else(|| Error::Parse(format!("bad matrix entry {s:?}")))
        }
    }
}

/// Parses `"12"`, `"-3/4"` (no whitespace, no decimals).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() || s.len() > 10_000 {
        return None;
    }
    let int = |t: &str| -> Option<BigInt> {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(int(n)?, d))
        }
        None => Some(BigRational::from_integer(int(s)?)),
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: [[Entry; 2]; 2] = Deserialize::deserialize(d)?;
        let m = parse_matrix_entries(&rows).map_err(de::Error::custom)?;
        normalize(&m).map_err(de::Error::custom)
    }
}

fn parse_matrix_entries(rows: &[[Entry; 2]; 2]) -> Result<[[BigRational; 2]; 2]> {
    Ok([
        [parse_entry(&rows[0][0])?, parse_entry(&rows[0][1])?],
        [parse_entry(&rows[1][0])?, parse_entry(&rows[1][1])?],
    ])
}

/// Parses the JSON matrix form into a canonical element.
pub fn parse_matrix_json(text: &str) -> Result<GroupElement> {
    Ok(serde_json::from_str(text)?)
}
