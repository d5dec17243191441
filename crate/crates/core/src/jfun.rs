//! The modular j-function.
//!
//! Coefficients of `j(q) = 1/q + 744 + 196884q + …` are computed exactly as
//! `E4(q)³ / Δ(q)` and memoized. Evaluation first moves `τ` into the standard
//! fundamental domain, so `|q| ≤ e^{−π√3}`, then sums the truncated series in
//! ball arithmetic and adds a bound for the tail.
//!
//! Tail bound: for `n ≥ 1`, `c(n) ≤ e^{4π√n}/(√2·n^{3/4})·(1 + 0.055/n) < e^{4π√n}`
//! (Brisebarre–Philibert), so with `y = Im τ` the terms `e^{4π√n − 2πyn}` of the
//! majorant decay with ratio at most `r = e^{2π/√(M+1) − 2πy}` past `n = M`,
//! giving `tail ≤ e^{4π√(M+1) − 2πy(M+1)} / (1 − r)`.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::{digits_to_bits, pi_ball, Ball};
use crate::error::{Error, Result};
use crate::halfplane::{reduce_ball, HalfPlanePoint};

/// Guard digits added to every requested precision.
pub const GUARD_DIGITS: u32 = 20;

/// Exact coefficients `c(−1), c(0), …, c(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JSeries {
    coefficients: Arc<Vec<BigInt>>,
    order: usize,
}

impl JSeries {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `c(n)` for `−1 ≤ n ≤ M`.
    pub fn coefficient(&self, n: i64) -> &BigInt {
        assert!(
            n >= -1 && n <= self.order as i64,
            "coefficient index out of range"
        );
        &self.coefficients[(n + 1) as usize]
    }

    /// `c(0), …, c(M)`.
    pub fn nonnegative(&self) -> &[BigInt] {
        &self.coefficients[1..=self.order + 1]
    }
}

static SERIES_CACHE: Mutex<Option<Arc<Vec<BigInt>>>> = Mutex::new(None);

/// Exact coefficients of `j` up to `q^M`.
pub fn j_coefficients(order: usize) -> JSeries {
    let mut cache = SERIES_CACHE.lock().expect("j-series cache poisoned");
    if let Some(c) = cache.as_ref() {
        if c.len() >= order + 2 {
            return JSeries {
                coefficients: c.clone(),
                order,
            };
        }
    }
    let have = cache.as_ref().map_or(0, |c| c.len());
    let target = (order + 2).max(2 * have).max(64);
    let coeffs = Arc::new(compute_j_coefficients(target - 2));
    *cache = Some(coeffs.clone());
    JSeries {
        coefficients: coeffs,
        order,
    }
}

fn mul_truncated(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn sigma3(n: u64) -> u64 {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| d * d * d)
        .sum()
}

fn compute_j_coefficients(order: usize) -> Vec<BigInt> {
    // q·j = E4³ / ∏(1 − qⁿ)^24, needed through q^(order+1)
    let len = order + 2;
    let mut e4 = vec![BigInt::zero(); len];
    e4[0] = BigInt::one();
    for (n, slot) in e4.iter_mut().enumerate().skip(1) {
        *slot = BigInt::from(240u64 * sigma3(n as u64));
    }
    let e4_cubed = mul_truncated(&mul_truncated(&e4, &e4, len), &e4, len);

    // Euler: ∏(1 − qⁿ) = Σ (−1)^k q^{k(3k−1)/2}, k ∈ Z
    let mut euler = vec![BigInt::zero(); len];
    euler[0] = BigInt::one();
    for k in 1usize.. {
        let (e1, e2) = (k * (3 * k - 1) / 2, k * (3 * k + 1) / 2);
        if e1 >= len {
            break;
        }
        let sign = if k % 2 == 1 {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        if e2 < len {
            euler[e2] += &sign;
        }
        euler[e1] += sign;
    }
    let mut eta24 = vec![BigInt::zero(); len];
    eta24[0] = BigInt::one();
    let mut base = euler;
    let mut e = 24u32;
    while e > 0 {
        if e & 1 == 1 {
            eta24 = mul_truncated(&eta24, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul_truncated(&base, &base, len);
        }
    }

    // power-series division; eta24[0] = 1
    let mut quotient = vec![BigInt::zero(); len];
    for n in 0..len {
        let mut acc = e4_cubed[n].clone();
        for i in 1..=n {
            if !eta24[i].is_zero() {
                acc -= &eta24[i] * &quotient[n - i];
            }
        }
        quotient[n] = acc;
    }
    quotient
}

/// Natural log of the tail majorant `Σ_{n>M} e^{4π√n} |q|^n` with `|q| = e^{−2πy}`.
pub fn log_tail_bound(order: usize, y: f64) -> f64 {
    use std::f64::consts::PI;
    let n = (order + 1) as f64;
    let log_r = 2.0 * PI / n.sqrt() - 2.0 * PI * y;
    if log_r >= 0.0 {
        return f64::INFINITY;
    }
    4.0 * PI * n.sqrt() - 2.0 * PI * y * n - (-log_r.exp()).ln_1p()
}

/// Smallest truncation order whose tail bound is below `2^-bits`.
pub fn truncation_order(bits: u32, y: f64) -> usize {
    let target = -(bits as f64) * std::f64::consts::LN_2;
    let mut m = 1usize;
    while log_tail_bound(m, y) > target {
        m += 1;
        assert!(
            m < 1_000_000,
            "j-series truncation order diverged (Im τ = {y})"
        );
    }
    m
}

fn two_pi(prec: u32) -> Ball {
    pi_ball(prec).mul_int(&BigInt::from(2))
}

/// `j(z)` for a ball already in (or near) the fundamental domain, at working
/// precision `z.prec()`; the result's radius includes the truncation error.
fn j_series_ball(z: &Ball) -> Result<Ball> {
    let prec = z.prec();
    let y = z.im_part();
    let y_lo = y.re_f64() - y.rad_f64();
    if !(y_lo > 0.5) {
        return Err(Error::Domain(format!(
            "series evaluation needs Im τ > 1/2, got {y_lo}"
        )));
    }
    let tp = two_pi(prec);
    let arg = &tp * &y;
    let big = arg.exp_real();
    let small = (-&arg).exp_real();
    let (cos, sin) = (&tp * &z.re_part()).cos_sin_real();
    let phase = &cos + &sin.mul_i();
    let q = &small * &phase;
    let q_inv = &big * &phase.conj();

    let order = truncation_order(prec + 4, y_lo);
    let series = j_coefficients(order);
    let coeffs = series.nonnegative();
    let mut acc = Ball::from_int(&coeffs[order], prec);
    for c in coeffs[..order].iter().rev() {
        acc = &(&acc * &q) + &Ball::from_int(c, prec);
    }
    let tail = log_tail_bound(order, y_lo) / std::f64::consts::LN_2 + prec as f64;
    let tail_ulps = if tail < 0.0 {
        BigInt::one()
    } else {
        BigInt::one() << (tail.ceil() as usize + 1)
    };
    Ok((&q_inv + &acc).inflate(tail_ulps.magnitude()))
}

/// `j(τ)` for an arbitrary ball in the upper half-plane, with absolute error
/// at most `2^-bits` (the returned radius is the certified bound).
pub fn j_of_ball(tau: &Ball, bits: u32) -> Result<Ball> {
    if !tau.raw_im().is_positive() {
        return Err(Error::Domain("point is not in the upper half-plane".into()));
    }
    let mut extra = 64u32;
    for _ in 0..6 {
        let work = (bits + extra).max(tau.prec());
        let (_, z) = reduce_ball(&tau.with_prec(work))?;
        let value = j_series_ball(&z)?;
        let rounded = value.with_prec(bits + 8);
        if rounded.rad_at_most_pow2(bits as i64) {
            return Ok(rounded);
        }
        // not accurate enough: widen by the observed shortfall
        let short = value.rad_log2() + bits as f64;
        extra += short.ceil().max(16.0) as u32 + 16;
    }
    Err(Error::PrecisionTooLow(format!(
        "could not certify j to 2^-{bits}"
    )))
}

/// An enclosure of `j` over the whole ball `tau`, evaluated at `work` bits
/// with no accuracy target: the radius reflects the input's uncertainty.
pub fn j_enclosure(tau: &Ball, work: u32) -> Result<Ball> {
    if !tau.raw_im().is_positive() {
        return Err(Error::Domain("point is not in the upper half-plane".into()));
    }
    let (_, z) = reduce_ball(&tau.with_prec(work.max(tau.prec())))?;
    j_series_ball(&z)
}

/// `j(τ)` accurate to `digits` decimal places (absolute).
pub fn evaluate_j(tau: &HalfPlanePoint, digits: u32) -> Result<Ball> {
    if digits < 1 {
        return Err(Error::Domain("precision must be at least one digit".into()));
    }
    let bits = digits_to_bits(digits + GUARD_DIGITS);
    let tau = match tau {
        HalfPlanePoint::Exact(q) => {
            let (_, reduced) = q.reduce();
            HalfPlanePoint::Exact(reduced)
        }
        other => other.clone(),
    };
    let (_, im) = tau.approx();
    // |j| ≈ e^{2π Im τ} after reduction; start with that many extra bits
    let mag_bits =
        (2.0 * std::f64::consts::PI * im.max(1.0) * std::f64::consts::LOG2_E).ceil() as u32;
    let start = tau.to_ball(bits + mag_bits + 64);
    j_of_ball(&start, bits)
}

/// `y² = 4x³ − g2·x − g3` over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub g2: BigRational,
    pub g3: BigRational,
}

impl WeierstrassCurve {
    pub fn new(g2: BigRational, g3: BigRational) -> Result<Self> {
        let c = WeierstrassCurve { g2, g3 };
        if c.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    /// `g2³ − 27·g3²`.
    pub fn discriminant(&self) -> BigRational {
        let g2c = &self.g2 * &self.g2 * &self.g2;
        g2c - BigRational::from_integer(27.into()) * &self.g3 * &self.g3
    }
}

/// The curve `y² = 4x³ − cx − c`, `c = 27j/(j − 1728)`, whose j-invariant is `j`.
pub fn curve_from_j(j: &BigRational) -> Result<WeierstrassCurve> {
    let k1728 = BigRational::from_integer(1728.into());
    if j.is_zero() || *j == k1728 {
        return Err(Error::ExcludedJ(j.to_string()));
    }
    let c = BigRational::from_integer(27.into()) * j / (j - k1728);
    WeierstrassCurve::new(c.clone(), c)
}

/// `1728·g2³/(g2³ − 27·g3²)`.
pub fn j_invariant(curve: &WeierstrassCurve) -> Result<BigRational> {
    let disc = curve.discriminant();
    if disc.is_zero() {
        return Err(Error::SingularCurve);
    }
    let g2c = &curve.g2 * &curve.g2 * &curve.g2;
    Ok(BigRational::from_integer(1728.into()) * g2c / disc)
}

/// Numeric counterpart of [`curve_from_j`]: returns `c` as a ball.
pub fn curve_constant_from_j_ball(j: &Ball) -> Result<Ball> {
    let k1728 = Ball::from_i64(1728, j.prec());
    if j.contains_zero() || j.overlaps(&k1728) {
        return Err(Error::ExcludedJ(format!("{j:?}")));
    }
    j.mul_int(&BigInt::from(27)).div(&(j - &k1728))
}
