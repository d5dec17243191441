//! Modular polynomials `Φ_N` built by interpolation over Hecke-orbit products.
//!
//! At sample points `τ_k = i·(1 + k/17)`, `k = 0..=ψ(N)`, the orbit product
//! `∏_g (Z − j(g·τ_k))` over the coset representatives equals `Φ_N(Z, j(τ_k))`.
//! Each `Z`-coefficient is a polynomial of degree `ψ(N)` in `j(τ_k)`, recovered
//! by exact Lagrange interpolation on the rounded sample values. The error of
//! every interpolated coefficient is bounded from the ball radii of the
//! samples; a coefficient is accepted only when it lies within 0.01 of an
//! integer including that bound.

use std::collections::HashMap;
use std::f64::consts::{LOG2_E, PI};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::ball::{self, Ball};
use crate::cache;
use crate::error::{Error, Result};
use crate::gl2q::{coset_representatives, psi, GroupElement};
use crate::jfun::{j_of_ball, GUARD_DIGITS};
use crate::poly::BivariatePolynomial;
use crate::value::JValue;

/// Denominator of the sample heights `1 + k/17`.
const SAMPLE_STEP: i64 = 17;
/// Largest admissible distance from an integer for a rounded coefficient.
const ROUNDING_TOLERANCE: f64 = 0.01;
/// Doublings attempted by [`modular_polynomial_auto`].
const MAX_DOUBLINGS: u32 = 6;

/// Height `t_k` of the sample point `τ_k = i·t_k`.
pub fn sample_height(k: usize) -> BigRational {
    BigRational::new(
        BigInt::from(SAMPLE_STEP + k as i64),
        BigInt::from(SAMPLE_STEP),
    )
}

/// Upper bound on `log2 |j(τ)|` from `Im τ = s` alone: the reduced point has
/// imaginary part at most `max(s, 1/s)`.
fn j_log2_bound(s: f64) -> f64 {
    let y = s.max(1.0 / s).max(1.0);
    2.0 * PI * y * LOG2_E + 12.0
}

/// `j(b/d + i·a·t/d)` to absolute accuracy `2^-bits`.
fn j_at(g: &GroupElement, t: &BigRational, bits: u32) -> Result<Ball> {
    let re = BigRational::new(g.b().clone(), g.d().clone());
    let im = t * BigRational::new(g.a().clone(), g.d().clone());
    let s = ratio_f64(&im);
    let y = s.max(1.0 / s);
    // input precision covers |j'| ~ 2π|j| and the |cτ+d|^-2 of the reduction
    let extra = j_log2_bound(s) + 2.0 * y.log2().max(0.0) + 64.0;
    let tau = Ball::from_complex_rational(&re, &im, bits + extra.ceil() as u32);
    j_of_ball(&tau, bits)
}

fn ratio_f64(q: &BigRational) -> f64 {
    (ball::log2_abs(q.numer()) - ball::log2_abs(q.denom())).exp2()
}

/// `log2(2^a + 2^b)`.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() * LOG2_E
}

/// Integer-node Lagrange data for nodes `X_k`: the quotients
/// `∏_{l≠k}(u − X_l)` (coefficients low first), the weights `L/D_k` with
/// `D_k = ∏_{l≠k}(X_k − X_l)` and `L = lcm |D_k|`.
struct Lagrange {
    quotients: Vec<Vec<BigInt>>,
    weights: Vec<BigInt>,
    lcm: BigInt,
    /// `log2 |q_{k,i}| − log2 |D_k|`.
    log_scale: Vec<Vec<f64>>,
}

impl Lagrange {
    fn new(nodes: &[BigInt]) -> Result<Self> {
        let n = nodes.len();
        let mut master = vec![BigInt::one()];
        for x in nodes {
            let mut next = vec![BigInt::zero(); master.len() + 1];
            for (i, c) in master.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * x;
            }
            master = next;
        }
        let mut quotients = Vec::with_capacity(n);
        let mut denoms = Vec::with_capacity(n);
        for x in nodes {
            // synthetic division of the master polynomial by (u − x)
            let mut q = vec![BigInt::zero(); n];
            let mut carry = BigInt::zero();
            for i in (1..=n).rev() {
                carry = &master[i] + &carry * x;
                q[i - 1] = carry.clone();
            }
            let d = q.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
            if d.is_zero() {
                return Err(Error::PrecisionTooLow(
                    "interpolation nodes coincide".into(),
                ));
            }
            quotients.push(q);
            denoms.push(d);
        }
        let lcm = denoms.iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
        let weights = denoms.iter().map(|d| &lcm / d).collect();
        let log_scale = quotients
            .iter()
            .zip(&denoms)
            .map(|(q, d)| {
                let ld = ball::log2_abs(d);
                q.iter().map(|c| ball::log2_abs(c) - ld).collect()
            })
            .collect();
        Ok(Self {
            quotients,
            weights,
            lcm,
            log_scale,
        })
    }
}

/// `Φ_N` at working precision `digits`.
///
/// Fails with [`Error::PrecisionTooLow`] when some coefficient cannot be
/// certified; callers retry with more digits (see [`modular_polynomial_auto`]).
pub fn modular_polynomial(n: u64, digits: u32) -> Result<BivariatePolynomial> {
    if n == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    if digits == 0 {
        return Err(Error::Domain("precision must be at least one digit".into()));
    }
    let reps = coset_representatives(n);
    let deg = reps.len();
    let samples = deg + 1;
    let base_bits = ball::digits_to_bits(digits + GUARD_DIGITS);
    let heights: Vec<BigRational> = (0..samples).map(sample_height).collect();

    // each orbit product loses about Σ log2|y| bits to cancellation
    let sample_bits: Vec<u32> = heights
        .iter()
        .map(|t| {
            let loss: f64 = reps
                .representatives()
                .iter()
                .map(|g| {
                    j_log2_bound(ratio_f64(
                        &(t * BigRational::new(g.a().clone(), g.d().clone())),
                    ))
                })
                .sum();
            base_bits + loss.ceil() as u32 + 16
        })
        .collect();
    let work_bits = *sample_bits.iter().max().unwrap();

    let identity = GroupElement::identity();
    let nodes: Vec<Ball> = heights
        .par_iter()
        .map(|t| j_at(&identity, t, work_bits))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, usize)> = (0..samples)
        .flat_map(|k| (0..deg).map(move |g| (k, g)))
        .collect();
    let orbit: Vec<Ball> = tasks
        .par_iter()
        .map(|&(k, g)| j_at(&reps.representatives()[g], &heights[k], sample_bits[k]))
        .collect::<Result<_>>()?;

    // elementary symmetric data: products[k][m] = coefficient of Z^m
    let products: Vec<Vec<Ball>> = (0..samples)
        .map(|k| {
            let prec = orbit[k * deg].prec();
            let mut p = vec![Ball::from_i64(1, prec)];
            for y in &orbit[k * deg..(k + 1) * deg] {
                let mut next = vec![Ball::zero(prec); p.len() + 1];
                for (i, c) in p.iter().enumerate() {
                    next[i + 1] = &next[i + 1] + c;
                    next[i] = &next[i] - &(c * y);
                }
                p = next;
            }
            p
        })
        .collect();

    let node_prec = nodes[0].prec();
    let node_ints: Vec<BigInt> = nodes.iter().map(|b| b.raw_re().clone()).collect();
    let node_log_rad: Vec<f64> = nodes.iter().map(Ball::rad_log2).collect();
    let node_log_abs: Vec<f64> = nodes.iter().map(Ball::mag_log2).collect();
    let lagrange = Lagrange::new(&node_ints)?;
    let value_prec = products.iter().map(|p| p[0].prec()).max().unwrap();

    let mut phi = BivariatePolynomial::new();
    phi.add_term(deg as u32, 0, BigInt::one());
    for m in 0..deg {
        let mut log_err = Vec::with_capacity(samples);
        let mut scaled = Vec::with_capacity(samples);
        for k in 0..samples {
            let e = products[k][m].with_prec(value_prec);
            if !e.im_part().contains_zero() {
                return Err(Error::PrecisionTooLow(format!(
                    "orbit product coefficient {m} at sample {k} is not real"
                )));
            }
            log_err.push(e.rad_log2());
            scaled.push(e.raw_re() * &lagrange.weights[k]);
        }
        let denom = &lagrange.lcm << value_prec as usize;
        let mut coeffs = Vec::with_capacity(samples);
        let mut slack = Vec::with_capacity(samples);
        for i in 0..samples {
            let num: BigInt = (0..samples)
                .map(|k| &scaled[k] * &lagrange.quotients[k][i])
                .sum();
            // c_i = num · 2^{P·i} / (2^Q · L)
            let num = num << (node_prec as usize * i);
            let (r, dist) = round_ratio(&num, &denom);
            coeffs.push(r);
            slack.push(dist);
        }
        // |P_m'(x_k)|, bounded through the rounded coefficients
        let deriv: Vec<f64> = (0..samples)
            .map(|k| {
                (1..samples).fold(f64::NEG_INFINITY, |acc, i| {
                    let t = ball::log2_abs(&coeffs[i]).max(0.0)
                        + (i as f64).log2()
                        + (i - 1) as f64 * node_log_abs[k].max(0.0);
                    log2_add(acc, t)
                })
            })
            .collect();
        for i in 0..samples {
            let mut bound = f64::NEG_INFINITY;
            for k in 0..samples {
                let err_k = log2_add(log_err[k], node_log_rad[k] + deriv[k] + 1.0);
                let t = lagrange.log_scale[k][i] + node_prec as f64 * i as f64 + err_k;
                bound = log2_add(bound, t);
            }
            // factor-2 margin for the floating-point bookkeeping
            let total = slack[i] + (bound + 1.0).exp2();
            if !(total <= ROUNDING_TOLERANCE) {
                return Err(Error::PrecisionTooLow(format!(
                    "coefficient X^{m} Y^{i} of Φ_{n} not certified at {digits} digits (error {total:.3e})"
                )));
            }
            phi.add_term(m as u32, i as u32, coeffs[i].clone());
        }
    }
    check_shape(n, &phi)?;
    Ok(phi)
}

/// Nearest integer to `num/den` (`den > 0`) and the distance to it.
fn round_ratio(num: &BigInt, den: &BigInt) -> (BigInt, f64) {
    let twice: BigInt = num * 2 + den;
    let r = twice.div_floor(&(den * 2));
    let rem = num - &r * den;
    let dist = (ball::log2_abs(&rem) - ball::log2_abs(den)).exp2();
    (r, dist)
}

/// Shape invariants every `Φ_N` satisfies.
fn check_shape(n: u64, phi: &BivariatePolynomial) -> Result<()> {
    let deg = psi(n) as u32;
    let ok = phi.is_monic_in_x()
        && phi.degree_x() == Some(deg)
        && phi.degree_y() == Some(deg)
        && (n == 1 || phi.is_symmetric());
    if ok {
        Ok(())
    } else {
        Err(Error::PrecisionTooLow(format!(
            "interpolated Φ_{n} fails the symmetry/degree checks"
        )))
    }
}

/// A starting precision that usually suffices for `Φ_N`.
pub fn initial_digits(n: u64) -> u32 {
    20 + psi(n) as u32
}

/// `Φ_N`, doubling the precision from [`initial_digits`] until certified.
pub fn modular_polynomial_auto(n: u64) -> Result<BivariatePolynomial> {
    let mut digits = initial_digits(n);
    let mut last = None;
    for _ in 0..=MAX_DOUBLINGS {
        match modular_polynomial(n, digits) {
            Err(Error::PrecisionTooLow(msg)) => {
                last = Some(msg);
                digits *= 2;
            }
            other => return other,
        }
    }
    Err(Error::PrecisionTooLow(last.unwrap_or_default()))
}

type Slot = Arc<Mutex<Option<Arc<BivariatePolynomial>>>>;
static PHI_MEMO: Mutex<Option<HashMap<u64, Slot>>> = Mutex::new(None);

/// `Φ_N`, memoized in memory and, when configured, on disk.
pub fn phi(n: u64) -> Result<Arc<BivariatePolynomial>> {
    if n == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    let slot = {
        let mut memo = PHI_MEMO.lock().unwrap_or_else(|e| e.into_inner());
        memo.get_or_insert_with(HashMap::new)
            .entry(n)
            .or_default()
            .clone()
    };
    // per-level lock: concurrent callers wait for one computation
    let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(p) = guard.as_ref() {
        return Ok(p.clone());
    }
    let name = cache::phi_file_name(n);
    let cached = cache::read(&name)
        .and_then(|text| BivariatePolynomial::parse_phi_text(&text).ok())
        .filter(|(level, p)| *level == n && check_shape(n, p).is_ok())
        .map(|(_, p)| p);
    let p = match cached {
        Some(p) => p,
        None => {
            let p = modular_polynomial_auto(n)?;
            cache::write(&name, &p.to_phi_text(n))?;
            p
        }
    };
    let p = Arc::new(p);
    *guard = Some(p.clone());
    Ok(p)
}

/// `P(x, y)`: exact when both inputs are exact, otherwise a ball at the
/// lower of the input precisions.
pub fn phi_eval(p: &BivariatePolynomial, x: &JValue, y: &JValue) -> JValue {
    match (x, y) {
        (JValue::Exact(a), JValue::Exact(b)) => JValue::Exact(p.eval_rational(a, b)),
        _ => {
            let prec = x.prec().into_iter().chain(y.prec()).min().unwrap_or(128);
            JValue::Approx(p.eval_ball(&x.to_ball(prec), &y.to_ball(prec), prec))
        }
    }
}

/// `log2 Σ |c_ij|·|x|^i·|y|^j`, the size of the terms summed by [`phi_eval`].
pub fn term_scale_log2(p: &BivariatePolynomial, x: &JValue, y: &JValue) -> f64 {
    let lx = log10_abs(x) / std::f64::consts::LOG10_2;
    let ly = log10_abs(y) / std::f64::consts::LOG10_2;
    p.terms().fold(f64::NEG_INFINITY, |acc, (&(i, j), c)| {
        let mut t = ball::log2_abs(c);
        if i > 0 {
            t += i as f64 * lx;
        }
        if j > 0 {
            t += j as f64 * ly;
        }
        log2_add(acc, t)
    })
}

/// Kronecker's congruence `Φ_p ≡ (X^p − Y)(X − Y^p) mod p`.
pub fn kronecker_check(p: u64) -> Result<bool> {
    if p < 2 || crate::gl2q::prime_divisors(p) != [p] {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let e = p as u32;
    let one = || BigInt::one();
    let left = BivariatePolynomial::from_terms([((e, 0), one()), ((0, 1), -one())]);
    let right = BivariatePolynomial::from_terms([((1, 0), one()), ((0, e), -one())]);
    let modulus = BigInt::from(p);
    let expected = left.mul(&right).reduce_mod(&modulus);
    Ok(phi(p)?.reduce_mod(&modulus) == expected)
}

/// `|Φ_N(x, y)|` as a log10 upper bound, for residual reports.
pub fn log10_abs(v: &JValue) -> f64 {
    match v {
        JValue::Exact(q) if q.is_zero() => f64::NEG_INFINITY,
        JValue::Exact(q) => {
            (ball::log2_abs(q.numer()) - ball::log2_abs(q.denom())) * std::f64::consts::LOG10_2
        }
        JValue::Approx(b) => b.mag_log2() * std::f64::consts::LOG10_2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> JValue {
        JValue::int(n)
    }

    #[test]
    fn level_one_is_x_minus_y() {
        let p = modular_polynomial(1, 30).unwrap();
        let expected = BivariatePolynomial::from_terms([((1, 0), 1.into()), ((0, 1), (-1).into())]);
        assert_eq!(p, expected);
        assert_eq!(phi_eval(&p, &int(5), &int(5)), int(0));
    }

    #[test]
    fn level_two_known_coefficients() {
        let p = modular_polynomial(2, 60).unwrap();
        assert_eq!(p.degree_x(), Some(3));
        assert_eq!(p.coefficient(2, 1), BigInt::from(1488));
        assert_eq!(p.coefficient(1, 2), BigInt::from(1488));
        assert_eq!(
            p.coefficient(0, 0),
            "-157464000000000".parse::<BigInt>().unwrap()
        );
        assert_eq!(p.coefficient(2, 2), BigInt::from(-1));
        assert_eq!(phi_eval(&p, &int(1728), &int(287496)), int(0));
        assert_eq!(phi_eval(&p, &int(0), &int(0)), int(-157_464_000_000_000));
    }

    #[test]
    fn lagrange_recovers_polynomial() {
        // 3 + 2u − u² at nodes 1, 4, −2
        let nodes: Vec<BigInt> = [1, 4, -2].iter().map(|&x| BigInt::from(x)).collect();
        let l = Lagrange::new(&nodes).unwrap();
        let vals: Vec<BigInt> = nodes.iter().map(|x| 3 + 2 * x - x * x).collect();
        for (i, want) in [3, 2, -1].iter().enumerate() {
            let num: BigInt = (0..3)
                .map(|k| &vals[k] * &l.weights[k] * &l.quotients[k][i])
                .sum();
            let (r, dist) = round_ratio(&num, &l.lcm);
            assert_eq!(r, BigInt::from(*want));
            assert_eq!(dist, 0.0);
        }
    }

    #[test]
    fn stable_across_precisions() {
        assert_eq!(
            modular_polynomial(3, 25).unwrap(),
            modular_polynomial(3, 90).unwrap()
        );
    }

    #[test]
    fn kronecker_congruence() {
        for p in [2, 3, 5] {
            assert!(kronecker_check(p).unwrap(), "p = {p}");
        }
        assert!(kronecker_check(4).is_err());
    }
}
