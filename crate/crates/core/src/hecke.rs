//! Hecke orbits `j(G_N τ)`, the isogeny relation `Φ_N(j₁, j₂) = 0`, and the
//! bounded independence predicates built on it.
//!
//! "For all N" cannot be decided numerically, so the independence predicates
//! return a [`BoundedVerdict`] carrying the level and discriminant bounds the
//! search covered.

use std::f64::consts::{LOG2_E, PI};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::ball::{digits_to_bits, Ball};
use crate::cm::{self, CmSearch};
use crate::error::{Error, Result};
use crate::gl2q::{coset_representatives, GroupElement};
use crate::halfplane::{apply, apply_ball, HalfPlanePoint};
use crate::jfun::{evaluate_j, j_enclosure, j_of_ball, GUARD_DIGITS};
use crate::modpoly::{phi, phi_eval, term_scale_log2};
use crate::value::{ball_is_zero_scaled, JValue, Truth};

/// Largest `|D|` for which an exact point's j-value is recognized as an
/// integer through its class polynomial.
const EXACT_J_DISC_LIMIT: u64 = 10_000;

/// `j(g·τ)` to `digits` decimal places.
pub fn j_of_image(g: &GroupElement, tau: &HalfPlanePoint, digits: u32) -> Result<Ball> {
    j_of_image_within(g, tau, digits, None)
}

/// [`j_of_image`] for a numeric `τ` known only to within `10^-d` when
/// `uncertainty` is `Some(d)`; the enclosure then covers every such `τ`.
/// Exact points ignore the uncertainty.
pub fn j_of_image_within(
    g: &GroupElement,
    tau: &HalfPlanePoint,
    digits: u32,
    uncertainty: Option<u32>,
) -> Result<Ball> {
    match tau {
        HalfPlanePoint::Exact(_) => evaluate_j(&apply(g, tau), digits),
        HalfPlanePoint::Numeric(_) => {
            // transform the dyadic input as a ball rather than rounding the
            // image to a new numeric point
            let bits = digits_to_bits(digits + GUARD_DIGITS);
            let (_, im) = tau.approx();
            let det = g.level().to_f64().unwrap_or(f64::MAX);
            let y = (im * det).max(1.0 / (im / det)).max(1.0);
            let extra = (2.0 * PI * y * LOG2_E + 2.0 * y.log2() + det.log2()).ceil() as u32 + 64;
            let prec = bits + extra;
            let ball = tau.to_ball(prec);
            match uncertainty {
                None => j_of_ball(&apply_ball(g, &ball)?, bits),
                Some(d) => {
                    let ulps =
                        (BigUint::one() << prec as usize) / BigUint::from(10u32).pow(d) + 1u32;
                    let value = j_enclosure(&apply_ball(g, &ball.inflate(&ulps))?, prec)?;
                    // the zero tests read accuracy off the precision, so
                    // label the result with what the input supports
                    Ok(value.with_prec((bits + 8).min(digits_to_bits(d))))
                }
            }
        }
    }
}

/// `j(τ)` as a [`JValue`]: exact when `τ` is a CM point of class number one
/// (with `|D|` up to a fixed limit), otherwise a ball at `digits` places.
pub fn j_value(tau: &HalfPlanePoint, digits: u32) -> Result<JValue> {
    if let Some(d) = tau.discriminant().and_then(|d| d.to_i64()) {
        if d.unsigned_abs() <= EXACT_J_DISC_LIMIT && cm::class_number(d)? == 1 {
            let h = cm::class_polynomial_auto(d)?;
            return Ok(JValue::from_bigint(
                -h.polynomial().coefficients()[0].clone(),
            ));
        }
    }
    Ok(JValue::Approx(evaluate_j(tau, digits)?))
}

/// `{j(g·τ) : g ∈ coset_representatives(N)}` in representative order.
pub fn orbit_at_level(tau: &HalfPlanePoint, n: u64, digits: u32) -> Result<Vec<Ball>> {
    if n == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    coset_representatives(n)
        .representatives()
        .par_iter()
        .map(|g| j_of_image(g, tau, digits))
        .collect()
}

/// Whether `Φ_N(j₁, j₂) = 0`: exact for rational inputs; for numeric
/// inputs `True` means the certified enclosure of `Φ_N(j₁, j₂)` contains zero
/// with a radius below `2^(-prec/2)` times the size of its terms.
pub fn related_at_level(j1: &JValue, j2: &JValue, n: u64) -> Result<Truth> {
    let p = phi(n)?;
    let v = phi_eval(&p, j1, j2);
    Ok(match &v {
        JValue::Exact(q) => Truth::from_bool(num_traits::Zero::is_zero(q)),
        JValue::Approx(b) => ball_is_zero_scaled(b, term_scale_log2(&p, j1, j2)),
    })
}

/// Outcome of [`in_hecke_orbit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitSearch {
    /// Related at this level and at no smaller one.
    Related(u64),
    /// No relation at any level up to the bound.
    Unrelated { max_n: u64 },
    /// The relation at this level could not be decided, and no smaller
    /// level relates the values.
    Indeterminate(u64),
}

/// Smallest `N ≤ max_n` with `Φ_N(j₁, j₂) = 0`.
pub fn in_hecke_orbit(j1: &JValue, j2: &JValue, max_n: u64) -> Result<OrbitSearch> {
    if max_n == 0 {
        return Err(Error::Domain("level bound must be at least 1".into()));
    }
    for n in 1..=max_n {
        match related_at_level(j1, j2, n)? {
            Truth::True => return Ok(OrbitSearch::Related(n)),
            Truth::False => {}
            Truth::Indeterminate => return Ok(OrbitSearch::Indeterminate(n)),
        }
    }
    Ok(OrbitSearch::Unrelated { max_n })
}

/// Search bounds for the independence predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Largest level `N` whose relation `Φ_N` is tested.
    pub max_n: u64,
    /// Largest `|D|` for which a point or value counts as special.
    pub disc_bound: u64,
    /// Decimal places for numeric j-values.
    pub digits: u32,
}

impl SearchBounds {
    pub fn with_max_n(max_n: u64) -> Self {
        Self {
            max_n,
            ..Self::default()
        }
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_n: 10,
            disc_bound: 100,
            digits: 60,
        }
    }
}

/// Why a bounded verdict came out false or indeterminate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Entry `index` is special, with this discriminant.
    Special { index: usize, disc: BigInt },
    /// Entries `i` and `k` are related at `level`.
    Related { i: usize, k: usize, level: u64 },
    /// The test on these entries at this level (or discriminant) was undecided.
    Undecided { i: usize, k: usize, at: i64 },
}

/// A verdict valid up to the attached bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedVerdict {
    pub truth: Truth,
    pub max_n: u64,
    pub disc_bound: u64,
    pub witness: Option<Witness>,
}

impl BoundedVerdict {
    fn new(truth: Truth, b: &SearchBounds, witness: Option<Witness>) -> Self {
        Self {
            truth,
            max_n: b.max_n,
            disc_bound: b.disc_bound,
            witness,
        }
    }
}

fn pairwise(js: &[JValue], b: &SearchBounds) -> Result<BoundedVerdict> {
    let mut undecided = None;
    for i in 0..js.len() {
        for k in i + 1..js.len() {
            match in_hecke_orbit(&js[i], &js[k], b.max_n)? {
                OrbitSearch::Related(level) => {
                    return Ok(BoundedVerdict::new(
                        Truth::False,
                        b,
                        Some(Witness::Related { i, k, level }),
                    ));
                }
                OrbitSearch::Indeterminate(at) => {
                    undecided.get_or_insert(Witness::Undecided {
                        i,
                        k,
                        at: at as i64,
                    });
                }
                OrbitSearch::Unrelated { .. } => {}
            }
        }
    }
    Ok(match undecided {
        Some(w) => BoundedVerdict::new(Truth::Indeterminate, b, Some(w)),
        None => BoundedVerdict::new(Truth::True, b, None),
    })
}

/// No point is special (`|D| ≤ disc_bound`) and no two points have j-values
/// related at a level `≤ max_n`.
pub fn g_independent_with(taus: &[HalfPlanePoint], b: &SearchBounds) -> Result<BoundedVerdict> {
    for (index, tau) in taus.iter().enumerate() {
        if let Some(disc) = cm::special_discriminant(tau, b.disc_bound) {
            return Ok(BoundedVerdict::new(
                Truth::False,
                b,
                Some(Witness::Special { index, disc }),
            ));
        }
    }
    let js = taus
        .par_iter()
        .map(|t| j_value(t, b.digits))
        .collect::<Result<Vec<_>>>()?;
    pairwise(&js, b)
}

/// [`g_independent_with`] at the default bounds and the given level bound.
pub fn g_independent(taus: &[HalfPlanePoint], max_n: u64) -> Result<BoundedVerdict> {
    g_independent_with(taus, &SearchBounds::with_max_n(max_n))
}

/// No value is a CM value with `|D| ≤ disc_bound` and no two values are
/// related at a level `≤ max_n`.
pub fn strongly_g_independent_with(js: &[JValue], b: &SearchBounds) -> Result<BoundedVerdict> {
    let mut undecided = None;
    for (index, j) in js.iter().enumerate() {
        match cm::is_cm_value(j, b.disc_bound)? {
            CmSearch::Found(d) => {
                return Ok(BoundedVerdict::new(
                    Truth::False,
                    b,
                    Some(Witness::Special {
                        index,
                        disc: d.into(),
                    }),
                ));
            }
            CmSearch::Indeterminate(d) => {
                undecided.get_or_insert(Witness::Undecided {
                    i: index,
                    k: index,
                    at: d,
                });
            }
            CmSearch::NotFound { .. } => {}
        }
    }
    let verdict = pairwise(js, b)?;
    match (verdict.truth, undecided) {
        (Truth::True, Some(w)) => Ok(BoundedVerdict::new(Truth::Indeterminate, b, Some(w))),
        _ => Ok(verdict),
    }
}

pub fn strongly_g_independent(js: &[JValue], max_n: u64) -> Result<BoundedVerdict> {
    strongly_g_independent_with(js, &SearchBounds::with_max_n(max_n))
}
