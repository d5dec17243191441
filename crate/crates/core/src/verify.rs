//! The invariant suite behind `jcover verify`.
//!
//! Each check returns a pass/fail line; a check that errors counts as
//! failed and carries the error text. `quick` shrinks the ranges so the
//! whole suite finishes in seconds.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::cm::{class_number, class_polynomial_auto};
use crate::error::Result;
use crate::fingal::{
    cyclic_subgroups, group_elements, group_order, psl_order, subgroup_coset_bijection,
    FiniteGroupElement, Flavor,
};
use crate::gl2q::{coset_representatives, psi, stabilizer_index, GroupElement};
use crate::halfplane::{apply, HalfPlanePoint};
use crate::jfun::{curve_from_j, evaluate_j, j_invariant};
use crate::modelcheck::{
    extend_partial_iso, finite_type, nonstandard_fiber_witness, psi_axiom_check, sample_point,
    satisfies_sf, FiniteLevelStructure,
};
use crate::modpoly::{kronecker_check, phi};
use crate::value::JValue;

/// One line of the suite.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

fn run(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn cosets(quick: bool) -> Result<(bool, String)> {
    let top = if quick { 20 } else { 50 };
    let bad: Vec<u64> = (1..=top)
        .filter(|&n| coset_representatives(n).len() as u64 != psi(n))
        .collect();
    Ok((
        bad.is_empty(),
        format!("|reps(N)| = psi(N) for N <= {top}; mismatches {bad:?}"),
    ))
}

fn modular_polynomials(quick: bool) -> Result<(bool, String)> {
    let samples = if quick { 2 } else { 5 };
    let mut ok = true;
    for n in [2u64, 3] {
        let p = phi(n)?;
        let d = psi(n) as u32;
        ok &= p.is_symmetric() && p.is_monic_in_x() && p.degree_x() == Some(d);
        ok &= kronecker_check(n)?;
        let mut gs = vec![GroupElement::identity()];
        gs.extend(coset_representatives(n).representatives().iter().cloned());
        ok &= psi_axiom_check(&gs, samples, 30)?.passed;
    }
    let q = |n: i64| BigRational::from_integer(BigInt::from(n));
    ok &= phi(2)?.eval_rational(&q(1728), &q(287496)).is_zero();
    Ok((
        ok,
        format!("Phi_2, Phi_3 shape, congruence, {samples} samples"),
    ))
}

fn j_values(quick: bool) -> Result<(bool, String)> {
    let tol = BigRational::new(1.into(), BigInt::from(10).pow(48));
    let near = |tau: &HalfPlanePoint, v: i64| -> Result<bool> {
        let j = evaluate_j(tau, 50)?;
        Ok(j.certified_integer(&tol) == Some(BigInt::from(v)))
    };
    let mut ok = near(&HalfPlanePoint::i(), 1728)? && near(&HalfPlanePoint::rho(), 0)?;
    let pairs = if quick { 5 } else { 50 };
    let mut worst = f64::NEG_INFINITY;
    for k in 0..pairs {
        let tau = sample_point(k, 60)?;
        let g = GroupElement::from_i64(1 + k as i64 % 3, -1, 1, 0)?;
        let g = g.multiply(&GroupElement::from_i64(1, (k % 5) as i64, 0, 1)?);
        let (a, b) = (evaluate_j(&tau, 50)?, evaluate_j(&apply(&g, &tau), 50)?);
        let d = JValue::Approx(&a - &b);
        worst = worst.max(crate::modpoly::log10_abs(&d).max((&a - &b).rad_log10()));
    }
    ok &= worst < -48.0;
    Ok((
        ok,
        format!("j(i), j(rho); invariance residual 10^{worst:.1} over {pairs} pairs"),
    ))
}

fn class_polynomials(_quick: bool) -> Result<(bool, String)> {
    let expect = [
        (-3i64, vec![0i64, 1]),
        (-4, vec![-1728, 1]),
        (-7, vec![3375, 1]),
    ];
    let mut ok = true;
    for (d, coeffs) in expect {
        let h = class_polynomial_auto(d)?;
        ok &= h.polynomial().coefficients()
            == crate::poly::IntPolynomial::from_i64(&coeffs).coefficients();
    }
    let h23 = class_polynomial_auto(-23)?;
    ok &= h23.degree() == 3 && class_number(-23)? == 3;
    let again = crate::cm::class_polynomial(-23, 2 * crate::cm::suggested_digits(-23)?)?;
    ok &= again.polynomial() == h23.polynomial();
    Ok((ok, "H_-3, H_-4, H_-7 exact; H_-23 degree 3, stable".into()))
}

fn finite_groups(quick: bool) -> Result<(bool, String)> {
    let (orders, bij) = if quick { (8, 6) } else { (13, 10) };
    let mut ok = true;
    for n in 1..=orders {
        ok &= group_elements(n, Flavor::Psl).len() as u64 == psl_order(n);
        ok &= group_elements(n, Flavor::Pgl).len() as u64 == group_order(n, Flavor::Pgl);
    }
    for n in 1..=bij {
        ok &= cyclic_subgroups(n).len() as u64 == psi(n);
        if n > 1 {
            ok &= phi(n)?.degree_x() == Some(psi(n) as u32);
            ok &= subgroup_coset_bijection(n)?.is_bijective();
        }
    }
    Ok((
        ok,
        format!("orders N <= {orders}; subgroups and bijection N <= {bij}"),
    ))
}

fn congruence_index(_quick: bool) -> Result<(bool, String)> {
    let mut ok = true;
    for n in 2..=5u64 {
        let mut gs = vec![GroupElement::identity()];
        gs.extend(coset_representatives(n).representatives().iter().cloned());
        ok &= stabilizer_index(&gs) == psl_order(n);
    }
    Ok((ok, "stabilizer index = |PSL2(Z/N)| for N = 2..5".into()))
}

/// Twists every point independently and counts, over the twists whose
/// domain keeps its type, how many extend the identity on the domain to
/// the last point. Runs a configuration with a special point and, for
/// `n ≤ 3`, one whose points are Hecke translates of each other.
pub fn back_and_forth_exhaustive(n: u64) -> Result<(usize, usize)> {
    let tau = sample_point(3, 40)?;
    let m = |a: u64, b: i64, d: u64| GroupElement::from_i64(a as i64, b, 0, d as i64);
    let mut configs = vec![vec![
        tau.clone(),
        HalfPlanePoint::exact(1, 0, -16)?,
        apply(&m(n, 1, 1)?, &tau),
    ]];
    if n <= 3 {
        configs.push(vec![
            tau.clone(),
            apply(&m(1, 0, n)?, &tau),
            apply(&m(1, 1, n)?, &tau),
        ]);
    }
    let (mut attempts, mut successes) = (0, 0);
    for points in configs {
        let (a, s) = sweep(n, &points)?;
        attempts += a;
        successes += s;
    }
    Ok((attempts, successes))
}

fn sweep(n: u64, points: &[HalfPlanePoint]) -> Result<(usize, usize)> {
    let mut source = FiniteLevelStructure::new(n)?;
    for p in points {
        source.add_standard_point(p)?;
    }
    let k = points.len() - 1;
    let domain: Vec<usize> = (0..k).collect();
    let partial: Vec<(usize, usize)> = domain.iter().map(|&i| (i, i)).collect();
    let wanted = finite_type(&source, &domain, n)?;
    let elements = group_elements(n, Flavor::Psl);
    let (mut attempts, mut successes) = (0, 0);
    for code in 0..elements.len().pow(points.len() as u32) {
        let sigmas: Vec<FiniteGroupElement> = (0..points.len())
            .map(|i| elements[code / elements.len().pow(i as u32) % elements.len()])
            .collect();
        let target = twist_each(&source, &sigmas)?;
        if finite_type(&target, &domain, n)? != wanted {
            continue;
        }
        attempts += 1;
        if extend_partial_iso(&source, &target, &partial, k)?.is_some() {
            successes += 1;
        }
    }
    Ok((attempts, successes))
}

fn twist_each(
    s: &FiniteLevelStructure,
    sigmas: &[FiniteGroupElement],
) -> Result<FiniteLevelStructure> {
    let mut out = FiniteLevelStructure::with_precision(s.level(), s.digits(), s.disc_bound())?;
    for (p, sigma) in s.points().iter().zip(sigmas) {
        out.add_point(p.tau(), p.label().act(sigma)?)?;
    }
    Ok(out)
}

fn back_and_forth(quick: bool) -> Result<(bool, String)> {
    let levels: &[u64] = if quick { &[2] } else { &[2, 3, 4] };
    let mut ok = true;
    let mut detail = String::new();
    for &n in levels {
        let (attempts, successes) = back_and_forth_exhaustive(n)?;
        ok &= attempts > 0 && attempts == successes;
        ok &= !satisfies_sf(&nonstandard_fiber_witness(n)?)?;
        detail += &format!("N={n}: {successes}/{attempts} extensions; ");
    }
    Ok((ok, detail + "witnesses fail SF"))
}

fn curve_round_trip(quick: bool) -> Result<(bool, String)> {
    let count = if quick { 20 } else { 100 };
    let mut ok = true;
    for k in 0..count as i64 {
        let j = BigRational::new(
            BigInt::from(k * k * 7919 - 500_000),
            BigInt::from(k % 13 + 1),
        );
        if j == BigRational::from_integer(0.into()) || j == BigRational::from_integer(1728.into()) {
            continue;
        }
        ok &= j_invariant(&curve_from_j(&j)?)? == j;
    }
    ok &= curve_from_j(&BigRational::zero()).is_err();
    ok &= curve_from_j(&BigRational::from_integer(1728.into())).is_err();
    Ok((ok, format!("{count} rationals; 0 and 1728 rejected")))
}

/// Runs every check in order.
pub fn run_suite(quick: bool) -> Vec<Check> {
    vec![
        run("coset combinatorics", || cosets(quick)),
        run("modular polynomials", || modular_polynomials(quick)),
        run("j-evaluation", || j_values(quick)),
        run("class polynomials", || class_polynomials(quick)),
        run("finite groups", || finite_groups(quick)),
        run("congruence-subgroup index", || congruence_index(quick)),
        run("back-and-forth", || back_and_forth(quick)),
        run("curve round trip", || curve_round_trip(quick)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for check in run_suite(true) {
            assert!(check.passed, "{check}");
        }
    }
}
