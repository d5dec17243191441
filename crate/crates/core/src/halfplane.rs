//! Points of the upper half-plane and the Möbius action of `G`.
//!
//! Imaginary-quadratic points are kept exactly as `τ = (−b + √D)/(2a)`, the
//! upper root of the primitive positive-definite form `a·z² + b·z + c`. All
//! other points are numeric: a dyadic pair `(re, im)` with a declared decimal
//! precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::{self, digits_to_bits, Ball};
use crate::error::{Error, Result};
use crate::gl2q::{multiply, GroupElement};

/// `τ = (−b + √D)/(2a)`, stored through its primitive form `(a, b, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticPoint {
    a: BigInt,
    b: BigInt,
    disc: BigInt,
}

impl QuadraticPoint {
    pub fn new(a: BigInt, b: BigInt, disc: BigInt) -> Result<Self> {
        if !disc.is_negative() {
            return Err(Error::InvalidDiscriminant(disc.to_string()));
        }
        if !a.is_positive() {
            return Err(Error::Domain(format!(
                "leading coefficient {a} must be positive"
            )));
        }
        let num = &b * &b - &disc;
        let four_a = &a * 4;
        if !num.is_multiple_of(&four_a) {
            return Err(Error::Domain(format!(
                "b^2 - D is not divisible by 4a for a={a}, b={b}, D={disc}"
            )));
        }
        let c = num / four_a;
        if !a.gcd(&b).gcd(&c).is_one() {
            return Err(Error::Domain(format!(
                "form ({a}, {b}, {c}) is not primitive"
            )));
        }
        Ok(QuadraticPoint { a, b, disc })
    }

    pub fn from_i64(a: i64, b: i64, disc: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), disc.into())
    }

    /// The upper root of `a·z² + b·z + c`, after clearing content and sign.
    pub fn from_form(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        let g = a.gcd(&b).gcd(&c);
        if g.is_zero() {
            return Err(Error::Domain("zero form".into()));
        }
        let (mut a, mut b, c) = (a / &g, b / &g, c / &g);
        let disc = &b * &b - (&a * &c) * 4;
        if a.is_negative() {
            a = -a;
            b = -b;
        }
        Self::new(a, b, disc)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> BigInt {
        (&self.b * &self.b - &self.disc) / (&self.a * 4)
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        let two_a = BigInt::from(2) * &self.a;
        let re = Ball::from_rational(&BigRational::new(-&self.b, two_a.clone()), prec);
        let root = Ball::from_int(&-&self.disc, prec)
            .sqrt_real()
            .expect("|D| > 0");
        &re + &root.div_int(&two_a).mul_i()
    }

    /// Γ-reduction of the form; returns `γ ∈ SL2(Z)` and the reduced point `γτ`.
    pub fn reduce(&self) -> (GroupElement, QuadraticPoint) {
        let (mut a, mut b, mut c) = (self.a.clone(), self.b.clone(), self.c());
        let mut gamma = GroupElement::identity();
        loop {
            // translate so that −a < b ≤ a; τ ↦ τ + k sends b to b − 2ak
            let two_a = &a * 2;
            let k = ceil_div(&(&b - &a), &two_a);
            if !k.is_zero() {
                let t = GroupElement::new(BigInt::one(), k.clone(), BigInt::zero(), BigInt::one())
                    .unwrap();
                gamma = multiply(&t, &gamma);
                b -= &two_a * &k;
                c = (&b * &b - &self.disc) / (&a * 4);
            }
            if a > c || (a == c && b.is_negative()) {
                gamma = multiply(&GroupElement::s(), &gamma);
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            break;
        }
        (
            gamma,
            QuadraticPoint {
                a,
                b,
                disc: self.disc.clone(),
            },
        )
    }

    pub fn is_reduced(&self) -> bool {
        let c = self.c();
        let babs = self.b.abs();
        babs <= self.a && self.a <= c && ((babs != self.a && self.a != c) || !self.b.is_negative())
    }
}

/// A dyadic point `(re, im)·2^-bits` with `im > 0`, carrying its decimal precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumericPoint {
    re: BigInt,
    im: BigInt,
    digits: u32,
}

impl NumericPoint {
    pub fn bits_for(digits: u32) -> u32 {
        digits_to_bits(digits) + 16
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::Domain("precision must be at least one digit".into()));
        }
        let bits = Self::bits_for(digits);
        let b = Ball::from_complex_rational(re, im, bits);
        Self::from_ball(&b, digits)
    }

    /// Rounds the midpoint of `b` to the point's precision.
    pub fn from_ball(b: &Ball, digits: u32) -> Result<Self> {
        let bits = Self::bits_for(digits);
        let r = b.with_prec(bits);
        if !r.raw_im().is_positive() {
            return Err(Error::Domain("imaginary part must be positive".into()));
        }
        Ok(NumericPoint {
            re: r.raw_re().clone(),
            im: r.raw_im().clone(),
            digits,
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        Self::bits_for(self.digits)
    }

    pub fn re(&self) -> BigRational {
        BigRational::new(self.re.clone(), BigInt::one() << self.bits() as usize)
    }

    pub fn im(&self) -> BigRational {
        BigRational::new(self.im.clone(), BigInt::one() << self.bits() as usize)
    }

    /// The point as an exact (radius 0) ball, rounded if `prec` is lower.
    pub fn to_ball(&self, prec: u32) -> Ball {
        Ball::from_raw(
            self.re.clone(),
            self.im.clone(),
            Default::default(),
            self.bits(),
        )
        .with_prec(prec)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HalfPlanePoint {
    Exact(QuadraticPoint),
    Numeric(NumericPoint),
}

impl HalfPlanePoint {
    /// `i`, the fixed point of `S`.
    pub fn i() -> Self {
        HalfPlanePoint::Exact(QuadraticPoint::from_i64(1, 0, -4).unwrap())
    }

    /// `(−1 + √−3)/2`, the order-3 elliptic point.
    pub fn rho() -> Self {
        HalfPlanePoint::Exact(QuadraticPoint::from_i64(1, 1, -3).unwrap())
    }

    pub fn exact(a: i64, b: i64, disc: i64) -> Result<Self> {
        Ok(HalfPlanePoint::Exact(QuadraticPoint::from_i64(a, b, disc)?))
    }

    pub fn numeric(re: &BigRational, im: &BigRational, digits: u32) -> Result<Self> {
        Ok(HalfPlanePoint::Numeric(NumericPoint::from_rationals(
            re, im, digits,
        )?))
    }

    /// Numeric point from decimal strings.
    pub fn parse_numeric(re: &str, im: &str, digits: u32) -> Result<Self> {
        let r =
            ball::parse_decimal(re).ok_or_else(|| Error::Parse(format!("bad decimal {re:?}")))?;
        let i =
            ball::parse_decimal(im).ok_or_else(|| Error::Parse(format!("bad decimal {im:?}")))?;
        Self::numeric(&r, &i, digits)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HalfPlanePoint::Exact(_))
    }

    pub fn discriminant(&self) -> Option<&BigInt> {
        match self {
            HalfPlanePoint::Exact(q) => Some(q.discriminant()),
            HalfPlanePoint::Numeric(_) => None,
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            HalfPlanePoint::Exact(q) => q.to_ball(prec),
            HalfPlanePoint::Numeric(n) => n.to_ball(prec),
        }
    }

    /// Approximate coordinates, for display and heuristics only.
    pub fn approx(&self) -> (f64, f64) {
        let b = self.to_ball(80);
        (b.re_f64(), b.im_f64())
    }
}

/// The Möbius action `τ ↦ (aτ + b)/(cτ + d)`.
pub fn apply(g: &GroupElement, tau: &HalfPlanePoint) -> HalfPlanePoint {
    match tau {
        HalfPlanePoint::Exact(q) => HalfPlanePoint::Exact(apply_exact(g, q)),
        HalfPlanePoint::Numeric(n) => {
            let prec = n.bits() + 32;
            let image =
                apply_ball(g, &n.to_ball(prec)).expect("cτ + d ≠ 0 in the upper half-plane");
            HalfPlanePoint::Numeric(
                NumericPoint::from_ball(&image, n.digits())
                    .expect("G preserves the upper half-plane"),
            )
        }
    }
}

fn apply_exact(g: &GroupElement, q: &QuadraticPoint) -> QuadraticPoint {
    // τ = g⁻¹τ' = (dτ' − b)/(−cτ' + a); substitute into the form of τ
    let (ga, gb, gc, gd) = (g.a(), g.b(), g.c(), g.d());
    let (a, b, c) = (q.a(), q.b(), &q.c());
    let two = BigInt::from(2);
    let na = a * gd * gd - b * gd * gc + c * gc * gc;
    let nb = -(&two * a * gd * gb) + b * (gd * ga + gb * gc) - &two * c * gc * ga;
    let nc = a * gb * gb - b * gb * ga + c * ga * ga;
    QuadraticPoint::from_form(na, nb, nc).expect("image of an imaginary-quadratic point")
}

/// `(aτ + b)/(cτ + d)` on a ball.
pub fn apply_ball(g: &GroupElement, tau: &Ball) -> Result<Ball> {
    let num = &tau.mul_int(g.a()) + &Ball::from_int(g.b(), tau.prec());
    let den = &tau.mul_int(g.c()) + &Ball::from_int(g.d(), tau.prec());
    num.div(&den)
}

/// The unique fixed point in the upper half-plane of an elliptic element.
pub fn fixed_point(g: &GroupElement) -> Result<Option<HalfPlanePoint>> {
    if g.is_identity() {
        return Err(Error::AmbiguousFixpoint);
    }
    if !is_special(g) {
        return Ok(None);
    }
    // c·τ² + (d − a)·τ − b = 0
    let q = QuadraticPoint::from_form(g.c().clone(), g.d() - g.a(), -g.b().clone())?;
    Ok(Some(HalfPlanePoint::Exact(q)))
}

/// Elliptic test `(a + d)² < 4·det`; false for the identity.
pub fn is_special(g: &GroupElement) -> bool {
    let tr = g.trace();
    &tr * &tr < g.level() * 4
}

/// Moves `τ` into the standard fundamental domain (`|Re| ≤ 1/2`, `|τ| ≥ 1`)
/// up to a relative slack of `2^-16` on `|τ|`; returns the `γ ∈ SL2(Z)` used
/// and `γτ` as a ball.
pub fn reduce_ball(tau: &Ball) -> Result<(GroupElement, Ball)> {
    let prec = tau.prec();
    let mut z = tau.clone();
    let mut gamma = GroupElement::identity();
    let one = BigInt::one() << prec as usize;
    for _ in 0..100_000 {
        let n = (z.raw_re() + (&one >> 1usize)).div_floor(&one);
        if !n.is_zero() {
            z = &z - &Ball::from_int(&n, prec);
            let t = GroupElement::new(BigInt::one(), -n, BigInt::zero(), BigInt::one()).unwrap();
            gamma = multiply(&t, &gamma);
        }
        // invert only when clearly inside the unit circle: on the boundary,
        // rounding would otherwise bounce between z and −1/z forever
        let m2 = z.raw_re() * z.raw_re() + z.raw_im() * z.raw_im();
        let unit = &one * &one;
        if m2 < &unit - (&unit >> 16usize) {
            z = (-&z).recip()?;
            gamma = multiply(&GroupElement::s(), &gamma);
        } else {
            return Ok((gamma.clone(), apply_ball(&gamma, tau)?));
        }
    }
    Err(Error::Domain(
        "fundamental-domain reduction did not terminate".into(),
    ))
}

fn ceil_div(x: &BigInt, d: &BigInt) -> BigInt {
    -((-x).div_floor(d))
}

// JSON forms: {"a":"1","b":"0","D":"-4"} and {"re":"0.5","im":"1.25","prec":30}.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntField {
    Str(String),
    Int(i64),
}

impl IntField {
    fn parse(&self) -> Result<BigInt> {
        match self {
            IntField::Int(n) => Ok((*n).into()),
            IntField::Str(s) => {
                let digits = s.strip_prefix('-').unwrap_or(s);
                if digits.is_empty()
                    || digits.len() > 10_000
                    || !digits.bytes().all(|b| b.is_ascii_digit())
                {
                    return Err(Error::Parse(format!("bad integer {s:?}")));
                }
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointJson {
    Exact {
        a: IntField,
        b: IntField,
        #[serde(rename = "D")]
        disc: IntField,
    },
    Numeric {
        re: String,
        im: String,
        prec: u32,
    },
}

impl Serialize for HalfPlanePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self {
            HalfPlanePoint::Exact(q) => PointJson::Exact {
                a: IntField::Str(q.a.to_string()),
                b: IntField::Str(q.b.to_string()),
                disc: IntField::Str(q.disc.to_string()),
            },
            HalfPlanePoint::Numeric(n) => {
                let (re, im) = n.to_ball(n.bits()).to_decimal(n.digits);
                PointJson::Numeric {
                    re,
                    im,
                    prec: n.digits,
                }
            }
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfPlanePoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = PointJson::deserialize(d)?;
        let point = match json {
            PointJson::Exact { a, b, disc } => (|| {
                Ok::<_, Error>(HalfPlanePoint::Exact(QuadraticPoint::new(
                    a.parse()?,
                    b.parse()?,
                    disc.parse()?,
                )?))
            })(),
            PointJson::Numeric { re, im, prec } => {
                if prec > 100_000 {
                    Err(Error::Domain(format!("precision {prec} too large")))
                } else {
                    HalfPlanePoint::parse_numeric(&re, &im, prec)
                }
            }
        };
        point.map_err(D::Error::custom)
    }
}

/// `(γ, γτ)` with `γ ∈ SL2(Z)` moving `τ` into the fundamental domain:
/// exactly for quadratic points, via [`reduce_ball`] for numeric ones.
pub fn reduce_point(tau: &HalfPlanePoint) -> Result<(GroupElement, HalfPlanePoint)> {
    match tau {
        HalfPlanePoint::Exact(q) => {
            let (g, r) = q.reduce();
            Ok((g, HalfPlanePoint::Exact(r)))
        }
        HalfPlanePoint::Numeric(n) => {
            let (g, _) = reduce_ball(&n.to_ball(n.bits() + 32))?;
            let image = apply(&g, tau);
            Ok((g, image))
        }
    }
}

/// Parses the JSON point form.
pub fn parse_point_json(text: &str) -> Result<HalfPlanePoint> {
    Ok(serde_json::from_str(text)?)
}

impl QuadraticPoint {
    /// Approximate `(Re, Im)`.
    pub fn approx(&self) -> (f64, f64) {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.disc.to_f64().unwrap_or(f64::NAN);
        (-b / (2.0 * a), (-d).sqrt() / (2.0 * a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::from_i64(a, b, c, d).unwrap()
    }

    #[test]
    fn apply_examples() {
        let i = HalfPlanePoint::i();
        assert_eq!(apply(&GroupElement::identity(), &i), i);
        // 1 + i: root of z² − 2z + 2
        assert_eq!(
            apply(&GroupElement::t(), &i),
            HalfPlanePoint::exact(1, -2, -4).unwrap()
        );
        // −1/(2i) = i/2: root of 4z² + 1
        let two_i = HalfPlanePoint::exact(1, 0, -16).unwrap();
        assert_eq!(
            apply(&GroupElement::s(), &two_i),
            HalfPlanePoint::exact(4, 0, -16).unwrap()
        );
    }

    #[test]
    fn numeric_apply_matches_exact() {
        let g = m(2, 1, 1, 1);
        let tau = HalfPlanePoint::exact(3, 1, -23).unwrap();
        let exact = apply(&g, &tau).to_ball(200);
        let numeric_tau =
            HalfPlanePoint::Numeric(NumericPoint::from_ball(&tau.to_ball(300), 50).unwrap());
        let numeric = apply(&g, &numeric_tau).to_ball(200);
        assert!((&exact - &numeric).mag_log2() < -150.0);
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(
            fixed_point(&GroupElement::s()).unwrap(),
            Some(HalfPlanePoint::i())
        );
        assert_eq!(fixed_point(&GroupElement::t()).unwrap(), None);
        assert_eq!(fixed_point(&m(2, 0, 0, 1)).unwrap(), None);
        assert!(matches!(
            fixed_point(&GroupElement::identity()),
            Err(Error::AmbiguousFixpoint)
        ));
    }

    #[test]
    fn special_examples() {
        assert!(is_special(&GroupElement::s()));
        assert!(!is_special(&GroupElement::identity()));
        assert!(!is_special(&GroupElement::t()));
        assert!(is_special(&m(1, -1, 1, 0)));
    }

    #[test]
    fn exact_point_validation() {
        assert!(QuadraticPoint::from_i64(1, 0, 4).is_err());
        assert!(QuadraticPoint::from_i64(1, 1, -4).is_err());
        assert!(QuadraticPoint::from_i64(2, 0, -16).is_err()); // (2,0,2) not primitive
        assert!(QuadraticPoint::from_i64(0, 1, -3).is_err());
    }

    #[test]
    fn form_reduction() {
        // (1 + √−3)/2 reduces to the standard ρ-form
        let p = QuadraticPoint::from_i64(1, -1, -3).unwrap();
        let (g, r) = p.reduce();
        assert_eq!(r, QuadraticPoint::from_i64(1, 1, -3).unwrap());
        assert_eq!(apply_exact(&g, &p), r);
        let far = apply_exact(
            &m(5, 3, 3, 2),
            &QuadraticPoint::from_i64(2, 1, -23).unwrap(),
        );
        let (g, r) = far.reduce();
        assert!(r.is_reduced());
        assert_eq!(apply_exact(&g, &far), r);
        assert!(g.level().is_one());
    }

    #[test]
    fn ball_reduction_lands_in_domain() {
        let tau = Ball::from_complex_rational(
            &BigRational::new(3.into(), 7.into()),
            &BigRational::new(1.into(), 1000.into()),
            200,
        );
        let (g, z) = reduce_ball(&tau).unwrap();
        assert!(g.level().is_one());
        assert!(z.re_f64().abs() <= 0.5 + 1e-12);
        assert!(z.re_f64().powi(2) + z.im_f64().powi(2) >= 1.0 - 1e-12);
        assert!(z.rad_log2() < -150.0);
    }

    #[test]
    fn json_forms() {
        let p = HalfPlanePoint::exact(2, 1, -23).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"a":"2","b":"1","D":"-23"}"#);
        assert_eq!(parse_point_json(&text).unwrap(), p);
        assert_eq!(
            parse_point_json(r#"{"a":1,"b":0,"D":-4}"#).unwrap(),
            HalfPlanePoint::i()
        );

        let n = parse_point_json(r#"{"re":"0.25","im":"1.5","prec":20}"#).unwrap();
        let text = serde_json::to_string(&n).unwrap();
        assert_eq!(
            text,
            r#"{"re":"0.25000000000000000000","im":"1.50000000000000000000","prec":20}"#
        );
        assert_eq!(parse_point_json(&text).unwrap(), n);
        assert!(parse_point_json(r#"{"re":"0","im":"-1","prec":20}"#).is_err());
        assert!(parse_point_json(r#"{"a":1,"b":0,"D":4}"#).is_err());
    }
}
