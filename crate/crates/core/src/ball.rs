//! Fixed-point complex ball arithmetic.
//!
//! A [`Ball`] is a disc in the complex plane: a midpoint `(re + i·im)·2^-prec`
//! with integer parts and a radius `rad·2^-prec`. Every operation returns a
//! ball guaranteed to contain the exact result of the operation applied to
//! any points of the input balls, so a computation that ends with a small
//! radius has certified absolute accuracy.
//!
//! Absolute (not relative) precision is the right model here: the values
//! that get rounded to integers (coefficients of modular and class
//! polynomials) need a bound on the absolute error whatever their size.
//! Magnitudes are unbounded; the integer midpoints simply grow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Bits needed to hold `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as u64 * 3322).div_ceil(1000) as u32
}

/// Decimal digits representable in `bits` bits (rounded down).
pub fn bits_to_digits(bits: u32) -> u32 {
    ((bits as u64 * 1000) / 3322) as u32
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    re: BigInt,
    im: BigInt,
    rad: BigUint,
    prec: u32,
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball {
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: BigUint::zero(),
            prec,
        }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Ball {
            re: n << prec as usize,
            im: BigInt::zero(),
            rad: BigUint::zero(),
            prec,
        }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// The exact rational `q`, rounded to the nearest ulp (radius 1 unless exact).
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let (re, exact) = round_rational(q, prec);
        Ball {
            re,
            im: BigInt::zero(),
            rad: if exact {
                BigUint::zero()
            } else {
                BigUint::one()
            },
            prec,
        }
    }

    pub fn from_complex_rational(re: &BigRational, im: &BigRational, prec: u32) -> Self {
        let (r, e1) = round_rational(re, prec);
        let (i, e2) = round_rational(im, prec);
        let rad = if e1 && e2 {
            BigUint::zero()
        } else {
            BigUint::one()
        };
        Ball {
            re: r,
            im: i,
            rad,
            prec,
        }
    }

    /// Builds a ball directly from scaled integer parts.
    pub fn from_raw(re: BigInt, im: BigInt, rad: BigUint, prec: u32) -> Self {
        Ball { re, im, rad, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn raw_re(&self) -> &BigInt {
        &self.re
    }

    pub fn raw_im(&self) -> &BigInt {
        &self.im
    }

    pub fn raw_rad(&self) -> &BigUint {
        &self.rad
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Midpoint real part as an exact rational.
    pub fn re_mid(&self) -> BigRational {
        BigRational::new(self.re.clone(), BigInt::one() << self.prec as usize)
    }

    pub fn im_mid(&self) -> BigRational {
        BigRational::new(self.im.clone(), BigInt::one() << self.prec as usize)
    }

    pub fn re_part(&self) -> Ball {
        Ball {
            re: self.re.clone(),
            im: BigInt::zero(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn im_part(&self) -> Ball {
        Ball {
            re: self.im.clone(),
            im: BigInt::zero(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn conj(&self) -> Ball {
        Ball {
            re: self.re.clone(),
            im: -&self.im,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    /// Adds `extra` ulps to the radius.
    pub fn inflate(mut self, extra: &BigUint) -> Ball {
        self.rad += extra;
        self
    }

    /// Re-expresses the ball at another precision, rounding the midpoint.
    pub fn with_prec(&self, prec: u32) -> Ball {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                Ball {
                    re: &self.re << s,
                    im: &self.im << s,
                    rad: &self.rad << s,
                    prec,
                }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let (re, e1) = shift_round(&self.re, s);
                let (im, e2) = shift_round(&self.im, s);
                let mut rad = ceil_shift(&self.rad, s);
                if !(e1 && e2) {
                    rad += 1u32;
                }
                Ball { re, im, rad, prec }
            }
        }
    }

    fn align(&self, other: &Ball) -> (Ball, Ball) {
        let p = self.prec.min(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    /// Upper bound on the modulus in ulps, midpoint only.
    fn mid_abs_ulps(&self) -> BigUint {
        self.re.magnitude() + self.im.magnitude()
    }

    /// Upper bound on `|z|` for every `z` in the ball, in ulps.
    fn abs_upper_ulps(&self) -> BigUint {
        self.mid_abs_ulps() + &self.rad
    }

    pub fn contains_zero(&self) -> bool {
        let m2 = self.re.magnitude().pow(2) + self.im.magnitude().pow(2);
        m2 <= self.rad.pow(2)
    }

    /// True when the two balls intersect.
    pub fn overlaps(&self, other: &Ball) -> bool {
        (self - other).contains_zero()
    }

    /// log2 of an upper bound on `|z|` over the ball (−inf for the zero ball).
    pub fn mag_log2(&self) -> f64 {
        log2_scaled(&self.abs_upper_ulps(), self.prec)
    }

    /// log2 of the absolute radius.
    pub fn rad_log2(&self) -> f64 {
        log2_scaled(&self.rad, self.prec)
    }

    /// The absolute radius as a float (0 for exact balls).
    pub fn rad_f64(&self) -> f64 {
        self.rad_log2().exp2()
    }

    /// log10 of the absolute radius.
    pub fn rad_log10(&self) -> f64 {
        self.rad_log2() * std::f64::consts::LOG10_2
    }

    /// The radius as an exact rational upper bound.
    pub fn rad_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.rad.clone()),
            BigInt::one() << self.prec as usize,
        )
    }

    /// An upper bound on `|z|` as an exact rational.
    pub fn abs_upper(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.abs_upper_ulps()),
            BigInt::one() << self.prec as usize,
        )
    }

    /// Radius is at most `2^-bits`.
    pub fn rad_at_most_pow2(&self, bits: i64) -> bool {
        if self.rad.is_zero() {
            return true;
        }
        // rad·2^-prec ≤ 2^-bits  ⇔  rad ≤ 2^(prec−bits)
        let e = self.prec as i64 - bits;
        if e < 0 {
            return false;
        }
        self.rad <= (BigUint::one() << e as usize)
    }

    pub fn mul_int(&self, n: &BigInt) -> Ball {
        Ball {
            re: &self.re * n,
            im: &self.im * n,
            rad: &self.rad * n.magnitude(),
            prec: self.prec,
        }
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Ball {
        assert!(!n.is_zero(), "division by zero");
        let mag = n.magnitude();
        let (re, e1) = div_round(&self.re, n);
        let (im, e2) = div_round(&self.im, n);
        let mut rad = ceil_div(&self.rad, mag);
        if !(e1 && e2) {
            rad += 1u32;
        }
        Ball {
            re,
            im,
            rad,
            prec: self.prec,
        }
    }

    pub fn mul_i(&self) -> Ball {
        Ball {
            re: -&self.im,
            im: self.re.clone(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn square(&self) -> Ball {
        self * self
    }

    pub fn pow(&self, e: u32) -> Ball {
        let mut acc = Ball::from_i64(1, self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// `1/z`; fails when the ball contains zero.
    pub fn recip(&self) -> Result<Ball> {
        let p = self.prec as usize;
        let m2 = self.re.magnitude().pow(2) + self.im.magnitude().pow(2);
        let m = m2.sqrt(); // floor(|mid|) in ulps
        if m <= self.rad {
            return Err(Error::DivisionByZero);
        }
        let lower = &m - &self.rad; // |z| ≥ lower for every z in the ball
        let num_scale = BigInt::one() << (2 * p);
        let m2i = BigInt::from(m2);
        let (re, e1) = div_round(&(&self.re * &num_scale), &m2i);
        let (im, e2) = div_round(&(-(&self.im) * &num_scale), &m2i);
        // |1/z − 1/w| = |z − w| / (|z||w|) ≤ rad / (lower·|mid|)
        let mut rad = ceil_div(&(&self.rad << (2 * p)), &(&lower * &m));
        if !(e1 && e2) {
            rad += 1u32;
        }
        Ok(Ball {
            re,
            im,
            rad,
            prec: self.prec,
        })
    }

    pub fn div(&self, other: &Ball) -> Result<Ball> {
        Ok(self * &other.recip()?)
    }

    /// Square root of a real ball whose midpoint is positive and whose
    /// radius is smaller than the midpoint.
    pub fn sqrt_real(&self) -> Result<Ball> {
        if !self.im.is_zero() || self.re.sign() != Sign::Plus {
            return Err(Error::Domain("sqrt of a non-positive ball".into()));
        }
        let p = self.prec as usize;
        let mid = self.re.magnitude();
        if mid <= &self.rad {
            return Err(Error::Domain("sqrt of a ball containing zero".into()));
        }
        let s = (mid << p).sqrt();
        // |√x − √y| ≤ |x − y| / (√x + √y) ≤ rad / √(mid − rad)
        let lower = ((mid - &self.rad) << p).sqrt();
        let mut rad = if self.rad.is_zero() {
            BigUint::zero()
        } else {
            ceil_div(&(&self.rad << p), &lower.max(BigUint::one()))
        };
        rad += 1u32;
        Ok(Ball {
            re: BigInt::from(s),
            im: BigInt::zero(),
            rad,
            prec: self.prec,
        })
    }

    /// `exp(x)` for a real ball.
    pub fn exp_real(&self) -> Ball {
        assert!(self.im.is_zero(), "exp_real on a non-real ball");
        let p = self.prec;
        let e = exp_fixed(&self.re, p);
        let mut rad = BigUint::from(2u32);
        if !self.rad.is_zero() {
            // |exp(x+δ) − exp(x)| ≤ exp(x)·(e^|δ| − 1) ≤ 2·exp(x)·|δ| for |δ| ≤ 1
            let r = self.rad.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(p as i32);
            if r > 1.0 {
                let up = exp_fixed(&(&self.re + BigInt::from(self.rad.clone())), p);
                rad += up.magnitude();
            } else {
                let e_up = e.magnitude() + 2u32;
                rad += ceil_shift(&(e_up * &self.rad * 2u32), p);
            }
        }
        Ball {
            re: e,
            im: BigInt::zero(),
            rad,
            prec: p,
        }
    }

    /// `(cos x, sin x)` for a real ball.
    pub fn cos_sin_real(&self) -> (Ball, Ball) {
        assert!(self.im.is_zero(), "cos_sin_real on a non-real ball");
        let p = self.prec;
        let (c, s) = cos_sin_fixed(&self.re, p);
        let rad = &self.rad + 2u32;
        (
            Ball {
                re: c,
                im: BigInt::zero(),
                rad: rad.clone(),
                prec: p,
            },
            Ball {
                re: s,
                im: BigInt::zero(),
                rad,
                prec: p,
            },
        )
    }

    /// The nearest integer to the real part, provided the whole ball lies
    /// within `tol` of it and the imaginary part lies within `tol` of zero.
    pub fn certified_integer(&self, tol: &BigRational) -> Option<BigInt> {
        let one = BigInt::one() << self.prec as usize;
        let (n, _) = div_round(&self.re, &one);
        let dist_re = BigRational::new((&self.re - (&n << self.prec as usize)).abs(), one.clone());
        let dist_im = BigRational::new(self.im.abs(), one);
        let rad = self.rad_rational();
        if &dist_re + &rad <= *tol && &dist_im + &rad <= *tol {
            Some(n)
        } else {
            None
        }
    }

    /// Distance from the real part's midpoint to the nearest integer plus the
    /// radius, as a float (diagnostics only).
    pub fn integer_defect(&self) -> f64 {
        let one = BigInt::one() << self.prec as usize;
        let (n, _) = div_round(&self.re, &one);
        let d = (&self.re - (&n << self.prec as usize)).abs()
            + BigInt::from(self.rad.clone())
            + self.im.abs();
        ratio_f64(&d, &one)
    }

    /// Midpoint parts as decimal strings with `digits` digits after the point.
    pub fn to_decimal(&self, digits: u32) -> (String, String) {
        (
            fixed_to_decimal(&self.re, self.prec, digits),
            fixed_to_decimal(&self.im, self.prec, digits),
        )
    }

    pub fn re_f64(&self) -> f64 {
        fixed_to_f64(&self.re, self.prec)
    }

    pub fn im_f64(&self) -> f64 {
        fixed_to_f64(&self.im, self.prec)
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = bits_to_digits(self.prec).min(30);
        let (re, im) = self.to_decimal(d);
        write!(f, "Ball({re} + {im}i ± 2^{:.1})", self.rad_log2())
    }
}

impl<'a> Add<&'a Ball> for &'a Ball {
    type Output = Ball;
    fn add(self, rhs: &'a Ball) -> Ball {
        if self.prec != rhs.prec {
            let (a, b) = self.align(rhs);
            return &a + &b;
        }
        Ball {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
            rad: &self.rad + &rhs.rad,
            prec: self.prec,
        }
    }
}

impl<'a> Sub<&'a Ball> for &'a Ball {
    type Output = Ball;
    fn sub(self, rhs: &'a Ball) -> Ball {
        if self.prec != rhs.prec {
            let (a, b) = self.align(rhs);
            return &a - &b;
        }
        Ball {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
            rad: &self.rad + &rhs.rad,
            prec: self.prec,
        }
    }
}

impl<'a> Mul<&'a Ball> for &'a Ball {
    type Output = Ball;
    fn mul(self, rhs: &'a Ball) -> Ball {
        if self.prec != rhs.prec {
            let (a, b) = self.align(rhs);
            return &a * &b;
        }
        let p = self.prec;
        let re_full = &self.re * &rhs.re - &self.im * &rhs.im;
        let im_full = &self.re * &rhs.im + &self.im * &rhs.re;
        let (re, e1) = shift_round(&re_full, p);
        let (im, e2) = shift_round(&im_full, p);
        let mut rad = BigUint::zero();
        if !self.rad.is_zero() || !rhs.rad.is_zero() {
            let prop = self.mid_abs_ulps() * &rhs.rad
                + rhs.mid_abs_ulps() * &self.rad
                + &self.rad * &rhs.rad;
            rad = ceil_shift(&prop, p);
        }
        if !(e1 && e2) {
            rad += 1u32;
        }
        Ball {
            re,
            im,
            rad,
            prec: p,
        }
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            re: -&self.re,
            im: -&self.im,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, rhs: Ball) -> Ball {
        &self + &rhs
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, rhs: Ball) -> Ball {
        &self - &rhs
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, rhs: Ball) -> Ball {
        &self * &rhs
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

/// `round(x / 2^s)`; flag is true when exact.
fn shift_round(x: &BigInt, s: u32) -> (BigInt, bool) {
    if s == 0 {
        return (x.clone(), true);
    }
    let d = BigInt::one() << s as usize;
    div_round(x, &d)
}

/// `round(x / d)`, `d ≠ 0`, ties upward; flag is true when exact.
fn div_round(x: &BigInt, d: &BigInt) -> (BigInt, bool) {
    let (q, r) = x.div_mod_floor(d);
    if r.is_zero() {
        return (q, true);
    }
    // floor division leaves r/d in [0, 1)
    if (&r * BigInt::from(2)).abs() >= d.abs() {
        (q + 1, false)
    } else {
        (q, false)
    }
}

fn ceil_shift(x: &BigUint, s: u32) -> BigUint {
    if s == 0 {
        return x.clone();
    }
    let q = x >> s as usize;
    if (&q << s as usize) == *x {
        q
    } else {
        q + 1u32
    }
}

fn ceil_div(x: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = x.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

fn round_rational(q: &BigRational, prec: u32) -> (BigInt, bool) {
    let num = q.numer() << prec as usize;
    div_round(&num, q.denom())
}

/// `log2 |x|`, −inf for zero.
pub fn log2_abs(x: &BigInt) -> f64 {
    log2_scaled(x.magnitude(), 0)
}

fn log2_scaled(x: &BigUint, prec: u32) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let top = if bits > 60 {
        x >> (bits - 60) as usize
    } else {
        x.clone()
    };
    let shift = bits.saturating_sub(60) as f64;
    top.to_f64().unwrap().log2() + shift - prec as f64
}

fn ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let s = (nb.max(db) - 60).max(0) as usize;
    let nn = (n >> s).to_f64().unwrap_or(0.0);
    let dd = (d >> s).to_f64().unwrap_or(1.0);
    if dd == 0.0 {
        return f64::INFINITY;
    }
    nn / dd
}

fn fixed_to_f64(x: &BigInt, prec: u32) -> f64 {
    ratio_f64(x, &(BigInt::one() << prec as usize))
}

/// Decimal rendering of `x·2^-prec`, rounded to `digits` places.
pub fn fixed_to_decimal(x: &BigInt, prec: u32, digits: u32) -> String {
    let scaled = x * num_traits::pow(BigInt::from(10), digits as usize);
    let (n, _) = shift_round(&scaled, prec);
    format_scaled_decimal(&n, digits)
}

/// Renders the integer `n` as `n / 10^digits`.
pub fn format_scaled_decimal(n: &BigInt, digits: u32) -> String {
    let neg = n.is_negative();
    let s = n.magnitude().to_string();
    let d = digits as usize;
    let body = if d == 0 {
        s
    } else if s.len() > d {
        format!("{}.{}", &s[..s.len() - d], &s[s.len() - d..])
    } else {
        format!("0.{}{}", "0".repeat(d - s.len()), s)
    };
    if neg && n.magnitude() != &BigUint::zero() {
        format!("-{body}")
    } else {
        body
    }
}

/// Parses a plain decimal literal (`-12.5`, `3`, `1.25e-3`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() || s.len() > 100_000 {
        return None;
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    if exp.unsigned_abs() > 100_000 {
        return None;
    }
    let (neg, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(k) => (&body[..k], &body[k + 1..]),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if neg {
        n = -n;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Formats an exact rational as a decimal literal when it has a finite
/// decimal expansion, otherwise as `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let mut d = q.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d.is_even() {
        d >>= 1;
        twos += 1;
    }
    while (&d % 5u32).is_zero() {
        d /= 5u32;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let k = twos.max(fives);
    let scaled = q * BigRational::from_integer(num_traits::pow(BigInt::from(10), k as usize));
    format_scaled_decimal(&scaled.to_integer(), k)
}

// ---------------------------------------------------------------------------
// Fixed-point elementary functions. Inputs and outputs are integers scaled by
// 2^bits; each routine runs with generous guard bits and returns a result
// within 2 ulps of the true value.

const GUARD: u32 = 64;

static PI_CACHE: Mutex<Option<(u32, BigInt)>> = Mutex::new(None);

/// `atan(1/n)·2^bits`, error at most a few ulps.
fn atan_inv(n: u32, bits: u32) -> BigInt {
    let one = BigInt::one() << bits as usize;
    let n2 = BigInt::from(n) * BigInt::from(n);
    let mut power = one / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

/// `π·2^bits` rounded, error at most 1 ulp.
pub fn pi_fixed(bits: u32) -> BigInt {
    let mut cache = PI_CACHE.lock().expect("pi cache poisoned");
    if let Some((b, v)) = cache.as_ref() {
        if *b >= bits {
            return shift_round(v, b - bits).0;
        }
    }
    let w = bits + GUARD;
    let v: BigInt = atan_inv(5, w) * BigInt::from(16) - atan_inv(239, w) * BigInt::from(4);
    *cache = Some((w, v.clone()));
    shift_round(&v, w - bits).0
}

/// `exp(x·2^-bits)·2^bits`, error at most 2 ulps.
pub fn exp_fixed(x: &BigInt, bits: u32) -> BigInt {
    if x.is_zero() {
        return BigInt::one() << bits as usize;
    }
    let xbits = x.bits() as i64;
    // halvings needed so |r| ≤ 1/2
    let s = (xbits - bits as i64 + 1).max(0) as u32;
    let magnitude = if x.is_positive() {
        let approx = fixed_to_f64(x, bits) * std::f64::consts::LOG2_E;
        approx.ceil().max(0.0) as u32 + 2
    } else {
        0
    };
    let w = bits + GUARD + s + magnitude;
    let one = BigInt::one() << w as usize;
    // r = x / 2^s at scale 2^w
    let r = shift_round(&(x << (w - bits) as usize), s).0;
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1u32;
    loop {
        term = shift_round(&(&term * &r), w).0 / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..s {
        sum = shift_round(&(&sum * &sum), w).0;
    }
    shift_round(&sum, w - bits).0
}

/// `(cos, sin)` of `x·2^-bits`, each scaled by `2^bits`, error at most 2 ulps.
pub fn cos_sin_fixed(x: &BigInt, bits: u32) -> (BigInt, BigInt) {
    let xbits = x.bits() as u32;
    let w = bits + GUARD + xbits.saturating_sub(bits);
    let xw = x << (w - bits) as usize;
    let two_pi = pi_fixed(w) * 2;
    // reduce into [−π, π]
    let k = div_round(&xw, &two_pi).0;
    let r = xw - &k * &two_pi;
    let one = BigInt::one() << w as usize;
    let r2 = shift_round(&(&r * &r), w).0;
    // cos: Σ (−1)^k r^(2k)/(2k)!, sin: Σ (−1)^k r^(2k+1)/(2k+1)!
    let mut cos = one.clone();
    let mut term = one;
    let mut k = 1u64;
    loop {
        term = -shift_round(&(&term * &r2), w).0 / BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        cos += &term;
        k += 1;
    }
    let mut sin = r.clone();
    let mut term = r;
    let mut k = 1u64;
    loop {
        term = -shift_round(&(&term * &r2), w).0 / BigInt::from((2 * k) * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        sin += &term;
        k += 1;
    }
    (shift_round(&cos, w - bits).0, shift_round(&sin, w - bits).0)
}

/// π as a real ball.
pub fn pi_ball(prec: u32) -> Ball {
    Ball {
        re: pi_fixed(prec),
        im: BigInt::zero(),
        rad: BigUint::one(),
        prec,
    }
}
