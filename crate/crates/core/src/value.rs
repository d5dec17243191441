//! Field-side values: exact rationals or certified balls, and the
//! three-valued verdicts numeric comparisons produce.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::ball::{self, Ball};
use crate::error::{Error, Result};

/// Outcome of a certified comparison. `Indeterminate` means the error band
/// straddles the decision boundary; it is never coerced to `False`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Truth {
    False,
    True,
    Indeterminate,
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Truth::True
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Indeterminate => Truth::Indeterminate,
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Indeterminate,
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Truth) -> Truth {
        self.not().and(other.not()).not()
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Indeterminate => "indeterminate",
        })
    }
}

/// Decides whether a ball is zero: `False` when it excludes zero, `True` when
/// it contains zero and lies within `2^-(prec/2)` of it, else `Indeterminate`.
pub fn ball_is_zero(b: &Ball) -> Truth {
    if !b.contains_zero() {
        Truth::False
    } else if b.mag_log2() <= -(b.prec() as f64) / 2.0 {
        Truth::True
    } else {
        Truth::Indeterminate
    }
}

/// [`ball_is_zero`] for a value computed as a sum of terms whose absolute
/// values total about `2^scale_log2`: the admissible radius grows with that
/// scale, since a genuine zero carries a rounding error proportional to it.
pub fn ball_is_zero_scaled(b: &Ball, scale_log2: f64) -> Truth {
    if !b.contains_zero() {
        Truth::False
    } else if b.mag_log2() <= scale_log2.max(0.0) - (b.prec() as f64) / 2.0 {
        Truth::True
    } else {
        Truth::Indeterminate
    }
}

/// A j-value: exact rational or a certified numeric enclosure.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum JValue {
    Exact(BigRational),
    Approx(Ball),
}

impl JValue {
    pub fn int(n: i64) -> Self {
        JValue::Exact(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        JValue::Exact(BigRational::from_integer(n))
    }

    /// `"287496"`, `"-3375/2"`, `"1.5"` → exact.
    pub fn parse(s: &str) -> Result<Self> {
        crate::gl2q::parse_rational(s)
            .or_else(|| ball::parse_decimal(s))
            .map(JValue::Exact)
            .ok_or_else(|| Error::Parse(format!("bad j-value {s:?}")))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, JValue::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            JValue::Exact(q) => Some(q),
            JValue::Approx(_) => None,
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            JValue::Exact(q) => Ball::from_rational(q, prec),
            JValue::Approx(b) => b.with_prec(prec),
        }
    }

    /// Working precision of a numeric value; `None` for exact ones.
    pub fn prec(&self) -> Option<u32> {
        match self {
            JValue::Exact(_) => None,
            JValue::Approx(b) => Some(b.prec()),
        }
    }

    pub fn certified_equal(&self, other: &JValue) -> Truth {
        match (self, other) {
            (JValue::Exact(a), JValue::Exact(b)) => Truth::from_bool(a == b),
            _ => {
                let p = self
                    .prec()
                    .into_iter()
                    .chain(other.prec())
                    .min()
                    .unwrap_or(128);
                ball_is_zero(&(&self.to_ball(p) - &other.to_ball(p)))
            }
        }
    }

    pub fn is_zero(&self) -> Truth {
        match self {
            JValue::Exact(q) => Truth::from_bool(q.is_zero()),
            JValue::Approx(b) => ball_is_zero(b),
        }
    }
}

impl fmt::Display for JValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JValue::Exact(q) => f.write_str(&ball::format_rational(q)),
            JValue::Approx(b) => {
                let d = ball::bits_to_digits(b.prec()).saturating_sub(2).min(60);
                let (re, im) = b.to_decimal(d);
                write!(f, "{re} + {im}*I")
            }
        }
    }
}

impl fmt::Debug for JValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JValue::Exact(q) => write!(f, "Exact({})", ball::format_rational(q)),
            JValue::Approx(b) => write!(f, "{b:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kleene_logic() {
        use Truth::*;
        assert_eq!(True.and(Indeterminate), Indeterminate);
        assert_eq!(False.and(Indeterminate), False);
        assert_eq!(True.or(Indeterminate), True);
        assert_eq!(False.or(Indeterminate), Indeterminate);
        assert_eq!(Indeterminate.not(), Indeterminate);
    }

    #[test]
    fn zero_decisions() {
        assert_eq!(ball_is_zero(&Ball::zero(100)), Truth::True);
        assert_eq!(ball_is_zero(&Ball::from_i64(1, 100)), Truth::False);
        let fuzzy = Ball::zero(100).inflate(&(num_bigint::BigUint::from(1u32) << 90));
        assert_eq!(ball_is_zero(&fuzzy), Truth::Indeterminate);
    }

    #[test]
    fn parse_and_compare() {
        assert_eq!(JValue::parse("287496").unwrap(), JValue::int(287496));
        assert_eq!(
            JValue::parse("-1.5").unwrap(),
            JValue::parse("-3/2").unwrap()
        );
        assert!(JValue::parse("x").is_err());
        let approx = JValue::Approx(Ball::from_i64(1728, 200));
        assert_eq!(approx.certified_equal(&JValue::int(1728)), Truth::True);
        assert_eq!(approx.certified_equal(&JValue::int(1729)), Truth::False);
    }
}
