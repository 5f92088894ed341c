//! Exact time points.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// A rational number in lowest terms with a positive denominator.
///
/// All times in signals and schedules are `Rational`, so event ordering and
/// trajectory equality are exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics when `denominator` is zero.
    pub fn new(numerator: i64, denominator: i64) -> Self {
        Rational(Ratio::new(numerator, denominator))
    }

    pub const fn integer(value: i64) -> Self {
        Rational(Ratio::new_raw(value, 1))
    }

    pub fn numerator(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> i64 {
        Integer::div_floor(&self.numerator(), &self.denominator())
    }

    /// Least positive rational that is an integer multiple of both operands.
    ///
    /// For `a/b` and `c/d` in lowest terms this is `lcm(a, c) / gcd(b, d)`.
    /// Returns `None` unless both operands are positive.
    pub fn lcm(self, other: Rational) -> Option<Rational> {
        if !self.is_positive() || !other.is_positive() {
            return None;
        }
        let num = self.numerator().lcm(&other.numerator());
        let den = self.denominator().gcd(&other.denominator());
        Some(Rational::new(num, den))
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Multiplies by an integer.
    pub fn scale(self, k: i64) -> Rational {
        Rational(self.0 * Ratio::from_integer(k))
    }

    /// Divides by a rational, `None` when `other` is zero.
    pub fn checked_div(self, other: Rational) -> Option<Rational> {
        if other.0.is_zero() {
            None
        } else {
            Some(Rational(self.0 / other.0))
        }
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::integer(value)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts integers (`3`, `-2`), fractions (`3/4`) and finite decimals
/// (`1.25`), all converted exactly.
impl FromStr for Rational {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::BadNumber(text.into());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let digits = |s: &str| -> Result<i64, ParseError> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            s.parse::<i64>().map_err(|_| bad())
        };
        let value = if let Some((n, d)) = body.split_once('/') {
            let d = digits(d)?;
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(digits(n)?, d)
        } else if let Some((whole, frac)) = body.split_once('.') {
            let w = digits(whole)?;
            let f = digits(frac)?;
            let scale = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
            let num = w
                .checked_mul(scale)
                .and_then(|v| v.checked_add(f))
                .ok_or_else(bad)?;
            Ratio::new(num, scale)
        } else {
            Ratio::from_integer(digits(body)?)
        };
        Ok(Rational(if negative { -value } else { value }))
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == Ratio::from_integer(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&Ratio::from_integer(*other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::integer(3));
        assert_eq!("6/4".parse::<Rational>().unwrap(), Rational::new(3, 2));
        assert_eq!("1.25".parse::<Rational>().unwrap(), Rational::new(5, 4));
        assert_eq!("-1/2".parse::<Rational>().unwrap(), Rational::new(-1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("1.".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for r in [Rational::new(3, 2), Rational::integer(-4), Rational::new(-7, 3)] {
            let s = alloc::format!("{r}");
            assert_eq!(s.parse::<Rational>().unwrap(), r);
        }
    }

    #[test]
    fn lcm_of_periods() {
        assert_eq!(
            Rational::new(1, 2).lcm(Rational::new(1, 3)),
            Some(Rational::ONE)
        );
        assert_eq!(
            Rational::new(2, 3).lcm(Rational::new(3, 4)),
            Some(Rational::integer(6))
        );
        assert_eq!(Rational::ONE.lcm(Rational::ZERO), None);
    }

    #[test]
    fn floor_handles_negatives() {
        assert_eq!(Rational::new(-1, 2).floor(), -1);
        assert_eq!(Rational::new(7, 2).floor(), 3);
        assert_eq!(Rational::integer(2).floor(), 2);
    }
}
