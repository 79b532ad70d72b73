//! Exact base-q logarithmic units. Every |x|_v in the crate is stored as
//! logq|x|_v = -ord_v(x) * deg(v), an exact rational; the real-valued
//! logarithm of the underlying theory is this value times ln q.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LogUnits(BigRational);

impl LogUnits {
    pub fn zero() -> LogUnits {
        LogUnits(BigRational::zero())
    }

    pub fn from_int(n: i64) -> LogUnits {
        LogUnits(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> LogUnits {
        LogUnits(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> LogUnits {
        LogUnits(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> LogUnits {
        LogUnits(self.0.abs())
    }

    pub fn max(self, other: LogUnits) -> LogUnits {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }

    /// Multiply by an integer scale (e.g. a Mobius sign or a degree).
    pub fn scale(&self, k: i64) -> LogUnits {
        LogUnits(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    pub fn scale_big(&self, k: &BigInt) -> LogUnits {
        LogUnits(&self.0 * BigRational::from_integer(k.clone()))
    }

    /// Divide by q^k exactly.
    pub fn div_qpow(&self, q: u64, k: u32) -> LogUnits {
        let d = BigInt::from(BigUint::from(q).pow(k));
        LogUnits(&self.0 / BigRational::from_integer(d))
    }

    /// Divide by an arbitrary nonzero integer.
    pub fn div_int(&self, d: i64) -> LogUnits {
        LogUnits(&self.0 / BigRational::from_integer(BigInt::from(d)))
    }

    /// Numerator/denominator as strings (for reports).
    pub fn parts(&self) -> (String, String) {
        (self.0.numer().to_string(), self.0.denom().to_string())
    }
}

impl Add for LogUnits {
    type Output = LogUnits;
    fn add(self, rhs: LogUnits) -> LogUnits {
        LogUnits(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a LogUnits> for &LogUnits {
    type Output = LogUnits;
    fn add(self, rhs: &'a LogUnits) -> LogUnits {
        LogUnits(&self.0 + &rhs.0)
    }
}

impl AddAssign<&LogUnits> for LogUnits {
    fn add_assign(&mut self, rhs: &LogUnits) {
        self.0 += &rhs.0;
    }
}

impl Sub for LogUnits {
    type Output = LogUnits;
    fn sub(self, rhs: LogUnits) -> LogUnits {
        LogUnits(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a LogUnits> for &LogUnits {
    type Output = LogUnits;
    fn sub(self, rhs: &'a LogUnits) -> LogUnits {
        LogUnits(&self.0 - &rhs.0)
    }
}

impl Neg for LogUnits {
    type Output = LogUnits;
    fn neg(self) -> LogUnits {
        LogUnits(-self.0)
    }
}

impl Mul<i64> for &LogUnits {
    type Output = LogUnits;
    fn mul(self, rhs: i64) -> LogUnits {
        self.scale(rhs)
    }
}

impl Div<i64> for &LogUnits {
    type Output = LogUnits;
    fn div(self, rhs: i64) -> LogUnits {
        self.div_int(rhs)
    }
}

// Integers print bare, proper rationals as num/den.
impl fmt::Display for LogUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for LogUnits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic() {
        let a = LogUnits::from_ratio(1, 3);
        let b = LogUnits::from_ratio(2, 3);
        assert_eq!(a.clone() + b, LogUnits::from_int(1));
        assert_eq!(a.div_qpow(2, 3), LogUnits::from_ratio(1, 24));
        assert_eq!(LogUnits::from_int(-2).abs(), LogUnits::from_int(2));
    }

    #[test]
    fn display_forms() {
        assert_eq!(LogUnits::from_int(5).to_string(), "5");
        assert_eq!(LogUnits::from_ratio(-1, 4).to_string(), "-1/4");
    }
}
