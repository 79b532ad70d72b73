//! K = F_q(t) as canonical fractions: monic denominator, reduced, with every
//! operation re-canonicalizing eagerly so valuation queries always see a
//! reduced fraction.

use std::fmt;

use super::fq::{FieldRef, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::ZeroInput { op: "denominator" });
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc {
                den: Poly::one(num.field()),
                num,
            };
        }
        let g = num.gcd(&den);
        let mut num = num.divrem(&g).unwrap().0;
        let mut den = den.divrem(&g).unwrap().0;
        let (dm, lead) = den.monic();
        den = dm;
        num = num.mul_scalar(&lead.inv().unwrap());
        RatFunc { num, den }
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            den: Poly::one(p.field()),
            num: p,
        }
    }

    pub fn zero(field: &FieldRef) -> RatFunc {
        RatFunc::from_poly(Poly::zero(field))
    }

    pub fn one(field: &FieldRef) -> RatFunc {
        RatFunc::from_poly(Poly::one(field))
    }

    pub fn t(field: &FieldRef) -> RatFunc {
        RatFunc::from_poly(Poly::t(field))
    }

    pub fn constant(c: FqElem) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn field(&self) -> &FieldRef {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// Constant of F_q, if this value lies in the constant field.
    pub fn as_constant(&self) -> Option<FqElem> {
        if self.den.is_one() && self.num.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        RatFunc::reduced(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        let num = self
            .num
            .mul(&other.den)
            .sub(&other.num.mul(&self.den));
        RatFunc::reduced(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::reduced(self.num.mul(p), self.den.clone())
    }

    pub fn mul_scalar(&self, s: &FqElem) -> RatFunc {
        RatFunc {
            num: self.num.mul_scalar(s),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::ZeroInput { op: "inverse" });
        }
        Ok(RatFunc::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> RatFunc {
        let mut result = RatFunc::one(self.field());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// q^k-th power through the sparse Frobenius on both components.
    pub fn pow_q(&self, k: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow_q(k),
            den: self.den.pow_q(k),
        }
    }

    /// Total degree proxy used by iteration guards.
    pub fn size(&self) -> usize {
        self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn needs_parens(p: &Poly) -> bool {
            let s = p.to_string();
            s.contains('+') || s.contains('*')
        }
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if needs_parens(&self.num) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/")?;
        if needs_parens(&self.den) {
            write!(f, "({})", self.den)
        } else {
            write!(f, "{}", self.den)
        }
    }
}
