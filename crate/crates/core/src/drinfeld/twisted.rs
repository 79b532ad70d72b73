//! The twisted polynomial ring K{tau}: additive polynomials under
//! composition, with the commutation rule tau * a = a^q * tau. The
//! coefficient at tau^i multiplies x^(q^i) when the element acts on K.

use std::fmt;
use std::sync::Arc;

use super::super::algebra::fq::FieldRef;
use super::super::algebra::ratfunc::RatFunc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedPoly {
    field: FieldRef,
    /// coefficient i multiplies tau^i; highest index nonzero
    c: Vec<RatFunc>,
}

impl TwistedPoly {
    pub fn new(field: &FieldRef, mut coeffs: Vec<RatFunc>) -> TwistedPoly {
        while coeffs.last().map(|x| x.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        TwistedPoly {
            field: Arc::clone(field),
            c: coeffs,
        }
    }

    pub fn zero(field: &FieldRef) -> TwistedPoly {
        TwistedPoly::new(field, Vec::new())
    }

    pub fn one(field: &FieldRef) -> TwistedPoly {
        TwistedPoly::new(field, vec![RatFunc::one(field)])
    }

    /// The Frobenius tau itself.
    pub fn tau(field: &FieldRef) -> TwistedPoly {
        TwistedPoly::new(field, vec![RatFunc::zero(field), RatFunc::one(field)])
    }

    /// a * tau^0 for a scalar a in K.
    pub fn scalar(a: RatFunc) -> TwistedPoly {
        let field = Arc::clone(a.field());
        TwistedPoly::new(&field, vec![a])
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn deg_tau(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.c
            .get(i)
            .cloned()
            .unwrap_or_else(|| RatFunc::zero(&self.field))
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.c
    }

    pub fn lead(&self) -> Option<&RatFunc> {
        self.c.last()
    }

    pub fn add(&self, other: &TwistedPoly) -> TwistedPoly {
        let n = self.c.len().max(other.c.len());
        let out = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        TwistedPoly::new(&self.field, out)
    }

    pub fn sub(&self, other: &TwistedPoly) -> TwistedPoly {
        let n = self.c.len().max(other.c.len());
        let out = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        TwistedPoly::new(&self.field, out)
    }

    /// Composition product: (f * g)_k = sum_{i+j=k} f_i * (g_j)^(q^i).
    pub fn mul(&self, other: &TwistedPoly) -> TwistedPoly {
        if self.is_zero() || other.is_zero() {
            return TwistedPoly::zero(&self.field);
        }
        let mut out = vec![RatFunc::zero(&self.field); self.c.len() + other.c.len() - 1];
        for (i, fi) in self.c.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in other.c.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let term = fi.mul(&gj.pow_q(i as u32));
                out[i + j] = out[i + j].add(&term);
            }
        }
        TwistedPoly::new(&self.field, out)
    }

    /// Left multiplication by the scalar a (a * tau^0 * self).
    pub fn scale(&self, a: &RatFunc) -> TwistedPoly {
        TwistedPoly::new(&self.field, self.c.iter().map(|x| x.mul(a)).collect())
    }

    /// Evaluate as an additive map: sum f_i x^(q^i).
    pub fn evaluate(&self, x: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(&self.field);
        let mut xq = x.clone();
        for (i, fi) in self.c.iter().enumerate() {
            if i > 0 {
                xq = xq.pow_q(1);
            }
            if !fi.is_zero() {
                acc = acc.add(&fi.mul(&xq));
            }
        }
        acc
    }
}

impl fmt::Display for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*tau")?,
                _ => write!(f, "({c})*tau^{i}")?,
            }
        }
        Ok(())
    }
}
