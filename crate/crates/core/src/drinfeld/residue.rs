//! Residue fields F_{q^l} = F_q[t]/(P) at finite places of good reduction,
//! and the reduction of a Drinfeld module to them.

use std::fmt;
use std::sync::Arc;

use super::super::algebra::fq::{FieldRef, FqElem};
use super::super::algebra::place::{ord, Place};
use super::super::algebra::poly::Poly;
use super::super::algebra::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// The residue field at a finite place (P): classes of F_q[t] mod P.
#[derive(Debug)]
pub struct ResidueField {
    base: FieldRef,
    p_poly: Poly,
    l: usize,
}

pub type ResidueFieldRef = Arc<ResidueField>;

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        self.p_poly == other.p_poly
    }
}
impl Eq for ResidueField {}

impl ResidueField {
    pub fn new(place: &Place) -> Result<ResidueFieldRef> {
        let p_poly = place.prime().ok_or(Error::InfinitePlace)?.clone();
        let l = p_poly.degree().unwrap();
        Ok(Arc::new(ResidueField {
            base: Arc::clone(p_poly.field()),
            p_poly,
            l,
        }))
    }

    pub fn base(&self) -> &FieldRef {
        &self.base
    }

    pub fn modulus(&self) -> &Poly {
        &self.p_poly
    }

    /// Degree l of the residue field over F_q.
    pub fn ext_degree(&self) -> usize {
        self.l
    }

    /// Number of elements q^l (guarded by callers where it matters).
    pub fn size(&self) -> u128 {
        (self.base.q() as u128).pow(self.l as u32)
    }

    pub fn zero(self: &Arc<Self>) -> ResidueElem {
        ResidueElem {
            rf: Arc::clone(self),
            rep: Poly::zero(&self.base),
        }
    }

    pub fn one(self: &Arc<Self>) -> ResidueElem {
        ResidueElem {
            rf: Arc::clone(self),
            rep: Poly::one(&self.base),
        }
    }

    pub fn from_poly(self: &Arc<Self>, p: &Poly) -> ResidueElem {
        ResidueElem {
            rf: Arc::clone(self),
            rep: p.rem(&self.p_poly),
        }
    }

    /// Reduce a v-integral rational function.
    pub fn reduce(self: &Arc<Self>, x: &RatFunc) -> Result<ResidueElem> {
        if x.is_zero() {
            return Ok(self.zero());
        }
        let place = Place::finite_unchecked(self.p_poly.clone());
        if ord(x, &place)? < 0 {
            return Err(Error::NotIntegral {
                place: self.p_poly.to_string(),
            });
        }
        let num = x.num().rem(&self.p_poly);
        let den = x.den().rem(&self.p_poly);
        let (g, u, _) = den.ext_gcd(&self.p_poly);
        debug_assert!(g.is_one());
        Ok(self.from_poly(&num.mul(&u)))
    }

    /// Element with the given enumeration index in 0..q^l.
    pub fn from_index(self: &Arc<Self>, idx: u128) -> ResidueElem {
        let q = self.base.q() as u128;
        let mut coeffs = Vec::with_capacity(self.l);
        let mut v = idx;
        for _ in 0..self.l {
            coeffs.push(self.base.from_index((v % q) as u64));
            v /= q;
        }
        ResidueElem {
            rf: Arc::clone(self),
            rep: Poly::new(&self.base, coeffs),
        }
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = ResidueElem> + '_ {
        let rf = Arc::clone(self);
        (0..self.size()).map(move |i| rf.from_index(i))
    }
}

/// An element of F_{q^l}, represented by its canonical lift of degree < l.
#[derive(Clone, Debug)]
pub struct ResidueElem {
    rf: ResidueFieldRef,
    rep: Poly,
}

impl PartialEq for ResidueElem {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}
impl Eq for ResidueElem {}

impl ResidueElem {
    pub fn field(&self) -> &ResidueFieldRef {
        &self.rf
    }

    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn add(&self, other: &ResidueElem) -> ResidueElem {
        ResidueElem {
            rf: Arc::clone(&self.rf),
            rep: self.rep.add(&other.rep),
        }
    }

    pub fn mul(&self, other: &ResidueElem) -> ResidueElem {
        ResidueElem {
            rf: Arc::clone(&self.rf),
            rep: self.rep.mul(&other.rep).rem(&self.rf.p_poly),
        }
    }

    /// Scalar action of the constant field F_q.
    pub fn scale(&self, c: &FqElem) -> ResidueElem {
        ResidueElem {
            rf: Arc::clone(&self.rf),
            rep: self.rep.mul_scalar(c),
        }
    }

    /// x^(q^k) via sparse Frobenius plus reduction.
    pub fn pow_q(&self, k: u32) -> ResidueElem {
        let mut rep = self.rep.clone();
        for _ in 0..k {
            rep = rep.pow_q(1).rem(&self.rf.p_poly);
        }
        ResidueElem {
            rf: Arc::clone(&self.rf),
            rep,
        }
    }

    /// Coordinates in the F_q-basis 1, t, ..., t^(l-1).
    pub fn coords(&self) -> Vec<FqElem> {
        (0..self.rf.l).map(|i| self.rep.coeff(i)).collect()
    }
}

impl fmt::Display for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// The reduction phi-bar of a Drinfeld module at a good place: same rank,
/// coefficients in the residue field, nonzero leading coefficient.
#[derive(Clone, Debug)]
pub struct ResidueModule {
    rf: ResidueFieldRef,
    coeffs: Vec<ResidueElem>,
}

impl ResidueModule {
    pub(crate) fn new(rf: ResidueFieldRef, coeffs: Vec<ResidueElem>) -> ResidueModule {
        debug_assert!(!coeffs.last().unwrap().is_zero());
        ResidueModule { rf, coeffs }
    }

    pub fn residue_field(&self) -> &ResidueFieldRef {
        &self.rf
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ResidueElem] {
        &self.coeffs
    }

    /// phi-bar-t as an F_q-linear operator on the residue field.
    pub fn step(&self, x: &ResidueElem) -> ResidueElem {
        let mut acc = self.rf.zero();
        let mut xq = x.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xq = xq.pow_q(1);
            }
            if !c.is_zero() {
                acc = acc.add(&c.mul(&xq));
            }
        }
        acc
    }

    /// phi-bar_Q(x) for Q in F_q[t], via Q(phi_t) acting on the orbit.
    pub fn apply(&self, q_poly: &Poly, x: &ResidueElem) -> ResidueElem {
        let mut acc = self.rf.zero();
        let mut orbit = x.clone();
        for (i, qi) in q_poly.coeffs().iter().enumerate() {
            if i > 0 {
                orbit = self.step(&orbit);
            }
            if !qi.is_zero() {
                acc = acc.add(&orbit.scale(qi));
            }
        }
        acc
    }
}
