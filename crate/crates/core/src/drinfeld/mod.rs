//! Drinfeld modules phi: F_q[t] -> K{tau} of rank d, determined by phi_t with
//! tau^0-coefficient exactly t. Provides phi_Q composition and evaluation,
//! the closed form for leading coefficients, the integral normalization by
//! conjugation, and reduction at places of good reduction.

pub mod residue;
pub mod twisted;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::algebra::fq::FieldRef;
use crate::algebra::logq::LogUnits;
use crate::algebra::place::{log_abs, ord, support, Place};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;
use crate::error::{Error, Result};

pub use residue::{ResidueElem, ResidueField, ResidueFieldRef, ResidueModule};
pub use twisted::TwistedPoly;

/// Size guard for materializing gamma_Q and large compositions.
const GAMMA_DEGREE_GUARD: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrinfeldModule {
    field: FieldRef,
    phi_t: TwistedPoly,
    rank: usize,
    a_d: RatFunc,
    bad_places: BTreeSet<Place>,
    integral_normalized: bool,
}

impl DrinfeldModule {
    /// Build from phi_t; requires the tau^0-coefficient to be t and rank >= 1.
    pub fn new(phi_t: TwistedPoly) -> Result<DrinfeldModule> {
        let field = Arc::clone(phi_t.field());
        let d = match phi_t.deg_tau() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(Error::InvalidModule(
                    "rank must be at least 1 (phi_t = t*tau^0 is the trivial embedding)".into(),
                ))
            }
        };
        if phi_t.coeff(0) != RatFunc::t(&field) {
            return Err(Error::InvalidModule(
                "the tau^0 coefficient of phi_t must be t".into(),
            ));
        }
        let a_d = phi_t.coeff(d);
        // Bad places: a coefficient fails to be integral, or a_d is not a unit.
        let mut bad = BTreeSet::new();
        for (i, a) in phi_t.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for v in support(a)? {
                if v.is_infinite() {
                    continue;
                }
                let o = ord(a, &v)?;
                if o < 0 || (i == d && o != 0) {
                    bad.insert(v);
                }
            }
        }
        let integral_normalized = bad
            .iter()
            .all(|v| phi_t.coeffs().iter().all(|a| a.is_zero() || ord(a, v).unwrap() >= 0));
        Ok(DrinfeldModule {
            field,
            phi_t,
            rank: d,
            a_d,
            bad_places: bad,
            integral_normalized,
        })
    }

    /// Convenience constructor from the coefficients a_0..a_d of phi_t.
    pub fn from_coeffs(coeffs: Vec<RatFunc>) -> Result<DrinfeldModule> {
        let field = Arc::clone(
            coeffs
                .first()
                .ok_or_else(|| Error::InvalidModule("no coefficients".into()))?
                .field(),
        );
        DrinfeldModule::new(TwistedPoly::new(&field, coeffs))
    }

    /// The Carlitz module phi_t(x) = t x + x^q.
    pub fn carlitz(field: &FieldRef) -> DrinfeldModule {
        DrinfeldModule::new(TwistedPoly::new(
            field,
            vec![RatFunc::t(field), RatFunc::one(field)],
        ))
        .expect("carlitz module is valid")
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn phi_t(&self) -> &TwistedPoly {
        &self.phi_t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn leading_coeff(&self) -> &RatFunc {
        &self.a_d
    }

    /// Finite places where some coefficient is non-integral or a_d is not a
    /// unit. The place at infinity always has bad reduction and is not listed.
    pub fn bad_places(&self) -> &BTreeSet<Place> {
        &self.bad_places
    }

    pub fn is_integral_normalized(&self) -> bool {
        self.integral_normalized
    }

    /// phi_Q by Horner's scheme on the t-expansion of Q.
    pub fn phi_of(&self, q_poly: &Poly) -> TwistedPoly {
        if q_poly.is_zero() {
            return TwistedPoly::zero(&self.field);
        }
        let deg = q_poly.degree().unwrap();
        let mut acc = TwistedPoly::scalar(RatFunc::constant(q_poly.coeff(deg)));
        for i in (0..deg).rev() {
            acc = acc.mul(&self.phi_t);
            let c = q_poly.coeff(i);
            if !c.is_zero() {
                acc = acc.add(&TwistedPoly::scalar(RatFunc::constant(c)));
            }
        }
        acc
    }

    /// phi_Q(x) without materializing phi_Q: accumulates Q's coefficients
    /// against the phi_t-orbit of x.
    pub fn apply(&self, q_poly: &Poly, x: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(&self.field);
        let mut orbit = x.clone();
        for (i, qi) in q_poly.coeffs().iter().enumerate() {
            if i > 0 {
                orbit = self.phi_t.evaluate(&orbit);
            }
            if !qi.is_zero() {
                acc = acc.add(&orbit.mul_scalar(qi));
            }
        }
        acc
    }

    /// One phi_t step.
    pub fn step(&self, x: &RatFunc) -> RatFunc {
        self.phi_t.evaluate(x)
    }

    /// Exponent (q^(d deg Q) - 1)/(q^d - 1) of a_d in the leading coefficient
    /// of phi_Q.
    pub fn gamma_exponent(&self, deg_q: usize) -> BigUint {
        let qd = BigUint::from(self.q()).pow(self.rank as u32);
        let num = qd.pow(deg_q as u32) - BigUint::one();
        let den = qd - BigUint::one();
        debug_assert!(num.is_multiple_of(&den));
        num / den
    }

    /// Leading coefficient of phi_Q in closed form:
    /// c * a_d^((q^(d deg Q)-1)/(q^d-1)) for Q with leading coefficient c.
    pub fn gamma(&self, q_poly: &Poly) -> Result<RatFunc> {
        let deg = q_poly.degree().ok_or(Error::ZeroInput { op: "gamma" })?;
        let c = RatFunc::constant(q_poly.lead().unwrap().clone());
        if deg == 0 {
            return Ok(c);
        }
        let n = self.gamma_exponent(deg);
        if let Some(k) = self.a_d.as_constant() {
            // constants live in the cyclic group of order q-1
            let e = (&n % (self.q() - 1)).to_u64().unwrap();
            let e = if e == 0 && !n.is_multiple_of(&BigUint::from(self.q() - 1)) {
                unreachable!()
            } else if k.is_zero() {
                unreachable!("a_d is nonzero")
            } else {
                e
            };
            let val = if e == 0 { k.pow(self.q() - 1) } else { k.pow(e) };
            return Ok(c.mul(&RatFunc::constant(val)));
        }
        let size = self.a_d.size() as u64;
        let n64 = n.to_u64().filter(|n| n.saturating_mul(size) <= GAMMA_DEGREE_GUARD);
        match n64 {
            Some(e) => Ok(c.mul(&self.a_d.pow(e))),
            None => Err(Error::GuardExceeded {
                what: "gamma materialization degree",
                limit: GAMMA_DEGREE_GUARD,
            }),
        }
    }

    /// logq|gamma_Q|_v for monic-leading Q of the given degree, exact; avoids
    /// materializing the power of a_d.
    pub fn gamma_log_abs(&self, deg_q: usize, v: &Place) -> Result<LogUnits> {
        if deg_q == 0 {
            return Ok(LogUnits::zero());
        }
        let n = BigInt::from(self.gamma_exponent(deg_q));
        Ok(log_abs(&self.a_d, v)?.scale_big(&n))
    }

    /// True when every coefficient of phi_t is v-integral and a_d is a v-unit;
    /// the per-Q conditions follow because each coefficient of phi_Q is a
    /// polynomial in the a_i and gamma_Q is a constant times a power of a_d.
    pub fn good_reduction(&self, v: &Place) -> Result<bool> {
        if v.is_infinite() {
            return Err(Error::InfinitePlace);
        }
        Ok(!self.bad_places.contains(v))
    }

    /// Whether every coefficient of phi_t is v-integral (weaker than good
    /// reduction: a_d may be a non-unit).
    pub fn integral_coefficients_at(&self, v: &Place) -> bool {
        if v.is_infinite() {
            return false;
        }
        self.phi_t
            .coeffs()
            .iter()
            .all(|a| a.is_zero() || ord(a, v).unwrap() >= 0)
    }

    /// Reduce at a place of good reduction.
    pub fn reduce(&self, v: &Place) -> Result<ResidueModule> {
        if !self.good_reduction(v)? {
            return Err(Error::BadReduction {
                place: v.to_string(),
            });
        }
        let rf = ResidueField::new(v)?;
        let coeffs: Vec<ResidueElem> = self
            .phi_t
            .coeffs()
            .iter()
            .map(|a| rf.reduce(a))
            .collect::<Result<_>>()?;
        Ok(ResidueModule::new(rf, coeffs))
    }

    /// Conjugate by gamma = B^k (B the product of the offending primes) so
    /// every coefficient of psi_t becomes integral at every finite place.
    /// Returns the conjugated module and gamma; psi_Q = gamma^-1 phi_Q gamma,
    /// so coefficients transform as a_i -> a_i gamma^(q^i - 1).
    pub fn normalize_integral(&self) -> Result<(DrinfeldModule, RatFunc)> {
        // primes P at which some coefficient is non-integral
        let mut offenders: BTreeSet<Poly> = BTreeSet::new();
        for a in self.phi_t.coeffs() {
            if a.is_zero() {
                continue;
            }
            for (p, _) in crate::algebra::factor(a.den())?.factors {
                offenders.insert(p);
            }
        }
        if offenders.is_empty() {
            return Ok((self.clone(), RatFunc::one(&self.field)));
        }
        let mut b_poly = Poly::one(&self.field);
        for p in &offenders {
            b_poly = b_poly.mul(p);
        }
        // minimal k with ord_P(a_i) + (q^i - 1) k >= 0 for all offenders
        let q = self.q() as i128;
        let mut k: i128 = 0;
        for p in &offenders {
            let v = Place::finite_unchecked(p.clone());
            for (i, a) in self.phi_t.coeffs().iter().enumerate().skip(1) {
                if a.is_zero() {
                    continue;
                }
                let o = ord(a, &v)? as i128;
                if o < 0 {
                    let step = q.pow(i as u32) - 1;
                    let need = (-o + step - 1) / step;
                    k = k.max(need);
                }
            }
        }
        let gamma = RatFunc::from_poly(b_poly.pow(k as u64));
        let mut coeffs = Vec::with_capacity(self.rank + 1);
        for (i, a) in self.phi_t.coeffs().iter().enumerate() {
            if i == 0 {
                coeffs.push(a.clone());
                continue;
            }
            let e = (q.pow(i as u32) - 1) as u64;
            coeffs.push(a.mul(&gamma.pow(e)));
        }
        let psi = DrinfeldModule::new(TwistedPoly::new(&self.field, coeffs))?;
        Ok((psi, gamma))
    }
}
