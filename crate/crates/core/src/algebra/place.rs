//! Places of F_q(t): the finite places, one per monic irreducible polynomial,
//! plus the place at infinity with ord_inf(f/g) = deg g - deg f. Together they
//! satisfy the product formula sum_v logq|x|_v = 0 for nonzero x.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use super::factor::factor;
use super::logq::LogUnits;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Infinity,
    Finite(Poly),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Place {
    kind: PlaceKind,
}

impl Place {
    pub fn infinity() -> Place {
        Place {
            kind: PlaceKind::Infinity,
        }
    }

    /// Finite place for a monic irreducible polynomial.
    pub fn finite(p: Poly) -> Result<Place> {
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        if !p.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        Ok(Place {
            kind: PlaceKind::Finite(p),
        })
    }

    /// Finite place from an already-validated irreducible (factor output).
    pub(crate) fn finite_unchecked(p: Poly) -> Place {
        debug_assert!(p.is_monic());
        Place {
            kind: PlaceKind::Finite(p),
        }
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, PlaceKind::Infinity)
    }

    pub fn prime(&self) -> Option<&Poly> {
        match &self.kind {
            PlaceKind::Infinity => None,
            PlaceKind::Finite(p) => Some(p),
        }
    }

    pub fn degree(&self) -> usize {
        match &self.kind {
            PlaceKind::Infinity => 1,
            PlaceKind::Finite(p) => p.degree().unwrap(),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deterministic scan order: infinity first, then finite places by degree
/// and lexicographic coefficients.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.kind, &other.kind) {
            (PlaceKind::Infinity, PlaceKind::Infinity) => Ordering::Equal,
            (PlaceKind::Infinity, _) => Ordering::Less,
            (_, PlaceKind::Infinity) => Ordering::Greater,
            (PlaceKind::Finite(a), PlaceKind::Finite(b)) => a.cmp_deglex(b),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlaceKind::Infinity => write!(f, "inf"),
            PlaceKind::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// ord_v(x) for nonzero x: at a finite place the multiplicity of P in the
/// numerator minus the denominator; at infinity deg den - deg num.
pub fn ord(x: &RatFunc, v: &Place) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroInput { op: "ord" });
    }
    match v.kind() {
        PlaceKind::Infinity => {
            Ok(x.den().degree().unwrap() as i64 - x.num().degree().unwrap() as i64)
        }
        PlaceKind::Finite(p) => {
            let up = x.num().multiplicity(p)? as i64;
            let down = x.den().multiplicity(p)? as i64;
            Ok(up - down)
        }
    }
}

/// logq|x|_v = -ord_v(x) * deg(v), exact.
pub fn log_abs(x: &RatFunc, v: &Place) -> Result<LogUnits> {
    Ok(LogUnits::from_int(-ord(x, v)? * v.degree() as i64))
}

/// The places where |x|_v != 1 (empty for nonzero constants).
pub fn support(x: &RatFunc) -> Result<BTreeSet<Place>> {
    if x.is_zero() {
        return Err(Error::ZeroInput { op: "support" });
    }
    let mut out = BTreeSet::new();
    for (p, _) in factor(x.num())?.factors {
        out.insert(Place::finite_unchecked(p));
    }
    for (p, _) in factor(x.den())?.factors {
        out.insert(Place::finite_unchecked(p));
    }
    if x.num().degree() != x.den().degree() {
        out.insert(Place::infinity());
    }
    Ok(out)
}

/// Weil height h(x) = sum_v max(logq|x|_v, 0); h(0) = 0. For a reduced
/// fraction f/g the sum collapses to max(deg f, deg g), which is what this
/// computes; `weil_height_via_support` evaluates the defining sum and the
/// two are pinned equal in tests.
pub fn weil_height(x: &RatFunc) -> LogUnits {
    if x.is_zero() {
        return LogUnits::zero();
    }
    let h = x
        .num()
        .degree()
        .unwrap()
        .max(x.den().degree().unwrap());
    LogUnits::from_int(h as i64)
}

/// The definition of the Weil height, place by place over the support.
pub fn weil_height_via_support(x: &RatFunc) -> LogUnits {
    if x.is_zero() {
        return LogUnits::zero();
    }
    let mut h = LogUnits::zero();
    for v in support(x).expect("nonzero") {
        let l = log_abs(x, &v).expect("nonzero");
        if l.is_positive() {
            h += &l;
        }
    }
    h
}
