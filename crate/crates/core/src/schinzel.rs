//! The primitive-place search: for which places v does the reduction of beta
//! have exact order Q under the reduced module? Exact residue orders come
//! from Krylov linear algebra over F_q; the dual valuation characterization
//! (|phi_Q(beta)|_v < 1 while |phi_P(beta)|_v >= 1 for every proper monic
//! divisor P) is computed independently and the two must agree on every
//! scanned pair. Includes the Mobius function on monic polynomials and the
//! inclusion-exclusion census over kernels.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::factor::factor;
use crate::algebra::fq::FqElem;
use crate::algebra::logq::LogUnits;
use crate::algebra::place::{log_abs, ord, Place};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;
use crate::drinfeld::{DrinfeldModule, ResidueElem, ResidueModule};
use crate::error::{Error, Result};
use crate::heights::{ensure_nontorsion, HeightOpts};
use crate::par::par_map;

/// Mobius function on monic polynomials: mu(1) = 1, (-1)^n on products of n
/// distinct irreducibles, 0 on non-squarefree inputs.
pub fn mobius(q_poly: &Poly) -> Result<i8> {
    if q_poly.is_zero() {
        return Err(Error::ZeroInput { op: "mobius" });
    }
    if !q_poly.is_monic() {
        return Err(Error::NotMonic);
    }
    if q_poly.is_one() {
        return Ok(1);
    }
    let fac = factor(q_poly)?;
    if fac.factors.iter().any(|(_, m)| *m > 1) {
        return Ok(0);
    }
    Ok(if fac.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// All monic divisors of Q, in deglex order.
pub fn monic_divisors(q_poly: &Poly) -> Result<Vec<Poly>> {
    let fac = factor(q_poly)?;
    let field = q_poly.field();
    let mut out = vec![Poly::one(field)];
    for (p, mult) in &fac.factors {
        let mut next = Vec::with_capacity(out.len() * (*mult as usize + 1));
        for d in &out {
            let mut power = Poly::one(field);
            for _ in 0..=*mult {
                next.push(d.mul(&power));
                power = power.mul(p);
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Exact torsion order of a residue element: the minimal monic Q with
/// phi-bar_Q(x) = 0, found as the first F_q-linear dependence in the Krylov
/// sequence x, Tx, T^2 x, ... for T = phi-bar_t. deg Q <= l always; the
/// zero element has order 1 by the unit-ideal convention.
pub fn residue_order(rm: &ResidueModule, x: &ResidueElem) -> Poly {
    let rf = rm.residue_field();
    let field = rf.base();
    let l = rf.ext_degree();
    let mut rows: Vec<(Vec<FqElem>, Vec<FqElem>)> = Vec::new();
    let mut cur = x.clone();
    for k in 0..=l {
        let mut vec = cur.coords();
        let mut combo = vec![field.zero(); k + 1];
        combo[k] = field.one();
        for (rvec, rcombo) in &rows {
            let pivot = rvec.iter().position(|c| !c.is_zero()).unwrap();
            if vec[pivot].is_zero() {
                continue;
            }
            let factor = vec[pivot].mul(&rvec[pivot].inv().unwrap());
            for i in 0..l {
                vec[i] = vec[i].sub(&factor.mul(&rvec[i]));
            }
            for (i, rc) in rcombo.iter().enumerate() {
                combo[i] = combo[i].sub(&factor.mul(rc));
            }
        }
        if vec.iter().all(|c| c.is_zero()) {
            // combo_k = 1 is untouched: the dependence is monic in t^k
            debug_assert!(combo[k].is_one());
            let q_poly = Poly::new(field, combo);
            debug_assert!(rm.apply(&q_poly, x).is_zero());
            return q_poly;
        }
        rows.push((vec, combo));
        cur = rm.step(&cur);
    }
    unreachable!("a dependence must appear by step l")
}

/// Residue-field guard for direct kernel enumeration.
const KERNEL_DEGREE_GUARD: usize = 12;

/// #{x in F_{q^l} : phi-bar_P(x) = 0} by direct enumeration.
pub fn kernel_size(rm: &ResidueModule, p_poly: &Poly) -> Result<u64> {
    let rf = rm.residue_field();
    if rf.ext_degree() > KERNEL_DEGREE_GUARD {
        return Err(Error::GuardExceeded {
            what: "kernel enumeration residue degree",
            limit: KERNEL_DEGREE_GUARD as u64,
        });
    }
    let mut count = 0u64;
    for x in rf.elements() {
        if rm.apply(p_poly, &x).is_zero() {
            count += 1;
        }
    }
    Ok(count)
}

/// Valuation evidence attached to a primitive hit.
#[derive(Clone, Debug, Serialize)]
pub struct ValuationEvidence {
    /// logq|phi_Q(beta)|_v
    pub q_log: LogUnits,
    /// logq|phi_P(beta)|_v over the proper monic divisors P | Q
    pub divisor_logs: Vec<(String, LogUnits)>,
}

/// Conditions of the primitive-place characterization at a finite place of
/// good reduction with v-integral beta: |phi_Q(beta)|_v < 1 and
/// |phi_P(beta)|_v >= 1 for every proper monic divisor P of Q (including 1).
pub fn valuation_conditions(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
    v: &Place,
) -> Result<(bool, ValuationEvidence)> {
    if !m.good_reduction(v)? {
        return Err(Error::BadReduction {
            place: v.to_string(),
        });
    }
    if beta.is_zero() || ord(beta, v)? < 0 {
        return Err(Error::NotIntegral {
            place: v.to_string(),
        });
    }
    let values = divisor_values(m, beta, q_poly)?;
    valuation_conditions_cached(&values, q_poly, v)
}

/// phi_P(beta) for every monic divisor P of Q, computed once per Q.
pub fn divisor_values(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
) -> Result<Vec<(Poly, RatFunc)>> {
    monic_divisors(q_poly)?
        .into_iter()
        .map(|p| {
            let val = m.apply(&p, beta);
            if val.is_zero() {
                return Err(Error::TorsionBeta);
            }
            Ok((p, val))
        })
        .collect()
}

fn valuation_conditions_cached(
    values: &[(Poly, RatFunc)],
    q_poly: &Poly,
    v: &Place,
) -> Result<(bool, ValuationEvidence)> {
    if v.is_infinite() {
        return Err(Error::InfinitePlace);
    }
    let mut q_log = LogUnits::zero();
    let mut divisor_logs = Vec::with_capacity(values.len() - 1);
    let mut ok = true;
    for (p, val) in values {
        let l = log_abs(val, v)?;
        if p == q_poly {
            if !(-l.clone()).is_positive() {
                ok = false; // need |phi_Q(beta)|_v < 1
            }
            q_log = l;
        } else {
            if (-l.clone()).is_positive() {
                ok = false; // need |phi_P(beta)|_v >= 1
            }
            divisor_logs.push((p.to_string(), l));
        }
    }
    Ok((ok, ValuationEvidence { q_log, divisor_logs }))
}

/// A place where the reduction of beta has exact order Q.
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveHit {
    #[serde(serialize_with = "ser_display")]
    pub q_poly: Poly,
    #[serde(serialize_with = "ser_display")]
    pub place: Place,
    #[serde(serialize_with = "ser_display")]
    pub residue_order: Poly,
    pub evidence: ValuationEvidence,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Admissibility of a place for the scan: finite, outside S, good reduction,
/// beta integral.
fn admissible(m: &DrinfeldModule, beta: &RatFunc, s: &BTreeSet<Place>, v: &Place) -> bool {
    !s.contains(v)
        && m.good_reduction(v).unwrap_or(false)
        && ord(beta, v).map(|o| o >= 0).unwrap_or(false)
}

/// Scan one place: Some(hit) if the residue order equals Q. The valuation
/// characterization is recomputed independently and any disagreement is an
/// implementation bug surfaced as a hard error.
fn probe_place(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
    values: &[(Poly, RatFunc)],
    v: &Place,
) -> Result<Option<PrimitiveHit>> {
    let rm = m.reduce(v)?;
    let beta_bar = rm.residue_field().reduce(beta)?;
    let order = residue_order(&rm, &beta_bar);
    let (cond, evidence) = valuation_conditions_cached(values, q_poly, v)?;
    if (order == *q_poly) != cond {
        return Err(Error::CharacterizationMismatch {
            place: v.to_string(),
            q_poly: q_poly.to_string(),
        });
    }
    if order == *q_poly {
        Ok(Some(PrimitiveHit {
            q_poly: q_poly.clone(),
            place: v.clone(),
            residue_order: order,
            evidence,
        }))
    } else {
        Ok(None)
    }
}

/// All monic irreducibles of degree 1..=deg_max as places, deglex order.
/// The irreducibility sieve is the dominant fixed cost of a scan, so it runs
/// through the parallel map.
pub fn places_up_to(m: &DrinfeldModule, deg_max: usize) -> Vec<Place> {
    let mut candidates = Vec::new();
    for deg in 1..=deg_max {
        candidates.extend(Poly::all_monic(m.field(), deg));
    }
    par_map(candidates, |p| {
        if p.is_irreducible() {
            Some(Place::finite_unchecked(p))
        } else {
            None
        }
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Every admissible place of degree <= place_deg_max where the reduction of
/// beta has exact order Q.
pub fn primitive_place_search(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
    s: &BTreeSet<Place>,
    place_deg_max: usize,
    opts: &HeightOpts,
) -> Result<Vec<PrimitiveHit>> {
    ensure_nontorsion(m, beta, opts)?;
    let values = Arc::new(divisor_values(m, beta, q_poly)?);
    let places: Vec<Place> = places_up_to(m, place_deg_max)
        .into_iter()
        .filter(|v| admissible(m, beta, s, v))
        .collect();
    let m = Arc::new(m.clone());
    let beta = Arc::new(beta.clone());
    let q_poly = Arc::new(q_poly.clone());
    let results: Vec<Result<Option<PrimitiveHit>>> = par_map(places, {
        let m = Arc::clone(&m);
        let beta = Arc::clone(&beta);
        let q_poly = Arc::clone(&q_poly);
        let values = Arc::clone(&values);
        move |v| probe_place(&m, &beta, &q_poly, &values, &v)
    });
    let mut hits = Vec::new();
    for r in results {
        if let Some(hit) = r? {
            hits.push(hit);
        }
    }
    Ok(hits)
}

/// One frontier row: the first (deglex-least) primitive place for Q, if any
/// exists within the scanned degree bound.
#[derive(Clone, Debug, Serialize)]
pub struct FrontierRow {
    #[serde(serialize_with = "ser_display")]
    pub q_poly: Poly,
    pub first_hit: Option<PrimitiveHit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Frontier {
    pub rows: Vec<FrontierRow>,
    /// max degree carrying a miss, plus one (1 when every degree hits)
    pub empirical_n: usize,
}

/// Batch wrapper over all monic Q with 1 <= deg Q <= qdeg_max.
pub fn schinzel_frontier(
    m: &DrinfeldModule,
    beta: &RatFunc,
    s: &BTreeSet<Place>,
    qdeg_max: usize,
    place_deg_max: usize,
    opts: &HeightOpts,
) -> Result<Frontier> {
    ensure_nontorsion(m, beta, opts)?;
    let places: Vec<Place> = places_up_to(m, place_deg_max)
        .into_iter()
        .filter(|v| admissible(m, beta, s, v))
        .collect();
    let mut qs = Vec::new();
    for deg in 1..=qdeg_max {
        qs.extend(Poly::all_monic(m.field(), deg));
    }
    let m = Arc::new(m.clone());
    let beta = Arc::new(beta.clone());
    let places = Arc::new(places);
    let rows: Vec<Result<FrontierRow>> = par_map(qs, {
        let m = Arc::clone(&m);
        let beta = Arc::clone(&beta);
        let places = Arc::clone(&places);
        move |q_poly| {
            let values = divisor_values(&m, &beta, &q_poly)?;
            let mut first_hit = None;
            for v in places.iter() {
                if let Some(hit) = probe_place(&m, &beta, &q_poly, &values, v)? {
                    first_hit = Some(hit);
                    break;
                }
            }
            Ok(FrontierRow { q_poly, first_hit })
        }
    });
    let rows: Vec<FrontierRow> = rows.into_iter().collect::<Result<_>>()?;
    let empirical_n = rows
        .iter()
        .filter(|r| r.first_hit.is_none())
        .map(|r| r.q_poly.degree().unwrap())
        .max()
        .map(|d| d + 1)
        .unwrap_or(1);
    Ok(Frontier { rows, empirical_n })
}

/// sum over y of exact order Q of logq|beta - y|_v, through the Mobius
/// expansion sum_{P|Q} mu(Q/P) logq|phi_P(beta)|_v (valid at places of good
/// reduction with unit leading coefficients).
pub fn order_q_log_sum(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
    v: &Place,
) -> Result<LogUnits> {
    let mut sum = LogUnits::zero();
    for p in monic_divisors(q_poly)? {
        let quotient = q_poly.divrem(&p).unwrap().0;
        let mu = mobius(&quotient)?;
        if mu == 0 {
            continue;
        }
        let val = m.apply(&p, beta);
        if val.is_zero() {
            return Err(Error::TorsionBeta);
        }
        sum += &log_abs(&val, v)?.scale(mu as i64);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::{FieldRef, FiniteField};
    use crate::algebra::parse::{parse_place, parse_poly, parse_ratfunc};

    fn f2() -> FieldRef {
        FiniteField::prime(2).unwrap()
    }

    #[test]
    fn mobius_examples() {
        let f = f2();
        assert_eq!(mobius(&parse_poly("t^2+t", &f).unwrap()).unwrap(), 1); // t(t+1)
        assert_eq!(mobius(&parse_poly("t^2", &f).unwrap()).unwrap(), 0);
        assert_eq!(mobius(&parse_poly("t^2+t+1", &f).unwrap()).unwrap(), -1);
        assert_eq!(mobius(&Poly::one(&f)).unwrap(), 1);
        // non-monic input is a domain error
        let f3 = FiniteField::prime(3).unwrap();
        assert!(mobius(&Poly::from_ints(&f3, &[0, 2])).is_err());
    }

    #[test]
    fn mobius_multiplicative_on_coprime() {
        let f = f2();
        let a = parse_poly("t", &f).unwrap();
        let b = parse_poly("t^2+t+1", &f).unwrap();
        assert_eq!(
            mobius(&a.mul(&b)).unwrap(),
            mobius(&a).unwrap() * mobius(&b).unwrap()
        );
    }

    #[test]
    fn residue_order_examples() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        // at (t+1): x = 1 has phi-bar_t(1) = 0, so order t
        let v = parse_place("t+1", &f).unwrap();
        let rm = m.reduce(&v).unwrap();
        let one = rm.residue_field().one();
        assert_eq!(residue_order(&rm, &one), Poly::t(&f));
        // zero element: order 1
        let zero = rm.residue_field().zero();
        assert_eq!(residue_order(&rm, &zero), Poly::one(&f));
        // at (t^2+t+1) over F_4: cross-check every element against brute force
        let v2 = parse_place("t^2+t+1", &f).unwrap();
        let rm2 = m.reduce(&v2).unwrap();
        for x in rm2.residue_field().elements() {
            let fast = residue_order(&rm2, &x);
            let brute = brute_force_order(&rm2, &x);
            assert_eq!(fast, brute, "order mismatch at x = {x}");
        }
    }

    /// Brute-force oracle: minimal monic P in deglex order with
    /// phi-bar_P(x) = 0.
    fn brute_force_order(rm: &ResidueModule, x: &ResidueElem) -> Poly {
        let field = rm.residue_field().base();
        for deg in 0..=rm.residue_field().ext_degree() {
            for p in Poly::all_monic(field, deg) {
                if rm.apply(&p, x).is_zero() {
                    return p;
                }
            }
        }
        unreachable!("residue elements are torsion")
    }

    #[test]
    fn krylov_matches_brute_force_many_places() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        for deg in 1..=3 {
            for p in Poly::monic_irreducibles(&f, deg) {
                let v = Place::finite_unchecked(p);
                let rm = m.reduce(&v).unwrap();
                for x in rm.residue_field().elements() {
                    assert_eq!(residue_order(&rm, &x), brute_force_order(&rm, &x));
                }
            }
        }
    }

    #[test]
    fn kernel_size_examples() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        let v = parse_place("t+1", &f).unwrap();
        let rm = m.reduce(&v).unwrap();
        // roots of x^2 + x over F_2: {0, 1}
        assert_eq!(kernel_size(&rm, &Poly::t(&f)).unwrap(), 2);
        assert_eq!(kernel_size(&rm, &Poly::one(&f)).unwrap(), 1);
    }

    #[test]
    fn mobius_census_matches_order_counts() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        for deg in 1..=3 {
            for p in Poly::monic_irreducibles(&f, deg) {
                let v = Place::finite_unchecked(p);
                let rm = m.reduce(&v).unwrap();
                let l = rm.residue_field().ext_degree();
                for qdeg in 0..=l {
                    for q_poly in Poly::all_monic(&f, qdeg) {
                        let census: i64 = monic_divisors(&q_poly)
                            .unwrap()
                            .iter()
                            .map(|pp| {
                                let mu =
                                    mobius(&q_poly.divrem(pp).unwrap().0).unwrap() as i64;
                                mu * kernel_size(&rm, pp).unwrap() as i64
                            })
                            .sum();
                        let direct = rm
                            .residue_field()
                            .elements()
                            .filter(|x| residue_order(&rm, x) == q_poly)
                            .count() as i64;
                        assert_eq!(census, direct, "census mismatch at Q={q_poly}, v={v}");
                        assert!(census >= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn valuation_conditions_examples() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        let beta = parse_ratfunc("1/t", &f).unwrap();
        // Q = t at (t+1): logq|phi_t(beta)| = -2 < 0 and |beta| = 1
        let (ok, ev) =
            valuation_conditions(&m, &beta, &Poly::t(&f), &parse_place("t+1", &f).unwrap())
                .unwrap();
        assert!(ok);
        assert_eq!(ev.q_log, LogUnits::from_int(-2));
        assert_eq!(ev.divisor_logs.len(), 1); // P = 1
        // beta not integral at (t): domain error
        assert!(
            valuation_conditions(&m, &beta, &Poly::t(&f), &parse_place("t", &f).unwrap())
                .is_err()
        );
        // Q = t^2 at (t+1): the divisor P = t already has |phi_t(beta)| < 1
        let (ok2, _) = valuation_conditions(
            &m,
            &beta,
            &parse_poly("t^2", &f).unwrap(),
            &parse_place("t+1", &f).unwrap(),
        )
        .unwrap();
        assert!(!ok2);
    }

    #[test]
    fn primitive_search_examples() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        let beta = parse_ratfunc("1/t", &f).unwrap();
        let opts = HeightOpts::default();
        let s = BTreeSet::new();
        // Q = t: hit at (t+1), where beta reduces to 1
        let hits = primitive_place_search(&m, &beta, &Poly::t(&f), &s, 2, &opts).unwrap();
        assert!(hits
            .iter()
            .any(|h| h.place == parse_place("t+1", &f).unwrap()));
        // Q = 1: only the reduction 0 has order 1; 1/t has no finite zeros
        let hits1 = primitive_place_search(&m, &beta, &Poly::one(&f), &s, 4, &opts).unwrap();
        assert!(hits1.is_empty());
        // torsion beta is a domain error
        assert!(matches!(
            primitive_place_search(&m, &RatFunc::t(&f), &Poly::t(&f), &s, 2, &opts),
            Err(Error::TorsionBeta)
        ));
    }

    #[test]
    fn frontier_carlitz_instance() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        let beta = parse_ratfunc("1/t", &f).unwrap();
        let opts = HeightOpts::default();
        let frontier =
            schinzel_frontier(&m, &beta, &BTreeSet::new(), 3, 8, &opts).unwrap();
        assert_eq!(frontier.rows.len(), 2 + 4 + 8);
        // degree-1 rows always hit on this instance
        for r in frontier.rows.iter().filter(|r| r.q_poly.degree() == Some(1)) {
            assert!(r.first_hit.is_some(), "no hit for {}", r.q_poly);
        }
        // Q = t(t+1) has no primitive place at all: the numerator of
        // phi_{t^2+t}(beta) is (t+1)^3 (t^2+t+1) and both primes already
        // divide a proper-divisor image (a Zsygmondy-type failure)
        let tsq_t = parse_poly("t^2+t", &f).unwrap();
        let row = frontier.rows.iter().find(|r| r.q_poly == tsq_t).unwrap();
        assert!(row.first_hit.is_none());
        // Q = t^3+t+1 is irreducible and its primitive prime
        // t^9+t^8+t^7+t^5+1 has degree 9, outside this scan
        let q9 = parse_poly("t^3+t+1", &f).unwrap();
        let row9 = frontier.rows.iter().find(|r| r.q_poly == q9).unwrap();
        assert!(row9.first_hit.is_none());
        let hits9 = primitive_place_search(&m, &beta, &q9, &BTreeSet::new(), 9, &opts).unwrap();
        assert_eq!(hits9.len(), 1);
        assert_eq!(
            hits9[0].place,
            parse_place("t^9+t^8+t^7+t^5+1", &f).unwrap()
        );
        assert_eq!(frontier.empirical_n, 4);
    }

    #[test]
    fn enlarging_s_can_only_raise_empirical_n() {
        let f = f2();
        let m = DrinfeldModule::carlitz(&f);
        let beta = parse_ratfunc("1/t", &f).unwrap();
        let opts = HeightOpts::default();
        let n0 = schinzel_frontier(&m, &beta, &BTreeSet::new(), 2, 5, &opts)
            .unwrap()
            .empirical_n;
        let mut s = BTreeSet::new();
        s.insert(parse_place("t+1", &f).unwrap());
        s.insert(parse_place("t^2+t+1", &f).unwrap());
        let n1 = schinzel_frontier(&m, &beta, &s, 2, 5, &opts).unwrap().empirical_n;
        assert!(n1 >= n0);
    }
}
