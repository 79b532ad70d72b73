//! The torsion-averaging identity: the average of logq|y - beta|_v over the
//! roots y of phi_Q (excluding y = beta when beta is torsion) is computed
//! purely from valuations of phi_Q(beta), gamma_Q and Q — no root-finding —
//! and converges per place to h-hat_v(beta) - logq|a_d|_v/(q^d - 1).

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::logq::LogUnits;
use crate::algebra::place::{log_abs, support, Place};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;
use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::heights::{annihilator_probe, local_height, HeightOpts};
use crate::par::par_map;

/// One row of the convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct AverageRow {
    #[serde(serialize_with = "ser_display")]
    pub q_poly: Poly,
    #[serde(serialize_with = "ser_display")]
    pub place: Place,
    pub average: LogUnits,
    pub target: LogUnits,
    pub target_certified: bool,
    pub gap: LogUnits,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// (1/q^(d deg Q)) sum_{phi_Q(y)=0} logq|y - beta|_v for nontorsion beta,
/// through the resultant identity
/// sum logq|y - beta|_v = logq|phi_Q(beta)|_v - logq|gamma_Q|_v.
pub fn torsion_average(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
    v: &Place,
) -> Result<LogUnits> {
    let deg = q_poly.degree().ok_or(Error::ZeroInput { op: "torsion_average" })?;
    let value = m.apply(q_poly, beta);
    if value.is_zero() {
        // beta is torsion with phi_Q(beta) = 0: callers must use
        // excluded_average
        return Err(Error::ZeroInput {
            op: "torsion_average (phi_Q(beta) = 0)",
        });
    }
    let num = log_abs(&value, v)? - m.gamma_log_abs(deg, v)?;
    Ok(num.div_qpow(m.q(), (m.rank() * deg) as u32))
}

/// The torsion-point variant: when phi_Q kills beta the inner product over
/// the remaining roots equals (phi_Q)'(beta)/gamma_Q = Q/gamma_Q; otherwise
/// phi_Q(beta) is a nonzero torsion value and the plain identity applies.
pub fn excluded_average(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
    v: &Place,
) -> Result<LogUnits> {
    let deg = q_poly.degree().ok_or(Error::ZeroInput { op: "excluded_average" })?;
    let value = m.apply(q_poly, beta);
    let lead = if value.is_zero() {
        log_abs(&RatFunc::from_poly(q_poly.clone()), v)?
    } else {
        log_abs(&value, v)?
    };
    let num = lead - m.gamma_log_abs(deg, v)?;
    Ok(num.div_qpow(m.q(), (m.rank() * deg) as u32))
}

/// Per-place limit of the averages: h-hat_v(beta) - logq|a_d|_v/(q^d - 1)
/// for nontorsion beta, and -logq|a_d|_v/(q^d - 1) for torsion beta.
pub fn per_place_target(
    m: &DrinfeldModule,
    beta: &RatFunc,
    v: &Place,
    beta_torsion: bool,
    opts: &HeightOpts,
) -> Result<(LogUnits, bool)> {
    let d = m.rank();
    let qd_minus_1 = (m.q() as i64).pow(d as u32) - 1;
    let gamma_limit = log_abs(m.leading_coeff(), v)?.div_int(qd_minus_1);
    if beta_torsion {
        return Ok((-gamma_limit, true));
    }
    let h = local_height(m, beta, v, opts);
    Ok((h.value - gamma_limit, h.certified))
}

/// Rows for every monic Q with 1 <= deg Q <= deg_max at every requested
/// place; chooses the excluded average automatically for torsion beta.
pub fn convergence_table(
    m: &DrinfeldModule,
    beta: &RatFunc,
    places: &BTreeSet<Place>,
    deg_max: usize,
    opts: &HeightOpts,
) -> Result<Vec<AverageRow>> {
    let beta_torsion = annihilator_probe(m, beta, opts).is_some();
    // per-place targets once
    let mut targets = Vec::new();
    for v in places {
        let (target, certified) = per_place_target(m, beta, v, beta_torsion, opts)?;
        targets.push((v.clone(), target, certified));
    }
    let mut qs = Vec::new();
    for deg in 1..=deg_max {
        qs.extend(Poly::all_monic(m.field(), deg));
    }
    // parallel per Q: the value phi_Q(beta) is shared across the places
    let m = Arc::new(m.clone());
    let beta = Arc::new(beta.clone());
    let targets = Arc::new(targets);
    let rows: Vec<Result<Vec<AverageRow>>> = par_map(qs, {
        let m = Arc::clone(&m);
        let beta = Arc::clone(&beta);
        let targets = Arc::clone(&targets);
        move |q_poly| {
            let deg = q_poly.degree().unwrap();
            let value = m.apply(&q_poly, &beta);
            let mut out = Vec::with_capacity(targets.len());
            for (place, target, target_certified) in targets.iter() {
                let lead = if value.is_zero() {
                    if !beta_torsion {
                        return Err(Error::ZeroInput {
                            op: "torsion_average (phi_Q(beta) = 0)",
                        });
                    }
                    log_abs(&RatFunc::from_poly(q_poly.clone()), place)?
                } else {
                    log_abs(&value, place)?
                };
                let num = lead - m.gamma_log_abs(deg, place)?;
                let average = num.div_qpow(m.q(), (m.rank() * deg) as u32);
                let gap = (&average - target).abs();
                out.push(AverageRow {
                    q_poly: q_poly.clone(),
                    place: place.clone(),
                    average,
                    target: target.clone(),
                    target_certified: *target_certified,
                    gap,
                });
            }
            Ok(out)
        }
    });
    let mut flat = Vec::new();
    for r in rows {
        flat.extend(r?);
    }
    Ok(flat)
}

/// Order-of-limits check: at fixed Q the unnormalized numerators
/// logq|phi_Q(beta)|_v - logq|gamma_Q|_v summed over every place vanish by
/// the product formula, even though the per-place limits sum to h-hat(beta).
pub fn fixed_q_numerator_sum(
    m: &DrinfeldModule,
    beta: &RatFunc,
    q_poly: &Poly,
) -> Result<LogUnits> {
    let deg = q_poly
        .degree()
        .ok_or(Error::ZeroInput { op: "fixed_q_numerator_sum" })?;
    let value = m.apply(q_poly, beta);
    let value = if value.is_zero() {
        RatFunc::from_poly(q_poly.clone())
    } else {
        value
    };
    let mut places = support(&value)?;
    places.extend(support(m.leading_coeff())?);
    places.insert(Place::infinity());
    let mut sum = LogUnits::zero();
    for v in &places {
        sum += &log_abs(&value, v)?;
        sum += &(-m.gamma_log_abs(deg, v)?);
    }
    Ok(sum)
}
