//! Local canonical heights as exact rationals via escape-threshold iteration,
//! the global canonical height, the naive-height convergents, and torsion
//! order detection.
//!
//! At every place the orbit x_{n+1} = phi_t(x_n) is observed through windowed
//! completion arithmetic. Three certified outcomes exist: the orbit escapes
//! strictly past the threshold M_v and the closed-form value applies; at a
//! finite place with integral coefficients the orbit enters the integral
//! ball (the orbit then stays bounded forever and the local height is 0); or
//! the orbit hits 0 exactly. An orbit that merely stays inside the band up to
//! the iteration budget is reported as 0 with certified = false.

pub mod localelem;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::algebra::fq::FqElem;
use crate::algebra::logq::LogUnits;
use crate::algebra::place::{log_abs, ord, support, weil_height, Place};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;
use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::par::par_map;
use localelem::{LocalCtx, LocalElem};

/// Iteration and precision budgets.
#[derive(Clone, Debug)]
pub struct HeightOpts {
    /// orbit steps before giving up on a band-bound orbit
    pub n_max: u32,
    /// initial completion window (digits of the uniformizer)
    pub window: usize,
    /// window doublings before falling back to exact iteration
    pub max_retries: u32,
    /// size bound (deg num + deg den) for the exact fallback orbit
    pub exact_size_guard: usize,
    /// degree budget for the torsion annihilator probe
    pub torsion_cap: u32,
    /// size bound for iterates inside the torsion probe
    pub torsion_size_guard: usize,
}

impl Default for HeightOpts {
    fn default() -> Self {
        HeightOpts {
            n_max: 64,
            window: 64,
            max_retries: 3,
            exact_size_guard: 1 << 14,
            torsion_cap: 10,
            torsion_size_guard: 1 << 12,
        }
    }
}

/// Exact local height with its certification contract: certified results are
/// exact values of h-hat_v(beta); uncertified results are always 0-valued
/// with a diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct LocalHeight {
    #[serde(serialize_with = "ser_display")]
    pub place: Place,
    pub value: LogUnits,
    pub value_num: String,
    pub value_den: String,
    pub certified: bool,
    pub escape_index: Option<u32>,
    pub iterations: u32,
    pub precision_retries: u32,
    pub note: Option<String>,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl LocalHeight {
    fn certified(place: &Place, value: LogUnits, escape_index: Option<u32>, iterations: u32, retries: u32, note: Option<String>) -> LocalHeight {
        let (value_num, value_den) = value.parts();
        LocalHeight {
            place: place.clone(),
            value,
            value_num,
            value_den,
            certified: true,
            escape_index,
            iterations,
            precision_retries: retries,
            note,
        }
    }

    fn uncertified(place: &Place, iterations: u32, retries: u32, note: String) -> LocalHeight {
        LocalHeight {
            place: place.clone(),
            value: LogUnits::zero(),
            value_num: "0".into(),
            value_den: "1".into(),
            certified: false,
            escape_index: None,
            iterations,
            precision_retries: retries,
            note: Some(note),
        }
    }
}

/// The escape radius M_v in log-q units: above it one phi_t step strictly
/// grows |x|_v and the closed-form local height applies. Equals
/// max over i < d of (|a_i|_v / |a_d|_v)^(1/(q^d - q^i)) and
/// |a_d|_v^(-1/(q^d - 1)).
pub fn escape_threshold(m: &DrinfeldModule, v: &Place) -> LogUnits {
    let d = m.rank();
    let q = BigInt::from(m.q());
    let qd = q.pow(d as u32);
    let log_ad = log_abs(m.leading_coeff(), v).expect("a_d nonzero");
    let mut best = LogUnits::from_rational(
        -log_ad.as_rational() / BigRational::from_integer(&qd - BigInt::one()),
    );
    for i in 0..d {
        let a_i = m.phi_t().coeff(i);
        if a_i.is_zero() {
            continue;
        }
        let log_ai = log_abs(&a_i, v).expect("nonzero");
        let num = log_ai.as_rational() - log_ad.as_rational();
        let den = &qd - q.pow(i as u32);
        let cand = LogUnits::from_rational(num / BigRational::from_integer(den));
        best = best.max(cand);
    }
    best
}

/// Closed-form certified value at escape step n: logq|a_d|_v / (q^(dn)(q^d-1))
/// + logq|x_n|_v / q^(dn).
fn escape_value(m: &DrinfeldModule, v: &Place, n: u32, log_xn: &LogUnits) -> LogUnits {
    let d = m.rank() as u32;
    let q = BigInt::from(m.q());
    let qdn = q.pow(d * n);
    let qd1 = q.pow(d) - BigInt::one();
    let log_ad = log_abs(m.leading_coeff(), v).expect("a_d nonzero");
    let first = log_ad.as_rational() / BigRational::from_integer(&qdn * &qd1);
    let second = log_xn.as_rational() / BigRational::from_integer(qdn);
    LogUnits::from_rational(first + second)
}

enum StepOutcome {
    Done(LocalHeight),
    Continue,
    PrecisionLost,
}

/// Decide what an observed orbit value at step n implies.
fn classify(
    m: &DrinfeldModule,
    v: &Place,
    threshold: &LogUnits,
    coeffs_integral: bool,
    n: u32,
    retries: u32,
    elem_ord: Option<i64>,
    min_ord: Option<i64>,
    is_zero: bool,
    exhausted: bool,
) -> StepOutcome {
    if is_zero {
        // the orbit reached 0 exactly: beta is torsion and every later
        // iterate stays 0
        return StepOutcome::Done(LocalHeight::certified(
            v,
            LogUnits::zero(),
            None,
            n,
            retries,
            Some("orbit reached 0 (torsion point)".into()),
        ));
    }
    if exhausted {
        // only a lower bound on ord is known; at a finite place with
        // integral coefficients a nonnegative bound still certifies the
        // integral regime
        if coeffs_integral && min_ord.map(|b| b >= 0).unwrap_or(false) {
            return StepOutcome::Done(LocalHeight::certified(
                v,
                LogUnits::zero(),
                None,
                n,
                retries,
                Some("entered the integral regime (valuation bound)".into()),
            ));
        }
        return StepOutcome::PrecisionLost;
    }
    let o = elem_ord.expect("known ord");
    let log_xn = LogUnits::from_int(-o * v.degree() as i64);
    if log_xn > *threshold {
        let value = escape_value(m, v, n, &log_xn);
        return StepOutcome::Done(LocalHeight::certified(
            v,
            value,
            Some(n),
            n,
            retries,
            None,
        ));
    }
    if coeffs_integral && o >= 0 {
        // |x_n|_v <= 1 with v-integral coefficients: the orbit stays in the
        // integral ball forever, so the local height is 0
        return StepOutcome::Done(LocalHeight::certified(
            v,
            LogUnits::zero(),
            None,
            n,
            retries,
            Some("entered the integral regime".into()),
        ));
    }
    StepOutcome::Continue
}

/// Exact local canonical height of beta at v, with certification.
pub fn local_height(
    m: &DrinfeldModule,
    beta: &RatFunc,
    v: &Place,
    opts: &HeightOpts,
) -> LocalHeight {
    if beta.is_zero() {
        return LocalHeight::certified(v, LogUnits::zero(), None, 0, 0, Some("zero point".into()));
    }
    let threshold = escape_threshold(m, v);
    let coeffs_integral = m.integral_coefficients_at(v);
    let field = m.field();

    let mut retries = 0u32;
    let mut window = opts.window;
    loop {
        let ctx = LocalCtx::new(field, v, window);
        let coeff_elems: Vec<LocalElem> = m
            .phi_t()
            .coeffs()
            .iter()
            .map(|a| ctx.from_ratfunc(a))
            .collect();
        let mut x = ctx.from_ratfunc(beta);
        let mut lost = false;
        for n in 0..=opts.n_max {
            match classify(
                m,
                v,
                &threshold,
                coeffs_integral,
                n,
                retries,
                x.ord(),
                x.min_ord(),
                matches!(x, LocalElem::Zero),
                x.is_exhausted(),
            ) {
                StepOutcome::Done(h) => return h,
                StepOutcome::PrecisionLost => {
                    lost = true;
                    break;
                }
                StepOutcome::Continue => {}
            }
            if n == opts.n_max {
                return LocalHeight::uncertified(
                    v,
                    n,
                    retries,
                    "orbit stayed in the band within the iteration budget".into(),
                );
            }
            x = phi_step_local(&ctx, &coeff_elems, &x);
        }
        if lost {
            retries += 1;
            if retries <= opts.max_retries {
                window *= 2;
                continue;
            }
            return exact_fallback(m, beta, v, &threshold, coeffs_integral, retries, opts);
        }
    }
}

fn phi_step_local(ctx: &LocalCtx, coeffs: &[LocalElem], x: &LocalElem) -> LocalElem {
    let mut acc = LocalElem::Zero;
    for (i, c) in coeffs.iter().enumerate() {
        if matches!(c, LocalElem::Zero) {
            continue;
        }
        let xq = ctx.pow_q(x, i as u32);
        acc = ctx.add(&acc, &ctx.mul(c, &xq));
    }
    acc
}

/// Exact rational-orbit fallback, used when the windowed iteration keeps
/// exhausting precision. Degrees grow like q^(dn), so a size guard applies.
fn exact_fallback(
    m: &DrinfeldModule,
    beta: &RatFunc,
    v: &Place,
    threshold: &LogUnits,
    coeffs_integral: bool,
    retries: u32,
    opts: &HeightOpts,
) -> LocalHeight {
    let mut x = beta.clone();
    for n in 0..=opts.n_max {
        let is_zero = x.is_zero();
        let o = if is_zero { None } else { Some(ord(&x, v).unwrap()) };
        match classify(
            m,
            v,
            threshold,
            coeffs_integral,
            n,
            retries,
            o,
            o,
            is_zero,
            false,
        ) {
            StepOutcome::Done(h) => return h,
            StepOutcome::PrecisionLost => unreachable!("exact ords"),
            StepOutcome::Continue => {}
        }
        if x.size() > opts.exact_size_guard {
            return LocalHeight::uncertified(
                v,
                n,
                retries,
                format!(
                    "exact fallback exceeded the degree guard ({})",
                    opts.exact_size_guard
                ),
            );
        }
        if n == opts.n_max {
            return LocalHeight::uncertified(
                v,
                n,
                retries,
                "orbit stayed in the band within the iteration budget".into(),
            );
        }
        x = m.step(&x);
    }
    unreachable!()
}

/// Result of a torsion-order query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionStatus {
    Order(Poly),
    NotTorsion,
    Undecided,
}

/// Search for the minimal monic annihilator of beta by building the
/// F_q-linear span of beta, phi_t(beta), phi_{t^2}(beta), ... and taking the
/// first linear dependence. Returns None when none is found within the caps.
pub fn annihilator_probe(m: &DrinfeldModule, beta: &RatFunc, opts: &HeightOpts) -> Option<Poly> {
    let field = m.field();
    if beta.is_zero() {
        return Some(Poly::one(field));
    }
    let step_growth = (m.q() as usize).saturating_pow(m.rank() as u32);
    // incremental echelon over F_q: rows are reduced combinations of the
    // iterates scaled to a running common denominator; a new iterate that
    // reduces to zero yields the monic annihilator
    let mut den = Poly::one(field);
    let mut rows: Vec<(Poly, Vec<FqElem>)> = Vec::new();
    let mut x = beta.clone();
    for k in 0..=opts.torsion_cap as usize {
        if k > 0 {
            if x.size().saturating_mul(step_growth) > opts.torsion_size_guard {
                // degrees are exploding; beta is visibly escaping
                return None;
            }
            x = m.step(&x);
        }
        // grow the common denominator and rescale existing rows
        let g = den.gcd(x.den());
        let extra = x.den().divrem(&g).unwrap().0;
        if !extra.is_one() {
            den = den.mul(&extra);
            for (rpoly, _) in &mut rows {
                *rpoly = rpoly.mul(&extra);
            }
        }
        let mut poly = x.num().mul(&den.divrem(x.den()).unwrap().0);
        let mut combo = vec![field.zero(); k + 1];
        combo[k] = field.one();
        while let Some(deg) = poly.degree() {
            match rows.iter().find(|(r, _)| r.degree() == Some(deg)) {
                None => break,
                Some((rpoly, rcombo)) => {
                    let factor = poly
                        .lead()
                        .unwrap()
                        .mul(&rpoly.lead().unwrap().inv().unwrap());
                    poly = poly.sub(&rpoly.mul_scalar(&factor));
                    for (c, rc) in combo.iter_mut().zip(rcombo) {
                        *c = c.sub(&factor.mul(rc));
                    }
                }
            }
        }
        if poly.is_zero() {
            // combo_k = 1 is untouched by reductions against earlier rows
            let q_poly = Poly::new(field, combo);
            debug_assert!(m.apply(&q_poly, beta).is_zero());
            return Some(q_poly);
        }
        rows.push((poly, combo));
    }
    None
}

/// Minimal monic order of beta, or a certified non-torsion verdict, or
/// Undecided when both the probe cap and the certification budget run out.
pub fn torsion_order(m: &DrinfeldModule, beta: &RatFunc, opts: &HeightOpts) -> TorsionStatus {
    if let Some(q_poly) = annihilator_probe(m, beta, opts) {
        return TorsionStatus::Order(q_poly);
    }
    let g = global_height(m, beta, opts);
    if g.certified_positive {
        return TorsionStatus::NotTorsion;
    }
    TorsionStatus::Undecided
}

/// Global canonical height: the sum of local heights over the finite support
/// set (bad places, poles of beta, infinity); all other places contribute a
/// certified 0 through the integral regime.
#[derive(Clone, Debug, Serialize)]
pub struct GlobalHeight {
    pub value: LogUnits,
    /// every summand certified
    pub certified: bool,
    /// some certified local height is strictly positive (a nontorsion proof)
    pub certified_positive: bool,
    pub locals: Vec<LocalHeight>,
    /// monic annihilator when beta is detected torsion
    #[serde(serialize_with = "ser_opt_display")]
    pub torsion_order: Option<Poly>,
}

fn ser_opt_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

pub fn global_height(m: &DrinfeldModule, beta: &RatFunc, opts: &HeightOpts) -> GlobalHeight {
    let places = height_support(m, beta);
    let opts_arc = Arc::new(opts.clone());
    let locals: Vec<LocalHeight> = par_map(places.into_iter().collect(), {
        let opts = Arc::clone(&opts_arc);
        move |v| local_height(m, beta, &v, &opts)
    });
    let mut value = LogUnits::zero();
    let mut certified = true;
    let mut certified_positive = false;
    for h in &locals {
        value += &h.value;
        certified &= h.certified;
        certified_positive |= h.certified && h.value.is_positive();
    }
    if !certified_positive {
        // every local is 0 (certified or budget-bound): a torsion
        // certificate settles the global value exactly
        if let Some(q_poly) = annihilator_probe(m, beta, opts) {
            return GlobalHeight {
                value: LogUnits::zero(),
                certified: true,
                certified_positive: false,
                locals,
                torsion_order: Some(q_poly),
            };
        }
    }
    GlobalHeight {
        value,
        certified,
        certified_positive,
        locals,
        torsion_order: None,
    }
}

/// Cheap nontorsion certificate: some local height is certified positive.
/// Scans use this to skip the annihilator probe on escaping points.
pub fn certified_nontorsion(m: &DrinfeldModule, beta: &RatFunc, opts: &HeightOpts) -> bool {
    if beta.is_zero() {
        return false;
    }
    let mut places: Vec<Place> = height_support(m, beta).into_iter().collect();
    // infinity is the place most likely to burn the whole band budget; try
    // the finite places first
    places.sort_by_key(|v| v.is_infinite());
    places.iter().any(|v| {
        let h = local_height(m, beta, v, opts);
        h.certified && h.value.is_positive()
    })
}

/// Torsion precondition shared by the scans: reject beta when an annihilator
/// is found, accepting cheap nontorsion certificates first.
pub(crate) fn ensure_nontorsion(
    m: &DrinfeldModule,
    beta: &RatFunc,
    opts: &HeightOpts,
) -> crate::error::Result<()> {
    if certified_nontorsion(m, beta, opts) {
        return Ok(());
    }
    if annihilator_probe(m, beta, opts).is_some() || beta.is_zero() {
        return Err(Error::TorsionBeta);
    }
    Ok(())
}

/// Places that can carry a nonzero local height for this (module, point):
/// bad places of the module, finite poles of beta, and infinity.
pub fn height_support(m: &DrinfeldModule, beta: &RatFunc) -> BTreeSet<Place> {
    let mut places: BTreeSet<Place> = m.bad_places().clone();
    places.insert(Place::infinity());
    if !beta.is_zero() {
        for v in support(beta).expect("nonzero") {
            if !v.is_infinite() && ord(beta, &v).unwrap() < 0 {
                places.insert(v);
            }
        }
    }
    places
}

/// h(phi_{t^k}(beta)) / q^(dk) for k = 0..=n, exactly; corroborates the
/// global height through the limit definition.
pub fn naive_height_sequence(
    m: &DrinfeldModule,
    beta: &RatFunc,
    n: u32,
    opts: &HeightOpts,
) -> Result<Vec<LogUnits>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut x = beta.clone();
    let d = m.rank() as u32;
    let step_growth = (m.q() as usize).saturating_pow(d);
    for k in 0..=n {
        out.push(weil_height(&x).div_qpow(m.q(), d * k));
        if k < n {
            // bail before an iterate blows past the degree guard
            if x.size().saturating_mul(step_growth) > opts.exact_size_guard {
                return Err(Error::GuardExceeded {
                    what: "naive height iterate degree",
                    limit: opts.exact_size_guard as u64,
                });
            }
            x = m.step(&x);
        }
    }
    Ok(out)
}
