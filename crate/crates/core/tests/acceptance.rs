//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Expected values tagged as derived in the statements below were produced by
//! the independent oracles implemented inside each test (degree bookkeeping,
//! exhaustive residue-order scans, brute-force enumerations) and frozen here.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use drinfeld_heights::algebra::{
    log_abs, ord, parse_place, parse_ratfunc, support, FieldRef, LogUnits, Place, Poly, RatFunc,
};
use drinfeld_heights::drinfeld::{DrinfeldModule, TwistedPoly};
use drinfeld_heights::equidist::{
    convergence_table, excluded_average, fixed_q_numerator_sum, per_place_target,
};
use drinfeld_heights::heights::localelem::{LocalCtx, LocalElem};
use drinfeld_heights::heights::{global_height, HeightOpts};
use drinfeld_heights::rng::SplitMix64;
use drinfeld_heights::schinzel::{
    kernel_size, mobius, monic_divisors, primitive_place_search, residue_order,
};
use drinfeld_heights::siegel::{is_s_integral, nice_trick_again_constant, scan_siegel};

use common::{f4, prime_field, rand_module, rand_poly, rand_ratfunc};

fn finish(n: u32, name: &str, start: Instant, budget: Option<Duration>, mut violations: Vec<String>) {
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        if elapsed > b {
            violations.push(format!("runtime {elapsed:?} exceeded the budget {b:?}"));
        }
    }
    if violations.is_empty() {
        println!("ACCEPTANCE {n} ({name}): PASS [{elapsed:.2?}]");
    } else {
        println!(
            "ACCEPTANCE {n} ({name}): FAIL [{elapsed:.2?}] — {} violation(s)",
            violations.len()
        );
        for v in &violations {
            println!("    {v}");
        }
        panic!(
            "acceptance criterion {n} ({name}) failed:\n{}",
            violations.join("\n")
        );
    }
}

/// 1. Product formula: 500 random nonzero rational functions over F_2(t) and
/// F_3(t); the sum of logq|x|_v over all places is 0 bit-exact.
#[test]
fn criterion_01_product_formula() {
    let start = Instant::now();
    let mut violations = Vec::new();
    for p in [2u64, 3] {
        let field = prime_field(p);
        let mut rng = SplitMix64::new(100 + p);
        for i in 0..500 {
            let x = rand_ratfunc(&field, 8, &mut rng);
            let mut sum = LogUnits::zero();
            for v in support(&x).unwrap() {
                sum += &log_abs(&x, &v).unwrap();
            }
            if !sum.is_zero() {
                violations.push(format!("sum {sum} != 0 for draw {i} over F_{p}: {x}"));
            }
        }
    }
    finish(1, "product formula", start, Some(Duration::from_secs(5)), violations);
}

/// 2. Homomorphism / gamma: 100 random modules with d <= 3, q in {2,3,4} and
/// monic Q of degree <= 4: phi_of(PQ) = phi_of(P) compose phi_of(Q) and the
/// gamma closed form equals the literal leading coefficient, bit-exact.
/// Degrees are drawn jointly with (q, d) inside a work envelope, because the
/// composed coefficients have ~q^(d(deg P + deg Q)) terms.
#[test]
fn criterion_02_homomorphism_gamma() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let fields: Vec<FieldRef> = vec![prime_field(2), prime_field(3), f4()];
    let mut rng = SplitMix64::new(2);
    let mut deg4_seen = false;
    for i in 0..100u64 {
        let field = &fields[(i % 3) as usize];
        let q = field.q();
        let d = 1 + (i / 3 % 3) as usize;
        let coeff_deg = if q >= 4 || d >= 3 { 1 } else { 2 };
        let m = rand_module(field, d, coeff_deg, &mut rng);
        // joint work envelope: q^(d * (deg P + deg Q)) <= 4096
        let mut total_max = 1usize;
        while (q as u128).pow((d * (total_max + 1)) as u32) <= 4096 {
            total_max += 1;
        }
        let deg_q = 1 + rng.below(total_max.min(4) as u64) as usize;
        let deg_p = 1 + rng.below((total_max - deg_q).max(1) as u64) as usize;
        if deg_q == 4 {
            deg4_seen = true;
        }
        let p_poly = rand_poly(field, deg_p, true, &mut rng);
        let q_poly = rand_poly(field, deg_q, true, &mut rng);
        let lhs = m.phi_of(&p_poly.mul(&q_poly));
        let rhs = m.phi_of(&p_poly).mul(&m.phi_of(&q_poly));
        if lhs != rhs {
            violations.push(format!(
                "phi_of(PQ) != phi_of(P)phi_of(Q) for q={q} d={d} P={p_poly} Q={q_poly}"
            ));
        }
        for qq in [&p_poly, &q_poly] {
            let gamma = m.gamma(qq).unwrap();
            let literal = m.phi_of(qq).lead().unwrap().clone();
            if gamma != literal {
                violations.push(format!(
                    "gamma closed form mismatch for q={q} d={d} Q={qq}"
                ));
            }
        }
    }
    if !deg4_seen {
        violations.push("no deg-4 Q was drawn".into());
    }
    finish(2, "homomorphism and gamma", start, Some(Duration::from_secs(30)), violations);
}

/// 3. Height functional equation: on 50 certified instances,
/// h-hat(phi_P(beta)) = q^(d deg P) h-hat(beta) exactly.
#[test]
fn criterion_03_functional_equation() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let opts = HeightOpts::default();
    let mut count = 0usize;
    let mut rng = SplitMix64::new(3);
    'outer: for p in [2u64, 3] {
        let field = prime_field(p);
        let modules = [
            DrinfeldModule::carlitz(&field),
            DrinfeldModule::from_coeffs(vec![
                RatFunc::t(&field),
                RatFunc::t(&field),
                RatFunc::one(&field),
            ])
            .unwrap(),
            DrinfeldModule::from_coeffs(vec![
                RatFunc::t(&field),
                RatFunc::one(&field),
                RatFunc::t(&field),
            ])
            .unwrap(),
            DrinfeldModule::from_coeffs(vec![
                RatFunc::t(&field),
                RatFunc::zero(&field),
                RatFunc::zero(&field),
                RatFunc::one(&field),
            ])
            .unwrap(),
            DrinfeldModule::from_coeffs(vec![
                RatFunc::t(&field),
                parse_ratfunc("t^2", &field).unwrap(),
                RatFunc::one(&field),
            ])
            .unwrap(),
        ];
        let beta_strs = [
            "t", "t^2", "t^3", "t^4", "t^2+t", "t^3+1", "1/t", "1/(t+1)", "(t+1)/t",
            "t/(t+1)", "1/t^2", "(t^2+1)/t", "1/(t^2+t+1)",
        ];
        for m in &modules {
            for bs in &beta_strs {
                let beta = parse_ratfunc(bs, &field).unwrap();
                let g = global_height(m, &beta, &opts);
                if !g.certified {
                    continue;
                }
                let deg_p = 1 + rng.below(2) as usize;
                let p_poly = rand_poly(&field, deg_p, true, &mut rng);
                let image = m.apply(&p_poly, &beta);
                let gp = global_height(m, &image, &opts);
                if !gp.certified {
                    continue;
                }
                let scale = (m.q() as i64).pow((m.rank() * deg_p) as u32);
                if gp.value != g.value.scale(scale) {
                    violations.push(format!(
                        "h(phi_P(beta)) = {} but q^(d deg P) h(beta) = {} for beta={bs}, P={p_poly}, q={}, d={}",
                        gp.value,
                        g.value.scale(scale),
                        m.q(),
                        m.rank()
                    ));
                }
                count += 1;
                if count >= 50 {
                    break 'outer;
                }
            }
        }
    }
    if count < 50 {
        violations.push(format!("only {count} certified instances found (need 50)"));
    }
    finish(3, "height functional equation", start, Some(Duration::from_secs(60)), violations);
}

/// 4. Denis convergence on the Carlitz / beta = 1/t instance: the naive
/// convergents satisfy |h(phi_t^k(beta))/q^k - h-hat| <= C/q^k with C fitted
/// at k <= 2 and asserted for 3 <= k <= 8. The reference h-hat = 1 comes
/// from the escape formula computed by direct degree bookkeeping, not from
/// the heights module.
#[test]
fn criterion_04_denis_convergence() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let field = prime_field(2);
    let m = DrinfeldModule::carlitz(&field);
    let beta = parse_ratfunc("1/t", &field).unwrap();
    // oracle: iterate exactly and watch raw component degrees. ord_t of the
    // iterates is -2^k (denominator t^(2^k), numerator coprime to t), so the
    // orbit escapes at (t) from step 0 and the closed form gives
    // h-hat = logq|beta|_t = 1; every other finite place stays integral and
    // infinity stays in the band.
    let mut x = beta.clone();
    let mut naive = Vec::new();
    for k in 0..=8u32 {
        let h = x
            .num()
            .degree()
            .unwrap()
            .max(x.den().degree().unwrap()) as i64;
        naive.push(LogUnits::from_int(h).div_qpow(2, k));
        let ord_t = x.den().multiplicity(&Poly::t(&field)).unwrap() as i64
            - x.num().multiplicity(&Poly::t(&field)).unwrap() as i64;
        if ord_t != (1i64 << k) {
            violations.push(format!("oracle: ord_t(x_{k}) = {} != 2^{k}", -ord_t));
        }
        x = m.step(&x);
    }
    let oracle_hhat = LogUnits::from_int(1);
    // the heights module agrees with the oracle
    let g = global_height(&m, &beta, &HeightOpts::default());
    if g.value != oracle_hhat {
        violations.push(format!("global height {} != oracle 1", g.value));
    }
    // fit C at k <= 2, assert for 3 <= k <= 8, exact rational comparisons
    let gap = |k: usize| (&naive[k] - &oracle_hhat).abs();
    let mut c = LogUnits::zero();
    for k in 0..=2usize {
        c = c.max(gap(k).scale((2i64).pow(k as u32)));
    }
    for k in 3..=8usize {
        let bound = c.div_qpow(2, k as u32);
        if gap(k) > bound {
            violations.push(format!(
                "naive gap at k={k} is {} > C/q^k = {}",
                gap(k),
                bound
            ));
        }
    }
    finish(4, "Denis convergence", start, None, violations);
}

/// 5. Equidistribution on Carlitz / beta = 1/t over the places
/// {(t), (t+1), inf}: |torsion_average(Q, v) - target(v)| <= C_v / q^(deg Q)
/// for all monic Q with 3 <= deg Q <= 8 and C_v fitted at deg <= 2, plus the
/// fixed-Q full-support sum vanishing exactly for every Q.
#[test]
fn criterion_05_equidistribution() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let field = prime_field(2);
    let m = DrinfeldModule::carlitz(&field);
    let beta = parse_ratfunc("1/t", &field).unwrap();
    let opts = HeightOpts::default();
    let places: BTreeSet<Place> = ["t", "t+1", "inf"]
        .iter()
        .map(|s| parse_place(s, &field).unwrap())
        .collect();
    let rows = convergence_table(&m, &beta, &places, 8, &opts).unwrap();
    // order-of-limits check first: fixed-Q sums vanish exactly
    for deg in 1..=8 {
        for q_poly in Poly::all_monic(&field, deg) {
            let s = fixed_q_numerator_sum(&m, &beta, &q_poly).unwrap();
            if !s.is_zero() {
                violations.push(format!("fixed-Q sum {s} != 0 at Q = {q_poly}"));
            }
        }
    }
    // fit per-place constants on deg <= 2
    let mut fit: BTreeMap<Place, LogUnits> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.q_poly.degree().unwrap() <= 2) {
        let scaled = r.gap.scale((2i64).pow(r.q_poly.degree().unwrap() as u32));
        let e = fit.entry(r.place.clone()).or_insert_with(LogUnits::zero);
        if scaled > *e {
            *e = scaled;
        }
    }
    for r in rows.iter().filter(|r| r.q_poly.degree().unwrap() >= 3) {
        let c_v = fit.get(&r.place).unwrap();
        let bound = c_v.div_qpow(2, r.q_poly.degree().unwrap() as u32);
        if r.gap > bound {
            violations.push(format!(
                "gap {} > C_v/q^degQ = {} at Q = {}, v = {} (C_v fitted at deg <= 2 is {})",
                r.gap, bound, r.q_poly, r.place, c_v
            ));
        }
    }
    finish(5, "equidistribution gap law", start, Some(Duration::from_secs(60)), violations);
}

/// 6. Torsion averaging (phi_t = t x + t x^2 over F_2(t), beta = 1, order t):
/// excluded averages target 1 at (t), -1 at infinity, 0 elsewhere, with the
/// same fitted gap law for deg Q <= 8. Exact rationals throughout.
#[test]
fn criterion_06_torsion_averaging() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let field = prime_field(2);
    let m = DrinfeldModule::from_coeffs(vec![RatFunc::t(&field), RatFunc::t(&field)]).unwrap();
    let beta = RatFunc::one(&field);
    let opts = HeightOpts::default();
    let place_strs = ["t", "t+1", "t^2+t+1", "inf"];
    let expected_targets = ["1", "0", "0", "-1"];
    let mut targets = Vec::new();
    for (ps, expect) in place_strs.iter().zip(expected_targets) {
        let v = parse_place(ps, &field).unwrap();
        let (target, certified) = per_place_target(&m, &beta, &v, true, &opts).unwrap();
        if target.to_string() != expect || !certified {
            violations.push(format!(
                "target at {ps} is {target} (certified {certified}), expected {expect}"
            ));
        }
        targets.push((v, target));
    }
    // gap law with C_v fitted at deg <= 2
    let mut fit: BTreeMap<Place, LogUnits> = BTreeMap::new();
    let mut rows = Vec::new();
    for deg in 1..=8 {
        for q_poly in Poly::all_monic(&field, deg) {
            for (v, target) in &targets {
                let avg = excluded_average(&m, &beta, &q_poly, v).unwrap();
                let gap = (&avg - target).abs();
                rows.push((q_poly.clone(), v.clone(), gap));
            }
        }
    }
    for (q_poly, v, gap) in rows.iter().filter(|(q, _, _)| q.degree().unwrap() <= 2) {
        let scaled = gap.scale((2i64).pow(q_poly.degree().unwrap() as u32));
        let e = fit.entry(v.clone()).or_insert_with(LogUnits::zero);
        if scaled > *e {
            *e = scaled;
        }
    }
    for (q_poly, v, gap) in rows.iter().filter(|(q, _, _)| q.degree().unwrap() >= 3) {
        let c_v = fit.get(v).unwrap();
        let bound = c_v.div_qpow(2, q_poly.degree().unwrap() as u32);
        if *gap > bound {
            violations.push(format!(
                "gap {gap} > C_v/q^degQ = {bound} at Q = {q_poly}, v = {v} (C_v = {c_v})"
            ));
        }
    }
    finish(6, "torsion averaging", start, None, violations);
}

/// 7. Finite-place lemma suite, each on >= 200 randomized instances with
/// places of degree <= 3, all comparisons exact:
///   (a) |F(x)|_w = |b_1 x|_w for integral twisted F and |x|_w < |b_1|_w;
///   (b) |phi_Q(x)|_v = |Qx|_v <= |x|_v below the radius |P|_v^(1/(q^l - 1));
///   (c) the same from |x|_v <= |pi_v|_v once q^l > [K:F_q(t)] + 1 = 2;
///   (d) {F : |phi_F(beta)|_w < |P|_w} observed on deg <= 6 is an ideal;
///   (e) |phi_Q(beta)|_w >= C_w |P|_w^(ord_P Q) with C_w from the minimal
///       ideal member.
#[test]
fn criterion_07_finite_place_lemmas() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let fields = [prime_field(2), prime_field(3)];
    let places: Vec<(FieldRef, Place)> = fields
        .iter()
        .flat_map(|f| {
            (1..=3).flat_map(move |deg| {
                Poly::monic_irreducibles(f, deg)
                    .into_iter()
                    .map(move |p| (f.clone(), Place::finite(p).unwrap()))
            })
        })
        .collect();

    // (a) Lemma small-x
    let mut rng = SplitMix64::new(71);
    for i in 0..220 {
        let (field, v) = &places[(rng.below(places.len() as u64)) as usize];
        let rank = 1 + rng.below(3) as usize;
        let mut coeffs = vec![RatFunc::zero(field); rank + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let poly = rand_poly(field, rng.below(3) as usize, false, field_rng(&mut rng));
            *c = RatFunc::from_poly(if j == 0 || j == rank {
                nonzero_or_one(poly, field)
            } else {
                poly
            });
        }
        let f_tw = TwistedPoly::new(field, coeffs);
        let b1 = f_tw.coeff(0);
        let ord_b1 = ord(&b1, v).unwrap();
        let x = small_element(field, v, ord_b1 + 1 + rng.below(2) as i64, &mut rng);
        let fx = f_tw.evaluate(&x);
        let lhs = log_abs(&fx, v).unwrap();
        let rhs = log_abs(&b1.mul(&x), v).unwrap();
        if lhs != rhs {
            violations.push(format!("(a) |F(x)| != |b_1 x| at {v}, instance {i}"));
        }
        if lhs > log_abs(&x, v).unwrap() {
            violations.push(format!("(a) |F(x)| > |x| at {v}, instance {i}"));
        }
    }

    // (b) Lemma "more precise" and (c) its uniformizer corollary. The orbit
    // valuations are observed through the windowed completion arithmetic
    // (exact ords when the window survives; the rare exhaustion falls back
    // to exact iteration), since the exact orbits reach degree q^(d deg Q).
    let mut rng = SplitMix64::new(72);
    for i in 0..220 {
        let (field, v) = &places[(rng.below(places.len() as u64)) as usize];
        let l = v.degree();
        let d = 1 + rng.below(2) as usize;
        let m = rand_module(field, d, 2, &mut rng);
        let ql = (field.q() as i64).pow(l as u32);
        // |x|_v < |P|_v^(1/(q^l - 1)) amounts to ord >= 2 when q^l = 2 and
        // ord >= 1 otherwise
        let min_ord = if ql == 2 { 2 } else { 1 };
        let x = small_element(field, v, min_ord + rng.below(2) as i64, &mut rng);
        let ord_x = ord(&x, v).unwrap();
        for _ in 0..20 {
            let q_poly = rand_poly(field, 1 + rng.below(4) as usize, true, &mut rng);
            let lhs = local_ord(&m, &x, &q_poly, v);
            let rhs = ord_x + ord(&RatFunc::from_poly(q_poly.clone()), v).unwrap();
            if lhs != rhs {
                violations.push(format!(
                    "(b) ord(phi_Q(x)) = {lhs} != ord(Qx) = {rhs} at {v}, Q = {q_poly}, instance {i}"
                ));
            }
            if lhs < ord_x {
                violations.push(format!("(b) |phi_Q(x)| > |x| at {v}, instance {i}"));
            }
        }
        // (c): for q^l > 2, ord exactly 1 suffices
        if ql > 2 {
            let x1 = small_element(field, v, 1, &mut rng);
            let q_poly = rand_poly(field, 1 + rng.below(4) as usize, true, &mut rng);
            let lhs = local_ord(&m, &x1, &q_poly, v);
            let rhs = 1 + ord(&RatFunc::from_poly(q_poly.clone()), v).unwrap();
            if lhs != rhs {
                violations.push(format!("(c) uniformizer bound fails at {v}, instance {i}"));
            }
        }
    }

    // (d) ideal closure and (e) the nice-trick lower bound share one
    // enumeration of ord_w(phi_F(beta)) over monic F of degree <= 6. In ord
    // terms, F is an ideal member iff ord > 1, and the lower bound reads
    // ord(phi_Q(beta)) <= ord(phi_G(beta)) + ord_P(Q).
    let mut rng = SplitMix64::new(73);
    let mut done = 0;
    while done < 200 {
        let heavier = done % 5 == 4; // mostly F_2 draws, some F_3
        let field = if heavier { &fields[1] } else { &fields[0] };
        let deg_choices = if heavier { 2 } else { 3 };
        let irr = Poly::monic_irreducibles(field, 1 + rng.below(deg_choices) as usize);
        let p_poly = irr[rng.below(irr.len() as u64) as usize].clone();
        let w = Place::finite(p_poly.clone()).unwrap();
        let m = rand_module(field, 1, 1, &mut rng);
        let beta = rand_ratfunc(field, 2, &mut rng);
        // the exact orbit once (rank 1, so degrees stay around q^6)
        let mut orbit = vec![beta.clone()];
        for _ in 0..6 {
            let next = m.step(orbit.last().unwrap());
            orbit.push(next);
        }
        if orbit.iter().any(|x| x.is_zero()) {
            continue; // torsion draw
        }
        let ctx = LocalCtx::new(field, &w, 24);
        let orbit_elems: Vec<LocalElem> = orbit.iter().map(|x| ctx.from_ratfunc(x)).collect();
        let consts: Vec<LocalElem> = field
            .elements()
            .map(|c| ctx.from_ratfunc(&RatFunc::constant(c)))
            .collect();
        let mut ords: BTreeMap<Poly, i64> = BTreeMap::new();
        let mut torsion = false;
        'f_loop: for deg in 0..=6usize {
            for f_poly in Poly::all_monic(field, deg) {
                let mut acc = LocalElem::Zero;
                for (j, c) in f_poly.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        acc = ctx.add(&acc, &ctx.mul(&consts[c.index() as usize], &orbit_elems[j]));
                    }
                }
                let o = match acc.ord() {
                    Some(o) => o,
                    None => {
                        // window exhausted (or exact zero): exact fallback
                        let mut val = RatFunc::zero(field);
                        for (j, c) in f_poly.coeffs().iter().enumerate() {
                            if !c.is_zero() {
                                val = val.add(&orbit[j].mul_scalar(c));
                            }
                        }
                        if val.is_zero() {
                            torsion = true;
                            break 'f_loop;
                        }
                        ord(&val, &w).unwrap()
                    }
                };
                ords.insert(f_poly, o);
            }
        }
        if torsion {
            continue;
        }
        let members: Vec<&Poly> = ords.iter().filter(|(_, o)| **o > 1).map(|(f, _)| f).collect();
        // (d): closed under addition and multiplication by t and constants
        for a in &members {
            for b in &members {
                let sum = a.add(b);
                if sum.is_zero() {
                    continue;
                }
                let (sum_monic, _) = sum.monic();
                if ords.get(&sum_monic).map(|o| *o <= 1).unwrap_or(false) {
                    violations.push(format!("(d) ideal not closed under +: {a} + {b} at {w}"));
                }
            }
            if a.degree().unwrap() <= 5 {
                let ta = a.mul(&Poly::t(field));
                if ords.get(&ta).map(|o| *o <= 1).unwrap_or(false) {
                    violations.push(format!("(d) ideal not closed under t*: {a} at {w}"));
                }
            }
        }
        // (e): C_w from the minimal member (deglex-least is minimal-degree)
        let ord_g = members.first().map(|g| *ords.get(*g).unwrap()).unwrap_or(1);
        for (f_poly, o) in &ords {
            if f_poly.is_one() {
                continue;
            }
            let ord_p = f_poly.multiplicity(&p_poly).unwrap() as i64;
            if *o > ord_g + ord_p {
                violations.push(format!(
                    "(e) |phi_F(beta)| < C_w |P|^ord_P(F) at F = {f_poly}, w = {w}"
                ));
            }
        }
        done += 1;
    }

    finish(7, "finite-place lemma suite", start, Some(Duration::from_secs(60)), violations);
}

fn field_rng(rng: &mut SplitMix64) -> &mut SplitMix64 {
    rng
}

/// ord_v(phi_Q(x)) observed through the windowed completion, with exact
/// fallback when the window is exhausted.
fn local_ord(m: &DrinfeldModule, x: &RatFunc, q_poly: &Poly, v: &Place) -> i64 {
    let field = m.field();
    let ctx = LocalCtx::new(field, v, 32);
    let coeffs: Vec<LocalElem> = m
        .phi_t()
        .coeffs()
        .iter()
        .map(|a| ctx.from_ratfunc(a))
        .collect();
    let consts: Vec<LocalElem> = field
        .elements()
        .map(|c| ctx.from_ratfunc(&RatFunc::constant(c)))
        .collect();
    let mut acc = LocalElem::Zero;
    let mut orbit = ctx.from_ratfunc(x);
    for (i, qi) in q_poly.coeffs().iter().enumerate() {
        if i > 0 {
            let mut next = LocalElem::Zero;
            for (j, cj) in coeffs.iter().enumerate() {
                if matches!(cj, LocalElem::Zero) {
                    continue;
                }
                next = ctx.add(&next, &ctx.mul(cj, &ctx.pow_q(&orbit, j as u32)));
            }
            orbit = next;
        }
        if !qi.is_zero() {
            acc = ctx.add(&acc, &ctx.mul(&consts[qi.index() as usize], &orbit));
        }
    }
    match acc.ord() {
        Some(o) => o,
        None => ord(&m.apply(q_poly, x), v).unwrap(),
    }
}

fn nonzero_or_one(p: Poly, field: &FieldRef) -> Poly {
    if p.is_zero() {
        Poly::one(field)
    } else {
        p
    }
}

/// Element with exact ord_v = target (v finite): P^target * u/w with u, w
/// random and coprime to P.
fn small_element(field: &FieldRef, v: &Place, target: i64, rng: &mut SplitMix64) -> RatFunc {
    let p_poly = v.prime().unwrap();
    loop {
        let u = rand_poly(field, rng.below(3) as usize, false, rng);
        let w = rand_poly(field, rng.below(3) as usize, false, rng);
        if u.is_zero() || w.is_zero() {
            continue;
        }
        if u.multiplicity(p_poly).unwrap() > 0 || w.multiplicity(p_poly).unwrap() > 0 {
            continue;
        }
        let base = RatFunc::new(u, w).unwrap();
        let shift = if target >= 0 {
            RatFunc::from_poly(p_poly.pow(target as u64))
        } else {
            RatFunc::from_poly(p_poly.pow((-target) as u64)).inv().unwrap()
        };
        return base.mul(&shift);
    }
}

/// 8. Schinzel suite on Carlitz / beta = 1/t, S empty: the exhaustive
/// residue-order scan is the oracle; the Krylov order and the valuation
/// conditions must agree on every scanned pair, and every monic Q with
/// 1 <= deg Q <= 4 must receive a primitive place of degree <= 8.
#[test]
fn criterion_08_schinzel_suite() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let field = prime_field(2);
    let m = DrinfeldModule::carlitz(&field);
    let beta = parse_ratfunc("1/t", &field).unwrap();
    let opts = HeightOpts::default();
    let s = BTreeSet::new();
    // oracle: exhaustive residue-order scan over all admissible places
    let mut oracle: BTreeMap<Poly, Vec<Place>> = BTreeMap::new();
    for deg in 1..=8usize {
        for p_poly in Poly::monic_irreducibles(&field, deg) {
            let v = Place::finite(p_poly).unwrap();
            if !m.good_reduction(&v).unwrap() || ord(&beta, &v).map(|o| o < 0).unwrap_or(true) {
                continue;
            }
            let rm = m.reduce(&v).unwrap();
            let beta_bar = rm.residue_field().reduce(&beta).unwrap();
            let order = residue_order(&rm, &beta_bar);
            oracle.entry(order).or_default().push(v);
        }
    }
    let mut mismatches = 0usize;
    let mut misses = Vec::new();
    for deg in 1..=4usize {
        for q_poly in Poly::all_monic(&field, deg) {
            // the search hard-errors on any Krylov/valuation disagreement
            match primitive_place_search(&m, &beta, &q_poly, &s, 8, &opts) {
                Ok(hits) => {
                    let expect: Vec<Place> = oracle.get(&q_poly).cloned().unwrap_or_default();
                    let got: Vec<Place> = hits.iter().map(|h| h.place.clone()).collect();
                    if got != expect {
                        violations.push(format!(
                            "scan and oracle disagree for Q = {q_poly}: {got:?} vs {expect:?}"
                        ));
                    }
                    if hits.is_empty() {
                        misses.push(q_poly.to_string());
                    }
                }
                Err(e) => {
                    mismatches += 1;
                    violations.push(format!("characterization mismatch: {e}"));
                }
            }
        }
    }
    if mismatches == 0 {
        println!("  criterion 8: characterization equivalence held on every scanned pair");
    }
    if !misses.is_empty() {
        violations.push(format!(
            "monic Q without a primitive place of degree <= 8: {}",
            misses.join(", ")
        ));
    }
    finish(8, "Schinzel primitive places", start, Some(Duration::from_secs(120)), violations);
}

/// 9. Mobius census: at all places of degree <= 3 for two modules, the
/// number of residue elements of exact order Q equals the
/// inclusion-exclusion sum over kernel sizes, exactly.
#[test]
fn criterion_09_mobius_census() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let f2 = prime_field(2);
    let f3 = prime_field(3);
    let modules = [
        DrinfeldModule::carlitz(&f2),
        DrinfeldModule::from_coeffs(vec![
            RatFunc::t(&f3),
            RatFunc::one(&f3),
            RatFunc::one(&f3),
        ])
        .unwrap(),
    ];
    for m in &modules {
        let field = m.field();
        for deg in 1..=3usize {
            for p_poly in Poly::monic_irreducibles(field, deg) {
                let v = Place::finite(p_poly).unwrap();
                if !m.good_reduction(&v).unwrap() {
                    continue;
                }
                let rm = m.reduce(&v).unwrap();
                let l = rm.residue_field().ext_degree();
                for qdeg in 0..=l {
                    for q_poly in Poly::all_monic(field, qdeg) {
                        let census: i64 = monic_divisors(&q_poly)
                            .unwrap()
                            .iter()
                            .map(|p| {
                                let mu = mobius(&q_poly.divrem(p).unwrap().0).unwrap() as i64;
                                mu * kernel_size(&rm, p).unwrap() as i64
                            })
                            .sum();
                        let direct = rm
                            .residue_field()
                            .elements()
                            .filter(|x| residue_order(&rm, x) == q_poly)
                            .count() as i64;
                        if census != direct {
                            violations.push(format!(
                                "census {census} != direct count {direct} at Q = {q_poly}, v = {v}, q = {}",
                                field.q()
                            ));
                        }
                    }
                }
            }
        }
    }
    finish(9, "Mobius census", start, None, violations);
}

/// 10. Siegel scan on Carlitz / beta = 1/t, alpha = 0, S = {(t), inf}: the
/// hit set for deg Q <= 6 is finite with no hits in degrees 3..6 (oracle:
/// per-Q valuation walk over the numerator support), and the torsion-target
/// variant alpha = t obeys |phi_Q(beta) - alpha|_w >= C_w |Q|_w on the same
/// range with the constant from the ideal generator.
#[test]
fn criterion_10_siegel_scan() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let field = prime_field(2);
    let m = DrinfeldModule::carlitz(&field);
    let beta = parse_ratfunc("1/t", &field).unwrap();
    let opts = HeightOpts::default();
    let s: BTreeSet<Place> = ["t", "inf"]
        .iter()
        .map(|p| parse_place(p, &field).unwrap())
        .collect();
    let scan = scan_siegel(&m, &beta, &RatFunc::zero(&field), &s, 6, &opts).unwrap();
    // oracle: phi_Q(beta) is S-integral for 0 iff its numerator has no
    // irreducible factor outside S (a zero of the value is a violation of
    // |phi_Q(beta) - 0|_v >= 1; poles are allowed since |alpha|_v <= 1 only
    // constrains the distance)
    for deg in 1..=6usize {
        for q_poly in Poly::all_monic(&field, deg) {
            let val = m.apply(&q_poly, &beta);
            let oracle_hit = support(&val).unwrap().iter().all(|v| {
                v.is_infinite() || s.contains(v) || ord(&val, v).unwrap() <= 0
            });
            let scan_hit = scan.hits.contains(&q_poly.to_string());
            if oracle_hit != scan_hit {
                violations.push(format!(
                    "scan/oracle disagree at Q = {q_poly}: scan {scan_hit}, oracle {oracle_hit}"
                ));
            }
            if (3..=6).contains(&deg) && scan_hit {
                violations.push(format!("unexpected hit at deg {deg}: Q = {q_poly}"));
            }
        }
    }
    // torsion-target variant: alpha = t (Carlitz torsion of order t)
    let alpha = RatFunc::t(&field);
    for w_str in ["t+1", "t^2+t+1", "t^3+t+1"] {
        let w = parse_place(w_str, &field).unwrap();
        let c_w = nice_trick_again_constant(&m, &beta, &alpha, &w, 6, &opts).unwrap();
        for deg in 1..=6usize {
            for q_poly in Poly::all_monic(&field, deg) {
                let diff = m.apply(&q_poly, &beta).sub(&alpha);
                let lhs = log_abs(&diff, &w).unwrap();
                let rhs = &c_w + &log_abs(&RatFunc::from_poly(q_poly.clone()), &w).unwrap();
                if lhs < rhs {
                    violations.push(format!(
                        "nice-trick-again bound fails at Q = {q_poly}, w = {w}: {lhs} < {rhs}"
                    ));
                }
            }
        }
    }
    // the scan result is a report, not a proven bound; record the summary
    let _ = is_s_integral(&beta, &alpha, &s).unwrap();
    finish(10, "Siegel scan", start, Some(Duration::from_secs(60)), violations);
}
