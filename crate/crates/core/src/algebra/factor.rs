//! Factorization over F_q[t]: squarefree decomposition, distinct-degree
//! splitting, then Cantor-Zassenhaus equal-degree splitting. Degrees below 4
//! take a deterministic trial-division path, so randomness only enters for
//! larger equal-degree blocks; the splitting source is a seedable SplitMix64.

use num_bigint::BigUint;
use num_traits::One as _;

use super::fq::{FieldRef, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// `lead * prod factors[i].0 ^ factors[i].1` with monic irreducible factors,
/// sorted in deglex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lead: FqElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn product(&self) -> Poly {
        let field = self.lead.field();
        let mut out = Poly::constant(self.lead.clone());
        for (f, m) in &self.factors {
            out = out.mul(&f.pow(*m as u64));
        }
        let _ = field;
        out
    }
}

/// Factor a nonzero polynomial with the default seed 0.
pub fn factor(f: &Poly) -> Result<Factorization> {
    factor_seeded(f, 0)
}

pub fn factor_seeded(f: &Poly, seed: u64) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroInput { op: "factor" });
    }
    let mut rng = SplitMix64::new(seed);
    let (monic, lead) = f.monic();
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    collect_squarefree(&monic, 1, &mut factors, &mut rng);
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    factors.sort_by(|a, b| a.0.cmp_deglex(&b.0));
    for (p, m) in factors {
        match merged.last_mut() {
            Some((lp, lm)) if *lp == p => *lm += m,
            _ => merged.push((p, m)),
        }
    }
    Ok(Factorization {
        lead,
        factors: merged,
    })
}

/// Squarefree decomposition in characteristic p. Factors whose multiplicity
/// is divisible by p survive in gcd(f, f') at full multiplicity; they are
/// collected by extracting a p-th root and recursing.
fn collect_squarefree(f: &Poly, mult: u32, out: &mut Vec<(Poly, u32)>, rng: &mut SplitMix64) {
    if f.is_constant() {
        return;
    }
    let deriv = f.derivative();
    if deriv.is_zero() {
        let root = pth_root_poly(f);
        collect_squarefree(&root, mult * f.field().p() as u32, out, rng);
        return;
    }
    let mut c = f.gcd(&deriv);
    let mut w = f.divrem(&c).unwrap().0;
    let mut i = 1u32;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let z = w.divrem(&y).unwrap().0;
        if !z.is_constant() {
            factor_squarefree(&z, mult * i, out, rng);
        }
        w = y;
        c = c.divrem(&w).unwrap().0;
        i += 1;
    }
    // what remains of c carries exactly the factors with p | multiplicity
    if !c.is_constant() {
        let root = pth_root_poly(&c);
        collect_squarefree(&root, mult * f.field().p() as u32, out, rng);
    }
}

/// p-th root of a polynomial whose derivative vanishes: exponents are
/// multiples of p and coefficients have p-th roots in F_q.
fn pth_root_poly(f: &Poly) -> Poly {
    let field = f.field();
    let p = field.p() as usize;
    let deg = f.degree().unwrap();
    let mut out = Vec::with_capacity(deg / p + 1);
    for i in (0..=deg).step_by(p) {
        out.push(f.coeff(i).pth_root());
    }
    Poly::new(field, out)
}

/// Factor a squarefree monic polynomial, pushing (factor, mult) pairs.
fn factor_squarefree(f: &Poly, mult: u32, out: &mut Vec<(Poly, u32)>, rng: &mut SplitMix64) {
    if f.is_constant() {
        return;
    }
    if f.degree().unwrap() < 4 {
        for p in trial_division(f) {
            out.push((p, mult));
        }
        return;
    }
    // distinct-degree splitting
    let field = f.field();
    let x = Poly::t(field);
    let mut h = x.clone(); // x^(q^d) mod f, iterated
    let mut rest = f.clone();
    let mut d = 0usize;
    while rest.degree().unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > rest.degree().unwrap() {
            // remainder is irreducible
            out.push((rest.clone(), mult));
            return;
        }
        h = frobenius_powmod(&h, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_constant() {
            equal_degree_split(&g, d, mult, out, rng);
            rest = rest.divrem(&g).unwrap().0;
            h = h.rem(&rest);
        }
    }
}

/// h^q mod f.
fn frobenius_powmod(h: &Poly, f: &Poly) -> Poly {
    let q = BigUint::from(h.field().q());
    h.pow_mod(&q, f)
}

/// Cantor-Zassenhaus split of a product of irreducibles of equal degree d.
fn equal_degree_split(f: &Poly, d: usize, mult: u32, out: &mut Vec<(Poly, u32)>, rng: &mut SplitMix64) {
    let n = f.degree().unwrap();
    if n == d {
        out.push((f.clone(), mult));
        return;
    }
    if n < 4 {
        for p in trial_division(f) {
            out.push((p, mult));
        }
        return;
    }
    let field = f.field();
    let q = field.q();
    loop {
        let w = random_poly_below(field, n, rng);
        if w.is_constant() {
            continue;
        }
        let g0 = w.gcd(f);
        if !g0.is_constant() && g0.degree() < f.degree() {
            let other = f.divrem(&g0).unwrap().0;
            equal_degree_split(&g0, d, mult, out, rng);
            equal_degree_split(&other, d, mult, out, rng);
            return;
        }
        let split = if q % 2 == 1 {
            // w^((q^d-1)/2) - 1
            let e = (BigUint::from(q).pow(d as u32) - BigUint::one()) >> 1;
            w.pow_mod(&e, f).sub(&Poly::one(field))
        } else {
            // trace map over F_2: sum_{i<e*d} w^(2^i) mod f
            let e2 = (field.degree() * d) as u32;
            let mut acc = w.clone().rem(f);
            let mut term = w.rem(f);
            for _ in 1..e2 {
                term = term.mul(&term).rem(f);
                acc = acc.add(&term);
            }
            acc
        };
        let g = split.gcd(f);
        if !g.is_constant() && g.degree() < f.degree() {
            let other = f.divrem(&g).unwrap().0;
            equal_degree_split(&g, d, mult, out, rng);
            equal_degree_split(&other, d, mult, out, rng);
            return;
        }
    }
}

fn random_poly_below(field: &FieldRef, deg_bound: usize, rng: &mut SplitMix64) -> Poly {
    let q = field.q();
    let coeffs: Vec<FqElem> = (0..deg_bound)
        .map(|_| field.from_index(rng.below(q)))
        .collect();
    Poly::new(field, coeffs)
}

/// Deterministic trial division for monic polynomials of degree <= 3.
fn trial_division(f: &Poly) -> Vec<Poly> {
    let field = f.field();
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut deg = 1usize;
    while rest.degree().map(|d| d >= 2 * deg).unwrap_or(false) {
        for cand in Poly::all_monic(field, deg) {
            loop {
                match rest.divrem(&cand) {
                    Some((q, r)) if r.is_zero() => {
                        // candidate divides; smaller candidates exhausted so
                        // it is irreducible
                        out.push(cand.clone());
                        rest = q;
                    }
                    _ => break,
                }
            }
        }
        deg += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push(rest);
    }
    out
}
