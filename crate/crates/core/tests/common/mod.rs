//! Shared generators for the integration suites: seeded random polynomials,
//! rational functions and Drinfeld modules over small fields.

use drinfeld_heights::algebra::{FieldRef, FiniteField, Poly, RatFunc};
use drinfeld_heights::drinfeld::DrinfeldModule;
use drinfeld_heights::rng::SplitMix64;

pub fn prime_field(p: u64) -> FieldRef {
    FiniteField::prime(p).unwrap()
}

pub fn f4() -> FieldRef {
    FiniteField::extension(2, vec![1, 1, 1]).unwrap()
}

/// Random polynomial of exactly the given degree (monic when `monic`).
pub fn rand_poly(field: &FieldRef, deg: usize, monic: bool, rng: &mut SplitMix64) -> Poly {
    let q = field.q();
    let mut c: Vec<_> = (0..=deg).map(|_| field.from_index(rng.below(q))).collect();
    if monic {
        c[deg] = field.one();
    } else if c[deg].is_zero() {
        c[deg] = field.from_index(1 + rng.below(q - 1));
    }
    Poly::new(field, c)
}

/// Random nonzero rational function with components of degree <= deg_max.
pub fn rand_ratfunc(field: &FieldRef, deg_max: usize, rng: &mut SplitMix64) -> RatFunc {
    let num = rand_poly(field, rng.below(deg_max as u64 + 1) as usize, false, rng);
    let den = rand_poly(field, rng.below(deg_max as u64 + 1) as usize, false, rng);
    RatFunc::new(num, den).unwrap()
}

/// Random Drinfeld module of the given rank with polynomial coefficients of
/// degree <= coeff_deg (so all finite places have integral coefficients).
pub fn rand_module(
    field: &FieldRef,
    rank: usize,
    coeff_deg: usize,
    rng: &mut SplitMix64,
) -> DrinfeldModule {
    let mut coeffs = vec![RatFunc::t(field)];
    for i in 1..=rank {
        let deg = rng.below(coeff_deg as u64 + 1) as usize;
        let mut p = rand_poly(field, deg, false, rng);
        if i == rank && p.is_zero() {
            p = Poly::one(field);
        }
        coeffs.push(RatFunc::from_poly(p));
    }
    DrinfeldModule::from_coeffs(coeffs).unwrap()
}
