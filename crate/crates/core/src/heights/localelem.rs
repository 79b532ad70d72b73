//! Windowed elements of the completion K_v, used to observe valuations of
//! phi_t-orbits without exact rational iteration (whose degrees grow like
//! q^(dn)).
//!
//! At a finite place (P) a value is written P^ord * u with u invertible in
//! F_q[t]/(P^prec); at infinity it is s^ord * u(s) with s = 1/t and u a unit
//! power series truncated mod s^prec. Digits inside the window are exact, so
//! a reported ord is exact; when cancellation eats the whole window the
//! element degrades to a lower bound on ord.

use crate::algebra::fq::FieldRef;
use crate::algebra::place::{Place, PlaceKind};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;

/// Per-place context: uniformizer powers and the window size.
pub struct LocalCtx {
    field: FieldRef,
    place: Place,
    window: usize,
    /// P^0..P^window at a finite place; empty at infinity
    p_pows: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalElem {
    Zero,
    /// pi^ord * (unit + O(pi^prec)), pi does not divide unit, prec >= 1
    Val { ord: i64, unit: Poly, prec: usize },
    /// all windowed digits cancelled; only ord >= min_ord is known
    Unknown { min_ord: i64 },
}

impl LocalCtx {
    pub fn new(field: &FieldRef, place: &Place, window: usize) -> LocalCtx {
        assert!(window >= 1);
        let p_pows = match place.kind() {
            PlaceKind::Infinity => Vec::new(),
            PlaceKind::Finite(p) => {
                let mut pows = Vec::with_capacity(window + 1);
                let mut acc = Poly::one(field);
                pows.push(acc.clone());
                for _ in 0..window {
                    acc = acc.mul(p);
                    pows.push(acc.clone());
                }
                pows
            }
        };
        LocalCtx {
            field: field.clone(),
            place: place.clone(),
            window,
            p_pows,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    fn is_infinite(&self) -> bool {
        self.place.is_infinite()
    }

    /// Reduce a raw unit representative mod pi^prec.
    fn reduce_unit(&self, u: &Poly, prec: usize) -> Poly {
        if self.is_infinite() {
            Poly::new(
                self.field(),
                u.coeffs().iter().take(prec).cloned().collect(),
            )
        } else {
            u.rem(&self.p_pows[prec])
        }
    }

    fn field(&self) -> &FieldRef {
        &self.field
    }

    /// Multiplicity of pi in u, up to cap.
    fn pi_multiplicity(&self, u: &Poly, cap: usize) -> (usize, Poly) {
        if self.is_infinite() {
            let mut k = 0;
            while k < cap && u.coeff(k).is_zero() {
                k += 1;
            }
            if k == 0 {
                return (0, u.clone());
            }
            let shifted = Poly::new(
                self.field(),
                u.coeffs().iter().skip(k).cloned().collect(),
            );
            (k, shifted)
        } else {
            let p = self.place.prime().unwrap();
            let mut k = 0;
            let mut cur = u.clone();
            while k < cap {
                match cur.divrem(p) {
                    Some((q, r)) if r.is_zero() => {
                        cur = q;
                        k += 1;
                    }
                    _ => break,
                }
            }
            (k, cur)
        }
    }

    /// Exact embedding of a rational function, tracked to the full window.
    pub fn from_ratfunc(&self, x: &RatFunc) -> LocalElem {
        if x.is_zero() {
            return LocalElem::Zero;
        }
        let w = self.window;
        if self.is_infinite() {
            let dn = x.num().degree().unwrap();
            let dd = x.den().degree().unwrap();
            let ord = dd as i64 - dn as i64;
            // reverse both components: constant terms become the leads
            let rev = |p: &Poly| {
                let d = p.degree().unwrap();
                Poly::new(
                    self.field(),
                    (0..=d).map(|i| p.coeff(d - i)).collect(),
                )
            };
            let rnum = rev(x.num());
            let rden = rev(x.den());
            let inv = series_inverse(&rden, w);
            let unit = self.reduce_unit(&rnum.mul(&inv), w);
            debug_assert!(!unit.coeff(0).is_zero());
            LocalElem::Val { ord, unit, prec: w }
        } else {
            let p = self.place.prime().unwrap();
            let (kn, num1) = {
                let m = x.num().multiplicity(p).unwrap();
                let mut cur = x.num().clone();
                for _ in 0..m {
                    cur = cur.divrem(p).unwrap().0;
                }
                (m as i64, cur)
            };
            let (kd, den1) = {
                let m = x.den().multiplicity(p).unwrap();
                let mut cur = x.den().clone();
                for _ in 0..m {
                    cur = cur.divrem(p).unwrap().0;
                }
                (m as i64, cur)
            };
            let modulus = &self.p_pows[w];
            let (g, u, _) = den1.ext_gcd(modulus);
            debug_assert!(g.is_one());
            let unit = num1.mul(&u).rem(modulus);
            LocalElem::Val {
                ord: kn - kd,
                unit,
                prec: w,
            }
        }
    }

    pub fn add(&self, a: &LocalElem, b: &LocalElem) -> LocalElem {
        use LocalElem::*;
        match (a, b) {
            (Zero, x) | (x, Zero) => x.clone(),
            (Unknown { min_ord: ma }, Unknown { min_ord: mb }) => Unknown {
                min_ord: *ma.min(mb),
            },
            (Unknown { min_ord }, Val { ord, unit, prec })
            | (Val { ord, unit, prec }, Unknown { min_ord }) => {
                if *ord >= *min_ord {
                    Unknown { min_ord: *min_ord }
                } else {
                    // the known part dominates; digits survive up to min_ord
                    let keep = ((*min_ord - *ord) as usize).min(*prec);
                    debug_assert!(keep >= 1);
                    Val {
                        ord: *ord,
                        unit: self.reduce_unit(unit, keep),
                        prec: keep,
                    }
                }
            }
            (
                Val {
                    ord: oa,
                    unit: ua,
                    prec: pa,
                },
                Val {
                    ord: ob,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let (oa, ua, pa, ob, ub, pb) = if oa <= ob {
                    (*oa, ua, *pa, *ob, ub, *pb)
                } else {
                    (*ob, ub, *pb, *oa, ua, *pa)
                };
                let delta = (ob - oa) as usize;
                let wn = pa.min(delta + pb);
                if delta >= wn {
                    // b is invisible inside the window
                    return Val {
                        ord: oa,
                        unit: self.reduce_unit(ua, wn),
                        prec: wn,
                    };
                }
                let shifted = if self.is_infinite() {
                    ub.shift(delta)
                } else {
                    ub.mul(&self.p_pows[delta])
                };
                let sum = self.reduce_unit(&ua.add(&shifted), wn);
                let (k, stripped) = self.pi_multiplicity(&sum, wn);
                if k >= wn || stripped.is_zero() {
                    Unknown {
                        min_ord: oa + wn as i64,
                    }
                } else {
                    Val {
                        ord: oa + k as i64,
                        unit: stripped,
                        prec: wn - k,
                    }
                }
            }
        }
    }

    pub fn mul(&self, a: &LocalElem, b: &LocalElem) -> LocalElem {
        use LocalElem::*;
        match (a, b) {
            (Zero, _) | (_, Zero) => Zero,
            (Unknown { min_ord: ma }, Unknown { min_ord: mb }) => Unknown {
                min_ord: *ma + *mb,
            },
            (Unknown { min_ord }, Val { ord, .. }) | (Val { ord, .. }, Unknown { min_ord }) => {
                Unknown {
                    min_ord: *min_ord + *ord,
                }
            }
            (
                Val {
                    ord: oa,
                    unit: ua,
                    prec: pa,
                },
                Val {
                    ord: ob,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let prec = *pa.min(pb);
                Val {
                    ord: oa + ob,
                    unit: self.reduce_unit(&ua.mul(ub), prec),
                    prec,
                }
            }
        }
    }

    /// x^(q^k): Frobenius is additive in characteristic p, so digits improve;
    /// precision is capped back at the window.
    pub fn pow_q(&self, a: &LocalElem, k: u32) -> LocalElem {
        use LocalElem::*;
        if k == 0 {
            return a.clone();
        }
        let q = self.field.q();
        let qk = (q as i128).pow(k);
        match a {
            Zero => Zero,
            Unknown { min_ord } => Unknown {
                min_ord: clamp_i128(*min_ord as i128 * qk),
            },
            Val { ord, unit, prec } => {
                let new_prec = (*prec as i128 * qk).min(self.window as i128) as usize;
                let mut u = unit.clone();
                for _ in 0..k {
                    u = self.reduce_unit(&u.pow_q(1), new_prec);
                }
                Val {
                    ord: clamp_i128(*ord as i128 * qk),
                    unit: u,
                    prec: new_prec,
                }
            }
        }
    }
}

fn clamp_i128(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

impl LocalElem {
    /// Exact ord when known; None for exact zero (infinite valuation).
    pub fn ord(&self) -> Option<i64> {
        match self {
            LocalElem::Val { ord, .. } => Some(*ord),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, LocalElem::Unknown { .. })
    }

    pub fn min_ord(&self) -> Option<i64> {
        match self {
            LocalElem::Val { ord, .. } => Some(*ord),
            LocalElem::Unknown { min_ord } => Some(*min_ord),
            LocalElem::Zero => None,
        }
    }
}

/// Inverse of a power series with nonzero constant term, mod s^w.
fn series_inverse(d: &Poly, w: usize) -> Poly {
    let field = d.field();
    let c0_inv = d.coeff(0).inv().expect("unit constant term");
    let mut inv = vec![field.zero(); w];
    inv[0] = c0_inv.clone();
    for k in 1..w {
        let mut acc = field.zero();
        for j in 1..=k {
            let dj = d.coeff(j);
            if dj.is_zero() {
                continue;
            }
            acc = acc.add(&dj.mul(&inv[k - j]));
        }
        inv[k] = acc.neg().mul(&c0_inv);
    }
    Poly::new(field, inv)
}
