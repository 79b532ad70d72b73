//! Dense polynomials over F_q in the variable t, the ring A = F_q[t].

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero as _;

use super::fq::{FieldRef, FqElem};
use crate::error::{Error, Result};

/// Element of F_q[t]; coefficients low-to-high, highest index nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: FieldRef,
    c: Vec<FqElem>,
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl Poly {
    pub fn new(field: &FieldRef, mut coeffs: Vec<FqElem>) -> Poly {
        while coeffs.last().map(|x| x.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Poly {
            field: Arc::clone(field),
            c: coeffs,
        }
    }

    pub fn zero(field: &FieldRef) -> Poly {
        Poly {
            field: Arc::clone(field),
            c: Vec::new(),
        }
    }

    pub fn one(field: &FieldRef) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: FqElem) -> Poly {
        let field = Arc::clone(c.field());
        Poly::new(&field, vec![c])
    }

    /// The variable t.
    pub fn t(field: &FieldRef) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    /// Convenience for tests and parsing: coefficients as integers, low-to-high.
    pub fn from_ints(field: &FieldRef, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.c
    }

    pub fn lead(&self) -> Option<&FqElem> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().map(|x| x.is_one()).unwrap_or(false)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if let (Some(a), Some(b)) = (self.raw(), other.raw()) {
            let p = self.field.p();
            let mut out = vec![0u64; a.len().max(b.len())];
            for (i, o) in out.iter_mut().enumerate() {
                *o = (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p;
            }
            return Poly::from_raw(&self.field, out);
        }
        let n = self.c.len().max(other.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::new(&self.field, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        if let (Some(a), Some(b)) = (self.raw(), other.raw()) {
            let p = self.field.p();
            let mut out = vec![0u64; a.len().max(b.len())];
            for (i, o) in out.iter_mut().enumerate() {
                *o = (a.get(i).copied().unwrap_or(0) + p
                    - b.get(i).copied().unwrap_or(0))
                    % p;
            }
            return Poly::from_raw(&self.field, out);
        }
        let n = self.c.len().max(other.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).sub(&other.coeff(i)));
        }
        Poly::new(&self.field, out)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| x.neg()).collect())
    }

    /// Raw prime-field residues, available when e = 1; the hot paths below
    /// run on these buffers without per-coefficient allocation.
    fn raw(&self) -> Option<Vec<u64>> {
        if self.field.degree() != 1 {
            return None;
        }
        Some(
            self.c
                .iter()
                .map(|x| x.coeffs().first().copied().unwrap_or(0))
                .collect(),
        )
    }

    fn from_raw(field: &FieldRef, mut raw: Vec<u64>) -> Poly {
        while raw.last() == Some(&0) {
            raw.pop();
        }
        Poly {
            field: Arc::clone(field),
            c: raw.into_iter().map(|x| field.from_int(x as i64)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        if let (Some(a), Some(b)) = (self.raw(), other.raw()) {
            let p = self.field.p();
            let mut out = vec![0u64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    if y != 0 {
                        out[i + j] = (out[i + j] + x * y) % p;
                    }
                }
            }
            return Poly::from_raw(&self.field, out);
        }
        let mut out = vec![self.field.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(&self.field, out)
    }

    pub fn mul_scalar(&self, s: &FqElem) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| x.mul(s)).collect())
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![self.field.zero(); k];
        out.extend(self.c.iter().cloned());
        Poly::new(&self.field, out)
    }

    /// Quotient and remainder; None when `d` is zero.
    pub fn divrem(&self, d: &Poly) -> Option<(Poly, Poly)> {
        let dd = d.degree()?;
        if let (Some(a), Some(b)) = (self.raw(), d.raw()) {
            let p = self.field.p();
            let (q, r) = raw_divrem(&a, &b, p);
            return Some((
                Poly::from_raw(&self.field, q),
                Poly::from_raw(&self.field, r),
            ));
        }
        let lead_inv = d.lead().unwrap().inv().ok()?;
        let mut rem = self.c.clone();
        let mut quo = vec![self.field.zero(); self.c.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let factor = rem[k].mul(&lead_inv);
            if !factor.is_zero() {
                let shift = k - dd;
                quo[shift] = factor.clone();
                for (j, dj) in d.c.iter().enumerate() {
                    rem[shift + j] = rem[shift + j].sub(&factor.mul(dj));
                }
            }
            rem.pop();
            while rem.last().map(|x| x.is_zero()).unwrap_or(false) {
                rem.pop();
            }
        }
        Some((Poly::new(&self.field, quo), Poly::new(&self.field, rem)))
    }

    pub fn rem(&self, m: &Poly) -> Poly {
        self.divrem(m).expect("nonzero modulus").1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        match other.divrem(self) {
            Some((_, r)) => r.is_zero(),
            None => false,
        }
    }

    /// Monic gcd (gcd(0,0) = 0).
    pub fn gcd(&self, other: &Poly) -> Poly {
        if let (Some(mut a), Some(mut b)) = (self.raw(), other.raw()) {
            let p = self.field.p();
            while !b.is_empty() {
                let r = raw_divrem(&a, &b, p).1;
                a = std::mem::replace(&mut b, r);
            }
            if let Some(&lead) = a.last() {
                let inv = raw_inv_scalar(lead, p);
                for x in &mut a {
                    *x = *x * inv % p;
                }
            }
            return Poly::from_raw(&self.field, a);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).unwrap().1;
            a = std::mem::replace(&mut b, r);
        }
        a.monic().0
    }

    /// Extended gcd: (g, u, v) with u*self + v*other = g, g monic (or zero).
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if let Some(lead) = r0.lead() {
            let inv = lead.inv().unwrap();
            return (r0.mul_scalar(&inv), s0.mul_scalar(&inv), t0.mul_scalar(&inv));
        }
        (r0, s0, t0)
    }

    /// Splits into (monic part, leading coefficient).
    pub fn monic(&self) -> (Poly, FqElem) {
        match self.lead() {
            None => (self.clone(), self.field.zero()),
            Some(l) => {
                let inv = l.inv().unwrap();
                (self.mul_scalar(&inv), l.clone())
            }
        }
    }

    pub fn pow(&self, e: u64) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut base = self.rem(m);
        let mut e = e.clone();
        while !e.is_zero() {
            if e.bit(0) {
                result = result.mul(&base).rem(m);
            }
            e >>= 1;
            if !e.is_zero() {
                base = base.mul(&base).rem(m);
            }
        }
        result
    }

    /// q^k-th power via the sparse Frobenius map: (sum c_i t^i)^(q^k) =
    /// sum c_i t^(i q^k), since c^q = c on F_q.
    pub fn pow_q(&self, k: u32) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let q = self.field.q();
        let step = (q as u128).pow(k);
        let deg = self.c.len() - 1;
        let out_len = (deg as u128) * step + 1;
        let mut out = vec![self.field.zero(); out_len as usize];
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                out[(i as u128 * step) as usize] = a.clone();
            }
        }
        Poly::new(&self.field, out)
    }

    pub fn eval(&self, x: &FqElem) -> FqElem {
        let mut acc = self.field.zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let p = self.field.p();
        let out: Vec<FqElem> = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let m = (i as u64) % p;
                c.mul(&self.field.from_int(m as i64))
            })
            .collect();
        Poly::new(&self.field, out)
    }

    /// Rabin irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let q = BigUint::from(self.field.q());
        let x = Poly::t(&self.field);
        let qn = q.pow(n as u32);
        if x.pow_mod(&qn, self).sub(&x.rem(self)).rem(self) != Poly::zero(&self.field) {
            return false;
        }
        let mut rest = n;
        let mut primes = Vec::new();
        let mut r = 2;
        while r * r <= rest {
            if rest % r == 0 {
                primes.push(r);
                while rest % r == 0 {
                    rest /= r;
                }
            }
            r += 1;
        }
        if rest > 1 {
            primes.push(rest);
        }
        for r in primes {
            let qk = q.pow((n / r) as u32);
            let g = x.pow_mod(&qk, self).sub(&x).gcd(self);
            if !g.is_constant() {
                return false;
            }
        }
        true
    }

    /// Enumeration index used for the deterministic (degree, lex) order:
    /// sum of coeff_index(i) * q^i.
    fn coeff_key(&self) -> Vec<u64> {
        self.c.iter().rev().map(|x| x.index()).collect()
    }

    /// Deterministic total order: by degree, then lexicographic on
    /// coefficients from the highest power down.
    pub fn cmp_deglex(&self, other: &Poly) -> Ordering {
        match self.c.len().cmp(&other.c.len()) {
            Ordering::Equal => self.coeff_key().cmp(&other.coeff_key()),
            o => o,
        }
    }
}

fn raw_inv_scalar(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// School division on raw prime-field buffers (b nonzero, trimmed).
fn raw_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    debug_assert!(!b.is_empty());
    let db = b.len() - 1;
    let mut rem: Vec<u64> = a.to_vec();
    while rem.last() == Some(&0) {
        rem.pop();
    }
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let lead_inv = raw_inv_scalar(b[db], p);
    let mut quo = vec![0u64; rem.len() - db];
    while rem.len() > db {
        let k = rem.len() - 1;
        let c = rem[k] * lead_inv % p;
        if c != 0 {
            let shift = k - db;
            quo[shift] = c;
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    rem[shift + j] = (rem[shift + j] + p - c * bj % p) % p;
                }
            }
        }
        rem.pop();
        while rem.last() == Some(&0) {
            rem.pop();
        }
    }
    (quo, rem)
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_deglex(other)
    }
}

impl Poly {

    /// All monic polynomials of exactly the given degree, in deglex order.
    pub fn all_monic(field: &FieldRef, deg: usize) -> Vec<Poly> {
        let q = field.q();
        let count = (q as u128).pow(deg as u32);
        assert!(count <= 1 << 24, "monic enumeration too large");
        let mut out = Vec::with_capacity(count as usize);
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(deg + 1);
            let mut v = idx;
            for _ in 0..deg {
                coeffs.push(field.from_index((v % q as u128) as u64));
                v /= q as u128;
            }
            coeffs.push(field.one());
            out.push(Poly::new(field, coeffs));
        }
        out.sort_by(|a, b| a.cmp_deglex(b));
        out
    }

    /// Monic irreducible polynomials of exactly the given degree, deglex order.
    pub fn monic_irreducibles(field: &FieldRef, deg: usize) -> Vec<Poly> {
        Poly::all_monic(field, deg)
            .into_iter()
            .filter(|f| f.is_irreducible())
            .collect()
    }

    /// Multiplicity of the (nonzero, nonconstant) divisor d in self.
    pub fn multiplicity(&self, d: &Poly) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroInput { op: "multiplicity" });
        }
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divrem(d).ok_or(Error::ZeroInput { op: "multiplicity" })?;
            if r.is_zero() {
                k += 1;
                cur = q;
            } else {
                return Ok(k);
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = c.to_string();
            let coeff_part = if c.is_prime_field() {
                cs
            } else {
                format!("({cs})")
            };
            match k {
                0 => write!(f, "{coeff_part}")?,
                1 if c.is_one() => write!(f, "t")?,
                1 => write!(f, "{coeff_part}*t")?,
                k if c.is_one() => write!(f, "t^{k}")?,
                k => write!(f, "{coeff_part}*t^{k}")?,
            }
        }
        Ok(())
    }
}
