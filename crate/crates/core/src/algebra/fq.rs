//! The coefficient field F_q, q = p^e.
//!
//! Prime fields store residues directly; extension fields are F_p[g]/(m(g))
//! for an explicit monic irreducible modulus m supplied at construction.
//! No Conway-polynomial table is shipped.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Description of F_q = F_p[g]/(modulus). For e = 1 the modulus is the
/// identity modulus `g` and residues are plain integers mod p.
#[derive(Debug)]
pub struct FiniteField {
    p: u64,
    e: usize,
    /// monic, degree e, coefficients low-to-high over F_p
    modulus: Vec<u64>,
    q: u64,
}

pub type FieldRef = Arc<FiniteField>;

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FiniteField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- arithmetic on F_p[x] represented as raw Vec<u64>, used only for the
// ---- modulus layer (elements of F_q) --------------------------------------

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    fp_trim(&mut out);
    out
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut out);
    out
}

/// Remainder of a by the monic polynomial m.
fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1);
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let idx = shift + j;
                r[idx] = (r[idx] + p - (lead * mj) % p) % p;
            }
        }
        r.pop();
        fp_trim(&mut r);
    }
    r
}

/// Extended gcd over F_p[x]: returns (g, u) with u*a = g mod m, g = gcd(a, m).
fn fp_ext_gcd_mod(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    fp_trim(&mut r1);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // divide r0 by r1
        let mut rem = r0.clone();
        let mut quo: Vec<u64> = vec![0; rem.len().saturating_sub(r1.len()) + 1];
        let lead_inv = fp_inv_scalar(*r1.last().unwrap(), p);
        while rem.len() >= r1.len() && !rem.is_empty() {
            let shift = rem.len() - r1.len();
            let c = (*rem.last().unwrap() * lead_inv) % p;
            quo[shift] = c;
            for (j, &bj) in r1.iter().enumerate() {
                rem[shift + j] = (rem[shift + j] + p - (c * bj) % p) % p;
            }
            fp_trim(&mut rem);
        }
        fp_trim(&mut quo);
        let s_next = fp_sub(&s0, &fp_mul(&quo, &s1, p), p);
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s_next);
    }
    (r0, s0)
}

fn fp_inv_scalar(a: u64, p: u64) -> u64 {
    // Fermat
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

fn fp_pow_mod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = fp_rem(a, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = fp_rem(&fp_mul(&result, &base, p), m, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    result
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    fp_trim(&mut r0);
    fp_trim(&mut r1);
    while !r1.is_empty() {
        let lead_inv = fp_inv_scalar(*r1.last().unwrap(), p);
        let mut rem = r0.clone();
        while rem.len() >= r1.len() && !rem.is_empty() {
            let shift = rem.len() - r1.len();
            let c = (*rem.last().unwrap() * lead_inv) % p;
            for (j, &bj) in r1.iter().enumerate() {
                rem[shift + j] = (rem[shift + j] + p - (c * bj) % p) % p;
            }
            fp_trim(&mut rem);
        }
        r0 = std::mem::replace(&mut r1, rem);
    }
    r0
}

/// Rabin test over F_p for the extension modulus.
fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    // x^(p^n) == x mod f
    let mut xp = x.clone();
    for _ in 0..n {
        xp = fp_pow_mod(&xp, p as u128, f, p);
    }
    if fp_rem(&fp_sub(&xp, &x, p), f, p) != Vec::<u64>::new() {
        return false;
    }
    // for each prime r | n: gcd(x^(p^(n/r)) - x, f) must be constant
    let mut n_rest = n;
    let mut r = 2;
    let mut prime_divs = Vec::new();
    while r * r <= n_rest {
        if n_rest % r == 0 {
            prime_divs.push(r);
            while n_rest % r == 0 {
                n_rest /= r;
            }
        }
        r += 1;
    }
    if n_rest > 1 {
        prime_divs.push(n_rest);
    }
    for r in prime_divs {
        let k = n / r;
        let mut xk = x.clone();
        for _ in 0..k {
            xk = fp_pow_mod(&xk, p as u128, f, p);
        }
        let g = fp_gcd(&fp_sub(&xk, &x, p), f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl FiniteField {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Arc::new(FiniteField {
            p,
            e: 1,
            modulus: vec![0, 1],
            q: p,
        }))
    }

    /// F_{p^e} with an explicit monic irreducible modulus over F_p,
    /// coefficients low-to-high in the generator g.
    pub fn extension(p: u64, modulus: Vec<u64>) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        fp_trim(&mut m);
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(Error::BadModulus);
        }
        if !fp_is_irreducible(&m, p) {
            return Err(Error::BadModulus);
        }
        let e = m.len() - 1;
        if e == 1 {
            // a degree-1 modulus is just F_p in disguise; normalize
            return FiniteField::prime(p);
        }
        if e > MAX_EXT_DEGREE {
            return Err(Error::GuardExceeded {
                what: "extension degree e",
                limit: MAX_EXT_DEGREE as u64,
            });
        }
        let mut q: u64 = 1;
        for _ in 0..e {
            q = q.checked_mul(p).ok_or(Error::GuardExceeded {
                what: "field size q",
                limit: u64::MAX,
            })?;
        }
        if q > 1 << 30 {
            return Err(Error::GuardExceeded {
                what: "field size q",
                limit: 1 << 30,
            });
        }
        Ok(Arc::new(FiniteField { p, e, modulus: m, q }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn pack(self: &Arc<Self>, digits: &[u64]) -> FqElem {
        debug_assert!(digits.len() <= MAX_EXT_DEGREE);
        let mut buf = [0u64; MAX_EXT_DEGREE];
        let mut len = 0u8;
        for (i, &d) in digits.iter().enumerate() {
            buf[i] = d;
            if d != 0 {
                len = (i + 1) as u8;
            }
        }
        FqElem {
            field: Arc::clone(self),
            len,
            buf,
        }
    }

    pub fn zero(self: &Arc<Self>) -> FqElem {
        self.pack(&[])
    }

    pub fn one(self: &Arc<Self>) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FqElem {
        let p = self.p as i64;
        let r = ((n % p) + p) % p;
        self.pack(&[r as u64])
    }

    /// Element from generator-polynomial coefficients (low-to-high).
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u64]) -> FqElem {
        let c: Vec<u64> = coeffs.iter().map(|x| x % self.p).collect();
        let c = fp_rem(&c, &self.modulus, self.p);
        self.pack(&c)
    }

    /// The class of the generator g (only meaningful for e > 1).
    pub fn generator(self: &Arc<Self>) -> FqElem {
        self.from_coeffs(&[0, 1])
    }

    /// Element with the given enumeration index in 0..q (base-p digits).
    pub fn from_index(self: &Arc<Self>, idx: u64) -> FqElem {
        let mut buf = [0u64; MAX_EXT_DEGREE];
        let mut len = 0u8;
        let mut v = idx % self.q;
        let mut i = 0;
        while v > 0 {
            buf[i] = v % self.p;
            if buf[i] != 0 {
                len = (i + 1) as u8;
            }
            v /= self.p;
            i += 1;
        }
        FqElem {
            field: Arc::clone(self),
            len,
            buf,
        }
    }

    /// All q elements, in index order.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FqElem> + '_ {
        let f = Arc::clone(self);
        (0..self.q).map(move |i| f.from_index(i))
    }
}

/// Residues live inline: extension degrees are capped at 4, which covers
/// every field this artifact touches and keeps elements allocation-free.
pub(crate) const MAX_EXT_DEGREE: usize = 4;

/// An element of F_q: residue polynomial in g of degree < e, trailing zeros
/// trimmed so equality is structural.
#[derive(Clone, Debug)]
pub struct FqElem {
    field: FieldRef,
    len: u8,
    buf: [u64; MAX_EXT_DEGREE],
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs() == other.coeffs()
            && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}
impl Eq for FqElem {}

impl std::hash::Hash for FqElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs().hash(state);
    }
}

impl FqElem {
    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.len == 0
    }

    pub fn is_one(&self) -> bool {
        self.len == 1 && self.buf[0] == 1
    }

    /// Residue coefficients, low-to-high (empty = zero).
    pub fn coeffs(&self) -> &[u64] {
        &self.buf[..self.len as usize]
    }

    /// Enumeration index: sum of c_i p^i.
    pub fn index(&self) -> u64 {
        let mut v = 0u64;
        for &ci in self.coeffs().iter().rev() {
            v = v * self.field.p + ci;
        }
        v
    }

    fn assert_same_field(&self, other: &FqElem) {
        debug_assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field == other.field,
            "finite field mismatch"
        );
    }

    fn retrim(&mut self) {
        let mut len = 0u8;
        for (i, &d) in self.buf.iter().enumerate() {
            if d != 0 {
                len = (i + 1) as u8;
            }
        }
        self.len = len;
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        self.assert_same_field(other);
        let p = self.field.p;
        let mut out = self.clone();
        for i in 0..other.len as usize {
            out.buf[i] = (out.buf[i] + other.buf[i]) % p;
        }
        out.retrim();
        out
    }

    pub fn sub(&self, other: &FqElem) -> FqElem {
        self.assert_same_field(other);
        let p = self.field.p;
        let mut out = self.clone();
        for i in 0..other.len as usize {
            out.buf[i] = (out.buf[i] + p - other.buf[i]) % p;
        }
        out.retrim();
        out
    }

    pub fn neg(&self) -> FqElem {
        let p = self.field.p;
        let mut out = self.clone();
        for d in &mut out.buf {
            *d = (p - *d) % p;
        }
        out.retrim();
        out
    }

    pub fn mul(&self, other: &FqElem) -> FqElem {
        self.assert_same_field(other);
        let p = self.field.p;
        if self.len == 0 || other.len == 0 {
            return self.field.zero();
        }
        // convolution then reduction; degree < 2 * MAX_EXT_DEGREE
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE];
        for i in 0..self.len as usize {
            if self.buf[i] == 0 {
                continue;
            }
            for j in 0..other.len as usize {
                prod[i + j] = (prod[i + j] + self.buf[i] * other.buf[j]) % p;
            }
        }
        let e = self.field.e;
        if e == 1 {
            return self.field.pack(&prod[..1]);
        }
        // reduce modulo the monic modulus of degree e
        let modulus = &self.field.modulus;
        let mut top = self.len as usize + other.len as usize - 1;
        while top > e {
            top -= 1;
            let lead = prod[top];
            if lead != 0 {
                prod[top] = 0;
                let shift = top - e;
                for (k, &mk) in modulus.iter().enumerate().take(e) {
                    prod[shift + k] = (prod[shift + k] + p * p - lead * mk % p) % p;
                }
            }
        }
        self.field.pack(&prod[..e])
    }

    pub fn inv(&self) -> Result<FqElem> {
        if self.is_zero() {
            return Err(Error::ZeroInput { op: "inverse" });
        }
        let p = self.field.p;
        let (g, u) = fp_ext_gcd_mod(self.coeffs(), &self.field.modulus, p);
        debug_assert_eq!(g.len(), 1);
        let ginv = fp_inv_scalar(g[0], p);
        let c: Vec<u64> = u.iter().map(|&x| x * ginv % p).collect();
        let c = fp_rem(&c, &self.field.modulus, p);
        Ok(self.field.pack(&c))
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.field.p)
    }

    /// p-th root (inverse Frobenius): x^(p^(e-1)).
    pub fn pth_root(&self) -> FqElem {
        let mut out = self.clone();
        for _ in 0..self.field.e.saturating_sub(1) {
            out = out.frobenius();
        }
        out
    }

    /// Whether this element lies in the prime field.
    pub fn is_prime_field(&self) -> bool {
        self.len <= 1
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.len == 1 {
            return write!(f, "{}", self.buf[0]);
        }
        let mut first = true;
        for (k, &ck) in self.coeffs().iter().enumerate().rev() {
            if ck == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, ck) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "g")?,
                (1, c) => write!(f, "{c}*g")?,
                (k, 1) => write!(f, "g^{k}")?,
                (k, c) => write!(f, "{c}*g^{k}")?,
            }
        }
        Ok(())
    }
}
