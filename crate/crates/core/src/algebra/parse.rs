//! Text grammar for polynomials, rational functions and places.
//!
//! Terms `c*t^k` joined by `+` (or `-`); the coefficient is an integer over a
//! prime field or a parenthesized generator polynomial like `(g^2+1)` over an
//! extension field. Rational functions are `num/den` with optional parentheses
//! around either side. Place literals are `inf` or a monic irreducible
//! polynomial. All errors carry the byte position they were raised at.

use super::fq::{FieldRef, FqElem};
use super::place::Place;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            _ => Err(self.error(format!("expected `{}`", c as char))),
        }
    }

    fn error(&self, msg: String) -> Error {
        Error::Parse {
            pos: self.pos.min(self.bytes.len()),
            msg,
        }
    }

    fn parse_uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("number too large".into()))
    }

    /// Power of a single named variable: `v`, `v^3`.
    fn parse_var_pow(&mut self, var: u8) -> Result<u64> {
        self.expect(var)?;
        if self.peek() == Some(b'^') {
            self.bump();
            self.parse_uint()
        } else {
            Ok(1)
        }
    }
}

/// Generator polynomial (in `g`) used as an extension-field coefficient.
fn parse_gpoly(cur: &mut Cursor, field: &FieldRef) -> Result<FqElem> {
    let mut acc = field.zero();
    let mut sign = 1i64;
    loop {
        let mut coeff: i64 = sign;
        let mut has_coeff = false;
        if matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = sign * cur.parse_uint()? as i64;
            has_coeff = true;
        }
        let mut pow = 0u64;
        let mut has_var = false;
        if has_coeff && cur.peek() == Some(b'*') {
            cur.bump();
            pow = cur.parse_var_pow(b'g')?;
            has_var = true;
        } else if cur.peek() == Some(b'g') {
            pow = cur.parse_var_pow(b'g')?;
            has_var = true;
        }
        if !has_coeff && !has_var {
            return Err(cur.error("expected a coefficient term".into()));
        }
        let mut term = vec![0u64; pow as usize + 1];
        let p = field.p() as i64;
        term[pow as usize] = (((coeff % p) + p) % p) as u64;
        acc = acc.add(&field.from_coeffs(&term));
        match cur.peek() {
            Some(b'+') => {
                cur.bump();
                sign = 1;
            }
            Some(b'-') => {
                cur.bump();
                sign = -1;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_coeff(cur: &mut Cursor, field: &FieldRef) -> Result<FqElem> {
    match cur.peek() {
        Some(b'(') => {
            cur.bump();
            let e = parse_gpoly(cur, field)?;
            cur.expect(b')')?;
            Ok(e)
        }
        Some(b'g') => {
            let pow = cur.parse_var_pow(b'g')?;
            let mut term = vec![0u64; pow as usize + 1];
            term[pow as usize] = 1;
            Ok(field.from_coeffs(&term))
        }
        Some(c) if c.is_ascii_digit() => Ok(field.from_int(cur.parse_uint()? as i64)),
        _ => Err(cur.error("expected a coefficient".into())),
    }
}

fn parse_poly_body(cur: &mut Cursor, field: &FieldRef) -> Result<Poly> {
    let mut acc = Poly::zero(field);
    let mut negate = false;
    loop {
        let (coeff, pow) = match cur.peek() {
            Some(b't') => (field.one(), cur.parse_var_pow(b't')?),
            Some(_) => {
                let c = parse_coeff(cur, field)?;
                if cur.peek() == Some(b'*') {
                    cur.bump();
                    (c, cur.parse_var_pow(b't')?)
                } else {
                    (c, 0)
                }
            }
            None => return Err(cur.error("expected a polynomial term".into())),
        };
        let coeff = if negate { coeff.neg() } else { coeff };
        let mut term = vec![field.zero(); pow as usize + 1];
        term[pow as usize] = coeff;
        acc = acc.add(&Poly::new(field, term));
        match cur.peek() {
            Some(b'+') => {
                cur.bump();
                negate = false;
            }
            Some(b'-') => {
                cur.bump();
                negate = true;
            }
            _ => return Ok(acc),
        }
    }
}

/// One side of a fraction: a polynomial, optionally parenthesized. A leading
/// parenthesis only delimits the operand when the group is followed by `/`
/// or the end of input; otherwise it is an extension-field coefficient and
/// the term parser owns it.
fn parse_operand(cur: &mut Cursor, field: &FieldRef) -> Result<Poly> {
    if cur.peek() == Some(b'(') {
        let save = cur.pos;
        cur.bump();
        if let Ok(p) = parse_poly_body(cur, field) {
            if cur.peek() == Some(b')') {
                cur.bump();
                if matches!(cur.peek(), None | Some(b'/') | Some(b')')) {
                    return Ok(p);
                }
            }
        }
        cur.pos = save;
    }
    parse_poly_body(cur, field)
}

pub fn parse_poly(s: &str, field: &FieldRef) -> Result<Poly> {
    let mut cur = Cursor::new(s);
    let p = parse_operand(&mut cur, field)?;
    cur.skip_ws();
    if cur.pos != cur.bytes.len() {
        return Err(cur.error("trailing input after polynomial".into()));
    }
    Ok(p)
}

pub fn parse_ratfunc(s: &str, field: &FieldRef) -> Result<RatFunc> {
    let mut cur = Cursor::new(s);
    let num = parse_operand(&mut cur, field)?;
    let out = if cur.peek() == Some(b'/') {
        cur.bump();
        let den = parse_operand(&mut cur, field)?;
        if den.is_zero() {
            return Err(cur.error("zero denominator".into()));
        }
        RatFunc::new(num, den)?
    } else {
        RatFunc::from_poly(num)
    };
    cur.skip_ws();
    if cur.pos != cur.bytes.len() {
        return Err(cur.error("trailing input after rational function".into()));
    }
    Ok(out)
}

pub fn parse_place(s: &str, field: &FieldRef) -> Result<Place> {
    if s.trim() == "inf" {
        return Ok(Place::infinity());
    }
    Place::finite(parse_poly(s, field)?)
}
