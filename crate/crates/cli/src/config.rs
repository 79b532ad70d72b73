//! Line-oriented `key = value` configuration. The module block (p, e,
//! modulus, phi_t) defines the field and the Drinfeld module; every other
//! key supplies a default that command-line flags may override. Errors carry
//! the line they were raised on.

use std::collections::BTreeMap;

use drinfeld_heights::algebra::{parse_place, parse_poly, parse_ratfunc, FieldRef, FiniteField, Place, Poly, RatFunc};
use drinfeld_heights::drinfeld::DrinfeldModule;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub msg: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.msg),
            None => write!(f, "config: {}", self.msg),
        }
    }
}

pub struct RunConfig {
    entries: BTreeMap<String, (usize, String)>,
}

const KNOWN_KEYS: &[&str] = &[
    "q", "p", "e", "modulus", "phi_t", "beta", "alpha", "S", "places", "deg_max", "qdeg_max",
    "place_deg_max", "n_max", "window", "seed", "cap", "place", "poly", "format",
];

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError {
                line: Some(line_no),
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError {
                    line: Some(line_no),
                    msg: format!("unknown key `{key}`"),
                });
            }
            if entries
                .insert(key.clone(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(ConfigError {
                    line: Some(line_no),
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(RunConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(n, _)| *n)
    }

    pub fn field(&self) -> Result<FieldRef, ConfigError> {
        // either `q` (a prime power; the modulus fixes p and e when q is not
        // prime) or explicit `p` (+ optional `e`)
        let (p, mut e) = if let Some(qs) = self.get("q") {
            let q: u64 = qs.parse().map_err(|_| ConfigError {
                line: self.line_of("q"),
                msg: "`q` must be an integer".into(),
            })?;
            split_prime_power(q).ok_or(ConfigError {
                line: self.line_of("q"),
                msg: format!("q = {q} is not a prime power"),
            })?
        } else {
            let p: u64 = self
                .get("p")
                .ok_or(ConfigError {
                    line: None,
                    msg: "missing required key `q` or `p`".into(),
                })?
                .parse()
                .map_err(|_| ConfigError {
                    line: self.line_of("p"),
                    msg: "`p` must be an integer".into(),
                })?;
            (p, 1)
        };
        if let Some(s) = self.get("e") {
            e = s.parse().map_err(|_| ConfigError {
                line: self.line_of("e"),
                msg: "`e` must be an integer".into(),
            })?;
        }
        if e == 1 {
            return FiniteField::prime(p).map_err(|err| ConfigError {
                line: self.line_of("p"),
                msg: err.to_string(),
            });
        }
        let modulus_str = self.get("modulus").ok_or(ConfigError {
            line: self.line_of("e"),
            msg: "extension fields require `modulus` (a monic irreducible g-polynomial)".into(),
        })?;
        let coeffs = parse_gpoly_coeffs(modulus_str, p).map_err(|msg| ConfigError {
            line: self.line_of("modulus"),
            msg,
        })?;
        if coeffs.len() != e + 1 {
            return Err(ConfigError {
                line: self.line_of("modulus"),
                msg: format!("modulus degree {} does not match e = {e}", coeffs.len() - 1),
            });
        }
        FiniteField::extension(p, coeffs).map_err(|err| ConfigError {
            line: self.line_of("modulus"),
            msg: err.to_string(),
        })
    }

    pub fn module(&self, field: &FieldRef) -> Result<DrinfeldModule, ConfigError> {
        let phi = self.get("phi_t").ok_or(ConfigError {
            line: None,
            msg: "missing required key `phi_t` (comma-separated coefficients a_0..a_d)".into(),
        })?;
        let line = self.line_of("phi_t");
        let coeffs: Vec<RatFunc> = phi
            .split(',')
            .map(|s| {
                parse_ratfunc(s.trim(), field).map_err(|err| ConfigError {
                    line,
                    msg: format!("coefficient `{}`: {err}", s.trim()),
                })
            })
            .collect::<Result<_, _>>()?;
        DrinfeldModule::from_coeffs(coeffs).map_err(|err| ConfigError {
            line,
            msg: err.to_string(),
        })
    }

    pub fn ratfunc(&self, key: &str, field: &FieldRef) -> Result<Option<RatFunc>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => parse_ratfunc(s, field)
                .map(Some)
                .map_err(|err| ConfigError {
                    line: self.line_of(key),
                    msg: format!("`{key}`: {err}"),
                }),
        }
    }

    pub fn poly(&self, key: &str, field: &FieldRef) -> Result<Option<Poly>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => parse_poly(s, field).map(Some).map_err(|err| ConfigError {
                line: self.line_of(key),
                msg: format!("`{key}`: {err}"),
            }),
        }
    }

    pub fn places(&self, key: &str, field: &FieldRef) -> Result<Option<Vec<Place>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => parse_place_list(s, field).map(Some).map_err(|msg| ConfigError {
                line: self.line_of(key),
                msg,
            }),
        }
    }

    pub fn uint(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| ConfigError {
                line: self.line_of(key),
                msg: format!("`{key}` must be an unsigned integer"),
            }),
        }
    }
}

/// q = p^e for prime p, or None.
fn split_prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut v = q;
            let mut e = 0;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            return if v == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

pub fn parse_place_list(s: &str, field: &FieldRef) -> Result<Vec<Place>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| parse_place(part.trim(), field).map_err(|e| format!("place `{}`: {e}", part.trim())))
        .collect()
}

/// Coefficients (low-to-high) of a g-polynomial like `g^2+g+1` over F_p.
fn parse_gpoly_coeffs(s: &str, p: u64) -> Result<Vec<u64>, String> {
    let mut coeffs: Vec<u64> = Vec::new();
    for term in s.split('+') {
        let term = term.trim();
        let (c, pow) = if let Some(rest) = term.strip_prefix("g^") {
            (1, rest.trim().parse::<usize>().map_err(|_| format!("bad exponent in `{term}`"))?)
        } else if term == "g" {
            (1, 1)
        } else if let Some((c, g)) = term.split_once("*g^") {
            (
                c.trim().parse::<u64>().map_err(|_| format!("bad coefficient in `{term}`"))?,
                g.trim().parse::<usize>().map_err(|_| format!("bad exponent in `{term}`"))?,
            )
        } else if let Some(c) = term.strip_suffix("*g") {
            (c.trim().parse::<u64>().map_err(|_| format!("bad coefficient in `{term}`"))?, 1)
        } else {
            (term.parse::<u64>().map_err(|_| format!("bad term `{term}`"))?, 0)
        };
        if coeffs.len() < pow + 1 {
            coeffs.resize(pow + 1, 0);
        }
        coeffs[pow] = (coeffs[pow] + c) % p;
    }
    Ok(coeffs)
}
