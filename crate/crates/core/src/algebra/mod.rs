//! Exact arithmetic over F_q, A = F_q[t] and K = F_q(t): factorization,
//! places, valuations and the product formula.

pub mod factor;
pub mod fq;
pub mod logq;
pub mod parse;
pub mod place;
pub mod poly;
pub mod ratfunc;

pub use factor::{factor, factor_seeded, Factorization};
pub use fq::{FieldRef, FiniteField, FqElem};
pub use logq::LogUnits;
pub use parse::{parse_place, parse_poly, parse_ratfunc};
pub use place::{log_abs, ord, support, weil_height, Place, PlaceKind};
pub use poly::Poly;
pub use ratfunc::RatFunc;
