//! Exact-arithmetic library for Drinfeld modules over F_q(t): canonical and
//! local heights, the torsion-averaging identity, an S-integrality scanner,
//! and a primitive-place (Schinzel-style) search. All heights and valuations
//! are exact rationals in base-q logarithmic units.

pub mod algebra;
pub mod drinfeld;
pub mod equidist;
pub mod error;
pub mod heights;
pub mod rng;
pub mod schinzel;
pub mod siegel;

pub(crate) mod par;

pub use error::{Error, Result};
