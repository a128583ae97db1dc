//! Product-construction lattices over Z/Z[i]/Z[omega], quotient-ring signal
//! constellations with homomorphic labelings, multilevel-coding /
//! multistage-decoding compute-and-forward, and Monte-Carlo estimators of
//! achievable computation rates.

pub mod algebra;
pub mod constellation;
pub mod error;
pub mod lattice;
pub mod mlc;
pub mod rates;
pub mod rng;

pub use error::{Error, Result};
