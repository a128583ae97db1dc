//! Exact arithmetic in Z, Z[i], Z[omega], prime classification, and
//! finite-field arithmetic.

mod field;
mod primes;
mod ring;

pub use field::{ExtField, ExtFieldElement, FieldElement};
pub use primes::{
    canonical_associate, check_pairwise_coprime, classify_rational_prime, is_rational_prime,
    PrimeBehavior, PrimeSpec,
};
pub use ring::{bezout, divides, euclid_divmod, ring_mod, Ring, RingElement};
