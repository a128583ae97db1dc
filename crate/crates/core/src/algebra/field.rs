//! Prime-field and quadratic-extension-field arithmetic.

use serde::{Deserialize, Serialize};

use super::primes::is_rational_prime;
use crate::error::{Error, Result};

/// An element of F_q for a rational prime q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub modulus: u64,
    pub value: u64,
}

impl FieldElement {
    pub fn new(modulus: u64, value: i64) -> Self {
        debug_assert!(is_rational_prime(modulus));
        Self {
            modulus,
            value: value.rem_euclid(modulus as i64) as u64,
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "field modulus mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self {
            modulus: self.modulus,
            value: (self.value + other.value) % self.modulus,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self {
            modulus: self.modulus,
            value: (self.value + self.modulus - other.value) % self.modulus,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self {
            modulus: self.modulus,
            value: (self.value * other.value) % self.modulus,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            modulus: self.modulus,
            value: (self.modulus - self.value) % self.modulus,
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        // Fermat: q is prime and tiny here
        let mut acc = 1u64;
        let mut base = self.value;
        let mut e = self.modulus - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.modulus;
            }
            base = base * base % self.modulus;
            e >>= 1;
        }
        Some(Self {
            modulus: self.modulus,
            value: acc,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

/// F_{q²} = F_q[x]/(x² + c1·x + c0), with the polynomial checked irreducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtField {
    pub base_prime: u64,
    pub c1: u64,
    pub c0: u64,
}

impl ExtField {
    pub fn new(base_prime: u64, c1: u64, c0: u64) -> Result<Self> {
        if !is_rational_prime(base_prime) {
            return Err(Error::NotPrime(base_prime));
        }
        let (c1, c0) = (c1 % base_prime, c0 % base_prime);
        // irreducible iff no root in F_q
        for r in 0..base_prime {
            if (r * r + c1 * r + c0) % base_prime == 0 {
                return Err(Error::ReduciblePoly {
                    q: base_prime,
                    c1,
                    c0,
                });
            }
        }
        Ok(Self { base_prime, c1, c0 })
    }

    /// The lexicographically smallest (c1, c0) monic irreducible quadratic,
    /// except q = 5 which is pinned to x² + 2x + 4.
    pub fn default_for(base_prime: u64) -> Result<Self> {
        if base_prime == 5 {
            return Self::new(5, 2, 4);
        }
        for c1 in 0..base_prime {
            for c0 in 0..base_prime {
                if let Ok(f) = Self::new(base_prime, c1, c0) {
                    return Ok(f);
                }
            }
        }
        Err(Error::NotPrime(base_prime))
    }

    pub fn order(&self) -> u64 {
        self.base_prime * self.base_prime
    }

    pub fn element(&self, v1: i64, v0: i64) -> ExtFieldElement {
        ExtFieldElement {
            field: *self,
            v1: v1.rem_euclid(self.base_prime as i64) as u64,
            v0: v0.rem_euclid(self.base_prime as i64) as u64,
        }
    }

    /// Element from its index v1·q + v0.
    pub fn from_index(&self, idx: u64) -> ExtFieldElement {
        self.element(
            (idx / self.base_prime) as i64,
            (idx % self.base_prime) as i64,
        )
    }
}

/// v1·x + v0 in F_{q²}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtFieldElement {
    pub field: ExtField,
    pub v1: u64,
    pub v0: u64,
}

impl ExtFieldElement {
    fn check(&self, other: &Self) {
        assert_eq!(self.field, other.field, "extension field mismatch");
    }

    pub fn index(&self) -> u64 {
        self.v1 * self.field.base_prime + self.v0
    }

    pub fn is_zero(&self) -> bool {
        self.v1 == 0 && self.v0 == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let q = self.field.base_prime;
        Self {
            field: self.field,
            v1: (self.v1 + other.v1) % q,
            v0: (self.v0 + other.v0) % q,
        }
    }

    pub fn neg(&self) -> Self {
        let q = self.field.base_prime;
        Self {
            field: self.field,
            v1: (q - self.v1) % q,
            v0: (q - self.v0) % q,
        }
    }

    /// Product reduced by x² ≡ −c1·x − c0.
    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let q = self.field.base_prime;
        let (a1, a0, b1, b0) = (self.v1, self.v0, other.v1, other.v0);
        let x2 = a1 * b1 % q;
        let x1 = (a1 * b0 + a0 * b1) % q;
        let x0 = a0 * b0 % q;
        let c1 = (q - self.field.c1) % q;
        let c0 = (q - self.field.c0) % q;
        Self {
            field: self.field,
            v1: (x1 + x2 * c1) % q,
            v0: (x0 + x2 * c0) % q,
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // brute force over q² candidates; fields here are tiny
        let one = self.field.element(0, 1);
        for idx in 0..self.field.order() {
            let cand = self.field.from_index(idx);
            if self.mul(&cand) == one {
                return Some(cand);
            }
        }
        None
    }
}
