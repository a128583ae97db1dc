//! Exact arithmetic in Z, Z[i], and Z[omega].
//!
//! Elements are stored as integer coordinates `(a, b)` in the basis `(1, j)`
//! for Gaussian integers and `(1, omega)` for Eisenstein integers, with
//! `omega = -1/2 + j*sqrt(3)/2` so that `omega^2 = -1 - omega`. Plain
//! integers use `b = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which quadratic ring (or Z itself) an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Integers,
    Gaussian,
    Eisenstein,
}

impl Ring {
    /// Units of the ring: {±1}, {±1, ±j}, {±1, ±ω, ±ω²}.
    pub fn units(self) -> Vec<RingElement> {
        let mut us = vec![RingElement::new(self, 1, 0), RingElement::new(self, -1, 0)];
        match self {
            Ring::Integers => {}
            Ring::Gaussian => {
                us.push(RingElement::new(self, 0, 1));
                us.push(RingElement::new(self, 0, -1));
            }
            Ring::Eisenstein => {
                // ±ω and ±ω² = ∓(1+ω)
                us.push(RingElement::new(self, 0, 1));
                us.push(RingElement::new(self, 0, -1));
                us.push(RingElement::new(self, -1, -1));
                us.push(RingElement::new(self, 1, 1));
            }
        }
        us
    }
}

/// An exact element of Z, Z[i], or Z[omega].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElement {
    pub ring: Ring,
    pub a: i64,
    pub b: i64,
}

#[inline]
fn ck_add(x: i64, y: i64) -> i64 {
    x.checked_add(y).expect("ring arithmetic overflow")
}

#[inline]
fn ck_sub(x: i64, y: i64) -> i64 {
    x.checked_sub(y).expect("ring arithmetic overflow")
}

#[inline]
fn ck_mul(x: i64, y: i64) -> i64 {
    x.checked_mul(y).expect("ring arithmetic overflow")
}

impl RingElement {
    pub fn new(ring: Ring, a: i64, b: i64) -> Self {
        if ring == Ring::Integers {
            assert_eq!(b, 0, "integer elements have no second coordinate");
        }
        Self { ring, a, b }
    }

    pub fn int(a: i64) -> Self {
        Self::new(Ring::Integers, a, 0)
    }

    pub fn gauss(a: i64, b: i64) -> Self {
        Self::new(Ring::Gaussian, a, b)
    }

    pub fn eis(a: i64, b: i64) -> Self {
        Self::new(Ring::Eisenstein, a, b)
    }

    pub fn zero(ring: Ring) -> Self {
        Self::new(ring, 0, 0)
    }

    pub fn one(ring: Ring) -> Self {
        Self::new(ring, 1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Algebraic norm: a² (Z), a²+b² (Z[i]), a²−ab+b² (Z[ω]).
    pub fn norm(&self) -> u64 {
        let n = match self.ring {
            Ring::Integers => ck_mul(self.a, self.a),
            Ring::Gaussian => ck_add(ck_mul(self.a, self.a), ck_mul(self.b, self.b)),
            Ring::Eisenstein => ck_sub(
                ck_add(ck_mul(self.a, self.a), ck_mul(self.b, self.b)),
                ck_mul(self.a, self.b),
            ),
        };
        debug_assert!(n >= 0);
        n as u64
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(
            self.ring, other.ring,
            "ring tag mismatch: {:?} vs {:?}",
            self.ring, other.ring
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        Self::new(self.ring, ck_add(self.a, other.a), ck_add(self.b, other.b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        Self::new(self.ring, ck_sub(self.a, other.a), ck_sub(self.b, other.b))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.ring, -self.a, -self.b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        let (a1, b1, a2, b2) = (self.a, self.b, other.a, other.b);
        match self.ring {
            Ring::Integers => Self::new(self.ring, ck_mul(a1, a2), 0),
            Ring::Gaussian => Self::new(
                self.ring,
                ck_sub(ck_mul(a1, a2), ck_mul(b1, b2)),
                ck_add(ck_mul(a1, b2), ck_mul(a2, b1)),
            ),
            // (a1+b1ω)(a2+b2ω) with ω² = −1−ω
            Ring::Eisenstein => Self::new(
                self.ring,
                ck_sub(ck_mul(a1, a2), ck_mul(b1, b2)),
                ck_sub(ck_add(ck_mul(a1, b2), ck_mul(a2, b1)), ck_mul(b1, b2)),
            ),
        }
    }

    pub fn mul_scalar(&self, k: i64) -> Self {
        Self::new(self.ring, ck_mul(self.a, k), ck_mul(self.b, k))
    }

    /// Complex conjugate. conj(ω) = ω² = −1−ω, so conj(a+bω) = (a−b) − bω.
    pub fn conj(&self) -> Self {
        match self.ring {
            Ring::Integers => *self,
            Ring::Gaussian => Self::new(self.ring, self.a, -self.b),
            Ring::Eisenstein => Self::new(self.ring, ck_sub(self.a, self.b), -self.b),
        }
    }

    /// Inverse of a unit (conjugate, since the norm is 1).
    pub fn unit_inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj())
    }

    /// Embedding into the complex plane.
    pub fn complex(&self) -> Complex64 {
        match self.ring {
            Ring::Integers => Complex64::new(self.a as f64, 0.0),
            Ring::Gaussian => Complex64::new(self.a as f64, self.b as f64),
            Ring::Eisenstein => Complex64::new(
                self.a as f64 - self.b as f64 / 2.0,
                self.b as f64 * 3f64.sqrt() / 2.0,
            ),
        }
    }

    /// (2·Re, Im-proportional) integer pair, for exact lexicographic
    /// comparisons of complex position. Im is scaled by a positive constant
    /// per ring, which preserves ordering.
    fn lex_key(&self) -> (i64, i64) {
        match self.ring {
            Ring::Integers => (2 * self.a, 0),
            Ring::Gaussian => (2 * self.a, self.b),
            Ring::Eisenstein => (2 * self.a - self.b, self.b),
        }
    }

    /// True when `self` precedes `other` in (Re, Im) lexicographic order.
    pub fn lex_before(&self, other: &Self) -> bool {
        self.lex_key() < other.lex_key()
    }

    /// Tie-break among equal-norm candidates: largest coordinate sum first,
    /// then lexicographic. The coordinate sum is invariant under the
    /// conjugate-rotate symmetry (a, b) ↦ (b, a) of Z[ω], which keeps
    /// representative sets closed under that symmetry wherever possible.
    pub fn tie_before(&self, other: &Self) -> bool {
        let (s1, s2) = (self.a + self.b, other.a + other.b);
        if s1 != s2 {
            return s1 > s2;
        }
        self.lex_before(other)
    }
}

/// Euclidean division: `x = q·m + r` with `norm(r) < norm(m)`.
///
/// The quotient is chosen among the four integer roundings of the exact
/// quotient x/m; the remainder is the candidate of minimum norm, ties broken
/// by [`RingElement::tie_before`]. For the Gaussian and Eisenstein basis
/// geometry the nearest-coordinate rounding is always among the candidates,
/// which guarantees norm(r) ≤ 3/4·norm(m).
pub fn euclid_divmod(x: &RingElement, m: &RingElement) -> Result<(RingElement, RingElement)> {
    if x.ring != m.ring {
        return Err(Error::RingMismatch(x.ring, m.ring));
    }
    if m.is_zero() {
        return Err(Error::DivisionByZero);
    }
    // Exact quotient coordinates: x * conj(m) / norm(m).
    let num = x.mul(&m.conj());
    let n = m.norm() as i64;
    let fa = div_floor(num.a, n);
    let fb = div_floor(num.b, n);
    let db_max = if x.ring == Ring::Integers { 0 } else { 1 };
    let mut best: Option<(RingElement, RingElement)> = None;
    for da in 0..=1 {
        for db in 0..=db_max {
            let q = RingElement::new(x.ring, fa + da, fb + db);
            let r = x.sub(&q.mul(m));
            let better = match &best {
                None => true,
                Some((_, rb)) => {
                    r.norm() < rb.norm() || (r.norm() == rb.norm() && r.tie_before(rb))
                }
            };
            if better {
                best = Some((q, r));
            }
        }
    }
    let (q, r) = best.unwrap();
    debug_assert!(r.norm() < m.norm());
    debug_assert_eq!(q.mul(m).add(&r), *x);
    Ok((q, r))
}

fn div_floor(x: i64, n: i64) -> i64 {
    let d = x / n;
    if x % n != 0 && (x < 0) != (n < 0) {
        d - 1
    } else {
        d
    }
}

/// Canonical residue of `x` modulo `m`: the minimum-norm remainder.
pub fn ring_mod(x: &RingElement, m: &RingElement) -> Result<RingElement> {
    Ok(euclid_divmod(x, m)?.1)
}

/// True when `m` divides `x` exactly.
pub fn divides(m: &RingElement, x: &RingElement) -> bool {
    ring_mod(x, m).map(|r| r.is_zero()).unwrap_or(false)
}

/// Extended Euclidean algorithm: returns `(g, s, t)` with `s·x + t·y = g`,
/// `g` a gcd of `x` and `y` (unique up to units).
pub fn bezout(x: &RingElement, y: &RingElement) -> Result<(RingElement, RingElement, RingElement)> {
    if x.ring != y.ring {
        return Err(Error::RingMismatch(x.ring, y.ring));
    }
    assert!(!(x.is_zero() && y.is_zero()), "bezout of (0, 0)");
    let ring = x.ring;
    let one = RingElement::one(ring);
    let zero = RingElement::zero(ring);
    let (mut r0, mut r1) = (*x, *y);
    let (mut s0, mut s1) = (one, zero);
    let (mut t0, mut t1) = (zero, one);
    while !r1.is_zero() {
        let (q, r) = euclid_divmod(&r0, &r1)?;
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    debug_assert_eq!(s0.mul(x).add(&t0.mul(y)), r0);
    Ok((r0, s0, t0))
}
