//! Classification of rational primes in Z[i] and Z[omega].

use serde::{Deserialize, Serialize};

use super::ring::{bezout, Ring, RingElement};
use crate::error::{Error, Result};

/// How a rational prime sits in the quadratic ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeBehavior {
    Ramified,
    Inert,
    Split,
}

/// A ring prime together with the size of its residue field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSpec {
    pub element: RingElement,
    /// |φ|² — the number of residue classes mod φ.
    pub residue_size: u64,
    pub behavior: PrimeBehavior,
}

impl PrimeSpec {
    /// Wrap an explicitly given ring prime. The residue size is its norm;
    /// the behavior is derived from the norm's factorization.
    pub fn from_element(element: RingElement) -> Result<Self> {
        let n = element.norm();
        if element.ring == Ring::Integers {
            let p = element.a.unsigned_abs();
            if !is_rational_prime(p) {
                return Err(Error::NotPrime(p));
            }
            return Ok(Self {
                element,
                residue_size: p,
                behavior: PrimeBehavior::Inert,
            });
        }
        let behavior = if is_rational_prime(n) {
            match element.ring {
                Ring::Eisenstein if n == 3 => PrimeBehavior::Ramified,
                Ring::Gaussian if n == 2 => PrimeBehavior::Ramified,
                _ => PrimeBehavior::Split,
            }
        } else {
            // inert primes are unit multiples of a rational prime p, norm p²
            let p = (n as f64).sqrt().round() as u64;
            let inert_ok = p * p == n
                && is_rational_prime(p)
                && canonical_associate(&element) == RingElement::new(element.ring, p as i64, 0)
                && match element.ring {
                    Ring::Eisenstein => p % 3 == 2,
                    Ring::Gaussian => p % 4 == 3,
                    Ring::Integers => unreachable!(),
                };
            if !inert_ok {
                return Err(Error::NotPrime(n));
            }
            PrimeBehavior::Inert
        };
        Ok(Self {
            element,
            residue_size: n,
            behavior,
        })
    }

    /// The prime field size coding works over at this level: q for split and
    /// ramified levels, q for inert levels (whose labels live in F_{q²}).
    pub fn base_prime(&self) -> u64 {
        match (self.element.ring, self.behavior) {
            (Ring::Integers, _) => self.residue_size,
            (_, PrimeBehavior::Inert) => (self.residue_size as f64).sqrt().round() as u64,
            _ => self.residue_size,
        }
    }
}

/// Trial division; magnitudes here are tiny.
pub fn is_rational_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Classify a rational prime in the given ring.
///
/// Returns one `PrimeSpec` for ramified and inert primes and the pair
/// `(φ, φ̄)` for split primes. The split representative is canonicalized to
/// the associate with argument in [0, π/3) for Z[ω] ([0, π/2) for Z[i]);
/// the second entry is its literal conjugate.
pub fn classify_rational_prime(p: u64, ring: Ring) -> Result<Vec<PrimeSpec>> {
    if !is_rational_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match ring {
        Ring::Integers => Ok(vec![PrimeSpec {
            element: RingElement::int(p as i64),
            residue_size: p,
            behavior: PrimeBehavior::Inert,
        }]),
        Ring::Eisenstein => match p % 3 {
            0 => Ok(vec![PrimeSpec {
                element: RingElement::eis(1, -1),
                residue_size: 3,
                behavior: PrimeBehavior::Ramified,
            }]),
            2 => Ok(vec![PrimeSpec {
                element: RingElement::eis(p as i64, 0),
                residue_size: p * p,
                behavior: PrimeBehavior::Inert,
            }]),
            _ => {
                let phi = find_split_prime(p, ring)?;
                Ok(vec![
                    PrimeSpec {
                        element: phi,
                        residue_size: p,
                        behavior: PrimeBehavior::Split,
                    },
                    PrimeSpec {
                        element: phi.conj(),
                        residue_size: p,
                        behavior: PrimeBehavior::Split,
                    },
                ])
            }
        },
        Ring::Gaussian => match p % 4 {
            2 => Ok(vec![PrimeSpec {
                element: RingElement::gauss(1, 1),
                residue_size: 2,
                behavior: PrimeBehavior::Ramified,
            }]),
            3 => Ok(vec![PrimeSpec {
                element: RingElement::gauss(p as i64, 0),
                residue_size: p * p,
                behavior: PrimeBehavior::Inert,
            }]),
            _ => {
                let phi = find_split_prime(p, ring)?;
                Ok(vec![
                    PrimeSpec {
                        element: phi,
                        residue_size: p,
                        behavior: PrimeBehavior::Split,
                    },
                    PrimeSpec {
                        element: phi.conj(),
                        residue_size: p,
                        behavior: PrimeBehavior::Split,
                    },
                ])
            }
        },
    }
}

/// Bounded search for an element of norm p. The fundamental sector contains
/// one associate from each of the two conjugate classes; the class whose
/// sector representative has the larger second coordinate is taken as φ.
fn find_split_prime(p: u64, ring: Ring) -> Result<RingElement> {
    let bound = (2.0 * (p as f64).sqrt()).ceil() as i64 + 1;
    let mut best: Option<RingElement> = None;
    for a in -bound..=bound {
        for b in -bound..=bound {
            let x = RingElement::new(ring, a, b);
            if x.norm() == p {
                let c = canonical_associate(&x);
                let take = match &best {
                    None => true,
                    Some(cur) => c.b > cur.b || (c.b == cur.b && c.a < cur.a),
                };
                if take {
                    best = Some(c);
                }
            }
        }
    }
    best.ok_or(Error::NotPrime(p))
}

/// The associate with argument in [0, π/3) for Z[ω], [0, π/2) for Z[i],
/// positive for Z. Exactly one associate lies in the sector.
pub fn canonical_associate(x: &RingElement) -> RingElement {
    if x.is_zero() {
        return *x;
    }
    for u in x.ring.units() {
        let y = x.mul(&u);
        let in_sector = match x.ring {
            Ring::Integers => y.a > 0,
            Ring::Gaussian => y.a > 0 && y.b >= 0,
            // b ≥ 0 && a > b  <=>  0 ≤ arg < π/3 in the (1, ω) basis
            Ring::Eisenstein => y.b >= 0 && y.a > y.b,
        };
        if in_sector {
            return y;
        }
    }
    unreachable!("every nonzero element has a sector associate");
}

/// Check that the given primes are pairwise relatively prime (gcd a unit).
pub fn check_pairwise_coprime(primes: &[PrimeSpec]) -> Result<()> {
    for i in 0..primes.len() {
        for j in (i + 1)..primes.len() {
            let (g, _, _) = bezout(&primes[i].element, &primes[j].element)?;
            if !g.is_unit() {
                return Err(Error::NotCoprime(g.norm()));
            }
        }
    }
    Ok(())
}
