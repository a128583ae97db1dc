//! Minimum-energy coset-representative constellations of R/ΦR and labeling
//! bijections onto products of finite fields.

mod labeling;

pub use labeling::{
    crt_idempotents, CheckResult, HomomorphismReport, LabelComponent, LabelVector, LabelingKind,
    LabelingMap, LevelAlphabet,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{check_pairwise_coprime, euclid_divmod, PrimeSpec, Ring, RingElement};
use crate::error::{Error, Result};

/// Tie-break rule for equal-norm coset representatives. Only one rule is
/// defined; it is recorded in dumps so tables are reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LexReIm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub ring: Ring,
    pub primes: Vec<PrimeSpec>,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl ConstellationSpec {
    pub fn new(ring: Ring, primes: Vec<PrimeSpec>) -> Self {
        Self {
            ring,
            primes,
            tie_break: TieBreak::LexReIm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one prime is required".into(),
            ));
        }
        for p in &self.primes {
            if p.element.ring != self.ring {
                return Err(Error::RingMismatch(self.ring, p.element.ring));
            }
        }
        check_pairwise_coprime(&self.primes)
    }

    /// Π q_l — the constellation size.
    pub fn size(&self) -> u64 {
        self.primes.iter().map(|p| p.residue_size).product()
    }

    pub fn modulus(&self) -> RingElement {
        self.primes
            .iter()
            .fold(RingElement::one(self.ring), |acc, p| acc.mul(&p.element))
    }
}

/// The minimum-energy coset representatives of R/ΦR, in a deterministic
/// order, with an index for point lookup.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub spec: ConstellationSpec,
    pub modulus: RingElement,
    pub points: Vec<RingElement>,
    index: HashMap<(i64, i64), usize>,
}

impl Constellation {
    /// Enumerate a bounding region, reduce every element mod Φ, and keep the
    /// canonical minimum-norm representative of each residue class.
    ///
    /// `euclid_divmod` already returns the norm-minimal remainder with the
    /// lexicographic tie-break, and the remainder is a class invariant, so
    /// collecting distinct remainders over a region of radius 2|Φ| yields
    /// exactly the Π q_l minimum-energy representatives.
    pub fn build(spec: ConstellationSpec) -> Result<Self> {
        spec.validate()?;
        let modulus = spec.modulus();
        let expected = spec.size();

        let bound = (2.0 * (modulus.norm() as f64).sqrt()).ceil() as i64;
        let mut points = Vec::new();
        let mut index = HashMap::new();
        let b_range = if spec.ring == Ring::Integers {
            0..=0
        } else {
            -bound..=bound
        };
        for a in -bound..=bound {
            for b in b_range.clone() {
                let x = RingElement::new(spec.ring, a, b);
                let (_, rep) = euclid_divmod(&x, &modulus)?;
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry((rep.a, rep.b)) {
                    e.insert(points.len());
                    points.push(rep);
                }
            }
        }
        assert_eq!(
            points.len() as u64,
            expected,
            "constellation enumeration must find one representative per class"
        );
        // deterministic point order: by norm, then lexicographic
        points.sort_by(|x, y| {
            x.norm().cmp(&y.norm()).then_with(|| {
                if x.lex_before(y) {
                    std::cmp::Ordering::Less
                } else if x == y {
                    std::cmp::Ordering::Equal
                } else {
                    std::cmp::Ordering::Greater
                }
            })
        });
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| ((p.a, p.b), i))
            .collect();
        Ok(Self {
            spec,
            modulus,
            points,
            index,
        })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Canonical representative of x's residue class.
    pub fn reduce(&self, x: &RingElement) -> RingElement {
        euclid_divmod(x, &self.modulus)
            .expect("modulus is nonzero")
            .1
    }

    /// Index of the representative of x's class.
    pub fn point_index(&self, x: &RingElement) -> usize {
        let rep = self.reduce(x);
        *self
            .index
            .get(&(rep.a, rep.b))
            .expect("every residue class has a representative")
    }

    /// Exact average energy per symbol, Σ|x|²/n (the algebraic norm equals
    /// the squared complex magnitude in all three rings).
    pub fn mean_energy(&self) -> f64 {
        let total: u64 = self.points.iter().map(|p| p.norm()).sum();
        total as f64 / self.points.len() as f64
    }
}
