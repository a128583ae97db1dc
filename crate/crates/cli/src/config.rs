//! JSON experiment configurations. Unknown keys are rejected and every
//! random quantity is driven by an explicit seed.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use prodcf::algebra::{classify_rational_prime, ExtField, PrimeSpec, Ring, RingElement};
use prodcf::constellation::{Constellation, ConstellationSpec, LabelingKind, LabelingMap};
use prodcf::lattice::LinearCode;
use prodcf::rates::{ChannelSpec, EstimatorMode};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum PrimeSel {
    /// A rational prime, classified in the ring; `conjugate` selects φ̄ for
    /// split primes.
    Rational {
        rational: u64,
        #[serde(default)]
        conjugate: bool,
    },
    /// An explicit ring element (a, b) in the integer basis.
    Element { element: [i64; 2] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingConfig {
    pub kind: LabelingKind,
    /// Per-level generators for the custom module kind.
    #[serde(default)]
    pub generators: Option<Vec<[i64; 2]>>,
    /// Irreducible quadratic x² + c1·x + c0 for inert levels, as [c1, c0].
    #[serde(default)]
    pub poly: Option<[u64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    pub ring: Ring,
    pub primes: Vec<PrimeSel>,
    pub labeling: LabelingConfig,
}

impl ConstellationConfig {
    pub fn resolve_primes(&self) -> anyhow::Result<Vec<PrimeSpec>> {
        self.primes
            .iter()
            .map(|sel| match sel {
                PrimeSel::Rational {
                    rational,
                    conjugate,
                } => {
                    let specs = classify_rational_prime(*rational, self.ring)?;
                    if *conjugate {
                        match specs.get(1) {
                            Some(s) => Ok(*s),
                            None => bail!("{rational} does not split; no conjugate to select"),
                        }
                    } else {
                        Ok(specs[0])
                    }
                }
                PrimeSel::Element { element } => Ok(PrimeSpec::from_element(RingElement::new(
                    self.ring, element[0], element[1],
                ))?),
            })
            .collect()
    }

    pub fn build_labeling(&self) -> anyhow::Result<LabelingMap> {
        let primes = self.resolve_primes()?;
        let spec = ConstellationSpec::new(self.ring, primes);
        let constellation = Constellation::build(spec).context("building constellation")?;
        let n_levels = constellation.spec.primes.len();
        let polys: Vec<Option<ExtField>> = match self.labeling.poly {
            None => vec![None; n_levels],
            Some([c1, c0]) => constellation
                .spec
                .primes
                .iter()
                .map(|p| {
                    if p.behavior == prodcf::algebra::PrimeBehavior::Inert {
                        ExtField::new(p.base_prime(), c1, c0).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_, _>>()?,
        };
        let map = match self.labeling.kind {
            LabelingKind::CrtRingIso => LabelingMap::ring_iso(constellation, &polys)?,
            LabelingKind::ModuleIsoGeneral => LabelingMap::module_general(constellation)?,
            LabelingKind::ModuleIsoCustom => {
                let gens = self
                    .labeling
                    .generators
                    .as_ref()
                    .context("module-iso-custom requires generators")?
                    .iter()
                    .map(|g| RingElement::new(self.ring, g[0], g[1]))
                    .collect();
                LabelingMap::module_custom(constellation, gens)?
            }
            LabelingKind::ExtFieldRingIso => {
                LabelingMap::ext_field_ring_iso(constellation, polys[0])?
            }
            LabelingKind::NaiveUngerboeck => LabelingMap::naive_ungerboeck(constellation)?,
        };
        Ok(map)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    pub constellation: ConstellationConfig,
    pub channel: ChannelSpec,
    pub snr_grid_db: Vec<f64>,
    pub modes: Vec<EstimatorMode>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub q: u64,
    /// N×m generator matrix, row-major.
    pub gen: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDemoConfig {
    pub primes: Vec<u64>,
    pub codes: Vec<CodeConfig>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Integer channel gains, one per source.
    pub channel: Vec<i64>,
    /// Per-source, per-level message vectors.
    pub messages: Vec<Vec<Vec<u64>>>,
    #[serde(default = "default_sm_samples")]
    pub second_moment_samples: usize,
    #[serde(default = "default_closure_checks")]
    pub closure_checks: usize,
}

fn default_gamma() -> f64 {
    1.0
}

fn default_sm_samples() -> usize {
    200_000
}

fn default_closure_checks() -> usize {
    200
}

impl LatticeDemoConfig {
    /// The two-source worked example: Z₆ ≅ F₂×F₃ with generator vectors
    /// [1,1]ᵀ over F₂ and [1,2]ᵀ over F₃, gains 3 and 4.
    pub fn worked_example() -> Self {
        Self {
            primes: vec![2, 3],
            codes: vec![
                CodeConfig {
                    q: 2,
                    gen: vec![vec![1], vec![1]],
                },
                CodeConfig {
                    q: 3,
                    gen: vec![vec![1], vec![2]],
                },
            ],
            gamma: 1.0,
            channel: vec![3, 4],
            messages: vec![vec![vec![1], vec![1]], vec![vec![0], vec![2]]],
            second_moment_samples: default_sm_samples(),
            closure_checks: default_closure_checks(),
        }
    }

    pub fn build_codes(&self) -> anyhow::Result<Vec<LinearCode>> {
        self.codes
            .iter()
            .map(|c| LinearCode::new(c.q, c.gen.clone()).map_err(Into::into))
            .collect()
    }
}

/// FNV-1a digest of the canonical config text, recorded in sidecars.
pub fn digest(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    format!("{h:016x}")
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a, C: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub seed: Option<u64>,
    pub config_digest: String,
    pub config: &'a C,
}

pub fn write_sidecar<C: Serialize>(
    path: &std::path::Path,
    command: &str,
    seed: Option<u64>,
    config: &C,
) -> anyhow::Result<()> {
    let canonical = serde_json::to_string(config)?;
    let sidecar = Sidecar {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config_digest: digest(&canonical),
        config,
    };
    std::fs::write(path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}
