//! Multilevel encoder and the three function decoders: multistage APP,
//! suboptimal successive (per-level mod-φ folding after subtraction), and
//! fully parallel per-level folding.
//!
//! Decoders act on "coding levels": one F_{q_l} stream per split/ramified
//! prime, two F_q streams for an inert prime. Coefficient pairs (b₁^l, b₂^l)
//! define the per-level function b₁^l·c₁^l ⊕ b₂^l·c₂^l a relay decodes.

use num_complex::Complex64;

use crate::algebra::{divides, Ring, RingElement};
use crate::constellation::LabelingMap;
use crate::error::{Error, Result};
use crate::lattice::LinearCode;

const CODEBOOK_BUDGET: u128 = 100_000;

/// Encoder configuration: a labeling, one linear code per coding level, and
/// the power scale γ.
#[derive(Debug, Clone)]
pub struct MlcEncoderConfig {
    pub labeling: LabelingMap,
    pub codes: Vec<LinearCode>,
    pub gamma: f64,
}

impl MlcEncoderConfig {
    pub fn new(labeling: LabelingMap, codes: Vec<LinearCode>, gamma: f64) -> Result<Self> {
        let sizes = labeling.coding_level_sizes();
        if codes.len() != sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: sizes.len(),
                got: codes.len(),
            });
        }
        for (c, &q) in codes.iter().zip(&sizes) {
            if c.q != q {
                return Err(Error::ModulusMismatch(c.q, q));
            }
        }
        let n = codes.first().map_or(0, LinearCode::length);
        if codes.iter().any(|c| c.length() != n) {
            return Err(Error::InvalidConfig(
                "all level codes must share the length N".into(),
            ));
        }
        Ok(Self {
            labeling,
            codes,
            gamma,
        })
    }

    pub fn block_length(&self) -> usize {
        self.codes.first().map_or(0, LinearCode::length)
    }

    pub fn num_levels(&self) -> usize {
        self.codes.len()
    }
}

/// Per-level function coefficient pairs; each pair must be nonzero.
pub fn validate_coeffs(coeffs: &[(u64, u64)], sizes: &[u64]) -> Result<()> {
    if coeffs.len() != sizes.len() {
        return Err(Error::DimensionMismatch {
            expected: sizes.len(),
            got: coeffs.len(),
        });
    }
    for (&(b1, b2), &q) in coeffs.iter().zip(sizes) {
        if b1 % q == 0 && b2 % q == 0 {
            return Err(Error::InvalidCoefficients(
                "coefficient pair (0,0) leaves the level function undefined".into(),
            ));
        }
    }
    Ok(())
}

/// Encode per-level message streams: c^l = G^l·w^l, then map the per-symbol
/// label tuple through γ·M.
pub fn mlc_encode(cfg: &MlcEncoderConfig, streams: &[Vec<u64>]) -> Result<Vec<Complex64>> {
    if streams.len() != cfg.num_levels() {
        return Err(Error::DimensionMismatch {
            expected: cfg.num_levels(),
            got: streams.len(),
        });
    }
    let words: Vec<Vec<u64>> = cfg
        .codes
        .iter()
        .zip(streams)
        .map(|(code, w)| code.encode(w))
        .collect::<Result<_>>()?;
    let n = cfg.block_length();
    Ok((0..n)
        .map(|i| {
            let values: Vec<u64> = words.iter().map(|c| c[i]).collect();
            let flat = cfg.labeling.flat_from_coding_values(&values);
            cfg.labeling.point_of(flat).complex() * cfg.gamma
        })
        .collect())
}

/// Per-symbol a-posteriori pmf over one level's function alphabet.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SymbolPosterior {
    pub level: usize,
    pub pmf: Vec<f64>,
    pub log_pmf: Vec<f64>,
}

impl SymbolPosterior {
    fn from_log_masses(level: usize, masses: &[f64]) -> Self {
        let max = masses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = masses.iter().map(|&m| (m - max).exp()).collect();
        let total: f64 = exp.iter().sum();
        let pmf: Vec<f64> = exp.iter().map(|e| e / total).collect();
        let log_total = total.ln();
        let log_pmf = masses.iter().map(|&m| m - max - log_total).collect();
        let check: f64 = pmf.iter().sum();
        debug_assert!((check - 1.0).abs() < 1e-12);
        Self {
            level,
            pmf,
            log_pmf,
        }
    }
}

/// Posterior of the level-l function value given the received symbol and the
/// function values already decided for levels < l: sums channel likelihoods
/// over every label pair consistent with the prefix, marginalizing the
/// levels above l.
pub fn app_level(
    y: Complex64,
    level: usize,
    prefix: &[u64],
    h: (Complex64, Complex64),
    coeffs: &[(u64, u64)],
    cfg: &MlcEncoderConfig,
    noise_var: f64,
) -> Result<SymbolPosterior> {
    let sizes = cfg.labeling.coding_level_sizes();
    validate_coeffs(coeffs, &sizes)?;
    if prefix.len() != level {
        return Err(Error::DimensionMismatch {
            expected: level,
            got: prefix.len(),
        });
    }
    let q = sizes[level] as usize;
    let mut masses = vec![f64::NEG_INFINITY; q];
    let total = cfg.labeling.size() as u64;
    for u in 0..total {
        let cu = cfg.labeling.coding_values(u);
        let xu = cfg.labeling.point_of(u).complex() * cfg.gamma;
        for v in 0..total {
            let cv = cfg.labeling.coding_values(v);
            let mut consistent = true;
            for s in 0..level {
                let f = (coeffs[s].0 * cu[s] + coeffs[s].1 * cv[s]) % sizes[s];
                if f != prefix[s] {
                    consistent = false;
                    break;
                }
            }
            if !consistent {
                continue;
            }
            let f = ((coeffs[level].0 * cu[level] + coeffs[level].1 * cv[level]) % sizes[level])
                as usize;
            let xv = cfg.labeling.point_of(v).complex() * cfg.gamma;
            let d = h.0 * xu + h.1 * xv - y;
            let logw = -d.norm_sqr() / noise_var;
            masses[f] = log_add(masses[f], logw);
        }
    }
    Ok(SymbolPosterior::from_log_masses(level, &masses))
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn check_codebook_budget(code: &LinearCode) -> Result<()> {
    if code.codebook_size() > CODEBOOK_BUDGET {
        return Err(Error::BudgetExceeded {
            size: code.codebook_size(),
            budget: CODEBOOK_BUDGET,
        });
    }
    Ok(())
}

/// Pick the codeword maximizing Σ_n log p(c[n]) over an enumerable codebook.
fn ml_codeword(code: &LinearCode, posteriors: &[SymbolPosterior]) -> Result<Vec<u64>> {
    check_codebook_budget(code)?;
    let mut best: Option<(f64, Vec<u64>)> = None;
    for cand in code.codewords() {
        let score: f64 = cand
            .iter()
            .zip(posteriors)
            .map(|(&c, p)| p.log_pmf[c as usize])
            .sum();
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, cand));
        }
    }
    Ok(best.expect("codebook is nonempty").1)
}

/// Multistage decoder: stage l maximizes the product of level-l posteriors
/// over C^l, conditioning on the previous stages' decisions.
pub fn multistage_decode(
    y: &[Complex64],
    cfg: &MlcEncoderConfig,
    h: (Complex64, Complex64),
    coeffs: &[(u64, u64)],
    noise_var: f64,
) -> Result<Vec<Vec<u64>>> {
    let n = cfg.block_length();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let mut decided: Vec<Vec<u64>> = Vec::with_capacity(cfg.num_levels());
    for level in 0..cfg.num_levels() {
        let posteriors: Vec<SymbolPosterior> = (0..n)
            .map(|i| {
                let prefix: Vec<u64> = decided.iter().map(|w| w[i]).collect();
                app_level(y[i], level, &prefix, h, coeffs, cfg, noise_var)
            })
            .collect::<Result<_>>()?;
        decided.push(ml_codeword(&cfg.codes[level], &posteriors)?);
    }
    Ok(decided)
}

/// Basis coordinates of a complex number in the ring's integer basis.
fn basis_coords(ring: Ring, z: Complex64) -> (f64, f64) {
    match ring {
        Ring::Integers => (z.re, 0.0),
        Ring::Gaussian => (z.re, z.im),
        Ring::Eisenstein => {
            let b = z.im * 2.0 / 3f64.sqrt();
            (z.re + b / 2.0, b)
        }
    }
}

/// z reduced modulo the complex lattice m·Λ_ring (nearest point subtracted).
pub fn fold_complex(z: Complex64, m: &RingElement) -> Complex64 {
    let mc = m.complex();
    let w = z / mc;
    let (wa, wb) = basis_coords(m.ring, w);
    let (fa, fb) = (wa.floor(), wb.floor());
    let mut best = z;
    let mut best_d = f64::INFINITY;
    let db_range = if m.ring == Ring::Integers {
        0..=0
    } else {
        0..=1
    };
    for da in 0..=1i64 {
        for db in db_range.clone() {
            let cand = RingElement::new(m.ring, fa as i64 + da, fb as i64 + db);
            let r = z - cand.complex() * mc;
            let d = r.norm_sqr();
            if d < best_d {
                best_d = d;
                best = r;
            }
        }
    }
    best
}

/// log Σ_{κ ∈ m·Λ} exp(−|delta − κ|²/σ²): wrapped-Gaussian log density up to
/// a constant, truncated where the tail is below e^−25 of the peak.
pub fn wrapped_log_likelihood(delta: Complex64, m: &RingElement, sigma2: f64) -> f64 {
    let cell = (m.norm() as f64).sqrt();
    let radius = (5.0 * sigma2.sqrt() + 2.0 * cell) / cell;
    let r = radius.ceil() as i64;
    let w = delta / m.complex();
    let (wa, wb) = basis_coords(m.ring, w);
    let (ca, cb) = (wa.round() as i64, wb.round() as i64);
    let mut acc = f64::NEG_INFINITY;
    let db_range = if m.ring == Ring::Integers {
        0..=0
    } else {
        -r..=r
    };
    for da in -r..=r {
        for db in db_range.clone() {
            let kappa = RingElement::new(m.ring, ca + da, cb + db);
            let d = delta - kappa.complex() * m.complex();
            acc = log_add(acc, -d.norm_sqr() / sigma2);
        }
    }
    acc
}

/// The folding decoders need per-level generators each divisible by every
/// other prime, so the mod-φ_l channel isolates level l, and exact ring
/// channel gains. Inert levels are not supported (their two coding streams
/// would share one fold).
fn check_foldable(cfg: &MlcEncoderConfig) -> Result<()> {
    if !cfg.labeling.kind.has_level_separated_generators() {
        return Err(Error::WrongLabelingKind(
            format!("{:?}", cfg.labeling.kind),
            "folding decoders need level-separated generators".into(),
        ));
    }
    let prime_levels = cfg.labeling.coding_to_prime_level();
    if prime_levels.len() != cfg.labeling.num_levels() {
        return Err(Error::WrongLabelingKind(
            format!("{:?}", cfg.labeling.kind),
            "folding decoders do not support inert levels".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldingMode {
    /// Subtract decided levels, fold mod φ_l (last level folds mod Φ).
    Successive,
    /// Fold the raw observation mod φ_l at every level.
    Parallel,
}

/// Per-symbol posterior of the level-l function on the folded channel: the
/// means are gen·(scale·f mod q) for f ∈ F_q and the noise is the
/// σ²-Gaussian wrapped on the folding lattice.
fn folded_posterior(
    t: Complex64,
    level: usize,
    gen: &RingElement,
    fold_cell: &RingElement,
    q: u64,
    mean_scale: u64,
    sigma2: f64,
) -> SymbolPosterior {
    let masses: Vec<f64> = (0..q)
        .map(|f| {
            let mean = gen.mul_scalar((mean_scale * f % q) as i64).complex();
            wrapped_log_likelihood(t - mean, fold_cell, sigma2)
        })
        .collect();
    SymbolPosterior::from_log_masses(level, &masses)
}

fn field_inverse(x: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = x % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    acc
}

/// The folded channel at level l carries gen_l·(σ(h₁)c₁ ⊕ σ(h₂)c₂); a
/// requested pair (b₁, b₂) is decodable from it iff it is a nonzero scalar
/// multiple β·(σ(h₁)^l, σ(h₂)^l). Returns β⁻¹, the scale mapping requested
/// function values onto channel means.
fn folding_mean_scale(s1: u64, s2: u64, b1: u64, b2: u64, q: u64) -> Result<u64> {
    let (s1, s2, b1, b2) = (s1 % q, s2 % q, b1 % q, b2 % q);
    let beta = if s1 != 0 {
        b1 * field_inverse(s1, q) % q
    } else if s2 != 0 {
        b2 * field_inverse(s2, q) % q
    } else {
        return Err(Error::InvalidCoefficients(
            "channel gains vanish at this level; no function is computable".into(),
        ));
    };
    if beta == 0 || b1 != beta * s1 % q || b2 != beta * s2 % q {
        return Err(Error::InvalidCoefficients(format!(
            "pair ({b1},{b2}) is not proportional to the channel residues ({s1},{s2}) mod {q}"
        )));
    }
    Ok(field_inverse(beta, q))
}

/// Successive or parallel folding decoder. Channel gains must be ring
/// integers (the experiments use h₁ = h₂ = 1); `noise_var` is the complex
/// noise variance of y before the 1/γ scaling.
pub fn folding_decode(
    y: &[Complex64],
    cfg: &MlcEncoderConfig,
    h: (RingElement, RingElement),
    coeffs: &[(u64, u64)],
    noise_var: f64,
    mode: FoldingMode,
) -> Result<Vec<Vec<u64>>> {
    check_foldable(cfg)?;
    let sizes = cfg.labeling.coding_level_sizes();
    validate_coeffs(coeffs, &sizes)?;
    let n = cfg.block_length();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let ring = cfg.labeling.constellation.spec.ring;
    if h.0.ring != ring || h.1.ring != ring {
        return Err(Error::RingMismatch(h.0.ring, ring));
    }
    // per-level channel residues: the canonical isomorphism Z[ω]/φ_l ≅ F_q
    // sends a ring gain to the integer r with φ_l | (h − r)
    let residues = |x: &RingElement| -> Result<Vec<u64>> {
        cfg.labeling
            .constellation
            .spec
            .primes
            .iter()
            .map(|p| {
                (0..p.residue_size)
                    .find(|&r| divides(&p.element, &x.sub(&RingElement::new(ring, r as i64, 0))))
                    .ok_or_else(|| {
                        Error::InvalidCoefficients(
                            "gain has no integer residue at this level".into(),
                        )
                    })
            })
            .collect()
    };
    let s1 = residues(&h.0)?;
    let s2 = residues(&h.1)?;
    let levels = cfg.num_levels();
    let sigma2 = noise_var / (cfg.gamma * cfg.gamma);
    let scaled: Vec<Complex64> = y.iter().map(|&v| v / cfg.gamma).collect();
    let mean_scales: Vec<u64> = (0..levels)
        .map(|l| folding_mean_scale(s1[l], s2[l], coeffs[l].0, coeffs[l].1, sizes[l]))
        .collect::<Result<_>>()?;
    let mut decided: Vec<Vec<u64>> = Vec::with_capacity(levels);
    for level in 0..levels {
        let phi = cfg.labeling.constellation.spec.primes[level].element;
        let gen = cfg.labeling.generators[level];
        let q = sizes[level];
        let fold_cell = match (mode, level == levels - 1) {
            (FoldingMode::Successive, true) => cfg.labeling.constellation.modulus,
            _ => phi,
        };
        let code = &cfg.codes[level];
        let posteriors: Vec<SymbolPosterior> = (0..n)
            .map(|i| {
                let mut t = scaled[i];
                if mode == FoldingMode::Successive {
                    // subtract the channel's own level functions, recovered
                    // from the decoded values through the per-level scale
                    for s in 0..level {
                        let f_h = mean_scales[s] * decided[s][i] % sizes[s];
                        t -= cfg.labeling.generators[s].mul_scalar(f_h as i64).complex();
                    }
                }
                folded_posterior(t, level, &gen, &fold_cell, q, mean_scales[level], sigma2)
            })
            .collect();
        decided.push(ml_codeword(code, &posteriors)?);
    }
    Ok(decided)
}

pub fn suboptimal_decode(
    y: &[Complex64],
    cfg: &MlcEncoderConfig,
    h: (RingElement, RingElement),
    coeffs: &[(u64, u64)],
    noise_var: f64,
) -> Result<Vec<Vec<u64>>> {
    folding_decode(y, cfg, h, coeffs, noise_var, FoldingMode::Successive)
}

pub fn parallel_decode(
    y: &[Complex64],
    cfg: &MlcEncoderConfig,
    h: (RingElement, RingElement),
    coeffs: &[(u64, u64)],
    noise_var: f64,
) -> Result<Vec<Vec<u64>>> {
    folding_decode(y, cfg, h, coeffs, noise_var, FoldingMode::Parallel)
}

/// A 2×2 matrix over F_q used by flexible decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlexMatrix(pub [[u64; 2]; 2]);

impl FlexMatrix {
    pub fn identity() -> Self {
        Self([[1, 0], [0, 1]])
    }

    pub fn is_full_rank(&self, q: u64) -> bool {
        let det = (self.0[0][0] * self.0[1][1] % q + q * q - self.0[0][1] * self.0[1][0] % q) % q;
        det != 0
    }

    /// The matrix representation of multiplication by b = b¹x + b⁰ in
    /// F_q[x]/(x² + c1·x + c0), acting on (c¹, c⁰) coefficient vectors.
    pub fn from_ext_scalar(b1: u64, b0: u64, field: &crate::algebra::ExtField) -> Self {
        let q = field.base_prime;
        let nc1 = (q - field.c1 % q) % q;
        let nc0 = (q - field.c0 % q) % q;
        Self([[(b0 + b1 * nc1) % q, b1 % q], [b1 * nc0 % q, b0 % q]])
    }
}

/// [c_R¹, c_R²]ᵀ = [B₁ B₂]·[c₁¹, c₁², c₂¹, c₂²]ᵀ over F_q, per symbol.
pub fn flexible_targets(
    c11: &[u64],
    c12: &[u64],
    c21: &[u64],
    c22: &[u64],
    b1: &FlexMatrix,
    b2: &FlexMatrix,
    q: u64,
) -> Result<(Vec<u64>, Vec<u64>)> {
    if !b1.is_full_rank(q) || !b2.is_full_rank(q) {
        return Err(Error::RankDeficient(q));
    }
    let n = c11.len();
    if [c12.len(), c21.len(), c22.len()] != [n, n, n] {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c12.len(),
        });
    }
    let mut r1 = Vec::with_capacity(n);
    let mut r2 = Vec::with_capacity(n);
    for i in 0..n {
        let row = |k: usize| {
            (b1.0[k][0] * c11[i] + b1.0[k][1] * c12[i] + b2.0[k][0] * c21[i] + b2.0[k][1] * c22[i])
                % q
        };
        r1.push(row(0));
        r2.push(row(1));
    }
    Ok((r1, r2))
}
