//! The Monte-Carlo mutual-information engine.
//!
//! Every estimator follows I(Y; V | W) = H(V | W) − E[H(V | Y, W)]: the
//! conditional entropy of the function value given the received symbol is
//! averaged over sampled symbol pairs and noise, and the prior entropy is
//! exact because uniform inputs make every admissible function balanced
//! (asserted during table construction).
//!
//! Pairs of labels are grouped by (channel mean, function value) ahead of
//! the sampling loop, so the per-sample cost is the number of distinct
//! groups, not the number of label pairs. For the folding decoders the
//! grouping is exact ring arithmetic (means collapse to the q_l per-level
//! points); likelihoods there are Gaussians wrapped on the folding lattice.

use num_complex::Complex64;
use rand::Rng;

use super::RateEstimate;
use crate::algebra::{ring_mod, RingElement};
use crate::constellation::LabelingMap;
use crate::error::{Error, Result};
use crate::mlc::{fold_complex, validate_coeffs, FlexMatrix};
use crate::rng::{self, complex_gaussian, MomentSums};

/// Channel gains: arbitrary complex for the multistage/direct estimators,
/// exact ring integers for the folding (sub/para) estimators.
#[derive(Debug, Clone, Copy)]
pub enum ChannelGains {
    Complex(Complex64, Complex64),
    Ring(RingElement, RingElement),
}

impl ChannelGains {
    pub fn as_complex(&self) -> (Complex64, Complex64) {
        match self {
            ChannelGains::Complex(a, b) => (*a, *b),
            ChannelGains::Ring(a, b) => (a.complex(), b.complex()),
        }
    }

    fn as_ring(&self) -> Option<(RingElement, RingElement)> {
        match self {
            ChannelGains::Complex(..) => None,
            ChannelGains::Ring(a, b) => Some((*a, *b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderMode {
    /// Multistage: level l conditions on the true lower-level functions.
    Mlc,
    /// Successive folding: subtract decided levels, fold mod φ_l
    /// (the last level stays unfolded).
    Sub,
    /// Parallel folding: fold the raw observation mod φ_l at every level.
    Para,
}

#[derive(Debug, Clone)]
pub struct MlcRates {
    pub per_level: Vec<RateEstimate>,
    pub sum: RateEstimate,
}

struct Group {
    mean: Complex64,
    target: u8,
    count: f64,
}

struct FoldSpec {
    /// Complex value of γ·φ (the folding lattice scale).
    cell: Complex64,
    modulus: RingElement,
    gamma: f64,
    /// Wrap offsets κ covering 5σ of Gaussian tail plus one cell of slack.
    offsets: Vec<Complex64>,
}

struct TermTable {
    q: u64,
    /// Conditioning bucket per pair (constant 0 for unconditional terms).
    pair_bucket: Vec<u32>,
    /// Subtraction offset per pair (successive mode), in the y domain.
    pair_offset: Vec<Complex64>,
    buckets: Vec<Vec<Group>>,
    fold: Option<FoldSpec>,
    offset_used: bool,
}

struct Engine {
    total_labels: u64,
    pair_mean: Vec<Complex64>,
    terms: Vec<TermTable>,
}

fn gamma_for(map: &LabelingMap, power: f64) -> f64 {
    (power / map.constellation.mean_energy()).sqrt()
}

fn quant_key(z: Complex64) -> (i64, i64) {
    let s = (1u64 << 20) as f64;
    ((z.re * s).round() as i64, (z.im * s).round() as i64)
}

fn entropy_bits(masses: &[f64]) -> f64 {
    let total: f64 = masses.iter().sum();
    masses
        .iter()
        .map(|&m| {
            // the probability (not the raw mass) must be positive: a
            // subnormal mass over a large total underflows to zero
            let p = m / total;
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum()
}

fn wrap_offsets(modulus: &RingElement, gamma: f64) -> Vec<Complex64> {
    let cell = gamma * (modulus.norm() as f64).sqrt();
    let r = (5.0 / cell + 2.0).ceil() as i64;
    let mc = modulus.complex() * gamma;
    let mut out = Vec::new();
    let b_range = if modulus.ring == crate::algebra::Ring::Integers {
        0..=0
    } else {
        -r..=r
    };
    for a in -r..=r {
        for b in b_range.clone() {
            let k = RingElement::new(modulus.ring, a, b);
            let kc = k.complex() * mc;
            if kc.norm() <= 5.0 + 2.0 * cell {
                out.push(kc);
            }
        }
    }
    out
}

/// Checks that the labeling supports per-level folding: level-separated
/// generators and no inert (two-stream) levels.
fn check_foldable_map(map: &LabelingMap) -> Result<()> {
    if !map.kind.has_level_separated_generators() {
        return Err(Error::WrongLabelingKind(
            format!("{:?}", map.kind),
            "folding estimators need level-separated generators".into(),
        ));
    }
    if map.coding_to_prime_level().len() != map.num_levels() {
        return Err(Error::WrongLabelingKind(
            format!("{:?}", map.kind),
            "folding estimators do not support inert levels".into(),
        ));
    }
    Ok(())
}

/// Term description: estimate I(Y^(mode); V^target | V^1..V^prefix_len).
fn build_engine(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    coeffs: &[(u64, u64)],
    terms: &[(usize, usize)],
    mode: DecoderMode,
) -> Result<Engine> {
    let sizes = map.coding_level_sizes();
    validate_coeffs(coeffs, &sizes)?;
    let gamma = gamma_for(map, power);
    let (h1, h2) = gains.as_complex();
    let hr = gains.as_ring();
    if mode != DecoderMode::Mlc {
        check_foldable_map(map)?;
        if hr.is_none() {
            return Err(Error::InvalidCoefficients(
                "folding estimators need exact ring-integer channel gains".into(),
            ));
        }
    }
    let q_count = map.size() as u64;
    let n_pairs = (q_count * q_count) as usize;
    let levels = sizes.len();

    // per-label data
    let coding: Vec<Vec<u64>> = (0..q_count).map(|i| map.coding_values(i)).collect();
    let points: Vec<RingElement> = (0..q_count).map(|i| map.point_of(i)).collect();
    let complex_pts: Vec<Complex64> = points.iter().map(RingElement::complex).collect();

    // per-pair channel means and function tuples
    let mut pair_mean = vec![Complex64::new(0.0, 0.0); n_pairs];
    let mut pair_f: Vec<Vec<u8>> = vec![Vec::new(); n_pairs];
    for u in 0..q_count as usize {
        for v in 0..q_count as usize {
            let p = u * q_count as usize + v;
            pair_mean[p] = (h1 * complex_pts[u] + h2 * complex_pts[v]) * gamma;
            pair_f[p] = (0..levels)
                .map(|l| {
                    ((coeffs[l].0 * coding[u][l] + coeffs[l].1 * coding[v][l]) % sizes[l]) as u8
                })
                .collect();
        }
    }

    // every level function must be balanced for H(V) = log q to hold
    for l in 0..levels {
        let mut counts = vec![0u64; sizes[l] as usize];
        for f in &pair_f {
            counts[f[l] as usize] += 1;
        }
        if counts.iter().any(|&c| c != counts[0]) {
            return Err(Error::InvalidCoefficients(format!(
                "level {l} function is not balanced"
            )));
        }
    }

    let mut tables = Vec::with_capacity(terms.len());
    for &(target, prefix_len) in terms {
        if mode != DecoderMode::Mlc
            && prefix_len != if mode == DecoderMode::Sub { target } else { 0 }
        {
            return Err(Error::InvalidConfig(
                "folding estimators use their fixed conditioning structure".into(),
            ));
        }
        let q = sizes[target];
        let prefix_radix: u64 = sizes[..prefix_len].iter().product();
        let mut pair_bucket = vec![0u32; n_pairs];
        let mut pair_offset = vec![Complex64::new(0.0, 0.0); n_pairs];
        let mut buckets: Vec<Vec<Group>> = (0..prefix_radix).map(|_| Vec::new()).collect();
        let mut index: std::collections::HashMap<(u32, u8, (i64, i64)), usize> =
            std::collections::HashMap::new();

        let fold = match mode {
            DecoderMode::Mlc => None,
            DecoderMode::Sub if target == levels - 1 => None,
            _ => {
                let phi = map.constellation.spec.primes[target].element;
                Some(FoldSpec {
                    cell: phi.complex() * gamma,
                    modulus: phi,
                    gamma,
                    offsets: wrap_offsets(&phi, gamma),
                })
            }
        };
        let offset_used = mode == DecoderMode::Sub && target > 0;

        for u in 0..q_count as usize {
            for v in 0..q_count as usize {
                let p = u * q_count as usize + v;
                let fv = &pair_f[p];
                let target_val = fv[target];
                let (bucket, mean_key, mean, offset) = match mode {
                    DecoderMode::Mlc => {
                        let mut b = 0u64;
                        for s in 0..prefix_len {
                            b = b * sizes[s] + fv[s] as u64;
                        }
                        let mean = pair_mean[p];
                        (
                            b as u32,
                            quant_key(mean / gamma),
                            mean,
                            Complex64::new(0.0, 0.0),
                        )
                    }
                    DecoderMode::Sub | DecoderMode::Para => {
                        let (hr1, hr2) = hr.expect("checked above");
                        let mut m = hr1.mul(&points[u]).add(&hr2.mul(&points[v]));
                        let mut sub = RingElement::zero(m.ring);
                        if mode == DecoderMode::Sub {
                            for (gen, &f) in map.generators.iter().zip(fv).take(target) {
                                sub = sub.add(&gen.mul_scalar(f as i64));
                            }
                            m = m.sub(&sub);
                        }
                        let key = match &fold {
                            Some(f) => ring_mod(&m, &f.modulus)?,
                            None => m,
                        };
                        (
                            0u32,
                            (key.a, key.b),
                            key.complex() * gamma,
                            sub.complex() * gamma,
                        )
                    }
                };
                pair_bucket[p] = bucket;
                pair_offset[p] = offset;
                let slot = *index
                    .entry((bucket, target_val, mean_key))
                    .or_insert_with(|| {
                        buckets[bucket as usize].push(Group {
                            mean,
                            target: target_val,
                            count: 0.0,
                        });
                        buckets[bucket as usize].len() - 1
                    });
                buckets[bucket as usize][slot].count += 1.0;
            }
        }
        tables.push(TermTable {
            q,
            pair_bucket,
            pair_offset,
            buckets,
            fold,
            offset_used,
        });
    }
    Ok(Engine {
        total_labels: q_count,
        pair_mean,
        terms: tables,
    })
}

impl TermTable {
    /// Conditional entropy of the term's target given one received symbol.
    fn sample_entropy(&self, pair: usize, y: Complex64, scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.resize(self.q as usize, 0.0);
        let groups = &self.buckets[self.pair_bucket[pair] as usize];
        match &self.fold {
            None => {
                let obs = if self.offset_used {
                    y - self.pair_offset[pair]
                } else {
                    y
                };
                let mut min_d2 = f64::INFINITY;
                for g in groups {
                    let d2 = (obs - g.mean).norm_sqr();
                    if d2 < min_d2 {
                        min_d2 = d2;
                    }
                }
                for g in groups {
                    let d2 = (obs - g.mean).norm_sqr();
                    scratch[g.target as usize] += g.count * (min_d2 - d2).exp();
                }
            }
            Some(f) => {
                let shifted = if self.offset_used {
                    y - self.pair_offset[pair]
                } else {
                    y
                };
                let obs = fold_complex(shifted / f.gamma, &f.modulus) * f.gamma;
                let _ = f.cell;
                // wrapped log-likelihood per group, then a stable softmax
                let mut logs = Vec::with_capacity(groups.len());
                let mut max_log = f64::NEG_INFINITY;
                for g in groups {
                    let mut m = f64::NEG_INFINITY;
                    let mut acc = 0.0;
                    for &k in &f.offsets {
                        let d2 = -(obs - g.mean - k).norm_sqr();
                        if d2 > m {
                            acc = acc * (m - d2).exp() + 1.0;
                            m = d2;
                        } else {
                            acc += (d2 - m).exp();
                        }
                    }
                    let log = m + acc.ln() + g.count.ln();
                    logs.push(log);
                    if log > max_log {
                        max_log = log;
                    }
                }
                for (g, &log) in groups.iter().zip(&logs) {
                    scratch[g.target as usize] += (log - max_log).exp();
                }
            }
        }
        entropy_bits(scratch)
    }
}

struct BlockSums {
    per_term: Vec<MomentSums>,
    total: MomentSums,
}

fn run_engine(engine: &Engine, n_samples: usize, seed: u64) -> (Vec<MomentSums>, MomentSums) {
    let q = engine.total_labels;
    let blocks = rng::run_blocks(n_samples, seed, |rng, len| {
        let mut sums = BlockSums {
            per_term: vec![MomentSums::default(); engine.terms.len()],
            total: MomentSums::default(),
        };
        let mut scratch = Vec::new();
        for _ in 0..len {
            let u = rng.gen_range(0..q) as usize;
            let v = rng.gen_range(0..q) as usize;
            let pair = u * q as usize + v;
            let y = engine.pair_mean[pair] + complex_gaussian(rng, 1.0);
            let mut total = 0.0;
            for (t, table) in engine.terms.iter().enumerate() {
                let h = table.sample_entropy(pair, y, &mut scratch);
                sums.per_term[t].push(h);
                total += h;
            }
            sums.total.push(total);
        }
        sums
    });
    let mut per_term = vec![MomentSums::default(); engine.terms.len()];
    let mut total = MomentSums::default();
    for b in &blocks {
        for (acc, s) in per_term.iter_mut().zip(&b.per_term) {
            acc.merge(s);
        }
        total.merge(&b.total);
    }
    (per_term, total)
}

/// Per-level achievable rates Σ_l I(Y^l; V^l | ·) for the chosen decoder,
/// with the sum's standard error taken from the per-sample total entropy.
pub fn mi_mlc(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    coeffs: &[(u64, u64)],
    mode: DecoderMode,
    n_samples: usize,
    seed: u64,
) -> Result<MlcRates> {
    let sizes = map.coding_level_sizes();
    let terms: Vec<(usize, usize)> = (0..sizes.len())
        .map(|l| (l, if mode == DecoderMode::Para { 0 } else { l }))
        .collect();
    let engine = build_engine(map, gains, power, coeffs, &terms, mode)?;
    let (per_term, total) = run_engine(&engine, n_samples, seed);
    let per_level: Vec<RateEstimate> = per_term
        .iter()
        .zip(&sizes)
        .map(|(s, &q)| RateEstimate {
            bits_per_complex_dim: (q as f64).log2() - s.mean(),
            stderr: s.stderr(),
            n_samples,
            seed,
        })
        .collect();
    let prior: f64 = sizes.iter().map(|&q| (q as f64).log2()).sum();
    let sum = RateEstimate {
        bits_per_complex_dim: prior - total.mean(),
        stderr: total.stderr(),
        n_samples,
        seed,
    };
    Ok(MlcRates { per_level, sum })
}

/// Unconditional first-stage term I(Y; V^level) under multistage
/// marginalization (no folding, no genie).
pub fn mi_mlc_marginal(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    coeffs: &[(u64, u64)],
    level: usize,
    n_samples: usize,
    seed: u64,
) -> Result<RateEstimate> {
    let engine = build_engine(map, gains, power, coeffs, &[(level, 0)], DecoderMode::Mlc)?;
    let (per_term, _) = run_engine(&engine, n_samples, seed);
    let q = map.coding_level_sizes()[level];
    Ok(RateEstimate {
        bits_per_complex_dim: (q as f64).log2() - per_term[0].mean(),
        stderr: per_term[0].stderr(),
        n_samples,
        seed,
    })
}

/// I(Y; b₁·C₁ ⊕ b₂·C₂) with coefficients acting through the label algebra
/// (extension-field or product-ring multiplication) — the rate of coding
/// directly over the full alphabet.
pub fn mi_direct(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    b1: u64,
    b2: u64,
    n_samples: usize,
    seed: u64,
) -> Result<RateEstimate> {
    let q_count = map.size() as u64;
    if b1 == 0 && b2 == 0 {
        return Err(Error::InvalidCoefficients(
            "direct coefficients are both zero".into(),
        ));
    }
    let gamma = gamma_for(map, power);
    let (h1, h2) = gains.as_complex();
    let complex_pts: Vec<Complex64> = (0..q_count).map(|i| map.point_of(i).complex()).collect();

    let n_pairs = (q_count * q_count) as usize;
    let mut pair_mean = vec![Complex64::new(0.0, 0.0); n_pairs];
    let mut counts = vec![0u64; q_count as usize];
    let mut merged: std::collections::HashMap<(u64, (i64, i64)), (Complex64, f64)> =
        std::collections::HashMap::new();
    for u in 0..q_count {
        let b1u = map.label_mul(b1, u);
        for v in 0..q_count {
            let p = (u * q_count + v) as usize;
            let mean = (h1 * complex_pts[u as usize] + h2 * complex_pts[v as usize]) * gamma;
            pair_mean[p] = mean;
            let target = map.label_add(b1u, map.label_mul(b2, v));
            counts[target as usize] += 1;
            let e = merged
                .entry((target, quant_key(mean / gamma)))
                .or_insert((mean, 0.0));
            e.1 += 1.0;
        }
    }
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(Error::InvalidCoefficients(
            "direct coefficients do not induce a balanced function".into(),
        ));
    }
    let mut wide: Vec<(Complex64, u64, f64)> = merged
        .into_iter()
        .map(|((target, _), (mean, count))| (mean, target, count))
        .collect();
    wide.sort_by_key(|a| (a.1, quant_key(a.0)));

    let blocks = rng::run_blocks(n_samples, seed, |rng, len| {
        let mut sums = MomentSums::default();
        let mut masses = vec![0.0f64; q_count as usize];
        for _ in 0..len {
            let u = rng.gen_range(0..q_count);
            let v = rng.gen_range(0..q_count);
            let y = pair_mean[(u * q_count + v) as usize] + complex_gaussian(rng, 1.0);
            let mut min_d2 = f64::INFINITY;
            for (mean, _, _) in &wide {
                let d2 = (y - mean).norm_sqr();
                if d2 < min_d2 {
                    min_d2 = d2;
                }
            }
            masses.iter_mut().for_each(|m| *m = 0.0);
            for (mean, target, count) in &wide {
                let d2 = (y - mean).norm_sqr();
                masses[*target as usize] += count * (min_d2 - d2).exp();
            }
            sums.push(entropy_bits(&masses));
        }
        sums
    });
    let mut sums = MomentSums::default();
    for b in &blocks {
        sums.merge(b);
    }
    Ok(RateEstimate {
        bits_per_complex_dim: (q_count as f64).log2() - sums.mean(),
        stderr: sums.stderr(),
        n_samples,
        seed,
    })
}

/// The four information terms behind the flexible-decoding rate for the
/// target pair (C_R¹, C_R²) = [B₁ B₂]·(c₁¹, c₁², c₂¹, c₂²).
#[derive(Debug, Clone, Copy)]
pub struct FlexibleRates {
    /// I(Y; C_R¹ | C_R²)
    pub first_given_second: RateEstimate,
    /// I(Y; C_R² | C_R¹)
    pub second_given_first: RateEstimate,
    /// I(Y; C_R¹, C_R²)
    pub joint: RateEstimate,
    /// I(Y; C_R¹, C_R² | C_R¹ ⊕ C_R²)
    pub joint_given_sum: RateEstimate,
}

impl FlexibleRates {
    /// The per-level flexible rate: min of the four terms with the joint
    /// term halved (both levels share one code).
    pub fn rate(&self) -> RateEstimate {
        let half_joint = RateEstimate {
            bits_per_complex_dim: self.joint.bits_per_complex_dim / 2.0,
            stderr: self.joint.stderr / 2.0,
            ..self.joint
        };
        *[
            &self.first_given_second,
            &self.second_given_first,
            &half_joint,
            &self.joint_given_sum,
        ]
        .iter()
        .copied()
        .min_by(|a, b| a.bits_per_complex_dim.total_cmp(&b.bits_per_complex_dim))
        .expect("four terms")
    }
}

/// Flexible-decoding information terms for the target pair
/// (C_R¹, C_R²) = [B₁ B₂]·(c₁¹, c₁², c₂¹, c₂²).
pub fn mi_flexible(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    b1: &FlexMatrix,
    b2: &FlexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<FlexibleRates> {
    let sizes = map.coding_level_sizes();
    if sizes.len() != 2 || sizes[0] != sizes[1] {
        return Err(Error::WrongLabelingKind(
            format!("{:?}", map.kind),
            "flexible decoding needs two coding levels over the same field".into(),
        ));
    }
    let q = sizes[0];
    if !b1.is_full_rank(q) || !b2.is_full_rank(q) {
        return Err(Error::RankDeficient(q));
    }
    let gamma = gamma_for(map, power);
    let (h1, h2) = gains.as_complex();
    let q_count = map.size() as u64;
    let coding: Vec<Vec<u64>> = (0..q_count).map(|i| map.coding_values(i)).collect();
    let pts: Vec<Complex64> = (0..q_count).map(|i| map.point_of(i).complex()).collect();

    type FlexKey = ((u8, u8), (i64, i64));
    let n_pairs = (q_count * q_count) as usize;
    let mut pair_mean = vec![Complex64::new(0.0, 0.0); n_pairs];
    let mut pair_r = vec![(0u8, 0u8); n_pairs];
    let mut merged: std::collections::HashMap<FlexKey, (Complex64, f64)> =
        std::collections::HashMap::new();
    for u in 0..q_count as usize {
        for v in 0..q_count as usize {
            let p = u * q_count as usize + v;
            let mean = (h1 * pts[u] + h2 * pts[v]) * gamma;
            pair_mean[p] = mean;
            let row = |k: usize| {
                ((b1.0[k][0] * coding[u][0]
                    + b1.0[k][1] * coding[u][1]
                    + b2.0[k][0] * coding[v][0]
                    + b2.0[k][1] * coding[v][1])
                    % q) as u8
            };
            let r = (row(0), row(1));
            pair_r[p] = r;
            let e = merged
                .entry((r, quant_key(mean / gamma)))
                .or_insert((mean, 0.0));
            e.1 += 1.0;
        }
    }
    let groups: Vec<(Complex64, (u8, u8), f64)> = {
        let mut g: Vec<_> = merged
            .into_iter()
            .map(|((r, _), (mean, count))| (mean, r, count))
            .collect();
        g.sort_by_key(|a| (a.1, quant_key(a.0)));
        g
    };

    let qs = q as usize;
    let blocks = rng::run_blocks(n_samples, seed, |rng, len| {
        let mut sums = [
            MomentSums::default(), // H(R¹ | Y, R²)
            MomentSums::default(), // H(R² | Y, R¹)
            MomentSums::default(), // H(R¹,R² | Y)
            MomentSums::default(), // H(R¹,R² | Y, R¹⊕R²)
        ];
        let mut joint = vec![0.0f64; qs * qs];
        let mut cond = vec![0.0f64; qs];
        for _ in 0..len {
            let u = rng.gen_range(0..q_count);
            let v = rng.gen_range(0..q_count);
            let pair = (u * q_count + v) as usize;
            let (r1t, r2t) = pair_r[pair];
            let y = pair_mean[pair] + complex_gaussian(rng, 1.0);
            let mut min_d2 = f64::INFINITY;
            for (mean, _, _) in &groups {
                let d2 = (y - mean).norm_sqr();
                if d2 < min_d2 {
                    min_d2 = d2;
                }
            }
            joint.iter_mut().for_each(|m| *m = 0.0);
            for (mean, (r1, r2), count) in &groups {
                let d2 = (y - mean).norm_sqr();
                joint[*r1 as usize * qs + *r2 as usize] += count * (min_d2 - d2).exp();
            }
            sums[2].push(entropy_bits(&joint));
            // R¹ given true R²
            for (i, m) in cond.iter_mut().enumerate() {
                *m = joint[i * qs + r2t as usize];
            }
            sums[0].push(entropy_bits(&cond));
            // R² given true R¹
            cond.copy_from_slice(&joint[r1t as usize * qs..r1t as usize * qs + qs]);
            sums[1].push(entropy_bits(&cond));
            // joint given the true sum R¹⊕R²
            let s = ((r1t as u64 + r2t as u64) % q) as usize;
            for (i, m) in cond.iter_mut().enumerate() {
                let r2 = (s + qs - i % qs) % qs;
                *m = joint[i * qs + r2];
            }
            sums[3].push(entropy_bits(&cond));
        }
        sums
    });
    let mut sums = [
        MomentSums::default(),
        MomentSums::default(),
        MomentSums::default(),
        MomentSums::default(),
    ];
    for b in &blocks {
        for (acc, s) in sums.iter_mut().zip(b.iter()) {
            acc.merge(s);
        }
    }
    let logq = (q as f64).log2();
    let mk = |bits: f64, stderr: f64| RateEstimate {
        bits_per_complex_dim: bits,
        stderr,
        n_samples,
        seed,
    };
    Ok(FlexibleRates {
        first_given_second: mk(logq - sums[0].mean(), sums[0].stderr()),
        second_given_first: mk(logq - sums[1].mean(), sums[1].stderr()),
        joint: mk(2.0 * logq - sums[2].mean(), sums[2].stderr()),
        joint_given_sum: mk(logq - sums[3].mean(), sums[3].stderr()),
    })
}

/// Greedy per-level maximization of the decoder rate over coefficient
/// classes (1, x) and (0, 1), using common random numbers so the argmax is
/// reproducible. Levels are searched in decoding order; lower-level choices
/// feed the conditioning of later levels.
pub fn maximize_coeffs_mi(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    mode: DecoderMode,
    n_samples: usize,
    seed: u64,
) -> Result<(Vec<(u64, u64)>, MlcRates)> {
    let sizes = map.coding_level_sizes();
    let mut coeffs: Vec<(u64, u64)> = sizes.iter().map(|_| (1, 1)).collect();
    for l in 0..sizes.len() {
        let mut candidates: Vec<(u64, u64)> = (0..sizes[l]).map(|x| (1, x)).collect();
        candidates.push((0, 1));
        let mut best: Option<((u64, u64), f64)> = None;
        for cand in candidates {
            coeffs[l] = cand;
            let prefix_len = if mode == DecoderMode::Para { 0 } else { l };
            let engine = build_engine(map, gains, power, &coeffs, &[(l, prefix_len)], mode)?;
            let (per_term, _) = run_engine(&engine, n_samples, seed);
            let bits = (sizes[l] as f64).log2() - per_term[0].mean();
            if best.as_ref().is_none_or(|(_, b)| bits > *b) {
                best = Some((cand, bits));
            }
        }
        coeffs[l] = best.expect("candidate list is nonempty").0;
    }
    let rates = mi_mlc(map, gains, power, &coeffs, mode, n_samples, seed)?;
    Ok((coeffs, rates))
}

/// Common-random-number maximization of the direct rate over coefficient
/// classes. Requires a single-level labeling so the alphabet is a field.
pub fn maximize_direct_mi(
    map: &LabelingMap,
    gains: ChannelGains,
    power: f64,
    n_samples: usize,
    seed: u64,
) -> Result<((u64, u64), RateEstimate)> {
    if map.num_levels() != 1 {
        return Err(Error::WrongLabelingKind(
            format!("{:?}", map.kind),
            "direct maximization needs a field alphabet (single prime level)".into(),
        ));
    }
    let q_count = map.size() as u64;
    let mut candidates: Vec<(u64, u64)> = (0..q_count).map(|x| (1, x)).collect();
    candidates.push((0, 1));
    let mut best: Option<((u64, u64), RateEstimate)> = None;
    for (b1, b2) in candidates {
        let est = mi_direct(map, gains, power, b1, b2, n_samples, seed)?;
        if best
            .as_ref()
            .is_none_or(|(_, e)| est.bits_per_complex_dim > e.bits_per_complex_dim)
        {
            best = Some(((b1, b2), est));
        }
    }
    Ok(best.expect("candidate list is nonempty"))
}
