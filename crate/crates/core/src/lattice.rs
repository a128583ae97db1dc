//! Product-construction lattices at small dimension: membership, exact
//! multistage decomposition, brute-force nearest-neighbor quantization,
//! mod-Λ, Monte-Carlo second moment, and nested codebooks.
//!
//! A product lattice over Z is Λ = γ·(Πp_l)⁻¹·M(C¹,…,C^L) + γ·Zᴺ, where M is
//! the coordinatewise CRT ring isomorphism from F_{p_1}×…×F_{p_L} onto
//! Z/Πp_l·Z with representatives in [0, Πp_l).

use serde::{Deserialize, Serialize};

use crate::algebra::{bezout, is_rational_prime, RingElement};
use crate::error::{Error, Result};
use crate::rng::{self, MomentSums};

/// Enumeration guard for brute-force codebook scans.
const CODEBOOK_BUDGET: u128 = 1_000_000;
const NESTED_BUDGET: u128 = 100_000;

/// A generator-matrix linear code over F_q: codewords are G·w for w ∈ F_q^m,
/// with G an N×m matrix of full column rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCode {
    pub q: u64,
    /// N×m generator, row-major: gen[n][k].
    pub gen: Vec<Vec<u64>>,
}

impl LinearCode {
    pub fn new(q: u64, gen: Vec<Vec<u64>>) -> Result<Self> {
        if !is_rational_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let code = Self { q, gen };
        if code.rank() != code.dimension() {
            return Err(Error::RankDeficient(q));
        }
        Ok(code)
    }

    /// The identity code of length n (every vector is a codeword).
    pub fn identity(q: u64, n: usize) -> Self {
        let gen = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        Self { q, gen }
    }

    pub fn length(&self) -> usize {
        self.gen.len()
    }

    pub fn dimension(&self) -> usize {
        self.gen.first().map_or(0, Vec::len)
    }

    pub fn codebook_size(&self) -> u128 {
        (self.q as u128).pow(self.dimension() as u32)
    }

    /// c = G·w over F_q.
    pub fn encode(&self, w: &[u64]) -> Result<Vec<u64>> {
        if w.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: w.len(),
            });
        }
        Ok(self
            .gen
            .iter()
            .map(|row| {
                row.iter()
                    .zip(w)
                    .map(|(&g, &wi)| g * wi % self.q)
                    .sum::<u64>()
                    % self.q
            })
            .collect())
    }

    /// All codewords, in message odometer order.
    pub fn codewords(&self) -> Vec<Vec<u64>> {
        let mut words = Vec::new();
        let mut w = vec![0u64; self.dimension()];
        loop {
            words.push(self.encode(&w).expect("dimension matches"));
            if !increment(&mut w, self.q) {
                break;
            }
        }
        words
    }

    /// Column rank over F_q by Gaussian elimination.
    #[allow(clippy::needless_range_loop)] // rows are indexed against the pivot row
    fn rank(&self) -> usize {
        let mut m: Vec<Vec<u64>> = self.gen.clone();
        let rows = self.length();
        let cols = self.dimension();
        let q = self.q;
        let mut rank = 0;
        for col in 0..cols {
            let pivot = (rank..rows).find(|&r| !m[r][col].is_multiple_of(q));
            let Some(p) = pivot else { continue };
            m.swap(rank, p);
            let inv = mod_inverse(m[rank][col], q);
            for x in m[rank].iter_mut() {
                *x = *x * inv % q;
            }
            for r in 0..rows {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in 0..cols {
                        m[r][c] = (m[r][c] + (q - f) * m[rank][c]) % q;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Whether v is a codeword: solve G·w = v over F_q.
    pub fn contains(&self, v: &[u64]) -> bool {
        self.solve(v).is_some()
    }

    /// Message w with G·w = v, if one exists.
    #[allow(clippy::needless_range_loop)] // rows are indexed against the pivot row
    pub fn solve(&self, v: &[u64]) -> Option<Vec<u64>> {
        if v.len() != self.length() {
            return None;
        }
        let q = self.q;
        let cols = self.dimension();
        let mut m: Vec<Vec<u64>> = self
            .gen
            .iter()
            .zip(v)
            .map(|(row, &b)| {
                let mut r = row.clone();
                r.push(b % q);
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, p);
            let inv = mod_inverse(m[rank][col], q);
            for x in m[rank].iter_mut() {
                *x = *x * inv % q;
            }
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in 0..=cols {
                        m[r][c] = (m[r][c] + (q - f) * m[rank][c]) % q;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        // inconsistent rows ⇒ not a codeword
        for r in rank..m.len() {
            if m[r][cols] != 0 {
                return None;
            }
        }
        let mut w = vec![0u64; cols];
        for (r, &col) in pivots.iter().enumerate() {
            w[col] = m[r][cols];
        }
        Some(w)
    }
}

fn mod_inverse(x: u64, q: u64) -> u64 {
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

/// Λ = γ·(Πp_l)⁻¹·M(C¹,…,C^L) + γ·Zᴺ over the integers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductLattice {
    pub primes: Vec<u64>,
    pub codes: Vec<LinearCode>,
    pub gamma: f64,
    /// CRT idempotents of the coordinate map, reduced into [0, Πp).
    idempotents: Vec<u64>,
    /// Dimension when there are no coded levels (plain γ·Zᴺ).
    #[serde(default)]
    cubic_dim: usize,
}

impl ProductLattice {
    pub fn new(primes: Vec<u64>, codes: Vec<LinearCode>, gamma: f64) -> Result<Self> {
        if primes.len() != codes.len() {
            return Err(Error::DimensionMismatch {
                expected: primes.len(),
                got: codes.len(),
            });
        }
        for (p, c) in primes.iter().zip(&codes) {
            if !is_rational_prime(*p) {
                return Err(Error::NotPrime(*p));
            }
            if c.q != *p {
                return Err(Error::ModulusMismatch(c.q, *p));
            }
        }
        let n = codes.first().map_or(0, LinearCode::length);
        if codes.iter().any(|c| c.length() != n) {
            return Err(Error::InvalidConfig(
                "all level codes must share the length N".into(),
            ));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidConfig("gamma must be positive".into()));
        }
        for i in 0..primes.len() {
            for j in (i + 1)..primes.len() {
                if primes[i] == primes[j] {
                    return Err(Error::NotCoprime(primes[i]));
                }
            }
        }
        let modulus: u64 = primes.iter().product();
        let idempotents = integer_idempotents(&primes, modulus)?;
        Ok(Self {
            primes,
            codes,
            gamma,
            idempotents,
            cubic_dim: n,
        })
    }

    /// The power-targeted scale preset γ = 2√(N·P).
    pub fn gamma_for_power(n: usize, power: f64) -> f64 {
        2.0 * (n as f64 * power).sqrt()
    }

    /// The noise-targeted scale preset γ = 2√(N·(η² + ε)).
    pub fn gamma_for_noise(n: usize, noise_var: f64, slack: f64) -> f64 {
        2.0 * (n as f64 * (noise_var + slack)).sqrt()
    }

    /// Degenerate L = 0 lattice γ·Zᴺ of the given dimension.
    pub fn cubic(dimension: usize, gamma: f64) -> Self {
        Self {
            primes: Vec::new(),
            codes: Vec::new(),
            gamma,
            idempotents: Vec::new(),
            cubic_dim: dimension,
        }
    }

    pub fn length(&self) -> usize {
        self.codes
            .first()
            .map_or(self.cubic_dim, LinearCode::length)
    }

    pub fn modulus(&self) -> u64 {
        self.primes.iter().product()
    }

    /// Coordinate map M(v¹,…,v^L) = Σ v_l·e_l mod Πp, into [0, Πp).
    pub fn coordinate_map(&self, values: &[u64]) -> u64 {
        let m = self.modulus();
        values
            .iter()
            .zip(&self.idempotents)
            .fold(0u64, |acc, (&v, &e)| (acc + v % m * e) % m)
    }

    /// Inverse coordinate map: residues of x mod each p_l.
    pub fn coordinate_demap(&self, x: i64) -> Vec<u64> {
        self.primes
            .iter()
            .map(|&p| x.rem_euclid(p as i64) as u64)
            .collect()
    }

    /// Whether the integer vector x lies in the unscaled lattice
    /// M(C¹,…,C^L) + Πp·Zᴺ, i.e. every per-level residue word is a codeword.
    pub fn is_member(&self, x: &[i64]) -> Result<bool> {
        if x.len() != self.length() {
            return Err(Error::DimensionMismatch {
                expected: self.length(),
                got: x.len(),
            });
        }
        for (l, code) in self.codes.iter().enumerate() {
            let word: Vec<u64> = x
                .iter()
                .map(|&xi| xi.rem_euclid(self.primes[l] as i64) as u64)
                .collect();
            if !code.contains(&word) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact multistage decomposition y = M(ĉ¹,…,ĉ^L) + Πp·ζ.
    pub fn decompose(&self, y: &[i64]) -> Decomposition {
        let m = self.modulus() as i64;
        let level_words: Vec<Vec<u64>> = (0..self.primes.len())
            .map(|l| {
                y.iter()
                    .map(|&yi| yi.rem_euclid(self.primes[l] as i64) as u64)
                    .collect()
            })
            .collect();
        let carry: Vec<i64> = y
            .iter()
            .map(|&yi| {
                let base = self.coordinate_map(&self.coordinate_demap(yi)) as i64;
                debug_assert_eq!((yi - base).rem_euclid(m), 0);
                (yi - base).div_euclid(m)
            })
            .collect();
        Decomposition { level_words, carry }
    }

    /// Recombine a decomposition back to the integer vector.
    pub fn recombine(&self, d: &Decomposition) -> Vec<i64> {
        let m = self.modulus() as i64;
        (0..d.carry.len())
            .map(|n| {
                let values: Vec<u64> = d.level_words.iter().map(|w| w[n]).collect();
                self.coordinate_map(&values) as i64 + m * d.carry[n]
            })
            .collect()
    }

    fn check_budget(&self) -> Result<()> {
        let size: u128 = self.codes.iter().map(LinearCode::codebook_size).product();
        if size > CODEBOOK_BUDGET {
            return Err(Error::BudgetExceeded {
                size,
                budget: CODEBOOK_BUDGET,
            });
        }
        Ok(())
    }

    /// Per-coordinate residues M(c¹[n],…,c^L[n]) of every codeword tuple.
    fn codeword_images(&self) -> Result<Vec<Vec<u64>>> {
        self.check_budget()?;
        let n = self.length();
        if self.codes.is_empty() {
            return Ok(vec![vec![0u64; n]]);
        }
        let level_words: Vec<Vec<Vec<u64>>> =
            self.codes.iter().map(LinearCode::codewords).collect();
        let mut images = Vec::new();
        let mut idx = vec![0usize; self.codes.len()];
        loop {
            let image: Vec<u64> = (0..n)
                .map(|coord| {
                    let values: Vec<u64> = idx
                        .iter()
                        .enumerate()
                        .map(|(l, &i)| level_words[l][i][coord])
                        .collect();
                    self.coordinate_map(&values)
                })
                .collect();
            images.push(image);
            let mut l = 0;
            loop {
                idx[l] += 1;
                if idx[l] < level_words[l].len() {
                    break;
                }
                idx[l] = 0;
                l += 1;
                if l == idx.len() {
                    return Ok(images);
                }
            }
        }
    }

    /// Exact nearest lattice point to y. For each codeword image the nearest
    /// integer shift is coordinatewise rounding; the argmin over codeword
    /// images is exact. Ties resolve to the first image in enumeration order.
    pub fn quantize_nn(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.length() {
            return Err(Error::DimensionMismatch {
                expected: self.length(),
                got: y.len(),
            });
        }
        let m = self.modulus() as f64;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for image in self.codeword_images()? {
            let mut dist = 0.0;
            let mut point = Vec::with_capacity(y.len());
            for (coord, &yi) in y.iter().enumerate() {
                let base = self.gamma * image[coord] as f64 / m;
                let shift = ((yi - base) / self.gamma).round();
                let p = base + self.gamma * shift;
                dist += (yi - p) * (yi - p);
                point.push(p);
            }
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                best = Some((dist, point));
            }
        }
        Ok(best.expect("codebook contains at least the zero word").1)
    }

    /// y − Q(y): the quantization error, inside the fundamental Voronoi region.
    pub fn mod_lattice(&self, y: &[f64]) -> Result<Vec<f64>> {
        let q = self.quantize_nn(y)?;
        Ok(y.iter().zip(&q).map(|(a, b)| a - b).collect())
    }

    /// Exact Voronoi volume γᴺ·Π p_l^(−m_l) (full-rank generators).
    pub fn voronoi_volume(&self) -> f64 {
        let n = self.length();
        let mut v = self.gamma.powi(n as i32);
        for (p, c) in self.primes.iter().zip(&self.codes) {
            v /= (*p as f64).powi(c.dimension() as i32);
        }
        v
    }

    /// Monte-Carlo second moment σ², normalized second moment G, and their
    /// standard errors. Samples are uniform on γ·[0,1)ᴺ, which folds to an
    /// exactly uniform distribution over the Voronoi region.
    pub fn second_moment_mc(&self, n_samples: usize, seed: u64) -> Result<SecondMoment> {
        self.check_budget()?;
        let n = self.length();
        let blocks = rng::run_blocks(n_samples, seed, |rng, len| {
            let mut sums = MomentSums::default();
            for _ in 0..len {
                let u: Vec<f64> = (0..n)
                    .map(|_| rand::Rng::gen::<f64>(rng) * self.gamma)
                    .collect();
                let e = self.mod_lattice(&u).expect("budget already checked");
                sums.push(e.iter().map(|x| x * x).sum::<f64>() / n as f64);
            }
            sums
        });
        let mut sums = MomentSums::default();
        for b in &blocks {
            sums.merge(b);
        }
        let sigma2 = sums.mean();
        let scale = self.voronoi_volume().powf(2.0 / n as f64);
        Ok(SecondMoment {
            sigma2,
            g: sigma2 / scale,
            stderr_sigma2: sums.stderr(),
            stderr_g: sums.stderr() / scale,
            n_samples,
            seed,
        })
    }
}

fn increment(w: &mut [u64], q: u64) -> bool {
    for x in w.iter_mut() {
        *x += 1;
        if *x < q {
            return true;
        }
        *x = 0;
    }
    false
}

fn integer_idempotents(primes: &[u64], modulus: u64) -> Result<Vec<u64>> {
    if primes.len() == 1 {
        return Ok(vec![1 % modulus]);
    }
    primes
        .iter()
        .map(|&p| {
            let others = (modulus / p) as i64;
            let (g, _, t) = bezout(&RingElement::int(p as i64), &RingElement::int(others))?;
            if !g.is_unit() {
                return Err(Error::NotCoprime(g.norm()));
            }
            // g = ±1 over Z, so e = t·others·g is ≡ 1 mod p, ≡ 0 elsewhere
            let e = t.a * others * g.a;
            Ok(e.rem_euclid(modulus as i64) as u64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// ĉ^l per level, each of length N.
    pub level_words: Vec<Vec<u64>>,
    /// ζ ∈ Zᴺ with y = M(ĉ) + Πp·ζ.
    pub carry: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondMoment {
    pub sigma2: f64,
    pub g: f64,
    pub stderr_sigma2: f64,
    pub stderr_g: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Per-level nested code pair G_f = [G_c | G̃]: the coarse code is spanned by
/// the first `coarse_dimension` columns of the fine generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NestedPair {
    pub fine: LinearCode,
    pub coarse_dimension: usize,
}

impl NestedPair {
    pub fn new(fine: LinearCode, coarse_dimension: usize) -> Result<Self> {
        if coarse_dimension > fine.dimension() {
            return Err(Error::DimensionMismatch {
                expected: fine.dimension(),
                got: coarse_dimension,
            });
        }
        Ok(Self {
            fine,
            coarse_dimension,
        })
    }
}

/// Nested codebook Λ_f ∩ V(Λ_c) with its design rate Σ((m_f−m_c)/N)·log₂ p_l.
#[derive(Debug, Clone)]
pub struct NestedCodebook {
    pub points: Vec<Vec<f64>>,
    pub design_rate_bits_per_dim: f64,
}

/// Enumerate the fine-lattice coset representatives inside the coarse
/// Voronoi region: messages range over the extension coordinates only and
/// every image is reduced mod Λ_c.
pub fn nested_codebook(pairs: &[NestedPair], primes: &[u64], gamma: f64) -> Result<NestedCodebook> {
    let size: u128 = pairs
        .iter()
        .map(|p| (p.fine.q as u128).pow((p.fine.dimension() - p.coarse_dimension) as u32))
        .product();
    if size > NESTED_BUDGET {
        return Err(Error::BudgetExceeded {
            size,
            budget: NESTED_BUDGET,
        });
    }
    let fine_codes: Vec<LinearCode> = pairs.iter().map(|p| p.fine.clone()).collect();
    let fine = ProductLattice::new(primes.to_vec(), fine_codes, gamma)?;
    let coarse_codes: Vec<LinearCode> = pairs
        .iter()
        .map(|p| {
            let gen: Vec<Vec<u64>> = p
                .fine
                .gen
                .iter()
                .map(|row| row[..p.coarse_dimension].to_vec())
                .collect();
            LinearCode { q: p.fine.q, gen }
        })
        .collect();
    let coarse = ProductLattice::new(primes.to_vec(), coarse_codes, gamma)?;

    let n = fine.length();
    let m = fine.modulus() as f64;
    let design_rate = pairs
        .iter()
        .zip(primes)
        .map(|(p, &pl)| {
            (p.fine.dimension() - p.coarse_dimension) as f64 / n as f64 * (pl as f64).log2()
        })
        .sum();
    let mut points = Vec::with_capacity(size as usize);
    let mut ext_words: Vec<Vec<u64>> = pairs
        .iter()
        .map(|p| vec![0u64; p.fine.dimension() - p.coarse_dimension])
        .collect();
    'outer: loop {
        let images: Vec<Vec<u64>> = pairs
            .iter()
            .zip(&ext_words)
            .map(|(p, ext)| {
                let mut w = vec![0u64; p.fine.dimension()];
                w[p.coarse_dimension..].copy_from_slice(ext);
                p.fine.encode(&w).expect("dimension matches")
            })
            .collect();
        let x: Vec<f64> = (0..n)
            .map(|coord| {
                let values: Vec<u64> = images.iter().map(|c| c[coord]).collect();
                gamma * fine.coordinate_map(&values) as f64 / m
            })
            .collect();
        points.push(coarse.mod_lattice(&x)?);

        let mut level = 0;
        loop {
            if level == ext_words.len() {
                break 'outer;
            }
            if increment(&mut ext_words[level], pairs[level].fine.q) {
                break;
            }
            level += 1;
        }
    }
    dedup_points(&mut points);
    Ok(NestedCodebook {
        points,
        design_rate_bits_per_dim: design_rate,
    })
}

fn dedup_points(points: &mut Vec<Vec<f64>>) {
    let mut seen = std::collections::HashSet::new();
    points.retain(|p| {
        let key: Vec<i64> = p.iter().map(|x| (x * 1e9).round() as i64).collect();
        seen.insert(key)
    });
}

/// (α·y + Σ_k a_k·u_k) mod Λ_c — the receiver front end that removes dithers
/// and folds into the coarse Voronoi region.
pub fn cf_frontend(
    y: &[f64],
    alpha: f64,
    dithers: &[Vec<f64>],
    coeffs: &[i64],
    coarse: &ProductLattice,
) -> Result<Vec<f64>> {
    if dithers.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: coeffs.len(),
            got: dithers.len(),
        });
    }
    let mut v: Vec<f64> = y.iter().map(|&x| alpha * x).collect();
    for (u, &a) in dithers.iter().zip(coeffs) {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: v.len(),
                got: u.len(),
            });
        }
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi += a as f64 * ui;
        }
    }
    coarse.mod_lattice(&v)
}

/// Uniform dither over the coarse Voronoi region: uniform on the cube
/// γ·[0,1)ᴺ folded mod Λ_c, exact by periodicity.
pub fn sample_dither(
    coarse: &ProductLattice,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Vec<f64>> {
    let u: Vec<f64> = (0..n)
        .map(|_| rand::Rng::gen::<f64>(rng) * coarse.gamma)
        .collect();
    coarse.mod_lattice(&u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The two-source worked example: F₂ code [1,1]ᵀ, F₃ code [1,2]ᵀ.
    fn example_lattice() -> ProductLattice {
        let c1 = LinearCode::new(2, vec![vec![1], vec![1]]).unwrap();
        let c2 = LinearCode::new(3, vec![vec![1], vec![2]]).unwrap();
        ProductLattice::new(vec![2, 3], vec![c1, c2], 1.0).unwrap()
    }

    #[test]
    fn coordinate_map_is_z6_table() {
        let lat = example_lattice();
        // 0↔(0,0) 1↔(1,1) 2↔(0,2) 3↔(1,0) 4↔(0,1) 5↔(1,2)
        assert_eq!(lat.coordinate_map(&[0, 0]), 0);
        assert_eq!(lat.coordinate_map(&[1, 1]), 1);
        assert_eq!(lat.coordinate_map(&[0, 2]), 2);
        assert_eq!(lat.coordinate_map(&[1, 0]), 3);
        assert_eq!(lat.coordinate_map(&[0, 1]), 4);
        assert_eq!(lat.coordinate_map(&[1, 2]), 5);
    }

    #[test]
    fn golden_membership() {
        let lat = example_lattice();
        assert!(lat.is_member(&[1, 5]).unwrap());
        assert!(lat.is_member(&[2, 4]).unwrap());
        assert!(lat.is_member(&[11, 31]).unwrap());
        assert!(!lat.is_member(&[1, 0]).unwrap());
    }

    #[test]
    fn golden_decompose() {
        let lat = example_lattice();
        let d = lat.decompose(&[11, 31]);
        assert_eq!(d.level_words, vec![vec![1, 1], vec![2, 1]]);
        assert_eq!(d.carry, vec![1, 5]);
        assert_eq!(lat.recombine(&d), vec![11, 31]);

        let z = lat.decompose(&[0, 0]);
        assert_eq!(z.level_words, vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(z.carry, vec![0, 0]);
    }

    #[test]
    fn closure_under_integer_combinations() {
        let lat = example_lattice();
        let x1 = [1i64, 5];
        let x2 = [2i64, 4];
        for a in -7..=7i64 {
            for b in -7..=7i64 {
                let y = [a * x1[0] + b * x2[0], a * x1[1] + b * x2[1]];
                assert!(lat.is_member(&y).unwrap());
            }
        }
    }

    #[test]
    fn quantize_exact_on_lattice_points() {
        let lat = example_lattice();
        // γ(Πp)⁻¹·[1,5] is a lattice point
        let p = [1.0 / 6.0, 5.0 / 6.0];
        let q = lat.quantize_nn(&p).unwrap();
        assert!(q.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12));
        // a perturbation below half the minimum distance still maps to it
        let y = [p[0] + 0.02, p[1] - 0.03];
        let q = lat.quantize_nn(&y).unwrap();
        assert!(q.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn cubic_quantize_is_rounding() {
        let lat = ProductLattice::cubic(1, 1.0);
        assert_eq!(lat.quantize_nn(&[0.7]).unwrap(), vec![1.0]);
        let e = lat.mod_lattice(&[0.7]).unwrap();
        assert!((e[0] + 0.3).abs() < 1e-12);
    }

    #[test]
    fn mod_lattice_periodicity() {
        let lat = example_lattice();
        let y = [0.37, -1.22];
        let e1 = lat.mod_lattice(&y).unwrap();
        // shift by the lattice point [1,5]/6 + integer offsets
        let y2 = [y[0] + 1.0 / 6.0 + 2.0, y[1] + 5.0 / 6.0 - 1.0];
        let e2 = lat.mod_lattice(&y2).unwrap();
        assert!(e1.iter().zip(&e2).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn second_moment_z1() {
        let lat = ProductLattice::cubic(1, 1.0);
        let sm = lat.second_moment_mc(200_000, 9).unwrap();
        assert!((sm.sigma2 - 1.0 / 12.0).abs() < 3.0 * sm.stderr_sigma2 + 1e-4);
        assert!((sm.g - 1.0 / 12.0).abs() < 3.0 * sm.stderr_g + 1e-4);
    }

    #[test]
    fn second_moment_worker_independent() {
        let lat = example_lattice();
        let a = lat.second_moment_mc(20_000, 3).unwrap();
        let b = lat.second_moment_mc(20_000, 3).unwrap();
        assert_eq!(a.sigma2.to_bits(), b.sigma2.to_bits());
        assert_eq!(a.g.to_bits(), b.g.to_bits());
    }

    #[test]
    fn nested_codebook_golden() {
        let pairs = vec![
            NestedPair::new(LinearCode::new(2, vec![vec![1], vec![1]]).unwrap(), 0).unwrap(),
            NestedPair::new(LinearCode::new(3, vec![vec![1], vec![2]]).unwrap(), 0).unwrap(),
        ];
        let cb = nested_codebook(&pairs, &[2, 3], 1.0).unwrap();
        assert_eq!(cb.points.len(), 6);
        let expected = 0.5 * 2f64.log2() + 0.5 * 3f64.log2();
        assert!((cb.design_rate_bits_per_dim - expected).abs() < 1e-12);
    }

    #[test]
    fn nested_codebook_degenerate() {
        // m_c = m_f at every level: single point 0
        let pairs =
            vec![NestedPair::new(LinearCode::new(2, vec![vec![1], vec![1]]).unwrap(), 1).unwrap()];
        let cb = nested_codebook(&pairs, &[2], 1.0).unwrap();
        assert_eq!(cb.points.len(), 1);
        assert!(cb.points[0].iter().all(|x| x.abs() < 1e-9));
        assert_eq!(cb.design_rate_bits_per_dim, 0.0);
    }

    #[test]
    fn frontend_identity_and_zero() {
        let lat = example_lattice();
        let y = lat.mod_lattice(&[0.1, 0.2]).unwrap();
        let out = cf_frontend(&y, 1.0, &[], &[], &lat).unwrap();
        assert!(out.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-12));
        let out = cf_frontend(&[3.4, -1.2], 0.0, &[vec![0.0, 0.0]], &[5], &lat).unwrap();
        assert!(out.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn frontend_cancels_dithers_noiselessly() {
        // noiseless h = a: the front end recovers Σ a_k·t_k mod Λ_c
        let lat = example_lattice();
        let mut rng = crate::rng::rng_for(77);
        let t1 = sample_dither(&lat, 2, &mut rng).unwrap();
        let t2 = sample_dither(&lat, 2, &mut rng).unwrap();
        let u1 = sample_dither(&lat, 2, &mut rng).unwrap();
        let u2 = sample_dither(&lat, 2, &mut rng).unwrap();
        let (a1, a2) = (3i64, -2i64);
        let x1 = lat.mod_lattice(&[t1[0] - u1[0], t1[1] - u1[1]]).unwrap();
        let x2 = lat.mod_lattice(&[t2[0] - u2[0], t2[1] - u2[1]]).unwrap();
        let y = [
            a1 as f64 * x1[0] + a2 as f64 * x2[0],
            a1 as f64 * x1[1] + a2 as f64 * x2[1],
        ];
        let got = cf_frontend(&y, 1.0, &[u1, u2], &[a1, a2], &lat).unwrap();
        let want = lat
            .mod_lattice(&[
                a1 as f64 * t1[0] + a2 as f64 * t2[0],
                a1 as f64 * t1[1] + a2 as f64 * t2[1],
            ])
            .unwrap();
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn budget_guard() {
        let big = LinearCode::identity(5, 10);
        let lat = ProductLattice::new(vec![5], vec![big], 1.0).unwrap();
        assert!(matches!(
            lat.quantize_nn(&[0.0; 10]),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rank_deficient_rejected() {
        assert!(LinearCode::new(3, vec![vec![1, 2], vec![2, 4]]).is_err());
    }

    proptest! {
        #[test]
        fn decompose_recombine_identity(y in prop::collection::vec(-10_000i64..10_000, 2)) {
            let lat = example_lattice();
            let d = lat.decompose(&y);
            prop_assert_eq!(lat.recombine(&d), y);
        }

        #[test]
        fn random_member_sums_stay_members(
            w1a in 0u64..2, w1b in 0u64..2, w2a in 0u64..3, w2b in 0u64..3,
            s1 in -5i64..5, s2 in -5i64..5,
        ) {
            let lat = example_lattice();
            let m = lat.modulus() as i64;
            let mk = |wa: u64, wb: u64, sa: i64, sb: i64| -> Vec<i64> {
                let c1 = lat.codes[0].encode(&[wa]).unwrap();
                let c2 = lat.codes[1].encode(&[wb]).unwrap();
                (0..2)
                    .map(|i| lat.coordinate_map(&[c1[i], c2[i]]) as i64 + m * if i == 0 { sa } else { sb })
                    .collect()
            };
            let p1 = mk(w1a, w2a, s1, s2);
            let p2 = mk(w1b, w2b, s2, s1);
            let sum: Vec<i64> = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
            let negation: Vec<i64> = p1.iter().map(|a| -a).collect();
            prop_assert!(lat.is_member(&sum).unwrap());
            prop_assert!(lat.is_member(&negation).unwrap());
        }
    }
}
