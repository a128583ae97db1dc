//! Computation-rate formulas, coefficient search, and Monte-Carlo
//! mutual-information estimators for the multilevel decoders.

mod mi;
mod sweep;

pub use mi::{
    maximize_coeffs_mi, maximize_direct_mi, mi_direct, mi_flexible, mi_mlc, mi_mlc_marginal,
    ChannelGains, DecoderMode, FlexibleRates, MlcRates,
};
pub use sweep::{rows_to_csv, sweep, ChannelSpec, CoeffSpec, EstimatorMode, SweepRow, SweepSpec};

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Ring, RingElement};
use crate::error::{Error, Result};

/// Two-user AWGN channel: unit-variance noise, per-symbol power P.
#[derive(Debug, Clone, Copy)]
pub struct ChannelConfig {
    pub h: (Complex64, Complex64),
    pub power: f64,
}

/// A Monte-Carlo rate estimate in bits per complex dimension.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateEstimate {
    pub bits_per_complex_dim: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// MMSE scaling α = P·h*a / (1 + P·‖h‖²).
pub fn alpha_mmse(h: &[Complex64], a: &[Complex64], power: f64) -> Complex64 {
    let ha: Complex64 = h.iter().zip(a).map(|(hi, ai)| hi.conj() * ai).sum();
    let hh: f64 = h.iter().map(|hi| hi.norm_sqr()).sum();
    ha * power / (1.0 + power * hh)
}

/// The achievable computation rate log₂⁺((‖a‖² − P|h*a|²/(1+P‖h‖²))⁻¹)
/// in bits per complex dimension.
pub fn computation_rate(h: &[Complex64], a: &[Complex64], power: f64) -> Result<f64> {
    if a.iter().all(|ai| ai.norm_sqr() == 0.0) {
        return Err(Error::InvalidCoefficients(
            "coefficient vector is zero".into(),
        ));
    }
    let ha: Complex64 = h.iter().zip(a).map(|(hi, ai)| hi.conj() * ai).sum();
    let hh: f64 = h.iter().map(|hi| hi.norm_sqr()).sum();
    let aa: f64 = a.iter().map(|ai| ai.norm_sqr()).sum();
    let denom = aa - power * ha.norm_sqr() / (1.0 + power * hh);
    Ok(if denom <= 0.0 {
        f64::INFINITY
    } else {
        (1.0 / denom).log2().max(0.0)
    })
}

const SEARCH_BUDGET: u128 = 1_000_000;

/// Exhaustive max of the computation rate over nonzero ring-integer
/// coefficient vectors with per-entry norm at most radius². Ties prefer the
/// smaller total norm, then lexicographic order.
pub fn search_coeffs(
    h: &[Complex64],
    power: f64,
    ring: Ring,
    radius: u64,
) -> Result<(Vec<RingElement>, f64)> {
    let bound = radius as i64;
    let mut candidates = Vec::new();
    let b_range = if ring == Ring::Integers {
        0..=0
    } else {
        -2 * bound..=2 * bound
    };
    for a in -2 * bound..=2 * bound {
        for b in b_range.clone() {
            let x = RingElement::new(ring, a, b);
            if x.norm() <= radius * radius {
                candidates.push(x);
            }
        }
    }
    let space = (candidates.len() as u128).pow(h.len() as u32);
    if space > SEARCH_BUDGET {
        return Err(Error::BudgetExceeded {
            size: space,
            budget: SEARCH_BUDGET,
        });
    }
    let mut best: Option<(f64, u64, Vec<RingElement>)> = None;
    let mut idx = vec![0usize; h.len()];
    loop {
        let a: Vec<RingElement> = idx.iter().map(|&i| candidates[i]).collect();
        if !a.iter().all(|x| x.is_zero()) {
            let ac: Vec<Complex64> = a.iter().map(RingElement::complex).collect();
            let rate = computation_rate(h, &ac, power)?;
            let total: u64 = a.iter().map(RingElement::norm).sum();
            let better = match &best {
                None => true,
                Some((r, t, cur)) => {
                    rate > *r
                        || (rate == *r && total < *t)
                        || (rate == *r && total == *t && lex_before(&a, cur))
                }
            };
            if better {
                best = Some((rate, total, a));
            }
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < candidates.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == idx.len() {
                let (rate, _, a) = best.expect("search space contains nonzero vectors");
                return Ok((a, rate));
            }
        }
    }
}

fn lex_before(a: &[RingElement], b: &[RingElement]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x.a, x.b) != (y.a, y.b) {
            return (x.a, x.b) < (y.a, y.b);
        }
    }
    false
}
