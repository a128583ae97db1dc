//! Browser bindings for the interactive demo page: build and label
//! constellations, estimate rate curves at reduced sample counts, and search
//! integer coefficients for a given channel.
//!
//! Every entry point takes and returns JSON strings so the page needs no
//! generated TypeScript beyond the wasm-bindgen glue.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use prodcf::algebra::{PrimeSpec, Ring, RingElement};
use prodcf::constellation::{Constellation, ConstellationSpec, LabelingKind, LabelingMap};
use prodcf::rates::{
    alpha_mmse, computation_rate, mi_direct, mi_mlc, search_coeffs, ChannelGains, DecoderMode,
};

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstellationParams {
    ring: Ring,
    /// Primes as (a, b) coordinate pairs in the integer basis.
    primes: Vec<[i64; 2]>,
    kind: LabelingKind,
    #[serde(default)]
    generators: Option<Vec<[i64; 2]>>,
}

#[derive(Serialize)]
struct PointOut {
    re: f64,
    im: f64,
    a: i64,
    b: i64,
    label: Vec<u64>,
}

#[derive(Serialize)]
struct ConstellationOut {
    size: usize,
    level_sizes: Vec<u64>,
    additive: bool,
    multiplicative: bool,
    mean_energy: f64,
    points: Vec<PointOut>,
}

fn build_map(params: &ConstellationParams) -> Result<LabelingMap, JsValue> {
    let primes: Vec<PrimeSpec> = params
        .primes
        .iter()
        .map(|&[a, b]| PrimeSpec::from_element(RingElement::new(params.ring, a, b)))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let constellation =
        Constellation::build(ConstellationSpec::new(params.ring, primes)).map_err(err)?;
    let n = constellation.spec.primes.len();
    match params.kind {
        LabelingKind::CrtRingIso => {
            LabelingMap::ring_iso(constellation, &vec![None; n]).map_err(err)
        }
        LabelingKind::ModuleIsoGeneral => LabelingMap::module_general(constellation).map_err(err),
        LabelingKind::ModuleIsoCustom => {
            let gens = params
                .generators
                .as_ref()
                .ok_or_else(|| err("custom labelings need generators"))?
                .iter()
                .map(|&[a, b]| RingElement::new(params.ring, a, b))
                .collect();
            LabelingMap::module_custom(constellation, gens).map_err(err)
        }
        LabelingKind::ExtFieldRingIso => {
            LabelingMap::ext_field_ring_iso(constellation, None).map_err(err)
        }
        LabelingKind::NaiveUngerboeck => LabelingMap::naive_ungerboeck(constellation).map_err(err),
    }
}

/// Build a constellation with its labeling and homomorphism verdicts.
#[wasm_bindgen]
pub fn constellation_json(params: &str) -> Result<String, JsValue> {
    let params: ConstellationParams = serde_json::from_str(params).map_err(err)?;
    let map = build_map(&params)?;
    let report = map.verify_homomorphism();
    let points = (0..map.size() as u64)
        .map(|flat| {
            let p = map.point_of(flat);
            let z = p.complex();
            PointOut {
                re: z.re,
                im: z.im,
                a: p.a,
                b: p.b,
                label: map.coding_values(flat),
            }
        })
        .collect();
    let out = ConstellationOut {
        size: map.size(),
        level_sizes: map.coding_level_sizes(),
        additive: report.additive.pass,
        multiplicative: report.multiplicative.pass,
        mean_energy: map.constellation.mean_energy(),
        points,
    };
    serde_json::to_string(&out).map_err(err)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RateCurveParams {
    constellation: ConstellationParams,
    snr_min_db: f64,
    snr_max_db: f64,
    snr_step_db: f64,
    /// Any of "mlc", "sub", "para", "direct".
    modes: Vec<String>,
    n_samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct CurvePoint {
    snr_db: f64,
    rate: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct Curve {
    mode: String,
    level: String,
    points: Vec<CurvePoint>,
}

/// Monte-Carlo rate curves over an SNR range for unit channel gains.
#[wasm_bindgen]
pub fn rate_curves_json(params: &str) -> Result<String, JsValue> {
    let params: RateCurveParams = serde_json::from_str(params).map_err(err)?;
    if params.n_samples > 200_000 {
        return Err(err("keep n_samples at or below 200000 in the browser"));
    }
    let map = build_map(&params.constellation)?;
    let ring = map.constellation.spec.ring;
    let one = RingElement::one(ring);
    let coeffs: Vec<(u64, u64)> = map.coding_level_sizes().iter().map(|_| (1, 1)).collect();
    let mut curves: Vec<Curve> = Vec::new();
    let mut snr = params.snr_min_db;
    let mut cell = 0u64;
    while snr <= params.snr_max_db + 1e-9 {
        let power = 10f64.powf(snr / 10.0);
        for mode in &params.modes {
            let seed = prodcf::rng::derive_seed(params.seed, cell);
            cell += 1;
            let mut push = |mode: &str, level: String, rate: f64, stderr: f64| {
                if let Some(c) = curves
                    .iter_mut()
                    .find(|c| c.mode == mode && c.level == level)
                {
                    c.points.push(CurvePoint {
                        snr_db: snr,
                        rate,
                        stderr,
                    });
                } else {
                    curves.push(Curve {
                        mode: mode.to_string(),
                        level,
                        points: vec![CurvePoint {
                            snr_db: snr,
                            rate,
                            stderr,
                        }],
                    });
                }
            };
            match mode.as_str() {
                "direct" => {
                    let id = map.one_label();
                    let est = mi_direct(
                        &map,
                        ChannelGains::Ring(one, one),
                        power,
                        id,
                        id,
                        params.n_samples,
                        seed,
                    )
                    .map_err(err)?;
                    push("direct", "sum".into(), est.bits_per_complex_dim, est.stderr);
                }
                m @ ("mlc" | "sub" | "para") => {
                    let decoder = match m {
                        "mlc" => DecoderMode::Mlc,
                        "sub" => DecoderMode::Sub,
                        _ => DecoderMode::Para,
                    };
                    let rates = mi_mlc(
                        &map,
                        ChannelGains::Ring(one, one),
                        power,
                        &coeffs,
                        decoder,
                        params.n_samples,
                        seed,
                    )
                    .map_err(err)?;
                    for (l, est) in rates.per_level.iter().enumerate() {
                        push(m, (l + 1).to_string(), est.bits_per_complex_dim, est.stderr);
                    }
                    push(
                        m,
                        "sum".into(),
                        rates.sum.bits_per_complex_dim,
                        rates.sum.stderr,
                    );
                }
                other => return Err(err(format!("unknown mode {other}"))),
            }
        }
        snr += params.snr_step_db;
    }
    serde_json::to_string(&curves).map_err(err)
}

#[derive(Serialize)]
struct CoeffOut {
    a: Vec<[i64; 2]>,
    rate_bits: f64,
    alpha: [f64; 2],
    capacity_bound_bits: f64,
}

/// Best Eisenstein coefficient vector for the channel (1, h₂) at the given
/// SNR, with the achievable computation rate and the MMSE scale.
#[wasm_bindgen]
pub fn coefficient_search_json(h2_re: f64, h2_im: f64, snr_db: f64) -> Result<String, JsValue> {
    let h = [Complex64::new(1.0, 0.0), Complex64::new(h2_re, h2_im)];
    let power = 10f64.powf(snr_db / 10.0);
    let (a, rate) = search_coeffs(&h, power, Ring::Eisenstein, 3).map_err(err)?;
    let ac: Vec<Complex64> = a.iter().map(RingElement::complex).collect();
    let alpha = alpha_mmse(&h, &ac, power);
    let capacity = computation_rate(&[h[0]], &[Complex64::new(1.0, 0.0)], power).map_err(err)?;
    let out = CoeffOut {
        a: a.iter().map(|x| [x.a, x.b]).collect(),
        rate_bits: rate,
        alpha: [alpha.re, alpha.im],
        capacity_bound_bits: capacity,
    };
    serde_json::to_string(&out).map_err(err)
}
