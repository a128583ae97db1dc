//! Acceptance suite: every criterion runs at its stated tolerance, one
//! pass/fail line per criterion (the harness prints one line per test).

use num_complex::Complex64;
use prodcf::algebra::{classify_rational_prime, PrimeSpec, Ring, RingElement};
use prodcf::constellation::{Constellation, ConstellationSpec, LabelingMap};
use prodcf::lattice::{LinearCode, ProductLattice};
use prodcf::rates::{
    computation_rate, mi_direct, mi_mlc, mi_mlc_marginal, ChannelGains, DecoderMode,
};
use prodcf::rng::{derive_seed, rng_for, Rng};

const MASTER_SEED: u64 = 20250808;

fn eis(a: i64, b: i64) -> RingElement {
    RingElement::eis(a, b)
}

fn eis_constellation(elems: &[(i64, i64)]) -> Constellation {
    let primes = elems
        .iter()
        .map(|&(a, b)| PrimeSpec::from_element(eis(a, b)).unwrap())
        .collect();
    Constellation::build(ConstellationSpec::new(Ring::Eisenstein, primes)).unwrap()
}

fn map_21_custom() -> LabelingMap {
    LabelingMap::module_custom(
        eis_constellation(&[(1, 2), (3, 2)]),
        vec![eis(3, 2).mul_scalar(2), eis(1, 2).mul_scalar(3)],
    )
    .unwrap()
}

fn map_49_module_homo() -> LabelingMap {
    LabelingMap::module_custom(
        eis_constellation(&[(3, 2), (1, -2)]),
        vec![eis(1, 0), eis(0, 1)],
    )
    .unwrap()
}

fn map_25_extfield() -> LabelingMap {
    let primes = classify_rational_prime(5, Ring::Eisenstein).unwrap();
    let c = Constellation::build(ConstellationSpec::new(Ring::Eisenstein, primes)).unwrap();
    LabelingMap::ext_field_ring_iso(c, None).unwrap()
}

fn unit_gains() -> ChannelGains {
    ChannelGains::Ring(eis(1, 0), eis(1, 0))
}

fn combined_sigma(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Criterion 1: the worked integer example reproduces exactly.
#[test]
fn c01_lattice_worked_example_exact() {
    let start = std::time::Instant::now();
    let lattice = ProductLattice::new(
        vec![2, 3],
        vec![
            LinearCode::new(2, vec![vec![1], vec![1]]).unwrap(),
            LinearCode::new(3, vec![vec![1], vec![2]]).unwrap(),
        ],
        1.0,
    )
    .unwrap();
    let encode = |w1: &[u64], w2: &[u64]| -> Vec<i64> {
        let c1 = lattice.codes[0].encode(w1).unwrap();
        let c2 = lattice.codes[1].encode(w2).unwrap();
        (0..2)
            .map(|i| lattice.coordinate_map(&[c1[i], c2[i]]) as i64)
            .collect()
    };
    let x1 = encode(&[1], &[1]);
    let x2 = encode(&[0], &[2]);
    assert_eq!(x1, vec![1, 5]);
    assert_eq!(x2, vec![2, 4]);
    let y: Vec<i64> = (0..2).map(|i| 3 * x1[i] + 4 * x2[i]).collect();
    assert_eq!(y, vec![11, 31]);
    let d = lattice.decompose(&y);
    assert_eq!(d.level_words, vec![vec![1, 1], vec![2, 1]]);
    assert!(start.elapsed().as_secs() < 1);
}

/// Criterion 2: the 21-point worked example reproduces exactly.
#[test]
fn c02_labels_21pt_exact() {
    let map = map_21_custom();
    let x1 = map.point_of(map.flat_from_values(&[1, 1]));
    let x2 = map.point_of(map.flat_from_values(&[2, 6]));
    assert_eq!(x1, eis(1, 0));
    assert_eq!(x2, eis(-1, 0));
    // receive h = (1, ω) noiselessly and demap
    let rx = x1.add(&eis(0, 1).mul(&x2));
    assert_eq!(rx, eis(1, -1));
    assert_eq!(map.split_flat(map.demap(&rx)), vec![0, 6]);
}

/// Criterion 3: exhaustive homomorphism suites for every constellation,
/// with the naive labeling failing additivity, all inside 10 seconds.
#[test]
fn c03_homomorphism_suites() {
    let start = std::time::Instant::now();

    let additive_only: Vec<(&str, LabelingMap)> = vec![
        ("21pt-custom", map_21_custom()),
        ("49pt-module", map_49_module_homo()),
        (
            "147pt-general",
            LabelingMap::module_general(eis_constellation(&[(1, -1), (1, -2), (3, 2)])).unwrap(),
        ),
    ];
    for (name, map) in additive_only {
        assert!(
            map.verify_homomorphism().additive.pass,
            "{name} must be additive"
        );
    }

    let ring_isos: Vec<(&str, LabelingMap)> = vec![
        (
            "21pt-crt",
            LabelingMap::ring_iso(eis_constellation(&[(1, 2), (3, 2)]), &[None, None]).unwrap(),
        ),
        ("25pt-extfield", map_25_extfield()),
        (
            "49pt-crt",
            LabelingMap::ring_iso(eis_constellation(&[(3, 2), (1, -2)]), &[None, None]).unwrap(),
        ),
        (
            "65pt-gaussian",
            LabelingMap::ring_iso(
                Constellation::build(ConstellationSpec::new(
                    Ring::Gaussian,
                    vec![
                        PrimeSpec::from_element(RingElement::gauss(1, 2)).unwrap(),
                        PrimeSpec::from_element(RingElement::gauss(3, 2)).unwrap(),
                    ],
                ))
                .unwrap(),
                &[None, None],
            )
            .unwrap(),
        ),
        (
            "12pt-mixed",
            LabelingMap::ring_iso(eis_constellation(&[(1, 2), (2, 0)]), &[None, None]).unwrap(),
        ),
    ];
    for (name, map) in ring_isos {
        let report = map.verify_homomorphism();
        assert!(report.additive.pass, "{name} must be additive");
        assert!(report.multiplicative.pass, "{name} must be multiplicative");
    }

    let naive = LabelingMap::naive_ungerboeck(eis_constellation(&[(3, 2), (1, -2)])).unwrap();
    let report = naive.verify_homomorphism();
    assert!(!report.additive.pass);
    assert!(
        report.additive.counterexample.is_some(),
        "a counterexample must be reported"
    );

    assert!(
        start.elapsed().as_secs_f64() < 10.0,
        "suite must finish in under 10 s"
    );
}

/// Criterion 4: closed-form rates to 1e-12.
#[test]
fn c04_closed_form_rates() {
    let one = Complex64::new(1.0, 0.0);
    for p in [0.5, 1.0, 10.0, 100.0, 1e4] {
        let r1 = computation_rate(&[one], &[one], p).unwrap();
        assert!(
            (r1 - (1.0 + p).log2()).abs() < 1e-12,
            "single-user at P={p}"
        );
        let r2 = computation_rate(&[one, one], &[one, one], p).unwrap();
        assert!(
            (r2 - (0.5 + p).log2()).abs() < 1e-12,
            "matched two-user at P={p}"
        );
    }
}

/// Criterion 5: multilevel coding over F₅ equals direct coding over the
/// 25-point extension field at every SNR, both saturating the alphabet.
#[test]
fn c05_mlc_equals_direct_25pt() {
    let map = map_25_extfield();
    let gains = unit_gains();
    let n = 200_000;
    let id = map.one_label();
    let mut snr = -10.0f64;
    while snr <= 40.0 + 1e-9 {
        let p = 10f64.powf(snr / 10.0);
        let cell = derive_seed(MASTER_SEED, (snr + 10.0) as u64);
        let mlc = mi_mlc(&map, gains, p, &[(1, 1), (1, 1)], DecoderMode::Mlc, n, cell).unwrap();
        let direct = mi_direct(&map, gains, p, id, id, n, derive_seed(cell, 1)).unwrap();
        let gap = (mlc.sum.bits_per_complex_dim - direct.bits_per_complex_dim).abs();
        assert!(gap <= 0.03, "snr={snr}: |R_MLC − R_direct| = {gap}");
        if snr >= 40.0 - 1e-9 {
            let cap = 25f64.log2();
            assert!((mlc.sum.bits_per_complex_dim - cap).abs() <= 0.05);
            assert!((direct.bits_per_complex_dim - cap).abs() <= 0.05);
        }
        snr += 5.0;
    }
}

/// Criterion 6: the per-level conditional terms sum to the joint-label
/// mutual information on the 21- and 49-point constellations.
#[test]
fn c06_chain_rule() {
    let maps = [
        LabelingMap::ring_iso(eis_constellation(&[(1, 2), (3, 2)]), &[None, None]).unwrap(),
        LabelingMap::ring_iso(eis_constellation(&[(3, 2), (1, -2)]), &[None, None]).unwrap(),
    ];
    let gains = unit_gains();
    let n = 100_000;
    for (mi, map) in maps.iter().enumerate() {
        let coeffs: Vec<(u64, u64)> = map.coding_level_sizes().iter().map(|_| (1, 1)).collect();
        for (si, snr) in [10.0f64, 25.0].into_iter().enumerate() {
            let p = 10f64.powf(snr / 10.0);
            let seed = derive_seed(MASTER_SEED, 600 + (mi * 2 + si) as u64);
            let mlc = mi_mlc(map, gains, p, &coeffs, DecoderMode::Mlc, n, seed).unwrap();
            let id = map.one_label();
            let joint = mi_direct(map, gains, p, id, id, n, derive_seed(seed, 1)).unwrap();
            let gap = (mlc.sum.bits_per_complex_dim - joint.bits_per_complex_dim).abs();
            assert!(gap <= 0.03, "map {mi} at {snr} dB: chain-rule gap {gap}");
        }
    }
}

/// Criterion 7: decoder ordering para ≤ sub ≤ mlc with strict separation
/// between multistage and parallel at 0 dB.
#[test]
fn c07_decoder_ordering_49pt() {
    let map = LabelingMap::module_general(eis_constellation(&[(3, 2), (1, -2)])).unwrap();
    let gains = unit_gains();
    let coeffs = [(1, 1), (1, 1)];
    let n = 100_000;
    let mut snr = -10.0f64;
    while snr <= 40.0 + 1e-9 {
        let p = 10f64.powf(snr / 10.0);
        let seed = derive_seed(MASTER_SEED, 700 + (snr + 10.0) as u64);
        let mlc = mi_mlc(&map, gains, p, &coeffs, DecoderMode::Mlc, n, seed).unwrap();
        let sub = mi_mlc(&map, gains, p, &coeffs, DecoderMode::Sub, n, seed).unwrap();
        let para = mi_mlc(&map, gains, p, &coeffs, DecoderMode::Para, n, seed).unwrap();
        let (rm, rs, rp) = (
            mlc.sum.bits_per_complex_dim,
            sub.sum.bits_per_complex_dim,
            para.sum.bits_per_complex_dim,
        );
        assert!(
            rp <= rs + 3.0 * combined_sigma(para.sum.stderr, sub.sum.stderr),
            "snr={snr}: para={rp} sub={rs}"
        );
        assert!(
            rs <= rm + 3.0 * combined_sigma(sub.sum.stderr, mlc.sum.stderr),
            "snr={snr}: sub={rs} mlc={rm}"
        );
        if (snr - 0.0).abs() < 1e-9 {
            assert!(rm - rp > 0.1, "0 dB separation: mlc={rm} para={rp}");
        }
        snr += 5.0;
    }
}

/// Criterion 8: the two homomorphic 49-point labelings give the same sum
/// rate everywhere while their per-level splits differ somewhere.
#[test]
fn c08_mapping_equivalence_49pt() {
    let m1 = map_49_module_homo();
    let m2 = LabelingMap::module_custom(
        eis_constellation(&[(3, 2), (1, -2)]),
        vec![eis(1, 0), eis(3, 2)],
    )
    .unwrap();
    let gains = unit_gains();
    let coeffs = [(1, 1), (1, 1)];
    let n = 100_000;
    let mut max_level_diff = 0.0f64;
    let mut snr = -10.0f64;
    while snr <= 40.0 + 1e-9 {
        let p = 10f64.powf(snr / 10.0);
        let seed = derive_seed(MASTER_SEED, 800 + (snr + 10.0) as u64);
        let r1 = mi_mlc(&m1, gains, p, &coeffs, DecoderMode::Mlc, n, seed).unwrap();
        let r2 = mi_mlc(&m2, gains, p, &coeffs, DecoderMode::Mlc, n, seed).unwrap();
        let sum_gap = (r1.sum.bits_per_complex_dim - r2.sum.bits_per_complex_dim).abs();
        assert!(sum_gap <= 0.03, "snr={snr}: sum rates differ by {sum_gap}");
        for l in 0..2 {
            max_level_diff = max_level_diff.max(
                (r1.per_level[l].bits_per_complex_dim - r2.per_level[l].bits_per_complex_dim).abs(),
            );
        }
        snr += 5.0;
    }
    assert!(
        max_level_diff > 0.05,
        "per-level rates must differ somewhere: {max_level_diff}"
    );
}

/// Criterion 9: at 35 dB the homomorphic labeling beats the naive
/// Ungerboeck labeling by far more than the combined uncertainty.
#[test]
fn c09_homomorphic_beats_naive() {
    let hom = map_49_module_homo();
    let naive = LabelingMap::naive_ungerboeck(eis_constellation(&[(3, 2), (1, -2)])).unwrap();
    let gains = unit_gains();
    let p = 10f64.powf(3.5);
    let n = 100_000;
    let seed = derive_seed(MASTER_SEED, 900);
    let rh = mi_mlc(&hom, gains, p, &[(1, 1), (1, 1)], DecoderMode::Mlc, n, seed).unwrap();
    let rn = mi_mlc(
        &naive,
        gains,
        p,
        &[(1, 1), (1, 1)],
        DecoderMode::Mlc,
        n,
        seed,
    )
    .unwrap();
    let gap = rh.sum.bits_per_complex_dim - rn.sum.bits_per_complex_dim;
    let sigma = combined_sigma(rh.sum.stderr, rn.sum.stderr);
    assert!(gap > 3.0 * sigma, "gap={gap}, 3σ={}", 3.0 * sigma);
}

/// Criterion 10: normalized second moments — Zᴺ at 1/12, invariance under
/// scaling, and the sphere lower bound.
#[test]
fn c10_second_moment() {
    let mut measured = Vec::new();
    for (i, n_dim) in [1usize, 2, 4].into_iter().enumerate() {
        let lat = ProductLattice::cubic(n_dim, 1.0);
        let sm = lat
            .second_moment_mc(1_000_000, derive_seed(MASTER_SEED, 1000 + i as u64))
            .unwrap();
        assert!(
            (sm.g - 1.0 / 12.0).abs() <= 3.0 * sm.stderr_g,
            "G(Z^{n_dim}) = {} ± {}",
            sm.g,
            sm.stderr_g
        );
        measured.push(sm);
    }
    // scale invariance on the worked-example lattice
    let mk = |gamma: f64| {
        ProductLattice::new(
            vec![2, 3],
            vec![
                LinearCode::new(2, vec![vec![1], vec![1]]).unwrap(),
                LinearCode::new(3, vec![vec![1], vec![2]]).unwrap(),
            ],
            gamma,
        )
        .unwrap()
    };
    let a = mk(1.0)
        .second_moment_mc(400_000, derive_seed(MASTER_SEED, 1010))
        .unwrap();
    let b = mk(2.0)
        .second_moment_mc(400_000, derive_seed(MASTER_SEED, 1011))
        .unwrap();
    assert!(
        (a.g - b.g).abs() <= 2.0 * combined_sigma(a.stderr_g, b.stderr_g),
        "G must be scale-invariant: {} vs {}",
        a.g,
        b.g
    );
    measured.push(a);
    measured.push(b);
    let sphere = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
    for sm in &measured {
        assert!(
            sm.g >= sphere - 3.0 * sm.stderr_g,
            "sphere bound: G={}",
            sm.g
        );
    }
}

/// Criterion 11: equal-phase channels with equal coefficients give equal
/// per-level mutual informations on the 49-point constellation.
#[test]
fn c11_symmetric_capacity() {
    let map = map_49_module_homo();
    let n = 100_000;
    let pairs = [
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        (
            Complex64::from_polar(0.7, std::f64::consts::PI / 5.0),
            Complex64::from_polar(1.3, std::f64::consts::PI / 5.0),
        ),
    ];
    for (i, (h1, h2)) in pairs.into_iter().enumerate() {
        let gains = ChannelGains::Complex(h1, h2);
        let p = 10f64.powf(1.0);
        let coeffs = [(2, 2), (2, 2)];
        let seed = derive_seed(MASTER_SEED, 1100 + i as u64);
        let a = mi_mlc_marginal(&map, gains, p, &coeffs, 0, n, seed).unwrap();
        let b = mi_mlc_marginal(&map, gains, p, &coeffs, 1, n, derive_seed(seed, 1)).unwrap();
        let gap = (a.bits_per_complex_dim - b.bits_per_complex_dim).abs();
        let sigma = combined_sigma(a.stderr, b.stderr);
        assert!(
            gap <= 3.0 * sigma,
            "pair {i}: gap={gap}, 3σ={}",
            3.0 * sigma
        );
    }
}

/// Criterion 12: the quantizer matches a brute-force oracle on random
/// queries for every small test lattice.
#[test]
fn c12_quantizer_vs_oracle() {
    fn oracle_distance(lat: &ProductLattice, y: &[f64]) -> f64 {
        let m = lat.modulus() as i64;
        let n = y.len();
        let pad = ((m as f64) * (n as f64).sqrt() / 2.0).ceil() as i64 + 1;
        let centers: Vec<i64> = y
            .iter()
            .map(|&yi| (yi * m as f64 / lat.gamma).round() as i64)
            .collect();
        let mut best = f64::INFINITY;
        let mut x = vec![0i64; n];
        fn rec(
            lat: &ProductLattice,
            y: &[f64],
            centers: &[i64],
            pad: i64,
            dim: usize,
            x: &mut Vec<i64>,
            best: &mut f64,
        ) {
            if dim == y.len() {
                if lat.is_member(x).unwrap() {
                    let m = lat.modulus() as f64;
                    let d: f64 = y
                        .iter()
                        .zip(x.iter())
                        .map(|(&yi, &xi)| {
                            let p = lat.gamma * xi as f64 / m;
                            (yi - p) * (yi - p)
                        })
                        .sum();
                    if d < *best {
                        *best = d;
                    }
                }
                return;
            }
            for v in (centers[dim] - pad)..=(centers[dim] + pad) {
                x[dim] = v;
                rec(lat, y, centers, pad, dim + 1, x, best);
            }
        }
        rec(lat, y, &centers, pad, 0, &mut x, &mut best);
        best.sqrt()
    }

    let lattices = [
        ProductLattice::new(
            vec![2, 3],
            vec![
                LinearCode::new(2, vec![vec![1], vec![1]]).unwrap(),
                LinearCode::new(3, vec![vec![1], vec![2]]).unwrap(),
            ],
            1.0,
        )
        .unwrap(),
        ProductLattice::new(
            vec![3, 5],
            vec![
                LinearCode::new(3, vec![vec![1], vec![2], vec![0]]).unwrap(),
                LinearCode::new(5, vec![vec![1], vec![3], vec![2]]).unwrap(),
            ],
            1.7,
        )
        .unwrap(),
        ProductLattice::new(
            vec![2, 3],
            vec![
                LinearCode::new(2, vec![vec![1], vec![1], vec![0], vec![1]]).unwrap(),
                LinearCode::new(3, vec![vec![1], vec![2], vec![1], vec![0]]).unwrap(),
            ],
            1.0,
        )
        .unwrap(),
        ProductLattice::cubic(2, 1.0),
    ];
    for (li, lat) in lattices.iter().enumerate() {
        let n = lat.length();
        let mut rng = rng_for(derive_seed(MASTER_SEED, 1200 + li as u64));
        for _ in 0..100 {
            let y: Vec<f64> = (0..n)
                .map(|_| (rng.gen::<f64>() - 0.5) * 4.0 * lat.gamma)
                .collect();
            let q = lat.quantize_nn(&y).unwrap();
            let d: f64 = y
                .iter()
                .zip(&q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let want = oracle_distance(lat, &y);
            assert!(
                (d - want).abs() < 1e-9,
                "lattice {li}: got {d}, oracle {want}"
            );
        }
    }
}

/// Criterion 13: the full-scale coupled-LDPC threshold simulation is out of
/// desk scale by design; the generic linear-code interface it would plug
/// into exists, and criteria 5–9 cover the rate behavior instead.
#[test]
fn c13_out_of_scope_threshold_sim_substituted() {
    let code = LinearCode::new(5, vec![vec![1, 0], vec![2, 1], vec![4, 3]]).unwrap();
    assert_eq!(code.length(), 3);
    assert_eq!(code.dimension(), 2);
    let word = code.encode(&[2, 3]).unwrap();
    assert!(code.contains(&word));
}

/// Criterion 14: byte-identical CSV output across 1 vs 8 worker threads for
/// both `verify` and a `rates` run.
#[test]
fn c14_determinism_across_threads() {
    let exe = env!("CARGO_BIN_EXE_prodcf");
    let base = std::env::temp_dir().join(format!("prodcf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&base).unwrap();
    let config_path = base.join("rates.json");
    std::fs::write(
        &config_path,
        r#"{
  "constellation": {
    "ring": "eisenstein",
    "primes": [{"element": [1, 2]}, {"element": [3, 2]}],
    "labeling": {"kind": "module-iso-general"}
  },
  "channel": {"fixed": [[[1.0, 0.0], [1.0, 0.0]]]},
  "snr_grid_db": [0.0, 15.0],
  "modes": [
    {"kind": "mlc", "coeffs": {"per_level": [[1, 1], [1, 1]]}},
    {"kind": "sub", "coeffs": {"per_level": [[1, 1], [1, 1]]}}
  ],
  "n_samples": 20000
}"#,
    )
    .unwrap();

    let run = |args: &[&str], out: &str| {
        let status = std::process::Command::new(exe)
            .args(args)
            .arg("--out-dir")
            .arg(base.join(out))
            .status()
            .unwrap();
        assert!(status.success(), "command {args:?} failed");
    };
    let cfg = config_path.to_str().unwrap();
    run(
        &["rates", "--config", cfg, "--seed", "5", "--threads", "1"],
        "r1",
    );
    run(
        &["rates", "--config", cfg, "--seed", "5", "--threads", "8"],
        "r8",
    );
    let a = std::fs::read(base.join("r1/rates.csv")).unwrap();
    let b = std::fs::read(base.join("r8/rates.csv")).unwrap();
    assert_eq!(
        a, b,
        "rates CSV must be byte-identical across thread counts"
    );

    run(&["verify", "--threads", "1"], "v1");
    run(&["verify", "--threads", "8"], "v8");
    let a = std::fs::read(base.join("v1/verify_report.csv")).unwrap();
    let b = std::fs::read(base.join("v8/verify_report.csv")).unwrap();
    assert_eq!(
        a, b,
        "verify CSV must be byte-identical across thread counts"
    );

    let _ = std::fs::remove_dir_all(&base);
}
