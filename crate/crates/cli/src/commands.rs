//! The four subcommands: constellation dumps, rate sweeps, the lattice
//! demo, and the golden-example verifier.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use prodcf::algebra::{PrimeSpec, Ring, RingElement};
use prodcf::constellation::{Constellation, ConstellationSpec, LabelingKind, LabelingMap};
use prodcf::lattice::ProductLattice;
use prodcf::rates::{
    computation_rate, mi_mlc, rows_to_csv, sweep, ChannelGains, DecoderMode, SweepSpec,
};
use prodcf::rng::{derive_seed, rng_for, Rng};

use crate::config::{self, ConstellationConfig, LatticeDemoConfig, RatesConfig};

pub fn cmd_constellation(cfg: &ConstellationConfig, out_dir: &Path) -> anyhow::Result<bool> {
    std::fs::create_dir_all(out_dir)?;
    let map = cfg.build_labeling()?;
    let report = map.verify_homomorphism();

    let mut csv = Vec::new();
    map.write_csv(&mut csv)?;
    std::fs::write(out_dir.join("points.csv"), &csv)?;
    std::fs::write(
        out_dir.join("verification.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    // companion header: the resolved constellation spec behind the table
    let header = serde_json::json!({
        "ring": map.constellation.spec.ring,
        "primes": map.constellation.spec.primes,
        "tie_break": map.constellation.spec.tie_break,
        "kind": map.kind,
        "generators": map.generators,
        "size": map.size(),
        "basis": match map.constellation.spec.ring {
            Ring::Eisenstein => "(1, omega)",
            Ring::Gaussian => "(1, j)",
            Ring::Integers => "(1)",
        },
    });
    std::fs::write(
        out_dir.join("header.json"),
        serde_json::to_string_pretty(&header)?,
    )?;
    config::write_sidecar(&out_dir.join("meta.json"), "constellation", None, cfg)?;

    let must_be_additive = map.kind != LabelingKind::NaiveUngerboeck;
    let must_be_multiplicative = map.kind.is_ring_iso();
    println!(
        "{} points; additive: {}; multiplicative: {}",
        map.size(),
        if report.additive.pass { "pass" } else { "FAIL" },
        if report.multiplicative.pass {
            "pass"
        } else {
            "FAIL"
        },
    );
    let ok = (!must_be_additive || report.additive.pass)
        && (!must_be_multiplicative || report.multiplicative.pass);
    Ok(ok)
}

pub fn cmd_rates(cfg: &RatesConfig, seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let map = cfg.constellation.build_labeling()?;
    let spec = SweepSpec {
        labeling: &map,
        snr_grid_db: cfg.snr_grid_db.clone(),
        channels: cfg.channel.clone(),
        modes: cfg.modes.clone(),
        n_samples: cfg.n_samples,
        seed,
    };
    let rows = sweep(&spec)?;
    std::fs::write(out_dir.join("rates.csv"), rows_to_csv(&rows))?;
    config::write_sidecar(&out_dir.join("meta.json"), "rates", Some(seed), cfg)?;
    println!(
        "{} rows -> {}",
        rows.len(),
        out_dir.join("rates.csv").display()
    );
    Ok(())
}

pub fn cmd_lattice_demo(cfg: &LatticeDemoConfig, seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let codes = cfg.build_codes()?;
    let lattice = ProductLattice::new(cfg.primes.clone(), codes, cfg.gamma)?;
    if cfg.messages.len() != cfg.channel.len() {
        anyhow::bail!("one message set per channel gain is required");
    }

    // encode each source: per-coordinate CRT image of its level codewords
    let n = lattice.length();
    let signals: Vec<Vec<i64>> = cfg
        .messages
        .iter()
        .map(|levels| {
            let words: Vec<Vec<u64>> = lattice
                .codes
                .iter()
                .zip(levels)
                .map(|(code, w)| code.encode(w).map_err(Into::into))
                .collect::<anyhow::Result<_>>()?;
            Ok((0..n)
                .map(|i| {
                    let vals: Vec<u64> = words.iter().map(|c| c[i]).collect();
                    lattice.coordinate_map(&vals) as i64
                })
                .collect())
        })
        .collect::<anyhow::Result<_>>()?;

    let observed: Vec<i64> = (0..n)
        .map(|i| {
            signals
                .iter()
                .zip(&cfg.channel)
                .map(|(x, &h)| h * x[i])
                .sum()
        })
        .collect();
    let decomposition = lattice.decompose(&observed);

    // closure spot-check on random integer combinations of the signals
    let mut rng = rng_for(derive_seed(seed, 1));
    let mut closure_pass = 0usize;
    for _ in 0..cfg.closure_checks {
        let coeffs: Vec<i64> = (0..signals.len())
            .map(|_| rng.gen_range(-50i64..=50))
            .collect();
        let combo: Vec<i64> = (0..n)
            .map(|i| signals.iter().zip(&coeffs).map(|(x, &a)| a * x[i]).sum())
            .collect();
        if lattice.is_member(&combo)? {
            closure_pass += 1;
        }
    }

    let second_moment = lattice.second_moment_mc(cfg.second_moment_samples, seed)?;
    let report = serde_json::json!({
        "signals": signals,
        "observed": observed,
        "level_words": decomposition.level_words,
        "carry": decomposition.carry,
        "closure_checks": { "total": cfg.closure_checks, "passed": closure_pass },
        "second_moment": second_moment,
    });
    std::fs::write(
        out_dir.join("lattice_demo.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    config::write_sidecar(&out_dir.join("meta.json"), "lattice-demo", Some(seed), cfg)?;
    println!(
        "observed {:?} -> level words {:?}, carry {:?}; G = {:.5} ± {:.5}",
        observed,
        decomposition.level_words,
        decomposition.carry,
        second_moment.g,
        second_moment.stderr_g
    );
    Ok(())
}

pub struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn eis(a: i64, b: i64) -> RingElement {
    RingElement::eis(a, b)
}

fn eis_constellation(elems: &[(i64, i64)]) -> anyhow::Result<Constellation> {
    let primes = elems
        .iter()
        .map(|&(a, b)| PrimeSpec::from_element(eis(a, b)))
        .collect::<Result<_, _>>()?;
    Ok(Constellation::build(ConstellationSpec::new(
        Ring::Eisenstein,
        primes,
    ))?)
}

/// Golden worked examples, run quickly and deterministically.
pub fn run_verify_checks() -> anyhow::Result<Vec<Check>> {
    let mut checks = Vec::new();

    // worked integer example: encode, combine with gains (3, 4), decompose
    {
        let demo = LatticeDemoConfig::worked_example();
        let lattice = ProductLattice::new(demo.primes.clone(), demo.build_codes()?, 1.0)?;
        let x1: Vec<i64> = (0..2)
            .map(|i| {
                let c1 = lattice.codes[0].encode(&demo.messages[0][0]).unwrap();
                let c2 = lattice.codes[1].encode(&demo.messages[0][1]).unwrap();
                lattice.coordinate_map(&[c1[i], c2[i]]) as i64
            })
            .collect();
        let x2: Vec<i64> = (0..2)
            .map(|i| {
                let c1 = lattice.codes[0].encode(&demo.messages[1][0]).unwrap();
                let c2 = lattice.codes[1].encode(&demo.messages[1][1]).unwrap();
                lattice.coordinate_map(&[c1[i], c2[i]]) as i64
            })
            .collect();
        let y: Vec<i64> = (0..2).map(|i| 3 * x1[i] + 4 * x2[i]).collect();
        let d = lattice.decompose(&y);
        let pass = x1 == vec![1, 5]
            && x2 == vec![2, 4]
            && y == vec![11, 31]
            && d.level_words == vec![vec![1, 1], vec![2, 1]]
            && d.carry == vec![1, 5];
        checks.push(Check {
            name: "lattice_worked_example",
            pass,
            detail: format!("x1={x1:?} x2={x2:?} y={y:?} words={:?}", d.level_words),
        });
    }

    // 21-pt golden labels and the receive-side demap
    {
        let c = eis_constellation(&[(1, 2), (3, 2)])?;
        let map =
            LabelingMap::module_custom(c, vec![eis(3, 2).mul_scalar(2), eis(1, 2).mul_scalar(3)])?;
        let x1 = map.point_of(map.flat_from_values(&[1, 1]));
        let x2 = map.point_of(map.flat_from_values(&[2, 6]));
        let rx = x1.add(&eis(0, 1).mul(&x2));
        let demapped = map.split_flat(map.demap(&rx));
        let pass = x1 == eis(1, 0) && x2 == eis(-1, 0) && demapped == vec![0, 6];
        checks.push(Check {
            name: "labels_21pt_worked_example",
            pass,
            detail: format!("x1={x1:?} x2={x2:?} demap={demapped:?}"),
        });
    }

    // homomorphism suite over every paper constellation
    {
        let suites: Vec<(&str, LabelingMap, bool)> = vec![
            (
                "21pt_ring_iso",
                LabelingMap::ring_iso(eis_constellation(&[(1, 2), (3, 2)])?, &[None, None])?,
                true,
            ),
            (
                "25pt_extfield",
                LabelingMap::ext_field_ring_iso(eis_constellation(&[(5, 0)])?, None)?,
                true,
            ),
            (
                "49pt_module",
                LabelingMap::module_custom(
                    eis_constellation(&[(3, 2), (1, -2)])?,
                    vec![eis(1, 0), eis(0, 1)],
                )?,
                false,
            ),
            (
                "147pt_module_general",
                LabelingMap::module_general(eis_constellation(&[(1, -1), (1, -2), (3, 2)])?)?,
                false,
            ),
            (
                "65pt_gaussian_ring_iso",
                LabelingMap::ring_iso(
                    Constellation::build(ConstellationSpec::new(
                        Ring::Gaussian,
                        vec![
                            PrimeSpec::from_element(RingElement::gauss(1, 2))?,
                            PrimeSpec::from_element(RingElement::gauss(3, 2))?,
                        ],
                    ))?,
                    &[None, None],
                )?,
                true,
            ),
            (
                "12pt_mixed_ring_iso",
                LabelingMap::ring_iso(eis_constellation(&[(1, 2), (2, 0)])?, &[None, None])?,
                true,
            ),
        ];
        for (name, map, needs_mul) in suites {
            let report = map.verify_homomorphism();
            let pass = report.additive.pass && (!needs_mul || report.multiplicative.pass);
            checks.push(Check {
                name: Box::leak(format!("homomorphism_{name}").into_boxed_str()),
                pass,
                detail: format!(
                    "additive={} multiplicative={}",
                    report.additive.pass, report.multiplicative.pass
                ),
            });
        }
        let naive = LabelingMap::naive_ungerboeck(eis_constellation(&[(3, 2), (1, -2)])?)?;
        let report = naive.verify_homomorphism();
        checks.push(Check {
            name: "naive_ungerboeck_counterexample",
            pass: !report.additive.pass && report.additive.counterexample.is_some(),
            detail: format!(
                "counterexample={:?}",
                report.additive.counterexample.is_some()
            ),
        });
    }

    // closed-form computation rates
    {
        let one = Complex64::new(1.0, 0.0);
        let mut pass = true;
        let mut worst: f64 = 0.0;
        for p in [0.5, 1.0, 10.0, 100.0, 1e4] {
            let r1 = computation_rate(&[one], &[one], p)?;
            let r2 = computation_rate(&[one, one], &[one, one], p)?;
            let e = (r1 - (1.0 + p).log2())
                .abs()
                .max((r2 - (0.5 + p).log2()).abs());
            worst = worst.max(e);
            pass &= e < 1e-12;
        }
        checks.push(Check {
            name: "closed_form_rates",
            pass,
            detail: format!("max error {worst:.2e}"),
        });
    }

    // cubic second moment, seeded
    {
        let sm = ProductLattice::cubic(1, 1.0).second_moment_mc(100_000, 424242)?;
        let pass = (sm.g - 1.0 / 12.0).abs() < 3.0 * sm.stderr_g + 1e-4;
        checks.push(Check {
            name: "second_moment_z1",
            pass,
            detail: format!("G={:.6}±{:.6}", sm.g, sm.stderr_g),
        });
    }

    // a small seeded rate estimate (exercises the full MC path)
    {
        let map = LabelingMap::module_general(eis_constellation(&[(1, 2), (3, 2)])?)?;
        let gains = ChannelGains::Ring(eis(1, 0), eis(1, 0));
        let rates = mi_mlc(
            &map,
            gains,
            10.0,
            &[(1, 1), (1, 1)],
            DecoderMode::Mlc,
            20_000,
            424242,
        )?;
        let pass =
            rates.sum.bits_per_complex_dim > 0.5 && rates.sum.bits_per_complex_dim < 21f64.log2();
        checks.push(Check {
            name: "seeded_rate_estimate",
            pass,
            detail: format!(
                "R={:.6}±{:.6}",
                rates.sum.bits_per_complex_dim, rates.sum.stderr
            ),
        });
    }

    Ok(checks)
}

pub fn cmd_verify(out_dir: &Path) -> anyhow::Result<bool> {
    std::fs::create_dir_all(out_dir)?;
    let checks = run_verify_checks()?;
    let mut csv = String::from("check,status,detail\r\n");
    let mut all_pass = true;
    for c in &checks {
        let status = if c.pass { "pass" } else { "FAIL" };
        println!("{:<36} {}", c.name, status);
        let detail = c.detail.replace(',', ";").replace('\n', " ");
        let _ = write!(csv, "{},{},{}\r\n", c.name, status, detail);
        all_pass &= c.pass;
    }
    std::fs::write(out_dir.join("verify_report.csv"), csv)?;
    println!(
        "{}",
        if all_pass {
            "all checks passed"
        } else {
            "FAILURES present"
        }
    );
    Ok(all_pass)
}
