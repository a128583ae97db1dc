//! Deterministic quadrature oracle for the Monte-Carlo MI estimator.
//!
//! For a 3-point constellation the mutual information I(Y; C₁⊕C₂) is
//! computed by direct 2-D numerical integration over the received plane,
//! entirely independent of the sampling path used by the estimator.

use num_complex::Complex64;
use prodcf::algebra::{PrimeSpec, Ring, RingElement};
use prodcf::constellation::{Constellation, ConstellationSpec, LabelingMap};
use prodcf::rates::{mi_direct, ChannelGains};

fn three_point_map() -> LabelingMap {
    let primes = vec![PrimeSpec::from_element(RingElement::eis(1, 2)).unwrap()];
    let c = Constellation::build(ConstellationSpec::new(Ring::Eisenstein, primes)).unwrap();
    LabelingMap::ring_iso(c, &[None]).unwrap()
}

/// Grid quadrature of I(Y; C₁⊕C₂) for equal unit gains at power `p`.
fn quadrature_mi(map: &LabelingMap, p: f64) -> f64 {
    let q = map.size() as u64;
    let gamma = (p / map.constellation.mean_energy()).sqrt();
    let mut means = Vec::new();
    for u in 0..q {
        for v in 0..q {
            let m = (map.point_of(u).complex() + map.point_of(v).complex()) * gamma;
            let target = map.label_add(u, v);
            means.push((m, target));
        }
    }
    let reach = means.iter().map(|(m, _)| m.norm()).fold(0.0, f64::max) + 6.5;
    let step = 0.02;
    let half = (reach / step).ceil() as i64;
    let mut expectation = 0.0;
    let norm = 1.0 / (std::f64::consts::PI * (q * q) as f64);
    for iy in -half..=half {
        for ix in -half..=half {
            let y = Complex64::new(ix as f64 * step, iy as f64 * step);
            let mut masses = vec![0.0f64; q as usize];
            for (m, target) in &means {
                masses[*target as usize] += (-(y - m).norm_sqr()).exp();
            }
            let total: f64 = masses.iter().sum();
            if total < 1e-300 {
                continue;
            }
            let h: f64 = masses
                .iter()
                .map(|&m| {
                    let pr = m / total;
                    if pr > 0.0 {
                        -pr * pr.log2()
                    } else {
                        0.0
                    }
                })
                .sum();
            // p(y)·H(V|y)·dA, with p(y) the 9-component Gaussian mixture
            expectation += norm * total * h * step * step;
        }
    }
    (q as f64).log2() - expectation
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let map = three_point_map();
    for (p, seed) in [(2.0, 21u64), (10.0, 22u64)] {
        let oracle = quadrature_mi(&map, p);
        let id = map.one_label();
        let est = mi_direct(
            &map,
            ChannelGains::Ring(RingElement::eis(1, 0), RingElement::eis(1, 0)),
            p,
            id,
            id,
            400_000,
            seed,
        )
        .unwrap();
        let gap = (est.bits_per_complex_dim - oracle).abs();
        assert!(
            gap < 0.01,
            "p={p}: oracle={oracle}, mc={}, gap={gap}",
            est.bits_per_complex_dim
        );
    }
}
