//! Brute-force nearest-neighbor oracle for the lattice quantizer.
//!
//! The oracle enumerates every integer vector in a box wide enough to
//! contain the nearest lattice point, keeps those that are lattice members,
//! and minimizes the distance directly — no codeword/shift decomposition.

use prodcf::lattice::{LinearCode, ProductLattice};
use prodcf::rng::{derive_seed, rng_for};
use rand::Rng;

fn oracle_nn(lat: &ProductLattice, y: &[f64]) -> f64 {
    let m = lat.modulus() as i64;
    let n = y.len();
    let pad = m * n as i64 / 2 + 2;
    // unscaled integer coordinates: point = γ·x/m
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

fn check_lattice(lat: &ProductLattice, queries: usize, seed: u64) {
    let n = lat.length();
    let mut rng = rng_for(seed);
    for _ in 0..queries {
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
        let want = oracle_nn(lat, &y);
        assert!(
            (d - want).abs() < 1e-9,
            "distance mismatch: got {d}, oracle {want}, y={y:?}"
        );
        // the returned point is itself a lattice member
        let m = lat.modulus() as f64;
        let coords: Vec<i64> = q
            .iter()
            .map(|&p| (p * m / lat.gamma).round() as i64)
            .collect();
        for (c, p) in coords.iter().zip(&q) {
            assert!((lat.gamma * *c as f64 / m - p).abs() < 1e-9);
        }
        assert!(lat.is_member(&coords).unwrap());
    }
}

#[test]
fn quantizer_matches_bruteforce_oracle() {
    let worked_example = ProductLattice::new(
        vec![2, 3],
        vec![
            LinearCode::new(2, vec![vec![1], vec![1]]).unwrap(),
            LinearCode::new(3, vec![vec![1], vec![2]]).unwrap(),
        ],
        1.0,
    )
    .unwrap();
    check_lattice(&worked_example, 40, derive_seed(100, 0));

    let scaled = ProductLattice::new(
        vec![2, 3],
        vec![
            LinearCode::new(2, vec![vec![1], vec![1], vec![0]]).unwrap(),
            LinearCode::new(3, vec![vec![1], vec![2], vec![1]]).unwrap(),
        ],
        2.5,
    )
    .unwrap();
    check_lattice(&scaled, 25, derive_seed(100, 1));

    let two_level = ProductLattice::new(
        vec![3, 5],
        vec![
            LinearCode::new(3, vec![vec![1], vec![2]]).unwrap(),
            LinearCode::new(5, vec![vec![1], vec![3]]).unwrap(),
        ],
        1.0,
    )
    .unwrap();
    check_lattice(&two_level, 25, derive_seed(100, 2));

    check_lattice(&ProductLattice::cubic(2, 1.5), 25, derive_seed(100, 3));
}
