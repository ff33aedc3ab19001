//! Shared inputs for the benchmarks.

use rydcoh_core::analysis::XyData;
use rydcoh_core::engine::{CMatrix, C64};

/// Deterministic dense Hermitian matrix with entries of order `scale`.
pub fn hermitian(dim: usize, scale: f64) -> CMatrix {
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(scale * ((i as f64) * 0.7).sin(), 0.0);
        for j in i + 1..dim {
            let z = C64::new(scale * ((i * dim + j) as f64 * 0.37).cos(), scale * ((i + 3 * j) as f64 * 0.11).sin());
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Noisy damped fringe sampled like a ground-Rydberg Ramsey scan.
pub fn ramsey_fringe(points: usize) -> XyData {
    let x: Vec<f64> = (0..points).map(|k| 15e-6 * k as f64 / (points - 1) as f64).collect();
    let y = x
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let wiggle = 0.01 * ((k as f64) * 2.3).sin();
            0.5 - 0.45 * (-t / 10e-6).exp() * (std::f64::consts::TAU * 250e3 * t).cos() + wiggle
        })
        .collect();
    XyData::new(x, y).expect("valid fringe")
}
