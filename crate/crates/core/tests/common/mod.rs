#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdqmc_core::numerics::field::{normalize, ComplexField1D, WaveSet};
use tdqmc_core::numerics::grid::Grid1D;
use tdqmc_core::C;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(n: usize) -> Grid1D<f64> {
    Grid1D::new(-6.0, 6.0, n).unwrap()
}

/// Normalized waves with independent uniform complex samples.
pub fn random_waves(g: Grid1D<f64>, m: usize, r: &mut ChaCha8Rng) -> WaveSet<f64> {
    let fields: Vec<_> = (0..m)
        .map(|_| {
            let v = (0..g.n()).map(|_| C::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)).collect();
            normalize(&ComplexField1D::new(g, v).unwrap()).unwrap()
        })
        .collect();
    WaveSet::from_fields(&fields).unwrap()
}

/// Normalized Gaussians with random centers and phases: strongly overlapping.
pub fn gaussian_waves(g: Grid1D<f64>, m: usize, r: &mut ChaCha8Rng) -> WaveSet<f64> {
    let fields: Vec<_> = (0..m)
        .map(|_| {
            let c = r.random::<f64>() * 2.0 - 1.0;
            let k = r.random::<f64>() - 0.5;
            let f = ComplexField1D::from_fn(g, |x| C::from_polar((-(x - c) * (x - c) / 2.0).exp(), k * x));
            normalize(&f).unwrap()
        })
        .collect();
    WaveSet::from_fields(&fields).unwrap()
}

/// Orthonormal discrete sine modes `1..=m`.
pub fn sine_modes(g: Grid1D<f64>, m: usize) -> Vec<ComplexField1D<f64>> {
    let last = g.n() as f64 - 1.0;
    (1..=m)
        .map(|k| {
            let v = (0..g.n()).map(|i| C::new((std::f64::consts::PI * k as f64 * i as f64 / last).sin(), 0.0)).collect();
            normalize(&ComplexField1D::new(g, v).unwrap()).unwrap()
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
