mod common;

use common::{gaussian_waves, grid, random_waves, rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use tdqmc_core::numerics::field::inner_product;
use tdqmc_core::stats::{
    gram_matrix, hilbert_variance, subset_statistics, subset_statistics_via, variance_decomposition, EntropyRoute,
};
use tdqmc_core::C;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gram_and_rdm_share_nonzero_spectrum(m in 2usize..=32, n in 32usize..=128, seed in any::<u64>()) {
        let w = random_waves(grid(n), m, &mut rng(seed));
        let all: Vec<usize> = (0..m).collect();
        let g = subset_statistics_via(&w, &all, EntropyRoute::Gram).unwrap();
        let r = subset_statistics_via(&w, &all, EntropyRoute::Rdm).unwrap();
        for (a, b) in g.spectrum.lambdas().iter().zip(r.spectrum.lambdas()).filter(|(a, _)| **a > 1e-12) {
            prop_assert!((a - b).abs() <= 1e-10 * a, "{} vs {}", a, b);
        }
        prop_assert!((g.entropy - r.entropy).abs() <= 1e-10);
    }

    #[test]
    fn entropy_bounds(m in 1usize..=24, seed in any::<u64>(), gaussian in any::<bool>()) {
        let mut r = rng(seed);
        let w = if gaussian { gaussian_waves(grid(96), m, &mut r) } else { random_waves(grid(96), m, &mut r) };
        let s = subset_statistics(&w, &(0..m).collect::<Vec<_>>()).unwrap();
        let tol = 1e-12;
        prop_assert!(s.linear_entropy >= -tol);
        prop_assert!(s.linear_entropy <= s.entropy + tol);
        prop_assert!(s.entropy <= (m as f64).ln() + tol);
        prop_assert!(s.k_eff >= 1.0 - tol && s.k_eff <= m as f64 + 1e-9);
        prop_assert!(s.variance >= -tol && s.variance <= 1.0 + tol);
    }

    #[test]
    fn variance_is_one_minus_mean_wave_norm(m in 1usize..=16, seed in any::<u64>()) {
        let g = grid(80);
        let w = gaussian_waves(g, m, &mut rng(seed));
        let mut mean = w.field(0);
        for v in mean.values.iter_mut() {
            *v = C::new(0.0, 0.0);
        }
        for k in 0..m {
            for (a, b) in mean.values.iter_mut().zip(w.field(k).values) {
                *a += b / m as f64;
            }
        }
        let norm = inner_product(&mean, &mean).unwrap().re;
        let gm = gram_matrix(&w, &(0..m).collect::<Vec<_>>()).unwrap();
        prop_assert!((hilbert_variance(&gm) - (1.0 - norm)).abs() <= 1e-12);
    }

    #[test]
    fn subset_order_is_irrelevant(m in 2usize..=20, seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = gaussian_waves(grid(64), m, &mut r);
        let mut idx: Vec<usize> = (0..m).collect();
        let a = subset_statistics(&w, &idx).unwrap();
        idx.shuffle(&mut r);
        let b = subset_statistics(&w, &idx).unwrap();
        prop_assert!((a.entropy - b.entropy).abs() <= 1e-12);
        prop_assert!((a.sigma - b.sigma).abs() <= 1e-12);
        prop_assert!((a.k_eff - b.k_eff).abs() <= 1e-9);
    }

    #[test]
    fn law_of_total_variance(n in 1usize..=300, domains in 1usize..=9, seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [r.random::<f64>() * 10.0 - 5.0, r.random::<f64>() * 3.0]).collect();
        let labels: Vec<Option<usize>> = (0..n).map(|_| Some(r.random_range(0..domains))).collect();
        let d = variance_decomposition(&pts, &labels).unwrap();
        prop_assert!((d.global_var - d.mean_of_local_vars - d.var_of_local_means).abs() <= 1e-12 * d.global_var.max(1.0));
    }
}
