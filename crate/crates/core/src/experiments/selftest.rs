//! Fast invariant checks run by the `selftest` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{build_system, Overrides, Preset};
use crate::numerics::field::{normalize, ComplexField1D, WaveSet};
use crate::numerics::grid::Grid1D;
use crate::partition::make_strips;
use crate::scalar::C;
use crate::stats::{slater_pair_entropy, subset_statistics, subset_statistics_via, variance_decomposition, EntropyRoute};
use crate::tdqmc::init_ensemble;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn sine_waves(grid: Grid1D<f64>, m: usize) -> Result<Vec<ComplexField1D<f64>>> {
    let n = grid.n() as f64 - 1.0;
    (1..=m)
        .map(|k| {
            let f = ComplexField1D::new(
                grid,
                (0..grid.n()).map(|i| C::new((std::f64::consts::PI * k as f64 * i as f64 / n).sin(), 0.0)).collect(),
            )?;
            normalize(&f)
        })
        .collect()
}

fn random_waves(grid: Grid1D<f64>, m: usize, rng: &mut ChaCha8Rng) -> Result<WaveSet<f64>> {
    let fields = (0..m)
        .map(|_| {
            let v = (0..grid.n()).map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            normalize(&ComplexField1D::new(grid, v)?)
        })
        .collect::<Result<Vec<_>>>()?;
    WaveSet::from_fields(&fields)
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run_selftest() -> Vec<Check> {
    let grid = Grid1D::new(-8.0, 8.0, 129).expect("static grid");
    vec![
        check("hartree_fock_limit", || {
            let one = sine_waves(grid, 1)?.remove(0);
            let waves = WaveSet::from_fields(&vec![one; 6])?;
            let s = subset_statistics(&waves, &(0..6).collect::<Vec<_>>())?;
            let ok = s.sigma <= 1e-12 && s.entropy <= 1e-12 && (s.k_eff - 1.0).abs() <= 1e-10;
            Ok((ok, format!("sigma {:.2e}, S {:.2e}, K_eff {}", s.sigma, s.entropy, s.k_eff)))
        }),
        check("orthonormal_ensemble", || {
            let m = 5;
            let waves = WaveSet::from_fields(&sine_waves(grid, m)?)?;
            let s = subset_statistics(&waves, &(0..m).collect::<Vec<_>>())?;
            let mf = m as f64;
            let ok = (s.entropy - mf.ln()).abs() <= 1e-10
                && (s.linear_entropy - (1.0 - 1.0 / mf)).abs() <= 1e-10
                && (s.k_eff - mf).abs() <= 1e-10
                && (s.variance - (1.0 - 1.0 / mf)).abs() <= 1e-10;
            Ok((ok, format!("S {} (ln M = {})", s.entropy, mf.ln())))
        }),
        check("slater_baseline", || {
            let w = sine_waves(grid, 2)?;
            let s = slater_pair_entropy(&w[0], &w[1])?;
            Ok(((s - std::f64::consts::LN_2).abs() <= 1e-10, format!("S {s}")))
        }),
        check("spectral_equivalence", || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let waves = random_waves(grid, 7, &mut rng)?;
            let all: Vec<usize> = (0..7).collect();
            let g = subset_statistics_via(&waves, &all, EntropyRoute::Gram)?;
            let r = subset_statistics_via(&waves, &all, EntropyRoute::Rdm)?;
            let err = g
                .spectrum
                .lambdas()
                .iter()
                .zip(r.spectrum.lambdas())
                .map(|(a, b)| (a - b).abs() / a.abs().max(1e-300))
                .fold(0.0, f64::max);
            Ok((err <= 1e-10, format!("max relative error {err:.2e}")))
        }),
        check("total_variance", || {
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            let pts: Vec<[f64; 2]> = (0..200).map(|_| [rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>()]).collect();
            let p = make_strips(-2.0, 2.0, 5, 0)?;
            let labels: Vec<Option<usize>> = pts.iter().map(|q| p.locate(q[0])).collect();
            let d = variance_decomposition(&pts, &labels)?;
            let err = (d.global_var - d.mean_of_local_vars - d.var_of_local_means).abs();
            Ok((err <= 1e-12, format!("residual {err:.2e}")))
        }),
        check("strip_boundaries", || {
            let p = make_strips(0.0, 1.0, 4, 0)?;
            let ok = p.locate(0.25) == Some(1) && p.locate(1.0) == Some(3) && p.locate(0.0) == Some(0) && p.locate(1.5).is_none();
            Ok((ok, "left-closed strips, last strip closed".into()))
        }),
        check("seeded_initialization", || {
            let model = build_system::<f64>(Preset::Helium, &Overrides::default())?;
            let a = init_ensemble(&model, 16, 5)?;
            let b = init_ensemble(&model, 16, 5)?;
            let c = init_ensemble(&model, 16, 6)?;
            let ok = a.walkers == b.walkers && a.walkers != c.walkers;
            Ok((ok, "same seed, same walkers".into()))
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
