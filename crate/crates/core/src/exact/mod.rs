//! Reference two-body solver on the square configuration grid.
//!
//! Imaginary-time Strang splitting with a spectral Dirichlet kinetic step,
//! enforced exchange symmetry, Metropolis sampling of `|Ψ|²` and strict
//! conditional waves `Ψ(x, yₖ)`.

mod sampler;

pub use sampler::{conditional_waves, sample_walkers, ConditionalWaveSet, SamplerParams};

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::numerics::field::ComplexField2D;
use crate::numerics::grid::Grid2D;
use crate::numerics::kinetic::{KineticWorkspace, SineKinetic};
use crate::numerics::schmidt_decompose;
use crate::scalar::{Real, C};
use crate::stats::SchmidtSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    #[inline]
    pub fn sign<T: Real>(self) -> T {
        match self {
            Symmetry::Symmetric => T::one(),
            Symmetry::Antisymmetric => -T::one(),
        }
    }
}

/// Steps between energy evaluations.
pub const ENERGY_CHECK_EVERY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactParams<T> {
    pub dtau: T,
    pub max_steps: usize,
    /// Allowed energy change per step, averaged over a check interval.
    pub energy_tol: T,
}

impl<T: Real> Default for ExactParams<T> {
    fn default() -> Self {
        Self {
            dtau: T::lit(0.01),
            max_steps: 20_000,
            energy_tol: T::lit(1e-9),
        }
    }
}

impl<T: Real> ExactParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dtau > T::zero() && self.dtau <= T::lit(0.05)) {
            return Err(Error::param("dtau", format!("must lie in (0, 0.05], got {}", self.dtau)));
        }
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", "must be positive"));
        }
        if !(self.energy_tol > T::zero()) {
            return Err(Error::param("energy_tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TwoBodyState<T> {
    pub psi: ComplexField2D<T>,
    pub energy: T,
    pub symmetry: Symmetry,
    pub converged: bool,
    pub iterations: usize,
    /// Energy at every check, oldest first.
    pub energy_history: Vec<T>,
}

/// Two-electron Hamiltonian `T₁ + T₂ + V_ext(x) + V_ext(y) + V_ee(x - y)` on the grid.
pub struct TwoBodyHamiltonian<T: Real> {
    grid: Grid2D<T>,
    potential: Array2<T>,
    kinetic: SineKinetic<T>,
}

impl<T: Real> TwoBodyHamiltonian<T> {
    pub fn new(model: &SystemModel<T>) -> Result<Self> {
        model.validate()?;
        let g = model.grid;
        let v1 = model.external_potential();
        let pts: Vec<T> = g.points().collect();
        let potential = Array2::from_shape_fn((g.n(), g.n()), |(i, j)| {
            v1[i] + v1[j] + model.vee(pts[i] - pts[j])
        });
        Ok(Self {
            grid: Grid2D::square(g),
            potential,
            kinetic: SineKinetic::new(&g),
        })
    }

    pub fn grid(&self) -> Grid2D<T> {
        self.grid
    }

    pub fn potential(&self) -> &Array2<T> {
        &self.potential
    }

    /// `⟨Ψ|H|Ψ⟩` for a normalized `Ψ`.
    pub fn energy(&self, psi: &Array2<C<T>>, ws: &mut KineticWorkspace<T>) -> T {
        let tpsi = self.kinetic.apply_2d(psi, ws);
        let wx = self.grid.gx.weights();
        let mut acc = T::zero();
        for ((i, j), p) in psi.indexed_iter() {
            let h = tpsi[[i, j]] + *p * self.potential[[i, j]];
            acc += (p.conj() * h).re * wx[i] * wx[j];
        }
        acc
    }

    /// `H Ψ` on the grid.
    pub fn apply(&self, psi: &Array2<C<T>>, ws: &mut KineticWorkspace<T>) -> Array2<C<T>> {
        let mut out = self.kinetic.apply_2d(psi, ws);
        Zip::from(&mut out)
            .and(psi)
            .and(&self.potential)
            .for_each(|o, p, v| *o += *p * *v);
        out
    }
}

fn symmetrize<T: Real>(psi: &mut Array2<C<T>>, sym: Symmetry) {
    let s: T = sym.sign();
    let half = T::lit(0.5);
    let n = psi.nrows();
    for i in 0..n {
        for j in 0..=i {
            let a = psi[[i, j]];
            let b = psi[[j, i]];
            let v = (a + b * s) * half;
            psi[[i, j]] = v;
            psi[[j, i]] = v * s;
        }
    }
}

/// Default guess: `g(x)h(y) ± h(x)g(y)` with Gaussians centred at ±1.
pub fn initial_guess<T: Real>(grid: Grid2D<T>, sym: Symmetry) -> ComplexField2D<T> {
    let s: T = sym.sign();
    let g = |x: T| (-(x - T::one()) * (x - T::one())).exp();
    let h = |x: T| (-(x + T::one()) * (x + T::one())).exp();
    ComplexField2D::from_fn(grid, |x, y| C::new(g(x) * h(y) + s * h(x) * g(y), T::zero()))
}

pub fn imaginary_time_ground_state<T: Real>(
    model: &SystemModel<T>,
    symmetry: Symmetry,
    params: &ExactParams<T>,
) -> Result<TwoBodyState<T>> {
    let guess = initial_guess(Grid2D::square(model.grid), symmetry);
    propagate_from(model, guess, symmetry, params)
}

/// Imaginary-time projection of `initial` onto the lowest state of `symmetry`.
pub fn propagate_from<T: Real>(
    model: &SystemModel<T>,
    initial: ComplexField2D<T>,
    symmetry: Symmetry,
    params: &ExactParams<T>,
) -> Result<TwoBodyState<T>> {
    params.validate()?;
    let ham = TwoBodyHamiltonian::new(model)?;
    if initial.grid != ham.grid {
        return Err(Error::Dimension {
            op: "imaginary_time_ground_state",
            detail: "initial state grid differs from the model grid".into(),
        });
    }
    let mut psi = initial;
    let before = psi.norm_sq().sqrt();
    symmetrize(&mut psi.values, symmetry);
    let after = psi.norm_sq().sqrt();
    if !(before > T::zero()) || !(after > T::tol(1e-12) * before) {
        return Err(Error::DegenerateInput {
            op: "imaginary_time_ground_state",
            detail: format!("projection onto the {symmetry:?} sector annihilates the initial state"),
        });
    }
    psi.normalize_in_place();

    let half_v = ham.potential.mapv(|v| (-params.dtau * T::lit(0.5) * v).exp());
    let kin_prop = ham.kinetic.propagator(params.dtau);
    let mut ws = ham.kinetic.workspace();
    let mut history = vec![ham.energy(&psi.values, &mut ws)];
    let mut drifts: Vec<f64> = Vec::new();
    let interval = T::from_usize_lossy(ENERGY_CHECK_EVERY);

    for step in 1..=params.max_steps {
        Zip::from(&mut psi.values).and(&half_v).for_each(|p, f| *p = *p * *f);
        ham.kinetic.apply_diagonal_2d(&mut psi.values, &kin_prop, &mut ws);
        Zip::from(&mut psi.values).and(&half_v).for_each(|p, f| *p = *p * *f);
        symmetrize(&mut psi.values, symmetry);
        let nrm = psi.normalize_in_place();
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return Err(Error::Instability {
                op: "imaginary_time_ground_state",
                walker: 0,
                electron: 0,
                norm: nrm.as_f64(),
            });
        }
        if step % ENERGY_CHECK_EVERY == 0 {
            let e = ham.energy(&psi.values, &mut ws);
            let prev = *history.last().expect("history seeded");
            history.push(e);
            let drift = (e - prev).abs() / interval;
            drifts.push(drift.as_f64());
            if drift < params.energy_tol {
                return Ok(TwoBodyState {
                    psi,
                    energy: e,
                    symmetry,
                    converged: true,
                    iterations: step,
                    energy_history: history,
                });
            }
        }
    }
    let last = *history.last().expect("history seeded");
    Err(Error::Convergence {
        op: "imaginary_time_ground_state",
        steps: params.max_steps,
        last_energy: last.as_f64(),
        drift: drifts.last().copied().unwrap_or(f64::NAN),
        drift_history: drifts,
    })
}

/// Global Schmidt spectrum with its von Neumann and linear entropies.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalSchmidt<T> {
    pub spectrum: SchmidtSpectrum<T>,
    pub entropy: T,
    pub linear_entropy: T,
}

pub fn global_schmidt<T: Real>(state: &TwoBodyState<T>) -> Result<GlobalSchmidt<T>> {
    if !state.converged {
        return Err(Error::Precondition {
            op: "global_schmidt",
            detail: "state is not converged".into(),
        });
    }
    let spectrum = schmidt_decompose(&state.psi)?;
    Ok(GlobalSchmidt {
        entropy: spectrum.von_neumann_entropy(),
        linear_entropy: spectrum.linear_entropy(),
        spectrum,
    })
}

/// Largest `|Ψ(x,y) ∓ Ψ(y,x)|` relative to `‖Ψ‖∞`.
pub fn symmetry_defect<T: Real>(psi: &ComplexField2D<T>, sym: Symmetry) -> T {
    let s: T = sym.sign();
    let scale = psi.max_abs();
    if scale == T::zero() {
        return T::zero();
    }
    let mut worst = T::zero();
    for ((i, j), v) in psi.values.indexed_iter() {
        worst = worst.max((*v - psi.values[[j, i]] * s).norm());
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, Overrides, Preset};

    fn trap(n: usize) -> SystemModel<f64> {
        let o = Overrides {
            trap_omega: Some(1.0),
            ee_coupling: Some(0.0),
            x_min: Some(-8.0),
            x_max: Some(8.0),
            n: Some(n),
            ..Default::default()
        };
        build_system(Preset::Custom, &o).unwrap()
    }

    #[test]
    fn harmonic_sectors() {
        let m = trap(96);
        let p = ExactParams::default();
        let s = imaginary_time_ground_state(&m, Symmetry::Symmetric, &p).unwrap();
        assert!((s.energy - 1.0).abs() < 1e-3, "{}", s.energy);
        let a = imaginary_time_ground_state(&m, Symmetry::Antisymmetric, &p).unwrap();
        assert!((a.energy - 2.0).abs() < 1e-3, "{}", a.energy);
        assert!(symmetry_defect(&a.psi, Symmetry::Antisymmetric) < 1e-12);
        let gs = global_schmidt(&s).unwrap();
        assert!(gs.entropy < 1e-6);
        let ga = global_schmidt(&a).unwrap();
        assert!((ga.entropy - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn symmetric_guess_cannot_seed_antisymmetric_sector() {
        let m = trap(64);
        let guess = initial_guess(Grid2D::square(m.grid), Symmetry::Symmetric);
        let r = propagate_from(&m, guess, Symmetry::Antisymmetric, &ExactParams::default());
        assert!(matches!(r, Err(Error::DegenerateInput { .. })));
    }

    #[test]
    fn non_convergence_reports_drift() {
        let m = trap(64);
        let p = ExactParams {
            max_steps: 30,
            ..Default::default()
        };
        match imaginary_time_ground_state(&m, Symmetry::Symmetric, &p) {
            Err(Error::Convergence { drift_history, .. }) => assert_eq!(drift_history.len(), 3),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn energy_decreases() {
        let m = trap(64);
        let s = imaginary_time_ground_state(&m, Symmetry::Symmetric, &ExactParams::default()).unwrap();
        for w in s.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
    }
}
