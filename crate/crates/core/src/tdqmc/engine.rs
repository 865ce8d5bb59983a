use ndarray::{Array2, ArrayView1, ArrayViewMut1, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensemble::{init_ensemble, pooled_spread, TdqmcState};
use super::potential::{effective_potentials, exchange_actions, weighted_vee_table};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::numerics::field::{inner_view, norm_sq_view, normalize_view};
use crate::numerics::kinetic::{KineticWorkspace, SineKinetic};
use crate::scalar::{Real, C};

/// How the convolution kernel width is chosen during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelPolicy<T> {
    /// Held at this width for the whole run.
    Fixed(T),
    /// `factor × pooled walker spread`, refreshed every `every` steps.
    Adaptive { factor: T, every: usize },
    /// Short probe runs for each factor; the lowest probe energy wins and
    /// the main run continues adaptively with it.
    Variational {
        factors: Vec<T>,
        probe_steps: usize,
        every: usize,
    },
}

impl<T: Real> Default for KernelPolicy<T> {
    fn default() -> Self {
        KernelPolicy::Adaptive {
            factor: T::lit(0.5),
            every: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdqmcParams<T> {
    pub walkers: usize,
    pub dtau: T,
    pub kernel: KernelPolicy<T>,
    pub moves_per_step: usize,
    pub proposal_width: T,
    pub max_steps: usize,
    pub min_steps: usize,
    /// Allowed drift of the smoothed energy per step.
    pub energy_tol: T,
    pub window: usize,
    pub seed: u64,
}

impl<T: Real> Default for TdqmcParams<T> {
    fn default() -> Self {
        Self {
            walkers: 500,
            dtau: T::lit(0.01),
            kernel: KernelPolicy::default(),
            moves_per_step: 5,
            proposal_width: T::lit(0.3),
            max_steps: 5000,
            min_steps: 500,
            energy_tol: T::lit(1e-5),
            window: 100,
            seed: 0,
        }
    }
}

impl<T: Real> TdqmcParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.walkers < 2 {
            return Err(Error::param("walkers", "need at least 2"));
        }
        check_dtau(self.dtau)?;
        if self.moves_per_step == 0 {
            return Err(Error::param("moves_per_step", "must be at least 1"));
        }
        if !(self.proposal_width > T::zero()) {
            return Err(Error::param("proposal_width", "must be positive"));
        }
        if self.window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        if !(self.energy_tol > T::zero()) {
            return Err(Error::param("energy_tol", "must be positive"));
        }
        if self.max_steps < self.min_steps.max(2 * self.window) {
            return Err(Error::param("max_steps", "shorter than the convergence warm-up"));
        }
        match &self.kernel {
            KernelPolicy::Fixed(w) if !(*w > T::zero()) || !w.is_finite() => {
                return Err(Error::param("kernel_width", "must be positive and finite"));
            }
            KernelPolicy::Adaptive { factor, every } if !(*factor > T::zero()) || *every == 0 => {
                return Err(Error::param("kernel_factor", "factor and refresh interval must be positive"));
            }
            KernelPolicy::Variational { factors, probe_steps, every } => {
                if factors.is_empty() || factors.iter().any(|f| !(*f > T::zero())) || *probe_steps == 0 || *every == 0 {
                    return Err(Error::param("kernel_factors", "need positive factors and probe length"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn check_dtau<T: Real>(dtau: T) -> Result<()> {
    if !(dtau > T::zero()) || dtau > T::lit(0.05) {
        return Err(Error::param("dtau", format!("must lie in (0, 0.05], got {dtau}")));
    }
    Ok(())
}

/// Grid operators shared by every step of a run.
pub struct TdqmcEngine<'a, T: Real> {
    model: &'a SystemModel<T>,
    kinetic: SineKinetic<T>,
    external: Vec<T>,
    weights: Vec<T>,
    vee_table: Option<Array2<T>>,
}

/// Per-walker pieces of the energy of one electron.
#[derive(Debug, Clone, Copy, Default)]
struct Parts<T> {
    kinetic: T,
    external: T,
    effective: T,
    exchange: T,
}

impl<T: Real> Parts<T> {
    fn total(&self) -> T {
        let half = T::lit(0.5);
        self.kinetic + self.external + half * (self.effective - self.exchange)
    }
}

fn all_real<T: Real>(v: ArrayView1<C<T>>) -> bool {
    v.iter().all(|z| z.im == T::zero())
}

fn weighted_real<T: Real>(w: &[T], a: ArrayView1<C<T>>, v: ArrayView1<T>) -> T {
    w.iter().zip(a.iter()).zip(v.iter()).map(|((w, a), v)| *w * a.norm_sqr() * *v).sum()
}

fn weighted_inner<T: Real>(w: &[T], a: ArrayView1<C<T>>, b: ArrayView1<C<T>>) -> T {
    w.iter().zip(a.iter()).zip(b.iter()).map(|((w, a), b)| *w * (a.conj() * *b).re).sum()
}

impl<'a, T: Real> TdqmcEngine<'a, T> {
    pub fn new(model: &'a SystemModel<T>) -> Result<Self> {
        model.validate()?;
        let vee_table = (model.spin.is_parallel() && model.has_interaction()).then(|| weighted_vee_table(model));
        Ok(Self {
            model,
            kinetic: SineKinetic::new(&model.grid),
            external: model.external_potential(),
            weights: model.grid.weights(),
            vee_table,
        })
    }

    fn energy_parts(
        &self,
        waves: &Array2<C<T>>,
        veff: &Array2<T>,
        exch: Option<&Array2<C<T>>>,
        ws: &mut KineticWorkspace<T>,
    ) -> Vec<Parts<T>> {
        let dx = self.model.grid.dx();
        let m = waves.nrows();
        let vext = ArrayView1::from(&self.external[..]);
        let mut out = vec![Parts::default(); m];
        let mut k = 0;
        while k < m {
            let pair = k + 1 < m && all_real(waves.row(k)) && all_real(waves.row(k + 1));
            if pair {
                let (a, b) = (waves.row(k), waves.row(k + 1));
                let (ta, tb) = self.kinetic.expectation_real_pair(
                    a.as_slice().expect("contiguous rows"),
                    b.as_slice().expect("contiguous rows"),
                    dx,
                    ws,
                );
                out[k].kinetic = ta;
                out[k + 1].kinetic = tb;
            } else {
                let a = waves.row(k);
                out[k].kinetic = self.kinetic.expectation(a.as_slice().expect("contiguous rows"), dx, ws);
            }
            let upto = if pair { k + 2 } else { k + 1 };
            for j in k..upto {
                let phi = waves.row(j);
                out[j].external = weighted_real(&self.weights, phi, vext);
                out[j].effective = weighted_real(&self.weights, phi, veff.row(j));
                if let Some(x) = exch {
                    out[j].exchange = weighted_inner(&self.weights, phi, x.row(j));
                }
            }
            k = upto;
        }
        out
    }

    /// One split step `e^{-dτV/2} e^{-dτT} e^{-dτV/2}` plus the explicit
    /// exchange source on a block of consecutive walker rows.
    fn advance_block(
        &self,
        start: usize,
        mut block: ndarray::ArrayViewMut2<C<T>>,
        veff: ndarray::ArrayView2<T>,
        exch: Option<ndarray::ArrayView2<C<T>>>,
        dtau: T,
        prop: &[T],
        electron: usize,
        ws: &mut KineticWorkspace<T>,
    ) -> Result<()> {
        let n = block.ncols();
        let half = -dtau * T::lit(0.5);
        let rows = block.nrows();
        let mut factors: Vec<Vec<T>> = Vec::with_capacity(rows);
        for r in 0..rows {
            let f: Vec<T> = (0..n).map(|g| (half * (self.external[g] + veff[[r, g]])).exp()).collect();
            block.row_mut(r).iter_mut().zip(&f).for_each(|(v, f)| *v = *v * *f);
            factors.push(f);
        }
        let pair = rows == 2 && block.iter().all(|z| z.im == T::zero());
        if pair {
            let (mut a, mut b) = block.view_mut().split_at(Axis(0), 1);
            let a = a.as_slice_mut().expect("contiguous rows");
            let b = b.as_slice_mut().expect("contiguous rows");
            self.kinetic.apply_diagonal_real_pair(a, b, prop, ws);
        } else {
            for r in 0..rows {
                let mut row = block.row_mut(r);
                self.kinetic
                    .apply_diagonal(row.as_slice_mut().expect("contiguous rows"), prop, ws);
            }
        }
        let dx = self.model.grid.dx();
        for r in 0..rows {
            let mut row = block.row_mut(r);
            row.iter_mut().zip(&factors[r]).for_each(|(v, f)| *v = *v * *f);
            if let Some(x) = &exch {
                row.iter_mut().zip(x.row(r)).for_each(|(v, s)| *v = *v + *s * dtau);
            }
            let nrm = norm_sq_view(row.view(), dx).sqrt();
            if !nrm.is_finite() || nrm > T::lit(1e6) || !(nrm > T::zero()) {
                return Err(Error::Instability {
                    op: "propagate_step",
                    walker: start + r,
                    electron,
                    norm: nrm.as_f64(),
                });
            }
            normalize_view(row.view_mut(), dx);
        }
        Ok(())
    }

    /// Regularized exchange action `X φᵢ = A φⱼ |φᵢ|² / (|φᵢ|² + ε²)`.
    fn exchange_sources(&self, state: &TdqmcState<T>) -> Option<[Array2<C<T>>; 2]> {
        let table = self.vee_table.as_ref()?;
        let mut acts = exchange_actions(&state.waves, table);
        for (act, set) in acts.iter_mut().zip(&state.waves.electrons) {
            for (mut a, phi) in act.rows_mut().into_iter().zip(set.waves.rows()) {
                let peak = phi.iter().fold(T::zero(), |m, v| m.max(v.norm()));
                let eps2 = (T::lit(1e-6) * peak).powi(2);
                a.iter_mut().zip(phi.iter()).for_each(|(a, p)| {
                    let d = p.norm_sqr();
                    *a = *a * (d / (d + eps2));
                });
            }
        }
        Some(acts)
    }

    /// Advances every guide wave by `dtau` and records the energy of the
    /// ensemble it started from.
    pub fn step(&self, state: &mut TdqmcState<T>, dtau: T) -> Result<()> {
        check_dtau(dtau)?;
        let veff = [
            effective_potentials(&state.walkers, 0, self.model, state.kernel_width)?,
            effective_potentials(&state.walkers, 1, self.model, state.kernel_width)?,
        ];
        let exch = self.exchange_sources(state);
        let m = state.len();
        let energy_rows: Vec<Vec<Parts<T>>> = (0..2)
            .into_par_iter()
            .map_init(
                || self.kinetic.workspace(),
                |ws, i| {
                    self.energy_parts(
                        &state.waves.electrons[i].waves,
                        &veff[i],
                        exch.as_ref().map(|x| &x[i]),
                        ws,
                    )
                },
            )
            .collect();
        let total: T = (0..m)
            .map(|k| energy_rows[0][k].total() + energy_rows[1][k].total())
            .sum();
        let energy = total / T::from_usize_lossy(m);

        let prop = self.kinetic.propagator(dtau);
        for i in 0..2 {
            let waves = &mut state.waves.electrons[i].waves;
            let v = &veff[i];
            let x = exch.as_ref().map(|x| &x[i]);
            waves
                .axis_chunks_iter_mut(Axis(0), 2)
                .into_par_iter()
                .enumerate()
                .try_for_each_init(
                    || self.kinetic.workspace(),
                    |ws, (c, block)| {
                        let s = 2 * c;
                        let e = (s + 2).min(m);
                        self.advance_block(
                            s,
                            block,
                            v.slice(ndarray::s![s..e, ..]),
                            x.map(|x| x.slice(ndarray::s![s..e, ..])),
                            dtau,
                            &prop,
                            i,
                            ws,
                        )
                    },
                )?;
        }
        if state.waves.spin.is_parallel() {
            orthonormalize_pairs(state);
        }
        state.tau += dtau;
        state.steps += 1;
        state.energy_estimate = energy;
        state.energy_history.push(energy);
        Ok(())
    }
}

/// Gram–Schmidt of `φ₂ᵏ` against `φ₁ᵏ` for every walker.
fn orthonormalize_pairs<T: Real>(state: &mut TdqmcState<T>) {
    let dx = state.waves.grid().dx();
    let [first, second] = &mut state.waves.electrons;
    let a = &first.waves;
    second
        .waves
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(k, mut b): (usize, ArrayViewMut1<C<T>>)| {
            let phi = a.row(k);
            let c = inner_view(b.view(), phi, dx);
            b.iter_mut().zip(phi.iter()).for_each(|(v, p)| *v = *v - *p * c);
            normalize_view(b, dx);
        });
}

/// One imaginary-time step of every guide wave under its own `H_eff`.
pub fn propagate_step<T: Real>(state: &mut TdqmcState<T>, model: &SystemModel<T>, dtau: T) -> Result<()> {
    TdqmcEngine::new(model)?.step(state, dtau)
}

/// Linear interpolation of `|φ|²` at `x`; zero outside the grid.
fn density_at<T: Real>(g: &crate::numerics::grid::Grid1D<T>, phi: ArrayView1<C<T>>, x: T) -> T {
    match g.locate(x) {
        Some((c, f)) => phi[c].norm_sqr() * (T::one() - f) + phi[c + 1].norm_sqr() * f,
        None => T::zero(),
    }
}

/// `moves_per_step` Metropolis moves per electron and walker, each walker
/// drawing from its own stream.
pub fn resample_walkers<T: Real>(state: &mut TdqmcState<T>, moves_per_step: usize, proposal_width: T) -> Result<()> {
    if moves_per_step == 0 {
        return Err(Error::param("moves_per_step", "must be at least 1"));
    }
    if !(proposal_width > T::zero()) || !proposal_width.is_finite() {
        return Err(Error::param("proposal_width", "must be positive"));
    }
    let g = state.waves.grid();
    let [a, b] = &state.waves.electrons;
    let sets = [&a.waves, &b.waves];
    state
        .walkers
        .positions
        .par_iter_mut()
        .zip(state.rngs.par_iter_mut())
        .enumerate()
        .for_each(|(k, (pos, rng))| {
            for (i, set) in sets.iter().enumerate() {
                let phi = set.row(k);
                let mut x = pos[i];
                let mut p = density_at(&g, phi, x);
                for _ in 0..moves_per_step {
                    let z: f64 = rng.sample(StandardNormal);
                    let u: f64 = rng.random();
                    let nx = x + T::lit(z) * proposal_width;
                    if !g.contains(nx) {
                        continue;
                    }
                    let np = density_at(&g, phi, nx);
                    if np >= p || T::lit(u) * p < np {
                        x = nx;
                        p = np;
                    }
                }
                pos[i] = x;
            }
        });
    Ok(())
}

/// Drift of the trailing-mean energy per step between the last two windows.
pub fn energy_drift<T: Real>(history: &[T], window: usize) -> Option<T> {
    if window == 0 || history.len() < 2 * window {
        return None;
    }
    let n = history.len();
    let w = T::from_usize_lossy(window);
    let last = history[n - window..].iter().copied().sum::<T>() / w;
    let prev = history[n - 2 * window..n - window].iter().copied().sum::<T>() / w;
    Some((last - prev).abs() / w)
}

fn refresh_width<T: Real>(state: &mut TdqmcState<T>, factor: T) {
    let s = pooled_spread(&state.walkers);
    if s > T::zero() && s.is_finite() {
        state.kernel_width = factor * s;
    }
}

/// Alternates steps and walker moves from `state` until the energy settles.
pub fn run_from<T: Real>(mut state: TdqmcState<T>, model: &SystemModel<T>, params: &TdqmcParams<T>) -> Result<TdqmcState<T>> {
    params.validate()?;
    let engine = TdqmcEngine::new(model)?;
    let (factor, every) = match &params.kernel {
        KernelPolicy::Fixed(w) => {
            state.kernel_width = *w;
            (None, 0)
        }
        KernelPolicy::Adaptive { factor, every } => (Some(*factor), *every),
        KernelPolicy::Variational { .. } => {
            return Err(Error::param("kernel", "resolve the variational policy before run_from"));
        }
    };
    let mut drifts = Vec::new();
    let start = state.steps;
    for s in 0..params.max_steps {
        if let Some(f) = factor {
            if s % every == 0 {
                refresh_width(&mut state, f);
            }
        }
        engine.step(&mut state, params.dtau)?;
        resample_walkers(&mut state, params.moves_per_step, params.proposal_width)?;
        let done = state.steps - start;
        let hist = &state.energy_history[state.energy_history.len() - done.min(state.energy_history.len())..];
        if let Some(d) = energy_drift(hist, params.window) {
            if done % params.window == 0 {
                drifts.push(d.as_f64());
            }
            if done >= params.min_steps && d < params.energy_tol {
                return Ok(state);
            }
        }
    }
    Err(Error::Convergence {
        op: "tdqmc",
        steps: params.max_steps,
        last_energy: state.energy_estimate.as_f64(),
        drift: drifts.last().copied().unwrap_or(f64::NAN),
        drift_history: drifts,
    })
}

/// Outcome of a converged run, with the factor a variational sweep picked.
#[derive(Debug, Clone)]
pub struct TdqmcRun<T> {
    pub state: TdqmcState<T>,
    pub kernel_factor: Option<T>,
    pub probe_energies: Vec<(T, T)>,
}

/// Full run from a fresh ensemble.
pub fn run_to_convergence<T: Real>(model: &SystemModel<T>, params: &TdqmcParams<T>) -> Result<TdqmcRun<T>> {
    params.validate()?;
    let init = init_ensemble(model, params.walkers, params.seed)?;
    match &params.kernel {
        KernelPolicy::Variational {
            factors,
            probe_steps,
            every,
        } => {
            let engine = TdqmcEngine::new(model)?;
            let mut probes = Vec::with_capacity(factors.len());
            for &f in factors {
                let mut st = init.clone();
                for s in 0..*probe_steps {
                    if s % every == 0 {
                        refresh_width(&mut st, f);
                    }
                    engine.step(&mut st, params.dtau)?;
                    resample_walkers(&mut st, params.moves_per_step, params.proposal_width)?;
                }
                probes.push((f, st.smoothed_energy((*probe_steps / 2).max(1))));
            }
            let best = probes
                .iter()
                .copied()
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|p| p.0)
                .expect("at least one factor");
            let inner = TdqmcParams {
                kernel: KernelPolicy::Adaptive {
                    factor: best,
                    every: *every,
                },
                ..params.clone()
            };
            Ok(TdqmcRun {
                state: run_from(init, model, &inner)?,
                kernel_factor: Some(best),
                probe_energies: probes,
            })
        }
        KernelPolicy::Adaptive { factor, .. } => Ok(TdqmcRun {
            kernel_factor: Some(*factor),
            state: run_from(init, model, params)?,
            probe_energies: Vec::new(),
        }),
        KernelPolicy::Fixed(_) => Ok(TdqmcRun {
            state: run_from(init, model, params)?,
            kernel_factor: None,
            probe_energies: Vec::new(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, Overrides, Preset, SpinConfig};

    fn model(spin: SpinConfig) -> SystemModel<f64> {
        build_system(
            Preset::Helium,
            &Overrides {
                n: Some(64),
                spin: Some(spin),
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn mean_field_keeps_waves_identical() {
        let m = model(SpinConfig::OppositeSpin);
        let mut st = init_ensemble(&m, 6, 2).unwrap();
        st.kernel_width = 1e6;
        let engine = TdqmcEngine::new(&m).unwrap();
        for _ in 0..5 {
            engine.step(&mut st, 0.01).unwrap();
            resample_walkers(&mut st, 5, 0.3).unwrap();
        }
        for set in &st.waves.electrons {
            let w0 = set.waves.row(0);
            for row in set.waves.rows() {
                for (a, b) in row.iter().zip(w0.iter()) {
                    assert!((a - b).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn step_keeps_unit_norms_and_orthogonality() {
        for spin in [SpinConfig::OppositeSpin, SpinConfig::ParallelSpin] {
            let m = model(spin);
            let mut st = init_ensemble(&m, 5, 4).unwrap();
            for _ in 0..3 {
                propagate_step(&mut st, &m, 0.02).unwrap();
                resample_walkers(&mut st, 3, 0.3).unwrap();
            }
            assert!(st.waves.max_norm_defect() < 1e-12);
            if spin.is_parallel() {
                assert!(st.waves.max_pair_overlap() < 1e-12);
            }
            assert_eq!(st.steps, 3);
            assert!((st.tau - 0.06).abs() < 1e-15);
            assert!(st.energy_estimate.is_finite());
            st.check_invariants().unwrap();
        }
    }

    #[test]
    fn parallel_init_is_orthogonal() {
        let st = init_ensemble(&model(SpinConfig::ParallelSpin), 8, 0).unwrap();
        assert!(st.waves.max_pair_overlap() <= 1e-10);
    }

    #[test]
    fn preconditions() {
        let m = model(SpinConfig::OppositeSpin);
        assert!(init_ensemble(&m, 1, 0).is_err());
        let mut st = init_ensemble(&m, 3, 0).unwrap();
        assert!(propagate_step(&mut st, &m, 0.0).is_err());
        assert!(propagate_step(&mut st, &m, 0.06).is_err());
        assert!(resample_walkers(&mut st, 0, 0.3).is_err());
        assert!(TdqmcParams::<f64> { moves_per_step: 0, ..Default::default() }.validate().is_err());
        assert!(TdqmcParams::<f64> { kernel: KernelPolicy::Fixed(-1.0), ..Default::default() }
            .validate()
            .is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let m = model(SpinConfig::OppositeSpin);
        let run = |seed| {
            let mut st = init_ensemble(&m, 7, seed).unwrap();
            for _ in 0..4 {
                propagate_step(&mut st, &m, 0.01).unwrap();
                resample_walkers(&mut st, 5, 0.3).unwrap();
            }
            st
        };
        let (a, b, c) = (run(9), run(9), run(10));
        assert_eq!(a.walkers, b.walkers);
        assert_eq!(a.waves, b.waves);
        assert_eq!(a.energy_history, b.energy_history);
        assert_ne!(a.walkers, c.walkers);
    }

    #[test]
    fn relabeled_walkers_give_relabeled_results() {
        let m = model(SpinConfig::OppositeSpin);
        let st = init_ensemble(&m, 6, 5).unwrap();
        let order = [3, 0, 5, 1, 4, 2];
        let mut a = st.clone();
        let mut b = st.permuted(&order).unwrap();
        for _ in 0..3 {
            propagate_step(&mut a, &m, 0.01).unwrap();
            resample_walkers(&mut a, 5, 0.3).unwrap();
            propagate_step(&mut b, &m, 0.01).unwrap();
            resample_walkers(&mut b, 5, 0.3).unwrap();
        }
        let ap = a.permuted(&order).unwrap();
        for (p, q) in ap.walkers.positions.iter().zip(&b.walkers.positions) {
            assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        }
        for (x, y) in ap.waves.electrons[0].waves.iter().zip(b.waves.electrons[0].waves.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!(st.permuted(&[0, 0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn drift_over_windows() {
        let h: Vec<f64> = (0..20).map(|i| if i < 10 { 1.0 } else { 2.0 }).collect();
        assert_eq!(energy_drift(&h, 10), Some(0.1));
        assert_eq!(energy_drift(&h, 11), None);
    }

    #[test]
    fn walkers_stay_on_grid() {
        let m = model(SpinConfig::OppositeSpin);
        let mut st = init_ensemble(&m, 50, 1).unwrap();
        for _ in 0..20 {
            resample_walkers(&mut st, 5, 4.0).unwrap();
        }
        assert!(st.walkers.within(&m.grid));
    }
}
