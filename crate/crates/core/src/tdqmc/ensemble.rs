use ndarray::Array2;
use rand::Rng;

use super::WalkerEnsemble;
use crate::error::{Error, Result};
use crate::model::{SpinConfig, SystemModel};
use crate::numerics::field::{inner_view, normalize_view, WaveSet};
use crate::numerics::grid::Grid1D;
use crate::rng::{stream_rng, Stream, StreamRng};
use crate::scalar::{Real, C};

/// Guide waves `φᵢᵏ`, one stack of `M` waves per electron.
#[derive(Debug, Clone, PartialEq)]
pub struct GuideWaveEnsemble<T> {
    pub electrons: [WaveSet<T>; 2],
    pub spin: SpinConfig,
}

impl<T: Real> GuideWaveEnsemble<T> {
    #[inline]
    pub fn len(&self) -> usize {
        self.electrons[0].len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.electrons[0].is_empty()
    }

    #[inline]
    pub fn grid(&self) -> Grid1D<T> {
        self.electrons[0].grid
    }

    /// Largest `|‖φᵢᵏ‖² - 1|` over all waves.
    pub fn max_norm_defect(&self) -> T {
        self.electrons
            .iter()
            .flat_map(|w| w.norms_sq())
            .fold(T::zero(), |m, v| m.max((v - T::one()).abs()))
    }

    /// Largest `|⟨φ₁ᵏ, φ₂ᵏ⟩|` over walkers.
    pub fn max_pair_overlap(&self) -> T {
        let dx = self.grid().dx();
        let (a, b) = (&self.electrons[0].waves, &self.electrons[1].waves);
        (0..self.len()).fold(T::zero(), |m, k| m.max(inner_view(a.row(k), b.row(k), dx).norm()))
    }
}

/// Walkers, guide waves and the bookkeeping of one TDQMC run.
///
/// `rngs[k]` is the Metropolis stream owned by walker slot `k`.
#[derive(Debug, Clone)]
pub struct TdqmcState<T> {
    pub walkers: WalkerEnsemble<T>,
    pub waves: GuideWaveEnsemble<T>,
    pub tau: T,
    /// Total-energy estimate of the last step, a.u.
    pub energy_estimate: T,
    pub kernel_width: T,
    pub steps: usize,
    pub energy_history: Vec<T>,
    pub rngs: Vec<StreamRng>,
}

impl<T: Real> TdqmcState<T> {
    #[inline]
    pub fn len(&self) -> usize {
        self.walkers.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.walkers.is_empty()
    }

    /// Trailing mean of the energy history over `window` steps.
    pub fn smoothed_energy(&self, window: usize) -> T {
        let h = &self.energy_history;
        if h.is_empty() {
            return self.energy_estimate;
        }
        let w = window.clamp(1, h.len());
        h[h.len() - w..].iter().copied().sum::<T>() / T::from_usize_lossy(w)
    }

    /// Walker slots reordered as `order[new] = old`, waves and streams included.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let m = self.len();
        let mut seen = vec![false; m];
        if order.len() != m || order.iter().any(|&k| k >= m || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::param("order", "not a permutation of the walker slots"));
        }
        let mut waves = self.waves.clone();
        for (set, src) in waves.electrons.iter_mut().zip(&self.waves.electrons) {
            *set = src.select(order);
        }
        Ok(Self {
            walkers: self.walkers.permuted(order),
            waves,
            rngs: order.iter().map(|&k| self.rngs[k].clone()).collect(),
            energy_history: self.energy_history.clone(),
            tau: self.tau,
            energy_estimate: self.energy_estimate,
            kernel_width: self.kernel_width,
            steps: self.steps,
        })
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.walkers.len() != self.waves.len() || self.rngs.len() != self.len() {
            return Err(Error::Invariant {
                op: "TdqmcState",
                detail: format!("{} walkers, {} waves, {} streams", self.walkers.len(), self.waves.len(), self.rngs.len()),
            });
        }
        if !(self.kernel_width > T::zero()) {
            return Err(Error::Invariant {
                op: "TdqmcState",
                detail: format!("kernel width {}", self.kernel_width),
            });
        }
        if !self.walkers.within(&self.waves.grid()) {
            return Err(Error::Invariant {
                op: "TdqmcState",
                detail: "walker outside the grid".into(),
            });
        }
        Ok(())
    }
}

/// Standard deviation of all walker coordinates pooled over both electrons.
pub fn pooled_spread<T: Real>(walkers: &WalkerEnsemble<T>) -> T {
    let xs: Vec<T> = walkers.positions.iter().flat_map(|p| p.iter().copied()).collect();
    let n = T::from_usize_lossy(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    (xs.iter().map(|x| (*x - mean) * (*x - mean)).sum::<T>() / n).sqrt()
}

/// Inverse-CDF draw from the piecewise-linear density `dens` on `g`.
fn draw_from<T: Real>(g: &Grid1D<T>, cdf: &[T], dens: &[T], rng: &mut StreamRng) -> T {
    let total = cdf[cdf.len() - 1];
    let u = T::lit(rng.random::<f64>()) * total;
    let cell = cdf.partition_point(|c| *c <= u).clamp(1, cdf.len() - 1) - 1;
    let mass = cdf[cell + 1] - cdf[cell];
    let (a, b) = (dens[cell], dens[cell + 1]);
    let r = if mass > T::zero() { (u - cdf[cell]) / mass } else { T::lit(0.5) };
    // invert a·t + (b-a)t²/2 = r·(a+b)/2 on [0, 1]
    let t = if (b - a).abs() <= T::epsilon() * (a + b) {
        r
    } else {
        let q = a * a + (b * b - a * a) * r;
        (q.max(T::zero()).sqrt() - a) / (b - a)
    };
    g.point(cell) + t.max(T::zero()).min(T::one()) * g.dx()
}

fn cumulative<T: Real>(g: &Grid1D<T>, dens: &[T]) -> Vec<T> {
    let half = g.dx() * T::lit(0.5);
    let mut cdf = Vec::with_capacity(dens.len());
    let mut acc = T::zero();
    cdf.push(acc);
    for w in dens.windows(2) {
        acc += (w[0] + w[1]) * half;
        cdf.push(acc);
    }
    cdf
}

/// Starting ensemble: Gaussian guide waves `exp(-x²/2)`, with the odd
/// partner `x·exp(-x²/2)` for parallel spins, and walkers drawn from `|φᵢ|²`.
///
/// The kernel width starts at half the pooled walker spread.
pub fn init_ensemble<T: Real>(model: &SystemModel<T>, m: usize, seed: u64) -> Result<TdqmcState<T>> {
    if m < 2 {
        return Err(Error::param("M", format!("need at least 2 walkers, got {m}")));
    }
    model.validate()?;
    let g = model.grid;
    let n = g.n();
    let even: Vec<T> = g.points().map(|x| (-x * x * T::lit(0.5)).exp()).collect();
    let shapes: [Vec<T>; 2] = match model.spin {
        SpinConfig::OppositeSpin => [even.clone(), even],
        SpinConfig::ParallelSpin => {
            let odd = g.points().zip(&even).map(|(x, e)| x * *e).collect();
            [even, odd]
        }
    };
    let mut sets = Vec::with_capacity(2);
    let mut samplers = Vec::with_capacity(2);
    for shape in &shapes {
        let mut row = Array2::from_shape_fn((1, n), |(_, j)| C::new(shape[j], T::zero()));
        normalize_view(row.row_mut(0), g.dx());
        let dens: Vec<T> = row.row(0).iter().map(|v| v.norm_sqr()).collect();
        let waves = Array2::from_shape_fn((m, n), |(_, j)| row[[0, j]]);
        sets.push(WaveSet::new(g, waves)?);
        let cdf = cumulative(&g, &dens);
        samplers.push((cdf, dens));
    }
    let mut rng = stream_rng(seed, Stream::WalkerInit, 0);
    let positions: Vec<[T; 2]> = (0..m)
        .map(|_| {
            let x1 = draw_from(&g, &samplers[0].0, &samplers[0].1, &mut rng);
            let x2 = draw_from(&g, &samplers[1].0, &samplers[1].1, &mut rng);
            [x1, x2]
        })
        .collect();
    let walkers = WalkerEnsemble::new(positions)?;
    let spread = pooled_spread(&walkers);
    let kernel_width = if spread > T::zero() { spread * T::lit(0.5) } else { T::lit(0.5) };
    let second = sets.pop().expect("two electrons");
    let first = sets.pop().expect("two electrons");
    Ok(TdqmcState {
        walkers,
        waves: GuideWaveEnsemble {
            electrons: [first, second],
            spin: model.spin,
        },
        tau: T::zero(),
        energy_estimate: T::nan(),
        kernel_width,
        steps: 0,
        energy_history: Vec::new(),
        rngs: (0..m as u64).map(|k| stream_rng(seed, Stream::Metropolis, k)).collect(),
    })
}
