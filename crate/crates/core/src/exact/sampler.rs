use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::TwoBodyState;
use crate::error::{Error, Result};
use crate::numerics::field::{normalize_view, WaveSet};
use crate::numerics::grid::Grid1D;
use crate::rng::{stream_rng, Stream};
use crate::scalar::{czero, Real};
use crate::tdqmc::WalkerEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams<T> {
    /// Standard deviation of the isotropic Gaussian proposal.
    pub step: T,
    pub burn_in: usize,
    pub thin: usize,
}

impl<T: Real> Default for SamplerParams<T> {
    fn default() -> Self {
        Self {
            step: T::lit(0.5),
            burn_in: 2000,
            thin: 10,
        }
    }
}

/// Bilinear interpolation of a nodal table on the square grid.
fn bilinear<T: Real>(table: &Array2<T>, g: &Grid1D<T>, x: T, y: T) -> T {
    let (Some((i, fx)), Some((j, fy))) = (g.locate(x), g.locate(y)) else {
        return T::zero();
    };
    let one = T::one();
    table[[i, j]] * (one - fx) * (one - fy)
        + table[[i + 1, j]] * fx * (one - fy)
        + table[[i, j + 1]] * (one - fx) * fy
        + table[[i + 1, j + 1]] * fx * fy
}

/// Metropolis chain on the bilinear interpolant of `|Ψ|²`.
///
/// Every move is a Gaussian step followed by an exchange `(y, x)` or parity
/// `(-x, -y)` proposal; the latter lets the chain cross the exchange node.
/// The chain starts at the density maximum, discards `burn_in` moves, then
/// keeps every `thin`-th configuration.
pub fn sample_walkers<T: Real>(
    state: &TwoBodyState<T>,
    m: usize,
    seed: u64,
    params: &SamplerParams<T>,
) -> Result<WalkerEnsemble<T>> {
    if m == 0 {
        return Err(Error::param("M", "need at least one walker"));
    }
    if params.thin == 0 {
        return Err(Error::param("thin", "must be at least 1"));
    }
    if !(params.step > T::zero()) {
        return Err(Error::param("step", "proposal width must be positive"));
    }
    let g = state.psi.grid.gx;
    let dens = state.psi.values.mapv(|v| v.norm_sqr());
    let (mut best, mut at) = (T::zero(), (0, 0));
    for ((i, j), d) in dens.indexed_iter() {
        if *d > best {
            best = *d;
            at = (i, j);
        }
    }
    let mut rng = stream_rng(seed, Stream::ExactSampler, 0);
    let (mut x, mut y) = (g.point(at.0), g.point(at.1));
    let mut p = bilinear(&dens, &g, x, y);
    let mut out = Vec::with_capacity(m);
    let total = params.burn_in + m * params.thin;
    for step in 1..=total {
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let nx = x + T::lit(dx) * params.step;
        let ny = y + T::lit(dy) * params.step;
        let u: f64 = rng.random();
        if g.contains(nx) && g.contains(ny) {
            let np = bilinear(&dens, &g, nx, ny);
            if np >= p || T::lit(u) * p < np {
                x = nx;
                y = ny;
                p = np;
            }
        }
        // Reflections are involutions, so the plain Metropolis ratio applies.
        let (rx, ry) = if rng.random::<bool>() { (y, x) } else { (-x, -y) };
        let u: f64 = rng.random();
        if g.contains(rx) && g.contains(ry) {
            let np = bilinear(&dens, &g, rx, ry);
            if np >= p || T::lit(u) * p < np {
                x = rx;
                y = ry;
                p = np;
            }
        }
        if step > params.burn_in && (step - params.burn_in) % params.thin == 0 {
            out.push([x, y]);
        }
    }
    WalkerEnsemble::new(out)
}

/// Strict conditional waves with the anchors they were sliced at.
#[derive(Debug, Clone)]
pub struct ConditionalWaveSet<T> {
    pub waves: WaveSet<T>,
    pub anchors: Vec<T>,
}

/// Slices of `Ψ` at the partner coordinate of every walker.
///
/// For `electron = 0` wave `k` is `Ψ(x, yₖ)`; for `electron = 1` it is
/// `Ψ(xₖ, y)`. Slices are interpolated linearly between grid lines and
/// normalized.
pub fn conditional_waves<T: Real>(
    state: &TwoBodyState<T>,
    walkers: &WalkerEnsemble<T>,
    electron: usize,
) -> Result<ConditionalWaveSet<T>> {
    if electron > 1 {
        return Err(Error::param("electron", format!("must be 0 or 1, got {electron}")));
    }
    let g = state.psi.grid.gx;
    let n = g.n();
    let psi = &state.psi.values;
    let partner = 1 - electron;
    let mut waves = Array2::from_elem((walkers.len(), n), czero::<T>());
    let mut anchors = Vec::with_capacity(walkers.len());
    for (k, pos) in walkers.positions.iter().enumerate() {
        let a = pos[partner];
        let (c, f) = g.locate(a).ok_or_else(|| Error::Precondition {
            op: "conditional_waves",
            detail: format!("walker {k} anchor {a} lies outside the grid"),
        })?;
        let one = T::one();
        let mut row = waves.row_mut(k);
        for i in 0..n {
            let (lo, hi) = if electron == 0 {
                (psi[[i, c]], psi[[i, c + 1]])
            } else {
                (psi[[c, i]], psi[[c + 1, i]])
            };
            row[i] = lo * (one - f) + hi * f;
        }
        let nrm = normalize_view(row, g.dx());
        if !(nrm > T::lit(1e-12)) {
            return Err(Error::DegenerateInput {
                op: "conditional_waves",
                detail: format!("slice norm {nrm:e} at walker {k} (anchor {a}); resample that walker"),
            });
        }
        anchors.push(a);
    }
    Ok(ConditionalWaveSet {
        waves: WaveSet::new(g, waves)?,
        anchors,
    })
}
