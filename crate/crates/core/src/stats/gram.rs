//! Gram matrices and reduced density matrices of marginal-wave ensembles.

use ndarray::Array2;

use super::spectrum::SchmidtSpectrum;
use crate::error::{Error, Result};
use crate::numerics::eigen::hermitian_eigenvalues;
use crate::numerics::field::{inner_view, norm_sq_slice, WaveSet};
use crate::numerics::grid::Grid1D;
use crate::numerics::linalg::{adjoint_product, hermitize, product_adjoint};
use crate::scalar::{czero, Real, C};

/// `G_kl = ⟨φᵏ, φˡ⟩ / M_sel` over a selected subset of waves.
#[derive(Debug, Clone)]
pub struct GramMatrix<T> {
    pub entries: Array2<C<T>>,
    pub normalization: usize,
}

/// `ρ(r, r') = (1/M_sel) Σ φᵏ*(r) φᵏ(r')` on the grid.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix<T> {
    pub kernel: Array2<C<T>>,
    pub grid: Grid1D<T>,
}

/// Rows of the selected waves scaled by `√w_i`, so plain Euclidean products
/// reproduce trapezoid integrals.
fn weighted_rows<T: Real>(waves: &WaveSet<T>, subset: &[usize]) -> Array2<C<T>> {
    let sw: Vec<T> = waves.grid.weights().into_iter().map(|w| w.sqrt()).collect();
    Array2::from_shape_fn((subset.len(), waves.grid.n()), |(k, i)| {
        waves.waves[[subset[k], i]] * sw[i]
    })
}

fn check_subset<T: Real>(op: &'static str, waves: &WaveSet<T>, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::EmptyDomain { op });
    }
    let m = waves.len();
    if let Some(&bad) = subset.iter().find(|&&k| k >= m) {
        return Err(Error::Dimension {
            op,
            detail: format!("wave index {bad} out of range for {m} waves"),
        });
    }
    let dx = waves.grid.dx();
    let tol = T::tol(1e-8);
    for &k in subset {
        let row = waves.waves.row(k);
        let nrm = match row.as_slice() {
            Some(s) => norm_sq_slice(s, dx),
            None => norm_sq_slice(&row.to_vec(), dx),
        };
        if (nrm - T::one()).abs() > tol {
            return Err(Error::Precondition {
                op,
                detail: format!("wave {k} has norm² {nrm}, expected 1"),
            });
        }
    }
    Ok(())
}

pub fn gram_matrix<T: Real>(waves: &WaveSet<T>, subset: &[usize]) -> Result<GramMatrix<T>> {
    check_subset("gram_matrix", waves, subset)?;
    let m = subset.len();
    let b = weighted_rows(waves, subset);
    let inv = T::from_usize_lossy(m).recip();
    let mut entries = hermitize(&product_adjoint(&b));
    entries.mapv_inplace(|v| v * inv);
    Ok(GramMatrix {
        entries,
        normalization: m,
    })
}

impl<T: Real> GramMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `Σ_{k,l} |G_kl|²`, the purity by the Frobenius route.
    pub fn frobenius_sq(&self) -> T {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn trace(&self) -> T {
        self.entries.diag().iter().map(|v| v.re).sum()
    }
}

/// `Var_H = 1 - (1/M) Σ_{k,l} G_kl`, clamped into `[0, 1]`.
pub fn hilbert_variance<T: Real>(g: &GramMatrix<T>) -> T {
    let total: C<T> = g.entries.iter().fold(czero(), |s, v| s + v);
    let m = T::from_usize_lossy(g.normalization);
    (T::one() - total.re / m).max(T::zero()).min(T::one())
}

/// Functional standard deviation `√Var_H`.
pub fn functional_std<T: Real>(g: &GramMatrix<T>) -> T {
    hilbert_variance(g).sqrt()
}

/// `1 - ‖φ̄‖²` with `φ̄` the mean wave of the subset.
pub fn mean_wave_variance<T: Real>(waves: &WaveSet<T>, subset: &[usize]) -> Result<T> {
    if subset.is_empty() {
        return Err(Error::EmptyDomain { op: "mean_wave_variance" });
    }
    let n = waves.grid.n();
    let inv = T::from_usize_lossy(subset.len()).recip();
    let mut mean = vec![czero::<T>(); n];
    for &k in subset {
        for (m, v) in mean.iter_mut().zip(waves.waves.row(k).iter()) {
            *m += *v;
        }
    }
    mean.iter_mut().for_each(|v| *v = *v * inv);
    let var = T::one() - norm_sq_slice(&mean, waves.grid.dx());
    Ok(var.max(T::zero()).min(T::one()))
}

pub fn spectrum_from_gram<T: Real>(g: &GramMatrix<T>) -> Result<SchmidtSpectrum<T>> {
    SchmidtSpectrum::from_unnormalized(hermitian_eigenvalues(&g.entries)?)
}

/// `S_L = 1 - Σ|G_kl|²` without diagonalizing.
pub fn linear_entropy_from_gram<T: Real>(g: &GramMatrix<T>) -> T {
    T::one() - g.frobenius_sq()
}

/// `C_kl = ⟨φᵢᵏ, φⱼˡ⟩ / M` between two equally sized subsets.
pub fn cross_gram_matrix<T: Real>(
    waves_i: &WaveSet<T>,
    subset_i: &[usize],
    waves_j: &WaveSet<T>,
    subset_j: &[usize],
) -> Result<Array2<C<T>>> {
    if subset_i.len() != subset_j.len() {
        return Err(Error::Dimension {
            op: "cross_gram_matrix",
            detail: format!("subset sizes {} and {}", subset_i.len(), subset_j.len()),
        });
    }
    if waves_i.grid != waves_j.grid {
        return Err(Error::Dimension {
            op: "cross_gram_matrix",
            detail: "wave sets live on different grids".into(),
        });
    }
    if subset_i.is_empty() {
        return Err(Error::EmptyDomain { op: "cross_gram_matrix" });
    }
    let m = subset_i.len();
    let inv = T::from_usize_lossy(m).recip();
    let dx = waves_i.grid.dx();
    Ok(Array2::from_shape_fn((m, m), |(k, l)| {
        inner_view(waves_i.waves.row(subset_i[k]), waves_j.waves.row(subset_j[l]), dx) * inv
    }))
}

pub fn reduced_density_matrix<T: Real>(
    waves: &WaveSet<T>,
    subset: &[usize],
) -> Result<ReducedDensityMatrix<T>> {
    check_subset("reduced_density_matrix", waves, subset)?;
    let inv = T::from_usize_lossy(subset.len()).recip();
    let mut kernel = Array2::from_elem((waves.grid.n(), waves.grid.n()), czero());
    // kernel[i, j] = (1/M) Σ_k conj(φᵏ(i)) φᵏ(j)
    let sel = waves.select(subset);
    let raw = adjoint_product(&sel.waves);
    kernel.zip_mut_with(&raw, |d, s| *d = *s * inv);
    Ok(ReducedDensityMatrix {
        kernel: hermitize(&kernel),
        grid: waves.grid,
    })
}

impl<T: Real> ReducedDensityMatrix<T> {
    /// `√w_i ρ_ij √w_j`, the symmetric form whose eigenvalues are the
    /// occupation numbers.
    pub fn weighted(&self) -> Array2<C<T>> {
        let sw: Vec<T> = self.grid.weights().into_iter().map(|w| w.sqrt()).collect();
        Array2::from_shape_fn(self.kernel.dim(), |(i, j)| self.kernel[[i, j]] * (sw[i] * sw[j]))
    }

    /// `∫ ρ(r, r) dr`.
    pub fn trace(&self) -> T {
        self.kernel
            .diag()
            .iter()
            .enumerate()
            .map(|(i, v)| v.re * self.grid.weight(i))
            .sum()
    }

    /// Ensemble-average density `ρ(r, r)`.
    pub fn density(&self) -> Vec<T> {
        self.kernel.diag().iter().map(|v| v.re).collect()
    }

    /// `Tr ρ² = ∫∫ ρ(r, r') ρ(r', r) dr dr'` by direct quadrature.
    pub fn purity(&self) -> T {
        let n = self.grid.n();
        let mut acc = T::zero();
        for i in 0..n {
            let wi = self.grid.weight(i);
            for j in 0..n {
                acc += (self.kernel[[i, j]] * self.kernel[[j, i]]).re * wi * self.grid.weight(j);
            }
        }
        acc
    }

    pub fn spectrum(&self) -> Result<SchmidtSpectrum<T>> {
        SchmidtSpectrum::from_unnormalized(hermitian_eigenvalues(&self.weighted())?)
    }
}
