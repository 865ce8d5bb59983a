//! Ensemble statistics: classical walker moments, Gram and reduced density
//! matrices of marginal waves, and the entropies derived from their spectra.

mod classical;
mod gram;
mod spectrum;

pub use classical::{variance_decomposition, walker_statistics, ClassicalStats, VarianceDecomposition};
pub use gram::{
    cross_gram_matrix, functional_std, gram_matrix, hilbert_variance, linear_entropy_from_gram,
    mean_wave_variance, reduced_density_matrix, spectrum_from_gram, GramMatrix, ReducedDensityMatrix,
};
pub use spectrum::{
    effective_schmidt_number, linear_entropy, von_neumann_entropy, SchmidtSpectrum, LOG_FLOOR,
    NEGATIVE_CLAMP,
};

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::eigen::hermitian_eigenvalues;
use crate::numerics::field::{inner_product, ComplexField1D, ComplexField2D, WaveSet};
use crate::numerics::grid::Grid2D;
use crate::scalar::{Real, C};

/// Which side of the Gram/RDM duality produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyRoute {
    Gram,
    Rdm,
}

/// Second-order statistics of one subset of marginal waves.
#[derive(Debug, Clone, Serialize)]
pub struct SubsetStatistics<T> {
    pub count: usize,
    pub variance: T,
    pub sigma: T,
    pub entropy: T,
    pub linear_entropy: T,
    pub k_eff: T,
    pub spectrum: SchmidtSpectrum<T>,
    pub route: EntropyRoute,
}

impl<T: Real> SubsetStatistics<T> {
    fn assemble(count: usize, variance: T, spectrum: SchmidtSpectrum<T>, route: EntropyRoute) -> Self {
        Self {
            count,
            variance,
            sigma: variance.sqrt(),
            entropy: spectrum.von_neumann_entropy(),
            linear_entropy: spectrum.linear_entropy(),
            k_eff: spectrum.effective_schmidt_number(),
            spectrum,
            route,
        }
    }
}

/// Variance, spectrum and entropies of `subset`, diagonalizing whichever of
/// the `M_sel × M_sel` Gram matrix or the `n × n` RDM is smaller.
pub fn subset_statistics<T: Real>(waves: &WaveSet<T>, subset: &[usize]) -> Result<SubsetStatistics<T>> {
    if subset.len() < waves.grid.n() {
        subset_statistics_via(waves, subset, EntropyRoute::Gram)
    } else {
        subset_statistics_via(waves, subset, EntropyRoute::Rdm)
    }
}

pub fn subset_statistics_via<T: Real>(
    waves: &WaveSet<T>,
    subset: &[usize],
    route: EntropyRoute,
) -> Result<SubsetStatistics<T>> {
    match route {
        EntropyRoute::Gram => {
            let g = gram_matrix(waves, subset)?;
            let spec = spectrum_from_gram(&g)?;
            Ok(SubsetStatistics::assemble(subset.len(), hilbert_variance(&g), spec, route))
        }
        EntropyRoute::Rdm => {
            let rdm = reduced_density_matrix(waves, subset)?;
            let spec = rdm.spectrum()?;
            let var = mean_wave_variance(waves, subset)?;
            Ok(SubsetStatistics::assemble(subset.len(), var, spec, route))
        }
    }
}

/// Identical-fermion statistics of a subset of walkers.
///
/// Each walker contributes the one-body density of its Slater pair,
/// `½(|φ₁ᵏ⟩⟨φ₁ᵏ| + |φ₂ᵏ⟩⟨φ₂ᵏ|)`, so the subset RDM is the Gram mixture of
/// all `2 M_sel` orbitals. A single walker gives exactly `ln 2`.
pub fn slater_mixture_statistics<T: Real>(
    first: &WaveSet<T>,
    second: &WaveSet<T>,
    subset: &[usize],
) -> Result<SubsetStatistics<T>> {
    if first.len() != second.len() {
        return Err(Error::Dimension {
            op: "slater_mixture_statistics",
            detail: format!("{} and {} orbitals", first.len(), second.len()),
        });
    }
    let both = first.concat(second)?;
    let m = first.len();
    let joint: Vec<usize> = subset.iter().copied().chain(subset.iter().map(|&k| k + m)).collect();
    subset_statistics(&both, &joint)
}

/// `(φ₁ ⊗ φ₂ - φ₂ ⊗ φ₁) / √2` on the square grid.
pub fn slater_state<T: Real>(phi1: &ComplexField1D<T>, phi2: &ComplexField1D<T>) -> Result<ComplexField2D<T>> {
    if phi1.grid != phi2.grid {
        return Err(Error::Dimension {
            op: "slater_state",
            detail: "orbitals live on different grids".into(),
        });
    }
    let r = T::FRAC_1_SQRT_2();
    let n = phi1.grid.n();
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        (phi1.values[i] * phi2.values[j] - phi2.values[i] * phi1.values[j]) * r
    });
    Ok(ComplexField2D {
        grid: Grid2D::square(phi1.grid),
        values,
    })
}

/// One-body entropy of the Slater pair built from `phi1`, `phi2`.
///
/// The pair state lives in `span{φ₁, φ₂}`, so the partial trace is done on
/// its 2×2 coefficient matrix in an orthonormal basis of that span.
pub fn slater_pair_entropy<T: Real>(phi1: &ComplexField1D<T>, phi2: &ComplexField1D<T>) -> Result<T> {
    Ok(slater_pair_spectrum(phi1, phi2)?.von_neumann_entropy())
}

pub fn slater_pair_spectrum<T: Real>(
    phi1: &ComplexField1D<T>,
    phi2: &ComplexField1D<T>,
) -> Result<SchmidtSpectrum<T>> {
    let ov = inner_product(phi2, phi1)?;
    let n1 = phi1.norm_sq();
    let n2 = phi2.norm_sq();
    let tol = T::tol(1e-8);
    if (n1 - T::one()).abs() > tol || (n2 - T::one()).abs() > tol {
        return Err(Error::Precondition {
            op: "slater_pair_entropy",
            detail: format!("orbital norms² {n1}, {n2}; expected 1"),
        });
    }
    if ov.norm() > T::tol(1e-6) {
        return Err(Error::Precondition {
            op: "slater_pair_entropy",
            detail: format!("orbitals overlap by {:.3e}", ov.norm()),
        });
    }
    // φ₁ = e₁, φ₂ = ov·e₁ + β e₂ with β = ‖φ₂ - ov·φ₁‖
    let beta = (n2 - ov.norm_sqr()).max(T::zero()).sqrt();
    let zero = C::new(T::zero(), T::zero());
    let a = [C::new(T::one(), T::zero()), zero];
    let b = [ov, C::new(beta, T::zero())];
    let r = T::FRAC_1_SQRT_2();
    let coeff = Array2::from_shape_fn((2, 2), |(i, j)| (a[i] * b[j] - b[i] * a[j]) * r);
    let rho = Array2::from_shape_fn((2, 2), |(i, j)| {
        (0..2).fold(zero, |s, l| s + coeff[[i, l]] * coeff[[j, l]].conj())
    });
    SchmidtSpectrum::from_unnormalized(hermitian_eigenvalues(&rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::field::normalize;
    use crate::numerics::grid::Grid1D;
    use crate::numerics::schmidt_decompose;

    fn pair() -> (ComplexField1D<f64>, ComplexField1D<f64>) {
        let g = Grid1D::new(-8.0f64, 8.0, 80).unwrap();
        let u = normalize(&ComplexField1D::from_real_fn(g, |x| (-x * x / 2.0).exp())).unwrap();
        let v = normalize(&ComplexField1D::from_fn(g, |x| C::new(x, 0.3 * x) * (-x * x / 2.0).exp())).unwrap();
        (u, v)
    }

    #[test]
    fn slater_pair_is_ln2() {
        let (u, v) = pair();
        let s = slater_pair_entropy(&u, &v).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-12);
        let spec = schmidt_decompose(&slater_state(&u, &v).unwrap()).unwrap();
        assert!((spec.lambdas()[0] - 0.5).abs() < 1e-10);
        assert!((spec.lambdas()[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn slater_pair_rejects_overlap() {
        let (u, _) = pair();
        assert!(matches!(slater_pair_entropy(&u, &u), Err(Error::Precondition { .. })));
    }

    #[test]
    fn single_walker_mixture_is_ln2() {
        let (u, v) = pair();
        let a = WaveSet::from_fields(&[u]).unwrap();
        let b = WaveSet::from_fields(&[v]).unwrap();
        let s = slater_mixture_statistics(&a, &b, &[0]).unwrap();
        assert!((s.entropy - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn routes_agree() {
        let (u, v) = pair();
        let w = normalize(&ComplexField1D {
            grid: u.grid,
            values: u.values.iter().zip(&v.values).map(|(a, b)| a * 0.8 + b * 0.4).collect(),
        })
        .unwrap();
        let ws = WaveSet::from_fields(&[u, v, w]).unwrap();
        let g = subset_statistics_via(&ws, &[0, 1, 2], EntropyRoute::Gram).unwrap();
        let r = subset_statistics_via(&ws, &[0, 1, 2], EntropyRoute::Rdm).unwrap();
        assert!((g.entropy - r.entropy).abs() < 1e-10);
        assert!((g.variance - r.variance).abs() < 1e-12);
        assert!((g.k_eff - r.k_eff).abs() < 1e-10);
    }
}
