//! Grids, quadrature, dense Hermitian eigensolver and two-body Schmidt
//! decomposition.

pub mod eigen;
pub mod field;
pub mod grid;
pub mod kinetic;
pub mod linalg;

pub use eigen::{hermitian_eigendecompose, hermitian_eigenvalues, HermitianSpectrum};
pub use field::{inner_product, normalize, ComplexField1D, ComplexField2D, WaveSet};
pub use grid::{Grid1D, Grid2D};
pub use kinetic::{KineticWorkspace, SineKinetic};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::stats::SchmidtSpectrum;

/// Quadrature-weighted amplitude matrix `Ψ(x_i, y_j)·√(w_i w_j)`.
///
/// Its singular values squared are the Schmidt coefficients of `Ψ`.
pub fn weighted_amplitudes<T: Real>(psi: &ComplexField2D<T>) -> Array2<C<T>> {
    let wx: Vec<T> = psi.grid.gx.weights().into_iter().map(|w| w.sqrt()).collect();
    let wy: Vec<T> = psi.grid.gy.weights().into_iter().map(|w| w.sqrt()).collect();
    Array2::from_shape_fn(psi.values.dim(), |(i, j)| psi.values[[i, j]] * (wx[i] * wy[j]))
}

/// Schmidt spectrum of a normalized two-body amplitude.
///
/// The singular values come from the eigenvalues of the Hermitian matrix
/// `B†B` with `B` the weighted amplitude matrix.
pub fn schmidt_decompose<T: Real>(psi: &ComplexField2D<T>) -> Result<SchmidtSpectrum<T>> {
    let norm = psi.norm_sq();
    if (norm - T::one()).abs() > T::tol(1e-8) {
        return Err(Error::Precondition {
            op: "schmidt_decompose",
            detail: format!("state norm² is {norm}, expected 1"),
        });
    }
    let b = weighted_amplitudes(psi);
    let gram = linalg::adjoint_product(&b);
    let eig = hermitian_eigenvalues(&gram)?;
    SchmidtSpectrum::from_unnormalized(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(-8.0, 8.0, 96).unwrap()
    }

    fn orthonormal_pair() -> (ComplexField1D<f64>, ComplexField1D<f64>) {
        let g = grid();
        let u = normalize(&ComplexField1D::from_real_fn(g, |x| (-x * x / 2.0).exp())).unwrap();
        let v = normalize(&ComplexField1D::from_real_fn(g, |x| x * (-x * x / 2.0).exp())).unwrap();
        (u, v)
    }

    #[test]
    fn product_state_is_rank_one() {
        let (u, v) = orthonormal_pair();
        let psi = ComplexField2D::product(&u, &v);
        let s = schmidt_decompose(&psi).unwrap();
        assert!((s.lambdas()[0] - 1.0).abs() < 1e-12);
        assert!(s.lambdas()[1..].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn antisymmetric_pair_splits_evenly() {
        let (u, v) = orthonormal_pair();
        let a = ComplexField2D::product(&u, &v);
        let b = ComplexField2D::product(&v, &u);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ComplexField2D {
            grid: a.grid,
            values: (&a.values - &b.values).mapv(|z| z * r),
        };
        let s = schmidt_decompose(&psi).unwrap();
        assert!((s.lambdas()[0] - 0.5).abs() < 1e-12);
        assert!((s.lambdas()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cos_sin_superposition() {
        let (u, v) = orthonormal_pair();
        let theta: f64 = 0.3;
        let uu = ComplexField2D::product(&u, &u);
        let vv = ComplexField2D::product(&v, &v);
        let psi = ComplexField2D {
            grid: uu.grid,
            values: &uu.values.mapv(|z| z * theta.cos()) + &vv.values.mapv(|z| z * theta.sin()),
        };
        let s = schmidt_decompose(&psi).unwrap();
        // direct evaluation: cos²(0.3) = 0.912668...
        let c2 = 0.9126678074548391;
        assert!((theta.cos().powi(2) - c2).abs() < 1e-15);
        assert!((s.lambdas()[0] - c2).abs() < 1e-10);
        assert!((s.lambdas()[1] - (1.0 - c2)).abs() < 1e-10);
    }

    #[test]
    fn unnormalized_rejected() {
        let (u, v) = orthonormal_pair();
        let mut psi = ComplexField2D::product(&u, &v);
        psi.values.mapv_inplace(|z| z * 1.1);
        assert!(matches!(schmidt_decompose(&psi), Err(Error::Precondition { .. })));
    }
}
