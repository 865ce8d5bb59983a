use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues below this are dropped from `λ ln λ`.
pub const LOG_FLOOR: f64 = 1e-14;
/// Roundoff negativity absorbed by clamping to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// Descending, non-negative eigenvalue list summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum<T> {
    lambdas: Vec<T>,
}

impl<T: Real> SchmidtSpectrum<T> {
    /// Validates a spectrum that should already sum to one.
    pub fn from_eigenvalues(values: Vec<T>) -> Result<Self> {
        let spec = Self::clamped(values)?;
        let total: T = spec.lambdas.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-8) {
            return Err(Error::Invariant {
                op: "SchmidtSpectrum",
                detail: format!("eigenvalues sum to {total}, expected 1"),
            });
        }
        Ok(spec)
    }

    /// Rescales non-negative weights (e.g. squared singular values) to unit sum.
    pub fn from_unnormalized(values: Vec<T>) -> Result<Self> {
        let total: T = values.iter().copied().sum();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::DegenerateInput {
                op: "SchmidtSpectrum",
                detail: format!("eigenvalue sum is {total}"),
            });
        }
        Self::clamped(values.into_iter().map(|v| v / total).collect())
    }

    fn clamped(mut values: Vec<T>) -> Result<Self> {
        let floor = -T::tol(NEGATIVE_CLAMP);
        for v in values.iter_mut() {
            if !v.is_finite() || *v < floor {
                return Err(Error::Invariant {
                    op: "SchmidtSpectrum",
                    detail: format!("eigenvalue {v} is below the clamp floor {floor}"),
                });
            }
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { lambdas: values })
    }

    #[inline]
    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Leading `m` values, zero-padded when the spectrum is shorter.
    pub fn top(&self, m: usize) -> Vec<T> {
        (0..m)
            .map(|i| self.lambdas.get(i).copied().unwrap_or_else(T::zero))
            .collect()
    }

    /// `Σ λ²`, the purity `Tr ρ²`.
    pub fn purity(&self) -> T {
        self.lambdas.iter().map(|&l| l * l).sum()
    }

    pub fn von_neumann_entropy(&self) -> T {
        von_neumann_entropy(self)
    }

    pub fn linear_entropy(&self) -> T {
        linear_entropy(self)
    }

    pub fn effective_schmidt_number(&self) -> T {
        effective_schmidt_number(self)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| l.as_f64()).collect()
    }
}

/// `S = -Σ λ ln λ` over `λ > 1e-14`, in nats.
pub fn von_neumann_entropy<T: Real>(spec: &SchmidtSpectrum<T>) -> T {
    let floor = T::lit(LOG_FLOOR);
    let s: T = spec
        .lambdas
        .iter()
        .filter(|&&l| l > floor)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(T::zero())
}

/// `S_L = 1 - Σ λ²`.
pub fn linear_entropy<T: Real>(spec: &SchmidtSpectrum<T>) -> T {
    T::one() - spec.purity()
}

/// Inverse participation ratio `1 / Σ λ²`.
pub fn effective_schmidt_number<T: Real>(spec: &SchmidtSpectrum<T>) -> T {
    spec.purity().recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state() {
        let s = SchmidtSpectrum::from_eigenvalues(vec![1.0]).unwrap();
        assert_eq!(s.von_neumann_entropy(), 0.0);
        assert_eq!(s.effective_schmidt_number(), 1.0);
        assert_eq!(s.linear_entropy(), 0.0);
    }

    #[test]
    fn even_pair() {
        let s = SchmidtSpectrum::from_eigenvalues(vec![0.5, 0.5]).unwrap();
        assert!((s.von_neumann_entropy() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((s.effective_schmidt_number() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_levels_give_m_modes() {
        let m = 7;
        let s = SchmidtSpectrum::from_eigenvalues(vec![1.0 / m as f64; m]).unwrap();
        assert!((s.effective_schmidt_number() - m as f64).abs() < 1e-12);
        assert!((s.von_neumann_entropy() - (m as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn seventy_thirty() {
        let s = SchmidtSpectrum::from_eigenvalues(vec![0.3f64, 0.7]).unwrap();
        assert_eq!(s.lambdas(), &[0.7, 0.3]);
        // 1 / (0.49 + 0.09)
        assert!((s.effective_schmidt_number() - 1.0 / 0.58).abs() < 1e-12);
        assert!((s.effective_schmidt_number() - 1.7241).abs() < 1e-4);
    }

    #[test]
    fn clamps_roundoff_but_rejects_real_negativity() {
        let s = SchmidtSpectrum::from_eigenvalues(vec![1.0, -1e-12]).unwrap();
        assert_eq!(s.lambdas()[1], 0.0);
        assert!(SchmidtSpectrum::from_eigenvalues(vec![1.001, -1e-3]).is_err());
        assert!(SchmidtSpectrum::from_eigenvalues(vec![0.5, 0.4]).is_err());
    }
}
