use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::grid::Grid1D;
use crate::scalar::Real;

/// `M` configuration-space points `(x₁ᵏ, x₂ᵏ)`, one coordinate per electron.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkerEnsemble<T> {
    pub positions: Vec<[T; 2]>,
}

impl<T: Real> WalkerEnsemble<T> {
    pub fn new(positions: Vec<[T; 2]>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::param("M", "walker ensemble needs at least one walker"));
        }
        Ok(Self { positions })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Coordinates of `electron` (0 or 1) for every walker.
    pub fn coordinate(&self, electron: usize) -> Vec<T> {
        self.positions.iter().map(|p| p[electron]).collect()
    }

    pub fn within(&self, grid: &Grid1D<T>) -> bool {
        self.positions.iter().all(|p| grid.contains(p[0]) && grid.contains(p[1]))
    }

    /// Walkers reordered as `order[new] = old`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            positions: order.iter().map(|&k| self.positions[k]).collect(),
        }
    }
}
