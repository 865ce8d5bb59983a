use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest admissible point count per axis.
pub const MIN_POINTS: usize = 8;

/// Uniform 1D grid including both end points.
///
/// The end points carry the Dirichlet boundary: fields are pinned to zero
/// there by the propagators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::param("n", format!("need at least {MIN_POINTS} points, got {n}")));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::param(
                "x_min/x_max",
                format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        let dx = (x_max - x_min) / T::from_usize_lossy(n - 1);
        Ok(Self { x_min, x_max, n, dx })
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    /// Trapezoid quadrature weight of point `i`: `dx`, halved at both ends.
    #[inline]
    pub fn weight(&self, i: usize) -> T {
        if i == 0 || i + 1 == self.n {
            self.dx * T::lit(0.5)
        } else {
            self.dx
        }
    }

    pub fn weights(&self) -> Vec<T> {
        (0..self.n).map(|i| self.weight(i)).collect()
    }

    /// Box length `x_max - x_min`.
    #[inline]
    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn point(&self, i: usize) -> T {
        self.x_min + T::from_usize_lossy(i) * self.dx
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    #[inline]
    pub fn contains(&self, x: T) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Cell index and fractional offset for linear interpolation at `x`.
    ///
    /// Returns `None` outside the closed box.
    pub fn locate(&self, x: T) -> Option<(usize, T)> {
        if !self.contains(x) {
            return None;
        }
        let t = (x - self.x_min) / self.dx;
        let i = t.floor().to_usize().unwrap_or(0).min(self.n - 2);
        Some((i, t - T::from_usize_lossy(i)))
    }
}

/// Square two-electron configuration grid: `gx` for electron 1, `gy` for electron 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D<T> {
    pub gx: Grid1D<T>,
    pub gy: Grid1D<T>,
}

impl<T: Real> Grid2D<T> {
    pub fn square(g: Grid1D<T>) -> Self {
        Self { gx: g, gy: g }
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.gx == self.gy
    }

    /// Area element `dx * dy`.
    #[inline]
    pub fn cell(&self) -> T {
        self.gx.dx() * self.gy.dx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_inverted_grids() {
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        assert!(Grid1D::new(1.0, 0.0, 16).is_err());
        assert!(Grid1D::new(0.0, f64::NAN, 16).is_err());
    }

    #[test]
    fn uniform_points() {
        let g = Grid1D::new(-1.0f64, 1.0, 9).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert_eq!(g.point(0), -1.0);
        assert_eq!(g.point(8), 1.0);
        assert_eq!(g.point(4), 0.0);
    }

    #[test]
    fn locate_clamps_last_cell() {
        let g = Grid1D::new(0.0f64, 1.0, 11).unwrap();
        let (i, f) = g.locate(1.0).unwrap();
        assert_eq!(i, 9);
        assert!((f - 1.0).abs() < 1e-12);
        assert!(g.locate(1.0000001).is_none());
        let (i, f) = g.locate(0.25).unwrap();
        assert_eq!(i, 2);
        assert!((f - 0.5).abs() < 1e-12);
    }
}
