use ndarray::{Array2, ArrayView1, ArrayViewMut1, Axis};

use super::grid::{Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// Complex one-body amplitude sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D<T> {
    pub grid: Grid1D<T>,
    pub values: Vec<C<T>>,
}

impl<T: Real> ComplexField1D<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<C<T>>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Dimension {
                op: "ComplexField1D::new",
                detail: format!("{} values for {} grid points", values.len(), grid.n()),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D<T>) -> Self {
        Self {
            grid,
            values: vec![czero(); grid.n()],
        }
    }

    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> C<T>) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid1D<T>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| C::new(f(x), T::zero()))
    }

    /// Trapezoid `∫ |f|² dx`.
    pub fn norm_sq(&self) -> T {
        norm_sq_slice(&self.values, self.grid.dx())
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// `⟨f, g⟩ = ∫ f·conj(g) dx` with trapezoid end weights.
pub fn inner_product<T: Real>(f: &ComplexField1D<T>, g: &ComplexField1D<T>) -> Result<C<T>> {
    if f.grid != g.grid {
        return Err(Error::Dimension {
            op: "inner_product",
            detail: "fields live on different grids".into(),
        });
    }
    Ok(inner_slice(&f.values, &g.values, f.grid.dx()))
}

pub fn normalize<T: Real>(f: &ComplexField1D<T>) -> Result<ComplexField1D<T>> {
    let nrm = f.norm_sq().sqrt();
    if !(nrm > T::zero()) || !nrm.is_finite() {
        return Err(Error::DegenerateInput {
            op: "normalize",
            detail: format!("field norm is {nrm}"),
        });
    }
    Ok(f.scaled(C::new(nrm.recip(), T::zero())))
}

/// Trapezoid `Σ w_i f_i conj(g_i)` on a uniform grid of spacing `dx`.
#[inline]
pub(crate) fn inner_slice<T: Real>(f: &[C<T>], g: &[C<T>], dx: T) -> C<T> {
    let n = f.len();
    let mut acc = czero::<T>();
    for (a, b) in f.iter().zip(g) {
        acc += a * b.conj();
    }
    if n > 1 {
        let ends = f[0] * g[0].conj() + f[n - 1] * g[n - 1].conj();
        acc -= ends * T::lit(0.5);
    }
    acc * dx
}

#[inline]
pub(crate) fn norm_sq_slice<T: Real>(f: &[C<T>], dx: T) -> T {
    let n = f.len();
    let mut acc = f.iter().map(|v| v.norm_sqr()).sum::<T>();
    if n > 1 {
        acc -= (f[0].norm_sqr() + f[n - 1].norm_sqr()) * T::lit(0.5);
    }
    acc * dx
}

pub(crate) fn inner_view<T: Real>(f: ArrayView1<C<T>>, g: ArrayView1<C<T>>, dx: T) -> C<T> {
    match (f.as_slice(), g.as_slice()) {
        (Some(a), Some(b)) => inner_slice(a, b, dx),
        _ => inner_slice(&f.to_vec(), &g.to_vec(), dx),
    }
}

pub(crate) fn norm_sq_view<T: Real>(f: ArrayView1<C<T>>, dx: T) -> T {
    match f.as_slice() {
        Some(a) => norm_sq_slice(a, dx),
        None => norm_sq_slice(&f.to_vec(), dx),
    }
}

/// Scales a wave in place to unit norm; returns the norm it had.
pub(crate) fn normalize_view<T: Real>(mut f: ArrayViewMut1<C<T>>, dx: T) -> T {
    let nrm = norm_sq_view(f.view(), dx).sqrt();
    if nrm > T::zero() && nrm.is_finite() {
        let s = nrm.recip();
        f.mapv_inplace(|v| v * s);
    }
    nrm
}

/// Two-body amplitude `Ψ(x_i, y_j)` stored row-major: row `i` is fixed `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D<T> {
    pub grid: Grid2D<T>,
    pub values: Array2<C<T>>,
}

impl<T: Real> ComplexField2D<T> {
    pub fn new(grid: Grid2D<T>, values: Array2<C<T>>) -> Result<Self> {
        if values.dim() != (grid.gx.n(), grid.gy.n()) {
            return Err(Error::Dimension {
                op: "ComplexField2D::new",
                detail: format!(
                    "array {:?} for grid {}x{}",
                    values.dim(),
                    grid.gx.n(),
                    grid.gy.n()
                ),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid2D<T>, f: impl Fn(T, T) -> C<T>) -> Self {
        let values = Array2::from_shape_fn((grid.gx.n(), grid.gy.n()), |(i, j)| {
            f(grid.gx.point(i), grid.gy.point(j))
        });
        Self { grid, values }
    }

    /// Product state `u(x) v(y)`.
    pub fn product(u: &ComplexField1D<T>, v: &ComplexField1D<T>) -> Self {
        let grid = Grid2D { gx: u.grid, gy: v.grid };
        let values = Array2::from_shape_fn((u.grid.n(), v.grid.n()), |(i, j)| {
            u.values[i] * v.values[j]
        });
        Self { grid, values }
    }

    /// `∫∫ |Ψ|² dx dy`.
    pub fn norm_sq(&self) -> T {
        let (wx, wy) = (self.grid.gx.weights(), self.grid.gy.weights());
        let mut acc = T::zero();
        for ((i, j), v) in self.values.indexed_iter() {
            acc += v.norm_sqr() * wx[i] * wy[j];
        }
        acc
    }

    pub fn normalize_in_place(&mut self) -> T {
        let nrm = self.norm_sq().sqrt();
        if nrm > T::zero() && nrm.is_finite() {
            let s = nrm.recip();
            self.values.mapv_inplace(|v| v * s);
        }
        nrm
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// `∫∫ Ψ·conj(Φ) dx dy`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.grid != other.grid {
            return Err(Error::Dimension {
                op: "ComplexField2D::inner",
                detail: "fields live on different grids".into(),
            });
        }
        let (wx, wy) = (self.grid.gx.weights(), self.grid.gy.weights());
        let mut acc = czero::<T>();
        for (((i, j), a), b) in self.values.indexed_iter().zip(other.values.iter()) {
            acc += a * b.conj() * (wx[i] * wy[j]);
        }
        Ok(acc)
    }

    /// Slice `Ψ(·, y_j)` at column `j` as a 1D field over `x`.
    pub fn column(&self, j: usize) -> ComplexField1D<T> {
        ComplexField1D {
            grid: self.grid.gx,
            values: self.values.index_axis(Axis(1), j).to_vec(),
        }
    }
}

/// A stack of `M` one-body waves on a shared grid; row `k` is wave `k`.
///
/// Used for guide-wave ensembles (one stack per electron) and for
/// conditional-wave sets.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSet<T> {
    pub grid: Grid1D<T>,
    pub waves: Array2<C<T>>,
}

impl<T: Real> WaveSet<T> {
    pub fn new(grid: Grid1D<T>, waves: Array2<C<T>>) -> Result<Self> {
        if waves.ncols() != grid.n() {
            return Err(Error::Dimension {
                op: "WaveSet::new",
                detail: format!("{} columns for {} grid points", waves.ncols(), grid.n()),
            });
        }
        Ok(Self { grid, waves })
    }

    pub fn from_fields(fields: &[ComplexField1D<T>]) -> Result<Self> {
        let first = fields.first().ok_or(Error::EmptyDomain { op: "WaveSet::from_fields" })?;
        let grid = first.grid;
        let mut waves = Array2::from_elem((fields.len(), grid.n()), czero());
        for (k, f) in fields.iter().enumerate() {
            if f.grid != grid {
                return Err(Error::Dimension {
                    op: "WaveSet::from_fields",
                    detail: format!("field {k} lives on a different grid"),
                });
            }
            waves.row_mut(k).iter_mut().zip(&f.values).for_each(|(d, s)| *d = *s);
        }
        Ok(Self { grid, waves })
    }

    /// Number of waves `M`.
    #[inline]
    pub fn len(&self) -> usize {
        self.waves.nrows()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.waves.nrows() == 0
    }

    pub fn field(&self, k: usize) -> ComplexField1D<T> {
        ComplexField1D {
            grid: self.grid,
            values: self.waves.row(k).to_vec(),
        }
    }

    /// Copies the waves at `subset` into a new stack, preserving order.
    pub fn select(&self, subset: &[usize]) -> Self {
        Self {
            grid: self.grid,
            waves: self.waves.select(Axis(0), subset),
        }
    }

    /// Stacks two wave sets on the same grid.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Dimension {
                op: "WaveSet::concat",
                detail: "wave sets live on different grids".into(),
            });
        }
        let waves = ndarray::concatenate(Axis(0), &[self.waves.view(), other.waves.view()])
            .expect("column counts agree on a shared grid");
        Ok(Self { grid: self.grid, waves })
    }

    pub fn norms_sq(&self) -> Vec<T> {
        let dx = self.grid.dx();
        self.waves.rows().into_iter().map(|r| norm_sq_view(r, dx)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(-10.0, 10.0, 256).unwrap()
    }

    #[test]
    fn constant_on_unit_interval() {
        let g = Grid1D::new(0.0f64, 1.0, 101).unwrap();
        let f = ComplexField1D::from_real_fn(g, |_| 1.0);
        let ip = inner_product(&f, &f).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-12);
        assert!(ip.im.abs() < 1e-15);
    }

    #[test]
    fn gaussian_normalizes() {
        let f = ComplexField1D::from_real_fn(grid(), |x| (-x * x / 2.0).exp());
        let n = normalize(&f).unwrap();
        assert!((n.norm_sq() - 1.0).abs() < 1e-12);
        // quadrature oracle: ∫ e^{-x²} dx = √π
        let raw = f.norm_sq();
        assert!((raw - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent_and_scale_invariant() {
        let f = ComplexField1D::from_fn(grid(), |x| C::new((-x * x).exp(), 0.3 * x * (-x * x).exp()));
        let n1 = normalize(&f).unwrap();
        let n2 = normalize(&n1).unwrap();
        let n3 = normalize(&f.scaled(C::new(2.0, 0.0))).unwrap();
        for ((a, b), c) in n1.values.iter().zip(&n2.values).zip(&n3.values) {
            assert!((a - b).norm() < 1e-12);
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_field_is_degenerate() {
        let f = ComplexField1D::<f64>::zeros(grid());
        assert!(matches!(normalize(&f), Err(Error::DegenerateInput { .. })));
    }

    #[test]
    fn grid_mismatch_is_dimension_error() {
        let f = ComplexField1D::<f64>::zeros(grid());
        let g = ComplexField1D::<f64>::zeros(Grid1D::new(-10.0, 10.0, 128).unwrap());
        assert!(matches!(inner_product(&f, &g), Err(Error::Dimension { .. })));
    }

    #[test]
    fn hermitian_symmetry() {
        let g = grid();
        let f = ComplexField1D::from_fn(g, |x| C::new((-x * x).exp(), (x / 3.0).sin()));
        let h = ComplexField1D::from_fn(g, |x| C::new((x / 2.0).cos() * (-x * x / 4.0).exp(), x * 0.01));
        let a = inner_product(&f, &h).unwrap();
        let b = inner_product(&h, &f).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
