//! Spectral kinetic operator `-½ d²/dx²` with Dirichlet walls.
//!
//! Interior values are expanded in the sine basis `sin(πk(x - x_min)/L)`,
//! which is diagonal for the kinetic energy with eigenvalues `½(πk/L)²`.
//! The sine transform runs through a complex FFT of the odd extension.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use rustfft::{Fft, FftPlanner};

use super::grid::Grid1D;
use crate::scalar::{czero, Real, C};

#[derive(Clone)]
pub struct SineKinetic<T: Real> {
    interior: usize,
    fft: Arc<dyn Fft<T>>,
    eigenvalues: Vec<T>,
}

/// Reusable buffers for one thread of sine transforms.
pub struct KineticWorkspace<T> {
    ext: Vec<C<T>>,
    coeffs: Vec<C<T>>,
    tmp: Vec<C<T>>,
    pack: Vec<C<T>>,
    scratch: Vec<C<T>>,
}

impl<T: Real> std::fmt::Debug for SineKinetic<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineKinetic")
            .field("interior", &self.interior)
            .finish()
    }
}

impl<T: Real> SineKinetic<T> {
    pub fn new(grid: &Grid1D<T>) -> Self {
        let interior = grid.n() - 2;
        let len = 2 * (interior + 1);
        let fft = FftPlanner::new().plan_fft_forward(len);
        let l = grid.length();
        let eigenvalues = (1..=interior)
            .map(|k| {
                let q = T::PI() * T::from_usize_lossy(k) / l;
                T::lit(0.5) * q * q
            })
            .collect();
        Self {
            interior,
            fft,
            eigenvalues,
        }
    }

    /// Kinetic eigenvalues `½(πk/L)²`, `k = 1..=n-2`.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn workspace(&self) -> KineticWorkspace<T> {
        KineticWorkspace {
            ext: vec![czero(); 2 * (self.interior + 1)],
            coeffs: vec![czero(); self.interior],
            tmp: vec![czero(); self.interior],
            pack: vec![czero(); self.interior + 2],
            scratch: vec![czero(); self.fft.get_inplace_scratch_len()],
        }
    }

    /// `exp(-dtau · ½k²)` per mode.
    pub fn propagator(&self, dtau: T) -> Vec<T> {
        self.eigenvalues.iter().map(|&e| (-dtau * e).exp()).collect()
    }

    /// Unnormalized DST-I of `input` (length `n-2`) into `ws.coeffs`.
    fn dst(&self, input: &[C<T>], ws: &mut KineticWorkspace<T>) {
        let n = self.interior;
        let ext = &mut ws.ext;
        ext[0] = czero();
        ext[n + 1] = czero();
        for j in 0..n {
            ext[j + 1] = input[j];
            ext[2 * n + 1 - j] = -input[j];
        }
        self.fft.process_with_scratch(ext, &mut ws.scratch);
        // S_k = (i/2) Y_k
        let half = T::lit(0.5);
        for k in 0..n {
            let y = ext[k + 1];
            ws.coeffs[k] = C::new(-y.im * half, y.re * half);
        }
    }

    /// Multiplies the sine coefficients of `wave` by `factors` in place.
    ///
    /// `wave` spans the full grid; both wall values are set to zero.
    pub fn apply_diagonal(&self, wave: &mut [C<T>], factors: &[T], ws: &mut KineticWorkspace<T>) {
        let n = self.interior;
        debug_assert_eq!(wave.len(), n + 2);
        self.dst(&wave[1..n + 1], ws);
        let mut scaled = std::mem::take(&mut ws.tmp);
        for ((t, c), f) in scaled.iter_mut().zip(&ws.coeffs).zip(factors) {
            *t = *c * *f;
        }
        self.dst(&scaled, ws);
        ws.tmp = scaled;
        let scale = T::lit(2.0) / T::from_usize_lossy(n + 1);
        wave[0] = czero();
        wave[n + 1] = czero();
        for j in 0..n {
            wave[j + 1] = ws.coeffs[j] * scale;
        }
    }

    /// `T f` on the full grid.
    pub fn apply(&self, wave: &[C<T>], ws: &mut KineticWorkspace<T>) -> Vec<C<T>> {
        let mut out = wave.to_vec();
        let eig = self.eigenvalues.clone();
        self.apply_diagonal(&mut out, &eig, ws);
        out
    }

    /// `⟨f|T|f⟩` via Parseval on the sine coefficients.
    pub fn expectation(&self, wave: &[C<T>], dx: T, ws: &mut KineticWorkspace<T>) -> T {
        let n = self.interior;
        self.dst(&wave[1..n + 1], ws);
        let s: T = ws
            .coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, e)| c.norm_sqr() * *e)
            .sum();
        s * dx * T::lit(2.0) / T::from_usize_lossy(n + 1)
    }

    /// Kinetic expectations of two real waves from one packed transform.
    pub fn expectation_real_pair(&self, a: &[C<T>], b: &[C<T>], dx: T, ws: &mut KineticWorkspace<T>) -> (T, T) {
        let n = self.interior;
        let mut pack = std::mem::take(&mut ws.pack);
        for ((p, x), y) in pack.iter_mut().zip(a.iter()).zip(b.iter()) {
            *p = C::new(x.re, y.re);
        }
        self.dst(&pack[1..n + 1], ws);
        ws.pack = pack;
        let (mut ta, mut tb) = (T::zero(), T::zero());
        for (c, e) in ws.coeffs.iter().zip(&self.eigenvalues) {
            ta += c.re * c.re * *e;
            tb += c.im * c.im * *e;
        }
        let scale = dx * T::lit(2.0) / T::from_usize_lossy(n + 1);
        (ta * scale, tb * scale)
    }

    /// Same as [`apply_diagonal`](Self::apply_diagonal) for two real waves
    /// at once, packed as `a + i b` into a single transform.
    ///
    /// Imaginary parts of the inputs are ignored.
    pub fn apply_diagonal_real_pair(
        &self,
        a: &mut [C<T>],
        b: &mut [C<T>],
        factors: &[T],
        ws: &mut KineticWorkspace<T>,
    ) {
        let mut pack = std::mem::take(&mut ws.pack);
        for ((p, x), y) in pack.iter_mut().zip(a.iter()).zip(b.iter()) {
            *p = C::new(x.re, y.re);
        }
        self.apply_diagonal(&mut pack, factors, ws);
        for ((p, x), y) in pack.iter().zip(a.iter_mut()).zip(b.iter_mut()) {
            *x = C::new(p.re, T::zero());
            *y = C::new(p.im, T::zero());
        }
        ws.pack = pack;
    }

    /// Applies `factors` to every lane of `psi` taken along `axis`.
    ///
    /// Lanes are `index_axis(axis, i)`: `Axis(0)` transforms each row (the
    /// `y` direction), `Axis(1)` each column (the `x` direction). Purely real
    /// fields are transformed two lanes at a time.
    pub fn apply_lanes(&self, psi: &mut Array2<C<T>>, axis: Axis, factors: &[T], ws: &mut KineticWorkspace<T>) {
        let n = self.interior + 2;
        let real = psi.iter().all(|v| v.im == T::zero());
        let mut buf = vec![czero::<T>(); n];
        let mut buf2 = vec![czero::<T>(); n];
        let lanes = psi.len_of(axis);
        let mut i = 0;
        while i < lanes {
            buf.iter_mut().zip(psi.index_axis(axis, i).iter()).for_each(|(b, v)| *b = *v);
            if real && i + 1 < lanes {
                buf2.iter_mut().zip(psi.index_axis(axis, i + 1).iter()).for_each(|(b, v)| *b = *v);
                self.apply_diagonal_real_pair(&mut buf, &mut buf2, factors, ws);
                psi.index_axis_mut(axis, i + 1).iter_mut().zip(&buf2).for_each(|(v, b)| *v = *b);
            } else {
                self.apply_diagonal(&mut buf, factors, ws);
            }
            psi.index_axis_mut(axis, i).iter_mut().zip(&buf).for_each(|(v, b)| *v = *b);
            i += if real { 2 } else { 1 };
        }
    }

    /// Applies per-mode `factors` along both axes of a square 2D field.
    pub fn apply_diagonal_2d(&self, psi: &mut Array2<C<T>>, factors: &[T], ws: &mut KineticWorkspace<T>) {
        self.apply_lanes(psi, Axis(0), factors, ws);
        self.apply_lanes(psi, Axis(1), factors, ws);
    }

    /// `(T_x + T_y) Ψ` for a square 2D field.
    pub fn apply_2d(&self, psi: &Array2<C<T>>, ws: &mut KineticWorkspace<T>) -> Array2<C<T>> {
        let eig = self.eigenvalues.clone();
        let mut tx = psi.clone();
        self.apply_lanes(&mut tx, Axis(1), &eig, ws);
        let mut ty = psi.clone();
        self.apply_lanes(&mut ty, Axis(0), &eig, ws);
        tx += &ty;
        tx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_mode_is_eigenfunction() {
        let g = Grid1D::new(-3.0f64, 5.0, 64).unwrap();
        let kin = SineKinetic::new(&g);
        let mut ws = kin.workspace();
        let k = 3.0;
        let q = std::f64::consts::PI * k / g.length();
        let wave: Vec<C<f64>> = g.points().map(|x| C::new((q * (x - g.x_min())).sin(), 0.0)).collect();
        let tf = kin.apply(&wave, &mut ws);
        for (a, b) in tf.iter().zip(&wave) {
            assert!((a - b * (0.5 * q * q)).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_matches_apply() {
        let g = Grid1D::new(-10.0f64, 10.0, 128).unwrap();
        let kin = SineKinetic::new(&g);
        let mut ws = kin.workspace();
        let wave: Vec<C<f64>> = g
            .points()
            .map(|x| C::new((-x * x / 2.0).exp(), 0.2 * x * (-x * x / 2.0).exp()))
            .collect();
        let tf = kin.apply(&wave, &mut ws);
        let direct = crate::numerics::field::inner_slice(&tf, &wave, g.dx()).re;
        let parseval = kin.expectation(&wave, g.dx(), &mut ws);
        assert!((direct - parseval).abs() < 1e-12);
        // Gaussian e^{-x²/2}: ⟨T⟩/⟨1⟩ = 1/4
        let norm = crate::numerics::field::norm_sq_slice(&wave, g.dx());
        let re_only: Vec<C<f64>> = wave.iter().map(|v| C::new(v.re, 0.0)).collect();
        let t_re = kin.expectation(&re_only, g.dx(), &mut ws);
        let n_re = crate::numerics::field::norm_sq_slice(&re_only, g.dx());
        assert!((t_re / n_re - 0.25).abs() < 1e-10);
        assert!(norm > 0.0);
    }

    #[test]
    fn packed_pair_matches_single() {
        let g = Grid1D::new(-6.0f64, 6.0, 40).unwrap();
        let kin = SineKinetic::new(&g);
        let mut ws = kin.workspace();
        let f = kin.propagator(0.05);
        let a0: Vec<C<f64>> = g.points().map(|x| C::new((-x * x).exp() * (1.0 + x), 0.0)).collect();
        let b0: Vec<C<f64>> = g.points().map(|x| C::new(x * (-x * x / 3.0).exp(), 0.0)).collect();
        let (mut a, mut b) = (a0.clone(), b0.clone());
        kin.apply_diagonal_real_pair(&mut a, &mut b, &f, &mut ws);
        let (mut a1, mut b1) = (a0, b0);
        kin.apply_diagonal(&mut a1, &f, &mut ws);
        kin.apply_diagonal(&mut b1, &f, &mut ws);
        for i in 0..g.n() {
            assert!((a[i] - a1[i]).norm() < 1e-14);
            assert!((b[i] - b1[i]).norm() < 1e-14);
        }
    }
}
