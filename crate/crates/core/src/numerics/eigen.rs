//! Dense Hermitian eigensolver.
//!
//! Householder reduction to a complex tridiagonal matrix, a diagonal phase
//! similarity that makes the off-diagonal real, then implicit-shift QL on the
//! resulting real symmetric tridiagonal problem.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::linalg::hermitize;

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Array2<C<T>>,
}

struct Reflector<T> {
    offset: usize,
    v: Vec<C<T>>,
    scale: T,
}

struct Tridiagonal<T> {
    diag: Vec<T>,
    off: Vec<T>,
    phases: Vec<C<T>>,
    reflectors: Vec<Reflector<T>>,
}

fn check_square<T>(a: &Array2<C<T>>) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::Dimension {
            op: "hermitian_eigendecompose",
            detail: format!("matrix is {r}x{c}"),
        });
    }
    if r == 0 {
        return Err(Error::Dimension {
            op: "hermitian_eigendecompose",
            detail: "empty matrix".into(),
        });
    }
    Ok(r)
}

fn tridiagonalize<T: Real>(mut a: Array2<C<T>>, keep_reflectors: bool) -> Tridiagonal<T> {
    let n = a.nrows();
    let zero = C::new(T::zero(), T::zero());
    let mut sub = vec![zero; n.saturating_sub(1)];
    let mut reflectors = Vec::new();

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x0 = a[[k + 1, k]];
        let tail: T = (1..m).map(|r| a[[k + 1 + r, k]].norm_sqr()).sum();
        if m == 1 || tail == T::zero() {
            sub[k] = x0;
            continue;
        }
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            C::new(T::one(), T::zero())
        };
        let beta = -phase * xnorm;
        let mut v: Vec<C<T>> = (0..m).map(|r| a[[k + 1 + r, k]]).collect();
        v[0] = x0 - beta;
        let vnorm_sq: T = v.iter().map(|z| z.norm_sqr()).sum();
        let s = T::lit(2.0) / vnorm_sq;
        sub[k] = beta;

        // p = s B v on the trailing block
        let mut p = vec![zero; m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = k + 1 + r;
            let mut acc = zero;
            for (c, vc) in v.iter().enumerate() {
                acc += a[[row, k + 1 + c]] * vc;
            }
            *pr = acc * s;
        }
        let vp: C<T> = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kk = vp.re * s * T::lit(0.5);
        let w: Vec<C<T>> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for r in 0..m {
            let (vr, wr) = (v[r], w[r]);
            for c in 0..m {
                a[[k + 1 + r, k + 1 + c]] -= vr * w[c].conj() + wr * v[c].conj();
            }
        }
        if keep_reflectors {
            reflectors.push(Reflector {
                offset: k + 1,
                v,
                scale: s,
            });
        }
    }

    let diag: Vec<T> = (0..n).map(|i| a[[i, i]].re).collect();
    let mut phases = vec![C::new(T::one(), T::zero()); n];
    let mut off = vec![T::zero(); n];
    for k in 0..n.saturating_sub(1) {
        let mag = sub[k].norm();
        off[k] = mag;
        phases[k + 1] = if mag > T::zero() {
            phases[k] * (sub[k] / mag)
        } else {
            phases[k]
        };
    }
    Tridiagonal {
        diag,
        off,
        phases,
        reflectors,
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix. `off[i]` couples
/// `i` and `i + 1`; `off[n - 1]` must be zero. Rotations are accumulated
/// into the row-major `z` when given.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut Array2<T>>) -> Result<()> {
    let n = d.len();
    let two = T::lit(2.0);
    // absolute floor so clusters of near-zero eigenvalues still deflate
    let anorm = (0..n).fold(T::zero(), |m, i| m.max(d[i].abs() + e[i].abs()));
    let floor = anorm * T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigenConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zf = z[[k, i + 1]];
                        let zi = z[[k, i]];
                        z[[k, i + 1]] = s * zi + c * zf;
                        z[[k, i]] = c * zi - s * zf;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Descending order; ties keep their original index order.
fn descending_order<T: Real>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
///
/// The input is symmetrized as `(A + A†)/2` first.
pub fn hermitian_eigendecompose<T: Real>(a: &Array2<C<T>>) -> Result<HermitianSpectrum<T>> {
    let n = check_square(a)?;
    let tri = tridiagonalize(hermitize(a), true);
    let mut d = tri.diag;
    let mut e = tri.off;
    let mut z = Array2::<T>::eye(n);
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;

    // V = Q · D · Z
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| tri.phases[i] * z[[i, j]]);
    for refl in tri.reflectors.iter().rev() {
        let off = refl.offset;
        let m = refl.v.len();
        for col in 0..n {
            let mut dot = C::new(T::zero(), T::zero());
            for r in 0..m {
                dot += refl.v[r].conj() * v[[off + r, col]];
            }
            let f = dot * refl.scale;
            if f.norm_sqr() == T::zero() {
                continue;
            }
            for r in 0..m {
                let upd = refl.v[r] * f;
                v[[off + r, col]] -= upd;
            }
        }
    }

    let order = descending_order(&d);
    let eigenvalues = order.iter().map(|&i| d[i]).collect();
    let eigenvectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending. Skips the O(n³) vector accumulation.
pub fn hermitian_eigenvalues<T: Real>(a: &Array2<C<T>>) -> Result<Vec<T>> {
    check_square(a)?;
    let tri = tridiagonalize(hermitize(a), false);
    let mut d = tri.diag;
    let mut e = tri.off;
    tridiagonal_ql(&mut d, &mut e, None)?;
    let order = descending_order(&d);
    Ok(order.iter().map(|&i| d[i]).collect())
}
