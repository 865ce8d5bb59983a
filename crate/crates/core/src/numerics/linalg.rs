//! Small dense complex-matrix helpers.

use ndarray::{Array2, Zip};

use crate::scalar::{Real, C};

/// `(A + A†) / 2`.
pub fn hermitize<T: Real>(a: &Array2<C<T>>) -> Array2<C<T>> {
    let half = T::lit(0.5);
    let mut out = a.clone();
    let n = a.nrows();
    for i in 0..n {
        out[[i, i]] = C::new(a[[i, i]].re, T::zero());
        for j in 0..i {
            let v = (a[[i, j]] + a[[j, i]].conj()) * half;
            out[[i, j]] = v;
            out[[j, i]] = v.conj();
        }
    }
    out
}

/// `A† A` for a general (rows × cols) complex matrix.
///
/// Splits into real and imaginary parts so the heavy lifting runs through
/// ndarray's real GEMM; purely real inputs skip the imaginary products.
pub fn adjoint_product<T: Real>(a: &Array2<C<T>>) -> Array2<C<T>> {
    let re = a.mapv(|v| v.re);
    let im = a.mapv(|v| v.im);
    let has_im = im.iter().any(|v| *v != T::zero());
    let re_t = re.t();
    let mut real = re_t.dot(&re);
    let n = a.ncols();
    if !has_im {
        return real.mapv(|v| C::new(v, T::zero()));
    }
    let im_t = im.t();
    real += &im_t.dot(&im);
    let imag = &re_t.dot(&im) - &im_t.dot(&re);
    let mut out = Array2::from_elem((n, n), C::new(T::zero(), T::zero()));
    Zip::from(&mut out)
        .and(&real)
        .and(&imag)
        .for_each(|o, &r, &i| *o = C::new(r, i));
    out
}

/// `A A†`.
pub fn product_adjoint<T: Real>(a: &Array2<C<T>>) -> Array2<C<T>> {
    adjoint_product(&a.t().mapv(|v| v.conj()))
}

pub fn frobenius_norm<T: Real>(a: &Array2<C<T>>) -> T {
    a.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
}

pub fn trace<T: Real>(a: &Array2<C<T>>) -> C<T> {
    a.diag().iter().copied().fold(C::new(T::zero(), T::zero()), |s, v| s + v)
}
