//! Monte Carlo convolution potential and the exchange coupling of parallel spins.

use ndarray::{Array2, Zip};

use super::{GuideWaveEnsemble, WalkerEnsemble};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::scalar::{czero, Real, C};

fn check_width<T: Real>(width: T) -> Result<()> {
    if !(width > T::zero()) || !width.is_finite() {
        return Err(Error::param("kernel_width", format!("must be positive and finite, got {width}")));
    }
    Ok(())
}

fn check_electron(i: usize) -> Result<()> {
    if i > 1 {
        return Err(Error::param("electron", format!("must be 0 or 1, got {i}")));
    }
    Ok(())
}

/// Gaussian kernel weights `K(y_l - y_k)` of every partner walker as seen from walker `k`.
fn kernel_row<T: Real>(partner: &[T], k: usize, width: T) -> Result<(Vec<T>, T)> {
    let inv = (T::lit(2.0) * width * width).recip();
    let yk = partner[k];
    let w: Vec<T> = partner.iter().map(|&y| (-(y - yk) * (y - yk) * inv).exp()).collect();
    let total: T = w.iter().copied().sum();
    if !(total > T::min_positive_value()) || !total.is_finite() {
        return Err(Error::DegenerateWeights {
            walker: k,
            width: width.as_f64(),
        });
    }
    Ok((w, total))
}

/// `V_effᵏ(x)` for electron `i` of walker `k` on every grid point.
///
/// Kernel-weighted average of `V_ee(x - y_l)` over the partner electron's
/// walkers `y_l`, with weights `exp(-(y_l - y_k)² / 2w²)`.
pub fn effective_potential<T: Real>(
    walkers: &WalkerEnsemble<T>,
    k: usize,
    i: usize,
    model: &SystemModel<T>,
    kernel_width: T,
) -> Result<Vec<T>> {
    check_width(kernel_width)?;
    check_electron(i)?;
    if k >= walkers.len() {
        return Err(Error::param("walker", format!("index {k} out of range")));
    }
    let partner = walkers.coordinate(1 - i);
    let (w, total) = kernel_row(&partner, k, kernel_width)?;
    Ok(model
        .grid
        .points()
        .map(|x| {
            let s: T = w.iter().zip(&partner).map(|(wl, y)| *wl * model.vee(x - *y)).sum();
            s / total
        })
        .collect())
}

/// `V_effᵏ` for every walker at once: row-normalized kernel times the
/// `M × n` table of `V_ee(x - y_l)`.
pub fn effective_potentials<T: Real>(
    walkers: &WalkerEnsemble<T>,
    i: usize,
    model: &SystemModel<T>,
    kernel_width: T,
) -> Result<Array2<T>> {
    check_width(kernel_width)?;
    check_electron(i)?;
    let partner = walkers.coordinate(1 - i);
    let m = partner.len();
    let mut kernel = Array2::<T>::zeros((m, m));
    for k in 0..m {
        let (w, total) = kernel_row(&partner, k, kernel_width)?;
        let inv = total.recip();
        kernel.row_mut(k).iter_mut().zip(w).for_each(|(d, v)| *d = v * inv);
    }
    let pts: Vec<T> = model.grid.points().collect();
    let table = Array2::from_shape_fn((m, pts.len()), |(l, g)| model.vee(pts[g] - partner[l]));
    Ok(kernel.dot(&table))
}

/// `V_ee(x_g - x_h)` on the grid, with the trapezoid weight of `h` folded in.
pub(crate) fn weighted_vee_table<T: Real>(model: &SystemModel<T>) -> Array2<T> {
    let g = model.grid;
    let pts: Vec<T> = g.points().collect();
    Array2::from_shape_fn((g.n(), g.n()), |(a, b)| model.vee(pts[a] - pts[b]) * g.weight(b))
}

/// `A(r) = ∫ V_ee(r - r') φ₁ᵏ(r') φ₂ᵏ*(r') dr'` for every walker.
fn exchange_overlaps<T: Real>(waves: &GuideWaveEnsemble<T>, table: &Array2<T>) -> Array2<C<T>> {
    let a = &waves.electrons[0].waves;
    let b = &waves.electrons[1].waves;
    let mut pre = Array2::<T>::zeros(a.dim());
    let mut pim = Array2::<T>::zeros(a.dim());
    Zip::from(&mut pre)
        .and(&mut pim)
        .and(a)
        .and(b)
        .for_each(|r, i, x, y| {
            let p = *x * y.conj();
            *r = p.re;
            *i = p.im;
        });
    let tt = table.t();
    let re = pre.dot(&tt);
    let has_im = pim.iter().any(|v| *v != T::zero());
    if has_im {
        let im = pim.dot(&tt);
        Zip::from(&re).and(&im).map_collect(|r, i| C::new(*r, *i))
    } else {
        re.mapv(|r| C::new(r, T::zero()))
    }
}

/// `A_ij(r) φⱼᵏ(r)` for both electrons, the exchange term of `H_eff` already
/// applied to `φᵢᵏ`. Zero for opposite spins.
pub(crate) fn exchange_actions<T: Real>(
    waves: &GuideWaveEnsemble<T>,
    table: &Array2<T>,
) -> [Array2<C<T>>; 2] {
    let a01 = exchange_overlaps(waves, table);
    let a = &waves.electrons[0].waves;
    let b = &waves.electrons[1].waves;
    let first = Zip::from(&a01).and(b).map_collect(|x, y| *x * *y);
    let second = Zip::from(&a01).and(a).map_collect(|x, y| x.conj() * *y);
    [first, second]
}

/// Exchange field `A(r) φⱼᵏ(r) / φᵢᵏ(r)` of electron `i` in walker `k`.
///
/// The division uses `1/φ ≈ φ* / (|φ|² + ε²)` with `ε = 1e-6 · max|φᵢᵏ|`,
/// which keeps the field bounded at nodes. Opposite spins give zero.
pub fn exchange_term<T: Real>(
    waves: &GuideWaveEnsemble<T>,
    k: usize,
    i: usize,
    model: &SystemModel<T>,
) -> Result<Vec<C<T>>> {
    check_electron(i)?;
    if k >= waves.len() {
        return Err(Error::param("walker", format!("index {k} out of range")));
    }
    let n = model.grid.n();
    if !waves.spin.is_parallel() {
        return Ok(vec![czero(); n]);
    }
    let phi_i = waves.electrons[i].waves.row(k);
    let phi_j = waves.electrons[1 - i].waves.row(k);
    let pts: Vec<T> = model.grid.points().collect();
    let prod: Vec<C<T>> = (0..n)
        .map(|h| phi_i[h] * phi_j[h].conj() * model.grid.weight(h))
        .collect();
    let peak = phi_i.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let eps2 = (T::lit(1e-6) * peak).powi(2);
    Ok((0..n)
        .map(|g| {
            let a: C<T> = (0..n).fold(czero(), |s, h| s + prod[h] * model.vee(pts[g] - pts[h]));
            let inv = phi_i[g].conj() / (phi_i[g].norm_sqr() + eps2);
            a * phi_j[g] * inv
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, Overrides, Preset, SpinConfig};
    use crate::tdqmc::init_ensemble;

    fn helium() -> SystemModel<f64> {
        build_system(Preset::Helium, &Overrides { n: Some(64), ..Default::default() }).unwrap()
    }

    fn soft(r: f64) -> f64 {
        1.0 / (r * r + 1.0).sqrt()
    }

    #[test]
    fn single_walker_is_bare_interaction() {
        let m = helium();
        let w = WalkerEnsemble::new(vec![[0.3, -1.2]]).unwrap();
        let v = effective_potential(&w, 0, 0, &m, 0.7).unwrap();
        for (x, v) in m.grid.points().zip(&v) {
            assert!((v - soft(x + 1.2)).abs() < 1e-14);
        }
    }

    #[test]
    fn three_walker_direct_sum() {
        let m = helium();
        let w = WalkerEnsemble::new(vec![[0.0, -1.0], [0.5, 0.0], [1.0, 2.0]]).unwrap();
        let v = effective_potential(&w, 1, 0, &m, 1.0).unwrap();
        let ys = [-1.0f64, 0.0, 2.0];
        let ks: Vec<f64> = ys.iter().map(|y| (-y * y / 2.0).exp()).collect();
        let norm: f64 = ks.iter().sum();
        for g in [0usize, 13, 31, 40, 63] {
            let x = m.grid.point(g);
            let expect: f64 = ys.iter().zip(&ks).map(|(y, k)| k * soft(x - y)).sum::<f64>() / norm;
            assert!((v[g] - expect).abs() < 1e-12);
        }
        let all = effective_potentials(&w, 0, &m, 1.0).unwrap();
        for g in 0..64 {
            assert!((all[[1, g]] - v[g]).abs() < 1e-12);
        }
    }

    #[test]
    fn wide_kernel_gives_mean_field() {
        let m = helium();
        let w = WalkerEnsemble::new(vec![[0.0, -1.0], [0.5, 0.4], [1.0, 2.0], [0.2, -0.3]]).unwrap();
        let all = effective_potentials(&w, 0, &m, 1e6).unwrap();
        for (g, x) in m.grid.points().enumerate() {
            let mean = [-1.0, 0.4, 2.0, -0.3].iter().map(|y| soft(x - y)).sum::<f64>() / 4.0;
            for k in 0..4 {
                assert!((all[[k, g]] - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn narrow_kernel_underflows() {
        let m = helium();
        let w = WalkerEnsemble::new(vec![[0.0, -1.0], [0.5, 0.4]]).unwrap();
        assert!(effective_potential(&w, 0, 0, &m, 1e-300).is_err());
        assert!(effective_potential(&w, 0, 0, &m, 0.0).is_err());
        assert!(effective_potential(&w, 0, 2, &m, 1.0).is_err());
    }

    #[test]
    fn exchange_opposite_spin_is_zero() {
        let m = helium();
        let st = init_ensemble(&m, 4, 1).unwrap();
        let x = exchange_term(&st.waves, 2, 0, &m).unwrap();
        assert!(x.iter().all(|v| *v == czero()));
    }

    #[test]
    fn exchange_of_equal_waves_is_hartree() {
        let m = helium();
        let mut st = init_ensemble(&m, 2, 1).unwrap();
        st.waves.spin = SpinConfig::ParallelSpin;
        let x = exchange_term(&st.waves, 0, 1, &m).unwrap();
        let phi = st.waves.electrons[0].waves.row(0);
        let g = m.grid;
        let peak = phi.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for (i, xi) in g.points().enumerate() {
            // away from the regularized tails
            if phi[i].norm() < 0.2 * peak {
                continue;
            }
            let hartree: f64 = (0..g.n()).map(|h| g.weight(h) * phi[h].norm_sqr() * soft(xi - g.point(h))).sum();
            assert!((x[i].re - hartree).abs() < 1e-9 * hartree.max(1.0));
            assert!(x[i].im.abs() < 1e-14);
        }
    }

    #[test]
    fn exchange_matches_double_integral() {
        let m = build_system::<f64>(
            Preset::Helium,
            &Overrides {
                n: Some(64),
                spin: Some(SpinConfig::ParallelSpin),
                ..Default::default()
            },
        )
        .unwrap();
        let st = init_ensemble(&m, 2, 3).unwrap();
        let g = m.grid;
        let a = st.waves.electrons[0].waves.row(0).to_owned();
        let b = st.waves.electrons[1].waves.row(0).to_owned();
        let x = exchange_term(&st.waves, 0, 0, &m).unwrap();
        let table = weighted_vee_table(&m);
        let act = exchange_actions(&st.waves, &table);
        let peak = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for i in 0..g.n() {
            if a[i].norm() < 0.2 * peak {
                continue;
            }
            let xi = g.point(i);
            let mut integral = 0.0;
            for h in 0..g.n() {
                integral += g.weight(h) * soft(xi - g.point(h)) * (a[h] * b[h].conj()).re;
            }
            let expect = integral * b[i].re / a[i].re;
            assert!((x[i].re - expect).abs() < 1e-10 * expect.abs().max(1.0), "point {i}");
            assert!((act[0][[0, i]].re / a[i].re - expect).abs() < 1e-10 * expect.abs().max(1.0));
        }
    }
}
