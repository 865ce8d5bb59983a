mod common;

use common::{gaussian_waves, grid, rng, sine_modes};
use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};
use tdqmc_core::numerics::field::WaveSet;
use tdqmc_core::partition::{assign_walkers, centered_strips, local_profile, make_strips, slater_profile};
use tdqmc_core::stats::{subset_statistics, walker_statistics};
use tdqmc_core::tdqmc::WalkerEnsemble;

#[test]
fn uniform_walkers_fill_strips_binomially() {
    let mut r = rng(17);
    let m = 4000;
    let w = WalkerEnsemble::new((0..m).map(|_| [r.random::<f64>() * 10.0 - 5.0, 0.0]).collect()).unwrap();
    let p = make_strips(-4.0, 4.0, 8, 0).unwrap();
    let a = assign_walkers(&p, &w);
    let law = Binomial::new(0.1, m as u64).unwrap();
    for (alpha, &c) in a.counts().iter().enumerate() {
        let tail = law.cdf(c as u64).min(1.0 - law.cdf(c.saturating_sub(1) as u64));
        assert!(tail > 1e-4, "strip {alpha}: {c} walkers");
    }
    let outside = w.positions.iter().filter(|q| q[0].abs() > 4.0).count();
    assert_eq!(a.out_of_range(), outside);
    assert_eq!(a.counts().iter().sum::<usize>() + outside, m);
}

#[test]
fn strip_rows_equal_direct_subset_statistics() {
    let mut r = rng(5);
    let m = 300;
    let waves = gaussian_waves(grid(96), m, &mut r);
    let w = WalkerEnsemble::new((0..m).map(|_| [r.random::<f64>() * 6.0 - 3.0, r.random::<f64>()]).collect()).unwrap();
    let p = make_strips(-2.5, 2.5, 7, 0).unwrap();
    let a = assign_walkers(&p, &w);
    let prof = local_profile(&p, &a, &waves, &w).unwrap();
    for row in &prof.rows {
        let members: Vec<usize> = (0..m).filter(|&k| {
            let x = w.positions[k][0];
            x >= p.edges[row.alpha] && (x < p.edges[row.alpha + 1] || (row.alpha == 6 && x == p.edges[7]))
        }).collect();
        assert_eq!(row.count, members.len());
        let direct = subset_statistics(&waves, &members).unwrap();
        let s = row.stats.as_ref().unwrap();
        assert!((s.entropy - direct.entropy).abs() < 1e-12);
        assert!((s.sigma - direct.sigma).abs() < 1e-12);
        let pts: Vec<[f64; 2]> = members.iter().map(|&k| w.positions[k]).collect();
        assert!((s.classical.variance - walker_statistics(&pts).unwrap().variance).abs() < 1e-12);
    }
    let all: Vec<usize> = (0..m).collect();
    assert!((prof.global.entropy - subset_statistics(&waves, &all).unwrap().entropy).abs() < 1e-12);
}

#[test]
fn empty_and_single_walker_strips() {
    let g = grid(64);
    let modes = sine_modes(g, 3);
    let waves = WaveSet::from_fields(&modes).unwrap();
    let w = WalkerEnsemble::new(vec![[-0.9, 0.0], [0.1, 0.0], [0.2, 0.0]]).unwrap();
    let p = make_strips(-1.0, 1.0, 4, 0).unwrap();
    let a = assign_walkers(&p, &w);
    let prof = local_profile(&p, &a, &waves, &w).unwrap();
    let s0 = prof.rows[0].stats.as_ref().unwrap();
    assert_eq!(s0.count, 1);
    assert!(s0.entropy.abs() < 1e-12 && (s0.k_eff - 1.0).abs() < 1e-12);
    assert!(prof.rows[1].stats.is_none() && prof.rows[3].stats.is_none());
    let s2 = prof.rows[2].stats.as_ref().unwrap();
    assert!((s2.entropy - 2f64.ln()).abs() < 1e-10);

    let first = WaveSet::from_fields(&[modes[0].clone(), modes[0].clone(), modes[0].clone()]).unwrap();
    let second = WaveSet::from_fields(&[modes[1].clone(), modes[1].clone(), modes[2].clone()]).unwrap();
    let fermions = slater_profile(&p, &a, &first, &second, &w).unwrap();
    let f0 = fermions.rows[0].stats.as_ref().unwrap();
    assert!((f0.entropy - 2f64.ln()).abs() < 1e-10);
    let shifted = fermions.shifted_entropy(2f64.ln());
    for row in shifted.rows.iter().filter_map(|r| r.stats.as_ref()) {
        assert!(row.entropy >= -1e-10);
    }
}

#[test]
fn centered_strips_are_symmetric_about_zero() {
    let w = WalkerEnsemble::<f64>::new(vec![[-3.0, 0.0], [1.0, 2.0], [5.0, -1.0]]).unwrap();
    let p = centered_strips(&w, 5, 0.5, 0).unwrap();
    assert!((p.edges[0] + 2.0).abs() < 1e-12 && (p.edges[5] - 2.0).abs() < 1e-12);
    assert_eq!(p.central_strip(), 2);
    assert!(centered_strips(&w, 5, 0.0, 0).is_err());
    let flat = WalkerEnsemble::new(vec![[1.0, 0.0], [1.0, 0.0]]).unwrap();
    assert!(centered_strips(&flat, 3, 0.8, 0).is_err());
}
