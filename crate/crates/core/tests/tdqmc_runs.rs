use tdqmc_core::model::{build_system, Overrides, Preset, SpinConfig};
use tdqmc_core::stats::subset_statistics;
use tdqmc_core::tdqmc::{init_ensemble, propagate_step, resample_walkers, run_to_convergence, KernelPolicy, TdqmcParams};
use tdqmc_core::Error;

fn small(walkers: usize, seed: u64) -> TdqmcParams<f64> {
    TdqmcParams {
        walkers,
        seed,
        ..TdqmcParams::default()
    }
}

#[test]
fn uncoupled_electrons_collapse_to_one_orbital() {
    let model = build_system::<f64>(
        Preset::Helium,
        &Overrides {
            ee_coupling: Some(0.0),
            ..Default::default()
        },
    )
    .unwrap();
    let run = run_to_convergence(&model, &small(100, 2)).unwrap();
    let all: Vec<usize> = (0..100).collect();
    let s = subset_statistics(&run.state.waves.electrons[0], &all).unwrap();
    assert!(s.sigma <= 0.02, "sigma {}", s.sigma);
}

#[test]
fn parallel_spin_pairs_stay_orthonormal() {
    let model = build_system::<f64>(
        Preset::Molecule,
        &Overrides {
            spin: Some(SpinConfig::ParallelSpin),
            ..Default::default()
        },
    )
    .unwrap();
    let run = run_to_convergence(&model, &small(48, 3)).unwrap();
    let w = &run.state.waves;
    assert!(w.max_pair_overlap() <= 1e-6, "overlap {}", w.max_pair_overlap());
    assert!(w.max_norm_defect() <= 1e-10);
    run.state.check_invariants().unwrap();
}

#[test]
fn step_cap_reports_drift_history() {
    let model = build_system::<f64>(Preset::Helium, &Overrides::default()).unwrap();
    let params = TdqmcParams {
        walkers: 16,
        max_steps: 40,
        min_steps: 20,
        window: 10,
        energy_tol: 1e-14,
        ..TdqmcParams::default()
    };
    match run_to_convergence(&model, &params) {
        Err(e @ Error::Convergence { .. }) => {
            assert!(e.is_numerical());
            let Error::Convergence { drift_history, steps, .. } = e else { unreachable!() };
            assert_eq!(steps, 40);
            assert!(!drift_history.is_empty());
        }
        other => panic!("expected a convergence error, got {other:?}"),
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let model = build_system::<f64>(Preset::Helium, &Overrides::default()).unwrap();
    let mut state = init_ensemble(&model, 4, 0).unwrap();
    assert!(matches!(resample_walkers(&mut state, 0, 0.3), Err(Error::Parameter { .. })));
    for bad in [
        TdqmcParams { dtau: 0.2, ..small(8, 0) },
        TdqmcParams { walkers: 1, ..small(8, 0) },
        TdqmcParams { kernel: KernelPolicy::Fixed(-1.0), ..small(8, 0) },
    ] {
        assert!(run_to_convergence(&model, &bad).is_err());
    }
}

#[test]
fn single_precision_steps() {
    let model = build_system::<f32>(Preset::Helium, &Overrides { n: Some(96), ..Default::default() }).unwrap();
    let mut state = init_ensemble(&model, 8, 1).unwrap();
    for _ in 0..20 {
        propagate_step(&mut state, &model, 0.01).unwrap();
        resample_walkers(&mut state, 2, 0.3).unwrap();
    }
    assert!(state.waves.max_norm_defect() < 1e-4);
    assert!(state.energy_estimate.is_finite() && state.energy_estimate < -1.5);
}
