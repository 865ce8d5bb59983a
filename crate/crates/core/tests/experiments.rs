use std::path::Path;

use tdqmc_core::experiments::{
    compare, compare_outputs, files, load_record, reprofile_exact, run_exact_pipeline, run_tdqmc_pipeline, write_exact_outputs,
    write_tdqmc_outputs, ExperimentConfig, RawConfig, Source,
};
use tdqmc_core::Error;

fn tiny(extra: &str) -> ExperimentConfig {
    let text = format!(
        "[system]\nn = 96\n[exact]\nwalkers = 600\n[tdqmc]\nwalkers = 24\n[strips]\ncount = 5\nrange = -3, 3\n{extra}"
    );
    ExperimentConfig::from_raw(RawConfig::parse(&text).unwrap()).unwrap()
}

fn run_all(cfg: &ExperimentConfig, dir: &Path) {
    write_exact_outputs(dir, cfg, &run_exact_pipeline(cfg).unwrap()).unwrap();
    write_tdqmc_outputs(dir, cfg, &run_tdqmc_pipeline(cfg).unwrap()).unwrap();
    compare_outputs(dir, cfg).unwrap();
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = tiny("");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_all(&cfg, a.path());
    run_all(&cfg, b.path());
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 10);
    for n in names {
        let x = std::fs::read(a.path().join(&n)).unwrap();
        let y = std::fs::read(b.path().join(&n)).unwrap();
        assert!(x == y, "{n:?} differs");
        let text = String::from_utf8(x).unwrap();
        if !n.to_string_lossy().ends_with(".csv") || n == files::COMPARISON_LONG || n == files::SPECTRA {
            continue;
        }
        assert!(text.starts_with(&format!("# config_sha256={}", cfg.hash())), "{n:?} lacks the hash");
    }
}

#[test]
fn identical_sides_give_zero_deltas() {
    let cfg = tiny("");
    let rec = run_exact_pipeline(&cfg).unwrap().record;
    let mut twin = rec.clone();
    twin.source = Source::Tdqmc;
    let r = compare(Some(&rec), Some(&twin), 10).unwrap();
    assert_eq!(r.deltas.len(), 5);
    for d in &r.deltas {
        for v in [d.sigma, d.entropy, d.linear_entropy, d.k_eff].into_iter().flatten() {
            assert_eq!(v, 0.0);
        }
    }
    let (e, t) = (r.exact.unwrap(), r.tdqmc.unwrap());
    assert_eq!(e.sigma_entropy_correlation, t.sigma_entropy_correlation);
    assert_eq!(r.spectra.exact_central, r.spectra.tdqmc_central);
}

#[test]
fn missing_pipeline_is_absent_not_zero() {
    let cfg = tiny("");
    let rec = run_exact_pipeline(&cfg).unwrap().record;
    let r = compare(Some(&rec), None, 10).unwrap();
    assert!(r.tdqmc.is_none() && r.global_entropies.tdqmc_ensemble.is_none());
    assert!(r.spectra.tdqmc_global.is_none() && r.deltas.is_empty());
    assert!(r.global_entropies.exact_svd.is_some());
    let json = serde_json::to_value(&r).unwrap();
    assert!(json["tdqmc"].is_null());
}

#[test]
fn strip_layout_mismatch_is_rejected() {
    let a = run_exact_pipeline(&tiny("")).unwrap().record;
    let mut b = run_exact_pipeline(&tiny("[strips]\nrange = -2, 2\n")).unwrap().record;
    b.source = Source::Tdqmc;
    assert!(matches!(compare(Some(&a), Some(&b), 10), Err(Error::Comparison(_))));
}

#[test]
fn reprofiling_reuses_cached_state() {
    let cfg = tiny("[run]\npipelines = exact\n");
    let dir = tempfile::tempdir().unwrap();
    let out = run_exact_pipeline(&cfg).unwrap();
    write_exact_outputs(dir.path(), &cfg, &out).unwrap();
    let wider = tiny("[run]\npipelines = exact\n[strips]\ncount = 7\n");
    let rec = reprofile_exact(dir.path(), &wider).unwrap();
    assert_eq!(rec.profile.rows.len(), 7);
    assert!((rec.profile.global.entropy - out.record.profile.global.entropy).abs() < 1e-12);
    assert_eq!(load_record(dir.path(), Source::Exact).unwrap().profile.rows.len(), 7);
    match load_record(dir.path(), Source::Tdqmc) {
        Err(Error::MissingFile(p)) => assert!(p.contains(files::TDQMC_RECORD)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn ortho_pipelines_report_ln2_rows() {
    let cfg = tiny("[system]\nspin = parallel\n");
    let e = run_exact_pipeline(&cfg).unwrap().record;
    let t = run_tdqmc_pipeline(&cfg).unwrap().record;
    let ec = e.ln2_corrected.as_ref().unwrap();
    for (raw, c) in e.profile.entropies().iter().zip(ec.entropies()) {
        if let (Some(r), Some(c)) = (raw, c) {
            assert!((r - c - std::f64::consts::LN_2).abs() < 1e-12);
        }
    }
    for s in t.ln2_corrected.as_ref().unwrap().entropies().into_iter().flatten() {
        assert!(s >= -1e-10, "{s}");
    }
}
