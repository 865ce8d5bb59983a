//! Exact and TDQMC pipelines and the files they leave behind.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, StripRange};
use crate::error::{Error, Result};
use crate::exact::{conditional_waves, global_schmidt, imaginary_time_ground_state, sample_walkers, Symmetry, TwoBodyState};
use crate::io::{
    read_guide_waves, read_json, read_text, read_two_body_state, render_json, render_profile_csv, render_walkers,
    parse_walkers, write_atomic, write_guide_waves, write_two_body_state,
};
use crate::model::{Preset, SpinConfig};
use crate::partition::{assign_walkers, centered_strips, local_profile, make_strips, slater_profile, EntanglementProfile, StripPartition};
use crate::tdqmc::{run_to_convergence, GuideWaveEnsemble, TdqmcState, WalkerEnsemble};

pub const RECORD_FORMAT: &str = "tdqmc-profile-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Exact,
    Tdqmc,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Exact => "exact",
            Source::Tdqmc => "tdqmc",
        }
    }
}

/// Global Schmidt decomposition of the two-body state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalSvd {
    pub entropy: f64,
    pub linear_entropy: f64,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdqmcSummary {
    pub steps: usize,
    pub kernel_width: f64,
    pub kernel_factor: Option<f64>,
}

/// Everything `compare` needs from one pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub format: String,
    pub source: Source,
    pub config_sha256: String,
    pub preset: Preset,
    pub spin: SpinConfig,
    pub energy: f64,
    pub walkers: usize,
    pub global_svd: Option<GlobalSvd>,
    /// Distinguishable-electron profile.
    pub profile: EntanglementProfile<f64>,
    /// Parallel spins only: entropies with `ln 2` subtracted (exact: the
    /// conditional profile; TDQMC: the per-walker Slater mixture).
    pub ln2_corrected: Option<EntanglementProfile<f64>>,
    pub tdqmc: Option<TdqmcSummary>,
}

pub struct ExactOutputs {
    pub state: TwoBodyState<f64>,
    pub walkers: WalkerEnsemble<f64>,
    pub record: ProfileRecord,
}

pub struct TdqmcOutputs {
    pub state: TdqmcState<f64>,
    pub record: ProfileRecord,
}

/// Output file names inside the output directory.
pub mod files {
    pub const EXACT_STATE: &str = "exact_state.field";
    pub const EXACT_WALKERS: &str = "exact_walkers.csv";
    pub const EXACT_PROFILE: &str = "exact_profile.csv";
    pub const EXACT_PROFILE_LN2: &str = "exact_profile_ln2.csv";
    pub const EXACT_SPECTRUM: &str = "exact_spectrum.csv";
    pub const EXACT_RECORD: &str = "exact_record.json";
    pub const TDQMC_WAVES: &str = "tdqmc_waves.field";
    pub const TDQMC_WALKERS: &str = "tdqmc_walkers.csv";
    pub const TDQMC_PROFILE: &str = "tdqmc_profile.csv";
    pub const TDQMC_PROFILE_LN2: &str = "tdqmc_profile_ln2.csv";
    pub const TDQMC_RECORD: &str = "tdqmc_record.json";
    pub const COMPARISON: &str = "comparison.json";
    pub const COMPARISON_LONG: &str = "comparison_long.csv";
    pub const SPECTRA: &str = "spectra.csv";
}

/// Strip layout for `walkers` under the configured range policy.
pub fn strips_for(cfg: &ExperimentConfig, walkers: &WalkerEnsemble<f64>) -> Result<StripPartition<f64>> {
    let s = &cfg.strips;
    match s.range {
        StripRange::Auto { fraction } => centered_strips(walkers, s.count, fraction, s.axis),
        StripRange::Explicit { lo, hi } => make_strips(lo, hi, s.count, s.axis),
    }
}

fn symmetry(spin: SpinConfig) -> Symmetry {
    if spin.is_parallel() {
        Symmetry::Antisymmetric
    } else {
        Symmetry::Symmetric
    }
}

/// Profiles of a solved two-body state sampled by `walkers`.
pub fn exact_record(cfg: &ExperimentConfig, state: &TwoBodyState<f64>, walkers: &WalkerEnsemble<f64>) -> Result<ProfileRecord> {
    let global = global_schmidt(state)?;
    let axis = cfg.strips.axis;
    let cond = conditional_waves(state, walkers, axis)?;
    let strips = strips_for(cfg, walkers)?;
    let assign = assign_walkers(&strips, walkers);
    let profile = local_profile(&strips, &assign, &cond.waves, walkers)?;
    let spin = cfg.spin();
    let ln2_corrected = spin.is_parallel().then(|| profile.shifted_entropy(std::f64::consts::LN_2));
    Ok(ProfileRecord {
        format: RECORD_FORMAT.into(),
        source: Source::Exact,
        config_sha256: cfg.hash(),
        preset: cfg.preset,
        spin,
        energy: state.energy,
        walkers: walkers.len(),
        global_svd: Some(GlobalSvd {
            entropy: global.entropy,
            linear_entropy: global.linear_entropy,
            spectrum: global.spectrum.lambdas().to_vec(),
        }),
        profile,
        ln2_corrected,
        tdqmc: None,
    })
}

/// Solves the two-body problem, samples walkers from `|Ψ|²` and profiles
/// the strict conditional waves.
pub fn run_exact_pipeline(cfg: &ExperimentConfig) -> Result<ExactOutputs> {
    let model = cfg.model()?;
    let state = imaginary_time_ground_state(&model, symmetry(cfg.spin()), &cfg.exact)?;
    let walkers = sample_walkers(&state, cfg.exact_walkers, cfg.seed, &cfg.sampler)?;
    let record = exact_record(cfg, &state, &walkers)?;
    Ok(ExactOutputs { state, walkers, record })
}

/// Profiles of a guide-wave ensemble.
pub fn tdqmc_record(
    cfg: &ExperimentConfig,
    waves: &GuideWaveEnsemble<f64>,
    walkers: &WalkerEnsemble<f64>,
    energy: f64,
    summary: TdqmcSummary,
) -> Result<ProfileRecord> {
    let axis = cfg.strips.axis;
    let strips = strips_for(cfg, walkers)?;
    let assign = assign_walkers(&strips, walkers);
    let profile = local_profile(&strips, &assign, &waves.electrons[axis], walkers)?;
    let ln2_corrected = if waves.spin.is_parallel() {
        let mix = slater_profile(&strips, &assign, &waves.electrons[0], &waves.electrons[1], walkers)?;
        Some(mix.shifted_entropy(std::f64::consts::LN_2))
    } else {
        None
    };
    Ok(ProfileRecord {
        format: RECORD_FORMAT.into(),
        source: Source::Tdqmc,
        config_sha256: cfg.hash(),
        preset: cfg.preset,
        spin: waves.spin,
        energy,
        walkers: walkers.len(),
        global_svd: None,
        profile,
        ln2_corrected,
        tdqmc: Some(summary),
    })
}

/// Runs TDQMC to convergence and profiles the guide waves.
pub fn run_tdqmc_pipeline(cfg: &ExperimentConfig) -> Result<TdqmcOutputs> {
    let model = cfg.model()?;
    let run = run_to_convergence(&model, &cfg.tdqmc)?;
    let state = run.state;
    let summary = TdqmcSummary {
        steps: state.steps,
        kernel_width: state.kernel_width,
        kernel_factor: run.kernel_factor,
    };
    let record = tdqmc_record(cfg, &state.waves, &state.walkers, state.energy_estimate, summary)?;
    Ok(TdqmcOutputs { state, record })
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn hash_header(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    BTreeMap::from([("config_sha256".to_string(), cfg.hash())])
}

fn write_record(dir: &Path, cfg: &ExperimentConfig, rec: &ProfileRecord) -> Result<()> {
    let hash = cfg.hash();
    let (csv, ln2, json) = match rec.source {
        Source::Exact => (files::EXACT_PROFILE, files::EXACT_PROFILE_LN2, files::EXACT_RECORD),
        Source::Tdqmc => (files::TDQMC_PROFILE, files::TDQMC_PROFILE_LN2, files::TDQMC_RECORD),
    };
    write_atomic(&path(dir, csv), render_profile_csv(&rec.profile, Some(&hash)).as_bytes())?;
    if let Some(p) = &rec.ln2_corrected {
        write_atomic(&path(dir, ln2), render_profile_csv(p, Some(&hash)).as_bytes())?;
    }
    if let Some(g) = &rec.global_svd {
        let mut s = format!("# config_sha256={hash}\nm,lambda\n");
        for (m, l) in g.spectrum.iter().enumerate() {
            s.push_str(&format!("{},{l}\n", m + 1));
        }
        write_atomic(&path(dir, files::EXACT_SPECTRUM), s.as_bytes())?;
    }
    write_atomic(&path(dir, json), render_json(rec)?.as_bytes())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the exact pipeline's state, walkers, profiles and record.
pub fn write_exact_outputs(dir: &Path, cfg: &ExperimentConfig, out: &ExactOutputs) -> Result<()> {
    ensure_dir(dir)?;
    write_two_body_state(&path(dir, files::EXACT_STATE), &out.state, &hash_header(cfg))?;
    write_atomic(&path(dir, files::EXACT_WALKERS), render_walkers(&out.walkers, Some(&cfg.hash())).as_bytes())?;
    write_record(dir, cfg, &out.record)
}

/// Writes the TDQMC pipeline's guide waves, walkers, profiles and record.
pub fn write_tdqmc_outputs(dir: &Path, cfg: &ExperimentConfig, out: &TdqmcOutputs) -> Result<()> {
    ensure_dir(dir)?;
    let mut h = hash_header(cfg);
    let s = out.record.tdqmc.as_ref().expect("tdqmc record carries a summary");
    h.insert("energy".into(), out.record.energy.to_string());
    h.insert("steps".into(), s.steps.to_string());
    h.insert("kernel_width".into(), s.kernel_width.to_string());
    if let Some(f) = s.kernel_factor {
        h.insert("kernel_factor".into(), f.to_string());
    }
    write_guide_waves(&path(dir, files::TDQMC_WAVES), &out.state.waves, &h)?;
    write_atomic(&path(dir, files::TDQMC_WALKERS), render_walkers(&out.state.walkers, Some(&cfg.hash())).as_bytes())?;
    write_record(dir, cfg, &out.record)
}

fn load_walkers(p: &Path) -> Result<WalkerEnsemble<f64>> {
    parse_walkers(p, &read_text(p)?)
}

/// Recomputes the exact profile from cached outputs in `dir` with the strip
/// layout of `cfg`, rewriting the profile files.
pub fn reprofile_exact(dir: &Path, cfg: &ExperimentConfig) -> Result<ProfileRecord> {
    let (state, _) = read_two_body_state::<f64>(&path(dir, files::EXACT_STATE))?;
    let walkers = load_walkers(&path(dir, files::EXACT_WALKERS))?;
    let rec = exact_record(cfg, &state, &walkers)?;
    write_record(dir, cfg, &rec)?;
    Ok(rec)
}

/// TDQMC counterpart of [`reprofile_exact`].
pub fn reprofile_tdqmc(dir: &Path, cfg: &ExperimentConfig) -> Result<ProfileRecord> {
    let wp = path(dir, files::TDQMC_WAVES);
    let (waves, dump) = read_guide_waves::<f64>(&wp)?;
    let walkers = load_walkers(&path(dir, files::TDQMC_WALKERS))?;
    let summary = TdqmcSummary {
        steps: dump.require(&wp, "steps")?,
        kernel_width: dump.require(&wp, "kernel_width")?,
        kernel_factor: dump.get("kernel_factor").and_then(|s| s.parse().ok()),
    };
    let energy = dump.require(&wp, "energy")?;
    let rec = tdqmc_record(cfg, &waves, &walkers, energy, summary)?;
    write_record(dir, cfg, &rec)?;
    Ok(rec)
}

/// Reads a pipeline record, naming the file when it is absent.
pub fn load_record(dir: &Path, source: Source) -> Result<ProfileRecord> {
    let name = match source {
        Source::Exact => files::EXACT_RECORD,
        Source::Tdqmc => files::TDQMC_RECORD,
    };
    let p = path(dir, name);
    let rec: ProfileRecord = read_json(&p)?;
    if rec.format != RECORD_FORMAT || rec.source != source {
        return Err(Error::Format {
            path: p.display().to_string(),
            detail: format!("expected a {} record in format {RECORD_FORMAT}", source.name()),
        });
    }
    Ok(rec)
}
