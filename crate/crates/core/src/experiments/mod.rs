//! Configured end-to-end runs: exact and TDQMC pipelines and their comparison.

mod config;
mod pipeline;
mod report;
mod selftest;

pub use config::{schema_help, ExperimentConfig, KeySpec, Pipelines, RawConfig, StripLayout, StripRange, ENV_PREFIX, SCHEMA};
pub use pipeline::{
    exact_record, files, load_record, reprofile_exact, reprofile_tdqmc, run_exact_pipeline, run_tdqmc_pipeline, strips_for,
    tdqmc_record, write_exact_outputs, write_tdqmc_outputs, ExactOutputs, GlobalSvd, ProfileRecord, Source, TdqmcOutputs,
    TdqmcSummary, RECORD_FORMAT,
};
pub use report::{
    central_strip, compare, pearson, peak_strip, render_long_csv, render_spectra_csv, sigma_entropy_correlation,
    ComparisonReport, GlobalEntropies, SourceSummary, SpectraTable, StripDelta, REPORT_FORMAT,
};
pub use selftest::{run_selftest, Check};

use std::path::Path;

use crate::error::Result;
use crate::io::{render_json, write_atomic};

/// Compares the records present in `dir` for the pipelines `cfg` enables
/// and writes the report, long CSV and spectra table.
pub fn compare_outputs(dir: &Path, cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    let exact = cfg.pipelines.exact().then(|| load_record(dir, Source::Exact)).transpose()?;
    let tdqmc = cfg.pipelines.tdqmc().then(|| load_record(dir, Source::Tdqmc)).transpose()?;
    let report = compare(exact.as_ref(), tdqmc.as_ref(), cfg.strips.min_count)?;
    write_atomic(&dir.join(files::COMPARISON), render_json(&report)?.as_bytes())?;
    write_atomic(&dir.join(files::COMPARISON_LONG), render_long_csv(&report).as_bytes())?;
    write_atomic(&dir.join(files::SPECTRA), render_spectra_csv(&report).as_bytes())?;
    Ok(report)
}
