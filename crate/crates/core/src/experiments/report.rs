//! Exact-versus-TDQMC comparison.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::pipeline::{ProfileRecord, Source};
use crate::error::{Error, Result};
use crate::partition::{EntanglementProfile, SPECTRUM_COLUMNS};

pub const REPORT_FORMAT: &str = "tdqmc-comparison-v1";

/// Pearson correlation of `(a, b)` pairs; `None` below three pairs or for
/// a constant series.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 3 {
        return None;
    }
    let n = pairs.len() as f64;
    let (ma, mb) = pairs.iter().fold((0.0, 0.0), |(x, y), (a, b)| (x + a / n, y + b / n));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in pairs {
        sab += (a - ma) * (b - mb);
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
    }
    if !(saa > 0.0 && sbb > 0.0) {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

/// `corr(σ_α, S_α)` over strips holding at least `min_count` walkers.
pub fn sigma_entropy_correlation(p: &EntanglementProfile<f64>, min_count: usize) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = p
        .rows
        .iter()
        .filter(|r| r.count >= min_count)
        .filter_map(|r| r.stats.as_ref().map(|s| (s.sigma, s.entropy)))
        .collect();
    pearson(&pairs)
}

/// Strip with the largest entropy among those holding `min_count` walkers.
pub fn peak_strip(p: &EntanglementProfile<f64>, min_count: usize) -> Option<usize> {
    p.rows
        .iter()
        .filter(|r| r.count >= min_count)
        .filter_map(|r| r.stats.as_ref().map(|s| (r.alpha, s.entropy)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(a, _)| a)
}

/// Index of the strip whose center is nearest `x = 0`.
pub fn central_strip(p: &EntanglementProfile<f64>) -> usize {
    p.rows
        .iter()
        .min_by(|a, b| a.x_center.abs().total_cmp(&b.x_center.abs()))
        .map(|r| r.alpha)
        .unwrap_or(0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceSummary {
    pub config_sha256: String,
    pub energy: f64,
    pub walkers: usize,
    pub sigma_entropy_correlation: Option<f64>,
    pub peak_strip: Option<usize>,
    pub central_entropy: Option<f64>,
    pub profile: EntanglementProfile<f64>,
    pub ln2_corrected: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalEntropies {
    pub exact_svd: Option<f64>,
    pub exact_conditional: Option<f64>,
    pub tdqmc_ensemble: Option<f64>,
}

/// TDQMC minus exact, strip by strip.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StripDelta {
    pub alpha: usize,
    pub x_center: f64,
    pub sigma: Option<f64>,
    pub entropy: Option<f64>,
    pub linear_entropy: Option<f64>,
    pub k_eff: Option<f64>,
}

/// Leading Schmidt coefficients from every available source.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectraTable {
    pub exact_global_svd: Option<Vec<f64>>,
    pub exact_global_ensemble: Option<Vec<f64>>,
    pub exact_central: Option<Vec<f64>>,
    pub tdqmc_global: Option<Vec<f64>>,
    pub tdqmc_central: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub format: String,
    pub min_count: usize,
    pub strip_centers: Vec<f64>,
    pub central_strip: usize,
    pub exact: Option<SourceSummary>,
    pub tdqmc: Option<SourceSummary>,
    pub global_entropies: GlobalEntropies,
    /// Empty unless both pipelines are present.
    pub deltas: Vec<StripDelta>,
    pub spectra: SpectraTable,
}

fn summarize(rec: &ProfileRecord, min_count: usize) -> SourceSummary {
    let p = &rec.profile;
    let c = central_strip(p);
    SourceSummary {
        config_sha256: rec.config_sha256.clone(),
        energy: rec.energy,
        walkers: rec.walkers,
        sigma_entropy_correlation: sigma_entropy_correlation(p, min_count),
        peak_strip: peak_strip(p, min_count),
        central_entropy: p.rows[c].stats.as_ref().map(|s| s.entropy),
        profile: p.clone(),
        ln2_corrected: rec.ln2_corrected.as_ref().map(|q| q.entropies()),
    }
}

fn same_layout(a: &EntanglementProfile<f64>, b: &EntanglementProfile<f64>) -> bool {
    a.axis == b.axis && a.edges.len() == b.edges.len() && a.edges.iter().zip(&b.edges).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()))
}

fn top(v: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = v.iter().copied().take(SPECTRUM_COLUMNS).collect();
    t.resize(SPECTRUM_COLUMNS, 0.0);
    t
}

/// Builds the report from whichever records are present.
pub fn compare(exact: Option<&ProfileRecord>, tdqmc: Option<&ProfileRecord>, min_count: usize) -> Result<ComparisonReport> {
    if let Some(e) = exact {
        if e.source != Source::Exact {
            return Err(Error::Comparison("first record is not from the exact pipeline".into()));
        }
    }
    if let Some(t) = tdqmc {
        if t.source != Source::Tdqmc {
            return Err(Error::Comparison("second record is not from the TDQMC pipeline".into()));
        }
    }
    let base = exact.or(tdqmc).ok_or_else(|| Error::Comparison("no pipeline records to compare".into()))?;
    let mut deltas = Vec::new();
    if let (Some(e), Some(t)) = (exact, tdqmc) {
        if e.preset != t.preset || e.spin != t.spin {
            return Err(Error::Comparison(format!(
                "systems differ: exact {} / {}, tdqmc {} / {}",
                e.preset, e.spin, t.preset, t.spin
            )));
        }
        if !same_layout(&e.profile, &t.profile) {
            return Err(Error::Comparison(format!(
                "strip layouts differ (exact edges {:?}, tdqmc edges {:?}); set strips.range explicitly",
                e.profile.edges, t.profile.edges
            )));
        }
        for (re, rt) in e.profile.rows.iter().zip(&t.profile.rows) {
            let d = |f: fn(&crate::partition::DomainStats<f64>) -> f64| match (&re.stats, &rt.stats) {
                (Some(a), Some(b)) => Some(f(b) - f(a)),
                _ => None,
            };
            deltas.push(StripDelta {
                alpha: re.alpha,
                x_center: re.x_center,
                sigma: d(|s| s.sigma),
                entropy: d(|s| s.entropy),
                linear_entropy: d(|s| s.linear_entropy),
                k_eff: d(|s| s.k_eff),
            });
        }
    }
    let central = central_strip(&base.profile);
    let central_top = |r: &ProfileRecord| r.profile.rows[central].stats.as_ref().map(|s| s.top(SPECTRUM_COLUMNS));
    Ok(ComparisonReport {
        format: REPORT_FORMAT.into(),
        min_count,
        strip_centers: base.profile.centers(),
        central_strip: central,
        exact: exact.map(|r| summarize(r, min_count)),
        tdqmc: tdqmc.map(|r| summarize(r, min_count)),
        global_entropies: GlobalEntropies {
            exact_svd: exact.and_then(|r| r.global_svd.as_ref().map(|g| g.entropy)),
            exact_conditional: exact.map(|r| r.profile.global.entropy),
            tdqmc_ensemble: tdqmc.map(|r| r.profile.global.entropy),
        },
        deltas,
        spectra: SpectraTable {
            exact_global_svd: exact.and_then(|r| r.global_svd.as_ref().map(|g| top(&g.spectrum))),
            exact_global_ensemble: exact.map(|r| r.profile.global.top(SPECTRUM_COLUMNS)),
            exact_central: exact.and_then(central_top),
            tdqmc_global: tdqmc.map(|r| r.profile.global.top(SPECTRUM_COLUMNS)),
            tdqmc_central: tdqmc.and_then(central_top),
        },
    })
}

fn na(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into())
}

/// Plot-ready rows `quantity,strip_center,value,source`.
pub fn render_long_csv(r: &ComparisonReport) -> String {
    let mut out = String::from("quantity,strip_center,value,source\n");
    for (src, s) in [("exact", &r.exact), ("tdqmc", &r.tdqmc)] {
        let Some(s) = s else { continue };
        for row in &s.profile.rows {
            let st = row.stats.as_ref();
            let c = row.x_center;
            let _ = writeln!(out, "M_alpha,{c},{},{src}", row.count);
            let _ = writeln!(out, "sigma,{c},{},{src}", na(st.map(|s| s.sigma)));
            let _ = writeln!(out, "S,{c},{},{src}", na(st.map(|s| s.entropy)));
            let _ = writeln!(out, "S_L,{c},{},{src}", na(st.map(|s| s.linear_entropy)));
            let _ = writeln!(out, "K_eff,{c},{},{src}", na(st.map(|s| s.k_eff)));
        }
        if let Some(corr) = &s.ln2_corrected {
            for (row, v) in s.profile.rows.iter().zip(corr) {
                let _ = writeln!(out, "S_minus_ln2,{},{},{src}", row.x_center, na(*v));
            }
        }
    }
    for d in &r.deltas {
        let _ = writeln!(out, "delta_sigma,{},{},tdqmc-exact", d.x_center, na(d.sigma));
        let _ = writeln!(out, "delta_S,{},{},tdqmc-exact", d.x_center, na(d.entropy));
    }
    out
}

/// Spectra table with one column per source, `NA` where absent.
pub fn render_spectra_csv(r: &ComparisonReport) -> String {
    let s = &r.spectra;
    let cols = [
        ("exact_global_svd", &s.exact_global_svd),
        ("exact_global_ensemble", &s.exact_global_ensemble),
        ("exact_central", &s.exact_central),
        ("tdqmc_global", &s.tdqmc_global),
        ("tdqmc_central", &s.tdqmc_central),
    ];
    let mut out = String::from("m");
    cols.iter().for_each(|(n, _)| {
        let _ = write!(out, ",{n}");
    });
    out.push('\n');
    for m in 0..SPECTRUM_COLUMNS {
        let _ = write!(out, "{}", m + 1);
        for (_, c) in &cols {
            let _ = write!(out, ",{}", na(c.as_ref().map(|v| v[m])));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.5)]).unwrap() - 0.997949).abs() < 1e-6);
        assert!((pearson(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]), None);
        assert_eq!(pearson(&[(1.0, 1.0), (2.0, 2.0)]), None);
    }
}
