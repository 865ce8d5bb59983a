//! Text formats for cached states, walkers and profiles.
//!
//! Every writer goes through [`write_atomic`], so a failed run never leaves a
//! partial file behind. Floating-point values are printed in Rust's shortest
//! round-trip form, which makes outputs byte-identical across reruns.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{Symmetry, TwoBodyState};
use crate::model::SpinConfig;
use crate::numerics::field::{ComplexField2D, WaveSet};
use crate::numerics::grid::{Grid1D, Grid2D};
use crate::partition::{EntanglementProfile, SPECTRUM_COLUMNS};
use crate::scalar::{Real, C};
use crate::tdqmc::{GuideWaveEnsemble, WalkerEnsemble};

pub const FIELD_FORMAT: &str = "tdqmc-field-v1";
const DATA_MARKER: &str = "---";

/// Hex SHA-256 of `text`.
pub fn sha256_hex(text: &[u8]) -> String {
    Sha256::digest(text).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn format_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

/// Header and row-major complex values of a field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub header: BTreeMap<String, String>,
    pub values: Array2<C<f64>>,
}

impl FieldDump {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.get(key).map(String::as_str)
    }

    pub fn require<V: std::str::FromStr>(&self, path: &Path, key: &str) -> Result<V> {
        self.get(key)
            .ok_or_else(|| format_err(path, format!("missing header `{key}`")))?
            .parse()
            .map_err(|_| format_err(path, format!("bad value for `{key}`")))
    }

    fn grid(&self, path: &Path) -> Result<Grid1D<f64>> {
        Grid1D::new(self.require(path, "x_min")?, self.require(path, "x_max")?, self.require(path, "n")?)
    }
}

/// Serializes a field dump:
///
/// ```text
/// format = tdqmc-field-v1
/// <key> = <value>          one line per header entry, sorted
/// rows = R
/// cols = N
/// ---
/// re,im                    R·N lines, row-major
/// ```
pub fn render_field_dump<T: Real>(header: &BTreeMap<String, String>, values: &Array2<C<T>>) -> String {
    let mut out = String::with_capacity(values.len() * 40 + 256);
    let _ = writeln!(out, "format = {FIELD_FORMAT}");
    for (k, v) in header {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "rows = {}", values.nrows());
    let _ = writeln!(out, "cols = {}", values.ncols());
    let _ = writeln!(out, "{DATA_MARKER}");
    for v in values.iter() {
        let _ = writeln!(out, "{},{}", v.re.as_f64(), v.im.as_f64());
    }
    out
}

pub fn parse_field_dump(path: &Path, text: &str) -> Result<FieldDump> {
    let mut lines = text.lines();
    let mut header = BTreeMap::new();
    let mut seen_marker = false;
    for line in lines.by_ref() {
        let line = line.trim();
        if line == DATA_MARKER {
            seen_marker = true;
            break;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format_err(path, format!("header line `{line}` lacks `=`")))?;
        header.insert(k.trim().to_string(), v.trim().to_string());
    }
    if !seen_marker {
        return Err(format_err(path, "no data section"));
    }
    if header.get("format").map(String::as_str) != Some(FIELD_FORMAT) {
        return Err(format_err(path, format!("expected format {FIELD_FORMAT}")));
    }
    let dims = |k: &str| -> Result<usize> {
        header
            .get(k)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format_err(path, format!("missing or bad `{k}`")))
    };
    let (rows, cols) = (dims("rows")?, dims("cols")?);
    let mut data = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(a, b)| Some(C::new(a.trim().parse().ok()?, b.trim().parse().ok()?)));
        data.push(parsed.ok_or_else(|| format_err(path, format!("bad value on data line {}", i + 1)))?);
    }
    let values = Array2::from_shape_vec((rows, cols), data)
        .map_err(|_| format_err(path, format!("expected {rows}×{cols} values")))?;
    Ok(FieldDump { header, values })
}

fn grid_header<T: Real>(g: &Grid1D<T>) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("x_min".to_string(), g.x_min().as_f64().to_string()),
        ("x_max".to_string(), g.x_max().as_f64().to_string()),
        ("n".to_string(), g.n().to_string()),
    ])
}

fn cast<T: Real>(values: &Array2<C<f64>>) -> Array2<C<T>> {
    values.mapv(|v| C::new(T::lit(v.re), T::lit(v.im)))
}

fn symmetry_name(s: Symmetry) -> &'static str {
    match s {
        Symmetry::Symmetric => "symmetric",
        Symmetry::Antisymmetric => "antisymmetric",
    }
}

/// Caches a converged two-body state.
pub fn write_two_body_state<T: Real>(path: &Path, state: &TwoBodyState<T>, extra: &BTreeMap<String, String>) -> Result<()> {
    let mut h = grid_header(&state.psi.grid.gx);
    h.extend(extra.clone());
    h.insert("kind".into(), "two-body".into());
    h.insert("energy".into(), state.energy.as_f64().to_string());
    h.insert("symmetry".into(), symmetry_name(state.symmetry).into());
    h.insert("converged".into(), state.converged.to_string());
    h.insert("iterations".into(), state.iterations.to_string());
    write_atomic(path, render_field_dump(&h, &state.psi.values).as_bytes())
}

pub fn read_two_body_state<T: Real>(path: &Path) -> Result<(TwoBodyState<T>, FieldDump)> {
    let dump = parse_field_dump(path, &read_text(path)?)?;
    if dump.get("kind") != Some("two-body") {
        return Err(format_err(path, "not a two-body state dump"));
    }
    let g = dump.grid(path)?;
    let symmetry = match dump.get("symmetry") {
        Some("symmetric") => Symmetry::Symmetric,
        Some("antisymmetric") => Symmetry::Antisymmetric,
        _ => return Err(format_err(path, "missing or bad `symmetry`")),
    };
    let gt = Grid1D::new(T::lit(g.x_min()), T::lit(g.x_max()), g.n())?;
    let psi = ComplexField2D::new(Grid2D::square(gt), cast(&dump.values))
        .map_err(|e| format_err(path, e.to_string()))?;
    let state = TwoBodyState {
        psi,
        energy: T::lit(dump.require::<f64>(path, "energy")?),
        symmetry,
        converged: dump.require(path, "converged")?,
        iterations: dump.require(path, "iterations")?,
        energy_history: Vec::new(),
    };
    Ok((state, dump))
}

/// Caches guide waves: rows `0..M` hold electron 1, rows `M..2M` electron 2.
pub fn write_guide_waves<T: Real>(path: &Path, waves: &GuideWaveEnsemble<T>, extra: &BTreeMap<String, String>) -> Result<()> {
    let mut h = grid_header(&waves.grid());
    h.extend(extra.clone());
    h.insert("kind".into(), "guide-waves".into());
    h.insert("walkers".into(), waves.len().to_string());
    h.insert("spin".into(), waves.spin.to_string());
    let both = waves.electrons[0].concat(&waves.electrons[1])?;
    write_atomic(path, render_field_dump(&h, &both.waves).as_bytes())
}

pub fn read_guide_waves<T: Real>(path: &Path) -> Result<(GuideWaveEnsemble<T>, FieldDump)> {
    let dump = parse_field_dump(path, &read_text(path)?)?;
    if dump.get("kind") != Some("guide-waves") {
        return Err(format_err(path, "not a guide-wave dump"));
    }
    let g = dump.grid(path)?;
    let gt = Grid1D::new(T::lit(g.x_min()), T::lit(g.x_max()), g.n())?;
    let m: usize = dump.require(path, "walkers")?;
    let spin: SpinConfig = dump.require::<String>(path, "spin")?.parse()?;
    if dump.values.nrows() != 2 * m {
        return Err(format_err(path, format!("{} rows for {m} walkers", dump.values.nrows())));
    }
    let all = cast::<T>(&dump.values);
    let first = WaveSet::new(gt, all.slice(ndarray::s![..m, ..]).to_owned())?;
    let second = WaveSet::new(gt, all.slice(ndarray::s![m.., ..]).to_owned())?;
    Ok((
        GuideWaveEnsemble {
            electrons: [first, second],
            spin,
        },
        dump,
    ))
}

/// Walker CSV with columns `k,x1,x2`.
pub fn render_walkers<T: Real>(walkers: &WalkerEnsemble<T>, config_hash: Option<&str>) -> String {
    let mut out = String::with_capacity(walkers.len() * 48);
    if let Some(h) = config_hash {
        let _ = writeln!(out, "# config_sha256={h}");
    }
    out.push_str("k,x1,x2\n");
    for (k, p) in walkers.positions.iter().enumerate() {
        let _ = writeln!(out, "{k},{},{}", p[0].as_f64(), p[1].as_f64());
    }
    out
}

pub fn parse_walkers<T: Real>(path: &Path, text: &str) -> Result<WalkerEnsemble<T>> {
    let mut positions = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != "k,x1,x2" {
                return Err(format_err(path, "expected header `k,x1,x2`"));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || format_err(path, format!("bad walker row on line {}", i + 1));
        if cols.len() != 3 || cols[0].parse::<usize>().ok() != Some(positions.len()) {
            return Err(bad());
        }
        let x1: f64 = cols[1].parse().map_err(|_| bad())?;
        let x2: f64 = cols[2].parse().map_err(|_| bad())?;
        positions.push([T::lit(x1), T::lit(x2)]);
    }
    WalkerEnsemble::new(positions).map_err(|e| format_err(path, e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into())
}

/// Profile CSV: one row per strip and a final `global` row. Empty strips
/// print `NA` in every statistic column.
pub fn render_profile_csv<T: Real>(p: &EntanglementProfile<T>, config_hash: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = config_hash {
        let _ = writeln!(out, "# config_sha256={h}");
    }
    out.push_str("alpha,x_center,M_alpha,sigma,S,S_L,K_eff");
    for i in 1..=SPECTRUM_COLUMNS {
        let _ = write!(out, ",lambda{i}");
    }
    out.push('\n');
    let row = |out: &mut String, alpha: &str, center: Option<f64>, count: usize, s: Option<&crate::partition::DomainStats<T>>| {
        let _ = write!(out, "{alpha},{},{count}", opt(center));
        let vals = [
            s.map(|s| s.sigma.as_f64()),
            s.map(|s| s.entropy.as_f64()),
            s.map(|s| s.linear_entropy.as_f64()),
            s.map(|s| s.k_eff.as_f64()),
        ];
        for v in vals {
            let _ = write!(out, ",{}", opt(v));
        }
        match s {
            Some(s) => s.top(SPECTRUM_COLUMNS).iter().for_each(|l| {
                let _ = write!(out, ",{}", l.as_f64());
            }),
            None => (0..SPECTRUM_COLUMNS).for_each(|_| out.push_str(",NA")),
        }
        out.push('\n');
    };
    for r in &p.rows {
        row(&mut out, &r.alpha.to_string(), Some(r.x_center.as_f64()), r.count, r.stats.as_ref());
    }
    row(&mut out, "global", None, p.global.count, Some(&p.global));
    out
}

/// Pretty JSON with a trailing newline.
pub fn render_json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: "<json>".into(),
        detail: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| format_err(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{assign_walkers, local_profile, make_strips};

    #[test]
    fn field_dump_round_trip() {
        let g = Grid1D::new(-1.0f64, 1.0, 8).unwrap();
        let values = Array2::from_shape_fn((3, 8), |(i, j)| C::new(i as f64 * 0.1 + j as f64 / 3.0, -(j as f64).sqrt()));
        let h = grid_header(&g);
        let text = render_field_dump(&h, &values);
        let back = parse_field_dump(Path::new("mem"), &text).unwrap();
        assert_eq!(back.values, values);
        assert_eq!(back.get("n"), Some("8"));
        assert!(parse_field_dump(Path::new("mem"), "format = other\n---\n").is_err());
    }

    #[test]
    fn walker_csv_round_trip() {
        let w = WalkerEnsemble::new(vec![[0.1f64, -2.5], [1.0 / 3.0, 4.0]]).unwrap();
        let text = render_walkers(&w, Some("abc"));
        assert!(text.starts_with("# config_sha256=abc\nk,x1,x2\n0,0.1,-2.5\n"));
        assert_eq!(parse_walkers::<f64>(Path::new("mem"), &text).unwrap(), w);
        assert!(parse_walkers::<f64>(Path::new("mem"), "k,x1,x2\n1,0,0\n").is_err());
    }

    #[test]
    fn profile_csv_marks_empty_strips() {
        let g = Grid1D::new(-4.0f64, 4.0, 32).unwrap();
        let waves = Array2::from_shape_fn((3, 32), |(k, j)| {
            let x = g.point(j);
            C::new((-(x - k as f64 * 0.2).powi(2)).exp(), 0.0)
        });
        let mut ws = WaveSet::new(g, waves).unwrap();
        for mut r in ws.waves.rows_mut() {
            crate::numerics::field::normalize_view(r.view_mut(), g.dx());
        }
        let w = WalkerEnsemble::new(vec![[-0.5, 0.0], [-0.4, 1.0], [0.6, 0.0]]).unwrap();
        let p = make_strips(-1.0, 1.0, 4, 0).unwrap();
        let prof = local_profile(&p, &assign_walkers(&p, &w), &ws, &w).unwrap();
        let csv = render_profile_csv(&prof, None);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].ends_with("lambda8"));
        assert!(lines[1].starts_with("0,-0.75,0,NA,NA,NA,NA,NA"));
        assert!(lines[5].starts_with("global,NA,3,"));
    }

    #[test]
    fn hashes_are_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
