//! Flat `key = value` experiment configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [system]
//! preset = helium
//! spin = opposite
//! [tdqmc]
//! walkers = 500
//! ```
//!
//! Keys are addressed as `section.key`. Unknown keys are rejected. Any key
//! can be overridden from the environment as `TDQMC_<SECTION>_<KEY>`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ExactParams, SamplerParams};
use crate::io::sha256_hex;
use crate::model::{build_system, Overrides, Preset, SpinConfig, SystemModel};
use crate::tdqmc::{KernelPolicy, TdqmcParams};

pub const ENV_PREFIX: &str = "TDQMC_";

/// One documented configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub unit: &'static str,
    pub doc: &'static str,
}

const fn k(key: &'static str, default: &'static str, unit: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { key, default, unit, doc }
}

/// Every accepted key with its default.
pub const SCHEMA: &[KeySpec] = &[
    k("system.preset", "helium", "-", "helium | molecule | custom"),
    k("system.spin", "opposite", "-", "opposite (para, symmetric) | parallel (ortho, antisymmetric)"),
    k("system.a_en", "1.0", "bohr", "electron-nucleus softening"),
    k("system.a_ee", "1.0", "bohr", "electron-electron softening"),
    k("system.ee_coupling", "1.0", "-", "scale on V_ee; 0 switches the interaction off"),
    k("system.separation", "auto", "bohr", "internuclear distance (molecule only; auto = 3.0)"),
    k("system.charge", "auto", "e", "charge of every nucleus (auto = preset value)"),
    k("system.nuclei", "none", "bohr:e", "custom preset only: comma list of position:charge"),
    k("system.trap_omega", "none", "hartree", "optional harmonic trap ½ω²x² per electron"),
    k("system.x_min", "auto", "bohr", "grid start (auto = preset value)"),
    k("system.x_max", "auto", "bohr", "grid end (auto = preset value)"),
    k("system.n", "auto", "points", "grid points per axis (auto = 256, molecule 288)"),
    k("run.seed", "0", "-", "root seed for every random stream"),
    k("run.pipelines", "both", "-", "exact | tdqmc | both"),
    k("exact.dtau", "0.01", "hartree⁻¹", "imaginary-time step of the two-body solver"),
    k("exact.max_steps", "20000", "steps", "step cap of the two-body solver"),
    k("exact.energy_tol", "1e-9", "hartree", "energy change per check that ends the solve"),
    k("exact.walkers", "20000", "-", "walkers sampled from |Ψ|² for conditional waves"),
    k("exact.sampler_step", "0.5", "bohr", "Metropolis proposal width of the |Ψ|² sampler"),
    k("exact.burn_in", "2000", "moves", "discarded sampler moves"),
    k("exact.thin", "10", "moves", "sampler moves between kept walkers"),
    k("tdqmc.walkers", "500", "-", "walkers M (one guide wave per electron each)"),
    k("tdqmc.dtau", "0.01", "hartree⁻¹", "imaginary-time step, in (0, 0.05]"),
    k("tdqmc.kernel", "adaptive", "-", "adaptive | fixed | variational"),
    k("tdqmc.kernel_width", "0.5", "bohr", "width for kernel = fixed"),
    k("tdqmc.kernel_factor", "0.5", "-", "adaptive width = factor × pooled walker spread"),
    k("tdqmc.kernel_every", "50", "steps", "refresh interval of the adaptive width"),
    k("tdqmc.kernel_factors", "0.25,0.5,1.0", "-", "candidate factors for kernel = variational"),
    k("tdqmc.probe_steps", "200", "steps", "probe length per variational factor"),
    k("tdqmc.moves_per_step", "5", "-", "Metropolis moves per electron and walker each step"),
    k("tdqmc.proposal_width", "0.3", "bohr", "Gaussian Metropolis proposal width"),
    k("tdqmc.max_steps", "5000", "steps", "step cap before a convergence error"),
    k("tdqmc.min_steps", "500", "steps", "steps before convergence may be declared"),
    k("tdqmc.energy_tol", "1e-5", "hartree/step", "allowed drift of the smoothed energy"),
    k("tdqmc.window", "100", "steps", "smoothing window of the energy"),
    k("strips.count", "11", "-", "number of strips"),
    k("strips.axis", "1", "-", "electron whose coordinate is partitioned (1 or 2)"),
    k("strips.range", "auto", "bohr", "auto (centered, fraction of the walker cloud) or lo,hi"),
    k("strips.fraction", "0.8", "-", "share of the walker extent covered when range = auto"),
    k("strips.min_count", "10", "-", "strips with fewer walkers are left out of correlations"),
    k("output.dir", "out", "-", "output directory (not part of the config hash)"),
];

fn spec(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == key)
}

/// Multi-line description of every key, for `--help`.
pub fn schema_help() -> String {
    let mut out = String::from("Config keys ([section] key = value; env override TDQMC_<SECTION>_<KEY>):\n");
    for s in SCHEMA {
        out.push_str(&format!("  {:<22} default {:<13} [{}] {}\n", s.key, s.default, s.unit, s.doc));
    }
    out
}

/// Raw resolved values of every schema key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            values: SCHEMA.iter().map(|s| (s.key.to_string(), s.default.to_string())).collect(),
        }
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                key: format!("line {}", i + 1),
                detail: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_ascii_lowercase();
            let full = if section.is_empty() || key.contains('.') { key } else { format!("{section}.{key}") };
            cfg.set(&full, value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&crate::io::read_text(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if spec(key).is_none() {
            return Err(Error::Config {
                key: key.to_string(),
                detail: "unknown key".into(),
            });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    /// Applies `TDQMC_<SECTION>_<KEY>` variables from `vars`.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<()> {
        for (name, value) in vars {
            let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let lower = rest.to_ascii_lowercase();
            let key = SCHEMA
                .iter()
                .find(|s| s.key.replacen('.', "_", 1) == lower)
                .ok_or_else(|| Error::Config {
                    key: name.clone(),
                    detail: "environment override names no config key".into(),
                })?;
            self.set(key.key, &value)?;
        }
        Ok(())
    }

    /// Canonical `key = value` listing; `output.dir` excluded unless asked.
    pub fn canonical(&self, with_output: bool) -> String {
        self.values
            .iter()
            .filter(|(k, _)| with_output || k.as_str() != "output.dir")
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical(false).as_bytes())
    }

    fn parse_val<V: std::str::FromStr>(&self, key: &str) -> Result<V> {
        self.get(key).parse().map_err(|_| Error::Config {
            key: key.to_string(),
            detail: format!("cannot parse `{}`", self.get(key)),
        })
    }

    fn auto<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.get(key) {
            "auto" | "none" => Ok(None),
            _ => self.parse_val(key).map(Some),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)
            .split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| Error::Config {
                    key: key.to_string(),
                    detail: format!("bad list entry `{s}`"),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipelines {
    Exact,
    Tdqmc,
    Both,
}

impl Pipelines {
    pub fn exact(self) -> bool {
        matches!(self, Pipelines::Exact | Pipelines::Both)
    }

    pub fn tdqmc(self) -> bool {
        matches!(self, Pipelines::Tdqmc | Pipelines::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StripRange {
    Auto { fraction: f64 },
    Explicit { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripLayout {
    pub count: usize,
    /// Electron index, 0-based.
    pub axis: usize,
    pub range: StripRange,
    pub min_count: usize,
}

/// Fully typed experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub preset: Preset,
    pub overrides: Overrides<f64>,
    pub seed: u64,
    pub pipelines: Pipelines,
    pub exact: ExactParams<f64>,
    pub exact_walkers: usize,
    pub sampler: SamplerParams<f64>,
    pub tdqmc: TdqmcParams<f64>,
    pub strips: StripLayout,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let r = &raw;
        let preset: Preset = r.get("system.preset").parse()?;
        let spin: SpinConfig = r.get("system.spin").parse().map_err(|_| Error::Config {
            key: "system.spin".into(),
            detail: format!("expected opposite|parallel, got `{}`", r.get("system.spin")),
        })?;
        let nuclei = match r.get("system.nuclei") {
            "none" => None,
            text => Some(
                text.split(',')
                    .map(|item| {
                        let (p, q) = item.split_once(':').ok_or_else(|| Error::Config {
                            key: "system.nuclei".into(),
                            detail: format!("entry `{item}` is not position:charge"),
                        })?;
                        let bad = || Error::Config {
                            key: "system.nuclei".into(),
                            detail: format!("bad number in `{item}`"),
                        };
                        Ok(crate::model::Nucleus {
                            position: p.trim().parse().map_err(|_| bad())?,
                            charge: q.trim().parse().map_err(|_| bad())?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let overrides = Overrides {
            a_en: Some(r.parse_val("system.a_en")?),
            a_ee: Some(r.parse_val("system.a_ee")?),
            ee_coupling: Some(r.parse_val("system.ee_coupling")?),
            separation: r.auto("system.separation")?,
            charge: r.auto("system.charge")?,
            trap_omega: r.auto("system.trap_omega")?,
            spin: Some(spin),
            x_min: r.auto("system.x_min")?,
            x_max: r.auto("system.x_max")?,
            n: r.auto("system.n")?,
            nuclei,
        };
        let pipelines = match r.get("run.pipelines") {
            "exact" => Pipelines::Exact,
            "tdqmc" => Pipelines::Tdqmc,
            "both" => Pipelines::Both,
            other => {
                return Err(Error::Config {
                    key: "run.pipelines".into(),
                    detail: format!("expected exact|tdqmc|both, got `{other}`"),
                })
            }
        };
        let seed = r.parse_val("run.seed")?;
        let exact = ExactParams {
            dtau: r.parse_val("exact.dtau")?,
            max_steps: r.parse_val("exact.max_steps")?,
            energy_tol: r.parse_val("exact.energy_tol")?,
        };
        let sampler = SamplerParams {
            step: r.parse_val("exact.sampler_step")?,
            burn_in: r.parse_val("exact.burn_in")?,
            thin: r.parse_val("exact.thin")?,
        };
        let kernel = match r.get("tdqmc.kernel") {
            "adaptive" => KernelPolicy::Adaptive {
                factor: r.parse_val("tdqmc.kernel_factor")?,
                every: r.parse_val("tdqmc.kernel_every")?,
            },
            "fixed" => KernelPolicy::Fixed(r.parse_val("tdqmc.kernel_width")?),
            "variational" => KernelPolicy::Variational {
                factors: r.list("tdqmc.kernel_factors")?,
                probe_steps: r.parse_val("tdqmc.probe_steps")?,
                every: r.parse_val("tdqmc.kernel_every")?,
            },
            other => {
                return Err(Error::Config {
                    key: "tdqmc.kernel".into(),
                    detail: format!("expected adaptive|fixed|variational, got `{other}`"),
                })
            }
        };
        let tdqmc = TdqmcParams {
            walkers: r.parse_val("tdqmc.walkers")?,
            dtau: r.parse_val("tdqmc.dtau")?,
            kernel,
            moves_per_step: r.parse_val("tdqmc.moves_per_step")?,
            proposal_width: r.parse_val("tdqmc.proposal_width")?,
            max_steps: r.parse_val("tdqmc.max_steps")?,
            min_steps: r.parse_val("tdqmc.min_steps")?,
            energy_tol: r.parse_val("tdqmc.energy_tol")?,
            window: r.parse_val("tdqmc.window")?,
            seed,
        };
        let axis: usize = r.parse_val("strips.axis")?;
        if !(1..=2).contains(&axis) {
            return Err(Error::Config {
                key: "strips.axis".into(),
                detail: format!("must be 1 or 2, got {axis}"),
            });
        }
        let range = match r.get("strips.range") {
            "auto" => StripRange::Auto {
                fraction: r.parse_val("strips.fraction")?,
            },
            _ => {
                let v = r.list("strips.range")?;
                if v.len() != 2 {
                    return Err(Error::Config {
                        key: "strips.range".into(),
                        detail: "expected auto or lo,hi".into(),
                    });
                }
                StripRange::Explicit { lo: v[0], hi: v[1] }
            }
        };
        let strips = StripLayout {
            count: r.parse_val("strips.count")?,
            axis: axis - 1,
            range,
            min_count: r.parse_val("strips.min_count")?,
        };
        let cfg = Self {
            preset,
            overrides,
            seed,
            pipelines,
            exact,
            exact_walkers: r.parse_val("exact.walkers")?,
            sampler,
            tdqmc,
            strips,
            output_dir: PathBuf::from(r.get("output.dir")),
            raw,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let wrap = |key: &str, e: Error| Error::Config {
            key: key.to_string(),
            detail: e.to_string(),
        };
        self.model().map_err(|e| wrap("system", e))?;
        self.exact.validate().map_err(|e| wrap("exact", e))?;
        self.tdqmc.validate().map_err(|e| wrap("tdqmc", e))?;
        if self.exact_walkers == 0 {
            return Err(wrap("exact.walkers", Error::param("walkers", "must be at least 1")));
        }
        if self.strips.count == 0 {
            return Err(wrap("strips.count", Error::param("count", "must be at least 1")));
        }
        match self.strips.range {
            StripRange::Auto { fraction } if !(fraction > 0.0 && fraction <= 1.0) => {
                Err(wrap("strips.fraction", Error::param("fraction", "must lie in (0, 1]")))
            }
            StripRange::Explicit { lo, hi } if !(lo < hi) => {
                Err(wrap("strips.range", Error::param("range", "need lo < hi")))
            }
            _ => Ok(()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_raw(RawConfig::load(path)?)
    }

    pub fn model(&self) -> Result<SystemModel<f64>> {
        build_system(self.preset, &self.overrides)
    }

    pub fn spin(&self) -> SpinConfig {
        self.overrides.spin.unwrap_or(SpinConfig::OppositeSpin)
    }

    pub fn hash(&self) -> String {
        self.raw.hash()
    }
}
