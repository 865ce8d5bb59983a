//! Soft-core two-electron systems in one dimension.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::grid::Grid1D;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Helium,
    Molecule,
    Custom,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "helium" | "he" => Ok(Preset::Helium),
            "molecule" | "h2" => Ok(Preset::Molecule),
            "custom" => Ok(Preset::Custom),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Helium => "helium",
            Preset::Molecule => "molecule",
            Preset::Custom => "custom",
        })
    }
}

/// Opposite spins give a symmetric spatial state (para), parallel spins an
/// antisymmetric one (ortho) with exchange and per-walker orthonormality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinConfig {
    OppositeSpin,
    ParallelSpin,
}

impl SpinConfig {
    #[inline]
    pub fn is_parallel(self) -> bool {
        matches!(self, SpinConfig::ParallelSpin)
    }
}

impl FromStr for SpinConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "opposite" | "para" | "oppositespin" => Ok(SpinConfig::OppositeSpin),
            "parallel" | "ortho" | "parallelspin" => Ok(SpinConfig::ParallelSpin),
            _ => Err(Error::param("spin", format!("expected opposite|parallel, got `{s}`"))),
        }
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinConfig::OppositeSpin => "opposite",
            SpinConfig::ParallelSpin => "parallel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nucleus<T> {
    pub position: T,
    pub charge: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemModel<T> {
    pub name: Preset,
    pub nuclei: Vec<Nucleus<T>>,
    pub a_en: T,
    pub a_ee: T,
    /// Scale on the electron-electron repulsion; `0` switches it off.
    pub ee_coupling: T,
    /// Optional harmonic confinement `½ω²x²` per electron.
    pub trap_omega: Option<T>,
    pub spin: SpinConfig,
    pub grid: Grid1D<T>,
}

/// Parameter overrides applied on top of a preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides<T> {
    pub a_en: Option<T>,
    pub a_ee: Option<T>,
    pub ee_coupling: Option<T>,
    pub separation: Option<T>,
    pub charge: Option<T>,
    pub trap_omega: Option<T>,
    pub spin: Option<SpinConfig>,
    pub x_min: Option<T>,
    pub x_max: Option<T>,
    pub n: Option<usize>,
    pub nuclei: Option<Vec<Nucleus<T>>>,
}

pub const DEFAULT_SOFTENING: f64 = 1.0;
pub const DEFAULT_SEPARATION: f64 = 3.0;

/// `q / √(r² + a²)`; attractive pairs pass negative `q`.
pub fn soft_coulomb<T: Real>(r: T, a: T, q: T) -> Result<T> {
    if !(a > T::zero()) {
        return Err(Error::param("a", format!("softening must be positive, got {a}")));
    }
    Ok(soft_coulomb_unchecked(r, a, q))
}

#[inline]
pub(crate) fn soft_coulomb_unchecked<T: Real>(r: T, a: T, q: T) -> T {
    q / (r * r + a * a).sqrt()
}

impl<T: Real> SystemModel<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_en > T::zero()) {
            return Err(Error::param("a_en", format!("must be positive, got {}", self.a_en)));
        }
        if !(self.a_ee > T::zero()) {
            return Err(Error::param("a_ee", format!("must be positive, got {}", self.a_ee)));
        }
        if !(self.ee_coupling >= T::zero()) || !self.ee_coupling.is_finite() {
            return Err(Error::param("ee_coupling", format!("must be finite and ≥ 0, got {}", self.ee_coupling)));
        }
        if let Some(w) = self.trap_omega {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::param("trap_omega", format!("must be positive, got {w}")));
            }
        }
        for (i, n) in self.nuclei.iter().enumerate() {
            if !(n.charge > T::zero()) || !n.charge.is_finite() {
                return Err(Error::param("charge", format!("nucleus {i} has charge {}", n.charge)));
            }
            if !n.position.is_finite() {
                return Err(Error::param("nuclei", format!("nucleus {i} position is not finite")));
            }
        }
        Ok(())
    }

    /// `V_ee(r₁ - r₂)` including the coupling scale.
    #[inline]
    pub fn vee(&self, r: T) -> T {
        self.ee_coupling * soft_coulomb_unchecked(r, self.a_ee, T::one())
    }

    #[inline]
    pub fn has_interaction(&self) -> bool {
        self.ee_coupling > T::zero()
    }

    /// `V_en(x)` at an arbitrary point.
    pub fn nuclear_at(&self, x: T) -> T {
        self.nuclei
            .iter()
            .map(|n| soft_coulomb_unchecked(x - n.position, self.a_en, -n.charge))
            .sum()
    }

    /// One-body potential at `x`: nuclei plus the optional trap.
    pub fn external_at(&self, x: T) -> T {
        let trap = self
            .trap_omega
            .map(|w| T::lit(0.5) * w * w * x * x)
            .unwrap_or_else(T::zero);
        self.nuclear_at(x) + trap
    }

    pub fn external_potential(&self) -> Vec<T> {
        self.grid.points().map(|x| self.external_at(x)).collect()
    }
}

pub fn nuclear_potential<T: Real>(model: &SystemModel<T>) -> Vec<T> {
    model.grid.points().map(|x| model.nuclear_at(x)).collect()
}

fn preset_defaults<T: Real>(preset: Preset) -> (Vec<Nucleus<T>>, T, T, usize) {
    match preset {
        Preset::Helium => (
            vec![Nucleus {
                position: T::zero(),
                charge: T::lit(2.0),
            }],
            T::lit(-10.0),
            T::lit(10.0),
            256,
        ),
        Preset::Molecule => {
            let h = T::lit(DEFAULT_SEPARATION / 2.0);
            (
                vec![
                    Nucleus {
                        position: -h,
                        charge: T::one(),
                    },
                    Nucleus {
                        position: h,
                        charge: T::one(),
                    },
                ],
                T::lit(-12.0),
                T::lit(12.0),
                288,
            )
        }
        Preset::Custom => (Vec::new(), T::lit(-10.0), T::lit(10.0), 256),
    }
}

pub fn build_system<T: Real>(preset: Preset, overrides: &Overrides<T>) -> Result<SystemModel<T>> {
    let (mut nuclei, x_min, x_max, n) = preset_defaults::<T>(preset);
    if let Some(r) = overrides.separation {
        if preset != Preset::Molecule {
            return Err(Error::param("separation", "only the molecule preset has a separation"));
        }
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::param("separation", format!("must be positive, got {r}")));
        }
        let h = r * T::lit(0.5);
        nuclei[0].position = -h;
        nuclei[1].position = h;
    }
    if let Some(q) = overrides.charge {
        nuclei.iter_mut().for_each(|n| n.charge = q);
    }
    if let Some(list) = &overrides.nuclei {
        if preset != Preset::Custom {
            return Err(Error::param("nuclei", "an explicit nucleus list needs the custom preset"));
        }
        nuclei = list.clone();
    }
    let grid = Grid1D::new(
        overrides.x_min.unwrap_or(x_min),
        overrides.x_max.unwrap_or(x_max),
        overrides.n.unwrap_or(n),
    )?;
    let soft = T::lit(DEFAULT_SOFTENING);
    let model = SystemModel {
        name: preset,
        nuclei,
        a_en: overrides.a_en.unwrap_or(soft),
        a_ee: overrides.a_ee.unwrap_or(soft),
        ee_coupling: overrides.ee_coupling.unwrap_or_else(T::one),
        trap_omega: overrides.trap_omega,
        spin: overrides.spin.unwrap_or(SpinConfig::OppositeSpin),
        grid,
    };
    model.validate()?;
    Ok(model)
}
