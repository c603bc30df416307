use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::Constraints;
use crate::em::{linear_array, planar_array, ue_line, Geometry, PhysicalConfig, Position};
use crate::error::{Error, Result};
use crate::precoders::WmmseOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ArraySpec {
    /// Elements along y, endpoints at `±length/2`.
    Linear { length: f64, count: usize },
    /// Grid on the yz-plane.
    Planar {
        len_y: f64,
        len_z: f64,
        count_y: usize,
        count_z: usize,
    },
}

impl ArraySpec {
    pub fn element_count(&self) -> usize {
        match *self {
            ArraySpec::Linear { count, .. } => count,
            ArraySpec::Planar { count_y, count_z, .. } => count_y * count_z,
        }
    }

    /// Element spacing along y (and z for square grids); 0 for a single
    /// element.
    pub fn spacing(&self) -> f64 {
        let along = |length: f64, count: usize| {
            if count > 1 {
                length / (count - 1) as f64
            } else {
                0.0
            }
        };
        match *self {
            ArraySpec::Linear { length, count } => along(length, count),
            ArraySpec::Planar { len_y, count_y, .. } => along(len_y, count_y),
        }
    }

    fn positions(&self) -> Result<Vec<Position>> {
        match *self {
            ArraySpec::Linear { length, count } => linear_array(length, count),
            ArraySpec::Planar {
                len_y,
                len_z,
                count_y,
                count_z,
            } => planar_array(len_y, len_z, count_y, count_z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum UeSpec {
    /// Users spread along y at `x = distance_x`.
    Line { distance_x: f64, length: f64, count: usize },
    /// Explicit `[x, y, z]` positions.
    Positions(Vec<[f64; 3]>),
}

impl UeSpec {
    pub fn user_count(&self) -> usize {
        match self {
            UeSpec::Line { count, .. } => *count,
            UeSpec::Positions(p) => p.len(),
        }
    }

    fn positions(&self) -> Result<Vec<Position>> {
        match self {
            UeSpec::Line {
                distance_x,
                length,
                count,
            } => ue_line(*distance_x, *length, *count),
            UeSpec::Positions(p) => Ok(p.iter().map(|&[x, y, z]| Position::new(x, y, z)).collect()),
        }
    }
}

fn on() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Toggles {
    /// Keep the coupling between users; off replaces `Z_rr` by `z0 I`.
    #[serde(default = "on")]
    pub ue_coupling: bool,
    /// Account for the power the users scatter back in `R_P`.
    #[serde(default = "on")]
    pub scattering: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Self {
            ue_coupling: true,
            scattering: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PrecoderSpec {
    MfDual,
    Wmmse(#[serde(default)] WmmseOptions),
}

impl PrecoderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PrecoderSpec::MfDual => "mf-dual",
            PrecoderSpec::Wmmse(_) => "wmmse",
        }
    }
}

fn unit_wavelength() -> f64 {
    1.0
}

/// One scenario. All lengths are in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "unit_wavelength")]
    pub wavelength: f64,
    pub array: ArraySpec,
    pub ue: UeSpec,
    /// Radiation efficiency `e_r` of an isolated surface element.
    pub efficiency: f64,
    pub constraints: Constraints,
    #[serde(default)]
    pub toggles: Toggles,
    pub precoder: PrecoderSpec,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        positive("wavelength", self.wavelength)?;
        match self.array {
            ArraySpec::Linear { length, count } => {
                positive("array length", length)?;
                if count == 0 {
                    return Err(Error::Config("array count must be at least 1".into()));
                }
            }
            ArraySpec::Planar {
                len_y,
                len_z,
                count_y,
                count_z,
            } => {
                positive("array len_y", len_y)?;
                positive("array len_z", len_z)?;
                if count_y == 0 || count_z == 0 {
                    return Err(Error::Config("array counts must be at least 1".into()));
                }
            }
        }
        match &self.ue {
            UeSpec::Line {
                distance_x,
                length,
                count,
            } => {
                positive("ue distance_x", *distance_x)?;
                if !(length.is_finite() && *length >= 0.0) {
                    return Err(Error::Config(format!("ue line length must be non-negative, got {length}")));
                }
                if *count == 0 {
                    return Err(Error::Config("ue count must be at least 1".into()));
                }
            }
            UeSpec::Positions(p) => {
                if p.is_empty() {
                    return Err(Error::Config("ue position list is empty".into()));
                }
            }
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::Config(format!("efficiency must lie in (0, 1], got {}", self.efficiency)));
        }
        let c = &self.constraints;
        Constraints::new(c.p_r, c.p_l, c.noise_variance).map_err(|e| Error::Config(e.to_string()))?;
        if let PrecoderSpec::Wmmse(opts) = self.precoder {
            if opts.max_iter == 0 {
                return Err(Error::Config("wmmse max_iter must be at least 1".into()));
            }
            if !(opts.tol.is_finite() && opts.tol >= 0.0) {
                return Err(Error::Config(format!("wmmse tol must be non-negative, got {}", opts.tol)));
            }
        }
        Ok(())
    }

    pub fn physical(&self) -> Result<PhysicalConfig> {
        PhysicalConfig::new(self.wavelength)
    }

    /// Surface and user positions in physical units.
    pub fn geometry(&self) -> Result<Geometry> {
        let scale = |v: Vec<Position>| v.into_iter().map(|p| p.scale(self.wavelength)).collect();
        Geometry::new(scale(self.array.positions()?), scale(self.ue.positions()?))
    }

    /// Short human-readable label used in error messages.
    pub fn describe(&self) -> String {
        format!(
            "N={} M={} d={} e_r={} ue_coupling={} scattering={} {}",
            self.array.element_count(),
            self.ue.user_count(),
            self.array.spacing(),
            self.efficiency,
            self.toggles.ue_coupling,
            self.toggles.scattering,
            self.precoder.name()
        )
    }
}
