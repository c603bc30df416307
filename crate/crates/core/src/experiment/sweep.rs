use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ArraySpec, ScenarioConfig, UeSpec};
use super::run::{run, ResultRow};
use crate::error::{Error, Result};

/// Relative tolerance when a spacing must divide the array length.
const SPACING_FIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Number of users on the user line.
    Users,
    /// Elements per axis (per side for planar arrays).
    ElementsPerAxis,
    Efficiency,
    /// Element spacing at fixed array length.
    Spacing,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Users => "users",
            SweepParam::ElementsPerAxis => "elements_per_axis",
            SweepParam::Efficiency => "efficiency",
            SweepParam::Spacing => "spacing",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "users" => Ok(SweepParam::Users),
            "elements_per_axis" => Ok(SweepParam::ElementsPerAxis),
            "efficiency" => Ok(SweepParam::Efficiency),
            "spacing" => Ok(SweepParam::Spacing),
            other => Err(Error::Config(format!(
                "unknown sweep parameter {other:?} (expected users, elements_per_axis, efficiency, or spacing)"
            ))),
        }
    }
}

fn as_count(param: SweepParam, value: f64) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value < u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::Config(format!("{param} must be a positive integer, got {value}")))
    }
}

fn count_for_spacing(length: f64, spacing: f64) -> Result<usize> {
    let intervals = length / spacing;
    let rounded = intervals.round();
    if !(spacing.is_finite() && spacing > 0.0) || rounded < 1.0 || (intervals - rounded).abs() > SPACING_FIT * intervals {
        return Err(Error::Config(format!("spacing {spacing} does not divide array length {length}")));
    }
    Ok(rounded as usize + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    /// Label copied to every row.
    pub series: String,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    pub fn new(series: impl Into<String>, param: SweepParam, values: Vec<f64>, base: ScenarioConfig) -> Result<Self> {
        let spec = Self {
            series: series.into(),
            param,
            values,
            base,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep value list is empty".into()));
        }
        for &v in &self.values {
            self.point(v)?.validate()?;
        }
        Ok(())
    }

    /// Base scenario with the swept parameter set to `value`.
    pub fn point(&self, value: f64) -> Result<ScenarioConfig> {
        let mut config = self.base.clone();
        match self.param {
            SweepParam::Users => {
                let n = as_count(self.param, value)?;
                match &mut config.ue {
                    UeSpec::Line { count, .. } => *count = n,
                    UeSpec::Positions(_) => {
                        return Err(Error::Config("sweeping users needs a line of users".into()));
                    }
                }
            }
            SweepParam::ElementsPerAxis => {
                let n = as_count(self.param, value)?;
                match &mut config.array {
                    ArraySpec::Linear { count, .. } => *count = n,
                    ArraySpec::Planar { count_y, count_z, .. } => {
                        *count_y = n;
                        *count_z = n;
                    }
                }
            }
            SweepParam::Efficiency => config.efficiency = value,
            SweepParam::Spacing => match &mut config.array {
                ArraySpec::Linear { length, count } => *count = count_for_spacing(*length, value)?,
                ArraySpec::Planar {
                    len_y,
                    len_z,
                    count_y,
                    count_z,
                } => {
                    *count_y = count_for_spacing(*len_y, value)?;
                    *count_z = count_for_spacing(*len_z, value)?;
                }
            },
        }
        config.validate()?;
        Ok(config)
    }
}

/// Runs every sweep point (in parallel) and returns the rows in the order of
/// the value list. A failing point yields an error row.
pub fn sweep(spec: &SweepSpec) -> Vec<ResultRow> {
    spec.values
        .par_iter()
        .map(|&value| {
            let row = match spec.point(value) {
                Ok(config) => run(&config).unwrap_or_else(|e| {
                    log::error!("{} {}={value}: {e}", spec.series, spec.param);
                    ResultRow::failed(&config, &e)
                }),
                Err(e) => ResultRow::failed(&spec.base, &e),
            };
            ResultRow {
                series: spec.series.clone(),
                param: spec.param.as_str().to_string(),
                value,
                ..row
            }
        })
        .collect()
}

/// Runs several sweeps, flattening their rows in order.
pub fn sweep_all(specs: &[SweepSpec]) -> Vec<ResultRow> {
    specs.par_iter().flat_map_iter(sweep).collect()
}
