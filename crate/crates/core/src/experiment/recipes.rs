//! Built-in sweeps: sum capacity against the number of users for a line
//! array, and received power against the size of a planar surface.

use super::config::{ArraySpec, PrecoderSpec, ScenarioConfig, Toggles, UeSpec};
use super::sweep::{SweepParam, SweepSpec};
use crate::circuit::Constraints;
use crate::error::Result;
use crate::precoders::WmmseOptions;

/// Default noise variance of the user-count sweep. The source quotes the
/// noise level as 10⁻⁴ without saying whether that is the standard
/// deviation or the variance; the variance reading is used here, and
/// [`fig2`] takes the other reading (10⁻⁸) as an argument.
pub const FIG2_NOISE_VARIANCE: f64 = 1e-4;

pub const FIG2_MAX_USERS: usize = 33;

/// (spacing, efficiency) pairs of the user-count sweep.
pub const FIG2_CASES: [(f64, f64); 4] = [(0.5, 1.0), (0.1, 1.0), (0.1, 0.8), (0.5, 0.8)];

/// Elements per axis of the planar-surface sweep, 3x3 up to 41x41.
pub const FIG3_GRID: [usize; 11] = [3, 5, 9, 13, 17, 21, 25, 29, 33, 37, 41];

pub const FIG3_EFFICIENCIES: [f64; 3] = [0.8, 0.99, 1.0];

const UNIT_BUDGETS: (f64, f64) = (1.0, 1.0);

fn on_off(flag: bool) -> &'static str {
    if flag {
        "on"
    } else {
        "off"
    }
}

/// Series label of one user-count curve.
pub fn fig2_series(spacing: f64, efficiency: f64, ue_coupling: bool) -> String {
    format!("d={spacing} e_r={efficiency} coupling={}", on_off(ue_coupling))
}

/// Series label of one surface-size curve.
pub fn fig3_series(efficiency: f64, scattering: bool) -> String {
    format!("e_r={efficiency} scattering={}", on_off(scattering))
}

/// 4λ line array along y with users on a 10λ segment at 20λ, WMMSE
/// precoding.
pub fn fig2_base(spacing: f64, efficiency: f64, ue_coupling: bool, noise_variance: f64) -> Result<ScenarioConfig> {
    let length = 4.0;
    let config = ScenarioConfig {
        wavelength: 1.0,
        array: ArraySpec::Linear {
            length,
            count: (length / spacing).round() as usize + 1,
        },
        ue: UeSpec::Line {
            distance_x: 20.0,
            length: 10.0,
            count: 1,
        },
        efficiency,
        constraints: Constraints::new(UNIT_BUDGETS.0, UNIT_BUDGETS.1, noise_variance)?,
        toggles: Toggles {
            ue_coupling,
            scattering: true,
        },
        precoder: PrecoderSpec::Wmmse(WmmseOptions::default()),
    };
    config.validate()?;
    Ok(config)
}

/// Sum capacity against M = 1..=33 for every spacing/efficiency case, with
/// and without coupling between the users.
pub fn fig2(noise_variance: f64) -> Result<Vec<SweepSpec>> {
    let users: Vec<f64> = (1..=FIG2_MAX_USERS).map(|m| m as f64).collect();
    let mut specs = Vec::new();
    for (spacing, efficiency) in FIG2_CASES {
        for coupling in [true, false] {
            specs.push(SweepSpec::new(
                fig2_series(spacing, efficiency, coupling),
                SweepParam::Users,
                users.clone(),
                fig2_base(spacing, efficiency, coupling, noise_variance)?,
            )?);
        }
    }
    Ok(specs)
}

/// 4λ x 4λ surface and a single user on the axis at 2λ, MF precoding.
pub fn fig3_base(efficiency: f64, scattering: bool) -> Result<ScenarioConfig> {
    let config = ScenarioConfig {
        wavelength: 1.0,
        array: ArraySpec::Planar {
            len_y: 4.0,
            len_z: 4.0,
            count_y: FIG3_GRID[0],
            count_z: FIG3_GRID[0],
        },
        ue: UeSpec::Line {
            distance_x: 2.0,
            length: 0.0,
            count: 1,
        },
        efficiency,
        constraints: Constraints::new(UNIT_BUDGETS.0, UNIT_BUDGETS.1, FIG2_NOISE_VARIANCE)?,
        toggles: Toggles {
            ue_coupling: true,
            scattering,
        },
        precoder: PrecoderSpec::MfDual,
    };
    config.validate()?;
    Ok(config)
}

/// Received power against surface size for every efficiency, with and
/// without the scattering correction.
pub fn fig3() -> Result<Vec<SweepSpec>> {
    let grid: Vec<f64> = FIG3_GRID.iter().map(|&n| n as f64).collect();
    let mut specs = Vec::new();
    for efficiency in FIG3_EFFICIENCIES {
        for scattering in [true, false] {
            specs.push(SweepSpec::new(
                fig3_series(efficiency, scattering),
                SweepParam::ElementsPerAxis,
                grid.clone(),
                fig3_base(efficiency, scattering)?,
            )?);
        }
    }
    Ok(specs)
}
