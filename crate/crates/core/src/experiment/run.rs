use std::time::Instant;

use super::config::{PrecoderSpec, ScenarioConfig};
use crate::circuit::{self, ChannelModel};
use crate::em;
use crate::error::{Error, Result};
use crate::precoders::{check_passivity, Downlink, MetricsReport, PrecoderSolution};

/// Relative passivity tolerance on the eigenvalues of `R_P`.
pub const PASSIVITY_TOLERANCE: f64 = 1e-8;

/// Slack allowed when checking that the users absorb no more than the
/// radiated power.
pub const ENERGY_SLACK: f64 = 1e-9;

/// Fraction of the radiated power a perfect aperture delivers to the user in
/// the 4λ x 4λ surface, user at 2λ, reference geometry: the surface covers
/// one sixth of the space seen from the user.
pub const APERTURE_FRACTION: f64 = 1.0 / 6.0;

/// Outcome of one scenario. `error` is set (and the metrics are NaN) when
/// the scenario failed inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub series: String,
    pub param: String,
    pub value: f64,
    pub n: usize,
    pub m: usize,
    pub efficiency: f64,
    pub spacing: f64,
    pub ue_coupling: bool,
    pub scattering: bool,
    pub precoder: String,
    pub sum_capacity: f64,
    pub sinr_min: f64,
    pub sinr_max: f64,
    pub p_t: f64,
    pub p_l: f64,
    pub rx_power_total: f64,
    pub reference_aperture_power: f64,
    pub converged: bool,
    pub iterations: usize,
    pub error: Option<String>,
    /// Seconds spent in [`run`]. Not part of the CSV so that output stays
    /// reproducible.
    pub wall_time: f64,
}

impl ResultRow {
    fn skeleton(config: &ScenarioConfig) -> Self {
        Self {
            series: String::new(),
            param: String::new(),
            value: f64::NAN,
            n: config.array.element_count(),
            m: config.ue.user_count(),
            efficiency: config.efficiency,
            spacing: config.array.spacing(),
            ue_coupling: config.toggles.ue_coupling,
            scattering: config.toggles.scattering,
            precoder: config.precoder.name().to_string(),
            sum_capacity: f64::NAN,
            sinr_min: f64::NAN,
            sinr_max: f64::NAN,
            p_t: f64::NAN,
            p_l: f64::NAN,
            rx_power_total: f64::NAN,
            reference_aperture_power: config.constraints.p_r * APERTURE_FRACTION,
            converged: false,
            iterations: 0,
            error: None,
            wall_time: 0.0,
        }
    }

    /// Row recording a failed scenario.
    pub fn failed(config: &ScenarioConfig, error: &Error) -> Self {
        Self {
            error: Some(error.to_string()),
            ..Self::skeleton(config)
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

/// Everything computed for one scenario.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub channel: ChannelModel,
    pub r_l: f64,
    pub z0: f64,
    pub solution: PrecoderSolution,
    pub metrics: MetricsReport,
}

/// Builds the network, designs the precoder, and checks the invariants
/// (passivity, budgets, and energy conservation when scattering is
/// modeled).
pub fn evaluate(config: &ScenarioConfig) -> Result<Evaluation> {
    config.validate()?;
    let phys = config.physical()?;
    let geometry = config.geometry()?;
    let z0 = em::self_impedance_real(&phys);
    let r_l = circuit::loss_resistance_from_efficiency(config.efficiency, z0)?;
    let mut sys = circuit::assemble(&geometry, &phys, r_l)?;
    if !config.toggles.ue_coupling {
        sys = sys.without_ue_coupling();
    }
    let channel = ChannelModel::new(&sys, config.toggles.scattering)?;
    let downlink = Downlink::new(channel.h.clone(), channel.r_p.clone(), r_l)?;
    check_passivity(downlink.spectrum(), PASSIVITY_TOLERANCE)?;

    let cons = config.constraints;
    let solution = match config.precoder {
        PrecoderSpec::MfDual => downlink.mf_dual(cons.p_r, cons.p_l)?,
        PrecoderSpec::Wmmse(opts) => downlink.wmmse(&cons, &opts)?.0,
    };
    let metrics = MetricsReport::evaluate(&channel.h, &solution.b, &channel.r_p, r_l, z0, cons.noise_variance)?;
    let p_l_budget = if r_l > 0.0 { cons.p_l } else { f64::INFINITY };
    if !solution.satisfies(cons.p_r, p_l_budget) {
        return Err(Error::InvariantViolation(format!(
            "budgets exceeded: P_t = {:e} (P_R = {:e}), P_l = {:e} (P_L = {:e})",
            metrics.p_t, cons.p_r, metrics.p_l, cons.p_l
        )));
    }
    let rx = metrics.total_rx_power();
    // only the full network is bound to conserve energy
    if config.toggles.scattering && config.toggles.ue_coupling && rx > metrics.p_t + ENERGY_SLACK * metrics.p_t.max(1.0) {
        return Err(Error::InvariantViolation(format!(
            "users absorb {rx:e} W of {:e} W radiated",
            metrics.p_t
        )));
    }
    Ok(Evaluation {
        channel,
        r_l,
        z0,
        solution,
        metrics,
    })
}

/// Runs one scenario; errors carry the scenario description.
pub fn run(config: &ScenarioConfig) -> Result<ResultRow> {
    let start = Instant::now();
    let eval = evaluate(config).map_err(|e| e.in_scenario(config.describe()))?;
    let sinr = &eval.metrics.sinr;
    Ok(ResultRow {
        sum_capacity: eval.metrics.sum_capacity,
        sinr_min: sinr.iter().copied().fold(f64::INFINITY, f64::min),
        sinr_max: sinr.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        p_t: eval.metrics.p_t,
        p_l: eval.metrics.p_l,
        rx_power_total: eval.metrics.total_rx_power(),
        converged: eval.solution.converged,
        iterations: eval.solution.iterations,
        wall_time: start.elapsed().as_secs_f64(),
        ..ResultRow::skeleton(config)
    })
}
