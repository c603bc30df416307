use serde::Serialize;

use crate::circuit::{self, clamp_power};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};

/// `ρ_m = |h_mᴴ b_m|² / (Σ_{n≠m} |h_mᴴ b_n|² + σ²)`.
pub fn sinr_per_user(h: &CMatrix, b: &CMatrix, noise_variance: f64) -> Result<Vec<f64>> {
    if h.ncols() != b.nrows() || h.nrows() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "channel {}x{} with beamformer {}x{}",
            h.nrows(),
            h.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if !(noise_variance.is_finite() && noise_variance > 0.0) {
        return Err(Error::InvalidParameter(format!("noise variance must be positive, got {noise_variance}")));
    }
    let gains = h * b;
    Ok(gains
        .row_iter()
        .enumerate()
        .map(|(m, row)| {
            let total: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            let signal = row[m].norm_sqr();
            signal / (total - signal + noise_variance)
        })
        .collect())
}

/// `Σ log₂(1 + ρ_m)` in bits/s/Hz.
pub fn sum_capacity(sinr: &[f64]) -> f64 {
    debug_assert!(sinr.iter().all(|&s| s >= 0.0), "negative SINR {sinr:?}");
    sinr.iter().map(|&s| s.ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub sinr: Vec<f64>,
    pub sum_capacity: f64,
    pub per_ue_rx_power: Vec<f64>,
    pub p_t: f64,
    pub p_l: f64,
}

impl MetricsReport {
    pub fn evaluate(h: &CMatrix, b: &CMatrix, r_p: &RMatrix, r_l: f64, z0: f64, noise_variance: f64) -> Result<Self> {
        let sinr = sinr_per_user(h, b, noise_variance)?;
        Ok(Self {
            sum_capacity: sum_capacity(&sinr),
            sinr,
            per_ue_rx_power: circuit::precoded_received_power(h, b, z0),
            p_t: clamp_power(linalg::trace_quadratic(r_p, b), "radiated power")?,
            p_l: r_l * linalg::frobenius_sq(b),
        })
    }

    pub fn total_rx_power(&self) -> f64 {
        self.per_ue_rx_power.iter().sum()
    }
}
