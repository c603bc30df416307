//! Multiport impedance network of surface elements and users.
//!
//! The (N+M)-port network relates port voltages to port currents through
//! the symmetric impedance matrix
//!
//! ```text
//! [v_t]   [Z_tt  Z_rtᵀ] [j_t]
//! [v_r] = [Z_rt  Z_rr ] [j_r]
//! ```
//!
//! Users are terminated in the conjugate of the self-impedance. Since the
//! self-impedance enters only through `Z_rr + z0* I` (whose diagonal is
//! `2 Re{z0}` after matching) and through real parts, it is stored as its
//! real part alone.
//!
//! Raw currents `j_t`, `j_r` are peak phasors and carry the 1/2 of the
//! time average. Beamforming matrices are RMS quantities, `j_t/√2 = B x`
//! with unit-covariance symbols, so [`precoded_powers`] has no 1/2.

use serde::{Deserialize, Serialize};

use crate::em::{self, Geometry, PhysicalConfig, Position};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, RMatrix};

/// Power values down to this are treated as roundoff and clamped to zero.
pub const NEGATIVE_POWER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ImpedanceSystem {
    /// N x N surface coupling.
    pub z_tt: CMatrix,
    /// M x N surface-to-user propagation.
    pub z_rt: CMatrix,
    /// M x M user coupling.
    pub z_rr: CMatrix,
    /// Re{z0}, the self-resistance on the diagonals.
    pub z0: f64,
    /// Series loss resistance of every surface element.
    pub r_l: f64,
}

impl ImpedanceSystem {
    pub fn n(&self) -> usize {
        self.z_tt.nrows()
    }

    pub fn m(&self) -> usize {
        self.z_rr.nrows()
    }

    /// Replaces the user coupling block by `z0 I`, i.e. neglects the coupling
    /// between users.
    pub fn without_ue_coupling(mut self) -> Self {
        let m = self.m();
        self.z_rr = CMatrix::from_diagonal_element(m, m, c(self.z0, 0.0));
        self
    }

    /// `Z_rr + z0* I`, the user block seen through the matched loads.
    fn loaded_user_block(&self) -> CMatrix {
        let mut a = self.z_rr.clone();
        for i in 0..self.m() {
            a[(i, i)] += c(self.z0, 0.0);
        }
        a
    }
}

/// Power budgets and receiver noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    /// Maximum radiated power (W).
    pub p_r: f64,
    /// Maximum ohmic loss (W).
    pub p_l: f64,
    /// Noise variance at each user (W).
    pub noise_variance: f64,
}

impl Constraints {
    pub fn new(p_r: f64, p_l: f64, noise_variance: f64) -> Result<Self> {
        for (name, v) in [("P_R", p_r), ("P_L", p_l), ("noise variance", noise_variance)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            p_r,
            p_l,
            noise_variance,
        })
    }
}

/// Loss resistance that gives an isolated element the radiation efficiency
/// `e_r = z0 / (z0 + r_l)`.
pub fn loss_resistance_from_efficiency(e_r: f64, z0: f64) -> Result<f64> {
    if !(e_r > 0.0 && e_r <= 1.0) {
        return Err(Error::InvalidParameter(format!("radiation efficiency must lie in (0, 1], got {e_r}")));
    }
    Ok(z0 * (1.0 - e_r) / e_r)
}

fn impedance_block(
    rows: &[Position],
    cols: &[Position],
    phys: &PhysicalConfig,
    diagonal: Option<f64>,
) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(rows.len(), cols.len());
    for (i, p) in rows.iter().enumerate() {
        for (j, q) in cols.iter().enumerate() {
            out[(i, j)] = match diagonal {
                Some(z0) if i == j => c(z0, 0.0),
                // fill the lower triangle of square blocks from the upper one
                Some(_) if j < i => out[(j, i)],
                _ => em::mutual_impedance(*p - *q, phys)?,
            };
        }
    }
    Ok(out)
}

/// Builds the three impedance blocks from the closed-form coupling.
pub fn assemble(geometry: &Geometry, phys: &PhysicalConfig, r_l: f64) -> Result<ImpedanceSystem> {
    if !(r_l.is_finite() && r_l >= 0.0) {
        return Err(Error::InvalidParameter(format!("loss resistance must be non-negative, got {r_l}")));
    }
    let z0 = em::self_impedance_real(phys);
    Ok(ImpedanceSystem {
        z_tt: impedance_block(geometry.lis(), geometry.lis(), phys, Some(z0))?,
        z_rt: impedance_block(geometry.ues(), geometry.lis(), phys, None)?,
        z_rr: impedance_block(geometry.ues(), geometry.ues(), phys, Some(z0))?,
        z0,
        r_l,
    })
}

/// `(Z_rr + z0* I)⁻¹ Z_rt`, shared by the channel and the scattering term.
fn scattering_solve(sys: &ImpedanceSystem) -> Result<CMatrix> {
    linalg::solve(&sys.loaded_user_block(), &sys.z_rt, "user termination")
}

/// `H = -(Z_rr + z0* I)⁻¹ Z_rt`, the map from surface currents to received
/// currents.
pub fn channel_matrix(sys: &ImpedanceSystem) -> Result<CMatrix> {
    Ok(-scattering_solve(sys)?)
}

fn radiated_resistance_from(sys: &ImpedanceSystem, solved: Option<&CMatrix>) -> RMatrix {
    let mut r = sys.z_tt.map(|z| z.re);
    if let Some(s) = solved {
        r -= (sys.z_rt.transpose() * s).map(|z| z.re);
    }
    (&r + r.transpose()) * 0.5
}

/// `R_P = Re{Z_tt - Z_rtᵀ (Z_rr + z0* I)⁻¹ Z_rt}`, or `Re{Z_tt}` alone when
/// the scattering of the users is ignored. Symmetrized.
pub fn radiated_resistance_matrix(sys: &ImpedanceSystem, include_scattering: bool) -> Result<RMatrix> {
    if include_scattering {
        let s = scattering_solve(sys)?;
        Ok(radiated_resistance_from(sys, Some(&s)))
    } else {
        Ok(radiated_resistance_from(sys, None))
    }
}

/// Channel matrix and radiated-resistance matrix of one scenario.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    /// M x N current transfer.
    pub h: CMatrix,
    /// N x N radiated-resistance form.
    pub r_p: RMatrix,
    pub scattering_included: bool,
}

impl ChannelModel {
    pub fn new(sys: &ImpedanceSystem, include_scattering: bool) -> Result<Self> {
        let s = scattering_solve(sys)?;
        let r_p = radiated_resistance_from(sys, include_scattering.then_some(&s));
        Ok(Self {
            h: -s,
            r_p,
            scattering_included: include_scattering,
        })
    }
}

/// `j_r = H j_t`.
pub fn received_currents(sys: &ImpedanceSystem, j_t: &CVector) -> Result<CVector> {
    if j_t.len() != sys.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} transmit currents for {} surface elements",
            j_t.len(),
            sys.n()
        )));
    }
    Ok(channel_matrix(sys)? * j_t)
}

/// Time-averaged power in each matched load, `|j_rm|² z0 / 2`.
pub fn received_power_per_ue(j_r: &CVector, z0: f64) -> Vec<f64> {
    j_r.iter().map(|j| j.norm_sqr() * z0 / 2.0).collect()
}

/// Clamps roundoff-level negative power to zero and rejects anything worse.
pub fn clamp_power(p: f64, what: &str) -> Result<f64> {
    if p.is_nan() {
        return Err(Error::InvariantViolation(format!("{what} is NaN")));
    }
    if p >= 0.0 {
        Ok(p)
    } else if p >= -NEGATIVE_POWER_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::InvariantViolation(format!("{what} is negative ({p:e})")))
    }
}

/// Power delivered to the network, `j_tᴴ R_P j_t / 2`.
pub fn transmit_power(j_t: &CVector, r_p: &RMatrix) -> Result<f64> {
    if j_t.len() != r_p.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} transmit currents for a {}x{} resistance matrix",
            j_t.len(),
            r_p.nrows(),
            r_p.ncols()
        )));
    }
    clamp_power(linalg::real_quadratic_form(r_p, j_t) / 2.0, "transmit power")
}

/// Ohmic loss in the series resistors, `r_l ‖j_t‖² / 2`.
pub fn thermal_loss(j_t: &CVector, r_l: f64) -> f64 {
    r_l * j_t.norm_squared() / 2.0
}

/// Radiated power `Tr{Bᴴ R_P B}` and ohmic loss `((1-e_r)/e_r) Tr{Bᴴ B}` of
/// an RMS beamforming matrix (`z0 = 1`).
pub fn precoded_powers(b: &CMatrix, r_p: &RMatrix, e_r: f64) -> Result<(f64, f64)> {
    if b.nrows() != r_p.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "beamformer with {} rows for {} elements",
            b.nrows(),
            r_p.nrows()
        )));
    }
    if !(e_r > 0.0 && e_r <= 1.0) {
        return Err(Error::InvalidParameter(format!("radiation efficiency must lie in (0, 1], got {e_r}")));
    }
    let p_t = clamp_power(linalg::trace_quadratic(r_p, b), "radiated power")?;
    let p_l = (1.0 - e_r) / e_r * linalg::frobenius_sq(b);
    Ok((p_t, p_l))
}

/// Per-user received power of an RMS beamforming matrix,
/// `z0 Σ_n |(HB)_mn|²`.
pub fn precoded_received_power(h: &CMatrix, b: &CMatrix, z0: f64) -> Vec<f64> {
    let hb = h * b;
    hb.row_iter().map(|row| z0 * row.iter().map(|z| z.norm_sqr()).sum::<f64>()).collect()
}
