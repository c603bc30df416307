//! Matched-filter transmitter: maximize `Re Tr{H B}` subject to
//! `Tr{Bᴴ R_P B} ≤ P_R` and `r_l Tr{Bᴴ B} ≤ P_L`.
//!
//! The stationarity condition gives `B = (2μ₁ R_P + 2μ₂ r_l I)⁻¹ Hᴴ`. With
//! one multiplier zero the solution is closed form; with both active the
//! ratio `α = μ₂/μ₁` solves
//!
//! ```text
//! P_L / P_R = r_l Tr{H (R_P + α r_l I)⁻² Hᴴ} / Tr{H (R_P + α r_l I)⁻¹ R_P (R_P + α r_l I)⁻¹ Hᴴ}
//! ```
//!
//! whose right-hand side decreases monotonically in α.

use super::{Downlink, Method, Modes, Multipliers, PrecoderSolution};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, RMatrix};

const MAX_BRACKET_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 200;
const BISECTION_REL_WIDTH: f64 = 1e-12;

fn check_budget(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {p}")))
    }
}

fn loss_constrained(h: &CMatrix, r_p: &RMatrix, r_l: f64, p_l: f64) -> Result<PrecoderSolution> {
    check_budget("P_L", p_l)?;
    if r_l <= 0.0 {
        return Err(Error::VacuousLossConstraint);
    }
    let energy = linalg::frobenius_sq(h);
    if energy == 0.0 {
        return Err(Error::InvalidParameter("matched filter needs a nonzero channel".into()));
    }
    let scale = (p_l / (r_l * energy)).sqrt();
    let b = h.adjoint() * c(scale, 0.0);
    let multipliers = Multipliers::Mf {
        mu_radiated: 0.0,
        mu_loss: 1.0 / (2.0 * r_l * scale),
        alpha: None,
    };
    Ok(PrecoderSolution::new(b, Method::MfLoss, multipliers, r_p, r_l))
}

/// `B = Hᴴ sqrt(P_L / (r_l Tr{H Hᴴ}))`, the solution when only the loss
/// budget binds. `r_p` is used only to report the radiated power.
pub fn mf_loss_constrained(h: &CMatrix, r_p: &RMatrix, r_l: f64, p_l: f64) -> Result<PrecoderSolution> {
    loss_constrained(h, r_p, r_l, p_l)
}

/// `B = R_P⁻¹ Hᴴ sqrt(P_R / Tr{H R_P⁻¹ Hᴴ})`, the solution when only the
/// radiated-power budget binds. `r_l` is used only to report the loss.
pub fn mf_radiated_constrained(h: &CMatrix, r_p: &RMatrix, r_l: f64, p_r: f64) -> Result<PrecoderSolution> {
    Downlink::new(h.clone(), r_p.clone(), r_l)?.mf_radiated_constrained(p_r)
}

/// Matched filter under both budgets.
pub fn mf_dual(h: &CMatrix, r_p: &RMatrix, r_l: f64, p_r: f64, p_l: f64) -> Result<PrecoderSolution> {
    Downlink::new(h.clone(), r_p.clone(), r_l)?.mf_dual(p_r, p_l)
}

/// Numerator and denominator traces of the α equation in the mode basis.
fn dual_traces(modes: &Modes, r_l: f64, alpha: f64) -> (f64, f64) {
    let mut loss = 0.0;
    let mut radiated = 0.0;
    for (&lam, &e) in modes.values.iter().zip(modes.energy.iter()) {
        let d = lam + alpha * r_l;
        let inv2 = 1.0 / (d * d);
        loss += e * inv2;
        radiated += e * lam * inv2;
    }
    (loss, radiated)
}

impl Downlink {
    pub fn mf_loss_constrained(&self, p_l: f64) -> Result<PrecoderSolution> {
        loss_constrained(self.h(), self.r_p(), self.r_l(), p_l)
    }

    pub fn mf_radiated_constrained(&self, p_r: f64) -> Result<PrecoderSolution> {
        check_budget("P_R", p_r)?;
        let modes = self.radiating_modes()?;
        // R_P⁻¹ Hᴴ restricted to the radiating modes
        let mut coeffs = modes.projected.adjoint();
        for (i, mut row) in coeffs.row_iter_mut().enumerate() {
            row /= c(modes.values[i], 0.0);
        }
        let unscaled = modes.lift(&coeffs);
        // Normalize with the same dense form every caller evaluates; the
        // modal sum differs from it by the eigensolver's backward error,
        // which superdirective beams amplify.
        let radiated = linalg::trace_quadratic(self.r_p(), &unscaled);
        if !(radiated > 0.0 && radiated.is_finite()) {
            return Err(Error::Singular {
                context: "radiated-power matched filter",
                condition: self.spectrum().condition(),
            });
        }
        let scale = (p_r / radiated).sqrt();
        let b = unscaled * c(scale, 0.0);
        let multipliers = Multipliers::Mf {
            mu_radiated: 1.0 / (2.0 * scale),
            mu_loss: 0.0,
            alpha: None,
        };
        Ok(self.solution(b, Method::MfRadiated, multipliers))
    }

    /// Right-hand side of the α equation, `r_l T_L(α) / T_R(α)`.
    pub fn dual_ratio(&self, alpha: f64) -> f64 {
        let (loss, radiated) = dual_traces(&self.all_modes(), self.r_l(), alpha);
        self.r_l() * loss / radiated
    }

    pub fn mf_dual(&self, p_r: f64, p_l: f64) -> Result<PrecoderSolution> {
        check_budget("P_R", p_r)?;
        check_budget("P_L", p_l)?;
        let r_l = self.r_l();
        if r_l == 0.0 {
            // lossless elements: the loss budget can never bind
            return self.mf_radiated_constrained(p_r);
        }

        let loss_only = self.mf_loss_constrained(p_l)?;
        if loss_only.achieved_p_t <= p_r {
            return Ok(loss_only);
        }
        let radiated_only = self.mf_radiated_constrained(p_r)?;
        if radiated_only.achieved_p_l <= p_l {
            return Ok(radiated_only);
        }

        let modes = self.all_modes();
        let target = p_l / p_r;
        let ratio = |alpha: f64| {
            let (loss, radiated) = dual_traces(&modes, r_l, alpha);
            r_l * loss / radiated
        };

        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut doublings = 0;
        while ratio(hi) > target {
            if doublings == MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
                return Err(Error::RootNotBracketed);
            }
            lo = hi;
            hi *= 2.0;
            doublings += 1;
        }
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= BISECTION_REL_WIDTH * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let alpha = 0.5 * (lo + hi);

        let (_, radiated) = dual_traces(&modes, r_l, alpha);
        let mu_radiated = (radiated / (4.0 * p_r)).sqrt();
        if !(mu_radiated.is_finite() && mu_radiated > 0.0) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        let mut coeffs = modes.projected.adjoint();
        for (i, mut row) in coeffs.row_iter_mut().enumerate() {
            let d = modes.values[i] + alpha * r_l;
            row *= c(1.0 / (2.0 * mu_radiated * d), 0.0);
        }
        let b = modes.lift(&coeffs);
        let multipliers = Multipliers::Mf {
            mu_radiated,
            mu_loss: alpha * mu_radiated,
            alpha: Some(alpha),
        };
        Ok(self.solution(b, Method::MfDual, multipliers))
    }
}
