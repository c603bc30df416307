//! Weighted-MMSE transmitter with a radiated-power and a loss budget.
//!
//! Each iteration, starting from receive gains `A = I` and weights `W = I`:
//!
//! 1. `B̃ = (Hᴴ Aᴴ W A H + α₁ R_P + α₂ r_l I)⁻¹ Hᴴ Aᴴ Wᴴ` with
//!    `α₁ = σ² Tr{Aᴴ W A} / P_R` and `α₂ = σ² Tr{Aᴴ W A} / P_L`;
//! 2. `B = β B̃`, `β = min(β_L, β_R)` so that both budgets hold;
//! 3. per user, `r_m = σ² + Σ_{i≠m} |h_mᴴ b_i|²`,
//!    `a_m = b_mᴴ h_m / (|h_mᴴ b_m|² + r_m)` and
//!    `w_m = 1 + |h_mᴴ b_m|² / r_m`.
//!
//! The N x N solve in step 1 is carried out in the eigenbasis of `R_P`
//! through `(HᴴDH + Λ)⁻¹Hᴴ = Λ⁻¹Hᴴ(DHΛ⁻¹Hᴴ + I)⁻¹`, which leaves only an
//! M x M system to factor.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{sum_capacity, Downlink, Method, Modes, Multipliers, PrecoderSolution};
use crate::circuit::Constraints;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, RMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WmmseOptions {
    pub max_iter: usize,
    /// Stop once the relative change of the sum capacity falls below this.
    pub tol: f64,
}

impl Default for WmmseOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-8,
        }
    }
}

/// Diagonal receive filter, weights, and interference-plus-noise terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiveState {
    pub a: CVector,
    pub w: DVector<f64>,
    pub r: DVector<f64>,
}

impl ReceiveState {
    /// `A = W = I`, no interference yet.
    pub fn initial(m: usize, noise_variance: f64) -> Self {
        Self {
            a: CVector::from_element(m, c(1.0, 0.0)),
            w: DVector::from_element(m, 1.0),
            r: DVector::from_element(m, noise_variance),
        }
    }
}

/// Outcome of one WMMSE iteration.
#[derive(Debug, Clone)]
pub struct WmmseStep {
    pub b: CMatrix,
    pub alpha_radiated: f64,
    pub alpha_loss: f64,
    pub beta: f64,
    pub sinr: Vec<f64>,
    pub sum_capacity: f64,
    /// Receive state updated from `b`.
    pub state: ReceiveState,
}

pub struct WmmseSolver<'a> {
    downlink: &'a Downlink,
    constraints: Constraints,
    modes: Modes,
}

impl<'a> WmmseSolver<'a> {
    pub fn new(downlink: &'a Downlink, constraints: Constraints) -> Result<Self> {
        Ok(Self {
            downlink,
            constraints,
            modes: downlink.modes_for_regularizer()?,
        })
    }

    pub fn initial_state(&self) -> ReceiveState {
        ReceiveState::initial(self.downlink.dims().0, self.constraints.noise_variance)
    }

    /// One pass of the transmit update followed by the receive update.
    /// `iteration` is only used to label errors.
    pub fn step(&self, state: &ReceiveState, iteration: usize) -> Result<WmmseStep> {
        let Constraints {
            p_r,
            p_l,
            noise_variance,
        } = self.constraints;
        let r_l = self.downlink.r_l();
        let m = state.a.len();
        let modes = &self.modes;

        let d: Vec<f64> = state.a.iter().zip(state.w.iter()).map(|(a, w)| w * a.norm_sqr()).collect();
        let weight_trace: f64 = d.iter().sum();
        let alpha_radiated = noise_variance * weight_trace / p_r;
        let alpha_loss = if r_l > 0.0 { noise_variance * weight_trace / p_l } else { 0.0 };

        let reg: Vec<f64> = modes.values.iter().map(|&lam| alpha_radiated * lam + alpha_loss * r_l).collect();
        if reg.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::NonFinite { iteration });
        }

        // Λ⁻¹ H̃ᴴ
        let mut scaled_adj = modes.projected.adjoint();
        for (i, mut row) in scaled_adj.row_iter_mut().enumerate() {
            row /= c(reg[i], 0.0);
        }
        // D H̃ Λ⁻¹ H̃ᴴ + I
        let mut system = &modes.projected * &scaled_adj;
        for (i, mut row) in system.row_iter_mut().enumerate() {
            row *= c(d[i], 0.0);
        }
        for i in 0..m {
            system[(i, i)] += c(1.0, 0.0);
        }
        let rhs = CMatrix::from_diagonal(&state.a.zip_map(&state.w, |a, w| a.conj() * w));
        let inner = linalg::solve(&system, &rhs, "WMMSE transmit update")?;
        let coeffs = &scaled_adj * inner;

        let unscaled = modes.lift(&coeffs);
        // dense forms, so that β matches what callers evaluate
        let radiated = linalg::trace_quadratic(self.downlink.r_p(), &unscaled);
        if !(radiated.is_finite() && radiated > 0.0) {
            return Err(Error::NonFinite { iteration });
        }
        let beta_radiated = (p_r / radiated).sqrt();
        let beta = if r_l > 0.0 {
            let beta_loss = (p_l / (r_l * linalg::frobenius_sq(&unscaled))).sqrt();
            if beta_loss < beta_radiated {
                beta_loss
            } else {
                beta_radiated
            }
        } else {
            beta_radiated
        };
        if !beta.is_finite() {
            return Err(Error::NonFinite { iteration });
        }
        let coeffs = coeffs * c(beta, 0.0);
        let b = unscaled * c(beta, 0.0);

        // received amplitudes H B = H̃ C
        let gains = &modes.projected * &coeffs;
        let mut next = ReceiveState::initial(m, noise_variance);
        let mut sinr = Vec::with_capacity(m);
        for u in 0..m {
            let signal = gains[(u, u)];
            let interference: f64 = (0..m).filter(|&i| i != u).map(|i| gains[(u, i)].norm_sqr()).sum();
            let r = noise_variance + interference;
            let s2 = signal.norm_sqr();
            next.r[u] = r;
            next.a[u] = signal.conj() / (s2 + r);
            next.w[u] = 1.0 + s2 / r;
            sinr.push(s2 / r);
        }
        let capacity = sum_capacity(&sinr);
        if !capacity.is_finite() || next.a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { iteration });
        }
        Ok(WmmseStep {
            b,
            alpha_radiated,
            alpha_loss,
            beta,
            sinr,
            sum_capacity: capacity,
            state: next,
        })
    }

    /// Iterates until the relative sum-capacity change drops below
    /// `options.tol`, or `options.max_iter` passes have run (reported as
    /// `converged = false`).
    pub fn run(&self, options: &WmmseOptions) -> Result<(PrecoderSolution, ReceiveState)> {
        if options.max_iter == 0 {
            return Err(Error::InvalidParameter("WMMSE needs at least one iteration".into()));
        }
        let mut state = self.initial_state();
        let mut previous: Option<f64> = None;
        let mut last = None;
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=options.max_iter {
            let step = self.step(&state, it)?;
            iterations = it;
            state = step.state.clone();
            let done = previous.is_some_and(|p| (step.sum_capacity - p).abs() <= options.tol * p.abs());
            previous = Some(step.sum_capacity);
            last = Some(step);
            if done {
                converged = true;
                break;
            }
        }
        let step = last.expect("at least one iteration ran");
        let mut solution = self.downlink.solution(
            step.b,
            Method::Wmmse,
            Multipliers::Wmmse {
                alpha_radiated: step.alpha_radiated,
                alpha_loss: step.alpha_loss,
                beta: step.beta,
            },
        );
        solution.iterations = iterations;
        solution.converged = converged;
        Ok((solution, state))
    }
}

impl Downlink {
    pub fn wmmse(&self, constraints: &Constraints, options: &WmmseOptions) -> Result<(PrecoderSolution, ReceiveState)> {
        let (m, n) = self.dims();
        if self.h().iter().all(|z| *z == c(0.0, 0.0)) {
            let solution = self.solution(
                CMatrix::zeros(n, m),
                Method::Wmmse,
                Multipliers::Wmmse {
                    alpha_radiated: 0.0,
                    alpha_loss: 0.0,
                    beta: 0.0,
                },
            );
            return Ok((
                PrecoderSolution {
                    iterations: 0,
                    ..solution
                },
                ReceiveState::initial(m, constraints.noise_variance),
            ));
        }
        WmmseSolver::new(self, *constraints)?.run(options)
    }
}

/// WMMSE precoder for channel `h`, radiated-resistance form `r_p` and loss
/// resistance `r_l`.
pub fn wmmse(
    h: &CMatrix,
    r_p: &RMatrix,
    r_l: f64,
    constraints: &Constraints,
    options: &WmmseOptions,
) -> Result<(PrecoderSolution, ReceiveState)> {
    Downlink::new(h.clone(), r_p.clone(), r_l)?.wmmse(constraints, options)
}
