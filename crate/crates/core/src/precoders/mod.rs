//! Transmit design under a radiated-power and an ohmic-loss budget.
//!
//! Both designs work in the eigenbasis of the radiated-resistance matrix
//! `R_P = Q Λ Qᵀ`. Every matrix that the solvers invert has the form
//! `a R_P + b I`, which is diagonal in that basis, so the superdirective
//! directions (tiny eigenvalues) can be handled explicitly instead of being
//! buried in an ill-conditioned dense solve:
//!
//! - with a loss resistance, `b > 0` and all modes are kept (eigenvalues
//!   below zero, which can only come from roundoff, are clamped to zero);
//! - without one, only the numerically radiating modes
//!   `λ > RADIATING_MODE_FLOOR · λ_max` are used. A current pattern in the
//!   discarded subspace radiates (and delivers) no power.

mod metrics;
mod mf;
mod wmmse;

pub use metrics::{sinr_per_user, sum_capacity, MetricsReport};
pub use mf::{mf_dual, mf_loss_constrained, mf_radiated_constrained};
pub use wmmse::{wmmse, ReceiveState, WmmseOptions, WmmseSolver, WmmseStep};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix, SymmetricSpectrum, ILL_CONDITIONED};

/// Relative eigenvalue floor below which a mode of `R_P` is treated as
/// non-radiating when no loss resistance regularizes it.
pub const RADIATING_MODE_FLOOR: f64 = 1.0 / ILL_CONDITIONED;

/// Relative slack when checking achieved powers against the budgets.
pub const CONSTRAINT_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MfLoss,
    MfRadiated,
    MfDual,
    Wmmse,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MfLoss => "mf-loss",
            Method::MfRadiated => "mf-radiated",
            Method::MfDual => "mf-dual",
            Method::Wmmse => "wmmse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multipliers {
    /// KKT multipliers of the radiated-power (`mu_radiated`) and loss
    /// (`mu_loss`) constraints, and their ratio when both are active.
    Mf {
        mu_radiated: f64,
        mu_loss: f64,
        alpha: Option<f64>,
    },
    /// Regularization weights and power scaling of the last WMMSE update.
    Wmmse {
        alpha_radiated: f64,
        alpha_loss: f64,
        beta: f64,
    },
}

#[derive(Debug, Clone)]
pub struct PrecoderSolution {
    /// N x M beamforming matrix; column m is the beam of user m.
    pub b: CMatrix,
    pub method: Method,
    pub multipliers: Multipliers,
    pub achieved_p_t: f64,
    pub achieved_p_l: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PrecoderSolution {
    fn new(b: CMatrix, method: Method, multipliers: Multipliers, r_p: &RMatrix, r_l: f64) -> Self {
        let achieved_p_t = linalg::trace_quadratic(r_p, &b);
        let achieved_p_l = r_l * linalg::frobenius_sq(&b);
        Self {
            b,
            method,
            multipliers,
            achieved_p_t,
            achieved_p_l,
            iterations: 1,
            converged: true,
        }
    }

    /// Whether both budgets hold up to [`CONSTRAINT_SLACK`].
    pub fn satisfies(&self, p_r: f64, p_l: f64) -> bool {
        self.achieved_p_t <= p_r * (1.0 + CONSTRAINT_SLACK) && self.achieved_p_l <= p_l * (1.0 + CONSTRAINT_SLACK)
    }
}

/// Kept modes of `R_P` together with the channel projected onto them.
#[derive(Debug, Clone)]
pub(crate) struct Modes {
    pub values: DVector<f64>,
    /// N x k, orthonormal columns.
    pub vectors: RMatrix,
    /// `H Q`, M x k.
    pub projected: CMatrix,
    /// Per-mode channel energy `Σ_m |(HQ)_mi|²`.
    pub energy: DVector<f64>,
}

impl Modes {
    /// `Q X` for coefficients `X` in the mode basis.
    pub fn lift(&self, coeffs: &CMatrix) -> CMatrix {
        linalg::real_times_complex(&self.vectors, coeffs)
    }
}

/// A downlink scenario: channel, radiated-resistance form, loss resistance,
/// and the eigendecomposition of `R_P` shared by all solvers.
#[derive(Debug, Clone)]
pub struct Downlink {
    h: CMatrix,
    r_p: RMatrix,
    r_l: f64,
    spectrum: SymmetricSpectrum,
}

impl Downlink {
    pub fn new(h: CMatrix, r_p: RMatrix, r_l: f64) -> Result<Self> {
        if r_p.nrows() != h.ncols() || !r_p.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "channel is {}x{} but R_P is {}x{}",
                h.nrows(),
                h.ncols(),
                r_p.nrows(),
                r_p.ncols()
            )));
        }
        if !(r_l.is_finite() && r_l >= 0.0) {
            return Err(Error::InvalidParameter(format!("loss resistance must be non-negative, got {r_l}")));
        }
        if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        let spectrum = SymmetricSpectrum::new(&r_p)?;
        if spectrum.max() <= 0.0 {
            return Err(Error::Singular {
                context: "radiated-resistance matrix",
                condition: f64::INFINITY,
            });
        }
        Ok(Self { h, r_p, r_l, spectrum })
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn r_p(&self) -> &RMatrix {
        &self.r_p
    }

    pub fn r_l(&self) -> f64 {
        self.r_l
    }

    pub fn spectrum(&self) -> &SymmetricSpectrum {
        &self.spectrum
    }

    /// Users × elements.
    pub fn dims(&self) -> (usize, usize) {
        (self.h.nrows(), self.h.ncols())
    }

    fn select(&self, keep: impl Fn(f64) -> Option<f64>) -> Modes {
        let idx: Vec<(usize, f64)> = self
            .spectrum
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| keep(v).map(|v| (i, v)))
            .collect();
        let values = DVector::from_iterator(idx.len(), idx.iter().map(|&(_, v)| v));
        let vectors = self.spectrum.vectors.select_columns(idx.iter().map(|&(i, _)| i).collect::<Vec<_>>().iter());
        let projected = linalg::complex_times_real(&self.h, &vectors);
        let energy = DVector::from_iterator(
            projected.ncols(),
            projected.column_iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum()),
        );
        Modes {
            values,
            vectors,
            projected,
            energy,
        }
    }

    /// All modes, negative (roundoff) eigenvalues clamped to zero.
    pub(crate) fn all_modes(&self) -> Modes {
        self.select(|v| Some(v.max(0.0)))
    }

    /// Modes above the radiating floor.
    pub(crate) fn radiating_modes(&self) -> Result<Modes> {
        let floor = RADIATING_MODE_FLOOR * self.spectrum.max();
        if self.spectrum.condition() > ILL_CONDITIONED {
            log::warn!(
                "superdirective regime ill-conditioning: R_P condition {:e}, dropping modes below {floor:e}",
                self.spectrum.condition()
            );
        }
        let modes = self.select(|v| (v > floor).then_some(v));
        if modes.values.is_empty() {
            return Err(Error::Singular {
                context: "radiated-resistance matrix",
                condition: self.spectrum.condition(),
            });
        }
        Ok(modes)
    }

    /// Modes used when the loss term may be absent.
    pub(crate) fn modes_for_regularizer(&self) -> Result<Modes> {
        if self.r_l > 0.0 {
            Ok(self.all_modes())
        } else {
            self.radiating_modes()
        }
    }

    pub(crate) fn solution(&self, b: CMatrix, method: Method, multipliers: Multipliers) -> PrecoderSolution {
        PrecoderSolution::new(b, method, multipliers, &self.r_p, self.r_l)
    }
}

/// Smallest eigenvalue of `R_P` relative to the largest must stay above
/// `-tolerance`; anything below indicates a non-passive network.
pub fn check_passivity(spectrum: &SymmetricSpectrum, tolerance: f64) -> Result<()> {
    let (lo, hi) = (spectrum.min(), spectrum.max());
    if lo < -tolerance * hi {
        return Err(Error::InvariantViolation(format!(
            "radiated-resistance matrix not passive: eigenvalues in [{lo:e}, {hi:e}]"
        )));
    }
    Ok(())
}
