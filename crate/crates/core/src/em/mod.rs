//! Coupling between z-oriented infinitesimal dipoles.
//!
//! Every element in the model (surface element or user antenna) is a short
//! dipole of length `l` carrying a uniform current along z. The mutual
//! impedance between two such dipoles depends only on their separation
//! vector and is given in closed form by [`mutual_impedance`]. The dipole
//! length is fixed so that the radiation resistance is exactly one ohm.

mod geometry;

pub use geometry::{linear_array, planar_array, ue_line, Geometry};

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Free-space wave impedance in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730313668;

/// Wavelength, wavenumber and dipole length of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    wavelength: f64,
    wavenumber: f64,
    dipole_length: f64,
}

impl PhysicalConfig {
    /// Builds the configuration with the dipole length that normalizes the
    /// radiation resistance to 1 ohm, `l = sqrt(3λ / (kη))`.
    pub fn new(wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive and finite, got {wavelength}"
            )));
        }
        let wavenumber = 2.0 * PI / wavelength;
        let dipole_length = (3.0 * wavelength / (wavenumber * FREE_SPACE_IMPEDANCE)).sqrt();
        Ok(Self {
            wavelength,
            wavenumber,
            dipole_length,
        })
    }

    /// Same wavelength, explicit dipole length. The radiation resistance is
    /// then no longer normalized.
    pub fn with_dipole_length(self, dipole_length: f64) -> Result<Self> {
        if !(dipole_length.is_finite() && dipole_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dipole length must be positive and finite, got {dipole_length}"
            )));
        }
        Ok(Self {
            dipole_length,
            ..self
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn dipole_length(&self) -> f64 {
        self.dipole_length
    }

    pub fn eta(&self) -> f64 {
        FREE_SPACE_IMPEDANCE
    }
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self::new(1.0).expect("unit wavelength is valid")
    }
}

/// Cartesian position or separation vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Sub for Position {
    type Output = Position;
    fn sub(self, rhs: Position) -> Position {
        Position::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Add for Position {
    type Output = Position;
    fn add(self, rhs: Position) -> Position {
        Position::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Neg for Position {
    type Output = Position;
    fn neg(self) -> Position {
        Position::new(-self.x, -self.y, -self.z)
    }
}

/// Radiation resistance of a single element, `k l² η / (3λ)`.
pub fn self_impedance_real(phys: &PhysicalConfig) -> f64 {
    let l = phys.dipole_length;
    phys.wavenumber * l * l * FREE_SPACE_IMPEDANCE / (3.0 * phys.wavelength)
}

/// Below this electrical distance `kr` the combination `sin x - x cos x` is
/// summed as a series instead of evaluated directly.
const SERIES_CUTOFF: f64 = 0.5;

/// `(sin x - x cos x) / x²`, accurate for small `x`.
fn sin_minus_x_cos_over_x2(x: f64) -> f64 {
    if x >= SERIES_CUTOFF {
        return (x.sin() - x * x.cos()) / (x * x);
    }
    // sum_{n>=1} (-1)^(n+1) 2n x^(2n-1) / (2n+1)!
    let x2 = x * x;
    let mut power = x; // x^(2n-1)
    let mut factorial = 6.0; // (2n+1)!
    let mut sum = 0.0;
    for n in 1..=12u32 {
        let nf = n as f64;
        let term = 2.0 * nf * power / factorial;
        sum += if n % 2 == 1 { term } else { -term };
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        power *= x2;
        factorial *= (2.0 * nf + 2.0) * (2.0 * nf + 3.0);
    }
    sum
}

/// Mutual impedance between two parallel z-dipoles separated by `r`:
///
/// ```text
/// z(r) = i l²η e^{-ikr} / (2λr) · (1 - z²/r² - i/(kr) - 1/(kr)² + 3i z²/(k r³) + 3z²/(k² r⁴))
/// ```
///
/// The expression is evaluated after splitting `i e^{-ikr}` into `sin + i cos`
/// and grouping the terms that cancel as `r → 0`, so the real part stays
/// accurate down to separations of `1e-6 λ` and below.
pub fn mutual_impedance(r: Position, phys: &PhysicalConfig) -> Result<C64> {
    let dist = r.norm();
    if dist == 0.0 {
        return Err(Error::SelfImpedance);
    }
    if !dist.is_finite() {
        return Err(Error::InvalidGeometry(format!("non-finite separation {r:?}")));
    }
    let k = phys.wavenumber;
    let l = phys.dipole_length;
    let x = k * dist;
    let cz = (r.z / dist).powi(2);
    let (sin, cos) = x.sin_cos();
    let s = sin_minus_x_cos_over_x2(x);
    let inv_x = 1.0 / x;
    let inv_x2 = inv_x * inv_x;

    // i e^{-ix} (1 - i/x - 1/x²) and i e^{-ix} (-1 + 3i/x + 3/x²)
    let broadside = c(sin - s, cos * (1.0 - inv_x2) - sin * inv_x);
    let axial = c(3.0 * s - sin, cos * (3.0 * inv_x2 - 1.0) + 3.0 * sin * inv_x);

    let amplitude = l * l * FREE_SPACE_IMPEDANCE / (2.0 * phys.wavelength * dist);
    Ok((broadside + axial * cz) * amplitude)
}
