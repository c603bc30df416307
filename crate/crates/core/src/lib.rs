//! Physically consistent multiuser MIMO model of a large intelligent surface.
//!
//! The surface is a grid of mutually coupled z-oriented infinitesimal
//! dipoles. From the multiport impedance description of surface and users
//! the crate derives the channel matrix and the radiated-resistance form,
//! and designs matched-filter and weighted-MMSE precoders under a joint
//! radiated-power and ohmic-loss budget.
//!
//! - [`em`]: closed-form dipole coupling and geometry builders.
//! - [`circuit`]: impedance assembly, channel, and power bookkeeping.
//! - [`precoders`]: MF and WMMSE transmit design, SINR, sum capacity.
//! - [`experiment`]: scenario files, sweeps, and CSV output.

pub mod circuit;
pub mod em;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod precoders;

pub use circuit::{ChannelModel, Constraints, ImpedanceSystem};
pub use em::{Geometry, PhysicalConfig, Position};
pub use error::{Error, Result};
pub use precoders::{MetricsReport, PrecoderSolution, ReceiveState, WmmseOptions};
