//! Scenario files, parameter sweeps, and CSV output.

pub mod config;
pub mod csv;
pub mod recipes;
pub mod run;
pub mod sweep;

pub use config::{ArraySpec, PrecoderSpec, ScenarioConfig, Toggles, UeSpec};
pub use csv::{emit_csv, write_csv};
pub use run::{evaluate, run, Evaluation, ResultRow};
pub use sweep::{sweep, sweep_all, SweepParam, SweepSpec};
