use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The closed-form coupling is singular at zero separation.
    #[error("self-impedance requested; use self_impedance_real")]
    SelfImpedance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular system in {context} (condition estimate {condition:e})")]
    Singular {
        context: &'static str,
        condition: f64,
    },

    #[error("loss constraint vacuous for lossless antennas")]
    VacuousLossConstraint,

    #[error("dual-constraint root not bracketed")]
    RootNotBracketed,

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("scenario {scenario}: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with a description of the scenario that produced it.
    pub fn in_scenario(self, scenario: impl Into<String>) -> Self {
        Error::Scenario {
            scenario: scenario.into(),
            source: Box::new(self),
        }
    }

    /// True for failures of the numerical pipeline (as opposed to bad input
    /// or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. }
            | Error::RootNotBracketed
            | Error::NonFinite { .. }
            | Error::InvariantViolation(_)
            | Error::SelfImpedance => true,
            Error::Scenario { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
