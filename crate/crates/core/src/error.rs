use thiserror::Error;

use crate::behavior::Scenario;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("scenario mismatch: {left} vs {right}")]
    ScenarioMismatch { left: Scenario, right: Scenario },

    #[error("setting pair (s={s}, t={t}) has zero total count")]
    ZeroTotal { s: usize, t: usize },

    #[error("setting s={s} never occurs under these parameters")]
    ZeroSettingProbability { s: usize },

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid quantum object: {0}")]
    InvalidQuantum(String),

    #[error("all {restarts} restarts aborted with a non-finite objective")]
    AllRestartsAborted { restarts: usize },

    #[error("invalid report: {0}")]
    InvalidReport(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {source_name} at row {row}: {message}")]
    Parse {
        source_name: String,
        row: usize,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::InvalidScenario(_) => "invalid_scenario",
            Self::ScenarioMismatch { .. } => "scenario_mismatch",
            Self::ZeroTotal { .. } => "zero_total",
            Self::ZeroSettingProbability { .. } => "zero_setting_probability",
            Self::Dimension { .. } => "dimension",
            Self::InvalidBehavior(_) => "invalid_behavior",
            Self::InvalidParams(_) => "invalid_params",
            Self::InvalidQuantum(_) => "invalid_quantum",
            Self::AllRestartsAborted { .. } => "all_restarts_aborted",
            Self::InvalidReport(_) => "invalid_report",
            Self::Config(_) => "config",
            Self::Parse { .. } => "parse",
            Self::Json(_) => "json",
            Self::Io(_) => "io",
        }
    }
}
