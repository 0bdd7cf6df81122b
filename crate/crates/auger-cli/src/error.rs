//! Error type shared by all subcommands, with the exit-code policy:
//! 1 for configuration/validation problems, 2 for numerical failures.

use auger_core::kinetics::KineticsError;
use auger_core::kv::KvError;
use auger_core::model::ModelError;
use auger_core::steady::SteadyStateError;
use auger_core::table::TableError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] KvError),
    #[error("config key `{key}`: {reason}")]
    BadConfig { key: &'static str, reason: String },
    #[error("parameters: {0}")]
    Model(#[from] ModelError),
    #[error("sweep point {axis} = {value}: {source}")]
    SweepPoint {
        axis: &'static str,
        value: f64,
        source: ModelError,
    },
    #[error("integration: {0}")]
    Kinetics(#[from] KineticsError),
    #[error("steady state: {0}")]
    Steady(#[from] SteadyStateError),
    #[error("table: {0}")]
    Table(#[from] TableError),
    #[error("plot has no drawable data")]
    EmptyPlot,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 = validation error, 2 = numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Kinetics(KineticsError::StepLimitExceeded { .. })
            | CliError::Kinetics(KineticsError::NonFiniteState { .. })
            | CliError::Steady(SteadyStateError::Kinetics(
                KineticsError::StepLimitExceeded { .. },
            ))
            | CliError::Steady(SteadyStateError::Kinetics(
                KineticsError::NonFiniteState { .. },
            )) => 2,
            _ => 1,
        }
    }
}
