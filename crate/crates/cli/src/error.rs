use std::path::PathBuf;

use layerwave::error::{AnalysisError, SolverError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {path}: {message}")]
    Schema { file: String, path: String, message: String },
    /// The input is well formed but does not suit the command.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Numeric(layerwave::Error),
    #[error("cannot write output: {0}")]
    Output(String),
    /// The reader of stdout went away; not an error for the user.
    #[error("output closed")]
    Closed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Closed => 0,
            CliError::Numeric(_) | CliError::Output(_) => 2,
            _ => 1,
        }
    }
}

impl From<layerwave::Error> for CliError {
    fn from(e: layerwave::Error) -> Self {
        use layerwave::Error as E;
        match e {
            E::Solver(SolverError::MissingDerivatives) | E::Analysis(AnalysisError::Solver(SolverError::MissingDerivatives)) => {
                CliError::Input("MissingDerivatives: this command needs dsamples and ddsamples in the profile".into())
            }
            E::Analysis(
                a @ (AnalysisError::MissingWell
                | AnalysisError::NotPiecewiseConstant
                | AnalysisError::BandIntersectsWell { .. }
                | AnalysisError::ModeBelowThreshold { .. }
                | AnalysisError::NotMonotone
                | AnalysisError::InvalidOrdering
                | AnalysisError::WrongProfileShape
                | AnalysisError::BadBand { .. }),
            ) => CliError::Input(a.to_string()),
            E::Profile(p) | E::Analysis(AnalysisError::Profile(p)) => CliError::Input(p.to_string()),
            E::CrossSection(c) => CliError::Input(c.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        layerwave::Error::from(e).into()
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        layerwave::Error::from(e).into()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            other => CliError::Output(format!("{other:?}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::Closed
        } else {
            CliError::Output(e.to_string())
        }
    }
}
