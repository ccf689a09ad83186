use thiserror::Error;

/// A failed command, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(espm::Error),
    #[error("simulation failed: {0}")]
    Simulation(espm::Error),
    #[error("dataset error: {0}")]
    Dataset(espm::Error),
    #[error("optimization failed: {0}")]
    Optimization(espm::Error),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("output verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Dataset(_) => 4,
            CliError::Optimization(_) => 5,
            CliError::Output(_) | CliError::Verify(_) => 1,
        }
    }

    /// Sorts an error raised while running a model by what caused it.
    pub fn from_run(e: espm::Error) -> Self {
        use espm::Error as E;
        match e.root() {
            E::Invariant { .. } | E::Parse { .. } | E::UndefinedRegime(_) => CliError::Config(e),
            E::Dataset(_) => CliError::Dataset(e),
            E::Optimization(_) => CliError::Optimization(e),
            E::Io { .. } => CliError::Output(e.to_string()),
            _ => CliError::Simulation(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
