use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Solver(#[from] eigopt::Error),
}

impl CliError {
    /// `2` for bad input of any kind, `1` for failures inside a solver.
    pub fn exit_code(&self) -> i32 {
        use eigopt::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Invalid(_) => 2,
            CliError::Solver(
                E::InvalidArgument(_)
                | E::DimensionMismatch(_)
                | E::UnstableSystem { .. }
                | E::UnsupportedDimension(_)
                | E::NotHermitian { .. }
                | E::IndexOutOfRange { .. },
            ) => 2,
            CliError::Solver(_) => 1,
        }
    }
}
