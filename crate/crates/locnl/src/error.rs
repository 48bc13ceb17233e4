use locnl_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("invalid configuration at \"{path}\": {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(#[from] CoreError),
    #[error("runtime invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// 1 for configuration problems, 2 for numerical failures, 3 for violated invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(e) => match e {
                CoreError::InvalidArgument(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::InvalidResolution { .. }
                | CoreError::InvalidPartition(_)
                | CoreError::InvalidKernel(_) => 1,
                _ => 2,
            },
            CliError::Invariant(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cfg = CliError::Config(ConfigError::Parse("x".into()));
        assert_eq!(cfg.exit_code(), 1);
        assert_eq!(CliError::Numerical(CoreError::InvalidResolution { n: 1 }).exit_code(), 1);
        assert_eq!(CliError::Numerical(CoreError::SingularSystem("m")).exit_code(), 2);
        assert_eq!(CliError::Numerical(CoreError::EigFailure).exit_code(), 2);
        assert_eq!(CliError::Numerical(CoreError::HypothesisViolation { dist: 2.0, radius: 0.5 }).exit_code(), 2);
        assert_eq!(CliError::Invariant("drift".into()).exit_code(), 3);
    }
}
