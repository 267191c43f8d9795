use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad or missing configuration; exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// A contract violation or failed invariant while running; exit code 3.
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<perminv::Error> for HarnessError {
    fn from(e: perminv::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

pub type HarnessResult<T> = Result<T, HarnessError>;

/// Fails with a config error naming `field` unless `cond` holds.
pub fn require(cond: bool, field: &str, msg: impl std::fmt::Display) -> HarnessResult<()> {
    if cond {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("{field}: {msg}")))
    }
}
