//! CLI failure classes and their process exit codes.

use std::fmt;

use kneadsweep::container::ContainerError;
use kneadsweep::integrate::IntegrateError;
use kneadsweep::models::ModelError;
use kneadsweep::render::RenderError;
use kneadsweep::sweep::SweepError;
use kneadsweep::symbolic::SymbolicError;
use kneadsweep::theory::TheoryError;

/// Exit codes: usage 1, numerical failure 2, I/O 3 (0 is success).
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Numerical(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical failure: {m}"),
            AppError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ModelError> for AppError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonFiniteParams | ModelError::NonPositiveParams { .. } => {
                AppError::Usage(e.to_string())
            }
            _ => AppError::Numerical(e.to_string()),
        }
    }
}

impl From<SweepError> for AppError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::BadConfig(_) => AppError::Usage(e.to_string()),
            _ => AppError::Numerical(e.to_string()),
        }
    }
}

impl From<TheoryError> for AppError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::BadCode(_) | TheoryError::BadParams(_) => AppError::Usage(e.to_string()),
            _ => AppError::Numerical(e.to_string()),
        }
    }
}

impl From<SymbolicError> for AppError {
    fn from(e: SymbolicError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<IntegrateError> for AppError {
    fn from(e: IntegrateError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<ContainerError> for AppError {
    fn from(e: ContainerError) -> Self {
        AppError::Io(e.to_string())
    }
}

impl From<RenderError> for AppError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::UnsupportedFormat(_) => AppError::Usage(e.to_string()),
            _ => AppError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
