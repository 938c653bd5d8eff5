//! Error classes of the command-line tool and their exit codes.

use mukai_core::construct::ConstructError;
use mukai_core::isometry::{IsometryError, NormalizeError, ReduceError};
use mukai_core::stability::StabilityError;
use mukai_core::LatticeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input is well-formed but not acceptable (shape, symmetry, cone ...).
    Validation,
    /// A mathematical hypothesis of the operation fails, e.g. β ≤ μ.
    Hypothesis,
    UnknownSubcommand,
    MalformedJson,
    /// `selftest` found a broken invariant.
    SelftestFailed,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Hypothesis => 3,
            ErrorKind::UnknownSubcommand => 64,
            ErrorKind::MalformedJson => 65,
            ErrorKind::SelftestFailed => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Hypothesis => "hypothesis",
            ErrorKind::UnknownSubcommand => "unknown-subcommand",
            ErrorKind::MalformedJson => "malformed-json",
            ErrorKind::SelftestFailed => "selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn hypothesis(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Hypothesis, message)
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::MalformedJson, message)
    }

    /// The single-line JSON diagnostic written to stderr.
    pub fn to_json_line(&self) -> String {
        let v = serde_json::json!({
            "error": self.message,
            "exit": self.kind.exit_code(),
            "kind": self.kind.name(),
        });
        v.to_string()
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<IsometryError> for CliError {
    fn from(e: IsometryError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::Lattice(l) => l.into(),
            other => CliError::hypothesis(other.to_string()),
        }
    }
}

impl From<NormalizeError> for CliError {
    fn from(e: NormalizeError) -> Self {
        match e {
            NormalizeError::Lattice(l) => l.into(),
            other => CliError::hypothesis(other.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Lattice(l) => l.into(),
            StabilityError::NoTorsionFreePart | StabilityError::SlopeInsideBracket(_) => {
                CliError::hypothesis(e.to_string())
            }
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Lattice(l) => l.into(),
            ConstructError::SlopeNotBelowBeta { .. }
            | ConstructError::NonPositiveDegree(_)
            | ConstructError::RankPrimeBelowRank { .. } => CliError::hypothesis(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}
