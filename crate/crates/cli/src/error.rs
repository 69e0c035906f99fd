use lzlab_core::cyclic::CyclicError;
use lzlab_core::engine::EngineError;
use lzlab_core::padic::PAdicError;
use lzlab_core::real::RealError;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Malformed or out-of-range input.
    Input = 2,
    /// Well-formed input outside the mathematical domain of the command.
    Domain = 3,
    /// A checked property did not hold.
    Property = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Input,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Domain,
            message: message.into(),
        }
    }

    pub fn property(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Property,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        self.kind as u8
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        use EngineError::*;
        let message = e.to_string();
        match e {
            Parse(_) | EpsilonOutOfRange(_) | NotOddPrime(_) | NotPrime(_) | InvalidLevel(_)
            | FieldMismatch(_) => CliError::input(message),
            Cyclic(c) => c.into(),
            PAdic(p) => p.into(),
            JointMismatch { .. } | NotMultiplicative { .. } => CliError::property(message),
            ZeroCoefficient(_)
            | NonUnitCoefficient { .. }
            | EvenModulus(_)
            | VanishingCF { .. }
            | NotEqualRatio => CliError::domain(message),
        }
    }
}

impl From<CyclicError> for CliError {
    fn from(e: CyclicError) -> Self {
        match e {
            CyclicError::ZeroCoefficient { .. } => CliError::domain(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<PAdicError> for CliError {
    fn from(e: PAdicError) -> Self {
        match e {
            PAdicError::Parse(_) | PAdicError::NotPrime(_) | PAdicError::PrimeMismatch(..) => {
                CliError::input(e.to_string())
            }
            _ => CliError::domain(e.to_string()),
        }
    }
}

impl From<RealError> for CliError {
    fn from(e: RealError) -> Self {
        match e {
            RealError::InvalidGrid(_)
            | RealError::InvalidModel(_)
            | RealError::StepMismatch { .. } => CliError::input(e.to_string()),
            _ => CliError::domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::input(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("json: {e}"))
    }
}
