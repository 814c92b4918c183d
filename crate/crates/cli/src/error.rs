use resurgence_core::Error;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit code 1: unreadable or invalid input.
    #[error("{0}")]
    Input(String),
    /// Exit code 2: the computation ran but a validated invariant failed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        use Error::*;
        let msg = e.to_string();
        match e {
            NonIntegerWinding(_)
            | RadiusCollapse { .. }
            | TailFailure { .. }
            | VanishingDenominator { .. }
            | Segmentation(_)
            | InvalidHomotopy(_)
            | FiberTooCoarse { .. }
            | QuadratureNonConvergence { .. } => CliError::Failed(msg),
            EmptyOmega
            | NoNonzeroPoint
            | MalformedGenerator(_)
            | TooManyPoints(_)
            | InvalidArgument(_)
            | OutOfDomain { .. }
            | Discontinuous { .. }
            | NotClosed
            | PointOnCurve
            | VanishingDerivative { .. }
            | PathTouchesOmega { .. }
            | CenterMismatch
            | NotAtOrigin
            | OutsideSafeDisk { .. }
            | ShiftTooLarge { .. }
            | NotOmegaContinuable { .. }
            | SingularCenter(_)
            | EpsilonTooLarge { .. }
            | Precondition(_)
            | ClearanceFloor(_)
            | NotAdditionStable { .. } => CliError::Input(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
