use npa_core::calibrate::CalibrationError;
use npa_core::growth::GrowthError;
use npa_core::solver::SolverError;

/// Command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input (exit 2).
    Input(anyhow::Error),
    /// A computation failed (exit 3).
    Compute(anyhow::Error),
    /// Optimization stopped short; best-so-far results are written (exit 4).
    Incomplete(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Compute(_) => 3,
            Failure::Incomplete(_) => 4,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Compute(e) | Failure::Incomplete(e) => e,
        }
    }

    pub fn input(e: impl Into<anyhow::Error>) -> Self {
        Failure::Input(e.into())
    }

    pub fn compute(e: impl Into<anyhow::Error>) -> Self {
        Failure::Compute(e.into())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidModel(_) | SolverError::BadOptions(_) => Failure::input(e),
            _ => Failure::compute(e),
        }
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::InvalidModel(_) | GrowthError::TooFewVertices { .. } | GrowthError::InvalidBridge { .. } => {
                Failure::input(e)
            }
            _ => Failure::compute(e),
        }
    }
}

impl From<CalibrationError> for Failure {
    fn from(e: CalibrationError) -> Self {
        match e {
            CalibrationError::InvalidTarget(_) | CalibrationError::WindowExceedsMatrix { .. } => Failure::input(e),
            CalibrationError::Solver(inner) => inner.into(),
            CalibrationError::Growth(inner) => inner.into(),
            CalibrationError::AllRhoInfeasible | CalibrationError::NoFiniteObjective => Failure::Incomplete(e.into()),
            _ => Failure::compute(e),
        }
    }
}
