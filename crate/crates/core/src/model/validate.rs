use std::fmt;

use thiserror::Error;

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("increment probabilities sum to {sum}, not 1")]
    NonNormalized { sum: f64 },
    #[error("increment distribution has no positive probability")]
    EmptySupport,
    #[error("probability r_{degree} = {value} is negative or not finite")]
    NegativeProbability { degree: usize, value: f64 },
    #[error("weight f_{degree} = {weight} is not positive inside the support")]
    WeightSignViolation { degree: usize, weight: f64 },
    #[error("weight support [{min}, {max}] is empty")]
    SupportBounds { min: usize, max: usize },
    #[error("increments start at degree {increments} but weights start at degree {weights}")]
    SupportMismatch { increments: usize, weights: usize },
    #[error("seed graph has zero total weight")]
    SeedWeightZero,
    #[error("seed graph is malformed: {reason}")]
    SeedMalformed { reason: String },
    #[error("AER vertex count {n1} is below 2")]
    AerTooSmall { n1: usize },
    #[error("AER mean degree {mean_degree} gives base probability {p_a} outside (0, 1]")]
    AerProbability { mean_degree: f64, p_a: f64 },
    #[error("composite has no components")]
    EmptyComposite,
    #[error("component fractions sum to {sum}, not 1")]
    RhoNotNormalized { sum: f64 },
    #[error("component {index} has fraction {rho} outside (0, 1]")]
    RhoOutOfRange { index: usize, rho: f64 },
    #[error("component {index} gets {vertices} vertices, fewer than 2")]
    ComponentTooSmall { index: usize, vertices: usize },
    #[error("component {index}: {inner}")]
    Component { index: usize, inner: Box<Violation> },
}

/// Every invariant a spec violates.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invariant violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

pub trait Validate {
    fn violations(&self) -> Vec<Violation>;

    fn check(&self) -> Result<(), ValidationReport> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }
}

/// Returns the spec unchanged when every invariant holds.
pub fn validate_model<S: Validate>(spec: S) -> Result<S, ValidationReport> {
    spec.check().map(|()| spec)
}
