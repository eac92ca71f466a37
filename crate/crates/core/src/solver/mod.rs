//! Stationary degree distributions of NPA graphs.
//!
//! [`solve_vdd`] runs the vertex degree recurrence together with the
//! mean-weight fixed point; [`solve_arc_dd`] fills the arc degree matrix row
//! by row; [`symmetrize`] turns arcs into undirected edges. The [`mixture`]
//! functions combine component distributions of composite graphs.

mod arc;
pub mod mixture;
mod vdd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use arc::{solve_arc_dd, symmetrize, ArcRecurrence};
pub use mixture::{complement_mean, complement_vdd, edge_shares, mix_edd, mix_vdd, MixtureError};
pub use vdd::{solve_vdd, TailEstimate, VddSolution};

use crate::model::{EdgeDegreeMatrix, NpaModelSpec, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Largest degree of the vertex distribution.
    pub k_max: usize,
    /// Largest degree of the edge matrix.
    pub u_max: usize,
    pub fp_tolerance: f64,
    pub fp_max_iter: usize,
    pub arc_recurrence: ArcRecurrence,
    /// Largest acceptable vertex-distribution mass above `k_max`.
    pub max_vdd_truncation: f64,
    /// Largest acceptable arc-matrix mass outside `[g, u_max]^2`; `None`
    /// skips the check (the window cells never depend on cells outside it).
    pub max_edd_deficit: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            k_max: 10_000,
            u_max: 300,
            fp_tolerance: 1e-10,
            fp_max_iter: 10_000,
            arc_recurrence: ArcRecurrence::MeanWeight,
            max_vdd_truncation: 1e-6,
            max_edd_deficit: Some(1e-3),
        }
    }
}

impl SolverOptions {
    pub(crate) fn check(&self) -> Result<(), SolverError> {
        if self.k_max < self.u_max {
            return Err(SolverError::BadOptions(format!(
                "k_max {} is below u_max {}",
                self.k_max, self.u_max
            )));
        }
        if self.fp_tolerance.is_nan() || self.fp_tolerance <= 0.0 || self.fp_max_iter == 0 {
            return Err(SolverError::BadOptions("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    InvalidModel(#[from] ValidationReport),
    #[error("invalid solver options: {0}")]
    BadOptions(String),
    #[error("mean-weight fixed point not found: {reason}")]
    NoConvergence { reason: String },
    #[error("{deficit:e} of the probability mass lies beyond degree {extent}; raise the truncation")]
    TruncationTooSevere { deficit: f64, extent: usize },
    #[error("stored probabilities sum to {total}, more than 1")]
    MassExcess { total: f64 },
    #[error("vertex distribution stops at degree {available}, edge matrix needs {needed}")]
    VddMismatch { needed: usize, available: usize },
    #[error("zero denominator at cell ({l}, {k})")]
    NonFinite { l: usize, k: usize },
}

/// Full analytic pipeline: vertex distribution, then the symmetric edge
/// matrix on `[g, u_max]^2`.
pub fn solve_edd(
    model: &NpaModelSpec,
    opts: &SolverOptions,
) -> Result<(VddSolution, EdgeDegreeMatrix), SolverError> {
    let vdd = solve_vdd(model, opts)?;
    let arcs = solve_arc_dd(model, &vdd, opts)?;
    Ok((vdd, symmetrize(&arcs)))
}
