//! Fitting NPA and composite models to a target vertex distribution and
//! edge matrix.
//!
//! The objective is `vdd_weight * TV(Q, Q_target) + r(Theta, Theta_target)`
//! where `r` is the Euclidean distance over the window `[g, u]^2`
//! ([`edd_distance`]).

mod composite;
mod nelder_mead;
mod presets;
mod single;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use composite::{
    calibrate_composite, estimate_aer, evaluate_composite, AerEstimate, AerVariant, CompositeDiagnostics,
    FirstComponent, RhoEvaluation,
};
pub use presets::{
    brightkite_complement, gowalla_increments, preset_brightkite, preset_gowalla, test_models, BRIGHTKITE_EDGES,
    BRIGHTKITE_MEAN_INCREMENT, BRIGHTKITE_NODES, BRIGHTKITE_RHO, GOWALLA_AER_MEAN_DEGREE, GOWALLA_RHO,
};
pub use single::{calibrate_single, evaluate_single, Evaluation};

use crate::empirical::{empirical_edd, empirical_vdd, smooth_vdd, MeasureError, SmoothError, Smoothing};
use crate::growth::GrowthError;
use crate::model::{DegreeDistribution, EdgeDegreeMatrix, Graph, NpaModelSpec};
use crate::model::CompositeSpec;
use crate::solver::{MixtureError, SolverError, SolverOptions};

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("window [{min}, {u}] exceeds a matrix that ends at {extent}")]
    WindowExceedsMatrix { min: usize, u: usize, extent: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error("no fraction on the grid leaves a feasible complement")]
    AllRhoInfeasible,
    #[error("every candidate failed to solve")]
    NoFiniteObjective,
}

/// Where a target came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceMeta {
    pub name: String,
    pub smoothing: Smoothing,
}

/// Degree distributions a model is fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub vdd: DegreeDistribution,
    /// Edge matrix (kind edge) covering at least `[g, u]^2`.
    pub edd: EdgeDegreeMatrix,
    /// Upper end of the comparison window.
    pub u: usize,
    pub source_meta: SourceMeta,
}

impl CalibrationTarget {
    pub fn new(vdd: DegreeDistribution, edd: EdgeDegreeMatrix, u: usize, source_meta: SourceMeta) -> Result<Self, CalibrationError> {
        let target = Self { vdd, edd, u, source_meta };
        target.check()?;
        Ok(target)
    }

    /// Builds a target from an observed graph. `u` defaults to the
    /// [`select_u`] choice at 95% of the edge mass.
    pub fn from_graph(graph: &Graph, u: Option<usize>, smoothing: Smoothing, name: &str) -> Result<Self, CalibrationError> {
        let vdd = smooth_vdd(&empirical_vdd(graph)?, smoothing)?;
        let extent = vdd.max_degree().min(2_000);
        let edd = empirical_edd(graph, extent)?;
        let u = u.unwrap_or_else(|| select_u(&edd, 0.95)).max(vdd.min_degree() + 1);
        let meta = SourceMeta {
            name: name.to_string(),
            smoothing,
        };
        Self::new(vdd, edd, u, meta)
    }

    pub fn check(&self) -> Result<(), CalibrationError> {
        if self.u <= self.vdd.min_degree() {
            return Err(CalibrationError::InvalidTarget(format!(
                "u = {} must exceed the smallest degree {}",
                self.u,
                self.vdd.min_degree()
            )));
        }
        if self.edd.extent() < self.u {
            return Err(CalibrationError::WindowExceedsMatrix {
                min: self.min_degree(),
                u: self.u,
                extent: self.edd.extent(),
            });
        }
        Ok(())
    }

    pub fn min_degree(&self) -> usize {
        self.vdd.min_degree()
    }

    /// Mean increment implied by the target, half its mean degree.
    pub fn mean_increment(&self) -> f64 {
        self.vdd.mean() / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// `f_k = k` only.
    Linear,
    /// `f_k = k` first; `f_k = k^alpha` with a fitted `alpha` if that misses
    /// the tolerance.
    TableFree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrateOptions {
    /// Increments are fitted on `[g, support]`.
    pub support: usize,
    /// Weight of the vertex-distribution term.
    pub vdd_weight: f64,
    /// Objective value counted as a good enough fit.
    pub tolerance: f64,
    pub weight_mode: WeightMode,
    /// Objective evaluations per optimizer restart.
    pub max_evaluations: usize,
    /// Optimizer iterations without improvement before giving up.
    pub patience: usize,
    pub solver: SolverOptions,
    pub rho_step: f64,
    /// The grid around the best fraction is refined by this factor.
    pub rho_refine: usize,
    pub outer_iterations: usize,
    /// Starting fraction of composite calibration; defaults to the
    /// feasible grid point nearest 0.5.
    pub initial_rho: Option<f64>,
    /// Evaluations of the warm-started complement refit at each grid point.
    pub rho_search_evaluations: usize,
    /// Line-search the fraction; when false only the complement is fitted,
    /// at the starting fraction.
    pub search_rho: bool,
    /// Vertex count written into composite results.
    pub total_n: usize,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        Self {
            support: 50,
            vdd_weight: 1.0,
            tolerance: 1e-3,
            weight_mode: WeightMode::TableFree,
            max_evaluations: 4_000,
            patience: 400,
            solver: SolverOptions {
                max_edd_deficit: None,
                ..SolverOptions::default()
            },
            rho_step: 0.025,
            rho_refine: 5,
            outer_iterations: 2,
            initial_rho: None,
            rho_search_evaluations: 300,
            search_rho: true,
            total_n: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationStatus {
    Converged,
    Stalled,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub evaluations: usize,
    pub iterations: usize,
    pub restarts: usize,
    /// 1 for linear weights, 2 when a weight exponent was fitted.
    pub phase: u8,
    /// Best objective after each iteration of the winning restart.
    pub best_per_iteration: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CalibratedModel {
    Npa(NpaModelSpec),
    Composite(CompositeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub model: CalibratedModel,
    /// Window distance between the model's and the target's edge matrices.
    pub distance: f64,
    pub vdd_tv_error: f64,
    pub objective: f64,
    pub status: CalibrationStatus,
    pub iterations: OptimizerTrace,
    pub composite: Option<CompositeDiagnostics>,
}

/// `(sum_{l,k in [g,u]} (a_lk - b_lk)^2)^(1/2)`.
pub fn edd_distance(
    theta: &EdgeDegreeMatrix,
    target: &EdgeDegreeMatrix,
    g: usize,
    u: usize,
) -> Result<f64, CalibrationError> {
    for m in [theta, target] {
        if m.extent() < u {
            return Err(CalibrationError::WindowExceedsMatrix {
                min: g,
                u,
                extent: m.extent(),
            });
        }
    }
    let mut sum = 0.0;
    for l in g..=u {
        for k in g..=u {
            let d = theta.get(l, k) - target.get(l, k);
            sum += d * d;
        }
    }
    Ok(sum.sqrt())
}

/// Smallest `u` whose window `[g, u]^2` holds at least `mass_fraction` of
/// the matrix's total mass; the matrix extent if none does.
pub fn select_u(edd: &EdgeDegreeMatrix, mass_fraction: f64) -> usize {
    let g = edd.min_degree();
    let total = edd.stored_mass() + edd.truncation_mass();
    let need = mass_fraction * total;
    let mut window = 0.0;
    for u in g..=edd.extent() {
        // Grow the window by row u and column u.
        window += edd.get(u, u);
        for j in g..u {
            window += edd.get(u, j) + edd.get(j, u);
        }
        if window >= need * (1.0 - 1e-12) {
            return u;
        }
    }
    edd.extent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MatrixKind;
    use proptest::prelude::*;

    fn uniform(n: usize) -> EdgeDegreeMatrix {
        let mut m = EdgeDegreeMatrix::zeros(1, n, MatrixKind::Edge);
        for l in 1..=n {
            for k in 1..=n {
                m.set(l, k, 1.0 / (n * n) as f64);
            }
        }
        m
    }

    #[test]
    fn distance_basics() {
        let a = uniform(4);
        assert_eq!(edd_distance(&a, &a, 1, 4).unwrap(), 0.0);
        let mut b = a.clone();
        b.set(2, 3, a.get(2, 3) + 0.1);
        assert!((edd_distance(&a, &b, 1, 4).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(
            edd_distance(&a, &b, 1, 5),
            Err(CalibrationError::WindowExceedsMatrix { .. })
        ));
    }

    #[test]
    fn window_selection() {
        let mut point = EdgeDegreeMatrix::zeros(1, 6, MatrixKind::Edge);
        point.set(2, 2, 1.0);
        assert_eq!(select_u(&point, 0.95), 2);
        assert_eq!(select_u(&uniform(10), 1.0), 10);
        assert_eq!(select_u(&uniform(10), 0.5), 8);
    }

    proptest! {
        #[test]
        fn distance_is_symmetric(cells in prop::collection::vec((1usize..=5, 1usize..=5, 0.0f64..0.3), 0..20)) {
            let a = uniform(5);
            let mut b = EdgeDegreeMatrix::zeros(1, 5, MatrixKind::Edge);
            for (l, k, p) in cells {
                b.set(l, k, p);
            }
            prop_assert_eq!(edd_distance(&b, &b, 1, 5).unwrap(), 0.0);
            prop_assert_eq!(edd_distance(&a, &b, 1, 5).unwrap(), edd_distance(&b, &a, 1, 5).unwrap());
        }
    }
}
