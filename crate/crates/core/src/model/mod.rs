//! Domain types shared by the solver, the growth simulator and calibration.

mod distribution;
mod graph;
mod increments;
mod spec;
mod validate;
mod weights;

pub use distribution::{DegreeDistribution, EdgeDegreeMatrix, MatrixKind};
pub use graph::Graph;
pub use increments::{mean_increment, IncrementDistribution};
pub use spec::{
    AerModelSpec, Component, ComponentModel, CompositeSpec, ModelSpec, NpaModelSpec, SeedGraph,
};
pub use validate::{validate_model, Validate, ValidationReport, Violation};
pub use weights::{WeightFunction, WeightRule};
