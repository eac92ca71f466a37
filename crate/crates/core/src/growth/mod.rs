//! Monte-Carlo graph generation and degree measurement.

mod aer;
mod composite;
mod measure;
mod npa;
mod rng;
mod sampler;

use thiserror::Error;

pub use aer::{grow_aer, grow_aer_detailed, AerOutcome, RowCorrelation};
pub use composite::{grow_composite, grow_composite_bridged, CompositeGraph};
pub use measure::{measure_edd, measure_vdd, MeasureError};
pub use npa::{grow_ba_tree, grow_npa, GrowthTrace};
pub use rng::RngStream;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("invalid model: {0}")]
    InvalidModel(#[from] ValidationReport),
    #[error("requested {requested} vertices but the seed graph already has {minimum}")]
    TooFewVertices { requested: usize, minimum: usize },
    #[error("sampling setup failed: {0}")]
    Sampling(String),
    #[error("every vertex has zero weight at step {step} ({vertices} vertices)")]
    ZeroTotalWeight { step: usize, vertices: usize },
    #[error("cannot place {bridges} bridge edges on {vertices} vertices")]
    InvalidBridge { bridges: usize, vertices: usize },
}
