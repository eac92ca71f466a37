//! Real network datasets: edge-list ingestion, summaries and smoothing.

mod parse;
mod smooth;

use serde::{Deserialize, Serialize};

pub use parse::{parse_edge_list, read_edge_list, write_edge_list, ParseError, ParsedGraph};
pub use smooth::{smooth_vdd, SmoothError, Smoothing};

pub use crate::growth::{measure_edd as empirical_edd, measure_vdd as empirical_vdd, MeasureError};
use crate::model::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub node_count: usize,
    /// Undirected edges after deduplication.
    pub edge_count: usize,
    pub mean_degree: f64,
    /// Half the mean degree: the mean increment of a matching NPA model.
    pub derived_m: f64,
}

pub fn summarize(graph: &Graph) -> Result<DatasetSummary, MeasureError> {
    let node_count = graph.vertex_count();
    if node_count == 0 {
        return Err(MeasureError::EmptyGraph);
    }
    let edge_count = graph.edge_count();
    let mean_degree = 2.0 * edge_count as f64 / node_count as f64;
    Ok(DatasetSummary {
        node_count,
        edge_count,
        mean_degree,
        derived_m: mean_degree / 2.0,
    })
}
