use thiserror::Error;

use crate::model::{DegreeDistribution, EdgeDegreeMatrix, Graph, MatrixKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph has no edges")]
    NoEdges,
}

/// Fraction of vertices with each (undirected) degree, starting at the
/// smallest degree present.
pub fn measure_vdd(graph: &Graph) -> Result<DegreeDistribution, MeasureError> {
    if graph.vertex_count() == 0 {
        return Err(MeasureError::EmptyGraph);
    }
    let degrees = graph.degrees();
    let lo = *degrees.iter().min().unwrap();
    let hi = *degrees.iter().max().unwrap();
    let mut counts = vec![0u64; hi - lo + 1];
    for d in degrees {
        counts[d - lo] += 1;
    }
    Ok(DegreeDistribution::from_counts(lo, &counts))
}

/// Symmetric edge degree matrix on `[1, u]^2`: each edge puts `1 / 2E` on
/// both `(d1, d2)` and `(d2, d1)`. Mass beyond `u` goes to the truncation
/// mass.
pub fn measure_edd(graph: &Graph, u: usize) -> Result<EdgeDegreeMatrix, MeasureError> {
    let edges = graph.edges();
    if edges.is_empty() {
        return Err(MeasureError::NoEdges);
    }
    let degrees = graph.degrees();
    let dim = u.max(1);
    let mut counts = vec![0u64; dim * dim];
    let mut outside = 0u64;
    for &(a, b) in edges {
        let (da, db) = (degrees[a], degrees[b]);
        if da <= dim && db <= dim {
            counts[(da - 1) * dim + (db - 1)] += 1;
            counts[(db - 1) * dim + (da - 1)] += 1;
        } else {
            outside += 2;
        }
    }
    let half_ends = 2.0 * edges.len() as f64;
    let mut out = EdgeDegreeMatrix::zeros(1, dim, MatrixKind::Edge);
    for l in 1..=dim {
        for k in 1..=dim {
            let c = counts[(l - 1) * dim + (k - 1)];
            if c > 0 {
                out.set(l, k, c as f64 / half_ends);
            }
        }
    }
    out.set_truncation_mass(outside as f64 / half_ends);
    Ok(out)
}
