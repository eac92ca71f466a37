use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use super::sampler::DegreeBuckets;
use super::{GrowthError, RngStream};
use crate::model::{Graph, NpaModelSpec, Validate};

/// Result of one growth run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrace {
    pub final_graph: Graph,
    pub seed_vertices: usize,
    /// Number of increments added.
    pub steps: usize,
    /// Total arcs added by increments (seed edges excluded).
    pub arc_count: usize,
}

/// Grows `spec` from its seed graph until it has `n` vertices.
///
/// Each increment draws its arc count `x ~ {r_k}`, then draws `x` targets
/// independently (with replacement) among the existing vertices with
/// probability proportional to `f(degree)`. Degrees are updated only after
/// the whole increment is placed, so the new vertex never links to itself.
/// The result is directed: arcs run from the new vertex to its targets.
pub fn grow_npa(spec: &NpaModelSpec, n: usize, stream: &RngStream) -> Result<GrowthTrace, GrowthError> {
    spec.check()?;
    let mut graph = spec.seed_graph();
    graph.set_directed(true);
    let seed_vertices = graph.vertex_count();
    if n < seed_vertices {
        return Err(GrowthError::TooFewVertices {
            requested: n,
            minimum: seed_vertices,
        });
    }

    let mut rng = stream.rng();
    let increments = &spec.increments;
    let arc_count_dist = WeightedIndex::new(increments.probs()).map_err(|e| GrowthError::Sampling(e.to_string()))?;
    let steps = n - seed_vertices;
    graph.reserve_edges((steps as f64 * spec.m() * 1.05) as usize + 16);

    let mut buckets = DegreeBuckets::new(&spec.weights);
    for (v, d) in graph.degrees().into_iter().enumerate() {
        buckets.insert(v, d);
    }

    let mut targets = Vec::new();
    let mut arc_count = 0;
    for step in 0..steps {
        let x = increments.min_degree() + arc_count_dist.sample(&mut rng);
        targets.clear();
        for _ in 0..x {
            let t = buckets.sample(&mut rng).ok_or(GrowthError::ZeroTotalWeight {
                step,
                vertices: graph.vertex_count(),
            })?;
            targets.push(t);
        }
        let v = graph.add_vertex();
        for &t in &targets {
            graph.add_edge(v, t);
            buckets.increment(t);
        }
        buckets.insert(v, x);
        arc_count += x;
    }

    Ok(GrowthTrace {
        final_graph: graph,
        seed_vertices,
        steps,
        arc_count,
    })
}

/// Barabasi-Albert tree on `n` vertices (one arc per increment, `f_k = k`).
pub fn grow_ba_tree(n: usize, stream: &RngStream) -> Result<GrowthTrace, GrowthError> {
    grow_npa(&NpaModelSpec::ba_tree(), n, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IncrementDistribution, WeightFunction};

    #[test]
    fn ba_tree_is_a_tree() {
        for (n, seed) in [(2, 1), (3, 2), (1000, 3)] {
            let g = grow_ba_tree(n, &RngStream::new(seed, 0)).unwrap().final_graph;
            assert_eq!(g.vertex_count(), n);
            assert_eq!(g.edge_count(), n - 1);
            assert_eq!(g.components().1, 1);
        }
    }

    #[test]
    fn conservation() {
        let spec = NpaModelSpec::new(
            WeightFunction::linear(1),
            IncrementDistribution::new(1, vec![0.2, 0.3, 0.5]),
        );
        let t = grow_npa(&spec, 5_000, &RngStream::new(9, 0)).unwrap();
        let seed_edges = spec.seed_graph().edge_count();
        assert_eq!(t.final_graph.vertex_count(), t.seed_vertices + t.steps);
        assert_eq!(t.final_graph.edge_count(), seed_edges + t.arc_count);
        assert_eq!(
            t.final_graph.degrees().iter().sum::<usize>(),
            2 * t.final_graph.edge_count()
        );
        assert!(t.final_graph.edges()[seed_edges..].iter().all(|&(u, v)| u > v));
    }

    #[test]
    fn reproducible() {
        let spec = NpaModelSpec::ba_tree();
        let a = grow_npa(&spec, 2_000, &RngStream::new(5, 1)).unwrap();
        let b = grow_npa(&spec, 2_000, &RngStream::new(5, 1)).unwrap();
        let c = grow_npa(&spec, 2_000, &RngStream::new(5, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn saturated_vertices_stop_growing() {
        // M = 5: once a vertex passes degree 5 it has zero weight.
        let spec = NpaModelSpec::new(
            WeightFunction::linear(1).with_max_degree(5),
            IncrementDistribution::new(1, vec![0.5, 0.5]),
        );
        let g = grow_npa(&spec, 3_000, &RngStream::new(11, 0)).unwrap().final_graph;
        // Replay the growth: a target must have had degree <= 5 just before
        // the increment that hit it.
        let mut deg = vec![0usize; g.vertex_count()];
        let seed_n = spec.seed_graph().vertex_count();
        let mut edges = g.edges().iter().peekable();
        while let Some(&&(u, v)) = edges.peek() {
            if u < seed_n && v < seed_n {
                deg[u] += 1;
                deg[v] += 1;
                edges.next();
            } else {
                break;
            }
        }
        let mut current = usize::MAX;
        let mut pending: Vec<usize> = Vec::new();
        let flush = |pending: &mut Vec<usize>, deg: &mut Vec<usize>, src: usize| {
            for &t in pending.iter() {
                assert!(deg[t] <= 5, "vertex {t} at degree {} was chosen", deg[t]);
            }
            for &t in pending.iter() {
                deg[t] += 1;
                deg[src] += 1;
            }
            pending.clear();
        };
        for &(u, v) in edges {
            if u != current {
                if current != usize::MAX {
                    flush(&mut pending, &mut deg, current);
                }
                current = u;
            }
            pending.push(v);
        }
        flush(&mut pending, &mut deg, current);
        assert!(deg.iter().any(|&d| d > 5));
    }

    #[test]
    fn zero_total_weight() {
        // Degree-1 vertices are the only attachable ones, and almost every
        // increment brings two arcs, so the seed saturates within two steps.
        let spec = NpaModelSpec::new(
            WeightFunction::linear(1).with_max_degree(1),
            IncrementDistribution::new(1, vec![1e-9, 1.0 - 1e-9]),
        );
        let err = grow_npa(&spec, 10, &RngStream::new(1, 0)).unwrap_err();
        assert!(matches!(err, GrowthError::ZeroTotalWeight { .. }));
    }
}
