use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{grow_aer, grow_npa, GrowthError, RngStream};
use crate::model::{AerModelSpec, ComponentModel, CompositeSpec, Graph, Validate};

/// Disjoint union of component graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeGraph {
    pub graph: Graph,
    /// Vertex range occupied by each component, in spec order.
    pub ranges: Vec<Range<usize>>,
    pub bridges: usize,
}

/// Grows every component at its budget and returns the isolated union.
pub fn grow_composite(spec: &CompositeSpec, stream: &RngStream) -> Result<CompositeGraph, GrowthError> {
    grow_composite_bridged(spec, stream, 0)
}

/// Like [`grow_composite`], then adds `bridges` undirected edges between
/// uniformly chosen distinct vertices.
///
/// Component `i` draws from `stream.child(i)`; bridges draw from the child
/// after the last component. NPA components come out undirected, and AER
/// components come out pruned, so they may hold fewer than their budget.
pub fn grow_composite_bridged(
    spec: &CompositeSpec,
    stream: &RngStream,
    bridges: usize,
) -> Result<CompositeGraph, GrowthError> {
    spec.check()?;
    let budgets = spec.budgets();
    let parts = spec
        .components
        .par_iter()
        .zip(budgets.par_iter())
        .enumerate()
        .map(|(i, (c, &n))| {
            let child = stream.child(i as u64);
            match &c.model {
                ComponentModel::Aer { mean_degree } => grow_aer(&AerModelSpec::new(n, *mean_degree), &child),
                other => {
                    let npa = other.as_npa().expect("non-AER components are NPA graphs");
                    let mut g = grow_npa(&npa, n, &child)?.final_graph;
                    g.set_directed(false);
                    Ok(g)
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut graph = Graph::new(0, false);
    let mut ranges = Vec::with_capacity(parts.len());
    for part in &parts {
        let start = graph.vertex_count();
        graph.append(part);
        ranges.push(start..graph.vertex_count());
    }

    if bridges > 0 {
        let n = graph.vertex_count();
        if n < 2 {
            return Err(GrowthError::InvalidBridge { bridges, vertices: n });
        }
        let mut rng = stream.child(parts.len() as u64).rng();
        for _ in 0..bridges {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            graph.add_edge(u, v);
        }
    }
    Ok(CompositeGraph { graph, ranges, bridges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::grow_ba_tree;
    use crate::model::Component;

    fn two_trees(total_n: usize, rho: f64) -> CompositeSpec {
        CompositeSpec {
            components: vec![
                Component { model: ComponentModel::BaTree, rho },
                Component { model: ComponentModel::BaTree, rho: 1.0 - rho },
            ],
            total_n,
        }
    }

    #[test]
    fn union_is_disjoint() {
        let spec = two_trees(1_000, 0.3);
        let out = grow_composite(&spec, &RngStream::new(3, 0)).unwrap();
        assert_eq!(out.ranges, vec![0..300, 300..1_000]);
        assert_eq!(out.graph.edge_count(), 299 + 699);
        assert_eq!(out.graph.components().1, 2);
        for &(u, v) in out.graph.edges() {
            assert_eq!(u < 300, v < 300);
        }
    }

    #[test]
    fn single_component_matches_direct_growth() {
        let spec = CompositeSpec {
            components: vec![Component { model: ComponentModel::BaTree, rho: 1.0 }],
            total_n: 500,
        };
        let stream = RngStream::new(12, 0);
        let out = grow_composite(&spec, &stream).unwrap();
        let mut direct = grow_ba_tree(500, &stream.child(0)).unwrap().final_graph;
        direct.set_directed(false);
        assert_eq!(out.graph, direct);
    }

    #[test]
    fn bridges_join_components() {
        let spec = two_trees(400, 0.5);
        let out = grow_composite_bridged(&spec, &RngStream::new(5, 0), 25).unwrap();
        assert_eq!(out.graph.edge_count(), 398 + 25);
        assert!(out.graph.edges().iter().all(|&(u, v)| u != v));
    }

    #[test]
    fn reproducible() {
        let spec = CompositeSpec {
            components: vec![
                Component { model: ComponentModel::Aer { mean_degree: 2.0 }, rho: 0.4 },
                Component { model: ComponentModel::BaTree, rho: 0.6 },
            ],
            total_n: 2_000,
        };
        let a = grow_composite(&spec, &RngStream::new(1, 0)).unwrap();
        let b = grow_composite(&spec, &RngStream::new(1, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.ranges[0].len() <= 800);
    }
}
