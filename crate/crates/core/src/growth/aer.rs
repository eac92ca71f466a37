use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::{GrowthError, RngStream};
use crate::model::{AerModelSpec, Graph, Validate};

/// Everything one AER run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AerOutcome {
    /// Graph before pruning, on all `n1` vertices.
    pub raw: Graph,
    /// `raw` without isolated vertices and isolated single-edge pairs,
    /// relabeled densely in original order.
    pub pruned: Graph,
    /// `raw` without isolated vertices only.
    pub without_isolates: Graph,
    pub isolated_removed: usize,
    pub pairs_removed: usize,
    pub row_stats: RowCorrelation,
}

/// Pooled lag-1 statistics of the edge indicators along every scan row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RowCorrelation {
    /// Adjacent indicator pairs `(z_j, z_{j+1})` inside rows.
    pub pairs: u64,
    /// Pairs with both indicators set.
    pub both: u64,
    /// Ones among the first element of each pair.
    pub ones_head: u64,
    /// Ones among the second element of each pair.
    pub ones_tail: u64,
}

impl RowCorrelation {
    /// Pearson correlation of `(z_j, z_{j+1})` over all pairs.
    pub fn lag1_autocorrelation(&self) -> f64 {
        let n = self.pairs as f64;
        let mx = self.ones_head as f64 / n;
        let my = self.ones_tail as f64 / n;
        let cov = self.both as f64 / n - mx * my;
        cov / (mx * (1.0 - mx) * my * (1.0 - my)).sqrt()
    }

    /// Standard error of the correlation under independence, `1 / sqrt(n)`.
    pub fn standard_error(&self) -> f64 {
        1.0 / (self.pairs as f64).sqrt()
    }

    pub fn merge(&mut self, other: &RowCorrelation) {
        self.pairs += other.pairs;
        self.both += other.both;
        self.ones_head += other.ones_head;
        self.ones_tail += other.ones_tail;
    }
}

/// Autocorrelated Erdos-Renyi graph, pruned.
pub fn grow_aer(spec: &AerModelSpec, stream: &RngStream) -> Result<Graph, GrowthError> {
    grow_aer_detailed(spec, stream).map(|o| o.pruned)
}

/// Scans rows `i = 0 .. n1 - 2`; in row `i` targets `j = i + 1 .. n1 - 1`
/// are visited in order and edge `(i, j)` is drawn with probability
/// `(p_a + z) / 2`, where `z` says whether the previous target of the same
/// row got an edge. `z` starts at 0 in every row.
///
/// Runs of misses (`z = 0`, constant probability `p_a / 2`) are skipped
/// with one geometric draw each, so a row costs time proportional to its
/// edges rather than its length.
pub fn grow_aer_detailed(spec: &AerModelSpec, stream: &RngStream) -> Result<AerOutcome, GrowthError> {
    spec.check()?;
    let n1 = spec.n1;
    let p_a = spec.base_probability();
    let p_miss = 0.5 * p_a;
    let p_hit = 0.5 * (p_a + 1.0);
    let gap = Geometric::new(p_miss).map_err(|e| GrowthError::Sampling(e.to_string()))?;
    let mut rng = stream.rng();

    let mut raw = Graph::new(n1, false);
    let mut stats = RowCorrelation::default();
    for i in 0..n1.saturating_sub(1) {
        let first = i + 1;
        let last = n1 - 1;
        let mut j = first;
        let mut hits = 0u64;
        let mut first_hit = false;
        let mut last_hit = false;
        let mut z = false;
        while j <= last {
            if z {
                z = rng.random_bool(p_hit);
                if z {
                    stats.both += 1;
                }
            } else {
                let skip = gap.sample(&mut rng);
                match j.checked_add(skip as usize).filter(|&t| t <= last) {
                    Some(t) => {
                        j = t;
                        z = true;
                    }
                    None => break,
                }
            }
            if z {
                raw.add_edge(i, j);
                hits += 1;
                first_hit |= j == first;
                last_hit = j == last;
            }
            j += 1;
        }
        let len = (last + 1 - first) as u64;
        stats.pairs += len - 1;
        stats.ones_head += hits - u64::from(last_hit);
        stats.ones_tail += hits - u64::from(first_hit);
    }

    let degrees = raw.degrees();
    let mut keep = vec![true; n1];
    let mut keep_pairs = vec![true; n1];
    let mut isolated_removed = 0;
    let mut pairs_removed = 0;
    for (v, &d) in degrees.iter().enumerate() {
        if d == 0 {
            keep[v] = false;
            keep_pairs[v] = false;
            isolated_removed += 1;
        }
    }
    for &(u, v) in raw.edges() {
        if degrees[u] == 1 && degrees[v] == 1 {
            keep[u] = false;
            keep[v] = false;
            pairs_removed += 1;
        }
    }

    Ok(AerOutcome {
        pruned: induced(&raw, &keep),
        without_isolates: induced(&raw, &keep_pairs),
        raw,
        isolated_removed,
        pairs_removed,
        row_stats: stats,
    })
}

fn induced(graph: &Graph, keep: &[bool]) -> Graph {
    let mut label = vec![usize::MAX; keep.len()];
    let mut next = 0;
    for (v, &k) in keep.iter().enumerate() {
        if k {
            label[v] = next;
            next += 1;
        }
    }
    let edges = graph
        .edges()
        .iter()
        .filter(|&&(u, v)| keep[u] && keep[v])
        .map(|&(u, v)| (label[u], label[v]))
        .collect();
    Graph::with_edges(next, edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_probability_for_gowalla_component() {
        let spec = AerModelSpec::new(35_000, 2.75);
        assert!((spec.base_probability() - 7.857_367_353_352_953e-5).abs() < 1e-18);
    }

    #[test]
    fn pruning_removes_only_small_components() {
        let spec = AerModelSpec::new(3_000, 1.5);
        let out = grow_aer_detailed(&spec, &RngStream::new(4, 0)).unwrap();
        let (label, count) = out.raw.components();
        let mut sizes = vec![0usize; count];
        for &c in &label {
            sizes[c] += 1;
        }
        let small: usize = sizes.iter().filter(|&&s| s <= 2).sum();
        assert_eq!(out.isolated_removed + 2 * out.pairs_removed, small);
        assert_eq!(out.pruned.vertex_count(), spec.n1 - small);
        assert_eq!(out.without_isolates.vertex_count(), spec.n1 - out.isolated_removed);
        let (plabel, pcount) = out.pruned.components();
        let mut psizes = vec![0usize; pcount];
        for &c in &plabel {
            psizes[c] += 1;
        }
        assert!(psizes.iter().all(|&s| s > 2));
        assert_eq!(out.raw.edge_count(), out.pruned.edge_count() + out.pairs_removed);
    }

    #[test]
    fn simple_graph_without_loops() {
        let out = grow_aer_detailed(&AerModelSpec::new(500, 3.0), &RngStream::new(8, 0)).unwrap();
        let c = out.raw.collapsed();
        assert_eq!(c.edge_count(), out.raw.edge_count());
        assert!(out.raw.edges().iter().all(|&(u, v)| u < v));
    }

    #[test]
    fn row_statistics_match_edges() {
        let spec = AerModelSpec::new(400, 4.0);
        let out = grow_aer_detailed(&spec, &RngStream::new(2, 0)).unwrap();
        // Rebuild the indicator rows and count pairs directly.
        let n = spec.n1;
        let mut rows = vec![vec![false; n]; n];
        for &(u, v) in out.raw.edges() {
            rows[u][v] = true;
        }
        let mut expect = RowCorrelation::default();
        for (i, row) in rows.iter().enumerate().take(n - 1) {
            for j in i + 1..n - 1 {
                expect.pairs += 1;
                expect.both += u64::from(row[j] && row[j + 1]);
                expect.ones_head += u64::from(row[j]);
                expect.ones_tail += u64::from(row[j + 1]);
            }
        }
        assert_eq!(out.row_stats, expect);
        assert!(out.row_stats.lag1_autocorrelation() > 0.0);
    }

    #[test]
    fn tiny_graph() {
        let out = grow_aer_detailed(&AerModelSpec::new(2, 1.0), &RngStream::new(1, 0)).unwrap();
        assert_eq!(out.raw.vertex_count(), 2);
        assert_eq!(out.pruned.vertex_count(), 0);
    }
}
