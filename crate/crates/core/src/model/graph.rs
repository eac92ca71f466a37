use serde::{Deserialize, Serialize};

/// Edge-list graph. Directed graphs keep arc orientation (source, target);
/// degrees always count both ends, so parallel arcs add to the degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    directed: bool,
}

impl Graph {
    pub fn new(vertex_count: usize, directed: bool) -> Self {
        Self {
            vertex_count,
            edges: Vec::new(),
            directed,
        }
    }

    pub fn with_edges(vertex_count: usize, edges: Vec<(usize, usize)>, directed: bool) -> Self {
        let mut g = Self::new(vertex_count, directed);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Complete undirected graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::with_edges(n, edges, false)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(
            u < self.vertex_count && v < self.vertex_count,
            "edge ({u}, {v}) references a missing vertex"
        );
        assert_ne!(u, v, "self-loop at vertex {u}");
        self.edges.push((u, v));
    }

    pub(crate) fn reserve_edges(&mut self, additional: usize) {
        self.edges.reserve(additional);
    }

    pub fn set_directed(&mut self, directed: bool) {
        self.directed = directed;
    }

    /// Total (in + out) degree of every vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Undirected neighbor lists, parallel edges repeated.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Component label of every vertex (labels are dense, in order of first
    /// vertex) and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.vertex_count {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Copy with parallel edges (in either orientation) merged.
    pub fn collapsed(&self) -> Self {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Self {
            vertex_count: self.vertex_count,
            edges,
            directed: false,
        }
    }

    /// Disjoint union; vertices of `other` are shifted past ours.
    pub fn append(&mut self, other: &Graph) {
        let offset = self.vertex_count;
        self.vertex_count += other.vertex_count;
        self.edges
            .extend(other.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
    }
}
