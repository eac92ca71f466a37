use serde::{Deserialize, Serialize};

/// Probabilities `Q_k` over vertex degrees `min_degree ..= max_degree`.
///
/// Mass beyond the stored range is tracked in `truncation_mass` rather than
/// folded back into the stored probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    min_degree: usize,
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl DegreeDistribution {
    pub fn new(min_degree: usize, probs: Vec<f64>, truncation_mass: f64) -> Self {
        Self {
            min_degree,
            probs,
            truncation_mass,
        }
    }

    /// Truncation mass is whatever the stored probabilities leave over.
    /// Round-off below 1e-12 is reported as zero.
    pub fn with_deficit(min_degree: usize, probs: Vec<f64>) -> Self {
        let deficit = 1.0 - probs.iter().sum::<f64>();
        let truncation_mass = if deficit.abs() < 1e-12 { 0.0 } else { deficit };
        Self::new(min_degree, probs, truncation_mass)
    }

    /// Normalized histogram; `counts[i]` is the number of vertices with
    /// degree `min_degree + i`.
    pub fn from_counts(min_degree: usize, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let probs = counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect();
        Self::new(min_degree, probs, 0.0)
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn max_degree(&self) -> usize {
        (self.min_degree + self.probs.len()).saturating_sub(1)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn get(&self, k: usize) -> f64 {
        k.checked_sub(self.min_degree)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.min_degree + i, p))
    }

    pub fn stored_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `sum_k k Q_k` over the stored range.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    /// Total-variation distance over the union of both stored ranges,
    /// counting the difference in truncation mass as one more cell.
    pub fn total_variation(&self, other: &DegreeDistribution) -> f64 {
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        let cells: f64 = (lo..=hi).map(|k| (self.get(k) - other.get(k)).abs()).sum();
        0.5 * (cells + (self.truncation_mass - other.truncation_mass).abs())
    }
}

/// Whether a matrix holds directed arc probabilities `Q_{l,k}` or symmetric
/// edge probabilities `Theta_{l,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Arc,
    Edge,
}

/// Dense square matrix of degree-pair probabilities on `[min_degree, extent]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDegreeMatrix {
    min_degree: usize,
    extent: usize,
    kind: MatrixKind,
    entries: Vec<f64>,
    truncation_mass: f64,
}

impl EdgeDegreeMatrix {
    pub fn zeros(min_degree: usize, extent: usize, kind: MatrixKind) -> Self {
        assert!(extent >= min_degree, "extent {extent} below min degree {min_degree}");
        let dim = extent - min_degree + 1;
        Self {
            min_degree,
            extent,
            kind,
            entries: vec![0.0; dim * dim],
            truncation_mass: 0.0,
        }
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    /// Largest stored degree, the `u` of the window `[g, u]^2`.
    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn dim(&self) -> usize {
        self.extent - self.min_degree + 1
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn set_truncation_mass(&mut self, mass: f64) {
        self.truncation_mass = mass;
    }

    /// Sets truncation mass to whatever the stored entries leave over.
    pub fn close_mass(&mut self) {
        self.truncation_mass = 1.0 - self.stored_mass();
    }

    fn index(&self, l: usize, k: usize) -> Option<usize> {
        let in_range = |d: usize| d >= self.min_degree && d <= self.extent;
        (in_range(l) && in_range(k))
            .then(|| (l - self.min_degree) * self.dim() + (k - self.min_degree))
    }

    /// Probability at `(l, k)`; zero outside the stored square.
    pub fn get(&self, l: usize, k: usize) -> f64 {
        self.index(l, k).map_or(0.0, |i| self.entries[i])
    }

    pub fn set(&mut self, l: usize, k: usize, value: f64) {
        let i = self
            .index(l, k)
            .unwrap_or_else(|| panic!("cell ({l}, {k}) outside matrix"));
        self.entries[i] = value;
    }

    pub fn stored_mass(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Largest stored probability.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Bitwise symmetry check.
    pub fn is_symmetric(&self) -> bool {
        let dim = self.dim();
        (0..dim).all(|i| (0..i).all(|j| self.entries[i * dim + j] == self.entries[j * dim + i]))
    }

    /// Iterates `(l, k, probability)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let dim = self.dim();
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.min_degree + i / dim, self.min_degree + i % dim, p))
    }

    /// Copy restricted to `[min_degree, extent]^2`; mass outside the window
    /// moves into the truncation mass.
    pub fn window(&self, extent: usize) -> Self {
        let extent = extent.min(self.extent);
        let mut out = Self::zeros(self.min_degree, extent, self.kind);
        for l in self.min_degree..=extent {
            for k in self.min_degree..=extent {
                out.set(l, k, self.get(l, k));
            }
        }
        out.truncation_mass = self.truncation_mass + (self.stored_mass() - out.stored_mass());
        out
    }
}
