use rand::Rng;

use crate::model::WeightFunction;

/// Vertices grouped by degree, for drawing a vertex with probability
/// proportional to `f(degree)`.
///
/// A draw picks a degree bucket with probability `count_k f_k / total`
/// by scanning the occupied buckets in ascending degree, then a uniform
/// member of that bucket. Degree changes are O(1).
pub(crate) struct DegreeBuckets<'a> {
    weights: &'a WeightFunction,
    weight_cache: Vec<f64>,
    members: Vec<Vec<usize>>,
    position: Vec<usize>,
    degree: Vec<usize>,
    /// Occupied degrees with positive weight, kept sorted.
    occupied: Vec<usize>,
    total: f64,
    updates: usize,
}

impl<'a> DegreeBuckets<'a> {
    pub fn new(weights: &'a WeightFunction) -> Self {
        Self {
            weights,
            weight_cache: Vec::new(),
            members: Vec::new(),
            position: Vec::new(),
            degree: Vec::new(),
            occupied: Vec::new(),
            total: 0.0,
            updates: 0,
        }
    }

    fn weight(&mut self, k: usize) -> f64 {
        while self.weight_cache.len() <= k {
            let next = self.weight_cache.len();
            self.weight_cache.push(self.weights.weight(next));
        }
        self.weight_cache[k]
    }

    #[cfg(test)]
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    #[cfg(test)]
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    fn enter(&mut self, v: usize, k: usize) {
        if self.members.len() <= k {
            self.members.resize_with(k + 1, Vec::new);
        }
        let w = self.weight(k);
        if self.members[k].is_empty() && w > 0.0 {
            let at = self.occupied.partition_point(|&d| d < k);
            self.occupied.insert(at, k);
        }
        self.position[v] = self.members[k].len();
        self.members[k].push(v);
        self.degree[v] = k;
        self.total += w;
    }

    fn leave(&mut self, v: usize) {
        let k = self.degree[v];
        let at = self.position[v];
        let bucket = &mut self.members[k];
        bucket.swap_remove(at);
        if let Some(&moved) = bucket.get(at) {
            self.position[moved] = at;
        }
        let emptied = bucket.is_empty();
        let w = self.weight(k);
        if emptied && w > 0.0 {
            let at = self.occupied.partition_point(|&d| d < k);
            self.occupied.remove(at);
        }
        self.total -= w;
    }

    /// Adds vertex `v` (the next id) with degree `k`.
    pub fn insert(&mut self, v: usize, k: usize) {
        debug_assert_eq!(v, self.degree.len());
        self.degree.push(k);
        self.position.push(0);
        self.enter(v, k);
        self.tick();
    }

    pub fn increment(&mut self, v: usize) {
        let k = self.degree[v];
        self.leave(v);
        self.enter(v, k + 1);
        self.tick();
    }

    // Incremental updates of the running total drift for non-integer
    // weights; recompute it from the buckets now and then.
    fn tick(&mut self) {
        self.updates += 1;
        if self.updates.is_multiple_of(65_536) {
            self.total = self
                .occupied
                .iter()
                .map(|&k| self.members[k].len() as f64 * self.weight_cache[k])
                .sum();
        }
    }

    /// Draws a vertex with probability `f(deg v) / sum_u f(deg u)`.
    /// Returns `None` when every vertex has zero weight.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        if self.occupied.is_empty() || self.total.is_nan() || self.total <= 0.0 {
            return None;
        }
        let mut target = rng.random::<f64>() * self.total;
        let mut chosen = *self.occupied.last().unwrap();
        for &k in &self.occupied {
            let mass = self.members[k].len() as f64 * self.weight_cache[k];
            if target < mass {
                chosen = k;
                break;
            }
            target -= mass;
        }
        let bucket = &self.members[chosen];
        Some(bucket[rng.random_range(0..bucket.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::RngStream;

    #[test]
    fn draws_follow_weights() {
        let f = WeightFunction::linear(1);
        let mut b = DegreeBuckets::new(&f);
        b.insert(0, 1);
        b.insert(1, 3);
        b.insert(2, 1);
        assert_eq!(b.total_weight(), 5.0);
        let mut rng = RngStream::new(1, 0).rng();
        let mut hits = [0usize; 3];
        let n = 200_000;
        for _ in 0..n {
            hits[b.sample(&mut rng).unwrap()] += 1;
        }
        let p1 = hits[1] as f64 / n as f64;
        assert!((p1 - 0.6).abs() < 0.005, "{p1}");
    }

    #[test]
    fn saturated_vertices_are_never_drawn() {
        let f = WeightFunction::linear(1).with_max_degree(2);
        let mut b = DegreeBuckets::new(&f);
        b.insert(0, 2);
        b.insert(1, 1);
        b.increment(0);
        assert_eq!(b.degree(0), 3);
        let mut rng = RngStream::new(2, 0).rng();
        for _ in 0..1000 {
            assert_eq!(b.sample(&mut rng), Some(1));
        }
        b.increment(1);
        b.increment(1);
        assert_eq!(b.sample(&mut rng), None);
    }
}
