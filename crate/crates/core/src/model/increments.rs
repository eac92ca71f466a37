use serde::{Deserialize, Serialize};

use super::validate::Violation;

pub(crate) const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Distribution `{r_k}` of the number of arcs carried by one graph increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "IncrementDoc", into = "IncrementDoc")]
pub struct IncrementDistribution {
    min_degree: usize,
    probs: Vec<f64>,
    mean: f64,
}

#[derive(Serialize, Deserialize)]
struct IncrementDoc {
    min_degree: usize,
    probs: Vec<f64>,
    /// Informational only; always recomputed on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
}

impl From<IncrementDoc> for IncrementDistribution {
    fn from(doc: IncrementDoc) -> Self {
        IncrementDistribution::new(doc.min_degree, doc.probs)
    }
}

impl From<IncrementDistribution> for IncrementDoc {
    fn from(d: IncrementDistribution) -> Self {
        IncrementDoc {
            min_degree: d.min_degree,
            mean: Some(d.mean),
            probs: d.probs,
        }
    }
}

fn weighted_mean(min_degree: usize, probs: &[f64]) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, &p)| (min_degree + i) as f64 * p)
        .sum()
}

impl IncrementDistribution {
    /// Probabilities `r_k` for `k = min_degree, min_degree + 1, ...`.
    pub fn new(min_degree: usize, probs: Vec<f64>) -> Self {
        let mean = weighted_mean(min_degree, &probs);
        Self {
            min_degree,
            probs,
            mean,
        }
    }

    /// Every increment carries exactly `k` arcs.
    pub fn point(k: usize) -> Self {
        Self::new(k, vec![1.0])
    }

    /// Normalizes non-negative weights into probabilities.
    pub fn from_weights(min_degree: usize, weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        Self::new(min_degree, weights.iter().map(|w| w / total).collect())
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    /// Smallest `k` with `r_k > 0`.
    pub fn support_min(&self) -> Option<usize> {
        self.probs
            .iter()
            .position(|&p| p > 0.0)
            .map(|i| self.min_degree + i)
    }

    /// Largest `k` with `r_k > 0` (the `h` of `{r_g, ..., r_h}`).
    pub fn support_max(&self) -> Option<usize> {
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .map(|i| self.min_degree + i)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> f64 {
        k.checked_sub(self.min_degree)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// Mean number of arcs per increment, `m = sum_k k r_k`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub(crate) fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.support_min().is_none() {
            out.push(Violation::EmptySupport);
        }
        for (i, &p) in self.probs.iter().enumerate() {
            if !(p >= 0.0 && p.is_finite()) {
                out.push(Violation::NegativeProbability {
                    degree: self.min_degree + i,
                    value: p,
                });
            }
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            out.push(Violation::NonNormalized { sum });
        }
        out
    }
}

/// `m = sum_k k r_k`.
pub fn mean_increment(d: &IncrementDistribution) -> f64 {
    d.mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_mass_mean() {
        assert_eq!(mean_increment(&IncrementDistribution::point(1)), 1.0);
    }

    #[test]
    fn half_half_mean() {
        let d = IncrementDistribution::new(1, vec![0.5, 0.5]);
        assert_eq!(mean_increment(&d), 1.5);
        assert_eq!(d.support_max(), Some(2));
    }

    #[test]
    fn non_normalized_is_reported() {
        let d = IncrementDistribution::new(1, vec![0.5, 0.4]);
        let v = d.violations();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::NonNormalized { sum } if (sum - 0.9).abs() < 1e-15));
    }

    #[test]
    fn empty_support() {
        let d = IncrementDistribution::new(1, vec![0.0, 0.0]);
        assert!(d.violations().contains(&Violation::EmptySupport));
    }

    #[test]
    fn leading_zeros_shift_support() {
        let d = IncrementDistribution::new(0, vec![0.0, 0.0, 1.0]);
        assert_eq!(d.support_min(), Some(2));
        assert_eq!(d.prob(2), 1.0);
        assert_eq!(d.prob(7), 0.0);
    }

    proptest! {
        #[test]
        fn mean_survives_json(min in 0usize..4, w in prop::collection::vec(0.0f64..1.0, 1..60)) {
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let d = IncrementDistribution::from_weights(min, &w);
            let text = serde_json::to_string(&d).unwrap();
            let back: IncrementDistribution = serde_json::from_str(&text).unwrap();
            prop_assert!((back.mean() - d.mean()).abs() <= 1e-15);
            prop_assert_eq!(back, d);
        }
    }
}
