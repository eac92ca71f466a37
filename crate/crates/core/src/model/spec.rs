use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::increments::{IncrementDistribution, NORMALIZATION_TOLERANCE};
use super::validate::{Validate, Violation};
use super::weights::WeightFunction;

/// Graph the growth starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedGraph {
    /// Complete graph on `max(g, 1) + 1` vertices.
    #[default]
    Default,
    Explicit {
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
    },
}

/// A nonlinear preferential attachment model: weights, increment sizes and
/// the seed graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpaModelSpec {
    pub weights: WeightFunction,
    pub increments: IncrementDistribution,
    #[serde(default)]
    pub seed: SeedGraph,
}

impl NpaModelSpec {
    pub fn new(weights: WeightFunction, increments: IncrementDistribution) -> Self {
        Self {
            weights,
            increments,
            seed: SeedGraph::Default,
        }
    }

    /// Barabasi-Albert tree: one arc per increment, `f_k = k`.
    pub fn ba_tree() -> Self {
        Self::new(WeightFunction::linear(1), IncrementDistribution::point(1))
    }

    pub fn with_seed(mut self, seed: SeedGraph) -> Self {
        self.seed = seed;
        self
    }

    /// Mean number of arcs per increment.
    pub fn m(&self) -> f64 {
        self.increments.mean()
    }

    pub fn seed_graph(&self) -> Graph {
        match &self.seed {
            SeedGraph::Default => Graph::complete(self.weights.min_degree().max(1) + 1),
            SeedGraph::Explicit {
                vertex_count,
                edges,
            } => Graph::with_edges(*vertex_count, edges.clone(), true),
        }
    }

    fn seed_violations(&self) -> Vec<Violation> {
        if let SeedGraph::Explicit {
            vertex_count,
            edges,
        } = &self.seed
        {
            if *vertex_count == 0 {
                return vec![Violation::SeedMalformed {
                    reason: "no vertices".into(),
                }];
            }
            if let Some(&(u, v)) = edges
                .iter()
                .find(|&&(u, v)| u == v || u >= *vertex_count || v >= *vertex_count)
            {
                return vec![Violation::SeedMalformed {
                    reason: format!("bad edge ({u}, {v})"),
                }];
            }
        }
        let total: f64 = self
            .seed_graph()
            .degrees()
            .into_iter()
            .map(|d| self.weights.weight(d))
            .sum();
        if total > 0.0 {
            Vec::new()
        } else {
            vec![Violation::SeedWeightZero]
        }
    }
}

impl Validate for NpaModelSpec {
    fn violations(&self) -> Vec<Violation> {
        let mut out = self.weights.violations();
        out.extend(self.increments.violations());
        if let Some(g) = self.increments.support_min() {
            if g != self.weights.min_degree() {
                out.push(Violation::SupportMismatch {
                    increments: g,
                    weights: self.weights.min_degree(),
                });
            }
        }
        if out.iter().all(|v| !matches!(v, Violation::SupportBounds { .. })) {
            out.extend(self.seed_violations());
        }
        out
    }
}

/// Autocorrelated Erdos-Renyi graph on `n1` vertices before pruning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AerModelSpec {
    pub n1: usize,
    /// Target mean vertex degree `a`.
    pub mean_degree: f64,
}

impl AerModelSpec {
    pub fn new(n1: usize, mean_degree: f64) -> Self {
        Self { n1, mean_degree }
    }

    /// `p_a = a / (n1 - 1)`.
    pub fn base_probability(&self) -> f64 {
        self.mean_degree / (self.n1 as f64 - 1.0)
    }
}

impl Validate for AerModelSpec {
    fn violations(&self) -> Vec<Violation> {
        if self.n1 < 2 {
            return vec![Violation::AerTooSmall { n1: self.n1 }];
        }
        let p_a = self.base_probability();
        if !(p_a > 0.0 && p_a <= 1.0) {
            return vec![Violation::AerProbability {
                mean_degree: self.mean_degree,
                p_a,
            }];
        }
        Vec::new()
    }
}

/// Model of one composite component. AER components take their vertex
/// count from the composite budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComponentModel {
    Npa(NpaModelSpec),
    Aer { mean_degree: f64 },
    BaTree,
}

impl ComponentModel {
    /// The NPA spec this component grows by, if it is an NPA graph.
    pub fn as_npa(&self) -> Option<NpaModelSpec> {
        match self {
            ComponentModel::Npa(spec) => Some(spec.clone()),
            ComponentModel::BaTree => Some(NpaModelSpec::ba_tree()),
            ComponentModel::Aer { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub model: ComponentModel,
    /// Fraction of the composite's vertices in this component.
    pub rho: f64,
}

/// Disjoint union of component graphs with vertex fractions `rho_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSpec {
    pub components: Vec<Component>,
    pub total_n: usize,
}

impl CompositeSpec {
    /// Vertex budget `round(rho_i * total_n)` of every component.
    pub fn budgets(&self) -> Vec<usize> {
        self.components
            .iter()
            .map(|c| (c.rho * self.total_n as f64).round() as usize)
            .collect()
    }
}

impl Validate for CompositeSpec {
    fn violations(&self) -> Vec<Violation> {
        if self.components.is_empty() {
            return vec![Violation::EmptyComposite];
        }
        let mut out = Vec::new();
        let sum: f64 = self.components.iter().map(|c| c.rho).sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            out.push(Violation::RhoNotNormalized { sum });
        }
        let budgets = self.budgets();
        for (index, (c, &vertices)) in self.components.iter().zip(&budgets).enumerate() {
            if !(c.rho > 0.0 && c.rho <= 1.0) {
                out.push(Violation::RhoOutOfRange { index, rho: c.rho });
            }
            if vertices < 2 {
                out.push(Violation::ComponentTooSmall { index, vertices });
            }
            let inner = match &c.model {
                ComponentModel::Npa(spec) => spec.violations(),
                ComponentModel::BaTree => Vec::new(),
                ComponentModel::Aer { mean_degree } => {
                    AerModelSpec::new(vertices.max(2), *mean_degree).violations()
                }
            };
            out.extend(inner.into_iter().map(|v| Violation::Component {
                index,
                inner: Box::new(v),
            }));
        }
        out
    }
}

/// Any model a spec file can hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Npa(NpaModelSpec),
    Aer(AerModelSpec),
    Composite(CompositeSpec),
}

impl Validate for ModelSpec {
    fn violations(&self) -> Vec<Violation> {
        match self {
            ModelSpec::Npa(s) => s.violations(),
            ModelSpec::Aer(s) => s.violations(),
            ModelSpec::Composite(s) => s.violations(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;

    #[test]
    fn ba_tree_is_valid() {
        let spec = validate_model(NpaModelSpec::ba_tree()).unwrap();
        assert_eq!(spec.m(), 1.0);
        assert_eq!(spec.seed_graph().edge_count(), 1);
    }

    #[test]
    fn validation_is_idempotent() {
        let spec = NpaModelSpec::new(
            WeightFunction::power(1, 0.8),
            IncrementDistribution::new(1, vec![0.5, 0.5]),
        );
        let once = validate_model(spec.clone()).unwrap();
        let twice = validate_model(once.clone()).unwrap();
        assert_eq!(once, spec);
        assert_eq!(twice, once);
    }

    #[test]
    fn every_violation_is_listed() {
        let mut table = vec![1.0; 10];
        table[2] = 0.0;
        let spec = NpaModelSpec::new(
            WeightFunction::linear(1).with_max_degree(10).with_table(table),
            IncrementDistribution::new(1, vec![0.5, 0.4]),
        );
        let report = validate_model(spec).unwrap_err();
        assert_eq!(report.violations.len(), 2);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonNormalized { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::WeightSignViolation { degree: 3, .. })));
    }

    #[test]
    fn mismatched_minimum_degrees() {
        let spec = NpaModelSpec::new(WeightFunction::linear(1), IncrementDistribution::point(2));
        let report = validate_model(spec).unwrap_err();
        assert_eq!(
            report.violations,
            vec![Violation::SupportMismatch {
                increments: 2,
                weights: 1
            }]
        );
    }

    #[test]
    fn zero_weight_seed() {
        // Degree-1 seed vertices, but weights only live on [3, 5].
        let spec = NpaModelSpec::new(
            WeightFunction::linear(3).with_max_degree(5),
            IncrementDistribution::point(3),
        )
        .with_seed(SeedGraph::Explicit {
            vertex_count: 2,
            edges: vec![(0, 1)],
        });
        let report = validate_model(spec).unwrap_err();
        assert_eq!(report.violations, vec![Violation::SeedWeightZero]);
    }

    #[test]
    fn default_seed_has_positive_weight() {
        let spec = NpaModelSpec::new(WeightFunction::linear(3), IncrementDistribution::point(3));
        let seed = spec.seed_graph();
        assert_eq!(seed.vertex_count(), 4);
        assert!(seed.degrees().iter().all(|&d| d == 3));
        assert!(validate_model(spec).is_ok());
    }

    #[test]
    fn aer_probability_bounds() {
        let ok = AerModelSpec::new(35_000, 2.75);
        assert!((ok.base_probability() - 2.75 / 34_999.0).abs() < 1e-20);
        assert!(ok.check().is_ok());
        assert!(AerModelSpec::new(3, 5.0).check().is_err());
        assert!(AerModelSpec::new(1, 1.0).check().is_err());
    }

    #[test]
    fn composite_checks() {
        let spec = CompositeSpec {
            components: vec![
                Component {
                    model: ComponentModel::Aer { mean_degree: 2.75 },
                    rho: 0.35,
                },
                Component {
                    model: ComponentModel::BaTree,
                    rho: 0.65,
                },
            ],
            total_n: 100_000,
        };
        assert_eq!(spec.budgets(), vec![35_000, 65_000]);
        assert!(spec.check().is_ok());

        let mut bad = spec.clone();
        bad.components[1].rho = 0.6;
        bad.total_n = 4;
        let v = bad.violations();
        assert!(v.iter().any(|v| matches!(v, Violation::RhoNotNormalized { .. })));
        assert!(v.iter().any(|v| matches!(v, Violation::ComponentTooSmall { .. })));
    }

    #[test]
    fn spec_file_round_trip() {
        let spec = ModelSpec::Npa(NpaModelSpec::ba_tree());
        let text = serde_json::to_string_pretty(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
