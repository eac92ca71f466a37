use serde::{Deserialize, Serialize};

use super::validate::Violation;

/// Named rule used for every degree not covered by an explicit table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightRule {
    /// `f_k = k`
    Linear,
    /// `f_k = k^exponent`
    Power { exponent: f64 },
    /// `f_k = value`
    Constant { value: f64 },
}

impl WeightRule {
    pub fn eval(&self, k: usize) -> f64 {
        match *self {
            WeightRule::Linear => k as f64,
            WeightRule::Power { exponent } => (k as f64).powf(exponent),
            WeightRule::Constant { value } => value,
        }
    }

    /// `(slope, intercept)` when the rule is affine in the degree.
    pub fn affine(&self) -> Option<(f64, f64)> {
        match *self {
            WeightRule::Linear => Some((1.0, 0.0)),
            WeightRule::Power { exponent: 1.0 } => Some((1.0, 0.0)),
            WeightRule::Power { exponent: 0.0 } => Some((0.0, 1.0)),
            WeightRule::Constant { value } => Some((0.0, value)),
            WeightRule::Power { .. } => None,
        }
    }
}

/// Vertex weight sequence `f_k`, positive exactly on `[g, M]`.
///
/// Degrees covered by `table` (starting at `g`) take their tabulated value;
/// all other degrees inside the support follow `rule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    min_degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_degree: Option<usize>,
    #[serde(flatten)]
    rule: WeightRule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    table: Vec<f64>,
}

impl WeightFunction {
    pub fn new(min_degree: usize, rule: WeightRule) -> Self {
        Self {
            min_degree,
            max_degree: None,
            rule,
            table: Vec::new(),
        }
    }

    pub fn linear(min_degree: usize) -> Self {
        Self::new(min_degree, WeightRule::Linear)
    }

    pub fn power(min_degree: usize, exponent: f64) -> Self {
        Self::new(min_degree, WeightRule::Power { exponent })
    }

    pub fn constant(min_degree: usize, value: f64) -> Self {
        Self::new(min_degree, WeightRule::Constant { value })
    }

    pub fn with_max_degree(mut self, max_degree: usize) -> Self {
        self.max_degree = Some(max_degree);
        self
    }

    /// Explicit weights for degrees `g, g+1, ...`.
    pub fn with_table(mut self, table: Vec<f64>) -> Self {
        self.table = table;
        self
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.max_degree
    }

    pub fn rule(&self) -> WeightRule {
        self.rule
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn in_support(&self, k: usize) -> bool {
        k >= self.min_degree && self.max_degree.is_none_or(|m| k <= m)
    }

    /// Largest degree whose weight comes from the table, if any.
    pub fn table_end(&self) -> Option<usize> {
        (!self.table.is_empty()).then(|| self.min_degree + self.table.len() - 1)
    }

    pub fn weight(&self, k: usize) -> f64 {
        if !self.in_support(k) {
            return 0.0;
        }
        match self.table.get(k - self.min_degree) {
            Some(&w) => w,
            None => self.rule.eval(k),
        }
    }

    /// Same as [`weight`](Self::weight) but accepts `k = g - 1` style
    /// negative offsets, which are always zero.
    pub(crate) fn weight_signed(&self, k: isize) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.weight(k as usize)
        }
    }

    pub(crate) fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let g = self.min_degree;
        if let Some(m) = self.max_degree {
            if m < g {
                out.push(Violation::SupportBounds { min: g, max: m });
                return out;
            }
        }
        for (i, &w) in self.table.iter().enumerate() {
            let k = g + i;
            let inside = self.max_degree.is_none_or(|m| k <= m);
            if inside && !(w > 0.0 && w.is_finite()) {
                out.push(Violation::WeightSignViolation { degree: k, weight: w });
            }
        }
        // The rule covers every support degree past the table. Rules are
        // monotone or constant, so checking the first degree it covers and a
        // handful of later ones catches every sign problem.
        let first = g + self.table.len();
        let last = self.max_degree.unwrap_or(usize::MAX);
        if first <= last {
            let probes = [first, first + 1, first + 10, first + 1000];
            for &k in probes.iter().filter(|&&k| k <= last) {
                let w = self.rule.eval(k);
                if !(w > 0.0 && w.is_finite()) {
                    out.push(Violation::WeightSignViolation { degree: k, weight: w });
                    break;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_exactly_on_support() {
        let f = WeightFunction::power(2, 0.8).with_max_degree(9);
        for k in 0..30 {
            assert_eq!(f.weight(k) > 0.0, (2..=9).contains(&k), "k = {k}");
        }
        assert!(f.violations().is_empty());
    }

    #[test]
    fn table_then_rule() {
        let f = WeightFunction::linear(1).with_table(vec![5.0, 6.0]);
        assert_eq!(f.weight(0), 0.0);
        assert_eq!(f.weight(1), 5.0);
        assert_eq!(f.weight(2), 6.0);
        assert_eq!(f.weight(3), 3.0);
        assert_eq!(f.weight(1000), 1000.0);
    }

    #[test]
    fn zero_inside_support_is_flagged() {
        let mut table = vec![1.0; 10];
        table[2] = 0.0;
        let f = WeightFunction::linear(1).with_max_degree(10).with_table(table);
        assert_eq!(
            f.violations(),
            vec![Violation::WeightSignViolation { degree: 3, weight: 0.0 }]
        );
    }

    #[test]
    fn linear_rule_cannot_start_at_zero() {
        let f = WeightFunction::linear(0);
        assert!(matches!(
            f.violations()[..],
            [Violation::WeightSignViolation { degree: 0, .. }]
        ));
        assert!(WeightFunction::constant(0, 1.0).violations().is_empty());
    }

    #[test]
    fn affine_detection() {
        assert_eq!(WeightRule::Linear.affine(), Some((1.0, 0.0)));
        assert_eq!(WeightRule::Power { exponent: 1.0 }.affine(), Some((1.0, 0.0)));
        assert_eq!(WeightRule::Power { exponent: 0.8 }.affine(), None);
        assert_eq!(WeightRule::Constant { value: 2.0 }.affine(), Some((0.0, 2.0)));
    }

    #[test]
    fn json_shape() {
        let f = WeightFunction::power(1, 1.2).with_max_degree(200);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"min_degree":1,"max_degree":200,"rule":"power","exponent":1.2}"#
        );
        let back: WeightFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
