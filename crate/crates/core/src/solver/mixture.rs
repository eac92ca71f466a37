//! Degree distributions of multi-component graphs.
//!
//! The vertex distribution of a disjoint union is the vertex-fraction
//! mixture of the component distributions. Edge distributions mix with the
//! components' edge shares `gamma_i = m_i rho_i / m`.

use thiserror::Error;

use crate::model::{DegreeDistribution, EdgeDegreeMatrix, MatrixKind};

const CONVEX_TOLERANCE: f64 = 1e-12;
const GAMMA_TOLERANCE: f64 = 1e-9;
/// Largest negative value `complement_vdd` clamps to zero.
pub const COMPLEMENT_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixtureError {
    #[error("mixture weights must be non-negative and sum to 1 (sum = {sum})")]
    WeightsNotConvex { sum: f64 },
    #[error("edge shares sum to {sum}, not 1; total m is inconsistent")]
    GammaNotConvex { sum: f64 },
    #[error("fraction {rho} is outside (0, 1)")]
    RhoOutOfRange { rho: f64 },
    #[error("Q_{degree} = {total} is below rho * Q'_{degree}; complement would be {value}")]
    InfeasibleComplement { degree: usize, total: f64, value: f64 },
    #[error("complement mean {value} is not positive")]
    NonPositiveResult { value: f64 },
    #[error("edge mixture needs edge matrices, got an arc matrix")]
    KindMismatch,
    #[error("nothing to mix")]
    Empty,
}

fn check_convex(weights: impl Iterator<Item = f64>) -> Result<(), MixtureError> {
    let mut sum = 0.0;
    for w in weights {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(MixtureError::WeightsNotConvex { sum: f64::NAN });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > CONVEX_TOLERANCE {
        return Err(MixtureError::WeightsNotConvex { sum });
    }
    Ok(())
}

/// `Q_k = sum_i rho_i Q^(i)_k`. Parts with zero weight are ignored.
pub fn mix_vdd(parts: &[(&DegreeDistribution, f64)]) -> Result<DegreeDistribution, MixtureError> {
    check_convex(parts.iter().map(|p| p.1))?;
    let live: Vec<_> = parts.iter().filter(|p| p.1 > 0.0).collect();
    let lo = live.iter().map(|p| p.0.min_degree()).min().ok_or(MixtureError::Empty)?;
    let hi = live.iter().map(|p| p.0.max_degree()).max().unwrap_or(lo);
    let probs = (lo..=hi)
        .map(|k| live.iter().map(|(q, rho)| rho * q.get(k)).sum())
        .collect();
    let truncation = live.iter().map(|(q, rho)| rho * q.truncation_mass()).sum();
    Ok(DegreeDistribution::new(lo, probs, truncation))
}

/// `m'' = (m - rho m') / (1 - rho)`, the mean increment of the complement
/// once the first component's share is removed.
pub fn complement_mean(m: f64, m_first: f64, rho: f64) -> Result<f64, MixtureError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(MixtureError::RhoOutOfRange { rho });
    }
    let value = (m - rho * m_first) / (1.0 - rho);
    if value > 0.0 {
        Ok(value)
    } else {
        Err(MixtureError::NonPositiveResult { value })
    }
}

/// Inverts the vertex mixture: `Q''_k = (Q_k - rho Q'_k) / (1 - rho)`.
///
/// Negative cells no larger than [`COMPLEMENT_CLAMP`] are set to zero and
/// the result is renormalized; anything more negative means `rho` is too
/// large for the total distribution.
pub fn complement_vdd(
    q_total: &DegreeDistribution,
    q_first: &DegreeDistribution,
    rho: f64,
) -> Result<DegreeDistribution, MixtureError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(MixtureError::RhoOutOfRange { rho });
    }
    let lo = q_total.min_degree().min(q_first.min_degree());
    let hi = q_total.max_degree().max(q_first.max_degree());
    let scale = 1.0 - rho;
    let mut clamped = false;
    let mut probs = Vec::with_capacity(hi - lo + 1);
    for k in lo..=hi {
        let total = q_total.get(k);
        let value = (total - rho * q_first.get(k)) / scale;
        if value < 0.0 {
            if value < -COMPLEMENT_CLAMP {
                return Err(MixtureError::InfeasibleComplement {
                    degree: k,
                    total,
                    value,
                });
            }
            clamped = true;
            probs.push(0.0);
        } else {
            probs.push(value);
        }
    }
    let mut truncation =
        (q_total.truncation_mass() - rho * q_first.truncation_mass()) / scale;
    if truncation < 0.0 {
        if truncation < -COMPLEMENT_CLAMP {
            return Err(MixtureError::InfeasibleComplement {
                degree: hi + 1,
                total: q_total.truncation_mass(),
                value: truncation,
            });
        }
        clamped = true;
        truncation = 0.0;
    }
    if clamped {
        let stored: f64 = probs.iter().sum();
        let factor = (1.0 - truncation) / stored;
        probs.iter_mut().for_each(|p| *p *= factor);
    }
    // Drop zero cells at either end so the result does not inherit the
    // first component's range.
    let first = probs.iter().position(|&p| p != 0.0).unwrap_or(0);
    let last = probs.iter().rposition(|&p| p != 0.0).unwrap_or(0);
    let probs = probs[first..=last.max(first)].to_vec();
    Ok(DegreeDistribution::new(lo + first, probs, truncation))
}

/// Edge shares `gamma_i = m_i rho_i / m_total`.
pub fn edge_shares(parts: &[(f64, f64)], m_total: f64) -> Result<Vec<f64>, MixtureError> {
    let gammas: Vec<f64> = parts.iter().map(|&(m, rho)| m * rho / m_total).collect();
    let sum: f64 = gammas.iter().sum();
    if (sum - 1.0).abs() > GAMMA_TOLERANCE || gammas.iter().any(|g| g.is_nan() || *g < 0.0) {
        return Err(MixtureError::GammaNotConvex { sum });
    }
    Ok(gammas)
}

/// `Theta = sum_i gamma_i Theta^(i)` with `gamma_i = m_i rho_i / m_total`.
///
/// Each part is `(matrix, m_i, rho_i)`.
pub fn mix_edd(
    parts: &[(&EdgeDegreeMatrix, f64, f64)],
    m_total: f64,
) -> Result<EdgeDegreeMatrix, MixtureError> {
    check_convex(parts.iter().map(|p| p.2))?;
    if parts.iter().any(|p| p.0.kind() != MatrixKind::Edge) {
        return Err(MixtureError::KindMismatch);
    }
    let shares: Vec<(f64, f64)> = parts.iter().map(|p| (p.1, p.2)).collect();
    let gammas = edge_shares(&shares, m_total)?;
    let live: Vec<(&EdgeDegreeMatrix, f64)> = parts
        .iter()
        .zip(&gammas)
        .filter(|(_, &g)| g > 0.0)
        .map(|(p, &g)| (p.0, g))
        .collect();
    let lo = live.iter().map(|p| p.0.min_degree()).min().ok_or(MixtureError::Empty)?;
    let hi = live.iter().map(|p| p.0.extent()).max().unwrap_or(lo);
    let mut out = EdgeDegreeMatrix::zeros(lo, hi, MatrixKind::Edge);
    for l in lo..=hi {
        for k in lo..=hi {
            out.set(l, k, live.iter().map(|(t, g)| g * t.get(l, k)).sum());
        }
    }
    out.set_truncation_mass(live.iter().map(|(t, g)| g * t.truncation_mass()).sum());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(min: usize, w: &[f64]) -> DegreeDistribution {
        let s: f64 = w.iter().sum();
        DegreeDistribution::with_deficit(min, w.iter().map(|x| x / s).collect())
    }

    #[test]
    fn degenerate_mixture_is_exact() {
        let a = dist(1, &[3.0, 2.0, 1.0]);
        let b = dist(2, &[1.0; 10]);
        assert_eq!(mix_vdd(&[(&a, 1.0), (&b, 0.0)]).unwrap(), a);
    }

    #[test]
    fn same_distribution_is_idempotent() {
        let a = dist(1, &[3.0, 2.0, 1.0]);
        let mixed = mix_vdd(&[(&a, 0.3), (&a, 0.7)]).unwrap();
        for k in 1..=3 {
            assert!((mixed.get(k) - a.get(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn non_convex_weights() {
        let a = dist(1, &[1.0]);
        assert!(matches!(
            mix_vdd(&[(&a, 0.5), (&a, 0.4)]),
            Err(MixtureError::WeightsNotConvex { .. })
        ));
    }

    #[test]
    fn complement_mean_values() {
        assert_eq!(complement_mean(2.0, 3.0, 0.5).unwrap(), 1.0);
        for rho in [0.1, 0.5, 0.9] {
            assert!((complement_mean(2.5, 2.5, rho).unwrap() - 2.5).abs() < 1e-14);
        }
        let m2 = complement_mean(3.6765, 1.0, 0.225).unwrap();
        assert!((m2 - 4.453_548_387_096_774).abs() < 1e-12, "{m2}");
        assert!(matches!(
            complement_mean(1.0, 3.0, 0.5),
            Err(MixtureError::NonPositiveResult { .. })
        ));
    }

    #[test]
    fn small_rho_complement_is_total() {
        let a = dist(1, &[3.0, 2.0, 1.0]);
        let b = dist(1, &[1.0, 1.0]);
        let c = complement_vdd(&a, &b, 1e-15).unwrap();
        for k in 1..=3 {
            assert!((c.get(k) - a.get(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn infeasible_complement() {
        let total = dist(1, &[1.0, 1.0]);
        let first = dist(1, &[1.0]);
        assert!(matches!(
            complement_vdd(&total, &first, 0.6),
            Err(MixtureError::InfeasibleComplement { degree: 1, .. })
        ));
    }

    #[test]
    fn gamma_for_tree_component() {
        let rho: f64 = 0.225;
        let m = 3.6765;
        let m2 = complement_mean(m, 1.0, rho).unwrap();
        let g = edge_shares(&[(1.0, rho), (m2, 1.0 - rho)], m).unwrap();
        assert!((g[0] - rho / m).abs() < 1e-15);
        assert!((g[0] - 0.061_199_51).abs() < 1e-8);
        assert!(matches!(
            edge_shares(&[(1.0, rho), (m2, 1.0 - rho)], 3.0),
            Err(MixtureError::GammaNotConvex { .. })
        ));
    }

    #[test]
    fn edge_mixture_stays_symmetric() {
        let mut a = EdgeDegreeMatrix::zeros(1, 3, MatrixKind::Edge);
        a.set(1, 2, 0.25);
        a.set(2, 1, 0.25);
        a.set(3, 3, 0.5);
        let mut b = EdgeDegreeMatrix::zeros(1, 2, MatrixKind::Edge);
        b.set(2, 2, 1.0);
        let mixed = mix_edd(&[(&a, 1.0, 0.5), (&b, 3.0, 0.5)], 2.0).unwrap();
        assert!(mixed.is_symmetric());
        assert!((mixed.stored_mass() - 1.0).abs() < 1e-15);
        assert!((mixed.get(2, 2) - 0.75).abs() < 1e-15);
        assert_eq!(mix_edd(&[(&a, 2.0, 1.0)], 2.0).unwrap(), a);
    }

    proptest! {
        #[test]
        fn complement_inverts_mixture(
            w1 in prop::collection::vec(0.01f64..1.0, 1..30),
            w2 in prop::collection::vec(0.01f64..1.0, 1..30),
            min1 in 1usize..3,
            min2 in 1usize..3,
            rho in 0.01f64..0.99,
        ) {
            let q1 = dist(min1, &w1);
            let q2 = dist(min2, &w2);
            let total = mix_vdd(&[(&q1, rho), (&q2, 1.0 - rho)]).unwrap();
            let back = complement_vdd(&total, &q1, rho).unwrap();
            let hi = q1.max_degree().max(q2.max_degree()) + 1;
            for k in 0..=hi {
                prop_assert!((back.get(k) - q2.get(k)).abs() < 1e-12, "k = {}", k);
            }
        }
    }
}
