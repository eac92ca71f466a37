use serde::{Deserialize, Serialize};

use super::{SolverError, SolverOptions};
use crate::model::{DegreeDistribution, NpaModelSpec, Validate};

/// Stationary vertex degree distribution together with its scalar moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VddSolution {
    pub q: DegreeDistribution,
    /// Mean vertex weight `<f>`.
    pub mean_weight: f64,
    /// Mean vertex degree `<k>`, including the closed-form tail when one
    /// is available.
    pub mean_degree: f64,
    /// `|<k> - 2m|`.
    pub control_residual: f64,
    /// `|<f> - sum_k f_k Q_k|` at the returned `<f>`.
    pub fixed_point_residual: f64,
    /// Contribution of degrees beyond `k_max`, when the weight rule there is
    /// affine and the tail can be summed exactly.
    pub tail: Option<TailEstimate>,
    pub iterations: usize,
}

/// Sums over the degrees above `k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub mass: f64,
    pub degree_moment: f64,
    pub weight_moment: f64,
}

/// Precomputed weights and increment probabilities on `[g, k_max]`.
pub(crate) struct Recurrence {
    pub g: usize,
    pub m: f64,
    /// `f_k` for `k = g ..= k_max`.
    pub f: Vec<f64>,
    /// `r_k` for `k = g ..= k_max`.
    pub r: Vec<f64>,
    /// `(a, b)` with `f_k = a k + b` for every `k > k_max`.
    tail_rule: Option<(f64, f64)>,
    /// Prefix length the root search sweeps. With an affine tail the
    /// closed-form sums are exact from any degree past the increments and
    /// the weight table, so the search stops there.
    search_len: usize,
}

struct Sweep {
    weight_sum: f64,
    tail: Option<TailEstimate>,
}

impl Recurrence {
    pub fn new(model: &NpaModelSpec, k_max: usize) -> Self {
        let g = model.weights.min_degree();
        let k_max = k_max.max(g);
        let f = (g..=k_max).map(|k| model.weights.weight(k)).collect();
        let r = (g..=k_max).map(|k| model.increments.prob(k)).collect();
        let h = model.increments.support_max().unwrap_or(g);
        let beyond_table = model.weights.table_end().is_none_or(|t| t <= k_max);
        let tail_rule = (model.weights.max_degree().is_none() && beyond_table && h <= k_max)
            .then(|| model.weights.rule().affine())
            .flatten();
        let len = k_max - g + 1;
        let search_len = match tail_rule {
            Some(_) => {
                let end = h.max(model.weights.table_end().unwrap_or(g)).max(g) + 1;
                (end - g + 1).min(len)
            }
            None => len,
        };
        Self {
            g,
            m: model.m(),
            f,
            r,
            tail_rule,
            search_len,
        }
    }

    pub fn k_max(&self) -> usize {
        self.g + self.f.len() - 1
    }

    /// Runs `Q_k = (r_k phi + m f_{k-1} Q_{k-1}) / (phi + m f_k)` from
    /// `Q_{g-1} = 0` over the first `len` degrees and accumulates
    /// `sum f_k Q_k`.
    fn sweep(&self, phi: f64, len: usize, mut out: Option<&mut Vec<f64>>) -> Sweep {
        let m = self.m;
        let mut prev_fq = 0.0;
        let mut weight_sum = 0.0;
        let mut last_q = 0.0;
        if let Some(v) = out.as_deref_mut() {
            v.clear();
        }
        for (&f, &r) in self.f[..len].iter().zip(&self.r[..len]) {
            let q = (r * phi + m * prev_fq) / (phi + m * f);
            prev_fq = f * q;
            weight_sum += prev_fq;
            last_q = q;
            if let Some(v) = out.as_deref_mut() {
                v.push(q);
            }
        }
        let tail = self.tail_rule.map(|(a, b)| {
            // With r_k = 0 and f_k = a k + b above K, summing the recurrence
            // (and k times the recurrence) over k > K telescopes to
            //   phi T0 = m f_K Q_K
            //   (phi - m a) T1 = m ((K + 1) f_K Q_K + b T0).
            let k = (self.g + len - 1) as f64;
            let f_k = self.f[len - 1];
            let mass = m * f_k * last_q / phi;
            let degree_moment = if phi > m * a {
                m * ((k + 1.0) * f_k * last_q + b * mass) / (phi - m * a)
            } else {
                f64::INFINITY
            };
            TailEstimate {
                mass,
                degree_moment,
                weight_moment: if a == 0.0 {
                    b * mass
                } else {
                    a * degree_moment + b * mass
                },
            }
        });
        Sweep { weight_sum, tail }
    }

    /// `sum_k f_k Q_k(phi) - phi`, tail included.
    fn excess(&self, phi: f64) -> f64 {
        let s = self.sweep(phi, self.search_len, None);
        s.weight_sum + s.tail.map_or(0.0, |t| t.weight_moment) - phi
    }
}

/// Solves the stationary vertex degree distribution of `model`.
///
/// `<f>` is the fixed point of `phi -> sum_k f_k Q_k(phi)`; it is bracketed
/// and bisected, with damped direct iteration as a fallback when no sign
/// change can be found.
pub fn solve_vdd(model: &NpaModelSpec, opts: &SolverOptions) -> Result<VddSolution, SolverError> {
    model.check()?;
    opts.check()?;
    let rec = Recurrence::new(model, opts.k_max);
    let (phi, iterations) = find_mean_weight(&rec, opts)?;

    let mut probs = Vec::with_capacity(rec.f.len());
    let sweep = rec.sweep(phi, rec.f.len(), Some(&mut probs));
    let q = DegreeDistribution::with_deficit(rec.g, probs);
    let truncation = q.truncation_mass();
    if truncation > opts.max_vdd_truncation {
        return Err(SolverError::TruncationTooSevere {
            deficit: truncation,
            extent: rec.k_max(),
        });
    }
    if truncation < -opts.max_vdd_truncation {
        return Err(SolverError::MassExcess { total: 1.0 - truncation });
    }
    let tail = sweep.tail;
    let mean_degree = q.mean() + tail.map_or(0.0, |t| t.degree_moment);
    let weight_sum = sweep.weight_sum + tail.map_or(0.0, |t| t.weight_moment);
    Ok(VddSolution {
        q,
        mean_weight: phi,
        mean_degree,
        control_residual: (mean_degree - 2.0 * rec.m).abs(),
        fixed_point_residual: (phi - weight_sum).abs(),
        tail,
        iterations,
    })
}

fn find_mean_weight(rec: &Recurrence, opts: &SolverOptions) -> Result<(f64, usize), SolverError> {
    let tol = opts.fp_tolerance;
    let f_max = rec.f.iter().copied().fold(0.0, f64::max);
    if f_max <= 0.0 {
        return Err(SolverError::NoConvergence {
            reason: "all weights are zero on the solved range".into(),
        });
    }

    // The mean weight never exceeds the largest weight, so excess(f_max) <= 0
    // whenever the distribution is not truncated; grow hi just in case.
    let mut evals = 0;
    let mut hi = f_max;
    while rec.excess(hi) > 0.0 && evals < 64 {
        hi *= 2.0;
        evals += 1;
    }
    let mut lo = hi;
    let mut bracketed = false;
    while lo > f_max * 1e-15 && evals < 200 {
        lo *= 0.5;
        evals += 1;
        if rec.excess(lo) > 0.0 {
            bracketed = true;
            break;
        }
    }

    if bracketed {
        // Illinois regula falsi on the bracket; excess is decreasing in phi.
        let mut e_lo = rec.excess(lo);
        let mut e_hi = rec.excess(hi);
        let mut side = 0i8;
        let mut iter = 0;
        let mut phi = 0.5 * (lo + hi);
        while iter < opts.fp_max_iter {
            iter += 1;
            phi = if e_lo.is_finite() && e_hi.is_finite() && e_lo != e_hi {
                (lo * e_hi - hi * e_lo) / (e_hi - e_lo)
            } else {
                0.5 * (lo + hi)
            };
            if !(phi > lo && phi < hi) {
                phi = 0.5 * (lo + hi);
            }
            let v = rec.excess(phi);
            if v.abs() <= tol * 1e-3 || hi - lo <= tol * 1e-3 * phi.max(1.0) {
                break;
            }
            if v > 0.0 {
                lo = phi;
                e_lo = v;
                if side == 1 {
                    e_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = phi;
                e_hi = v;
                if side == -1 {
                    e_lo *= 0.5;
                }
                side = -1;
            }
        }
        if rec.excess(phi).abs() < tol {
            return Ok((phi, evals + iter));
        }
    }

    log::debug!("no bracket for <f>; falling back to damped iteration");
    let mut phi = f_max.min(2.0 * rec.m).max(f_max * 1e-6);
    for iter in 0..opts.fp_max_iter {
        let v = rec.excess(phi);
        if !v.is_finite() {
            break;
        }
        if v.abs() < tol {
            return Ok((phi, evals + iter));
        }
        phi += 0.5 * v;
        if phi <= 0.0 {
            break;
        }
    }
    Err(SolverError::NoConvergence {
        reason: format!("mean weight did not settle within {} iterations", opts.fp_max_iter),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IncrementDistribution, WeightFunction};

    fn ba_oracle(k: usize) -> f64 {
        let k = k as f64;
        4.0 / (k * (k + 1.0) * (k + 2.0))
    }

    #[test]
    fn ba_tree_first_terms() {
        let sol = solve_vdd(&NpaModelSpec::ba_tree(), &SolverOptions::default()).unwrap();
        assert!((sol.q.get(1) - 2.0 / 3.0).abs() < 1e-12);
        assert!((sol.q.get(2) - 1.0 / 6.0).abs() < 1e-12);
        assert!((sol.q.get(3) - 1.0 / 15.0).abs() < 1e-12);
        assert!((sol.mean_weight - 2.0).abs() < 1e-10);
        assert!(sol.control_residual < 1e-9);
    }

    #[test]
    fn ba_tree_matches_closed_form() {
        let sol = solve_vdd(&NpaModelSpec::ba_tree(), &SolverOptions::default()).unwrap();
        let worst = (1..=100)
            .map(|k| (sol.q.get(k) - ba_oracle(k)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "max error {worst}");
    }

    #[test]
    fn mass_closes() {
        let model = NpaModelSpec::new(
            WeightFunction::power(1, 0.8),
            IncrementDistribution::new(1, vec![0.5, 0.5]),
        );
        let sol = solve_vdd(&model, &SolverOptions::default()).unwrap();
        assert!((sol.q.stored_mass() + sol.q.truncation_mass() - 1.0).abs() < 1e-12);
        assert!((sol.mean_weight - (0..=10_000).map(|k| model.weights.weight(k) * sol.q.get(k)).sum::<f64>()).abs() < 1e-10);
    }

    #[test]
    fn saturated_weights_hit_control_equation() {
        let model = NpaModelSpec::new(
            WeightFunction::power(1, 1.2).with_max_degree(200),
            IncrementDistribution::new(1, vec![0.5, 0.0, 0.5]),
        );
        let sol = solve_vdd(&model, &SolverOptions::default()).unwrap();
        assert!(sol.tail.is_none());
        assert!(sol.control_residual < 1e-8, "{}", sol.control_residual);
        // Nothing above M + 1 = 201 except fresh vertices.
        assert!(sol.q.get(202) == 0.0);
    }

    #[test]
    fn too_small_kmax_is_reported() {
        let opts = SolverOptions {
            k_max: 20,
            u_max: 10,
            ..SolverOptions::default()
        };
        let err = solve_vdd(&NpaModelSpec::ba_tree(), &opts).unwrap_err();
        assert!(matches!(err, SolverError::TruncationTooSevere { .. }));
    }
}
