use serde::{Deserialize, Serialize};

use super::{SolverError, SolverOptions, VddSolution};
use crate::model::{EdgeDegreeMatrix, MatrixKind, NpaModelSpec, Validate};

/// Which form of the arc degree recurrence to run.
///
/// Both share the numerator
/// `f_{k-1} (l r_l Q_{k-1} + m^2 Q_{l,k-1}) + f_{l-1} m^2 Q_{l-1,k}`
/// and differ in the first denominator term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ArcRecurrence {
    /// Denominator `m (<f> + m f_k + m f_l)`, the stationary solution of the
    /// arc-count balance equations. Sums to one.
    #[default]
    MeanWeight,
    /// Denominator `m (l f_l + m f_k + m f_l)`. Kept for comparison; its
    /// total mass is not one (about 1.18 on the BA tree).
    AsPrinted,
}

/// Stationary arc degree distribution `Q_{l,k}`: the probability that a
/// random arc leaves a vertex of degree `l` and enters one of degree `k`.
///
/// Rows are filled in ascending `l`, each row in ascending `k`, so the
/// `(l - 1, k)` and `(l, k - 1)` cells are always ready. Any term at degree
/// `g - 1` is zero.
pub fn solve_arc_dd(
    model: &NpaModelSpec,
    vdd: &VddSolution,
    opts: &SolverOptions,
) -> Result<EdgeDegreeMatrix, SolverError> {
    model.check()?;
    opts.check()?;
    let g = model.weights.min_degree();
    let u = opts.u_max.max(g);
    if vdd.q.min_degree() != g || vdd.q.max_degree() + 1 < u {
        return Err(SolverError::VddMismatch {
            needed: u,
            available: vdd.q.max_degree(),
        });
    }

    let m = model.m();
    let m2 = m * m;
    let phi = vdd.mean_weight;
    let f = |k: isize| model.weights.weight_signed(k);
    let q = |k: isize| if k < 0 { 0.0 } else { vdd.q.get(k as usize) };

    let mut out = EdgeDegreeMatrix::zeros(g, u, MatrixKind::Arc);
    let dim = out.dim();
    let mut prev_row = vec![0.0; dim];
    let mut row = vec![0.0; dim];
    for l in g..=u {
        let li = l as isize;
        let f_l = f(li);
        let f_lm1 = f(li - 1);
        let r_l = model.increments.prob(l);
        let first = match opts.arc_recurrence {
            ArcRecurrence::MeanWeight => phi,
            ArcRecurrence::AsPrinted => l as f64 * f_l,
        };
        let mut left = 0.0;
        for (j, k) in (g..=u).enumerate() {
            let ki = k as isize;
            let f_km1 = f(ki - 1);
            let num = f_km1 * (l as f64 * r_l * q(ki - 1) + m2 * left) + f_lm1 * m2 * prev_row[j];
            let den = m * (first + m * f(ki) + m * f_l);
            let value = if num == 0.0 {
                0.0
            } else if den > 0.0 {
                num / den
            } else {
                return Err(SolverError::NonFinite { l, k });
            };
            row[j] = value;
            left = value;
        }
        for (j, &v) in row.iter().enumerate() {
            out.set(l, g + j, v);
        }
        std::mem::swap(&mut prev_row, &mut row);
    }

    out.close_mass();
    let deficit = out.truncation_mass();
    if let Some(max) = opts.max_edd_deficit {
        if deficit > max {
            return Err(SolverError::TruncationTooSevere { deficit, extent: u });
        }
        if deficit < -max {
            return Err(SolverError::MassExcess { total: 1.0 - deficit });
        }
    }
    Ok(out)
}

/// `Theta = (Q + Q^T) / 2`. Output is symmetric bit for bit and keeps the
/// input's total mass.
pub fn symmetrize(q: &EdgeDegreeMatrix) -> EdgeDegreeMatrix {
    let g = q.min_degree();
    let u = q.extent();
    let mut out = EdgeDegreeMatrix::zeros(g, u, MatrixKind::Edge);
    for l in g..=u {
        for k in g..=u {
            out.set(l, k, 0.5 * (q.get(l, k) + q.get(k, l)));
        }
    }
    out.set_truncation_mass(q.truncation_mass());
    out
}
