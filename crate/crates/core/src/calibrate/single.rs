use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{Minimum, NelderMead, Stop};
use super::{
    edd_distance, CalibrateOptions, CalibratedModel, CalibrationError, CalibrationResult, CalibrationStatus,
    CalibrationTarget, OptimizerTrace, WeightMode,
};
use crate::model::{DegreeDistribution, EdgeDegreeMatrix, IncrementDistribution, NpaModelSpec, WeightFunction};
use crate::solver::{solve_arc_dd, solve_vdd, symmetrize, SolverOptions};

/// Model distributions and their distances to a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub vdd: DegreeDistribution,
    pub edd: EdgeDegreeMatrix,
    pub vdd_tv_error: f64,
    pub distance: f64,
    pub objective: f64,
}

pub(crate) fn solver_options(target: &CalibrationTarget, opts: &CalibrateOptions) -> SolverOptions {
    SolverOptions {
        u_max: target.u,
        k_max: opts.solver.k_max.max(target.u),
        ..opts.solver
    }
}

/// Analytic vertex distribution and edge matrix of `model` on the target
/// window.
pub(crate) fn analytic(
    model: &NpaModelSpec,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
) -> Result<(DegreeDistribution, EdgeDegreeMatrix), CalibrationError> {
    let solver = solver_options(target, opts);
    let vdd = solve_vdd(model, &solver)?;
    let arcs = solve_arc_dd(model, &vdd, &solver)?;
    Ok((vdd.q, symmetrize(&arcs)))
}

pub(crate) fn score(
    vdd: DegreeDistribution,
    edd: EdgeDegreeMatrix,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
) -> Result<Evaluation, CalibrationError> {
    let vdd_tv_error = vdd.total_variation(&target.vdd);
    let distance = edd_distance(&edd, &target.edd, target.min_degree(), target.u)?;
    Ok(Evaluation {
        vdd,
        edd,
        vdd_tv_error,
        distance,
        objective: opts.vdd_weight * vdd_tv_error + distance,
    })
}

/// Scores a single NPA model against `target`.
pub fn evaluate_single(
    model: &NpaModelSpec,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
) -> Result<Evaluation, CalibrationError> {
    let (vdd, edd) = analytic(model, target, opts)?;
    score(vdd, edd, target, opts)
}

const EXPONENT_FLOOR: f64 = 0.2;
const EXPONENT_SPAN: f64 = 1.3;
const LOGIT_CLAMP: f64 = 60.0;

/// Maps unconstrained coordinates to NPA models: the first `count - 1`
/// coordinates are log-ratios `ln(r_k / r_last)` of the increments on
/// `[g, g + count - 1]`; with `power`, one more coordinate sets the weight
/// exponent through a logistic map onto `(0.2, 1.5)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Parameterization {
    pub g: usize,
    pub count: usize,
    pub power: bool,
}

impl Parameterization {
    pub fn new(g: usize, support: usize, power: bool) -> Self {
        Self {
            g,
            count: support.max(g) - g + 1,
            power,
        }
    }

    pub fn dim(&self) -> usize {
        self.count - 1 + usize::from(self.power)
    }

    pub fn increments(&self, x: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = x[..self.count - 1]
            .iter()
            .map(|v| v.clamp(-LOGIT_CLAMP, LOGIT_CLAMP))
            .chain(std::iter::once(0.0))
            .collect();
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logits.iter().map(|v| (v - top).exp()).collect();
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|v| v / sum).collect()
    }

    pub fn exponent(&self, x: &[f64]) -> f64 {
        if self.power {
            let t = x[self.count - 1];
            EXPONENT_FLOOR + EXPONENT_SPAN / (1.0 + (-t).exp())
        } else {
            1.0
        }
    }

    pub fn model(&self, x: &[f64]) -> NpaModelSpec {
        let weights = if self.power {
            WeightFunction::power(self.g, self.exponent(x))
        } else {
            WeightFunction::linear(self.g)
        };
        NpaModelSpec::new(weights, IncrementDistribution::new(self.g, self.increments(x)))
    }

    /// Coordinates reproducing increments `r` (and exponent 1).
    pub fn encode(&self, r: &[f64]) -> Vec<f64> {
        let floor = 1e-12;
        let last = r.get(self.count - 1).copied().unwrap_or(0.0).max(floor).ln();
        let mut x: Vec<f64> = (0..self.count - 1)
            .map(|i| r.get(i).copied().unwrap_or(0.0).max(floor).ln() - last)
            .collect();
        if self.power {
            let p = (1.0 - EXPONENT_FLOOR) / EXPONENT_SPAN;
            x.push((p / (1.0 - p)).ln());
        }
        x
    }

    /// Uniform, `shape`-proportional and `k^-2` starting points.
    pub fn seeds(&self, shape: &DegreeDistribution) -> Vec<Vec<f64>> {
        let degrees = self.g..self.g + self.count;
        let uniform = vec![1.0; self.count];
        let shaped: Vec<f64> = degrees.clone().map(|k| shape.get(k)).collect();
        let power: Vec<f64> = degrees.map(|k| (k as f64).powi(-2)).collect();
        vec![self.encode(&uniform), self.encode(&shaped), self.encode(&power)]
    }
}

pub(crate) struct Fit {
    pub best: Minimum,
    pub evaluations: usize,
    pub restarts: usize,
}

/// Runs one simplex search per seed (in parallel) and keeps the best; ties
/// go to the earlier seed.
pub(crate) fn fit<F>(objective: &F, seeds: &[Vec<f64>], nm: NelderMead) -> Fit
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let runs: Vec<Minimum> = seeds.par_iter().map(|s| nm.minimize(objective, s)).collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let restarts = runs.len();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one seed");
    Fit {
        best,
        evaluations,
        restarts,
    }
}

pub(crate) fn status(value: f64, stop: Stop, opts: &CalibrateOptions) -> CalibrationStatus {
    if value <= opts.tolerance {
        return CalibrationStatus::Converged;
    }
    match stop {
        Stop::Converged => CalibrationStatus::Converged,
        Stop::Stalled => CalibrationStatus::Stalled,
        Stop::Budget => CalibrationStatus::BudgetExhausted,
    }
}

/// Fits a single NPA model.
///
/// Phase 1 keeps `f_k = k` and searches the increments on `[g, support]`.
/// With [`WeightMode::TableFree`] and a phase-1 objective above the
/// tolerance, phase 2 also fits an exponent `f_k = k^alpha`; it replaces the
/// phase-1 model only if strictly better.
pub fn calibrate_single(
    target: &CalibrationTarget,
    mode: WeightMode,
    opts: &CalibrateOptions,
) -> Result<CalibrationResult, CalibrationError> {
    target.check()?;
    let g = target.min_degree();
    let nm = NelderMead::new(opts.max_evaluations, opts.patience);
    let objective_for = |param: Parameterization| {
        move |x: &[f64]| match evaluate_single(&param.model(x), target, opts) {
            Ok(e) => e.objective,
            Err(_) => f64::INFINITY,
        }
    };

    let linear = Parameterization::new(g, opts.support, false);
    let first = fit(&objective_for(linear), &linear.seeds(&target.vdd), nm);
    let mut evaluations = first.evaluations;
    let mut restarts = first.restarts;
    let mut chosen = (linear, first.best, 1u8);

    if mode == WeightMode::TableFree && chosen.1.value > opts.tolerance {
        let power = Parameterization::new(g, opts.support, true);
        let mut seeds = power.seeds(&target.vdd);
        let mut warm = chosen.1.x.clone();
        warm.push(power.encode(&[])[power.dim() - 1]);
        seeds.insert(0, warm);
        let second = fit(&objective_for(power), &seeds, nm);
        evaluations += second.evaluations;
        restarts += second.restarts;
        if second.best.value < chosen.1.value - 1e-12 * chosen.1.value.abs() {
            chosen = (power, second.best, 2);
        }
    }

    let (param, best, phase) = chosen;
    if !best.value.is_finite() {
        return Err(CalibrationError::NoFiniteObjective);
    }
    let model = param.model(&best.x);
    let eval = evaluate_single(&model, target, opts)?;
    Ok(CalibrationResult {
        model: CalibratedModel::Npa(model),
        distance: eval.distance,
        vdd_tv_error: eval.vdd_tv_error,
        objective: eval.objective,
        status: status(eval.objective, best.stop, opts),
        iterations: OptimizerTrace {
            evaluations,
            iterations: best.iterations,
            restarts,
            phase,
            best_per_iteration: best.trace,
        },
        composite: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameterization_round_trip() {
        let p = Parameterization::new(1, 4, false);
        let r = [0.1, 0.2, 0.3, 0.4];
        let back = p.increments(&p.encode(&r));
        for (a, b) in r.iter().zip(&back) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.dim(), 3);
        let q = Parameterization::new(1, 4, true);
        assert!((q.exponent(&q.encode(&r)) - 1.0).abs() < 1e-12);
        assert_eq!(q.dim(), 4);
    }

    #[test]
    fn increments_stay_valid_for_extreme_coordinates() {
        let p = Parameterization::new(1, 3, false);
        let r = p.increments(&[-1e6, 1e6]);
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(r[0] > 0.0);
    }
}
