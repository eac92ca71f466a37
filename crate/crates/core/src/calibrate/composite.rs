use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nelder_mead::NelderMead;
use super::single::{analytic, fit, score, status, Evaluation, Parameterization};
use super::{
    CalibrateOptions, CalibratedModel, CalibrationError, CalibrationResult, CalibrationTarget, OptimizerTrace,
};
use crate::growth::{grow_aer_detailed, measure_edd, measure_vdd, RngStream};
use crate::model::{
    AerModelSpec, Component, ComponentModel, CompositeSpec, DegreeDistribution, EdgeDegreeMatrix, Graph,
    NpaModelSpec,
};
use crate::solver::{complement_mean, complement_vdd, edge_shares, mix_edd, mix_vdd};

/// Which AER graph the Monte-Carlo estimate is measured on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AerVariant {
    /// Every vertex, isolated ones included.
    Raw,
    /// Isolated vertices dropped, isolated pairs kept.
    #[default]
    IsolatesRemoved,
    /// Isolated vertices and isolated pairs dropped, as generated.
    Pruned,
}

/// Monte-Carlo degree distributions of an AER component, pooled over
/// replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AerEstimate {
    pub mean_degree: f64,
    pub n1: usize,
    pub replications: usize,
    pub variant: AerVariant,
    pub stream: RngStream,
    pub vdd: DegreeDistribution,
    pub edd: EdgeDegreeMatrix,
    /// Half the pooled mean degree.
    pub mean_increment: f64,
}

pub fn estimate_aer(
    mean_degree: f64,
    n1: usize,
    replications: usize,
    u: usize,
    variant: AerVariant,
    stream: &RngStream,
) -> Result<AerEstimate, CalibrationError> {
    let spec = AerModelSpec::new(n1, mean_degree);
    let graphs = (0..replications.max(1) as u64)
        .into_par_iter()
        .map(|rep| {
            let out = grow_aer_detailed(&spec, &stream.replication(rep))?;
            Ok(match variant {
                AerVariant::Raw => out.raw,
                AerVariant::IsolatesRemoved => out.without_isolates,
                AerVariant::Pruned => out.pruned,
            })
        })
        .collect::<Result<Vec<Graph>, CalibrationError>>()?;
    let mut pooled = Graph::new(0, false);
    for g in &graphs {
        pooled.append(g);
    }
    let vdd = measure_vdd(&pooled)?;
    let edd = measure_edd(&pooled, u)?;
    Ok(AerEstimate {
        mean_degree,
        n1,
        replications: replications.max(1),
        variant,
        stream: *stream,
        mean_increment: vdd.mean() / 2.0,
        vdd,
        edd,
    })
}

/// The fixed first component of a composite calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FirstComponent {
    BaTree,
    Aer(AerEstimate),
}

impl FirstComponent {
    pub fn model(&self) -> ComponentModel {
        match self {
            FirstComponent::BaTree => ComponentModel::BaTree,
            FirstComponent::Aer(e) => ComponentModel::Aer {
                mean_degree: e.mean_degree,
            },
        }
    }
}

struct FirstData {
    vdd: DegreeDistribution,
    edd: EdgeDegreeMatrix,
    m: f64,
}

fn first_data(
    first: &FirstComponent,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
) -> Result<FirstData, CalibrationError> {
    match first {
        FirstComponent::BaTree => {
            let (vdd, edd) = analytic(&NpaModelSpec::ba_tree(), target, opts)?;
            Ok(FirstData { vdd, edd, m: 1.0 })
        }
        FirstComponent::Aer(e) => {
            if e.edd.extent() < target.u {
                return Err(CalibrationError::WindowExceedsMatrix {
                    min: e.edd.min_degree(),
                    u: target.u,
                    extent: e.edd.extent(),
                });
            }
            Ok(FirstData {
                vdd: e.vdd.clone(),
                edd: e.edd.clone(),
                m: e.mean_increment,
            })
        }
    }
}

fn evaluate_mixed(
    first: &FirstData,
    complement: &NpaModelSpec,
    rho: f64,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
) -> Result<(Evaluation, f64), CalibrationError> {
    let (vdd, edd) = analytic(complement, target, opts)?;
    let m2 = complement.m();
    let m_total = rho * first.m + (1.0 - rho) * m2;
    let vdd = mix_vdd(&[(&first.vdd, rho), (&vdd, 1.0 - rho)])?;
    let edd = mix_edd(&[(&first.edd, first.m, rho), (&edd, m2, 1.0 - rho)], m_total)?;
    Ok((score(vdd, edd, target, opts)?, m_total))
}

/// Scores the composite of `first` (vertex fraction `rho`) and
/// `complement` against `target`: vertex distributions mix by `rho`, edge
/// matrices by the edge shares.
pub fn evaluate_composite(
    first: &FirstComponent,
    complement: &NpaModelSpec,
    rho: f64,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
) -> Result<Evaluation, CalibrationError> {
    let data = first_data(first, target, opts)?;
    evaluate_mixed(&data, complement, rho, target, opts).map(|e| e.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEvaluation {
    pub rho: f64,
    pub objective: f64,
    pub outer_iteration: usize,
    /// Whether the complement got a full restart search at this point.
    pub full_fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeDiagnostics {
    pub first: FirstComponent,
    pub rho: f64,
    /// Edge share of the first component, `m' rho / m`.
    pub gamma: f64,
    pub m_first: f64,
    pub m_complement: f64,
    pub m_total: f64,
    /// Mean increment of the target.
    pub m_target: f64,
    pub rho_trace: Vec<RhoEvaluation>,
}

fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

struct Candidate {
    rho: f64,
    x: Vec<f64>,
    value: f64,
    stop: super::nelder_mead::Stop,
    iterations: usize,
    trace: Vec<f64>,
}

/// Fits a two-component composite: `first` is fixed, the complement is an
/// NPA graph with `f_k = k` whose increments on `[g, support]` are fitted.
///
/// Each outer iteration fits the complement at the current fraction with
/// full restarts, then line-searches the fraction on a grid of
/// `rho_step` (refined by `rho_refine` around the best point). During the
/// line search every grid point refits the complement briefly, warm-started
/// from the current one. Fractions whose complement vertex distribution
/// would be negative are skipped.
pub fn calibrate_composite(
    target: &CalibrationTarget,
    first: &FirstComponent,
    opts: &CalibrateOptions,
) -> Result<CalibrationResult, CalibrationError> {
    target.check()?;
    let data = first_data(first, target, opts)?;
    let g = target.min_degree();
    let m_target = target.mean_increment();
    let param = Parameterization::new(g, opts.support, false);

    let complement_shape = |rho: f64| -> Option<DegreeDistribution> {
        if !(rho > 0.0 && rho < 1.0) {
            return None;
        }
        let m2 = complement_mean(m_target, data.m, rho).ok()?;
        if m2 < g as f64 {
            return None;
        }
        match complement_vdd(&target.vdd, &data.vdd, rho) {
            Ok(q) => Some(q),
            Err(e) => {
                log::debug!("rho = {rho} skipped: {e}");
                None
            }
        }
    };
    let grid: Vec<f64> = (1..)
        .map(|i| snap(i as f64 * opts.rho_step))
        .take_while(|&r| r < 1.0)
        .filter(|&r| complement_shape(r).is_some())
        .collect();
    if grid.is_empty() {
        return Err(CalibrationError::AllRhoInfeasible);
    }

    let objective_at = |rho: f64| {
        let data = &data;
        move |x: &[f64]| match evaluate_mixed(data, &param.model(x), rho, target, opts) {
            Ok((e, _)) => e.objective,
            Err(_) => f64::INFINITY,
        }
    };
    let full = NelderMead::new(opts.max_evaluations, opts.patience);
    let short = NelderMead::new(opts.rho_search_evaluations, opts.patience).with_step(0.25);

    let mut rho = match opts.initial_rho {
        Some(r) if complement_shape(r).is_some() => r,
        Some(r) if !opts.search_rho => {
            log::warn!("fixed fraction {r} leaves no feasible complement");
            return Err(CalibrationError::AllRhoInfeasible);
        }
        _ => *grid
            .iter()
            .min_by(|a, b| (*a - 0.5).abs().total_cmp(&(*b - 0.5).abs()))
            .unwrap(),
    };
    let mut current: Option<Vec<f64>> = None;
    let mut best: Option<Candidate> = None;
    let mut trace = Vec::new();
    let mut evaluations = 0;
    let mut restarts = 0;
    let keep = |c: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().is_none_or(|b| c.value < b.value) {
            *best = Some(c);
        }
    };

    for outer in 0..opts.outer_iterations.max(1) {
        let shape = complement_shape(rho).expect("current fraction is feasible");
        let mut seeds = param.seeds(&shape);
        if let Some(x) = &current {
            seeds.insert(0, x.clone());
        }
        let fitted = fit(&objective_at(rho), &seeds, full);
        evaluations += fitted.evaluations;
        restarts += fitted.restarts;
        trace.push(RhoEvaluation {
            rho,
            objective: fitted.best.value,
            outer_iteration: outer,
            full_fit: true,
        });
        let warm = fitted.best.x.clone();
        keep(
            Candidate {
                rho,
                x: fitted.best.x,
                value: fitted.best.value,
                stop: fitted.best.stop,
                iterations: fitted.best.iterations,
                trace: fitted.best.trace,
            },
            &mut best,
        );

        if !opts.search_rho {
            current = Some(warm);
            continue;
        }
        let search = |points: &[f64]| -> Vec<Candidate> {
            points
                .par_iter()
                .map(|&r| {
                    let m = short.minimize(objective_at(r), &warm);
                    Candidate {
                        rho: r,
                        x: m.x,
                        value: m.value,
                        stop: m.stop,
                        iterations: m.iterations,
                        trace: m.trace,
                    }
                })
                .collect()
        };
        let mut found = search(&grid);
        let coarse_best = found
            .iter()
            .filter(|c| c.value.is_finite())
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .map(|c| c.rho);
        if let Some(center) = coarse_best {
            let fine_step = opts.rho_step / opts.rho_refine.max(1) as f64;
            let reach = opts.rho_refine.max(1) as i64 - 1;
            let fine: Vec<f64> = (-reach..=reach)
                .filter(|&j| j != 0)
                .map(|j| snap(center + j as f64 * fine_step))
                .filter(|&r| complement_shape(r).is_some())
                .collect();
            found.extend(search(&fine));
        }
        evaluations += found.len() * opts.rho_search_evaluations;
        for c in &found {
            trace.push(RhoEvaluation {
                rho: c.rho,
                objective: c.value,
                outer_iteration: outer,
                full_fit: false,
            });
        }
        let step_best = found.into_iter().reduce(|a, b| if b.value < a.value { b } else { a });
        if let Some(c) = step_best {
            if c.value.is_finite() {
                rho = c.rho;
                current = Some(c.x.clone());
                keep(c, &mut best);
            }
        }
    }

    let best = best.filter(|b| b.value.is_finite()).ok_or(CalibrationError::NoFiniteObjective)?;
    let complement = param.model(&best.x);
    let (eval, m_total) = evaluate_mixed(&data, &complement, best.rho, target, opts)?;
    let m2 = complement.m();
    let gamma = edge_shares(&[(data.m, best.rho), (m2, 1.0 - best.rho)], m_total)?[0];
    let spec = CompositeSpec {
        components: vec![
            Component {
                model: first.model(),
                rho: best.rho,
            },
            Component {
                model: ComponentModel::Npa(complement),
                rho: 1.0 - best.rho,
            },
        ],
        total_n: opts.total_n,
    };
    Ok(CalibrationResult {
        model: CalibratedModel::Composite(spec),
        distance: eval.distance,
        vdd_tv_error: eval.vdd_tv_error,
        objective: eval.objective,
        status: status(eval.objective, best.stop, opts),
        iterations: OptimizerTrace {
            evaluations,
            iterations: best.iterations,
            restarts,
            phase: 1,
            best_per_iteration: best.trace,
        },
        composite: Some(CompositeDiagnostics {
            first: first.clone(),
            rho: best.rho,
            gamma,
            m_first: data.m,
            m_complement: m2,
            m_total,
            m_target,
            rho_trace: trace,
        }),
    })
}
