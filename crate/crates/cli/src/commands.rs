use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{anyhow, Context};
use npa_core::calibrate::{
    calibrate_composite, calibrate_single, estimate_aer, gowalla_increments, preset_brightkite, preset_gowalla,
    test_models, AerVariant, CalibrateOptions, CalibratedModel, CalibrationResult, CalibrationStatus,
    CalibrationTarget, FirstComponent, SourceMeta, WeightMode, BRIGHTKITE_MEAN_INCREMENT, BRIGHTKITE_RHO,
};
use npa_core::empirical::{empirical_edd, read_edge_list, smooth_vdd, summarize, write_edge_list, Smoothing};
use npa_core::growth::{grow_aer_detailed, grow_composite_bridged, grow_npa, measure_edd, RngStream};
use npa_core::io::{read_edd_csv, read_json, read_vdd_csv};
use npa_core::solver::{complement_mean, edge_shares, mix_edd, mix_vdd, solve_edd, ArcRecurrence, SolverOptions};
use npa_core::calibrate::{edd_distance, select_u};
use npa_core::empirical::empirical_vdd;
use npa_core::{AerModelSpec, CompositeSpec, ModelSpec, NpaModelSpec, Validate};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::failure::Failure;
use crate::output::Output;

type Outcome = Result<(), Failure>;

fn load_spec(path: &Path) -> Result<ModelSpec, Failure> {
    let spec: ModelSpec = read_json(path)
        .with_context(|| format!("reading model spec {}", path.display()))
        .map_err(Failure::input)?;
    spec.check().map_err(Failure::input)?;
    Ok(spec)
}

fn preset_spec(preset: Preset) -> ModelSpec {
    let model = |name: &str| {
        let (_, spec) = test_models().into_iter().find(|(n, _)| *n == name).expect("bundled model");
        ModelSpec::Npa(spec)
    };
    match preset {
        Preset::Brightkite => ModelSpec::Composite(preset_brightkite()),
        Preset::Gowalla => ModelSpec::Composite(preset_gowalla()),
        Preset::BaTree => model("ba-tree"),
        Preset::Linear => model("linear"),
        Preset::Sublinear => model("sublinear"),
        Preset::Superlinear => model("superlinear"),
        Preset::Constant => model("constant"),
    }
}

pub fn preset(args: &PresetArgs, out: &Output) -> Outcome {
    let spec = preset_spec(args.name);
    let name = args.name.to_possible_value_name();
    out.report(&format!("{name}.json"), &spec).map_err(Failure::compute)?;
    let notes = match args.name {
        Preset::Gowalla => json!({ "increments_raw_sum": gowalla_increments().1 }),
        Preset::Brightkite => json!({
            "m": BRIGHTKITE_MEAN_INCREMENT,
            "rho": BRIGHTKITE_RHO,
            "m_complement": complement_mean(BRIGHTKITE_MEAN_INCREMENT, 1.0, BRIGHTKITE_RHO).map_err(Failure::compute)?,
            "complement": "placeholder power-law increments; recalibrate against the dataset",
        }),
        _ => json!({}),
    };
    out.report("preset.json", &json!({ "preset": name, "notes": notes }))
        .map_err(Failure::compute)
}

trait PossibleName {
    fn to_possible_value_name(&self) -> String;
}

impl<T: clap::ValueEnum> PossibleName for T {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Serialize)]
struct SolveReport {
    mean_weight: f64,
    mean_degree: f64,
    m: f64,
    control_residual: f64,
    fixed_point_residual: f64,
    iterations: usize,
    vdd_truncation_mass: f64,
    edd_truncation_mass: f64,
    recurrence: Recurrence,
}

pub fn solve(args: &SolveArgs, out: &Output) -> Outcome {
    let spec = load_spec(&args.spec)?;
    let opts = SolverOptions {
        k_max: args.kmax,
        u_max: args.umax,
        arc_recurrence: match args.recurrence {
            Recurrence::MeanWeight => ArcRecurrence::MeanWeight,
            Recurrence::AsPrinted => ArcRecurrence::AsPrinted,
        },
        max_edd_deficit: args.max_edd_deficit,
        ..SolverOptions::default()
    };
    let solve_one = |model: &NpaModelSpec| -> Result<_, Failure> {
        let (vdd, edd) = solve_edd(model, &opts)?;
        let report = SolveReport {
            mean_weight: vdd.mean_weight,
            mean_degree: vdd.mean_degree,
            m: model.m(),
            control_residual: vdd.control_residual,
            fixed_point_residual: vdd.fixed_point_residual,
            iterations: vdd.iterations,
            vdd_truncation_mass: vdd.q.truncation_mass(),
            edd_truncation_mass: edd.truncation_mass(),
            recurrence: args.recurrence,
        };
        Ok((vdd.q, edd, report))
    };
    match spec {
        ModelSpec::Npa(model) => {
            let (q, theta, report) = solve_one(&model)?;
            out.vdd("vdd", &q).map_err(Failure::compute)?;
            out.edd("edd", &theta).map_err(Failure::compute)?;
            out.report("solution.json", &report).map_err(Failure::compute)
        }
        ModelSpec::Composite(c) => {
            let mut parts = Vec::new();
            for (i, comp) in c.components.iter().enumerate() {
                let model = comp.model.as_npa().ok_or_else(|| {
                    Failure::input(anyhow!(
                        "component {i} is an AER graph, which has no analytic solution; use `generate`"
                    ))
                })?;
                let (q, theta, report) = solve_one(&model)?;
                parts.push((q, theta, report, comp.rho));
            }
            let m_total: f64 = parts.iter().map(|p| p.3 * p.2.m).sum();
            let q = mix_vdd(&parts.iter().map(|p| (&p.0, p.3)).collect::<Vec<_>>()).map_err(Failure::compute)?;
            let theta = mix_edd(&parts.iter().map(|p| (&p.1, p.2.m, p.3)).collect::<Vec<_>>(), m_total)
                .map_err(Failure::compute)?;
            let gamma = edge_shares(&parts.iter().map(|p| (p.2.m, p.3)).collect::<Vec<_>>(), m_total)
                .map_err(Failure::compute)?;
            out.vdd("vdd", &q).map_err(Failure::compute)?;
            out.edd("edd", &theta).map_err(Failure::compute)?;
            let components: Vec<_> = parts
                .iter()
                .zip(&gamma)
                .map(|(p, g)| json!({ "rho": p.3, "gamma": g, "solution": p.2 }))
                .collect();
            out.report("solution.json", &json!({ "m": m_total, "components": components }))
                .map_err(Failure::compute)
        }
        ModelSpec::Aer(_) => Err(Failure::input(anyhow!(
            "AER graphs have no analytic solution; use `generate`"
        ))),
    }
}

#[derive(Serialize)]
struct Replication {
    replication: u64,
    vertices: usize,
    edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budgets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aer: Option<serde_json::Value>,
}

pub fn generate(args: &GenerateArgs, out: &Output) -> Outcome {
    let spec = match (&args.spec, args.preset) {
        (Some(path), _) => load_spec(path)?,
        (None, Some(p)) => preset_spec(p),
        (None, None) => return Err(Failure::input(anyhow!("give a spec file or --preset"))),
    };
    let base = RngStream::new(args.seed, 0);
    let mut reps = Vec::new();
    for rep in 0..args.reps {
        let stream = base.replication(rep);
        let (graph, mut record) = match &spec {
            ModelSpec::Npa(model) => {
                let n = args.n.unwrap_or(100_000);
                let mut g = grow_npa(model, n, &stream)?.final_graph;
                g.set_directed(false);
                (g, Replication::new(rep))
            }
            ModelSpec::Aer(model) => {
                let model = AerModelSpec::new(args.n.unwrap_or(model.n1), model.mean_degree);
                let o = grow_aer_detailed(&model, &stream)?;
                let mut r = Replication::new(rep);
                r.aer = Some(json!({
                    "raw_edges": o.raw.edge_count(),
                    "raw_mean_degree": 2.0 * o.raw.edge_count() as f64 / model.n1 as f64,
                    "isolated_removed": o.isolated_removed,
                    "pairs_removed": o.pairs_removed,
                    "lag1_autocorrelation": o.row_stats.lag1_autocorrelation(),
                }));
                (o.pruned, r)
            }
            ModelSpec::Composite(c) => {
                let c = CompositeSpec {
                    total_n: args.n.unwrap_or(c.total_n),
                    ..c.clone()
                };
                c.check().map_err(Failure::input)?;
                let o = grow_composite_bridged(&c, &stream, args.bridges)?;
                let mut r = Replication::new(rep);
                r.components = Some(o.ranges.iter().map(|r| (r.start, r.end)).collect());
                r.budgets = Some(c.budgets());
                (o.graph, r)
            }
        };
        let graph = if args.collapse { graph.collapsed() } else { graph };
        record.vertices = graph.vertex_count();
        record.edges = graph.edge_count();
        write_edge_list(&graph, false, out.writer(&format!("graph_{rep}.txt")).map_err(Failure::compute)?)
            .map_err(Failure::compute)?;
        out.degree_counts(&format!("vdd_{rep}"), &graph.degrees()).map_err(Failure::compute)?;
        if graph.edge_count() > 0 {
            let theta = measure_edd(&graph, args.u).map_err(Failure::compute)?;
            out.edd(&format!("edd_{rep}"), &theta).map_err(Failure::compute)?;
        }
        reps.push(record);
    }
    out.report("generation.json", &json!({ "seed": args.seed, "replications": reps }))
        .map_err(Failure::compute)
}

impl Replication {
    fn new(replication: u64) -> Self {
        Self {
            replication,
            vertices: 0,
            edges: 0,
            components: None,
            budgets: None,
            aer: None,
        }
    }
}

pub fn parse_smoothing(text: &str) -> anyhow::Result<Smoothing> {
    let (name, param) = match text.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (text, None),
    };
    Ok(match (name, param) {
        ("none", None) => Smoothing::None,
        ("log-bin", p) => Smoothing::LogBin {
            ratio: p.unwrap_or("1.5").parse().context("log-bin ratio")?,
        },
        ("tail-powerlaw", Some(p)) => Smoothing::TailPowerLaw {
            cut_degree: p.parse().context("tail-powerlaw cut degree")?,
        },
        _ => return Err(anyhow!("unknown smoothing {text:?}; use none, log-bin:RATIO or tail-powerlaw:CUT")),
    })
}

#[derive(Serialize, serde::Deserialize)]
pub struct IngestSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_degree: f64,
    pub derived_m: f64,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
    pub u: usize,
    pub u_mass: f64,
    pub extent: usize,
    pub smoothing: Smoothing,
    pub source: String,
}

pub fn ingest(args: &IngestArgs, out: &Output) -> Outcome {
    let smoothing = parse_smoothing(&args.smooth).map_err(Failure::input)?;
    let parsed = read_edge_list(&args.dataset)
        .with_context(|| format!("reading {}", args.dataset.display()))
        .map_err(Failure::input)?;
    let graph = &parsed.graph;
    let summary = summarize(graph).map_err(Failure::input)?;
    let degrees = graph.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(1);
    let extent = args.extent.unwrap_or(max_degree.min(2_000));
    let theta = empirical_edd(graph, extent).map_err(Failure::compute)?;
    let u = args.u.unwrap_or_else(|| select_u(&theta, args.u_mass));
    out.degree_counts("vdd", &degrees).map_err(Failure::compute)?;
    if smoothing != Smoothing::None {
        let q = empirical_vdd(graph).map_err(Failure::compute)?;
        let smoothed = smooth_vdd(&q, smoothing).map_err(Failure::input)?;
        out.vdd("vdd_smoothed", &smoothed).map_err(Failure::compute)?;
    }
    out.edd("edd", &theta).map_err(Failure::compute)?;
    out.table(
        "node_ids.csv",
        &["vertex", "original_id"],
        parsed.original_ids.iter().enumerate().map(|(v, id)| vec![v.to_string(), id.to_string()]),
    )
    .map_err(Failure::compute)?;
    let report = IngestSummary {
        node_count: summary.node_count,
        edge_count: summary.edge_count,
        mean_degree: summary.mean_degree,
        derived_m: summary.derived_m,
        self_loops_dropped: parsed.self_loops_dropped,
        duplicates_dropped: parsed.duplicates_dropped,
        u,
        u_mass: args.u_mass,
        extent,
        smoothing,
        source: args.dataset.display().to_string(),
    };
    out.report("summary.json", &report).map_err(Failure::compute)
}

fn read_target(dir: &Path, u: Option<usize>) -> Result<CalibrationTarget, Failure> {
    let summary: IngestSummary = read_json(&dir.join("summary.json"))
        .with_context(|| format!("reading {}/summary.json", dir.display()))
        .map_err(Failure::input)?;
    let open = |name: &str| {
        File::open(dir.join(name))
            .map(BufReader::new)
            .with_context(|| format!("opening {}/{name}", dir.display()))
            .map_err(Failure::input)
    };
    let smoothed = dir.join("vdd_smoothed.csv");
    let vdd = if smoothed.exists() {
        read_vdd_csv(open("vdd_smoothed.csv")?)
    } else {
        read_vdd_csv(open("vdd.csv")?)
    }
    .map_err(Failure::input)?;
    let edd = read_edd_csv(open("edd.csv")?).map_err(Failure::input)?;
    let meta = SourceMeta {
        name: summary.source.clone(),
        smoothing: summary.smoothing,
    };
    CalibrationTarget::new(vdd, edd, u.unwrap_or(summary.u), meta).map_err(Failure::from)
}

pub fn calibrate(args: &CalibrateArgs, out: &Output) -> Outcome {
    let target = read_target(&args.target, args.u)?;
    let defaults = CalibrateOptions::default();
    let opts = CalibrateOptions {
        support: args.support,
        vdd_weight: args.vdd_weight,
        tolerance: args.tolerance,
        weight_mode: match args.weight_mode {
            WeightModeArg::Linear => WeightMode::Linear,
            WeightModeArg::TableFree => WeightMode::TableFree,
        },
        max_evaluations: args.max_evals,
        patience: args.patience,
        solver: SolverOptions {
            k_max: args.kmax,
            ..defaults.solver
        },
        rho_step: args.rho_step,
        outer_iterations: args.outer,
        initial_rho: args.initial_rho,
        search_rho: !args.fixed_rho,
        rho_search_evaluations: args.rho_search_evals,
        ..defaults
    };
    let result = match args.mode {
        Mode::Single => calibrate_single(&target, opts.weight_mode, &opts)?,
        Mode::Composite => {
            let first = match args.first {
                First::BaTree => FirstComponent::BaTree,
                First::Aer => {
                    let variant = match args.aer_variant {
                        AerVariantArg::Raw => AerVariant::Raw,
                        AerVariantArg::IsolatesRemoved => AerVariant::IsolatesRemoved,
                        AerVariantArg::Pruned => AerVariant::Pruned,
                    };
                    FirstComponent::Aer(estimate_aer(
                        args.aer_mean_degree,
                        args.aer_n1,
                        args.aer_reps,
                        target.edd.extent(),
                        variant,
                        &RngStream::new(args.seed, 0),
                    )?)
                }
            };
            calibrate_composite(&target, &first, &opts)?
        }
    };
    write_calibration(&result, &target, &opts, out)?;
    if result.status == CalibrationStatus::Converged {
        Ok(())
    } else {
        Err(Failure::Incomplete(anyhow!(
            "optimizer stopped ({:?}) at objective {}; best-so-far written",
            result.status,
            result.objective
        )))
    }
}

fn write_calibration(
    result: &CalibrationResult,
    target: &CalibrationTarget,
    opts: &CalibrateOptions,
    out: &Output,
) -> Outcome {
    let (spec, eval) = match &result.model {
        CalibratedModel::Npa(m) => (
            ModelSpec::Npa(m.clone()),
            npa_core::calibrate::evaluate_single(m, target, opts)?,
        ),
        CalibratedModel::Composite(c) => {
            let diag = result.composite.as_ref().expect("composite diagnostics");
            let complement = c.components[1].model.as_npa().expect("NPA complement");
            (
                ModelSpec::Composite(c.clone()),
                npa_core::calibrate::evaluate_composite(&diag.first, &complement, diag.rho, target, opts)?,
            )
        }
    };
    out.report("model.json", &spec).map_err(Failure::compute)?;
    // The AER estimate holds whole matrices; keep the report readable.
    let mut report = serde_json::to_value(result).map_err(Failure::compute)?;
    if let Some(first) = report.pointer_mut("/composite/first") {
        if let Some(obj) = first.as_object_mut() {
            obj.remove("vdd");
            obj.remove("edd");
        }
    }
    let report = json!({
        "target": { "source": target.source_meta, "u": target.u, "g": target.min_degree(), "m": target.mean_increment() },
        "result": report,
    });
    out.report("report.json", &report).map_err(Failure::compute)?;
    out.vdd("model_vdd", &eval.vdd).map_err(Failure::compute)?;
    let g = target.min_degree();
    let rows = (g..=target.u).flat_map(|l| {
        let eval = &eval;
        (g..=target.u).map(move |k| {
            let a = eval.edd.get(l, k);
            let b = target.edd.get(l, k);
            vec![l.to_string(), k.to_string(), a.to_string(), b.to_string(), (a - b).to_string()]
        })
    });
    out.table("comparison.csv", &["l", "k", "model", "target", "difference"], rows)
        .map_err(Failure::compute)
}

pub fn compare(args: &CompareArgs, out: &Output) -> Outcome {
    let read = |p: &Path| {
        File::open(p)
            .with_context(|| format!("opening {}", p.display()))
            .and_then(|f| read_edd_csv(BufReader::new(f)).with_context(|| format!("reading {}", p.display())))
            .map_err(Failure::input)
    };
    let a = read(&args.a)?;
    let b = read(&args.b)?;
    let distance = edd_distance(&a, &b, args.g, args.u)?;
    println!("{distance}");
    let rows = (args.g..=args.u).flat_map(|l| {
        let (a, b) = (&a, &b);
        (args.g..=args.u).map(move |k| {
            let (x, y) = (a.get(l, k), b.get(l, k));
            vec![l.to_string(), k.to_string(), x.to_string(), y.to_string(), (x - y).to_string()]
        })
    });
    out.table("diff.csv", &["l", "k", "a", "b", "difference"], rows).map_err(Failure::compute)?;
    out.report("comparison.json", &json!({ "distance": distance, "g": args.g, "u": args.u }))
        .map_err(Failure::compute)
}
