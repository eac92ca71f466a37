mod args;
mod commands;
mod failure;
mod output;

use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use serde::{Deserialize, Serialize};

use args::{Cli, Command, Format};
use failure::Failure;
use output::Output;

const SCHEMA_VERSION: u32 = 1;

/// Everything that determines a run's outputs. The output directory,
/// thread count and verbosity are left out on purpose.
#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    schema_version: u32,
    toolkit: String,
    toolkit_version: String,
    formats: Vec<Format>,
    #[serde(flatten)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (command, formats) = match &cli.command {
        Command::Replay(r) => {
            let manifest = read_manifest(&r.manifest)?;
            (manifest.command, manifest.formats)
        }
        other => (other.clone(), cli.formats.clone()),
    };
    let out = Output::new(&cli.out, &formats).map_err(Failure::input)?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        toolkit: env!("CARGO_PKG_NAME").to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        formats,
        command: command.clone(),
    };
    out.report("manifest.json", &manifest).map_err(Failure::compute)?;
    match &command {
        Command::Solve(a) => commands::solve(a, &out),
        Command::Generate(a) => commands::generate(a, &out),
        Command::Ingest(a) => commands::ingest(a, &out),
        Command::Calibrate(a) => commands::calibrate(a, &out),
        Command::Compare(a) => commands::compare(a, &out),
        Command::Preset(a) => commands::preset(a, &out),
        Command::Replay(_) => Err(Failure::input(anyhow::anyhow!("a manifest cannot record a replay"))),
    }
}

fn read_manifest(path: &Path) -> Result<Manifest, Failure> {
    let manifest: Manifest = npa_core::io::read_json(path)
        .with_context(|| format!("reading manifest {}", path.display()))
        .map_err(Failure::input)?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(Failure::input(anyhow::anyhow!(
            "manifest schema {} is not supported (expected {SCHEMA_VERSION})",
            manifest.schema_version
        )));
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use std::fs;

    use super::*;

    fn exec(out: &Path, args: &[&str]) -> Result<(), Failure> {
        let mut argv = vec!["npa", "--out", out.to_str().unwrap()];
        argv.extend_from_slice(args);
        run(&Cli::try_parse_from(argv).unwrap())
    }

    fn code(r: Result<(), Failure>) -> i32 {
        r.err().map_or(0, |f| f.code())
    }

    #[test]
    fn solve_ba_tree_preset() {
        let dir = tempfile::tempdir().unwrap();
        exec(&dir.path().join("p"), &["preset", "ba-tree"]).unwrap();
        let spec = dir.path().join("p/ba-tree.json");
        exec(&dir.path().join("s"), &["solve", spec.to_str().unwrap(), "--umax", "20"]).unwrap();
        let vdd = fs::read_to_string(dir.path().join("s/vdd.csv")).unwrap();
        let mut lines = vdd.lines();
        assert_eq!(lines.next(), Some("degree,probability"));
        let (k, p) = lines.next().unwrap().split_once(',').unwrap();
        assert_eq!(k, "1");
        assert!((p.parse::<f64>().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(dir.path().join("s/manifest.json").exists());
    }

    #[test]
    fn invalid_spec_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("bad.json");
        fs::write(&spec, "{\"type\": \"npa\"}").unwrap();
        assert_eq!(code(exec(&dir.path().join("o"), &["solve", spec.to_str().unwrap()])), 2);
        let missing = dir.path().join("absent.txt");
        assert_eq!(code(exec(&dir.path().join("o"), &["ingest", missing.to_str().unwrap()])), 2);
    }

    #[test]
    fn generate_then_ingest_ba_tree() {
        let dir = tempfile::tempdir().unwrap();
        let gen = dir.path().join("g");
        exec(&gen, &["generate", "--preset", "ba-tree", "--n", "1000", "--seed", "3"]).unwrap();
        let edges = fs::read_to_string(gen.join("graph_0.txt")).unwrap();
        assert_eq!(edges.lines().filter(|l| !l.starts_with('#')).count(), 999);

        let ing = dir.path().join("i");
        exec(&ing, &["ingest", gen.join("graph_0.txt").to_str().unwrap(), "--u", "10"]).unwrap();
        let summary: serde_json::Value = npa_core::io::read_json(&ing.join("summary.json")).unwrap();
        assert_eq!(summary["node_count"], 1000);
        assert_eq!(summary["edge_count"], 999);
    }

    #[test]
    fn compare_is_symmetric_and_zero_on_itself() {
        let dir = tempfile::tempdir().unwrap();
        let gen = dir.path().join("g");
        exec(&gen, &["generate", "--preset", "linear", "--n", "2000", "--reps", "2"]).unwrap();
        let a = gen.join("edd_0.csv");
        let b = gen.join("edd_1.csv");
        let distance = |x: &Path, y: &Path, out: &str| {
            let out = dir.path().join(out);
            exec(&out, &["compare", x.to_str().unwrap(), y.to_str().unwrap(), "--u", "8"]).unwrap();
            let report: serde_json::Value = npa_core::io::read_json(&out.join("comparison.json")).unwrap();
            report["distance"].as_f64().unwrap()
        };
        let ab = distance(&a, &b, "ab");
        assert!(ab > 0.0);
        assert_eq!(ab, distance(&b, &a, "ba"));
        assert_eq!(distance(&a, &a, "aa"), 0.0);
    }

    #[test]
    fn replay_rejects_unknown_schema() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("manifest.json");
        fs::write(&manifest, r#"{"schema_version": 99, "toolkit": "x", "toolkit_version": "0", "formats": ["csv"], "command": "preset", "name": "linear"}"#).unwrap();
        assert_eq!(code(exec(&dir.path().join("o"), &["replay", manifest.to_str().unwrap()])), 2);
    }
}
