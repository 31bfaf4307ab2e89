//! Command-line front end.
//!
//! ```text
//! divest run      [--seed N] [--set key=value]... [--emit-graph]
//! divest ensemble [--runs N] [--per-run] [--threads N]
//! divest sweep1d  --set axes="social.sif:0.05:0.7:14" [--runs N]
//! divest sweep2d  --set axes="social.sif:0.05:0.7:14,rho:0.05:0.7:14"
//! ```
//!
//! Settings are applied in order: defaults, `--config` file, `--set`
//! overrides, `--seed`. Outputs go to `--out`, or to the directory named by
//! the `DIVEST_OUT` environment variable, or to `./out`; every command
//! finishes by writing `manifest.json` and a `config.txt` echo that can be
//! fed back through `--config`.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::analysis::summarize;
use crate::config::SimConfig;
use crate::engine::World;
use crate::ensemble::{run_ensemble, sweep, Axis};
use crate::error::{Error, Result};
use crate::io::{self, OutputBundle, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "divest", version, about = "Agent-based model of fossil-fuel divestment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one trajectory and write its per-month CSV.
    Run(RunArgs),
    /// Run an ensemble and write its summary.
    Ensemble(EnsembleArgs),
    /// Sweep one config key; writes a grid CSV.
    Sweep1d(SweepArgs),
    /// Sweep two config keys; writes a grid CSV.
    Sweep2d(SweepArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file (`key = value` lines, or JSON).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override a setting; repeatable. `axes=...` selects sweep axes.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Base seed (overrides the config's `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: $DIVEST_OUT or ./out].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for ensembles and sweeps [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the initial and final network edge lists.
    #[arg(long)]
    pub emit_graph: bool,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Runs in the ensemble.
    #[arg(long, default_value_t = 400)]
    pub runs: usize,
    /// Also write one trajectory CSV per run under `runs/`.
    #[arg(long)]
    pub per_run: bool,
    /// Also write the initial network of the first run.
    #[arg(long)]
    pub emit_graph: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Runs per grid cell.
    #[arg(long, default_value_t = 400)]
    pub runs: usize,
    /// Axis list `key:start:stop:count[,key:start:stop:count]`; may also be
    /// given as `--set axes=...`.
    #[arg(long)]
    pub axes: Option<String>,
}

/// What a finished command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
    /// One-line human summary.
    pub message: String,
}

#[derive(Debug)]
struct Resolved {
    config: SimConfig,
    axes: Option<String>,
    out: PathBuf,
}

fn resolve(common: &CommonArgs) -> Result<Resolved> {
    let mut config = match &common.config {
        Some(path) => SimConfig::from_path(path)?,
        None => SimConfig::default(),
    };
    let mut axes = None;
    let mut overrides = Vec::new();
    for kv in &common.set {
        match kv.split_once('=') {
            Some((k, v)) if k.trim() == "axes" => axes = Some(v.trim().trim_matches('"').to_string()),
            _ => overrides.push(kv.as_str()),
        }
    }
    config.apply_overrides(&overrides)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    config.validate()?;
    let out = common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Resolved { config, axes, out })
}

fn check_threads(threads: Option<usize>) -> Result<()> {
    if threads == Some(0) {
        return Err(Error::InvalidConfig("--threads must be at least 1".into()));
    }
    Ok(())
}

fn check_runs(runs: usize) -> Result<()> {
    if runs == 0 {
        return Err(Error::EmptyEnsemble);
    }
    Ok(())
}

pub fn run_command(args: &RunArgs) -> Result<Outcome> {
    let r = resolve(&args.common)?;
    let mut bundle = OutputBundle::create(&r.out)?;
    let mut world = World::new(&r.config)?;
    let initial_graph = args.emit_graph.then(|| world.network.clone());
    while !world.is_finished() {
        world.step_month();
    }
    let final_graph = args.emit_graph.then(|| world.network.clone());
    let record = world.into_record();

    bundle.write("run.csv", &io::run_csv(&record))?;
    if let (Some(a), Some(b)) = (initial_graph, final_graph) {
        bundle.write("graph_initial.txt", &io::edge_list(&a))?;
        bundle.write("graph_final.txt", &io::edge_list(&b))?;
    }
    let kind = crate::analysis::classify(&record, &r.config);
    let message = format!(
        "run: seed {} final CCE {} type {}",
        r.config.seed,
        io::fmt_sig(record.final_cce),
        kind.letter()
    );
    let manifest = bundle.finish("run", &r.config, 1)?;
    Ok(Outcome {
        out_dir: r.out,
        manifest,
        message,
    })
}

pub fn ensemble_command(args: &EnsembleArgs) -> Result<Outcome> {
    check_runs(args.runs)?;
    check_threads(args.common.threads)?;
    let r = resolve(&args.common)?;
    let mut bundle = OutputBundle::create(&r.out)?;
    let started = Instant::now();
    let records = run_ensemble(&r.config, args.runs, args.common.threads)?;
    let summary = summarize(&records, &r.config)?;

    bundle.write("summary.json", &io::summary_json(&summary)?)?;
    if args.per_run {
        for (i, rec) in records.iter().enumerate() {
            bundle.write(&format!("runs/run_{i:04}.csv"), &io::run_csv(rec))?;
        }
    }
    if args.emit_graph {
        let world = World::new(&r.config)?;
        bundle.write("graph_initial.txt", &io::edge_list(&world.network))?;
    }
    let message = format!(
        "ensemble: {} runs in {:.1}s, mean CCE {}, IQR [{}, {}], types {:?}",
        summary.n_runs,
        started.elapsed().as_secs_f64(),
        io::fmt_sig(summary.mean_cce),
        io::fmt_sig(summary.q1),
        io::fmt_sig(summary.q3),
        summary.types.to_array()
    );
    let manifest = bundle.finish("ensemble", &r.config, args.runs)?;
    Ok(Outcome {
        out_dir: r.out,
        manifest,
        message,
    })
}

pub fn sweep_command(args: &SweepArgs, dims: usize) -> Result<Outcome> {
    check_runs(args.runs)?;
    check_threads(args.common.threads)?;
    let r = resolve(&args.common)?;
    let spec = args
        .axes
        .clone()
        .or(r.axes)
        .ok_or_else(|| Error::InvalidConfig("no sweep axes given (use --set axes=key:start:stop:count)".into()))?;
    let axes = Axis::parse_list(&spec)?;
    if axes.len() != dims {
        return Err(Error::InvalidConfig(format!(
            "sweep{dims}d needs {dims} axis spec(s), got {}",
            axes.len()
        )));
    }
    let mut bundle = OutputBundle::create(&r.out)?;
    let started = Instant::now();
    let result = sweep(&r.config, &axes, args.runs, args.common.threads)?;
    bundle.write("grid.csv", &io::grid_csv(&result))?;

    let bimodal = result.cells.iter().filter(|c| c.summary.bimodal).count();
    let mut message = format!(
        "sweep{dims}d: {} cells x {} runs in {:.1}s, {bimodal} bimodal",
        result.cells.len(),
        args.runs,
        started.elapsed().as_secs_f64()
    );
    if dims == 2 {
        let band = result.tipping_band(500.0, 300.0);
        message += &match band {
            Some(b) => format!(", tipping band of {} cells", b.len()),
            None => ", no separating tipping band".to_string(),
        };
    }
    let name = if dims == 1 { "sweep1d" } else { "sweep2d" };
    let manifest = bundle.finish(name, &r.config, args.runs * result.cells.len())?;
    Ok(Outcome {
        out_dir: r.out,
        manifest,
        message,
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Run(a) => run_command(a),
        Command::Ensemble(a) => ensemble_command(a),
        Command::Sweep1d(a) => sweep_command(a, 1),
        Command::Sweep2d(a) => sweep_command(a, 2),
    }
}

/// Parse `args` (including the program name) and execute. Returns the
/// process exit code; diagnostics go to stderr as a single line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            eprintln!("{} -> {}", outcome.message, outcome.out_dir.display());
            0
        }
        Err(e) => {
            eprintln!("divest: error: {}", e.to_string().replace('\n', " "));
            1
        }
    }
}
