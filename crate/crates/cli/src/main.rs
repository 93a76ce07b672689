//! `axiswalk`: run batches, dump trajectories, and check targets.
//!
//! Exit status is 0 when everything passed, 1 when a criterion failed or a
//! run broke down, and 2 for usage and configuration errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use axiswalk::analytics::constants;
use axiswalk::harness::{
    list_targets, resolve_threads, run_batch, trajectory_dump, verify, ExperimentConfig, Overrides,
};
use axiswalk::harness::verify::target_info;
use axiswalk::{Engine, Error, LatticeState, ModelKind, ModelSpec};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "axiswalk", version, about = "Axis-driven random walks on the quarter plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replica batch into `<out>/results.csv`, resuming if possible.
    Simulate(RunArgs),
    /// Check one target and print its verdict.
    Verify {
        /// Target id (see `list-targets`); `--target` works too.
        #[arg(value_name = "TARGET")]
        id: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        /// Print the full report as JSON instead of a summary.
        #[arg(long)]
        json: bool,
    },
    /// Write `t,x,y` rows of replica 0 to `<out>/trajectory.csv` or stdout.
    DumpTrajectory(RunArgs),
    /// List verification targets.
    ListTargets,
    /// Print the constants of the walk for one α.
    Constants {
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// JSON file with any of the flag names as keys; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Starting state as `x,y`.
    #[arg(long, value_parser = parse_state)]
    start: Option<LatticeState>,
    /// Fixed horizon in steps.
    #[arg(long, conflicts_with = "excursions")]
    n: Option<u64>,
    /// Horizon in completed excursions.
    #[arg(long)]
    excursions: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Start from this target's default configuration.
    #[arg(long)]
    target: Option<String>,
    /// Keep every `stride`-th step in trajectory dumps.
    #[arg(long)]
    stride: Option<u64>,
    /// Worker threads; the AXISWALK_THREADS variable takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<Engine>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown engine `{s}` (step, jump, phase)"))
}

fn parse_state(s: &str) -> Result<LatticeState, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("{v}: {e}"));
    Ok(LatticeState::new(parse(x)?, parse(y)?))
}

impl RunArgs {
    /// Config file overlaid with the flags.
    fn overrides(&self) -> Result<Overrides, Error> {
        let flags = Overrides {
            model: self.model,
            alpha: self.alpha,
            start: self.start,
            n: self.n,
            excursions: self.excursions,
            replicas: self.replicas,
            seed: self.seed,
            thinning: None,
            engine: self.engine,
            out: self.out.clone(),
            target: self.target.clone(),
            stride: self.stride,
            threads: self.threads,
        };
        Ok(match &self.config {
            Some(path) => Overrides::from_json_file(path)?.merged(&flags),
            None => flags,
        })
    }
}

/// Overrides applied to the defaults of `--target` if one is named.
fn resolve(o: &Overrides) -> Result<ExperimentConfig, Error> {
    let base = match &o.target {
        Some(t) => target_info(t)?.defaults,
        None => ExperimentConfig::default(),
    };
    o.apply(&base)
}

fn init_threads(o: &Overrides) -> Result<(), Error> {
    let n = resolve_threads(o.threads)?;
    // Only fails if a pool already exists, which cannot happen here.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Simulate(args) => {
            let o = args.overrides()?;
            init_threads(&o)?;
            let config = resolve(&o)?;
            let out = run_batch(&config)?;
            eprintln!(
                "{} rows in {} ({} failed replicas, resumed from {})",
                out.rows,
                out.results.display(),
                out.failed_replicas,
                out.resumed_from
            );
            Ok(out.failed_replicas == 0)
        }
        Command::Verify { id, run, json } => {
            let o = run.overrides()?;
            let target = id
                .or_else(|| o.target.clone())
                .ok_or_else(|| Error::Config("name a target (see list-targets)".into()))?;
            init_threads(&o)?;
            let report = verify(&target, &o)?;
            let text = serde_json::to_string_pretty(&report)?;
            if let Some(dir) = &o.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join(format!("verify-{target}.json")), &text)?;
            }
            if json {
                println!("{text}");
            } else {
                print!("{}", report.render());
            }
            Ok(report.passed)
        }
        Command::DumpTrajectory(args) => {
            let o = args.overrides()?;
            let config = resolve(&o)?;
            let stride = o.stride.unwrap_or(1);
            let rows = match &config.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join("trajectory.csv");
                    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
                    let rows = trajectory_dump(&config, stride, &mut file)?;
                    file.flush()?;
                    rows
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = std::io::BufWriter::new(stdout.lock());
                    let rows = trajectory_dump(&config, stride, &mut lock)?;
                    lock.flush()?;
                    rows
                }
            };
            eprintln!("{rows} rows");
            Ok(true)
        }
        Command::ListTargets => {
            for t in list_targets() {
                println!("{:<22} min replicas {:>6}  {}", t.id, t.min_replicas, t.claim);
            }
            Ok(true)
        }
        Command::Constants { alpha } => {
            ModelSpec::new(ModelKind::QuarterPlane, alpha)?;
            println!("{}", serde_json::to_string_pretty(&constants(alpha))?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
