//! Command-line front end behind the `fuzzysim` binary.
//!
//! Every command writes its output plus `<out>.manifest.json`, which records
//! the fully resolved configuration; `fuzzysim replay` re-runs from it.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 model error,
//! 3 step limit reached.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::{parse_grid_file, ScenarioFile, TraceConfig};
use crate::model::{LaneId, LaneState, ModelError, SignalColor};
use crate::output;
use crate::workzone::{compare_strategies, sweep, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_MODEL: i32 = 2;
pub const EXIT_NON_TERMINATION: i32 = 3;

pub const LOG_ENV: &str = "FUZZYSIM_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "fuzzysim",
    version,
    about = "Fuzzy cellular automaton traffic simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-step CSV trace of a single lane.
    Trace(TraceArgs),
    /// Compare both work-zone signal strategies, JSON output.
    Compare(CompareArgs),
    /// Strategy comparison over a grid of fleets, precision units and seeds, CSV output.
    Sweep(SweepArgs),
    /// Re-run a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Also write the performance measures as CSV.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// File with a [grid] section; defaults to the [grid] section of --config.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Seed used when the grid lists none.
    #[arg(long)]
    seed: Option<u64>,
    /// Concurrent grid cells; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    max_steps: Option<u64>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output path; defaults to the one recorded in the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Resolved configuration text, overrides applied.
    pub config: String,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Model(String),
    NonTermination(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Model(_) => EXIT_MODEL,
            Failure::NonTermination(_) => EXIT_NON_TERMINATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Model(m) | Failure::NonTermination(m) => m,
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::StepLimit { .. } => Failure::NonTermination(e.to_string()),
            other => Failure::Model(other.to_string()),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Config(_) | ScenarioError::Placement(_) => {
                Failure::Config(e.to_string())
            }
            ScenarioError::Model(m) => m.into(),
            ScenarioError::NonTermination { .. } => Failure::NonTermination(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let io_fail = |e: std::io::Error| Failure::Config(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_fail)?);
    f(&mut w).map_err(io_fail)?;
    w.flush().map_err(io_fail)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_manifest(manifest: &RunManifest) -> Result<(), Failure> {
    let path = manifest_path(&manifest.outputs[0]);
    write_file(&path, |w| {
        serde_json::to_writer_pretty(&mut *w, manifest)?;
        writeln!(w)
    })
}

fn manifest(
    command: &str,
    config: String,
    seed: Option<u64>,
    jobs: Option<usize>,
    outputs: Vec<PathBuf>,
    started: Instant,
) -> RunManifest {
    RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config,
        seed,
        jobs,
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    }
}

fn trace(cfg: TraceConfig, out: &Path, report: Option<&Path>) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let mut lane = LaneState::new(
        LaneId(0),
        cfg.cell_count,
        cfg.vehicles.clone(),
        cfg.signal_cell,
    )?;
    if cfg.signal == SignalColor::Red {
        lane.set_signal(SignalColor::Red)?;
    }
    match cfg.steps {
        Some(steps) => {
            let limit = cfg.max_steps.unwrap_or(u64::MAX);
            if steps > limit {
                return Err(ModelError::StepLimit { limit }.into());
            }
            for _ in 0..steps {
                lane.step(&cfg.rule)?;
            }
        }
        None => {
            lane.run_until_clear(&cfg.rule, cfg.max_steps)?;
        }
    }
    write_file(out, |w| output::write_trace(w, &lane.trace()))?;
    let mut outputs = vec![out.to_path_buf()];
    if let Some(path) = report {
        let r = crate::measures::PerformanceReport::from_history(&lane.history());
        write_file(path, |w| output::write_report(w, &r))?;
        outputs.push(path.to_path_buf());
    }
    Ok(manifest(
        "trace",
        cfg.render(),
        None,
        None,
        outputs,
        started,
    ))
}

fn compare(file: ScenarioFile, out: &Path) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let result = compare_strategies(&file.scenario)?;
    write_file(out, |w| output::write_comparison(w, &result))?;
    let seed = Some(file.scenario.seed);
    Ok(manifest(
        "compare",
        file.render(),
        seed,
        None,
        vec![out.to_path_buf()],
        started,
    ))
}

fn run_sweep(
    mut file: ScenarioFile,
    out: &Path,
    jobs: Option<usize>,
) -> Result<RunManifest, Failure> {
    let started = Instant::now();
    let grid = file.grid.as_mut().ok_or_else(|| {
        Failure::Config("no [grid] section in --config and no --grid file".into())
    })?;
    if grid.seeds.is_empty() {
        grid.seeds.push(file.scenario.seed);
    }
    log::info!("sweep over {} grid cells", grid.cells().len());
    let rows = sweep(&file.scenario, grid, jobs);
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        log::info!("{failed} of {} cells failed", rows.len());
    }
    write_file(out, |w| output::write_sweep(w, &rows))?;
    Ok(manifest(
        "sweep",
        file.render(),
        Some(file.scenario.seed),
        jobs,
        vec![out.to_path_buf()],
        started,
    ))
}

fn parse_trace(text: &str, max_steps: Option<u64>) -> Result<TraceConfig, Failure> {
    let mut cfg = TraceConfig::parse(text).map_err(|e| Failure::Config(e.to_string()))?;
    if max_steps.is_some() {
        cfg.max_steps = max_steps;
    }
    Ok(cfg)
}

fn parse_scenario(
    text: &str,
    seed: Option<u64>,
    max_steps: Option<u64>,
) -> Result<ScenarioFile, Failure> {
    let mut file = ScenarioFile::parse(text).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(s) = seed {
        file.scenario.seed = s;
    }
    if max_steps.is_some() {
        file.scenario.max_steps = max_steps;
    }
    Ok(file)
}

fn dispatch(command: Command) -> Result<(), Failure> {
    let manifest = match command {
        Command::Trace(a) => {
            let cfg = parse_trace(&read(&a.config)?, a.max_steps)?;
            trace(cfg, &a.out, a.report.as_deref())?
        }
        Command::Compare(a) => {
            let file = parse_scenario(&read(&a.config)?, a.seed, a.max_steps)?;
            compare(file, &a.out)?
        }
        Command::Sweep(a) => {
            let mut file = parse_scenario(&read(&a.config)?, a.seed, a.max_steps)?;
            if let Some(path) = &a.grid {
                let grid = parse_grid_file(&read(path)?)
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
                file.grid = Some(grid);
            }
            run_sweep(file, &a.out, a.jobs)?
        }
        Command::Replay(a) => {
            let recorded: RunManifest = serde_json::from_str(&read(&a.manifest)?)
                .map_err(|e| Failure::Config(format!("{}: {e}", a.manifest.display())))?;
            let out = a.out.unwrap_or_else(|| recorded.outputs[0].clone());
            match recorded.command.as_str() {
                "trace" => {
                    // A relocated trace gets its report next to it.
                    let report = recorded.outputs.get(1).map(|p| {
                        if out == recorded.outputs[0] {
                            p.clone()
                        } else {
                            let mut name = out.as_os_str().to_owned();
                            name.push(".report.csv");
                            PathBuf::from(name)
                        }
                    });
                    trace(
                        parse_trace(&recorded.config, None)?,
                        &out,
                        report.as_deref(),
                    )?
                }
                "compare" => compare(parse_scenario(&recorded.config, None, None)?, &out)?,
                "sweep" => run_sweep(
                    parse_scenario(&recorded.config, None, None)?,
                    &out,
                    recorded.jobs,
                )?,
                other => {
                    return Err(Failure::Config(format!(
                        "unknown command {other:?} in manifest"
                    )))
                }
            }
        }
    };
    write_manifest(&manifest)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ =
        env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("fuzzysim: {}", f.message());
            f.code()
        }
    }
}
