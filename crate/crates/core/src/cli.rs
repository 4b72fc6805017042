//! Command-line front end. Every command goes through the [`Orchestrator`],
//! so artifacts match what the REST service produces for the same inputs.

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::api::{self, ApiConfig};
use crate::engine::{EnergyPlusConfig, EngineKind, SurrogateParams};
use crate::orchestrator::{
    InputKind, MemoryStore, Orchestrator, OrchestratorConfig, Parameters, ResultKind, SeriesSpec, Status,
};
use crate::room::{RoomSpec, DEFAULT_GAP, DEFAULT_MARGIN};
use crate::schedule::RunPeriod;

const FOREVER: Duration = Duration::MAX;

#[derive(Debug, Parser)]
#[command(name = "roomsim", version, about = "Single-room building simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write result.csv and result.eso.
    Simulate(SimulateArgs),
    /// Run the REST service until interrupted.
    Serve(ServeArgs),
    /// Sweep room parameters; writes one subdirectory per combination.
    Series(SeriesArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Room model (IDF) with exactly one zone and at least one window.
    #[arg(long)]
    pub idf: PathBuf,
    /// Weather file (EPW).
    #[arg(long)]
    pub epw: PathBuf,
    /// Occupancy CSV with timestamp, occupancy and optional window columns.
    #[arg(long)]
    pub occupancy: PathBuf,
    /// First day of the run period (YYYY-MM-DD).
    #[arg(long)]
    pub begin: NaiveDate,
    /// Last day of the run period (YYYY-MM-DD).
    #[arg(long)]
    pub end: NaiveDate,
    /// Simulation step in minutes; defaults to the occupancy step.
    #[arg(long)]
    pub step: Option<u32>,
    #[arg(long, default_value = "surrogate")]
    pub engine: EngineKind,
    /// EnergyPlus executable, required for --engine energyplus.
    #[arg(long, env = "ROOMSIM_EPLUS_EXE")]
    pub eplus_exe: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    pub window_margin: f64,
    #[arg(long, default_value_t = DEFAULT_GAP)]
    pub window_gap: f64,
    /// JSON file with surrogate engine parameters.
    #[arg(long)]
    pub surrogate_params: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Exterior wall length, m.
    #[arg(long)]
    pub width: f64,
    #[arg(long)]
    pub depth: f64,
    #[arg(long)]
    pub height: f64,
    /// Degrees clockwise from north.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub orientation: f64,
    /// Infiltration in air changes per hour.
    #[arg(long, default_value_t = 0.0)]
    pub ach: f64,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Base exterior wall length, used when --widths is absent.
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub depth: Option<f64>,
    #[arg(long)]
    pub height: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub orientation: Option<f64>,
    #[arg(long)]
    pub ach: Option<f64>,
    #[arg(long = "widths", num_args = 1.., action = clap::ArgAction::Append)]
    pub widths: Vec<f64>,
    #[arg(long = "depths", num_args = 1.., action = clap::ArgAction::Append)]
    pub depths: Vec<f64>,
    #[arg(long = "orientations", num_args = 1.., action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub orientations: Vec<f64>,
    #[arg(long = "achs", num_args = 1.., action = clap::ArgAction::Append)]
    pub achs: Vec<f64>,
    /// Concurrent runs.
    #[arg(long, default_value_t = crate::orchestrator::DEFAULT_WORKERS)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "ROOMSIM_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    #[arg(long, env = "ROOMSIM_DATA_ROOT", default_value = "roomsim-data")]
    pub data_root: PathBuf,
    #[arg(long, env = "ROOMSIM_EPLUS_EXE")]
    pub eplus_exe: Option<PathBuf>,
    /// Concurrent simulation runs.
    #[arg(long, env = "ROOMSIM_WORKERS", default_value_t = crate::orchestrator::DEFAULT_WORKERS)]
    pub workers: usize,
    /// Allowed CORS origin; repeat for several. Any origin when absent.
    #[arg(long = "cors-origin")]
    pub cors_origins: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Message(String),
    #[error(transparent)]
    Orchestrator(#[from] crate::orchestrator::OrchestratorError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl RunArgs {
    fn orchestrator(&self, workers: usize) -> Result<Orchestrator, CliError> {
        if self.engine == EngineKind::EnergyPlus && self.eplus_exe.is_none() {
            return Err(CliError::Message(
                "--engine energyplus needs --eplus-exe or ROOMSIM_EPLUS_EXE".into(),
            ));
        }
        let config = OrchestratorConfig {
            workers,
            energyplus: self.eplus_exe.clone().map(EnergyPlusConfig::new),
            work_root: Some(self.out_dir.join(".energyplus")),
        };
        Ok(Orchestrator::new(Arc::new(MemoryStore::new()), config)?)
    }

    fn parameters(&self, room: RoomSpec) -> Result<Parameters, CliError> {
        let surrogate = match &self.surrogate_params {
            Some(path) => serde_json::from_slice::<SurrogateParams>(&read(path)?)
                .map_err(|e| CliError::Message(format!("{}: {e}", path.display())))?,
            None => SurrogateParams::default(),
        };
        Ok(Parameters {
            room,
            run_period: RunPeriod {
                begin: self.begin,
                end: self.end,
            },
            step: self.step,
            engine: self.engine,
            surrogate,
            window_margin: self.window_margin,
            window_gap: self.window_gap,
        })
    }

    /// Creates a record, uploads the three inputs and configures it.
    fn configured_record(&self, orchestrator: &Orchestrator, room: RoomSpec) -> Result<String, CliError> {
        let params = self.parameters(room)?;
        let record = orchestrator.create_simulation()?;
        for (kind, path) in [
            (InputKind::Idf, &self.idf),
            (InputKind::Weather, &self.epw),
            (InputKind::Occupancy, &self.occupancy),
        ] {
            orchestrator.upload_input(&record.id, kind, &read(path)?)?;
        }
        orchestrator.configure(&record.id, &params)?;
        Ok(record.id)
    }
}

fn write_results(orchestrator: &Orchestrator, id: &str, dir: &Path) -> Result<(), CliError> {
    for kind in [ResultKind::Csv, ResultKind::Eso] {
        write(&dir.join(kind.artifact_name()), &orchestrator.result_artifact(id, kind)?)?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let orchestrator = args.run.orchestrator(1)?;
    let room = RoomSpec {
        width: args.width,
        depth: args.depth,
        height: args.height,
        orientation: args.orientation,
        infiltration_ach: args.ach,
    };
    let id = args.run.configured_record(&orchestrator, room)?;
    orchestrator.start(&id)?;
    let record = orchestrator.wait(&id, FOREVER)?;
    if record.status != Status::Done {
        return Err(CliError::Message(
            record.error.unwrap_or_else(|| format!("simulation ended as {}", record.status)),
        ));
    }
    write_results(&orchestrator, &id, &args.run.out_dir)?;
    println!("wrote {}", args.run.out_dir.display());
    Ok(())
}

fn distinct(values: &[f64]) -> Option<Vec<f64>> {
    if values.is_empty() {
        return None;
    }
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        if !out.contains(v) {
            out.push(*v);
        }
    }
    Some(out)
}

fn base_value(single: Option<f64>, axis: &[f64], flag: &str) -> Result<f64, CliError> {
    single
        .or_else(|| axis.first().copied())
        .ok_or_else(|| CliError::Message(format!("either --{flag} or --{flag}s is required")))
}

fn series(args: &SeriesArgs) -> Result<(), CliError> {
    let orchestrator = args.run.orchestrator(args.workers)?;
    let room = RoomSpec {
        width: base_value(args.width, &args.widths, "width")?,
        depth: base_value(args.depth, &args.depths, "depth")?,
        height: args.height,
        orientation: args.orientation.or(args.orientations.first().copied()).unwrap_or(0.0),
        infiltration_ach: args.ach.or(args.achs.first().copied()).unwrap_or(0.0),
    };
    let base_id = args.run.configured_record(&orchestrator, room)?;
    let spec = SeriesSpec {
        base_id,
        widths: distinct(&args.widths),
        depths: distinct(&args.depths),
        orientations: distinct(&args.orientations),
        infiltrations: distinct(&args.achs),
    };
    let started = orchestrator.run_series(&spec)?;
    let view = orchestrator.wait_series(&started.id, FOREVER)?;
    let mut failures = 0;
    for child in &view.children {
        let dir = args.run.out_dir.join(child.combination.label());
        match (&child.error, child.status) {
            (None, Status::Done) => {
                write_results(&orchestrator, &child.id, &dir)?;
                println!("{}: done", dir.display());
            }
            (error, status) => {
                failures += 1;
                let message = error.clone().unwrap_or_else(|| format!("simulation ended as {status}"));
                write(&dir.join("error.txt"), format!("{message}\n").as_bytes())?;
                eprintln!("{}: failed: {message}", dir.display());
            }
        }
    }
    if failures > 0 {
        return Err(CliError::Message(format!(
            "{failures} of {} simulations failed",
            view.children.len()
        )));
    }
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = terminate => {}
    }
}

fn serve(args: &ServeArgs) -> Result<(), CliError> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .try_init();
    let config = OrchestratorConfig {
        workers: args.workers,
        energyplus: args.eplus_exe.clone().map(EnergyPlusConfig::new),
        work_root: Some(args.data_root.join("_work")),
    };
    let orchestrator = Arc::new(Orchestrator::open(&args.data_root, config)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Message(format!("cannot start runtime: {e}")))?;
    let api_config = ApiConfig {
        cors_origins: args.cors_origins.clone(),
    };
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.listen)
            .await
            .map_err(|e| CliError::Message(format!("cannot listen on {}: {e}", args.listen)))?;
        let local = listener.local_addr().map_err(|e| CliError::Message(e.to_string()))?;
        tracing::info!(address = %local, data_root = %args.data_root.display(), "serving");
        println!("listening on http://{local}");
        api::serve(listener, Arc::clone(&orchestrator), &api_config, shutdown_signal())
            .await
            .map_err(|e| CliError::Message(format!("server error: {e}")))
    })?;
    drop(runtime);
    tracing::info!("shut down");
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Serve(args) => serve(args),
        Command::Series(args) => series(args),
    }
}

/// Parses `args` and runs the command. Exit codes: 0 success, 1 runtime
/// failure, 2 usage error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
