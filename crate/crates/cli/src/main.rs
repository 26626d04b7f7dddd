mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use commands::{dispatch, Artifact, Body};
use config::RunConfig;

const EXIT_HELP: &str = "\
Exit status: 0 success, 1 domain or contract error, 2 numeric or capacity error,
64 usage error, 74 I/O error.

Without --out, artifacts go to stdout. JSON artifacts carry the run manifest
under \"run\"; CSV artifacts are preceded by a '# run: {...}' line and, when
there are several, a '# file: <name>' line each. With --out, files are written
to the directory together with run.json, which `replay` accepts.";

#[derive(Debug, Parser)]
#[command(name = "meanfield-opt", version, about = "Mean-field matching and TSP laboratory", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for artifacts and run.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker thread bound for parallel stages.
    #[arg(long, global = true, env = "MEANFIELD_OPT_THREADS")]
    threads: Option<usize>,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(flatten)]
    Run(RunConfig),
    /// Re-run the config stored in a run.json manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Numeric(String),
    Io(String),
    /// The reader closed stdout early (e.g. `| head`); not a failure.
    ClosedPipe,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 74,
            CliError::ClosedPipe => 0,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
            CliError::ClosedPipe => f.write_str("output closed"),
        }
    }
}

impl From<meanfield_core::Error> for CliError {
    fn from(e: meanfield_core::Error) -> Self {
        use meanfield_core::Error::*;
        match e {
            Domain(_) | Contract(_) => CliError::Domain(e.to_string()),
            Numeric { .. } | Capacity(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::ClosedPipe;
        }
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: String,
    config: RunConfig,
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    #[serde(default)]
    files: Vec<String>,
}

fn load_manifest(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("bad manifest: {e}")))?;
    Ok(m.config)
}

fn emit(cli: &Cli, config: RunConfig, artifacts: Vec<Artifact>) -> Result<(), CliError> {
    let timestamp = if cli.no_timestamp {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    };
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed(),
        config,
        timestamp,
        files: artifacts.iter().map(|a| a.name.to_string()).collect(),
    };
    let render = |a: &Artifact| -> Result<String, CliError> {
        Ok(match &a.body {
            Body::Csv(s) => s.clone(),
            Body::Json(v) => {
                let mut v = v.clone();
                if let serde_json::Value::Object(map) = &mut v {
                    map.insert("run".into(), serde_json::to_value(&manifest)?);
                }
                serde_json::to_string_pretty(&v)? + "\n"
            }
        })
    };
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for a in &artifacts {
                fs::write(dir.join(a.name), render(a)?)?;
            }
            fs::write(dir.join("run.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            let any_csv = artifacts.iter().any(|a| matches!(a.body, Body::Csv(_)));
            if any_csv {
                writeln!(out, "# run: {}", serde_json::to_string(&manifest)?)?;
            }
            for a in &artifacts {
                if artifacts.len() > 1 {
                    writeln!(out, "# file: {}", a.name)?;
                }
                out.write_all(render(a)?.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.command {
        Command::Run(c) => c.clone(),
        Command::Replay { manifest } => load_manifest(manifest)?,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Domain("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let artifacts = pool.install(|| dispatch(&config))?;
    emit(cli, config, artifacts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(64)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ClosedPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("meanfield-opt: {e}");
            ExitCode::from(e.code())
        }
    }
}
