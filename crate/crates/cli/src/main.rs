//! `lis-mimo`: runs scenarios and sweeps of the LIS downlink model and
//! writes CSV results.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 2 when a
//! numerical invariant is violated (or any sweep point fails).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use lis_core::experiment::{self, recipes, ResultRow, ScenarioConfig, SweepParam, SweepSpec};
use lis_core::Error;

#[derive(Parser)]
#[command(name = "lis-mimo", version, about = "Multiuser MIMO with a large intelligent surface")]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one parameter of a scenario.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// users, elements_per_axis, efficiency, or spacing.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Label written to the series column.
        #[arg(long, default_value = "")]
        series: String,
    },
    /// Sum capacity against the number of users (WMMSE, line array).
    Fig2 {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = recipes::FIG2_NOISE_VARIANCE)]
        noise_variance: f64,
    },
    /// Received power against surface size (MF, planar array).
    Fig3 {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    config_sha256: String,
    build: String,
    rows: usize,
    failed_rows: usize,
    wall_time_total: f64,
    wall_times: Vec<f64>,
}

fn build_id() -> String {
    format!(
        "{} {} ({})",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        if cfg!(debug_assertions) { "debug" } else { "release" }
    )
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn hash_json<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("configs serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn write_outputs(command: &str, config_hash: String, rows: &[ResultRow], out: &Path, start: Instant) -> Result<(), Error> {
    experiment::emit_csv(rows, out)?;
    let meta = Meta {
        command,
        config_sha256: config_hash,
        build: build_id(),
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| r.is_error()).count(),
        wall_time_total: start.elapsed().as_secs_f64(),
        wall_times: rows.iter().map(|r| r.wall_time).collect(),
    };
    let path = sidecar_path(out);
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&path, text + "\n").map_err(|source| Error::Io { path, source })
}

fn execute(command: Command) -> Result<Vec<ResultRow>, Error> {
    let start = Instant::now();
    let (name, hash, rows, out) = match command {
        Command::Run { config, out } => {
            let config = ScenarioConfig::load(&config)?;
            let row = experiment::run(&config)?;
            ("run", hash_json(&config), vec![row], out)
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
            series,
        } => {
            let spec = SweepSpec::new(series, param, values, ScenarioConfig::load(&config)?)?;
            ("sweep", hash_json(&spec), experiment::sweep(&spec), out)
        }
        Command::Fig2 { out, noise_variance } => {
            let specs = recipes::fig2(noise_variance).map_err(|e| Error::Config(e.to_string()))?;
            ("fig2", hash_json(&specs), experiment::sweep_all(&specs), out)
        }
        Command::Fig3 { out } => {
            let specs = recipes::fig3()?;
            ("fig3", hash_json(&specs), experiment::sweep_all(&specs), out)
        }
    };
    write_outputs(name, hash, &rows, &out, start)?;
    Ok(rows)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors share exit status 1 with bad configs; 2 is kept for
    // numerical failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli.command) {
        Ok(rows) => {
            let failed = rows.iter().filter(|r| r.is_error()).count();
            if failed > 0 {
                eprintln!("error: {failed} of {} points failed; see the error column", rows.len());
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
