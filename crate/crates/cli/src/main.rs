//! `ncsq`: generate instances, run the verifier suite, sweep a parameter,
//! evaluate the norms of one instance.
//!
//! Exit codes: 0 when every hard check passes, 1 on a check failure
//! (witness instances are written), 2 on configuration, parse or io errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncsq_core::error::Error;
use ncsq_core::field::InstanceFile;
use ncsq_core::suite::{self, SuiteConfig, SuiteResult, SweepAxis};

#[derive(Parser)]
#[command(name = "ncsq", version, about = "Weighted noncommutative square-function verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one random instance satisfying the normalization.
    Gen {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every check on the configured instances.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination; stdout when absent and not set in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One suite per axis value, concatenated into one CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// lambda, J or a1-cap.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Print the norms of an instance file as JSON.
    Norms {
        instance: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Rademacher rows for the randomized norms.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Checks,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn load_config(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<SuiteConfig, Error> {
    let mut cfg = SuiteConfig::from_file(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.out = out;
    }
    Ok(cfg)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match path {
        Some(p) => suite::write_atomic(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn summary_path(cfg: &SuiteConfig) -> Option<PathBuf> {
    cfg.summary
        .clone()
        .or_else(|| cfg.out.as_ref().map(|p| p.with_extension("summary.json")))
}

fn witness_dir(cfg: &SuiteConfig) -> PathBuf {
    cfg.witness_dir.clone().unwrap_or_else(|| {
        cfg.out
            .as_ref()
            .and_then(|p| p.parent())
            .filter(|d| !d.as_os_str().is_empty())
            .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
    })
}

fn report_failures(result: &mut SuiteResult, dir: &Path) -> Result<(), Error> {
    for p in suite::write_witnesses(result, dir)? {
        eprintln!("witness: {}", p.display());
    }
    for r in result.reports.iter().filter(|r| r.failed()) {
        eprintln!(
            "FAIL {} seed={} lhs={:e} rhs={:e} budget={:e}",
            r.check_id, r.seed, r.lhs, r.rhs, r.budget
        );
    }
    Ok(())
}

fn cmd_gen(config: &Path, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let cfg = load_config(config, seed, None)?;
    let inst = suite::random_instance(cfg.grid, cfg.weight, cfg.seed, cfg.lambda)?;
    let file = InstanceFile::new(&inst.f, &inst.w, Some(inst.lambda), Some(inst.seed));
    suite::write_atomic(out, file.to_json()?.as_bytes())?;
    Ok(())
}

fn cmd_suite(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load_config(config, seed, out)?;
    let mut result = suite::run_suite(&cfg)?;
    let failed = result.failed();
    if failed {
        report_failures(&mut result, &witness_dir(&cfg))?;
    }
    emit(cfg.out.as_deref(), &suite::csv_bytes(&result.reports, None)?)?;
    if let Some(p) = summary_path(&cfg) {
        let json = serde_json::to_string_pretty(&result.summary()).map_err(Error::from)?;
        suite::write_atomic(&p, json.as_bytes())?;
    }
    if failed {
        return Err(Failure::Checks);
    }
    Ok(())
}

fn cmd_sweep(
    config: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    axis: &str,
    values: &[f64],
) -> Result<(), Failure> {
    let cfg = load_config(config, seed, out)?;
    let axis: SweepAxis = axis.parse()?;
    let mut result = suite::sweep(&cfg, axis, values)?;
    let failed = result.failed();
    if failed {
        let dir = witness_dir(&cfg);
        for (_, r) in &mut result.points {
            report_failures(r, &dir)?;
        }
    }
    emit(cfg.out.as_deref(), &result.csv_bytes()?)?;
    if let Some(p) = summary_path(&cfg) {
        let per: Vec<serde_json::Value> = result
            .points
            .iter()
            .map(|(v, r)| serde_json::json!({ "axis": axis.name(), "value": v, "summary": r.summary() }))
            .collect();
        let json = serde_json::to_string_pretty(&per).map_err(Error::from)?;
        suite::write_atomic(&p, json.as_bytes())?;
    }
    if failed {
        return Err(Failure::Checks);
    }
    Ok(())
}

fn cmd_norms(instance: &Path, seed: Option<u64>, samples: usize, out: Option<&Path>) -> Result<(), Failure> {
    let file = suite::load_instance(instance)?;
    let inst = suite::instance_from_file(&file, seed.unwrap_or(0), 1.0)?;
    let norms = suite::instance_norms(&inst, samples)?;
    let mut json = serde_json::to_string_pretty(&norms).map_err(Error::from)?;
    json.push('\n');
    emit(out, json.as_bytes())?;
    Ok(())
}

fn init_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("NCSQ_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("NCSQ_THREADS: expected a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<(), Failure> {
        init_threads()?;
        match cli.command {
            Command::Gen { config, seed, out } => cmd_gen(&config, seed, &out),
            Command::Suite { config, seed, out } => cmd_suite(&config, seed, out),
            Command::Sweep {
                config,
                seed,
                out,
                axis,
                values,
            } => cmd_sweep(&config, seed, out, &axis, &values),
            Command::Norms {
                instance,
                seed,
                samples,
                out,
            } => cmd_norms(&instance, seed, samples, out.as_deref()),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
