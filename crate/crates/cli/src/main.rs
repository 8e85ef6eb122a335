//! `fockbath` experiment runner.
//!
//! Every subcommand writes `<subcommand>.json` and its CSV tables into the
//! output directory and prints the report. Exit status: 0 all checks pass,
//! 1 a check failed, 2 usage error, 3 numerical failure.

mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use experiments::{bath, chain, dynamics, fock};
use fockbath::Error;
use report::{Diagnostic, Outcome, Report};

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fockbath",
    version,
    about = "Reproducible oscillator and thermal-bath experiments"
)]
struct Cli {
    /// Directory for the JSON report and CSV tables.
    #[arg(
        long,
        global = true,
        env = "FOCKBATH_OUT_DIR",
        default_value = "fockbath-out"
    )]
    out_dir: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall-clock duration in the report (breaks bit-identical output).
    #[arg(long, global = true)]
    timing: bool,
    /// Do not print the report to stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
enum Command {
    /// Gram matrix of the normalized monomials.
    Gram(fock::GramArgs),
    /// Coherent vectors, tail mass and the reproducing kernel.
    Coherent(fock::CoherentArgs),
    /// Ladder and quadrature commutators, operator-ordering gap.
    Commutator(fock::CommutatorArgs),
    /// Classical transport against Schrodinger evolution.
    Evolve(dynamics::EvolveArgs),
    /// Damped oscillator envelope and amplitudes.
    Damp(dynamics::DampArgs),
    /// Particle ensemble drawn from a coherent density.
    Ensemble(dynamics::EnsembleArgs),
    /// Partition function and the Planck constant h = 2 pi/(beta omega).
    Partition(bath::PartitionArgs),
    /// Gibbs-preserving variations and the Taylor test.
    Variation(bath::VariationArgs),
    /// Tilted Gibbs measure and equilibrium moments.
    Tilt(bath::TiltArgs),
    /// Sphere pushforward onto the Gibbs measure.
    Sphere(bath::SphereArgs),
    /// Measured chain spectrum against the dispersion relation.
    ChainDispersion(chain::DispersionArgs),
    /// Continuum-limit error under lattice refinement.
    Continuum(chain::ContinuumArgs),
    /// Chain normal modes and their rescaling.
    Rescale(chain::RescaleArgs),
    /// Exact commutators of quantized chain modes.
    ModeCommutator(chain::ModeCommutatorArgs),
    /// Chain relaxation under friction.
    Relax(chain::RelaxArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gram(_) => "gram",
            Command::Coherent(_) => "coherent",
            Command::Commutator(_) => "commutator",
            Command::Evolve(_) => "evolve",
            Command::Damp(_) => "damp",
            Command::Ensemble(_) => "ensemble",
            Command::Partition(_) => "partition",
            Command::Variation(_) => "variation",
            Command::Tilt(_) => "tilt",
            Command::Sphere(_) => "sphere",
            Command::ChainDispersion(_) => "chain-dispersion",
            Command::Continuum(_) => "continuum",
            Command::Rescale(_) => "rescale",
            Command::ModeCommutator(_) => "mode-commutator",
            Command::Relax(_) => "relax",
        }
    }

    fn run(&self) -> fockbath::Result<Outcome> {
        match self {
            Command::Gram(a) => fock::gram(a),
            Command::Coherent(a) => fock::coherent(a),
            Command::Commutator(a) => fock::commutator_run(a),
            Command::Evolve(a) => dynamics::evolve(a),
            Command::Damp(a) => dynamics::damp(a),
            Command::Ensemble(a) => dynamics::ensemble(a),
            Command::Partition(a) => bath::partition(a),
            Command::Variation(a) => bath::variation(a),
            Command::Tilt(a) => bath::tilt(a),
            Command::Sphere(a) => bath::sphere(a),
            Command::ChainDispersion(a) => chain::dispersion(a),
            Command::Continuum(a) => chain::continuum(a),
            Command::Rescale(a) => chain::rescale(a),
            Command::ModeCommutator(a) => chain::mode_commutator(a),
            Command::Relax(a) => chain::relax(a),
        }
    }
}

/// Errors caused by the requested configuration rather than the numerics.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Parameter(_) | Error::Domain(_) | Error::Capacity { .. } | Error::Dimension { .. }
    )
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Capacity { .. } => "capacity",
        Error::Dimension { .. } => "dimension",
        Error::Domain(_) => "domain",
        Error::Parameter(_) => "parameter",
        Error::Truncation { .. } => "truncation",
        Error::TruncationOverflow { .. } => "truncation-overflow",
        Error::Sampler { .. } => "sampler",
        Error::Instability(_) => "instability",
        Error::Consistency(_) => "consistency",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }

    let start = Instant::now();
    let name = cli.command.name();
    let config = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    let result = cli.command.run();
    let duration = cli.timing.then(|| start.elapsed().as_secs_f64());

    let (report, tables, code) = match result {
        Ok(outcome) => {
            let pass = outcome.checks.iter().all(|c| c.pass);
            let report = Report {
                schema_version: report::SCHEMA_VERSION,
                subcommand: name,
                relation: outcome.relation,
                config,
                pass,
                checks: outcome.checks,
                tables: Vec::new(),
                diagnostic: None,
                duration_seconds: duration,
            };
            let code = if pass { 0 } else { EXIT_CHECK };
            (report, outcome.tables, code)
        }
        Err(e) if is_usage(&e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            let report = Report {
                schema_version: report::SCHEMA_VERSION,
                subcommand: name,
                relation: "",
                config,
                pass: false,
                checks: Vec::new(),
                tables: Vec::new(),
                diagnostic: Some(Diagnostic {
                    kind: error_kind(&e),
                    message: e.to_string(),
                }),
                duration_seconds: duration,
            };
            (report, Vec::new(), EXIT_NUMERICAL)
        }
    };

    match report::write(&cli.out_dir, report, &tables) {
        Ok(json) => {
            if !cli.quiet {
                println!("{json}");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
