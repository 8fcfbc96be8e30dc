//! Scenario-driven command-line front end. Exit codes: 0 on pass, 1 on a
//! numeric check failure, 2 on configuration errors.

mod checks;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use checks::Outcome;
use config::{ConfigError, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "dunkl-cli",
    version,
    about = "Verification suites and reports for the rank-one Dunkl toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the kernel, moment, and remainder identity suite.
    VerifyIdentities(CommonArgs),
    /// Check translation-operator properties (symmetry, contraction, ...).
    OperatorProperties(CommonArgs),
    /// Emit the modulus / K-functional equivalence report over the grid.
    Equivalence(CommonArgs),
    /// Compute Besov-type seminorms with window-doubling stability.
    Besov(CommonArgs),
    /// List the test-function catalog.
    Catalog,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight parameter; must exceed -1/2 (or exactly -0.5 for the
    /// classical oracle paths inside the checks).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Remainder order (k >= 1).
    #[arg(long)]
    k: Option<usize>,
    /// Primary integrability exponent (1 <= p < infinity).
    #[arg(long)]
    p: Option<f64>,
    /// Secondary exponent: a number or "inf".
    #[arg(long)]
    q: Option<String>,
    /// Smoothness exponent in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Catalog function, e.g. "gaussian(1.0)" or "bump(1.5)".
    #[arg(long)]
    function: Option<String>,
    /// Grid as min:max:count:spacing with spacing log or linear.
    #[arg(long)]
    grid: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Residual tolerance for identity checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the randomized spot-check points.
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve(args: &CommonArgs) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text, path)?;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.p {
        cfg.p = v;
    }
    if let Some(v) = &args.q {
        cfg.q = v.clone();
    }
    if let Some(v) = args.beta {
        cfg.beta = v;
    }
    if let Some(v) = &args.function {
        cfg.function = v.clone();
    }
    if let Some(v) = &args.grid {
        cfg.apply_grid_flag(v)?;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = &args.format {
        cfg.set_format(v)?;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    cfg.validate()?;
    // Domain checks that belong to configuration, not numerics: surface
    // them before any work with the library's own message.
    dunkl::DunklParameter::new(cfg.alpha).map_err(|e| ConfigError(e.to_string()))?;
    dunkl::functions::TestFunction::parse(&cfg.function)
        .map_err(|e| ConfigError(e.to_string()))?;
    cfg.q_exponent()?;
    Ok(cfg)
}

fn emit(cfg: &ScenarioConfig, text: &str) -> Result<(), ConfigError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Catalog => {
            print!("{}", checks::cmd_catalog());
            return ExitCode::SUCCESS;
        }
        Command::VerifyIdentities(a)
        | Command::OperatorProperties(a)
        | Command::Equivalence(a)
        | Command::Besov(a) => a,
    };
    let cfg = match resolve(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::VerifyIdentities(_) => checks::cmd_verify_identities(&cfg),
        Command::OperatorProperties(_) => checks::cmd_operator_properties(&cfg),
        Command::Equivalence(_) => checks::cmd_equivalence(&cfg),
        Command::Besov(_) => checks::cmd_besov(&cfg),
        Command::Catalog => unreachable!("handled above"),
    };
    match result {
        Ok((text, outcome)) => {
            if let Err(e) = emit(&cfg, &text) {
                eprintln!("output error: {e}");
                return ExitCode::from(2);
            }
            match outcome {
                Outcome::Pass => ExitCode::SUCCESS,
                Outcome::Fail(reason) => {
                    eprintln!("check failed: {reason}");
                    ExitCode::from(1)
                }
            }
        }
        Err(failure) => {
            eprintln!("numeric failure: {}", failure.0);
            ExitCode::from(1)
        }
    }
}
