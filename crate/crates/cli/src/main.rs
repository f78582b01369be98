//! Config-driven experiment driver. One operation per invocation; every run
//! writes its artifacts (CSV/JSON, optional SVG), a config echo, and a
//! manifest into the output directory.
//!
//! Exit codes: 0 success, 2 validation failure, 3 budget exhausted
//! (partial outputs written and flagged), 4 numerical failure.

// `!(x > 0.0)` rejects NaN in range checks, which `x <= 0.0` would accept
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod runner;
mod svg;

use clap::{Args, Parser, Subcommand};
use config::{Config, Operation};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "traplab",
    version,
    about = "Random trap potentials on lattice boxes: spectra, state densities, survival probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism; 1 = bit-exact baseline)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenvalues of the operator on a box or free path
    Eigen(RunArgs),
    /// Monte Carlo integrated density of states
    Ids(RunArgs),
    /// Exact 1D hard-trap state-density series
    #[command(name = "ids-exact-1d")]
    IdsExact1d(RunArgs),
    /// Lifshitz-exponent fit of a state-density curve
    #[command(name = "lifshitz-fit")]
    LifshitzFit(RunArgs),
    /// Numeric inverse of a rate function
    Inverse(RunArgs),
    /// Survival estimates on one sampled field over a fixed box
    Survival(RunArgs),
    /// Quenched survival curve with adaptive boxes
    Quenched(RunArgs),
    /// Quenched curve plus the log-correction slope regression
    Scaling(RunArgs),
    /// Finite-volume state-density bracketing bounds
    Bracketing(RunArgs),
    /// Hypothesis checkers (moment, correlation, displacement, sup-potential)
    Assumptions(RunArgs),
    /// List every constraint violation without running anything
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Eigen(a) => run(Operation::Eigen, a),
        Command::Ids(a) => run(Operation::Ids, a),
        Command::IdsExact1d(a) => run(Operation::IdsExact1d, a),
        Command::LifshitzFit(a) => run(Operation::LifshitzFit, a),
        Command::Inverse(a) => run(Operation::Inverse, a),
        Command::Survival(a) => run(Operation::Survival, a),
        Command::Quenched(a) => run(Operation::Quenched, a),
        Command::Scaling(a) => run(Operation::Scaling, a),
        Command::Bracketing(a) => run(Operation::Bracketing, a),
        Command::Assumptions(a) => run(Operation::Assumptions, a),
        Command::Validate { config } => validate(config),
    }
}

fn load_config(path: &PathBuf, seed_override: Option<u64>) -> Result<Config, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut config = Config::parse(&text)?;
    if let Some(seed) = seed_override {
        match config.experiment.as_mut() {
            Some(exp) => exp.master_seed = seed,
            None => return Err("--seed given but the config has no [experiment] section".into()),
        }
    }
    Ok(config)
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn run(op: Operation, args: RunArgs) -> ExitCode {
    init_threads(args.threads);
    let config = match load_config(&args.config, args.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let diagnostics = config.diagnostics(Some(op));
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("invalid configuration: {d}");
        }
        return ExitCode::from(2);
    }
    // the environment may override only the output directory
    let out_dir = std::env::var("TRAPLAB_OUT").map(PathBuf::from).unwrap_or_else(|_| {
        PathBuf::from(&config.experiment.as_ref().expect("validated").output_dir)
    });

    match runner::run(op, &config, &out_dir) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout();
            for a in &outcome.artifacts {
                let _ = writeln!(stdout, "wrote {}", a.display());
            }
            if outcome.budget_exhausted {
                eprintln!("budget exhausted: outputs are partial and flagged");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify_error(&e))
        }
    }
}

fn classify_error(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<traplab::Error>() {
        match core {
            traplab::Error::NotConverged { .. } | traplab::Error::WalkLeftBox { .. } => 4,
            traplab::Error::Io(_) => 1,
            _ => 2,
        }
    } else if e.downcast_ref::<std::io::Error>().is_some() {
        1
    } else {
        2
    }
}

fn validate(path: PathBuf) -> ExitCode {
    let config = match load_config(&path, None) {
        Ok(c) => c,
        Err(e) => {
            println!("diagnostic: {e}");
            return ExitCode::from(2);
        }
    };
    let mut diags = config.diagnostics(None);
    let sections: [(Operation, bool); 10] = [
        (Operation::Eigen, config.eigen.is_some()),
        (Operation::Ids, config.ids.is_some()),
        (Operation::IdsExact1d, config.ids_exact_1d.is_some()),
        (Operation::LifshitzFit, config.lifshitz_fit.is_some()),
        (Operation::Inverse, config.inverse.is_some()),
        (Operation::Survival, config.survival.is_some()),
        (Operation::Quenched, config.quenched.is_some()),
        (Operation::Scaling, config.scaling.is_some()),
        (Operation::Bracketing, config.bracketing.is_some()),
        (Operation::Assumptions, config.assumptions.is_some()),
    ];
    // sections that are present must be internally consistent
    for (op, present) in sections {
        if present {
            for d in config.diagnostics(Some(op)) {
                if !diags.contains(&d) {
                    diags.push(d);
                }
            }
        }
    }
    if diags.is_empty() {
        println!("configuration is valid");
        ExitCode::SUCCESS
    } else {
        for d in &diags {
            println!("diagnostic: {d}");
        }
        ExitCode::from(2)
    }
}
