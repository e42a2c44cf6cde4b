use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zbw_cli::{checks, oracle, run, tol_scale_from_env};

#[derive(Parser)]
#[command(
    name = "zbw",
    version,
    about = "Spacetime-algebra spinning-particle simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration; writes trajectory.csv and report.json
    Run {
        /// Key=value configuration file
        config: PathBuf,
        /// Output directory
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Seed recorded in the manifest (all randomness sits behind it)
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a named invariant suite: algebra|dynamics|geometry|dirac|all
    Check {
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Append a control check that must fail (harness self-test)
        #[arg(long)]
        inject_perturbation: bool,
    },
    /// Compare the integrator against the analytic spinor evolution
    Oracle {
        /// Free-field configuration file
        config: PathBuf,
        /// Use the first-order debug stepper (negative control)
        #[arg(long)]
        euler_debug: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol_scale = match tol_scale_from_env() {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };

    match cli.command {
        Command::Run { config, out, seed } => {
            match run::execute_run(&config, &out, seed, tol_scale) {
                Ok(manifest) => {
                    println!(
                        "run complete: {} samples, step {:.6e}",
                        manifest.samples, manifest.step
                    );
                    for check in &manifest.checks {
                        let verdict = if check.pass { "PASS" } else { "FAIL" };
                        println!(
                            "{verdict} {}: measured {:.6e} (tolerance {:.3e})",
                            check.name, check.measured, check.tolerance
                        );
                    }
                    for path in &manifest.outputs {
                        println!("wrote {path}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}", e.message());
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Check {
            suite,
            seed,
            inject_perturbation,
        } => match checks::run_suite(&suite, seed, tol_scale, inject_perturbation) {
            Ok(outcomes) => {
                let mut all_pass = true;
                for c in &outcomes {
                    println!("{}", c.describe());
                    all_pass &= c.pass;
                }
                println!(
                    "{} checks, {} failed",
                    outcomes.len(),
                    outcomes.iter().filter(|c| !c.pass).count()
                );
                if all_pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(2)
            }
        },
        Command::Oracle {
            config,
            euler_debug,
        } => match oracle::evaluate_oracle(&config, euler_debug, tol_scale) {
            Ok(outcome) => {
                println!(
                    "max_error {:.6e} (bound {:.3e})",
                    outcome.max_error_coarse, outcome.error_bound
                );
                println!("max_error_halved_step {:.6e}", outcome.max_error_fine);
                println!(
                    "convergence_ratio {:.3} (required [{}, {}])",
                    outcome.ratio, outcome.ratio_band.0, outcome.ratio_band.1
                );
                if outcome.pass {
                    println!("PASS oracle");
                    ExitCode::SUCCESS
                } else {
                    println!("FAIL oracle");
                    ExitCode::from(1)
                }
            }
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(2)
            }
        },
    }
}
