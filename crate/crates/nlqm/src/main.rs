use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nlqm::cli::{compare_runs, exit_code, run, sweep, verify_suite, RunConfig, Suite};
use nlqm::Error;

/// Two-state-vector nonlinear Schrödinger dynamics: simulate, verify, and
/// export trajectories.
#[derive(Parser)]
#[command(name = "nlqm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run config and write trajectory/report artifacts.
    Run {
        /// Path to a TOML run config.
        config: PathBuf,
        /// Dotted-path overrides, e.g. --set coupling.b=0.25 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the built-in invariant suites.
    Verify {
        /// all | reduced | analytic | integrator | appendix | spatial
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Run two configs and report per-column max deviations.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        /// Column to headline: N, tau, Re_gamma, Im_gamma, delta, omega0_sq,
        /// schwarz, purity, psi, phi.
        #[arg(long)]
        field: String,
        /// Overrides applied to both configs (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run a config over a parameter grid across a worker pool.
    Sweep {
        config: PathBuf,
        /// Grid spec: comma-separated axes, each `path=start:stop:count` or
        /// `path=v1|v2|v3`. Example:
        /// --grid "solution.vartheta=0:0.6:4,coupling.a=0.5|1.0"
        #[arg(long)]
        grid: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn classify_error(err: &Error) -> i32 {
    match err {
        Error::IntegrationFailure { .. } => exit_code::NUMERICAL_FAILURE,
        _ => exit_code::CONFIG_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if let Error::IntegrationFailure { last_good_time, .. } = &err {
                eprintln!("last good time: {last_good_time}");
            }
            classify_error(&err)
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(cli: Cli) -> nlqm::Result<i32> {
    match cli.command {
        Command::Run { config, set } => {
            let config = RunConfig::load(&config, &set)?;
            let report = run(&config)?;
            print!("{}", report.summary());
            Ok(if report.all_pass() {
                exit_code::SUCCESS
            } else {
                exit_code::CHECK_FAILURE
            })
        }
        Command::Verify { suite } => {
            let checks = verify_suite(suite)?;
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(8);
            let mut all_pass = true;
            for c in &checks {
                println!(
                    "  {:<width$}  {:>12.3e}  (tol {:>9.1e})  {}",
                    c.name,
                    c.value,
                    c.tolerance,
                    if c.pass { "pass" } else { "FAIL" },
                );
                all_pass &= c.pass;
            }
            println!(
                "{} checks, {}",
                checks.len(),
                if all_pass { "all passed" } else { "FAILURES" }
            );
            Ok(if all_pass {
                exit_code::SUCCESS
            } else {
                exit_code::CHECK_FAILURE
            })
        }
        Command::Compare {
            config_a,
            config_b,
            field,
            set,
        } => {
            let a = RunConfig::load(&config_a, &set)?;
            let b = RunConfig::load(&config_b, &set)?;
            let report = compare_runs(&a, &b, &field)?;
            for (name, dev) in &report.deviations {
                println!("  max |a-b| {name:<10} {dev:.6e}");
            }
            println!("requested field `{field}`: {:.6e}", report.requested);
            Ok(exit_code::SUCCESS)
        }
        Command::Sweep { config, grid, set } => {
            let base = RunConfig::load(&config, &set)?;
            let cells = sweep(&base, &grid)?;
            let mut all_ok = true;
            for cell in &cells {
                match &cell.outcome {
                    Ok(true) => println!("  ok    {}  ->  {}", cell.label, cell.directory.display()),
                    Ok(false) => {
                        all_ok = false;
                        println!("  FAIL  {}  ->  {}", cell.label, cell.directory.display());
                    }
                    Err(e) => {
                        all_ok = false;
                        println!("  ERROR {}  ({e})", cell.label);
                    }
                }
            }
            println!("{} sweep cells", cells.len());
            Ok(if all_ok {
                exit_code::SUCCESS
            } else {
                exit_code::CHECK_FAILURE
            })
        }
    }
}
