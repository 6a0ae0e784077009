use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use finsler_cli::config::Check;
use finsler_cli::info::{metric_info, parse_spec};
use finsler_cli::output::{csv_string, write_reports};
use finsler_cli::{load, run, LoadedConfig, RunReport, SetupError, EXIT_CONFIG, EXIT_NON_CONVERGENCE};
use finsler_core::TheoremId;

#[derive(Parser)]
#[command(name = "finsler-hardy", version, about = "Numerical checks of Hardy-type inequalities on Finsler spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in the config and write CSV and JSON reports.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the BEST_CONSTANT and SHARPNESS checks of the config.
    Constant {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the CAPACITY checks of the config.
    Capacity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the certificate and sampled constants of a metric.
    MetricInfo {
        /// Inline JSON or a path to a JSON file.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        json: bool,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn selected(cfg: &LoadedConfig, keep: &[TheoremId], default: TheoremId) -> Vec<Check> {
    let mut checks: Vec<Check> = cfg
        .checks
        .iter()
        .filter(|c| keep.contains(&c.theorem))
        .cloned()
        .collect();
    if checks.is_empty() {
        checks.push(Check {
            theorem: default,
            params: Default::default(),
        });
    }
    checks
}

fn execute(config: &Path, out: Option<PathBuf>, filter: Option<(&[TheoremId], TheoremId)>) -> ExitCode {
    let cfg = match load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return code(EXIT_CONFIG);
        }
    };
    let checks = match filter {
        Some((keep, default)) => selected(&cfg, keep, default),
        None => cfg.checks.clone(),
    };
    if let Err(e) = checks.iter().try_for_each(|c| cfg.validate_extra(c)) {
        eprintln!("config error: {e}");
        return code(EXIT_CONFIG);
    }
    let report: RunReport = match run(&cfg, &checks) {
        Ok(r) => r,
        Err(SetupError::Config(e)) => {
            eprintln!("config error: {e}");
            return code(EXIT_CONFIG);
        }
        Err(e @ SetupError::Solver(_)) => {
            eprintln!("{e}");
            return code(EXIT_NON_CONVERGENCE);
        }
    };
    print!("{}", csv_string(&report.rows));
    for row in &report.rows {
        if let Some(err) = &row.error {
            eprintln!("{} [{}]: {err}", row.theorem_id, row.params);
        }
    }
    let dir = match (out, filter) {
        (Some(d), _) => Some(d),
        (None, None) => Some(cfg.resolve(&cfg.raw.output.dir)),
        (None, Some(_)) => None,
    };
    if let Some(dir) = dir {
        match write_reports(&dir, &cfg.raw.output.csv, &cfg.raw.output.json, &report) {
            Ok((c, j)) => eprintln!("wrote {} and {}", c.display(), j.display()),
            Err(e) => {
                eprintln!("failed to write reports: {e}");
                return code(finsler_cli::EXIT_FAIL);
            }
        }
    }
    code(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { config, out } => execute(&config, out, None),
        Command::Constant { config, out } => execute(
            &config,
            out,
            Some((&[TheoremId::BestConstant, TheoremId::Sharpness], TheoremId::BestConstant)),
        ),
        Command::Capacity { config, out } => {
            execute(&config, out, Some((&[TheoremId::Capacity], TheoremId::Capacity)))
        }
        Command::MetricInfo { spec, json } => {
            let parsed = match parse_spec(&spec) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("invalid spec: {e}");
                    return code(EXIT_CONFIG);
                }
            };
            match metric_info(&parsed) {
                Ok(info) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&info).expect("serialisable"));
                    } else {
                        print!("{}", info.render());
                    }
                    code(finsler_cli::EXIT_PASS)
                }
                Err(e) => {
                    eprintln!("invalid spec: {e}");
                    code(if e.is_non_convergence() { EXIT_NON_CONVERGENCE } else { EXIT_CONFIG })
                }
            }
        }
    }
}
