use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use illposed_cli::experiments::audit_coverings;
use illposed_cli::ext::{format_real, parse_real};
use illposed_cli::{run_experiment, CliError, ExperimentConfig, ExperimentId, FileConfig, Overrides, Params, Report};
use illposed_core::spectral::GridSpec;

#[derive(Parser)]
#[command(name = "illposed", version, about = "Runs the Euler ill-posedness experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV files and manifest
    Run {
        experiment: ExperimentId,

        /// TOML configuration; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,

        #[arg(long)]
        seed: Option<u64>,

        /// Output directory
        #[arg(long, env = "ILLPOSED_OUT")]
        out: Option<PathBuf>,

        /// Worker threads for sweep points
        #[arg(long)]
        jobs: Option<usize>,

        #[arg(long)]
        memory_budget_mb: Option<f64>,

        #[command(flatten)]
        params: Params,
    },

    /// Summarise manifests (files or experiment directories) in one table
    Report { manifests: Vec<PathBuf> },

    /// Build coverings and partitions of unity and check their axioms
    AuditCovering {
        #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "0.3,0.5,0.8,1")]
        alpha: Vec<f64>,

        #[arg(long, value_parser = parse_real, default_value = "256")]
        xi_max: f64,

        #[arg(long, value_parser = parse_real, default_value = "pi")]
        half_width: f64,

        #[arg(long, default_value_t = 512)]
        grid_n: usize,

        #[arg(long, value_parser = parse_real, default_value = "2")]
        p: f64,

        /// Directory for the partition JSON files
        #[arg(long, env = "ILLPOSED_OUT")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// `Ok(false)` when an assertion failed.
fn dispatch(cmd: Command) -> Result<bool, CliError> {
    match cmd {
        Command::Run { experiment, config, seed, out, jobs, memory_budget_mb, params } => {
            let file = config.as_deref().map(FileConfig::load).transpose()?;
            let over = Overrides { seed, output: out, jobs, memory_budget_mb, params };
            let cfg = ExperimentConfig::resolve(experiment, file, over)?;
            let outcome = run_experiment(&cfg)?;
            for a in &outcome.manifest.assertions {
                let status = if a.passed { "pass" } else { "FAIL" };
                println!("{status}  {}: {} (expected {})", a.name, show(a.measured), a.prediction);
            }
            println!("wrote {}", outcome.dir.display());
            Ok(outcome.manifest.passed)
        }
        Command::Report { manifests } => {
            let report = Report::from_paths(&manifests)?;
            print!("{}", report.table());
            Ok(report.passed())
        }
        Command::AuditCovering { alpha, xi_max, half_width, grid_n, p, out } => {
            for &a in &alpha {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(CliError::Config(format!("range 0 < alpha <= 1 violated: alpha = {a}")));
                }
            }
            let grid = GridSpec::new(half_width, grid_n)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
            }
            let reports = audit_coverings(&alpha, xi_max, grid, p, out.as_deref())?;
            let mut ok = true;
            for r in &reports {
                let failed: Vec<&str> = r.invariants().iter().filter(|i| !i.ok).map(|i| i.name).collect();
                ok &= failed.is_empty();
                println!(
                    "alpha {:<4} patches {:>6} overlap {:>2} area law [{:.3}, {:.3}] eccentricity {:.3} \
                     partition {:.1e} kernel {:.3}  {}",
                    r.alpha,
                    r.patches,
                    r.max_overlap,
                    r.area_law.0,
                    r.area_law.1,
                    r.max_eccentricity,
                    r.partition_defect,
                    r.kernel_bound,
                    if failed.is_empty() { "pass".to_string() } else { format!("FAIL ({})", failed.join(", ")) }
                );
            }
            Ok(ok)
        }
    }
}

fn show(v: f64) -> String {
    if v.is_finite() && v != 0.0 && !(1e-3..1e6).contains(&v.abs()) {
        format!("{v:.6e}")
    } else {
        format_real(v)
    }
}
