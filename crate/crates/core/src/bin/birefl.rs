//! Command-line front end for biharmonic continuation runs.

use biharmonic_reflect::harness::config::{parse_curve_spec, RunConfig};
use biharmonic_reflect::harness::{
    cmd_continue_field, cmd_kernel_dump, cmd_testgen_dump, cmd_verify,
};
use biharmonic_reflect::BoundaryCase;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "birefl",
    about = "Continue biharmonic functions across analytic curves and verify the reflection formulas",
    long_about = None,
    version
)]
struct Cli {
    /// Config file (flat key = value with [section] headers; see `config.rs`
    /// docs for the key list)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON reports
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Random seed override
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Boundary case override: i|ii|iii|iv|v
    #[arg(long, global = true)]
    case: Option<String>,

    /// Curve override: line | circle:a=<r> | implicit:poly=<i,j,c>+...:ref=<x>,<y>
    #[arg(long, global = true)]
    curve: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continue a verified test family over a random point sample and report
    /// errors (exit 1 when a gate fails)
    Verify,
    /// Continue the first configured field over a grid in U₂
    ContinueField,
    /// Dump kernel coefficient tables and series-vs-closed-form residuals
    KernelDump,
    /// Test-field generation utilities
    Testgen {
        #[command(subcommand)]
        action: TestgenAction,
    },
}

#[derive(Subcommand)]
enum TestgenAction {
    /// Print the configured family in the [field] record format
    Dump,
}

fn build_config(cli: &Cli) -> biharmonic_reflect::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(case) = &cli.case {
        cfg.case = BoundaryCase::parse(case)?;
    }
    if let Some(curve) = &cli.curve {
        cfg.curve = parse_curve_spec(curve)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("birefl: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Verify => cmd_verify(&cfg).map(|report| {
            for s in &report.summaries {
                println!(
                    "{}: {} points, {} failures, max_err {:.3e} (gate {:.1e}) — {}",
                    s.operator,
                    s.points,
                    s.failures,
                    s.max_abs_error,
                    s.gate,
                    if s.passed { "pass" } else { "FAIL" }
                );
            }
            println!(
                "report: {} / {}",
                cfg.out_dir.join("verify_records.csv").display(),
                cfg.out_dir.join("verify_summary.json").display()
            );
            report.passed
        }),
        Command::ContinueField => cmd_continue_field(&cfg).map(|warnings| {
            println!(
                "wrote {} ({} rows flagged)",
                cfg.out_dir.join("continued_field.csv").display(),
                warnings
            );
            true
        }),
        Command::KernelDump => cmd_kernel_dump(&cfg).map(|out| {
            print!("{out}");
            true
        }),
        Command::Testgen { action } => match action {
            TestgenAction::Dump => cmd_testgen_dump(&cfg).map(|out| {
                print!("{out}");
                true
            }),
        },
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("birefl: {e}");
            ExitCode::from(2)
        }
    }
}
