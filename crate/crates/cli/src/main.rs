//! Batch driver for the zero-table and duality-sum verifications.
//!
//! Exit codes: 0 all checks passed, 1 a verification measured out of
//! budget, 2 bad input or configuration, 3 a numeric budget (panels,
//! tolerance, tail) was exhausted before the requested accuracy.

mod commands;
mod config;
mod emit;

use std::fs;
use std::path::PathBuf;

use clap::Parser;

use config::Overlay;

#[derive(Parser)]
#[command(
    name = "zpd",
    version,
    about = "zero-table construction and prime/zero duality verification"
)]
struct Cli {
    /// key=value config file; command-line flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,

    /// zeros-find | zeros-import | verify-explicit-formula |
    /// verify-stationary-phase | verify-theorem41 | verify-superbound |
    /// verify-characters | verify-lemmas | fit
    #[arg(long)]
    command: Option<String>,

    /// twist frequency: m/q in lowest terms, or a positive decimal
    #[arg(long)]
    xi: Option<String>,

    /// window corners a,b (canonical) or a,b,c,d (plateau flat on [c,d])
    #[arg(long)]
    bump: Option<String>,

    /// comma-separated strictly increasing scales
    #[arg(long)]
    xgrid: Option<String>,

    /// zero table to use: a raw ordinate list or a cache written earlier
    #[arg(long)]
    zeros: Option<String>,

    /// two-column x y file for the fit command
    #[arg(long)]
    data: Option<String>,

    /// build the zero table up to this height when --zeros is absent
    #[arg(long)]
    height: Option<String>,

    /// verification tolerance / residual budget
    #[arg(long)]
    tol: Option<String>,

    /// directory for CSV, plot data, and the JSON summary
    #[arg(long)]
    out: Option<String>,

    /// worker threads; changes runtime only, never any output byte
    #[arg(long)]
    workers: Option<String>,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let file_layer = match &cli.config {
        None => Overlay::default(),
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read config {}: {e}", path.display());
                    return 2;
                }
            };
            match config::parse_config_file(&text) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
        }
    };
    let flag_layer = Overlay {
        command: cli.command,
        xi: cli.xi,
        bump: cli.bump,
        xgrid: cli.xgrid,
        zeros: cli.zeros,
        data: cli.data,
        height: cli.height,
        tol: cli.tol,
        out: cli.out,
        workers: cli.workers,
    };
    let cfg = match config::finalize(file_layer.merge(flag_layer)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    // pool size is fixed up front; every parallel reduction in the core
    // merges in index order, so this affects wall time only
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global();
    match commands::run(&cfg) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numeric_budget() {
                3
            } else {
                2
            }
        }
    }
}
