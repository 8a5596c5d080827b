//! `mubforge`: search, verify and classify complete MUB sets.

mod commands;
mod error;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (solution format 1)");
pub const TOOL_VERSION: &str = concat!("mubforge ", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "mubforge", version = VERSION, about = "Numerical search and classification of complete sets of mutually unbiased bases")]
struct Cli {
    /// Worker threads for batch commands (1 = serial).
    #[arg(long, global = true, env = "MUBFORGE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multi-start search for solutions.
    Search(SearchArgs),
    /// Check that a solution is a rank-d projector and yields MUBs.
    Verify(VerifyArgs),
    /// Generating set of the triple-product tensor.
    Classify(ClassifyArgs),
    /// Automorphism group of the triple-product tensor.
    Aut(AutArgs),
    /// Find a permutation mapping one solution's tensor onto another's.
    Isomorphic(IsomorphicArgs),
    /// Restricted defect of U = I - 2G.
    Defect(DefectArgs),
    /// Null space of the projector-residual Hessian.
    Hessian(HessianArgs),
    /// Weyl-Heisenberg MUBs for d = 2..5.
    Analytic(AnalyticArgs),
    /// Scaled-down rerun of the reference search and classification tables (1 or 2).
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(short = 'd', long = "dim")]
    pub d: usize,
    /// Number of independent searches.
    #[arg(short = 'n', long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, env = "MUBFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output directory for solutions and summary.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Starts per search before giving up.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub stage1_iters: usize,
    #[arg(long, default_value_t = 500)]
    pub stage2_iters: usize,
    /// Acceptance threshold on F.
    #[arg(long, default_value_t = 1e-12)]
    pub threshold: f64,
    #[arg(long)]
    pub no_polish: bool,
    /// Write 0 in the seconds column of summary.csv.
    #[arg(long)]
    pub omit_timing: bool,
    /// Required for d >= 6; enables periodic checkpoints of the best state.
    #[arg(long)]
    pub allow_long: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Solution JSON, or - for stdin.
    pub file: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Print eigenvalues and worst violations.
    #[arg(long)]
    pub explain: bool,
    /// Also write the Gram matrix as CSV.
    #[arg(long)]
    pub gram_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    /// Clustering tolerance for tensor phases.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Tolerance for matching phases to rational multiples of pi.
    #[arg(long, default_value_t = 1e-10)]
    pub symbolic_tol: f64,
    #[arg(long, default_value_t = 60)]
    pub max_denom: u64,
    /// Write (phase, count) rows.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    /// Copy of the solution with the generating set embedded.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AutArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Write generators, one line of 1-based images each.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write generators as a GAP group expression.
    #[arg(long)]
    pub gap: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IsomorphicArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Permutation file; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DefectArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub zero_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rank_tol: f64,
    /// Singular values, one per line.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// JSON report.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HessianArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub null_tol: f64,
    /// Eigenvalues, one per line.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyticArgs {
    #[arg(short = 'd', long = "dim")]
    pub d: usize,
    /// Solution JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub gram_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// 1 = search statistics, 2 = classification.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    pub table: u8,
    /// Restrict to one dimension.
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Searches per dimension (table 1) or solutions per dimension (table 2).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, env = "MUBFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: thread pool already initialized: {e}");
        }
    }
    let result = match cli.command {
        Command::Search(a) => commands::search(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Classify(a) => commands::classify(&a),
        Command::Aut(a) => commands::aut(&a),
        Command::Isomorphic(a) => commands::isomorphic(&a),
        Command::Defect(a) => commands::defect(&a),
        Command::Hessian(a) => commands::hessian(&a),
        Command::Analytic(a) => commands::analytic(&a),
        Command::Reproduce(a) => reproduce::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
