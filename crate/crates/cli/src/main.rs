mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::SearchArgs;

#[derive(Parser)]
#[command(name = "phaseperm", version, about = "Heisenberg/Clifford group and SIC workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Representation matrices.
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// Monomiality of the Clifford group in the phase-permutation basis.
    Clifford {
        #[command(subcommand)]
        action: CliffordAction,
    },
    /// Block structure and invariant subspace of the Zauner unitary.
    Zauner {
        #[arg(long = "N")]
        dim: usize,
    },
    /// SIC equations, search and verification.
    Sic {
        #[command(subcommand)]
        action: SicAction,
    },
    /// Transformation laws of theta functions with rational characteristics.
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[arg(long, default_value_t = 40)]
        trunc: usize,
    },
}

#[derive(Subcommand)]
enum RepAction {
    Show {
        #[arg(long = "N")]
        dim: usize,
        #[arg(long, default_value = "pp")]
        basis: String,
    },
}

#[derive(Subcommand)]
enum CliffordAction {
    Verify {
        #[arg(long = "N")]
        dim: usize,
        /// Close the whole group instead of checking generators.
        #[arg(long)]
        full_group: bool,
        /// Largest number of projective elements to enumerate.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum SicAction {
    /// Exact moduli of the N = 4 fiducial in the phase-permutation basis.
    SolveN4,
    Search {
        #[arg(long = "N")]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Restrict to the Zauner eigenvalue-1 subspace (phase-permutation basis).
        #[arg(long)]
        zauner: bool,
        #[arg(long, default_value = "std")]
        basis: String,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match cli.command {
        Command::Rep { action: RepAction::Show { dim, basis } } => commands::rep_show(dim, &basis),
        Command::Clifford { action: CliffordAction::Verify { dim, full_group, budget } } => {
            commands::clifford_verify(dim, full_group, budget)
        }
        Command::Zauner { dim } => commands::zauner(dim),
        Command::Sic { action } => match action {
            SicAction::SolveN4 => commands::sic_solve_n4(),
            SicAction::Search { dim, seed, restarts, tol, zauner, basis, max_iters, out } => {
                commands::sic_search(&SearchArgs { dim, seed, restarts, tol, zauner, basis, max_iters, out })
            }
            SicAction::Check { file, tol } => commands::sic_check(&file, tol),
        },
        Command::Theta { tau, n, trunc } => commands::theta(&tau, n, trunc),
    };
    if let Some(err) = report.results.get("error") {
        eprintln!("error: {}", err.as_str().unwrap_or_default());
    }
    println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json values serialize"));
    ExitCode::from(report.status.code() as u8)
}
