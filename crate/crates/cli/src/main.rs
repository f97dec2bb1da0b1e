mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Parametric MTZ, DL and SCF formulations of the asymmetric TSP: build, bound,
/// separate and verify.
#[derive(Parser, Debug)]
#[command(name = "ptsp", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Number of nodes.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Enumeration cap for cycle and subset builds; tour enumeration allows one more.
    #[arg(long, default_value_t = ptsp_core::formulations::DEFAULT_BUILD_CAP)]
    pub cap: usize,
    /// Also write the result as JSON to this file.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Instance file in the native `ATSP <name> <n>` format; generated from
    /// `--n`/`--seed`/`--mode` when absent.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value = "uniform")]
    pub mode: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Mtz,
    Dl,
    Scf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    /// Circuit rows, unit or `d` right-hand side.
    Circuit,
    /// Cut rows, unit or `b` right-hand side.
    Cut,
    /// Pair rows and the lifted DL closure rows (or `P_DL(d)` rows with a parameter).
    Dl,
    /// Pair rows and the DL rows of the closure over the MTZ vertices.
    DlVmtz,
    /// The cycle sums of a `d` parameter file.
    Dbar,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a formulation's H-description as JSON.
    Build {
        #[command(flatten)]
        common: Common,
        /// Formulation id, e.g. `dMTZ`, `Q-dDL`, `Cl-SCF`.
        #[arg(long)]
        formulations: String,
        /// Parameter JSON for parametric formulations (default: uniform).
        #[arg(long)]
        param_file: Option<PathBuf>,
        /// Keep rows implied by the assignment rows.
        #[arg(long)]
        no_prune: bool,
    },
    /// LP bound table for a comma-separated list of formulations.
    Bound {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "Cl-SCF,Cl-DL,Cl-DL-on-VMTZ,Cl-MTZ")]
        formulations: String,
        /// One parameter file per parametric formulation, in order.
        #[arg(long)]
        param_file: Vec<PathBuf>,
    },
    /// Exact membership of a point, with a certificate.
    Member {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        formulations: String,
        #[arg(long)]
        param_file: Option<PathBuf>,
        /// Point file: JSON object `{"i,j": "p/q"}`, absent arcs zero.
        #[arg(long)]
        x: PathBuf,
    },
    /// Run a separation oracle on a point.
    Separate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        oracle: Oracle,
        #[arg(long)]
        param_file: Option<PathBuf>,
        #[arg(long)]
        x: Option<PathBuf>,
    },
    /// Facet census of one family against its predicate.
    Facets {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Census this parameter only (default: interior, boundary and vertex samples).
        #[arg(long)]
        param_file: Option<PathBuf>,
    },
    /// Pairwise comparison of two formulations.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Exactly two comma-separated ids.
        #[arg(long)]
        formulations: String,
        #[arg(long)]
        param_file: Vec<PathBuf>,
    },
    /// Closure identities and the closure chain.
    Closures {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        probes: usize,
        /// Also project the stacked extended formulations.
        #[arg(long)]
        with_ef: bool,
    },
    /// Local convex hulls of the two-node potential sets.
    Hull {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        dij: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        dji: Option<String>,
        /// Seeded pairs to check when `--dij`/`--dji` are absent.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
    },
    /// Solve an instance exactly.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "Cl-SCF")]
        formulations: String,
        #[arg(long)]
        param_file: Option<PathBuf>,
        /// `enumerate` or `branch-and-bound`.
        #[arg(long, default_value = "branch-and-bound")]
        strategy: String,
    },
    /// Run every structural check at one size and print a summary table.
    VerifyPaper {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        instances: usize,
        /// Print every check, not just the summary.
        #[arg(long)]
        verbose: bool,
    },
}

/// Result of a command that completed.
pub enum Outcome {
    Ok,
    Refuted,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
