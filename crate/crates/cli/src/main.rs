//! `supercrit` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 usage error, 3 the input
//! or a checked property is invalid, 4 a resource budget was exceeded.

mod commands;
mod cylinder;
mod tradeoff;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cylinder::CylArgs;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use supercrit::cnf::CnfError;
use supercrit::game::GameError;
use supercrit::graph::GraphError;
use supercrit::lifting::LiftError;
use supercrit::resolution::ResolutionError;
use supercrit::tseitin::TseitinError;
use supercrit::wl::WlError;

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

/// Bad combination of arguments that clap cannot express.
#[derive(Debug)]
pub struct UsageError(pub String);

/// A checked result did not hold.
#[derive(Debug)]
pub struct ValidationError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}
impl std::error::Error for ValidationError {}

#[derive(Parser, Debug)]
#[command(name = "supercrit", version, about = "Compressed Tseitin formulas, cop-robber games, WL on CFI graphs and lifting gadgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct BudgetArgs {
    /// Clause budget of the saturation oracles.
    #[arg(long, env = "SUPERCRIT_BUDGET", default_value_t = 4_000_000)]
    pub budget: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CopKind {
    Lockstep,
    Random,
    Chaser,
    Refutation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RobberKind {
    Paper,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GadgetKind {
    Xor,
    Ind,
    Ind3,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the compressed Tseitin formula of a cylinder (DIMACS plus a `.names` table).
    GenFormula {
        #[command(flatten)]
        cyl: CylArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the column-sweep refutation of a cylinder's formula as a trace.
    Refute {
        #[command(flatten)]
        cyl: CylArgs,
        #[arg(long)]
        out: PathBuf,
        /// Also write the refuted formula.
        #[arg(long)]
        formula_out: Option<PathBuf>,
    },
    /// Check a resolution refutation and print its size, width and depth.
    CheckProof { cnf: PathBuf, trace: PathBuf },
    /// Minimum refutation width by saturation.
    OracleWidth {
        cnf: PathBuf,
        #[arg(long)]
        max_width: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Minimum refutation depth at a fixed width by saturation.
    OracleDepth {
        cnf: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        max_depth: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Play one match of the compressed cop-robber game.
    Play {
        #[command(flatten)]
        cyl: CylArgs,
        #[arg(long, value_enum, default_value_t = CopKind::Lockstep)]
        cops: CopKind,
        /// Defaults to k + 1, or width + 1 for refutation cops.
        #[arg(long)]
        num_cops: Option<usize>,
        #[arg(long, value_enum, default_value_t = RobberKind::Paper)]
        robber: RobberKind,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Refutation cops treat a broken invariant as an error.
        #[arg(long)]
        strict: bool,
        /// Write the transcript here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run k-WL on two colored graphs, by default the compressed CFI pair of a cylinder.
    WlRun {
        /// WL dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, requires = "h")]
        g: Option<PathBuf>,
        #[arg(long, requires = "g")]
        h: Option<PathBuf>,
        #[command(flatten)]
        cyl: CylArgs,
        #[arg(long, default_value_t = 1000)]
        max_rounds: usize,
    },
    /// Write the (compressed) CFI graphs of the two charge functions of a cylinder.
    CfiGen {
        #[command(flatten)]
        cyl: CylArgs,
        #[arg(long)]
        out_f: PathBuf,
        #[arg(long)]
        out_g: PathBuf,
    },
    /// Lift a formula with a gadget, optionally simulating a refutation of it.
    Lift {
        cnf: PathBuf,
        #[arg(long, value_enum)]
        gadget: GadgetKind,
        /// Gadget size: ℓ for XOR, m for indexing.
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
        /// Refutation of the source formula to simulate.
        #[arg(long, requires = "proof_out")]
        proof: Option<PathBuf>,
        #[arg(long)]
        proof_out: Option<PathBuf>,
    },
    /// Extract a decision tree for a formula from a refutation of its XOR lift.
    ExtractTree {
        /// The source formula.
        cnf: PathBuf,
        /// A refutation of its XOR lift.
        trace: PathBuf,
        #[arg(long)]
        l: usize,
        /// Largest tree the refutation may unfold to.
        #[arg(long, default_value_t = 1 << 20)]
        max_nodes: usize,
        /// Write the extracted tree as a refutation of the source formula.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a random restriction of an indexing lift and apply it.
    Restrict {
        /// The source formula.
        cnf: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// A refutation of the indexing lift to restrict.
        #[arg(long, requires = "proof_out")]
        proof: Option<PathBuf>,
        #[arg(long)]
        proof_out: Option<PathBuf>,
    },
    /// Monte Carlo tail of clause width under random restrictions.
    TailExperiment {
        #[arg(long)]
        m: usize,
        /// Blocks of the random clause.
        #[arg(long, default_value_t = 6)]
        blocks: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Literals over the lifted variables instead of a random clause, e.g. "3 -8 12".
        #[arg(long, allow_hyphen_values = true)]
        clause: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refutation, game and oracle measurements on the toy cylinders as CSV.
    TradeoffExperiment {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Clause budget of the oracles, per row and stage.
        #[arg(long, env = "SUPERCRIT_BUDGET", default_value_t = 250_000)]
        budget: usize,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.is::<ValidationError>() || cause.is::<CnfError>() {
            return EXIT_VALIDATION;
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        let resource = if let Some(e) = cause.downcast_ref::<ResolutionError>() {
            matches!(e, ResolutionError::ResourceBudgetExceeded(_))
        } else if let Some(e) = cause.downcast_ref::<LiftError>() {
            matches!(
                e,
                LiftError::ExpansionBudget { .. }
                    | LiftError::TreeTooLarge { .. }
                    | LiftError::Resolution(ResolutionError::ResourceBudgetExceeded(_))
            )
        } else if let Some(e) = cause.downcast_ref::<WlError>() {
            matches!(e, WlError::BudgetExceeded { .. })
        } else if let Some(e) = cause.downcast_ref::<GameError>() {
            matches!(e, GameError::SearchBudgetExceeded(_))
        } else if let Some(e) = cause.downcast_ref::<GraphError>() {
            matches!(e, GraphError::Overflow | GraphError::TooLarge(_))
        } else if let Some(e) = cause.downcast_ref::<TseitinError>() {
            matches!(e, TseitinError::TooManyVariables(_))
        } else {
            continue;
        };
        return if resource { EXIT_RESOURCE } else { EXIT_VALIDATION };
    }
    EXIT_IO
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let header = format!("# supercrit {} | {} |", env!("CARGO_PKG_VERSION"), argv.join(" "));
    match commands::run(cli.command, &header) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
