mod commands;
mod payload;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Entropy gaps and saturation structure for strong subadditivity and channel bounds.
#[derive(Parser, Debug)]
#[command(name = "ssa", version)]
pub struct Cli {
    /// Saturation tolerance: bits for entropy gaps, relative singular value for rank tests.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for generators (recorded in reports).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// No summary lines on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a state or channel file.
    #[command(subcommand)]
    Gen(GenFamily),
    /// Entropy gaps of a state.
    Check {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// Recover the block structure of a saturating state.
    Decompose {
        state: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Entropy bounds of a channel acting on a state.
    Channel {
        channel: PathBuf,
        state: PathBuf,
        #[arg(long, value_enum)]
        analyze: Analyze,
    },
    /// Run the built-in consistency checks.
    Selftest,
}

#[derive(Subcommand, Debug)]
pub enum GenFamily {
    /// Hilbert-Schmidt random state.
    State {
        /// Subsystem dimensions, e.g. 2,2,2
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        dims: Vec<usize>,
        /// Subsystem labels (default A, B, C, ...)
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        /// Rank (default full)
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Random channel from a Haar isometry.
    Channel {
        #[arg(long, default_value_t = 2)]
        d_in: usize,
        #[arg(long, default_value_t = 2)]
        d_out: usize,
        #[arg(long, default_value_t = 2)]
        n_kraus: usize,
    },
    /// Dephasing channel in the computational basis.
    Dephasing {
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// GHZ state on qubits.
    Ghz {
        #[arg(long, default_value_t = 3)]
        parties: usize,
    },
    /// Planted Markov chain A - B - C.
    Markov(SpecArg),
    /// Planted state saturating the second form of SSA.
    Theorem1(SpecArg),
    /// Planted state saturating Araki-Lieb on (B, C).
    ArakiLieb {
        #[arg(long, default_value_t = 2)]
        dim_l: usize,
        #[arg(long, default_value_t = 2)]
        dim_r: usize,
        #[arg(long, default_value_t = 2)]
        dim_c: usize,
    },
    /// Planted state saturating SSA for both (A,B,C) and (B,A,C).
    BiSsa(SpecArg),
    /// Conjugate an existing state by random local unitaries.
    Scramble {
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
    },
}

#[derive(Args, Debug)]
pub struct SpecArg {
    /// Path to a JSON block spec; sampled from the seed when absent.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Which {
    Ssa1,
    Ssa2,
    ArakiLieb,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Mode {
    Markov,
    Thm1,
    ArakiLieb,
    BiSsa,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Analyze {
    Holevo,
    AverageEntropy,
    Coherent,
    Saturation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap uses 2 for usage errors, which here means "not saturated"
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
