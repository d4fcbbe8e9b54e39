//! `vlwe` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "vlwe", version, about = "Vector homomorphic encryption over variety rings")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Parameter file (`key = value` lines).
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// RNG seed, decimal or 0x-prefixed hex; OS randomness when absent.
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Human,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate secret, public and relinearization keys into a directory.
    Keygen {
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a vector of plaintext values, one per coordinate.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        /// Comma-separated values below t.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        vector: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext and print the constant term of each coordinate.
    Decrypt {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Homomorphic sum of two ciphertexts.
    Add {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Coordinate-wise product of two ciphertexts (needs relinearization afterwards).
    Mul {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Relinearize the output of `mul`.
    Relin {
        #[arg(long)]
        rlk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rescale a ciphertext down the modulus chain.
    Modswitch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tracked and measured noise of a ciphertext.
    Noise {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Monte-Carlo noise simulation against the analytic model.
    NoiseSim {
        /// Circuits such as `add:1` or `mul:1`, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "add:1")]
        ops: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Attack cost estimates in log2 operations.
    Estimate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Attack name, `grobner` for both Gröbner formulas, or `all`.
        #[arg(long, default_value = "all")]
        attack: String,
        /// Overrides such as `C=1.5,omega=2.37`.
        #[arg(long)]
        constants: Option<String>,
    },
    /// Recommend parameters for a security level and write them as a params file.
    Recommend {
        #[arg(long, default_value_t = 128)]
        bits: u32,
        #[arg(long)]
        quantum: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time vector-ring products against single-ring products.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 256)]
        d: usize,
        #[arg(long, default_value_t = 25)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive key recovery and distinguishing on a toy instance.
    AttackToy {
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("see `vlwe --help`");
            ExitCode::from(2)
        }
        Err(commands::Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
