use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const DISCLAIMER: &str = "\
SECURITY IS CONDITIONAL. Ciphertexts hide the plaintext only if it has at \
least t bits of min-entropy from the adversary's point of view. The tool \
cannot measure this: --t is your claim, and a wrong claim voids the \
guarantee. Each key must encrypt a single message. There is no integrity \
protection; a wrong key or a tampered ciphertext decrypts to garbage \
without an error.";

#[derive(Debug, Parser)]
#[command(
    name = "entroseal",
    version,
    about = "Entropically secure one-time-pad encryption with short keys",
    long_about = format!(
        "Entropically secure one-time-pad encryption with short keys.\n\n{DISCLAIMER}\n\n\
         Exit codes: 0 success, 1 failed check or internal error, 2 invalid \
         parameters or usage, 3 key too short, 4 malformed ciphertext, 5 I/O error."
    )
)]
pub struct Cli {
    /// Output format for reports and parameters.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Schoolbook,
    Karatsuba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Classical,
    Quantum,
    Gf2,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Affine,
    FullmulDs,
    FullmulAs,
}

/// Security parameters shared by every command that derives a key length.
#[derive(Debug, Clone, Args)]
pub struct Security {
    /// Assumed min-entropy lower bound t in bits. Accepts a number or a
    /// fraction of n such as `0.5n`. There is deliberately no default.
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,

    /// Security level epsilon, e.g. `2^-40` or `1e-12`.
    #[arg(long)]
    pub epsilon: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the key length and field parameters for (n, t, epsilon).
    #[command(after_long_help = DISCLAIMER)]
    Params {
        /// Message length in bits (qubits in quantum mode).
        #[arg(long)]
        n_bits: usize,
        #[command(flatten)]
        security: Security,
        #[arg(long, value_enum, default_value_t = ModeArg::Classical)]
        mode: ModeArg,
    },

    /// Write a uniformly random key of the derived length.
    #[command(after_long_help = DISCLAIMER)]
    Keygen {
        #[arg(long)]
        n_bits: usize,
        #[command(flatten)]
        security: Security,
        #[arg(long, value_enum, default_value_t = ModeArg::Classical)]
        mode: ModeArg,
        /// Seed for a reproducible key (testing only).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },

    /// Encrypt a file. n defaults to 8 times the file size.
    #[command(after_long_help = DISCLAIMER)]
    Encrypt {
        #[arg(long = "in")]
        input: PathBuf,
        /// Raw key bits; the first ell bits are used.
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        security: Security,
        /// Pad the message with zero bits up to this length.
        #[arg(long)]
        n_bits: Option<usize>,
        /// Seed for the public randomness (u, v). Testing only.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = BackendArg::Karatsuba)]
        backend: BackendArg,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Decrypt a ciphertext produced by `encrypt`.
    Decrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the exhaustive verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Enumeration budget (decimal or `2^k`); overrides ENTROSEAL_BUDGET.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Compare key-expansion cost of the affine method and full multiplication.
    Bench {
        /// Pad lengths in bits (2n in quantum mode, n in classical mode).
        #[arg(long, value_delimiter = ',', default_values_t = [128usize, 512, 2048])]
        sizes: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',')]
        methods: Vec<MethodArg>,
        #[arg(long = "backend", value_enum, value_delimiter = ',', default_values_t = [BackendArg::Schoolbook, BackendArg::Karatsuba])]
        backends: Vec<BackendArg>,
        /// Quantum mode uses t = 0 and epsilon = 2^-5; classical mode needs
        /// --t and --epsilon.
        #[arg(long, value_enum, default_value_t = ModeArg::Quantum)]
        mode: ModeArg,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Timed repetitions per record (at least 31).
        #[arg(long, default_value_t = 31)]
        reps: usize,
        /// Report gate counts only.
        #[arg(long)]
        count_only: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the text table here and its JSON twin to `<path>.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}
