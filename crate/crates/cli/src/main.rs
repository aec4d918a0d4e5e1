//! `fkdet`: determinants, Mahler measures and finite-group entropy from the
//! command line. Tables go to standard output, diagnostics to standard error.
//!
//! Exit codes: 0 success, 2 invalid input or failed precondition, 3 when
//! invertibility cannot be certified, 1 when the output cannot be written.

mod commands;
mod input;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use table::Format;

#[derive(Parser, Debug)]
#[command(name = "fkdet", version, about = "Fuglede-Kadison determinants and entropy of algebraic actions")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

/// The group-ring element to work with.
#[derive(Args, Debug, Clone)]
pub struct ElementArgs {
    /// `.gre` file, or inline lines separated by `;`.
    #[arg(long = "f")]
    pub f: String,
    /// Group descriptor (`Z^d`, `H3`, `Zmod:m1xm2`, `F2`); required for inline
    /// elements without a `group` line, checked against files.
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MahlerMethod {
    Roots,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DetMethod {
    Sections,
    Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertMethod {
    Auto,
    TorusMin,
    L1Neumann,
    PositiveGap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Separated,
    Spanning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TilingMode {
    Pairwise,
    Epsilon,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mahler measure of a Laurent polynomial over `Z^d`.
    Mahler {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, value_enum, default_value = "roots")]
        method: MahlerMethod,
        /// Grid points per torus coordinate.
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// `log det f` by finite sections or by a polynomial trace.
    Fkdet {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, value_enum, default_value = "sections")]
        method: DetMethod,
        /// Window levels, `10,100,1000` or `4..6` (sections).
        #[arg(long, default_value = "10,100,1000")]
        schedule: String,
        /// Polynomial degree (poly).
        #[arg(long, default_value_t = fkdet::DEFAULT_DEGREE)]
        degree: usize,
        /// Spectral interval `a,b` for `f*f` (poly); derived from a
        /// certificate when omitted.
        #[arg(long)]
        interval: Option<String>,
        #[command(flatten)]
        evidence: EvidenceArgs,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        /// CSV file of integer rows.
        #[arg(long)]
        matrix: String,
    },
    /// `(1/|Γ|) log |X_f|` over a finite group, with its cross-checks.
    EntropyFinite {
        #[command(flatten)]
        element: ElementArgs,
        /// Print the solutions of `X_f` instead (up to this many).
        #[arg(long)]
        solutions: Option<usize>,
    },
    /// Maximal separated or minimal spanning sets of `X_f`.
    Separated {
        #[command(flatten)]
        element: ElementArgs,
        /// Defaults to `1/(8‖f‖₁)`.
        #[arg(long)]
        eps: Option<f64>,
        /// `1`, `2` or `inf`.
        #[arg(long, default_value = "inf")]
        p: String,
        #[arg(long, value_enum, default_value = "separated")]
        mode: Mode,
    },
    /// Greedy quasitiling of a box window.
    Quasitile {
        #[arg(long)]
        group: String,
        /// `lo..hi` or `lo1,lo2..hi1,hi2`.
        #[arg(long)]
        window: String,
        /// Tile boxes separated by `;`.
        #[arg(long)]
        tiles: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value = "pairwise")]
        mode: TilingMode,
    },
    /// Finite sections with a random fraction of columns replaced.
    Perturb {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, default_value = "10,100,1000")]
        schedule: String,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        evidence: EvidenceArgs,
    },
    /// `‖f^k‖₁` for `k = 0..=K`; defaults to `(e + a − a²)b` over `F2`.
    L1growth {
        #[arg(long, default_value_t = 6)]
        k: u32,
        #[arg(long = "f")]
        f: Option<String>,
        #[arg(long)]
        group: Option<String>,
    },
    /// Certifies invertibility of `f` in the group von Neumann algebra.
    Certify {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: CertMethod,
        /// Grid size for torus-min.
        #[arg(long, default_value_t = fkdet::CertificateMethod::DEFAULT_GRID)]
        grid: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct EvidenceArgs {
    /// Certificate used to justify the determinant.
    #[arg(long, value_enum, default_value = "auto")]
    pub certify: CertMethod,
    /// Skip certification and vouch for invertibility.
    #[arg(long)]
    pub assume_invertible: bool,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<fkdet::Error>() {
        Some(fkdet::Error::NotCertifiable(_)) => 3,
        Some(_) => 2,
        None if err.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
