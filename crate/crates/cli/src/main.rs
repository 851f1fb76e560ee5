//! `dcone`: bounds tables, state construction and induction, verification
//! reports, and chain-skeleton checks.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const STATE_SCHEMA: &str = "\
State file (JSON):
  schema_version  1
  p               prime modulus
  dims            {n, m, r, s, d}
  params          {pi, lam, rho, t}: \"symbolic\" or an integer
  f0, a0, h_poly  polynomial strings
  a               {\"i,j\": polynomial} for 1 <= i <= m, 1 <= j <= r + 1
  e               r integers
  provenance      [{op, seed?, detail?}], append-only
Polynomials use `c*x0^2*y1 + lam^-1*x1`, variables x0.., y1.., z1..,
parameters pi, lam, rho, t (only lam may carry a negative exponent).";

const GRAPH_SCHEMA: &str = "\
Skeleton file (JSON):
  modulus     0 for Z, c for Z/c
  vertices    [name, ...] in order
  edges       [[v, w], ...] with v < w (vertex indices)
  ch1         [{rank, torsion: [t1, t2, ...]}] per vertex
  ch0         one module per edge
  ch0_vertex  one module per vertex
  inter       per edge [M_v, M_w], M: CH1[end] -> CH0[edge], rows x cols
  push        optional, per edge [P_v, P_w], P: CH0[edge] -> CH0_vertex[end]";

const MAP_SCHEMA: &str = "\
Map (inline JSON or file): either a bare matrix [[2, 0], [1, 3]] over Z with
free domain and codomain, or {\"modulus\": c, \"matrix\": [...],
\"domain\": {rank, torsion}, \"codomain\": {rank, torsion}}.";

#[derive(Parser, Debug)]
#[command(name = "dcone", version, about = "Double-cone constructions, torsion-order bounds and obstruction-map checks")]
pub struct Cli {
    /// Machine-readable JSON output (requires --seed).
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Applicability of the divisibility theorem, S(n, m), and max_N tables.
    ///
    /// With --d --N --m: witness search. With --d --N only: all m in 2..=d-2
    /// forced to divide the torsion order. --table A-B prints max_N(d, m) for
    /// d in A..=B as TSV (JSON with --json). --sum N M prints S(N, M) both ways.
    Bounds(BoundsArgs),
    /// Build a state.
    #[command(subcommand, after_help = STATE_SCHEMA)]
    Construct(ConstructCmd),
    /// Apply induction steps to a state file.
    #[command(after_help = STATE_SCHEMA)]
    Induct(InductArgs),
    /// Check every condition on a state and the minors of its next family.
    #[command(after_help = STATE_SCHEMA)]
    Verify(VerifyArgs),
    /// Dual-graph operations.
    #[command(subcommand)]
    Skeleton(SkeletonCmd),
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long = "N")]
    pub big_n: Option<u64>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Characteristic, 0 or a prime.
    #[arg(long = "char", default_value_t = 0)]
    pub char_p: u64,
    /// Range of degrees `A-B` (uses --m, default 2).
    #[arg(long)]
    pub table: Option<String>,
    /// `--sum N M`
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub sum: Option<Vec<u32>>,
}

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    /// The initial state for the given dimensions.
    Base(BaseArgs),
}

#[derive(Args, Debug)]
pub struct BaseArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub p: u64,
    /// Shape of h: auto, power-sum or chain.
    #[arg(long, default_value = "auto")]
    pub h: String,
    /// Pin a parameter, e.g. `--param rho=7`.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct InductArgs {
    #[arg(long)]
    pub state: std::path::PathBuf,
    /// Column to induct on; default is the smallest j with e[j] >= 1.
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub state: std::path::PathBuf,
    #[arg(long, default_value_t = dcone::factor::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Smoothness samples on the next family (0 skips sampling).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
pub enum SkeletonCmd {
    /// r-fold subdivision of every edge.
    #[command(after_help = GRAPH_SCHEMA)]
    Subdivide {
        #[arg(long)]
        graph: std::path::PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Random trials of the telescoping identity over (Z/c)^k.
    Telescope {
        #[arg(long)]
        c: u64,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Is the cokernel of a map killed by m?
    #[command(after_help = MAP_SCHEMA)]
    Coker {
        #[arg(long)]
        map: String,
        #[arg(long)]
        m: u64,
    },
    /// Solve the subdivided Phi for m z and compare with Psi.
    #[command(after_help = GRAPH_SCHEMA)]
    Transfer {
        #[arg(long)]
        graph: std::path::PathBuf,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::run(&cli, &mut stdout) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
