use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use onebit::cli::{self, RunReport, ScanArgs};
use onebit::highdim::Strategy;
use onebit::transforms::MapFamily;

const EXIT_NOT_POSITIVE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "onebit", version, about = "Information-theoretic qubit reconstruction toolkit")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Proper,
    Improper,
    Identity,
}

impl From<Family> for MapFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Proper => MapFamily::Proper,
            Family::Improper => MapFamily::Improper,
            Family::Identity => MapFamily::Identity,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    FixedBasis,
    Sampled,
    EigenDirected,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::FixedBasis => Strategy::FixedBasis,
            StrategyArg::Sampled => Strategy::Sampled,
            StrategyArg::EigenDirected => Strategy::EigenDirected,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normalized degree-alpha entropy of a distribution.
    Entropy {
        /// Comma-separated probabilities.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        dist: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
    /// Worst-case total-uncertainty change under random frame changes.
    InvarianceScan {
        #[arg(long, default_value_t = 0.5)]
        alpha_min: f64,
        #[arg(long, default_value_t = 4.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 8)]
        alpha_steps: usize,
        /// Explicit comma-separated alpha list; overrides the grid.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1000)]
        n_states: usize,
        #[arg(long, default_value_t = 200)]
        n_maps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "proper")]
        family: Family,
        /// Per-alpha CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Information-based positivity test of a Hermitian matrix.
    Positivity {
        /// JSON file `{"n", "re", "im"}`.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "eigen-directed")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 16)]
        n_bases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Degree-of-freedom counting table and consistent (m, r) pairs.
    Counting {
        #[arg(long, default_value_t = 50)]
        n_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9")]
        m: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        r_max: u32,
    },
    /// Random-restart search for maps preserving the alpha-norm.
    SearchPreservers {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Cosine-law table over [0, 2pi].
    Malus {
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<onebit::Error> for Failure {
    fn from(e: onebit::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(RunReport, u8), Failure> {
    let mut code = 0;
    let report = match cli.command {
        Command::Entropy { dist, alpha } => {
            let r = cli::cmd_entropy(&dist, alpha)?;
            eprintln!("H_{alpha} = {}", r.results["entropy"]);
            r
        }
        Command::InvarianceScan { alpha_min, alpha_max, alpha_steps, alphas, n_states, n_maps, seed, family, csv } => {
            let alphas = match alphas {
                Some(a) => a,
                None => cli::alpha_grid(alpha_min, alpha_max, alpha_steps)?,
            };
            let args = ScanArgs { alphas, n_states, n_maps, seed, family: family.into() };
            let (r, table) = cli::cmd_invariance_scan(&args)?;
            if let Some(path) = csv {
                write_file(&path, &table)?;
            }
            for row in r.results["rows"].as_array().into_iter().flatten() {
                eprintln!("alpha={} max_deviation={}", row["alpha"], row["max_deviation"]);
            }
            r
        }
        Command::Positivity { matrix, strategy, n_bases, seed, tol } => {
            let text = fs::read_to_string(&matrix)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", matrix.display())))?;
            let rho = cli::parse_matrix(&text)?;
            let (r, positive) = cli::cmd_positivity(&rho, strategy.into(), n_bases, seed, tol)?;
            eprintln!("positive: {positive} (oracle: {})", r.results["oracle"]["positive"]);
            if !positive {
                code = EXIT_NOT_POSITIVE;
            }
            r
        }
        Command::Counting { n_max, m, r_max } => {
            let r = cli::cmd_counting(n_max, &m, r_max)?;
            eprintln!("consistent (m, r): {}", r.results["consistent"]);
            r
        }
        Command::SearchPreservers { alpha, budget, seed, tol } => {
            let r = cli::cmd_search_preservers(alpha, budget, seed, tol)?;
            eprintln!(
                "{} candidates, all permutation-like: {}",
                r.results["candidates"].as_array().map_or(0, Vec::len),
                r.results["all_candidates_permutation_like"]
            );
            r
        }
        Command::Malus { steps, csv } => {
            let (r, table) = cli::cmd_malus(steps)?;
            if let Some(path) = csv {
                write_file(&path, &table)?;
            }
            eprintln!("max |difference| = {}", r.results["max_abs_diff"]);
            r
        }
    };
    Ok((report, code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = run(cli).and_then(|(report, code)| {
        let json = report.to_json();
        match &out {
            Some(path) => write_file(path, &(json + "\n"))?,
            None => println!("{json}"),
        }
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
