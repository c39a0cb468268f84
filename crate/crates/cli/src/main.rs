use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "khh", version, about = "Exact Hochschild, cyclic and typical-piece homology of graded algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Sign convention: standard, transposed or corrupt-b for the bar complex;
    /// positive or negative for the twist of the line bundle.
    #[arg(long, global = true, default_value = "standard")]
    pub convention: String,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hochschild homology HH_n per weight.
    Hh(HomologyArgs),
    /// Cyclic homology HC_n per weight.
    Hc(HomologyArgs),
    /// Hodge pieces HH_n^(i) per weight.
    Hodge(HomologyArgs),
    /// Künneth check for A[t] against the tensor-product prediction.
    Kunneth {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        max_weight: u32,
        #[arg(long, default_value_t = 4)]
        j_cutoff: u32,
    },
    /// Explicit cycles on the cusp and the sign-convention search.
    Cycles {
        #[arg(long, default_value_t = 2)]
        i_max: usize,
    },
    /// Typical pieces TK_n of a resolution square.
    Tk {
        #[arg(long)]
        square: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u32,
    },
    /// Picard groups of A[s_1..s_m] from the conductor square.
    Pic {
        #[arg(long)]
        square: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        j_cutoff: usize,
        #[arg(long, default_value_t = 12)]
        max_weight: u32,
    },
    /// cdh cohomology of differential forms.
    CdhOmega {
        #[arg(long)]
        square: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u32,
    },
    /// Curve data, torsion orders of the listed points and twist thresholds.
    Curve {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Summand and cohomology tables for the cusp bundle over an elliptic curve.
    Cuspbundle {
        #[arg(long)]
        curve: PathBuf,
        /// `P` and optionally `Q` as `x,y` or `inf`, separated by `;` (default: the listed points).
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        n_min: i64,
        #[arg(long, default_value_t = 6)]
        n_max: i64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        j_cutoff: i64,
    },
    /// Jacobian verdicts against typical-piece witnesses over a corpus.
    Smoothness {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
    /// Recompute every corpus quantity and compare with (or rewrite) the golden files.
    Report {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        #[arg(long)]
        write: bool,
    },
}

#[derive(Args, Debug)]
pub struct HomologyArgs {
    #[arg(long)]
    pub algebra: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub max_weight: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.global.format));
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
