use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Label-constrained peak detection in count data.
#[derive(Parser, Debug)]
#[command(name = "flopart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Coverage file: bedGraph (`chrom start end count`) or one count per line.
    #[arg(long)]
    data: PathBuf,
    /// Coverage format; guessed from the column count when omitted.
    #[arg(long, value_parser = ["bedgraph", "counts"])]
    format: Option<String>,
    /// Label columns: `chrom start end type` (genomic) or `lo hi type` (index).
    #[arg(long, value_parser = ["genomic", "index"])]
    label_mode: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit one sequence and write segments.tsv and summary.tsv.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        penalty: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label errors of labeled and unlabeled fits over a penalty grid.
    Grid {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        labels: PathBuf,
        /// `LO:HI:COUNTlog`.
        #[arg(long, default_value = "1e-5:1e6:23log")]
        penalties: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a segments file against labels.
    Evaluate {
        #[arg(long)]
        segments: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Coverage file; needed for genomic segments or labels.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_parser = ["bedgraph", "counts"])]
        format: Option<String>,
        #[arg(long, value_parser = ["genomic", "index"])]
        label_mode: Option<String>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validated ROC curve for a penalty learning method.
    Roc {
        /// TSV with header `data labels`, one sequence per row.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_parser = ["bic", "constant", "linear"])]
        method: String,
        #[arg(long, default_value = "flopart", value_parser = ["flopart", "gfpop"])]
        algorithm: String,
        /// Held-out fold, 0 or 1.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..2))]
        fold: u8,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "1e-5:1e6:23log")]
        penalties: String,
        #[arg(long, value_parser = ["genomic", "index"])]
        label_mode: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time labeled and unlabeled fits on synthetic data.
    Bench {
        /// Comma-separated sequence lengths.
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the table here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the dynamic program with exhaustive search on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,2,10")]
        lambdas: Vec<f64>,
    },
    /// Write synthetic sequences with planted peaks and matching labels.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        peaks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        sequences: usize,
        #[arg(long, default_value_t = 1.0)]
        background_mean: f64,
        #[arg(long, default_value_t = 10.0)]
        peak_mean: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_infeasible() { 2 } else { 1 })
        }
    }
}
