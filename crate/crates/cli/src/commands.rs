use std::fmt::{self, Write as _};
use std::path::Path;

use flopart::eval::{
    cross_validated_roc, extract_peaks, label_errors, parse_grid, score_fit, Algorithm,
    PenaltyMethod, PenaltyModel, SplitSequence,
};
use flopart::io::{self, CoverageFormat, LabelMode};
use flopart::oracle::oracle_solve;
use flopart::synth::{generate_synthetic, random_counts, random_labels, SynthParams};
use flopart::{bench, fit, CountSequence, Error, LabelSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Command, InputArgs};

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    /// A self-check found disagreements.
    Check(String),
}

impl Failure {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Failure::Core(e) if e.is_infeasible())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => e.fmt(f),
            Failure::Check(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Result<T> = std::result::Result<T, Failure>;

/// Caps the rayon pool at `FLOPART_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("FLOPART_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "FLOPART_THREADS={value:?} is not a positive integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(())
}

fn parse_opt<T: std::str::FromStr<Err = Error>>(s: &Option<String>) -> Result<Option<T>> {
    Ok(s.as_deref().map(str::parse).transpose()?)
}

fn load_data(input: &InputArgs) -> Result<CountSequence> {
    Ok(io::read_coverage(
        &input.data,
        parse_opt::<CoverageFormat>(&input.format)?,
    )?)
}

fn load_labels(path: &Path, mode: &Option<String>, data: &CountSequence) -> Result<LabelSet> {
    Ok(io::read_labels(
        path,
        parse_opt::<LabelMode>(mode)?,
        data.len(),
        Some(data),
    )?)
}

fn emit(out: &Option<std::path::PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_string(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit {
            input,
            labels,
            penalty,
            out,
        } => {
            let data = load_data(&input)?;
            let labels = match &labels {
                Some(path) => load_labels(path, &input.label_mode, &data)?,
                None => LabelSet::empty(data.len()),
            };
            let result = fit(&data, &labels, penalty)?;
            io::write_segments(&result, &data, &out)?;
            println!(
                "{} segments, {} peaks, penalized cost {}",
                result.segments.len(),
                result.peaks.len(),
                result.penalized_cost
            );
        }
        Command::Grid {
            input,
            labels,
            penalties,
            out,
        } => {
            let data = load_data(&input)?;
            let labels = load_labels(&labels, &input.label_mode, &data)?;
            let penalties = parse_grid(&penalties)?;
            let rows = penalties
                .par_iter()
                .map(|&lambda| {
                    [Algorithm::Flopart, Algorithm::Gfpop].map(|alg| {
                        score_fit(&data, &labels, &labels, alg, lambda).map(|t| (alg, t))
                    })
                })
                .collect::<Vec<_>>();
            let mut text = String::from("penalty\tmetric\tvalue\n");
            for (lambda, per_alg) in penalties.iter().zip(rows) {
                for scored in per_alg {
                    let (alg, t) = scored?;
                    for (metric, value) in [
                        ("fp", t.false_positives),
                        ("fn", t.false_negatives),
                        ("errors", t.errors),
                    ] {
                        writeln!(text, "{lambda}\t{}_{metric}\t{value}", alg.name()).unwrap();
                    }
                }
            }
            io::create_dir(&out)?;
            io::write_string(&out.join("grid.tsv"), &text)?;
        }
        Command::Evaluate {
            segments,
            labels,
            data,
            format,
            label_mode,
            out,
        } => {
            let data = match &data {
                Some(path) => Some(io::read_coverage(path, parse_opt(&format)?)?),
                None => None,
            };
            let states = io::read_segments(&segments, data.as_ref())?;
            let labels = io::read_labels(
                &labels,
                parse_opt(&label_mode)?,
                states.len(),
                data.as_ref(),
            )?;
            let report = label_errors(&extract_peaks(&states), &labels);
            emit(&out, &io::format_error_report(&report, &labels))?;
            let t = report.totals;
            eprintln!(
                "errors {} (fp {}, fn {})",
                t.errors, t.false_positives, t.false_negatives
            );
        }
        Command::Roc {
            manifest,
            method,
            algorithm,
            fold,
            seed,
            penalties,
            label_mode,
            out,
        } => {
            let method: PenaltyMethod = method.parse()?;
            let algorithm = match algorithm.as_str() {
                "gfpop" => Algorithm::Gfpop,
                _ => Algorithm::Flopart,
            };
            let penalties = parse_grid(&penalties)?;
            let mut seqs = Vec::new();
            let entries = io::read_manifest(&manifest)?;
            for (i, (data_path, labels_path)) in entries.iter().enumerate() {
                let data = io::read_coverage(data_path, None)?;
                let labels = load_labels(labels_path, &label_mode, &data)?;
                let split_seed = seed.wrapping_add(i as u64);
                if let Some(s) = SplitSequence::split(data, &labels, split_seed, fold as usize) {
                    seqs.push(s);
                }
            }
            let skipped = entries.len() - seqs.len();
            let constants = flopart::eval::default_constants();
            let (model, curve) =
                cross_validated_roc(&seqs, method, algorithm, &penalties, &constants)?;
            io::create_dir(&out)?;
            io::write_string(&out.join("roc.tsv"), &io::format_roc(&curve))?;
            let mut text = format!(
                "field\tvalue\nmethod\t{method}\nalgorithm\t{}\nfold\t{fold}\nsequences\t{}\nskipped\t{skipped}\n",
                algorithm.name(),
                seqs.len()
            );
            match model {
                PenaltyModel::Bic => {}
                PenaltyModel::Constant { log_lambda } => {
                    writeln!(text, "log_lambda\t{log_lambda}").unwrap()
                }
                PenaltyModel::Linear { w, b } => writeln!(text, "w\t{w}\nb\t{b}").unwrap(),
            }
            io::write_string(&out.join("model.tsv"), &text)?;
            println!("auc {}", curve.auc);
        }
        Command::Bench {
            sizes,
            reps,
            seed,
            out,
        } => {
            let records = bench::run(&sizes, reps, seed)?;
            emit(&out, &bench::to_tsv(&records))?;
            for alg in ["flopart", "gfpop"] {
                if let Some(slope) = bench::loglog_slope(&records, alg) {
                    eprintln!("{alg} log-log slope {slope:.3}");
                }
            }
        }
        Command::OracleCheck {
            trials,
            n_max,
            seed,
            lambdas,
        } => {
            oracle_check(trials, n_max, seed, &lambdas)?;
        }
        Command::Synth {
            n,
            peaks,
            seed,
            sequences,
            background_mean,
            peak_mean,
            out,
        } => {
            io::create_dir(&out)?;
            let mut manifest = String::from("data\tlabels\n");
            for k in 0..sequences {
                let params = SynthParams {
                    n,
                    peaks,
                    background_mean,
                    peak_mean,
                    seed: seed.wrapping_add(k as u64),
                };
                let s = generate_synthetic(&params)?;
                let name = format!("seq{:03}", k + 1);
                io::write_string(
                    &out.join(format!("{name}.counts")),
                    &io::format_coverage(&s.data),
                )?;
                io::write_string(
                    &out.join(format!("{name}.labels.tsv")),
                    &io::format_labels(&s.labels),
                )?;
                let mut planted = String::from("start\tend\n");
                for (a, b) in &s.peaks {
                    writeln!(planted, "{a}\t{b}").unwrap();
                }
                io::write_string(&out.join(format!("{name}.peaks.tsv")), &planted)?;
                writeln!(manifest, "{name}.counts\t{name}.labels.tsv").unwrap();
            }
            io::write_string(&out.join("manifest.tsv"), &manifest)?;
        }
    }
    Ok(())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn oracle_check(trials: usize, n_max: usize, seed: u64, lambdas: &[f64]) -> Result<()> {
    if !(1..=flopart::oracle::MAX_N).contains(&n_max) {
        return Err(Error::InvalidArgument(format!(
            "--n-max must be between 1 and {}",
            flopart::oracle::MAX_N
        ))
        .into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances: Vec<_> = (0..trials)
        .map(|_| {
            let n = rng.gen_range(1..=n_max);
            let data = random_counts(n, 3.0, &mut rng);
            let labels = random_labels(n, &mut rng);
            (data, labels)
        })
        .collect();
    let per_trial: Vec<Vec<String>> = instances
        .par_iter()
        .enumerate()
        .map(|(t, (data, labels))| -> Result<Vec<String>> {
            let mut bad = Vec::new();
            for &lambda in lambdas {
                let dp = fit(data, labels, lambda)?.penalized_cost;
                let (exact, _) = oracle_solve(data, labels, lambda)?;
                if !rel_close(dp, exact, 1e-8) {
                    bad.push(format!(
                        "trial {t} lambda {lambda}: dp {dp} oracle {exact} z={:?}",
                        data.values()
                    ));
                }
            }
            Ok(bad)
        })
        .collect::<Result<_>>()?;
    let agree = per_trial.iter().filter(|b| b.is_empty()).count();
    let failures: Vec<String> = per_trial.into_iter().flatten().collect();
    for f in &failures {
        println!("{f}");
    }
    println!("{agree}/{trials} agree");
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} trials disagree with the oracle",
            trials - agree
        )))
    }
}
