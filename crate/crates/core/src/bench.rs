//! Runtime scaling measurements on synthetic data.

use std::time::Instant;

use crate::engine::fit;
use crate::error::Result;
use crate::labels::LabelSet;
use crate::synth::{generate_synthetic, SynthParams};

/// Penalty used for timing runs.
pub const BENCH_PENALTY: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub algorithm: String,
    pub seconds: f64,
    pub pieces_max: usize,
}

/// Planted peaks used for a bench sequence of length `n`.
pub fn bench_peaks(n: usize) -> usize {
    (n / 500).max(1)
}

/// Times the labeled and unlabeled fits for each size. One warm-up run is
/// discarded, then the median of `reps` runs is kept.
pub fn run(sizes: &[usize], reps: usize, seed: u64) -> Result<Vec<BenchRecord>> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    let reps = reps.max(1);
    let mut out = Vec::with_capacity(2 * sizes.len());
    for &n in &sizes {
        let synth = generate_synthetic(&SynthParams::new(n, bench_peaks(n), seed))?;
        let empty = LabelSet::empty(n);
        for (algorithm, labels) in [("flopart", &synth.labels), ("gfpop", &empty)] {
            let mut times = Vec::with_capacity(reps);
            let mut pieces_max = 0;
            for rep in 0..=reps {
                let t = Instant::now();
                let r = fit(&synth.data, labels, BENCH_PENALTY)?;
                let dt = t.elapsed().as_secs_f64();
                pieces_max = pieces_max.max(r.max_pieces);
                if rep > 0 {
                    times.push(dt);
                }
            }
            out.push(BenchRecord {
                n,
                algorithm: algorithm.to_string(),
                seconds: median(&mut times),
                pieces_max,
            });
        }
    }
    Ok(out)
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Least-squares slope of `ln seconds` against `ln n` for one algorithm.
pub fn loglog_slope(records: &[BenchRecord], algorithm: &str) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.algorithm == algorithm && r.seconds > 0.0)
        .map(|r| ((r.n as f64).ln(), r.seconds.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn to_tsv(records: &[BenchRecord]) -> String {
    let mut s = String::from("n\talgorithm\tseconds\tpieces_max\n");
    for r in records {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.n, r.algorithm, r.seconds, r.pieces_max
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_cardinality() {
        let r = run(&[1000, 100, 300], 1, 1).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!(r[0].n, 100);
        assert!(r.iter().all(|r| r.seconds >= 0.0));
    }

    #[test]
    fn slope_of_exact_power_law() {
        let recs: Vec<BenchRecord> = [10usize, 100, 1000]
            .iter()
            .map(|&n| BenchRecord {
                n,
                algorithm: "x".into(),
                seconds: 1e-6 * (n as f64).powf(1.5),
                pieces_max: 1,
            })
            .collect();
        assert!((loglog_slope(&recs, "x").unwrap() - 1.5).abs() < 1e-9);
        assert!(loglog_slope(&recs, "y").is_none());
    }
}
