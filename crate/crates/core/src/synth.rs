//! Seeded synthetic data: planted-peak count sequences with matching labels,
//! and small random instances for oracle checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::cost::{CostFunction, PoissonPiece};
use crate::data::CountSequence;
use crate::error::{Error, Result};
use crate::labels::{Label, LabelKind, LabelSet};

/// Smallest slot (points per planted peak) that leaves room for labels.
pub const MIN_SLOT: usize = 20;

#[derive(Clone, Debug)]
pub struct SyntheticSequence {
    pub data: CountSequence,
    pub labels: LabelSet,
    /// Planted peaks, 1-based inclusive.
    pub peaks: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthParams {
    pub n: usize,
    pub peaks: usize,
    pub background_mean: f64,
    pub peak_mean: f64,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(n: usize, peaks: usize, seed: u64) -> Self {
        SynthParams {
            n,
            peaks,
            background_mean: 1.0,
            peak_mean: 10.0,
            seed,
        }
    }
}

/// Poisson counts with evenly spaced planted peaks. Each peak gets one
/// peakStart label around its first point, one peakEnd label around its
/// last point, and a noPeaks label in the background before it.
pub fn generate_synthetic(p: &SynthParams) -> Result<SyntheticSequence> {
    if !(p.background_mean > 0.0 && p.peak_mean > p.background_mean) {
        return Err(Error::InvalidArgument(format!(
            "need peak mean {} > background mean {} > 0",
            p.peak_mean, p.background_mean
        )));
    }
    let n = p.n;
    let mut planted = Vec::with_capacity(p.peaks);
    let mut labels = Vec::new();
    if let Some(slot) = n.checked_div(p.peaks) {
        if slot < MIN_SLOT {
            return Err(Error::PeaksDoNotFit { peaks: p.peaks, n });
        }
        let margin = (slot / 12).max(2);
        for j in 0..p.peaks {
            let s0 = j * slot;
            let start = s0 + slot / 3 + 1;
            let end = s0 + 2 * slot / 3;
            planted.push((start, end));
            let bg_hi = start - margin - 2;
            if bg_hi > s0 + 2 {
                labels.push(Label::new(s0 + 2, bg_hi, LabelKind::NoPeaks));
            }
            labels.push(Label::new(
                start - margin,
                start + margin - 1,
                LabelKind::PeakStart,
            ));
            labels.push(Label::new(
                end - margin + 1,
                end + margin,
                LabelKind::PeakEnd,
            ));
        }
        let tail_lo = planted[p.peaks - 1].1 + margin + 2;
        if n > tail_lo {
            labels.push(Label::new(tail_lo, n, LabelKind::NoPeaks));
        }
    } else {
        if n < 4 {
            return Err(Error::PeaksDoNotFit { peaks: 0, n });
        }
        labels.push(Label::new(n / 4 + 1, n - n / 4, LabelKind::NoPeaks));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let bg = Poisson::new(p.background_mean).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let pk = Poisson::new(p.peak_mean).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut values = Vec::with_capacity(n);
    let mut next_peak = planted.iter().peekable();
    for i in 1..=n {
        while next_peak.peek().is_some_and(|&&(_, e)| e < i) {
            next_peak.next();
        }
        let in_peak = next_peak.peek().is_some_and(|&&(s, _)| s <= i);
        let z: f64 = if in_peak {
            pk.sample(&mut rng)
        } else {
            bg.sample(&mut rng)
        };
        values.push(z);
    }
    Ok(SyntheticSequence {
        data: CountSequence::from_counts(values)?,
        labels: LabelSet::validate(labels, n)?,
        peaks: planted,
    })
}

/// Random valid label set; about one in five is empty.
pub fn random_labels<R: Rng>(n: usize, rng: &mut R) -> LabelSet {
    let mut labels = Vec::new();
    if n >= 2 && rng.gen_bool(0.8) {
        let mut pos = 1;
        loop {
            let lo = pos + rng.gen_range(0..=2);
            let hi = lo + rng.gen_range(1..=3);
            if hi > n {
                break;
            }
            let kind = match rng.gen_range(0..3) {
                0 => LabelKind::NoPeaks,
                1 => LabelKind::PeakStart,
                _ => LabelKind::PeakEnd,
            };
            labels.push(Label::new(lo, hi, kind));
            pos = hi + 1;
        }
    }
    LabelSet::validate(labels, n).expect("generated labels are valid")
}

/// Unit-weight Poisson counts.
pub fn random_counts<R: Rng>(n: usize, mean: f64, rng: &mut R) -> CountSequence {
    let dist = Poisson::new(mean).expect("positive mean");
    let values = (0..n).map(|_| dist.sample(rng)).collect();
    CountSequence::from_counts(values).expect("counts are valid")
}

/// Random continuous piecewise function with one to six convex pieces on
/// `[mu_min, mu_max]`.
pub fn random_cost_function<R: Rng>(mu_min: f64, mu_max: f64, rng: &mut R) -> CostFunction {
    let k = rng.gen_range(1..=6);
    let mut cuts: Vec<f64> = (1..k).map(|_| rng.gen_range(mu_min..mu_max)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut bounds = vec![mu_min];
    bounds.extend(cuts.into_iter().filter(|&c| c > mu_min));
    bounds.push(mu_max);
    let mut pieces: Vec<PoissonPiece> = Vec::with_capacity(bounds.len() - 1);
    for w in bounds.windows(2) {
        let a = rng.gen_range(-2.0..4.0);
        let b = if rng.gen_bool(0.2) {
            0.0
        } else {
            rng.gen_range(-6.0..0.0)
        };
        let c = match pieces.last() {
            Some(prev) => prev.eval(w[0]) - a * w[0] - b * w[0].ln(),
            // With b < 0 the function is infinite at zero.
            None if w[0] == 0.0 => rng.gen_range(-5.0..5.0),
            None => rng.gen_range(-5.0..5.0) - a * w[0] - b * w[0].ln(),
        };
        pieces.push(PoissonPiece::new(a, b, c, w[0], w[1]));
    }
    CostFunction::from_pieces(pieces).expect("pieces tile the domain continuously")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_under_seed() {
        let p = SynthParams::new(100, 2, 7);
        let a = generate_synthetic(&p).unwrap();
        let b = generate_synthetic(&p).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.labels, b.labels);
        let c = generate_synthetic(&SynthParams::new(100, 2, 8)).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn no_peaks_gives_one_background_label() {
        let s = generate_synthetic(&SynthParams::new(100, 0, 1)).unwrap();
        assert!(s.peaks.is_empty());
        assert_eq!(s.labels.len(), 1);
        assert_eq!(s.labels.labels()[0].kind, LabelKind::NoPeaks);
    }

    #[test]
    fn labels_bracket_planted_changes() {
        let s = generate_synthetic(&SynthParams::new(2000, 10, 3)).unwrap();
        assert_eq!(s.peaks.len(), 10);
        for &(start, end) in &s.peaks {
            let starts = s
                .labels
                .labels()
                .iter()
                .filter(|l| l.kind == LabelKind::PeakStart && l.lo < start && l.hi >= start);
            assert_eq!(starts.count(), 1);
            let ends = s
                .labels
                .labels()
                .iter()
                .filter(|l| l.kind == LabelKind::PeakEnd && l.lo <= end && l.hi > end);
            assert_eq!(ends.count(), 1);
        }
    }

    #[test]
    fn too_many_peaks() {
        assert!(matches!(
            generate_synthetic(&SynthParams::new(100, 10, 1)),
            Err(Error::PeaksDoNotFit { .. })
        ));
    }

    #[test]
    fn random_functions_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let f = random_cost_function(0.0, 10.0, &mut rng);
            assert_eq!(f.domain(), (0.0, 10.0));
            assert!(f.eval(10.0).unwrap().is_finite());
        }
    }

    #[test]
    fn random_labels_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=12 {
            for _ in 0..50 {
                let l = random_labels(n, &mut rng);
                assert_eq!(l.n(), n);
            }
        }
    }
}
