//! Label-error scoring, penalty learning and ROC analysis.

mod penalty;
mod pipeline;
mod roc;

use std::fmt;
use std::ops::{Add, AddAssign};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::labels::{LabelKind, LabelSet};
use crate::state::State;

pub use penalty::{
    bic_penalty, default_grid, feature, learn_constant, learn_linear, parse_grid, penalty_grid,
    squared_hinge_loss, target_interval, PenaltyModel, HINGE_MARGIN, LINEAR_MAX_ITER, LINEAR_STEP,
    LINEAR_TOL,
};
pub use pipeline::{
    cross_validated_roc, default_constants, grid_errors, score_fit, train_penalty, Algorithm,
    PenaltyMethod, SplitSequence,
};
pub use roc::{auc, roc_analysis, RocCurve, RocRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Correct,
    FalsePositive,
    FalseNegative,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Correct => "correct",
            Outcome::FalsePositive => "false_positive",
            Outcome::FalseNegative => "false_negative",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ErrorTotals {
    pub false_positives: usize,
    pub false_negatives: usize,
    pub errors: usize,
    /// Labels that can yield a false positive (all of them).
    pub possible_fp: usize,
    /// Labels that can yield a false negative (peakStart and peakEnd).
    pub possible_fn: usize,
}

impl Add for ErrorTotals {
    type Output = ErrorTotals;

    fn add(self, o: ErrorTotals) -> ErrorTotals {
        ErrorTotals {
            false_positives: self.false_positives + o.false_positives,
            false_negatives: self.false_negatives + o.false_negatives,
            errors: self.errors + o.errors,
            possible_fp: self.possible_fp + o.possible_fp,
            possible_fn: self.possible_fn + o.possible_fn,
        }
    }
}

impl AddAssign for ErrorTotals {
    fn add_assign(&mut self, o: ErrorTotals) {
        *self = *self + o;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelErrorReport {
    /// One outcome per label, in label order.
    pub outcomes: Vec<Outcome>,
    pub totals: ErrorTotals,
}

/// Maximal runs of the peak state as 1-based inclusive intervals.
pub fn extract_peaks(states: &[State]) -> Vec<(usize, usize)> {
    let mut peaks = Vec::new();
    let mut start = None;
    for (k, &s) in states.iter().enumerate() {
        match (s, start) {
            (State::Peak, None) => start = Some(k + 1),
            (State::Background, Some(a)) => {
                peaks.push((a, k));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        peaks.push((a, states.len()));
    }
    peaks
}

/// Scores sorted, disjoint peaks against labels. A noPeaks label is a false
/// positive when any peak overlaps it. A peakStart label counts peak starts
/// inside it: none is a false negative, one is correct, more is a false
/// positive. peakEnd labels count peak ends the same way.
pub fn label_errors(peaks: &[(usize, usize)], labels: &LabelSet) -> LabelErrorReport {
    let mut outcomes = Vec::with_capacity(labels.len());
    let mut totals = ErrorTotals::default();
    for l in labels.labels() {
        // Peaks are disjoint and sorted, so starts and ends are both sorted.
        let first = peaks.partition_point(|p| p.1 < l.lo);
        let outcome = match l.kind {
            LabelKind::NoPeaks => {
                if peaks.get(first).is_some_and(|p| p.0 <= l.hi) {
                    Outcome::FalsePositive
                } else {
                    Outcome::Correct
                }
            }
            LabelKind::PeakStart | LabelKind::PeakEnd => {
                let count = peaks[first..]
                    .iter()
                    .take_while(|p| p.0 <= l.hi)
                    .filter(|p| {
                        let at = if l.kind == LabelKind::PeakStart {
                            p.0
                        } else {
                            p.1
                        };
                        l.lo <= at && at <= l.hi
                    })
                    .count();
                match count {
                    0 => Outcome::FalseNegative,
                    1 => Outcome::Correct,
                    _ => Outcome::FalsePositive,
                }
            }
        };
        totals.possible_fp += 1;
        if l.kind != LabelKind::NoPeaks {
            totals.possible_fn += 1;
        }
        match outcome {
            Outcome::FalsePositive => totals.false_positives += 1,
            Outcome::FalseNegative => totals.false_negatives += 1,
            Outcome::Correct => {}
        }
        outcomes.push(outcome);
    }
    totals.errors = totals.false_positives + totals.false_negatives;
    LabelErrorReport { outcomes, totals }
}

/// Random fold ID in `0..folds` for each of `n_labels` labels.
pub fn assign_folds(n_labels: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_labels)
        .map(|_| rng.gen_range(0..folds.max(1)))
        .collect()
}
