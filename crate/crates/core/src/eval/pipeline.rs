use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::penalty::{feature, learn_constant, learn_linear, target_interval, PenaltyModel};
use super::roc::{roc_analysis, RocCurve};
use super::{assign_folds, extract_peaks, label_errors, ErrorTotals};
use crate::data::CountSequence;
use crate::engine::{fit, fit_unlabeled};
use crate::error::{Error, Result};
use crate::labels::LabelSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PenaltyMethod {
    Bic,
    Constant,
    Linear,
}

impl PenaltyMethod {
    pub fn name(self) -> &'static str {
        match self {
            PenaltyMethod::Bic => "bic",
            PenaltyMethod::Constant => "constant",
            PenaltyMethod::Linear => "linear",
        }
    }
}

impl fmt::Display for PenaltyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PenaltyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bic" => Ok(PenaltyMethod::Bic),
            "constant" => Ok(PenaltyMethod::Constant),
            "linear" => Ok(PenaltyMethod::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown penalty method {other:?}"
            ))),
        }
    }
}

/// Segmentation model used for test predictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Fit with the training labels as constraints.
    Flopart,
    /// Fit without labels.
    Gfpop,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Flopart => "flopart",
            Algorithm::Gfpop => "gfpop",
        }
    }
}

/// A sequence with its labels split into train and test folds.
#[derive(Clone, Debug)]
pub struct SplitSequence {
    pub data: CountSequence,
    pub train: LabelSet,
    pub test: LabelSet,
}

impl SplitSequence {
    /// Seeded random two-fold split of `labels`; fold `test_fold` (0 or 1)
    /// is held out. `None` when either side ends up without labels.
    pub fn split(
        data: CountSequence,
        labels: &LabelSet,
        seed: u64,
        test_fold: usize,
    ) -> Option<Self> {
        let folds = assign_folds(labels.len(), 2, seed);
        let train = labels.select(|j| folds[j] != test_fold);
        let test = labels.select(|j| folds[j] == test_fold);
        if train.is_empty() || test.is_empty() {
            return None;
        }
        Some(SplitSequence { data, train, test })
    }
}

/// Errors on `labels` of peaks predicted by `algorithm` at `lambda`.
pub fn score_fit(
    data: &CountSequence,
    constraints: &LabelSet,
    scored: &LabelSet,
    algorithm: Algorithm,
    lambda: f64,
) -> Result<ErrorTotals> {
    let result = match algorithm {
        Algorithm::Flopart => fit(data, constraints, lambda)?,
        Algorithm::Gfpop => fit_unlabeled(data, lambda)?,
    };
    Ok(label_errors(&extract_peaks(&result.states), scored).totals)
}

/// Label errors of unlabeled fits at each penalty. Labeled fits have no
/// train errors, so penalty learning uses these curves.
pub fn grid_errors(
    data: &CountSequence,
    labels: &LabelSet,
    penalties: &[f64],
) -> Result<Vec<usize>> {
    penalties
        .iter()
        .map(|&lambda| Ok(score_fit(data, labels, labels, Algorithm::Gfpop, lambda)?.errors))
        .collect()
}

/// Learns a penalty model from the training folds.
pub fn train_penalty(
    method: PenaltyMethod,
    seqs: &[SplitSequence],
    penalties: &[f64],
) -> Result<PenaltyModel> {
    if method == PenaltyMethod::Bic {
        return Ok(PenaltyModel::Bic);
    }
    let log_grid: Vec<f64> = penalties.iter().map(|p| p.ln()).collect();
    let errors: Vec<Vec<usize>> = seqs
        .par_iter()
        .map(|s| grid_errors(&s.data, &s.train, penalties))
        .collect::<Result<_>>()?;
    match method {
        PenaltyMethod::Constant => learn_constant(&log_grid, &errors),
        _ => {
            let features = seqs
                .iter()
                .map(|s| feature(s.data.total_weight()))
                .collect::<Result<Vec<_>>>()?;
            let intervals = errors
                .iter()
                .map(|e| target_interval(&log_grid, e))
                .collect::<Result<Vec<_>>>()?;
            learn_linear(&features, &intervals)
        }
    }
}

/// Offsets from -12 to 12 in steps of 0.5.
pub fn default_constants() -> Vec<f64> {
    (-24..=24).map(|k| k as f64 * 0.5).collect()
}

/// Trains `method` on the train folds, then traces the ROC curve of
/// `algorithm` on the test folds as the offset varies.
pub fn cross_validated_roc(
    seqs: &[SplitSequence],
    method: PenaltyMethod,
    algorithm: Algorithm,
    penalties: &[f64],
    constants: &[f64],
) -> Result<(PenaltyModel, RocCurve)> {
    if seqs.is_empty() {
        return Err(Error::EmptyInput(
            "no sequence has both train and test labels".into(),
        ));
    }
    let model = train_penalty(method, seqs, penalties)?;
    let predicted = seqs
        .iter()
        .map(|s| model.predict(s.data.total_weight()))
        .collect::<Result<Vec<_>>>()?;
    let curve = roc_analysis(&predicted, constants, |i, lambda| {
        let s = &seqs[i];
        score_fit(&s.data, &s.train, &s.test, algorithm, lambda)
    })?;
    Ok((model, curve))
}
