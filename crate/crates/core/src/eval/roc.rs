use rayon::prelude::*;

use super::ErrorTotals;
use crate::error::{Error, Result};

/// Aggregate test errors at one offset `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocRow {
    pub c: f64,
    pub fp: usize,
    pub fn_: usize,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    /// One row per offset, in the order given.
    pub rows: Vec<RocRow>,
    /// `(fpr, tpr)` sorted, with `(0, 0)` and `(1, 1)` included.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

fn sorted_with_endpoints(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.push((0.0, 0.0));
    pts.push((1.0, 1.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts
}

/// Trapezoid area under `(fpr, tpr)` points after adding the endpoints and
/// sorting.
pub fn auc(points: &[(f64, f64)]) -> f64 {
    sorted_with_endpoints(points)
        .windows(2)
        .map(|p| (p[1].0 - p[0].0) * (p[0].1 + p[1].1) / 2.0)
        .sum()
}

/// ROC curve over offsets added to per-sequence predicted log-penalties.
/// `score(i, lambda)` fits sequence `i` at `lambda` and returns its test
/// errors. Sequences run in parallel; totals are summed in sequence order.
pub fn roc_analysis<F>(predicted: &[f64], constants: &[f64], score: F) -> Result<RocCurve>
where
    F: Fn(usize, f64) -> Result<ErrorTotals> + Sync,
{
    let per_seq: Vec<Vec<ErrorTotals>> = predicted
        .par_iter()
        .enumerate()
        .map(|(i, &f)| constants.iter().map(|&c| score(i, (f + c).exp())).collect())
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(constants.len());
    for (k, &c) in constants.iter().enumerate() {
        let t = per_seq
            .iter()
            .fold(ErrorTotals::default(), |acc, s| acc + s[k]);
        if t.possible_fn == 0 {
            return Err(Error::NoPositiveLabels);
        }
        rows.push(RocRow {
            c,
            fp: t.false_positives,
            fn_: t.false_negatives,
            fpr: t.false_positives as f64 / t.possible_fp as f64,
            tpr: 1.0 - t.false_negatives as f64 / t.possible_fn as f64,
        });
    }
    let raw: Vec<(f64, f64)> = rows.iter().map(|r| (r.fpr, r.tpr)).collect();
    Ok(RocCurve {
        auc: auc(&raw),
        points: sorted_with_endpoints(&raw),
        rows,
    })
}
