use crate::error::{Error, Result};

pub const HINGE_MARGIN: f64 = 1.0;
pub const LINEAR_STEP: f64 = 0.02;
pub const LINEAR_MAX_ITER: usize = 2000;
pub const LINEAR_TOL: f64 = 1e-9;

/// A rule predicting `ln lambda` for a sequence from its total weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PenaltyModel {
    /// `lambda = ln N`.
    Bic,
    Constant {
        log_lambda: f64,
    },
    /// `ln lambda = w * ln ln N + b`.
    Linear {
        w: f64,
        b: f64,
    },
}

impl PenaltyModel {
    /// Predicted log-penalty for a sequence of total weight `n`.
    pub fn predict(&self, n: f64) -> Result<f64> {
        match *self {
            PenaltyModel::Bic => bic_penalty(n),
            PenaltyModel::Constant { log_lambda } => Ok(log_lambda),
            PenaltyModel::Linear { w, b } => Ok(w * feature(n)? + b),
        }
    }
}

/// The single feature `ln ln N`.
pub fn feature(n: f64) -> Result<f64> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total weight {n} must be at least 2"
        )));
    }
    Ok(n.ln().ln())
}

/// BIC log-penalty `ln ln N`, i.e. `lambda = ln N`.
pub fn bic_penalty(n: f64) -> Result<f64> {
    feature(n)
}

/// `count` penalties evenly spaced on the log scale from `lo` to `hi`.
pub fn penalty_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bad penalty range {lo}:{hi}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect())
}

/// 23 penalties from 1e-5 to 1e6, half a decade apart.
pub fn default_grid() -> Vec<f64> {
    penalty_grid(1e-5, 1e6, 23).expect("static grid")
}

/// Parses `LO:HI:COUNTlog`, e.g. `1e-5:1e6:23log`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("penalty grid {text:?} is not LO:HI:COUNTlog"));
    let mut parts = text.split(':');
    let (lo, hi, count) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), Some(c), None) => (a, b, c),
        _ => return Err(bad()),
    };
    let count = count.strip_suffix("log").ok_or_else(bad)?;
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    penalty_grid(lo, hi, count)
}

/// Grid log-penalty with the fewest total errors summed over sequences;
/// ties go to the larger penalty. `errors[i][k]` is the error count of
/// sequence `i` at `log_grid[k]`.
pub fn learn_constant(log_grid: &[f64], errors: &[Vec<usize>]) -> Result<PenaltyModel> {
    if log_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let totals: Vec<usize> = (0..log_grid.len())
        .map(|k| errors.iter().map(|e| e[k]).sum())
        .collect();
    let mut best = 0;
    for k in 1..log_grid.len() {
        let better =
            totals[k] < totals[best] || (totals[k] == totals[best] && log_grid[k] > log_grid[best]);
        if better {
            best = k;
        }
    }
    Ok(PenaltyModel::Constant {
        log_lambda: log_grid[best],
    })
}

/// Largest run of consecutive grid points with minimal error, as a
/// log-penalty interval. Runs touching the end of the grid are open there.
pub fn target_interval(log_grid: &[f64], errors: &[usize]) -> Result<(f64, f64)> {
    let min = *errors.iter().min().ok_or(Error::EmptyGrid)?;
    let (mut best, mut k) = ((0, 0), 0);
    let mut best_len = 0;
    while k < errors.len() {
        if errors[k] == min {
            let start = k;
            while k + 1 < errors.len() && errors[k + 1] == min {
                k += 1;
            }
            if k - start + 1 > best_len {
                best_len = k - start + 1;
                best = (start, k);
            }
        }
        k += 1;
    }
    let lo = if best.0 == 0 {
        f64::NEG_INFINITY
    } else {
        log_grid[best.0]
    };
    let hi = if best.1 + 1 == errors.len() {
        f64::INFINITY
    } else {
        log_grid[best.1]
    };
    Ok((lo, hi))
}

/// Mean squared hinge loss of predictions against target intervals.
pub fn squared_hinge_loss(predictions: &[f64], intervals: &[(f64, f64)]) -> f64 {
    let total: f64 = predictions
        .iter()
        .zip(intervals)
        .map(|(&f, &(lo, hi))| {
            let below = if lo.is_finite() {
                (lo - f + HINGE_MARGIN).max(0.0)
            } else {
                0.0
            };
            let above = if hi.is_finite() {
                (f - hi + HINGE_MARGIN).max(0.0)
            } else {
                0.0
            };
            below * below + above * above
        })
        .sum();
    total / predictions.len().max(1) as f64
}

/// Fits `ln lambda = w x + b` to target intervals by gradient descent on
/// the squared hinge loss. Features are standardized for the descent and
/// the coefficients mapped back.
pub fn learn_linear(features: &[f64], intervals: &[(f64, f64)]) -> Result<PenaltyModel> {
    if features.len() != intervals.len() {
        return Err(Error::InvalidArgument(format!(
            "{} features but {} intervals",
            features.len(),
            intervals.len()
        )));
    }
    if !intervals
        .iter()
        .any(|(lo, hi)| lo.is_finite() || hi.is_finite())
    {
        return Err(Error::Unconstrained);
    }
    let m = features.len() as f64;
    let mean = features.iter().sum::<f64>() / m;
    let sd = (features.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m).sqrt();
    let sd = if sd > 1e-12 { sd } else { 1.0 };
    let xs: Vec<f64> = features.iter().map(|x| (x - mean) / sd).collect();

    let predict = |w: f64, b: f64| xs.iter().map(|x| w * x + b).collect::<Vec<_>>();
    let (mut w, mut b) = (0.0, 0.0);
    let mut loss = squared_hinge_loss(&predict(w, b), intervals);
    for _ in 0..LINEAR_MAX_ITER {
        let (mut gw, mut gb) = (0.0, 0.0);
        for (x, &(lo, hi)) in xs.iter().zip(intervals) {
            let f = w * x + b;
            let mut g = 0.0;
            if lo.is_finite() {
                g -= 2.0 * (lo - f + HINGE_MARGIN).max(0.0);
            }
            if hi.is_finite() {
                g += 2.0 * (f - hi + HINGE_MARGIN).max(0.0);
            }
            gw += g * x;
            gb += g;
        }
        let (nw, nb) = (w - LINEAR_STEP * gw / m, b - LINEAR_STEP * gb / m);
        let next = squared_hinge_loss(&predict(nw, nb), intervals);
        let improvement = loss - next;
        if improvement < 0.0 {
            break;
        }
        (w, b, loss) = (nw, nb, next);
        if improvement < LINEAR_TOL {
            break;
        }
    }
    Ok(PenaltyModel::Linear {
        w: w / sd,
        b: b - w * mean / sd,
    })
}
