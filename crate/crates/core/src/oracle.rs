//! Exhaustive solver for tiny instances.
//!
//! Enumerates every changepoint set, both starting states, and every subset
//! of up/down inequalities held at equality. For a fixed structure the mean
//! problem is convex with linear constraints, so its optimum is the pooled
//! fit of some active set that satisfies the remaining inequalities.

use crate::cost::CostFunction;
use crate::data::CountSequence;
use crate::error::{Error, Result};
use crate::labels::{LabelKind, LabelSet};
use crate::state::State;

/// Largest sequence the oracle accepts.
pub const MAX_N: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateModel {
    /// Change positions `k`: the change sits between indices `k` and `k + 1`.
    pub boundaries: Vec<usize>,
    /// State of each segment.
    pub states: Vec<State>,
    /// Which changes are held at equality.
    pub active_set: Vec<bool>,
    /// Mean of each segment.
    pub means: Vec<f64>,
    pub feasible: bool,
    pub penalized_cost: f64,
}

impl CandidateModel {
    /// Per-point states.
    pub fn point_states(&self, n: usize) -> Vec<State> {
        expand(&self.boundaries, &self.states, n)
    }
}

fn expand<T: Copy>(boundaries: &[usize], per_segment: &[T], n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 1..=n {
        out.push(per_segment[seg]);
        if boundaries.get(seg) == Some(&i) {
            seg += 1;
        }
    }
    out
}

struct Prefix {
    w: Vec<f64>,
    wz: Vec<f64>,
}

impl Prefix {
    fn new(data: &CountSequence) -> Self {
        let mut w = vec![0.0];
        let mut wz = vec![0.0];
        for (&zi, &wi) in data.values().iter().zip(data.weights()) {
            w.push(w.last().unwrap() + wi);
            wz.push(wz.last().unwrap() + wi * zi);
        }
        Prefix { w, wz }
    }

    /// Weight and weighted sum over 1-based inclusive `[a, b]`.
    fn sums(&self, a: usize, b: usize) -> (f64, f64) {
        (self.w[b] - self.w[a - 1], self.wz[b] - self.wz[a - 1])
    }
}

/// Poisson loss of a block at its optimal mean `wz / w`.
fn block_loss(w: f64, wz: f64) -> (f64, f64) {
    if wz == 0.0 {
        return (0.0, 0.0);
    }
    let m = wz / w;
    (m, w * m - wz * m.ln())
}

/// Pooled means for segments (1-based inclusive, tiling `1..=n`) where
/// `active[k]` joins segment `k` with segment `k + 1`. Returns per-segment
/// means and the total loss.
pub fn pooled_fit(
    data: &CountSequence,
    segments: &[(usize, usize)],
    active: &[bool],
) -> (Vec<f64>, f64) {
    let prefix = Prefix::new(data);
    pooled_with(&prefix, segments, active)
}

fn pooled_with(prefix: &Prefix, segments: &[(usize, usize)], active: &[bool]) -> (Vec<f64>, f64) {
    let mut means = vec![0.0; segments.len()];
    let mut loss = 0.0;
    let mut first = 0;
    while first < segments.len() {
        let mut last = first;
        while last < active.len() && active[last] {
            last += 1;
        }
        let (w, wz) = prefix.sums(segments[first].0, segments[last].1);
        let (m, l) = block_loss(w, wz);
        means[first..=last].fill(m);
        loss += l;
        first = last + 1;
    }
    (means, loss)
}

fn satisfies_labels(states: &[State], changes_at: &[bool], labels: &LabelSet) -> bool {
    labels.labels().iter().all(|l| {
        let s = |i: usize| states[i - 1];
        let changes = (l.lo..l.hi).filter(|&k| changes_at[k]).count();
        match l.kind {
            LabelKind::NoPeaks => (l.lo..=l.hi).all(|i| s(i) == State::Background),
            LabelKind::PeakStart => {
                s(l.lo) == State::Background && s(l.hi) == State::Peak && changes == 1
            }
            LabelKind::PeakEnd => {
                s(l.lo) == State::Peak && s(l.hi) == State::Background && changes == 1
            }
        }
    })
}

/// Optimal penalized cost by exhaustive enumeration.
pub fn oracle_solve(
    data: &CountSequence,
    labels: &LabelSet,
    lambda: f64,
) -> Result<(f64, CandidateModel)> {
    let n = data.len();
    if n > MAX_N {
        return Err(Error::InstanceTooLarge { n, max: MAX_N });
    }
    let prefix = Prefix::new(data);
    let mut best: Option<CandidateModel> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let boundaries: Vec<usize> = (1..n).filter(|k| mask & (1 << (k - 1)) != 0).collect();
        let mut changes_at = vec![false; n + 1];
        for &k in &boundaries {
            changes_at[k] = true;
        }
        let mut segments = Vec::with_capacity(boundaries.len() + 1);
        let mut start = 1;
        for &k in &boundaries {
            segments.push((start, k));
            start = k + 1;
        }
        segments.push((start, n));
        let n_changes = boundaries.len();

        for first in State::ALL {
            let seg_states: Vec<State> = (0..segments.len())
                .map(|j| if j % 2 == 0 { first } else { first.other() })
                .collect();
            let states = expand(&boundaries, &seg_states, n);
            if !satisfies_labels(&states, &changes_at, labels) {
                continue;
            }
            for active_mask in 0u32..(1 << n_changes) {
                let active: Vec<bool> = (0..n_changes)
                    .map(|k| active_mask & (1 << k) != 0)
                    .collect();
                let (means, loss) = pooled_with(&prefix, &segments, &active);
                let ok = (0..n_changes).all(|k| {
                    active[k]
                        || match seg_states[k] {
                            State::Background => means[k] <= means[k + 1],
                            State::Peak => means[k] >= means[k + 1],
                        }
                });
                if !ok {
                    continue;
                }
                let cost = loss + lambda * n_changes as f64;
                if best.as_ref().is_none_or(|b| cost < b.penalized_cost) {
                    best = Some(CandidateModel {
                        boundaries: boundaries.clone(),
                        states: seg_states.clone(),
                        active_set: active,
                        means,
                        feasible: true,
                        penalized_cost: cost,
                    });
                }
            }
        }
    }
    best.map(|m| (m.penalized_cost, m))
        .ok_or(Error::NoFeasibleModel)
}

/// Evaluation grid for checking cost operators: `points` evenly spaced
/// means plus every breakpoint and piece minimizer of `functions`, so that
/// running minima over the grid are exact.
pub fn operator_grid(functions: &[&CostFunction], points: usize) -> Vec<f64> {
    let (lo, hi) = functions[0].domain();
    let mut grid: Vec<f64> = (0..points)
        .map(|k| (lo + (hi - lo) * k as f64 / (points.max(2) - 1) as f64).min(hi))
        .collect();
    for f in functions {
        for p in f.pieces() {
            grid.extend([p.mu_lo, p.mu_hi, p.argmin()]);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn values(f: &CostFunction, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&mu| f.eval(mu).expect("grid inside domain"))
        .collect()
}

/// Running minimum of `f` from the left over `grid`.
pub fn grid_min_less(f: &CostFunction, grid: &[f64]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    values(f, grid)
        .into_iter()
        .map(|v| {
            best = best.min(v);
            best
        })
        .collect()
}

/// Running minimum of `f` from the right over `grid`.
pub fn grid_min_more(f: &CostFunction, grid: &[f64]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    let mut out: Vec<f64> = values(f, grid)
        .into_iter()
        .rev()
        .map(|v| {
            best = best.min(v);
            best
        })
        .collect();
    out.reverse();
    out
}

pub fn grid_pointwise_min(f: &CostFunction, g: &CostFunction, grid: &[f64]) -> Vec<f64> {
    values(f, grid)
        .into_iter()
        .zip(values(g, grid))
        .map(|(a, b)| a.min(b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::Label;

    fn counts(z: &[f64]) -> CountSequence {
        CountSequence::from_counts(z.to_vec()).unwrap()
    }

    #[test]
    fn peak_model_then_flat_model() {
        let data = counts(&[1.0, 5.0, 1.0]);
        let (cost, model) = oracle_solve(&data, &LabelSet::empty(3), 1.0).unwrap();
        assert!((cost - 0.952_810_438).abs() < 1e-8);
        assert_eq!(model.boundaries, vec![1, 2]);
        assert_eq!(
            model.states,
            vec![State::Background, State::Peak, State::Background]
        );
        let (cost, model) = oracle_solve(&data, &LabelSet::empty(3), 2.0).unwrap();
        assert!((cost - 1.068_914_977).abs() < 1e-8);
        assert!(model.boundaries.is_empty());
    }

    #[test]
    fn only_one_feasible_model() {
        let data = counts(&[2.0, 2.0]);
        let labels = LabelSet::validate(vec![Label::new(1, 2, LabelKind::NoPeaks)], 2).unwrap();
        for lambda in [0.0, 1.0, 50.0] {
            let (cost, model) = oracle_solve(&data, &labels, lambda).unwrap();
            assert!((cost - 1.227_411_278).abs() < 1e-8);
            assert_eq!(model.means, vec![2.0]);
            assert_eq!(model.states, vec![State::Background]);
        }
    }

    #[test]
    fn pooled_means() {
        let data = counts(&[1.0, 1.0, 3.0, 3.0]);
        let (m, _) = pooled_fit(&data, &[(1, 2), (3, 4)], &[true]);
        assert_eq!(m, vec![2.0, 2.0]);
        let (m, _) = pooled_fit(&data, &[(1, 2), (3, 4)], &[false]);
        assert_eq!(m, vec![1.0, 3.0]);
        let (m, loss) = pooled_fit(&counts(&[0.0, 0.0]), &[(1, 2)], &[]);
        assert_eq!((m[0], loss), (0.0, 0.0));
    }

    #[test]
    fn grid_minima() {
        let f = CostFunction::loss(2.0, 1.0, 0.5, 4.0);
        let grid = operator_grid(&[&f], 5);
        assert!(grid.contains(&2.0));
        let less = grid_min_less(&f, &grid);
        let more = grid_min_more(&f, &grid);
        let at_two = f.eval(2.0).unwrap();
        assert_eq!(*less.last().unwrap(), at_two);
        assert_eq!(more[0], at_two);
        assert_eq!(grid_pointwise_min(&f, &f, &grid), values(&f, &grid));
    }

    #[test]
    fn size_limit() {
        let data = counts(&[1.0; 13]);
        assert!(matches!(
            oracle_solve(&data, &LabelSet::empty(13), 1.0),
            Err(Error::InstanceTooLarge { .. })
        ));
    }
}
