//! Label-constrained up-down dynamic program over piecewise cost functions.
//!
//! Column `i` holds two cost functions, background and peak, each a function
//! of the mean of the segment ending at `i`. Labels remove edges from the
//! computation graph: inside a noPeaks label the peak state is unreachable,
//! a peakStart label must be entered in the background state and left in the
//! peak state with exactly one change up in between, and a peakEnd label is
//! the mirror image.

use crate::cost::{CostFunction, PrevMean};
use crate::data::{poisson_loss, CountSequence};
use crate::error::{Error, Result};
use crate::labels::{LabelContext, LabelKind, LabelSet, Position};
use crate::state::State;

/// Edges into one node of the computation graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transition {
    /// No incoming edges; the cost is infinite.
    Infinite,
    /// Only the no-change edge from the same state.
    StayOnly,
    /// No change, or a penalized change from the other state.
    StayOrChange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleContext {
    Unlabeled,
    NoPeaks,
    PeakStart(Position),
    PeakEnd(Position),
}

/// Update rule for one state at one data index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UpdateRule {
    pub state: State,
    pub context: RuleContext,
}

impl UpdateRule {
    pub fn unlabeled(state: State) -> Self {
        UpdateRule {
            state,
            context: RuleContext::Unlabeled,
        }
    }

    pub fn transition(&self) -> Transition {
        use Position::*;
        use State::*;
        use Transition::*;
        match (self.context, self.state) {
            (RuleContext::Unlabeled, _) => StayOrChange,
            (RuleContext::NoPeaks, Background) => StayOrChange,
            (RuleContext::NoPeaks, Peak) => Infinite,
            (RuleContext::PeakStart(First), Background) => StayOrChange,
            (RuleContext::PeakStart(Interior), Background) => StayOnly,
            (RuleContext::PeakStart(Last), Background) => Infinite,
            (RuleContext::PeakStart(First), Peak) => Infinite,
            (RuleContext::PeakStart(_), Peak) => StayOrChange,
            (RuleContext::PeakEnd(First), Peak) => StayOrChange,
            (RuleContext::PeakEnd(Interior), Peak) => StayOnly,
            (RuleContext::PeakEnd(Last), Peak) => Infinite,
            (RuleContext::PeakEnd(First), Background) => Infinite,
            (RuleContext::PeakEnd(_), Background) => StayOrChange,
        }
    }
}

pub fn get_rule(state: State, context: LabelContext) -> UpdateRule {
    let context = match context {
        LabelContext::Unlabeled => RuleContext::Unlabeled,
        LabelContext::Labeled { kind, position, .. } => match kind {
            LabelKind::NoPeaks => RuleContext::NoPeaks,
            LabelKind::PeakStart => RuleContext::PeakStart(position),
            LabelKind::PeakEnd => RuleContext::PeakEnd(position),
        },
    };
    UpdateRule { state, context }
}

/// Cost of `rule.state` at data index `i >= 2` from the previous column.
pub fn apply_rule(
    rule: UpdateRule,
    prev: &[CostFunction; 2],
    z: f64,
    w: f64,
    lambda: f64,
    i: usize,
) -> CostFunction {
    let s = rule.state;
    let stay = &prev[s.index()];
    match rule.transition() {
        Transition::Infinite => {
            let (lo, hi) = stay.domain();
            CostFunction::infinite(lo, hi)
        }
        Transition::StayOnly => stay.clone().add_loss(z, w),
        Transition::StayOrChange => {
            let from = &prev[s.other().index()];
            let change = if from.is_infinite() {
                from.clone()
            } else {
                match s {
                    State::Peak => from.min_less(),
                    State::Background => from.min_more(),
                }
                .add_constant(lambda)
                .with_change_from(i - 1, s.other())
            };
            stay.pointwise_min(&change).add_loss(z, w)
        }
    }
}

/// Costs at the first data index: the unpenalized loss, unless the label
/// context rules a state out.
pub fn init_costs(
    z: f64,
    w: f64,
    context: LabelContext,
    mu_min: f64,
    mu_max: f64,
) -> [CostFunction; 2] {
    State::ALL.map(|s| match get_rule(s, context).transition() {
        Transition::Infinite => CostFunction::infinite(mu_min, mu_max),
        _ => CostFunction::loss(z, w, mu_min, mu_max),
    })
}

#[derive(Clone, Copy, Debug)]
struct TraceEntry {
    mu_hi: f64,
    /// NaN encodes "same as the current mean".
    prev_mean: f64,
    /// 0 when the segment starts at index 1.
    prev_end: u32,
    prev_state: u8,
}

/// Backtrace view of all `2n` cost functions: for each piece, its upper
/// breakpoint and where its segment came from. Coefficients are dropped
/// once a column has been used, which keeps memory at a few words per piece.
#[derive(Clone, Debug, Default)]
pub struct CostMatrix {
    entries: Vec<TraceEntry>,
    offsets: Vec<usize>,
    n: usize,
}

impl CostMatrix {
    fn with_capacity(n: usize) -> Self {
        let mut offsets = Vec::with_capacity(2 * n + 1);
        offsets.push(0);
        CostMatrix {
            entries: Vec::with_capacity(8 * n),
            offsets,
            n: 0,
        }
    }

    fn push_column(&mut self, costs: &[CostFunction; 2]) {
        for f in costs {
            for p in f.pieces() {
                self.entries.push(TraceEntry {
                    mu_hi: p.mu_hi,
                    prev_mean: match p.trace.prev_mean {
                        PrevMean::SameAsCurrent => f64::NAN,
                        PrevMean::At(m) => m,
                    },
                    prev_end: p.trace.prev_end.map_or(0, |e| e as u32),
                    prev_state: p.trace.prev_state.map_or(0, |s| s as u8),
                });
            }
            self.offsets.push(self.entries.len());
        }
        self.n += 1;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of pieces of `C_{s,i}`.
    pub fn pieces(&self, state: State, i: usize) -> usize {
        let col = 2 * (i - 1) + state.index();
        self.offsets[col + 1] - self.offsets[col]
    }

    pub fn total_pieces(&self) -> usize {
        self.entries.len()
    }

    fn lookup(&self, state: State, i: usize, mu: f64) -> Option<&TraceEntry> {
        let col = 2 * (i - 1) + state.index();
        let column = &self.entries[self.offsets[col]..self.offsets[col + 1]];
        if column.is_empty() {
            return None;
        }
        let k = column.partition_point(|e| e.mu_hi < mu);
        column.get(k.min(column.len() - 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    /// First index, 1-based inclusive.
    pub start: usize,
    /// Last index, inclusive.
    pub end: usize,
    pub mean: f64,
    pub state: State,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationResult {
    pub segments: Vec<Segment>,
    pub states: Vec<State>,
    /// `changes[k]` is the change between indices `k + 1` and `k + 2`.
    pub changes: Vec<i8>,
    pub total_loss: f64,
    pub penalized_cost: f64,
    pub penalty: f64,
    /// Maximal runs of the peak state, 1-based inclusive.
    pub peaks: Vec<(usize, usize)>,
    /// Largest piece count of any cost function.
    pub max_pieces: usize,
}

impl SegmentationResult {
    fn from_segments(
        data: &CountSequence,
        segments: Vec<Segment>,
        penalized_cost: f64,
        penalty: f64,
        max_pieces: usize,
    ) -> Self {
        let n = data.len();
        let mut states = Vec::with_capacity(n);
        let mut means = Vec::with_capacity(n);
        for s in &segments {
            for _ in s.start..=s.end {
                states.push(s.state);
                means.push(s.mean);
            }
        }
        let changes = states
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (State::Background, State::Peak) => 1,
                (State::Peak, State::Background) => -1,
                _ => 0,
            })
            .collect();
        let total_loss = data
            .values()
            .iter()
            .zip(data.weights())
            .zip(&means)
            .map(|((&z, &w), &m)| poisson_loss(z, w, m))
            .sum();
        let peaks = segments
            .iter()
            .filter(|s| s.state == State::Peak)
            .map(|s| (s.start, s.end))
            .collect();
        SegmentationResult {
            segments,
            states,
            changes,
            total_loss,
            penalized_cost,
            penalty,
            peaks,
            max_pieces,
        }
    }

    pub fn change_count(&self) -> usize {
        self.changes.iter().filter(|&&c| c != 0).count()
    }

    /// Per-point segment means.
    pub fn means(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.mean, s.end - s.start + 1))
            .collect()
    }

    /// Loss of the decoded means plus the penalty for each change.
    pub fn recomputed_cost(&self) -> f64 {
        self.total_loss + self.penalty * self.change_count() as f64
    }
}

/// Fits the optimal label-consistent up-down model.
pub fn fit(data: &CountSequence, labels: &LabelSet, lambda: f64) -> Result<SegmentationResult> {
    if labels.n() != data.len() {
        return Err(Error::InvalidArgument(format!(
            "labels are for {} points, data has {}",
            labels.n(),
            data.len()
        )));
    }
    let mut cursor = labels.cursor();
    run(data, lambda, !labels.is_empty(), |i| cursor.get(i))
}

/// The same program with every index taking the unlabeled rule.
pub fn fit_unlabeled(data: &CountSequence, lambda: f64) -> Result<SegmentationResult> {
    run(data, lambda, false, |_| LabelContext::Unlabeled)
}

fn run(
    data: &CountSequence,
    lambda: f64,
    has_labels: bool,
    mut context: impl FnMut(usize) -> LabelContext,
) -> Result<SegmentationResult> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "penalty {lambda} must be finite and >= 0"
        )));
    }
    let (z, w) = (data.values(), data.weights());
    let (lo, mut hi) = data.value_range();
    if lo == hi {
        if !has_labels {
            let seg = Segment {
                start: 1,
                end: data.len(),
                mean: lo,
                state: State::Background,
            };
            let loss: f64 = z.iter().zip(w).map(|(&z, &w)| poisson_loss(z, w, lo)).sum();
            return Ok(SegmentationResult::from_segments(
                data,
                vec![seg],
                loss,
                lambda,
                1,
            ));
        }
        // Any domain containing the common value gives the same optimum.
        hi = lo + 1.0;
    }

    let n = data.len();
    let mut matrix = CostMatrix::with_capacity(n);
    let mut costs = init_costs(z[0], w[0], context(1), lo, hi);
    let mut max_pieces = costs.iter().map(CostFunction::len).max().unwrap_or(0);
    if costs.iter().all(CostFunction::is_infinite) {
        return Err(Error::Infeasible { index: 1 });
    }
    matrix.push_column(&costs);
    for i in 2..=n {
        let ctx = context(i);
        let next =
            State::ALL.map(|s| apply_rule(get_rule(s, ctx), &costs, z[i - 1], w[i - 1], lambda, i));
        if next.iter().all(CostFunction::is_infinite) {
            return Err(Error::Infeasible { index: i });
        }
        max_pieces = max_pieces.max(next[0].len()).max(next[1].len());
        matrix.push_column(&next);
        costs = next;
    }
    let segments = decode(&matrix, &costs)?;
    let best = best_final(&costs)?;
    Ok(SegmentationResult::from_segments(
        data,
        segments,
        best.1.cost,
        lambda,
        max_pieces,
    ))
}

fn best_final(last: &[CostFunction; 2]) -> Result<(State, crate::cost::Minimum)> {
    let mut best: Option<(State, crate::cost::Minimum)> = None;
    for s in State::ALL {
        if let Ok(m) = last[s.index()].minimize() {
            // Strict comparison keeps the background state on ties.
            if best.is_none_or(|(_, b)| m.cost < b.cost) {
                best = Some((s, m));
            }
        }
    }
    best.ok_or(Error::Infeasible {
        index: last[0].len().max(1),
    })
}

/// Walks the backtrace from the best final cost, emitting segments.
pub fn decode(matrix: &CostMatrix, last: &[CostFunction; 2]) -> Result<Vec<Segment>> {
    let n = matrix.len();
    let (mut state, min) = best_final(last).map_err(|_| Error::Infeasible { index: n })?;
    let mut mu = min.mu;
    let mut end = n;
    let mut segments = Vec::new();
    loop {
        let entry = matrix
            .lookup(state, end, mu)
            .ok_or(Error::Infeasible { index: end })?;
        let prev_end = entry.prev_end as usize;
        segments.push(Segment {
            start: prev_end + 1,
            end,
            mean: mu,
            state,
        });
        if prev_end == 0 {
            break;
        }
        debug_assert!(prev_end < end);
        end = prev_end;
        state = if entry.prev_state == 1 {
            State::Peak
        } else {
            State::Background
        };
        if !entry.prev_mean.is_nan() {
            mu = entry.prev_mean;
        }
    }
    segments.reverse();
    Ok(segments)
}
