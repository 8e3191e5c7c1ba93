//! Piecewise Poisson cost functions of the last segment mean.
//!
//! Each piece is `a mu + b ln mu + c` on a closed interval, together with the
//! backtrace needed to recover the segmentation that attains that cost. All
//! pieces are convex (`b <= 0`),
//! which the prefix/suffix minimum operators rely on.

mod roots;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::state::State;

pub use roots::{log_linear, roots_in, ROOT_TOL, SNAP_TOL};

/// Adjacent pieces whose coefficients differ by less than this are merged.
pub const MERGE_TOL: f64 = 1e-10;

/// Relative amount a piece must dip below the running minimum before the
/// prefix/suffix operators start a new non-constant stretch.
const DIP_TOL: f64 = 1e-12;

/// Mean of the previous segment, relative to a piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrevMean {
    /// Equality-active change: the previous segment has the same mean.
    SameAsCurrent,
    At(f64),
}

/// Where the segment ending at the current point came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Backtrace {
    /// Last data index (1-based) of the previous segment.
    pub prev_end: Option<usize>,
    pub prev_state: Option<State>,
    pub prev_mean: PrevMean,
}

impl Backtrace {
    /// No previous segment: the current segment starts at index 1.
    pub const START: Backtrace = Backtrace {
        prev_end: None,
        prev_state: None,
        prev_mean: PrevMean::SameAsCurrent,
    };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonPiece {
    pub linear: f64,
    pub log: f64,
    pub constant: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub trace: Backtrace,
}

impl PoissonPiece {
    #[inline]
    pub fn eval(&self, mu: f64) -> f64 {
        log_linear(self.linear, self.log, self.constant, mu)
    }

    /// Minimizer of the piece over its interval.
    pub fn argmin(&self) -> f64 {
        let (a, b) = (self.linear, self.log);
        let s = if b < 0.0 {
            if a > 0.0 {
                -b / a
            } else {
                f64::INFINITY
            }
        } else if a < 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        s.clamp(self.mu_lo, self.mu_hi)
    }

    fn same_coefs(&self, other: &PoissonPiece) -> bool {
        (self.linear - other.linear).abs() < MERGE_TOL
            && (self.log - other.log).abs() < MERGE_TOL
            && (self.constant - other.constant).abs() < MERGE_TOL
    }

    fn is_constant(&self) -> bool {
        self.linear == 0.0 && self.log == 0.0
    }

    fn on(mut self, lo: f64, hi: f64) -> Self {
        self.mu_lo = lo;
        self.mu_hi = hi;
        self
    }

    fn constant_on(value: f64, lo: f64, hi: f64, trace: Backtrace) -> Self {
        PoissonPiece {
            linear: 0.0,
            log: 0.0,
            constant: value,
            mu_lo: lo,
            mu_hi: hi,
            trace,
        }
    }
}

/// Minimum of a cost function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub mu: f64,
    pub cost: f64,
    pub piece: usize,
}

/// Piecewise cost function over `[mu_min, mu_max]`. No pieces means the
/// function is `+inf` everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction {
    pieces: Vec<PoissonPiece>,
    mu_min: f64,
    mu_max: f64,
}

impl CostFunction {
    pub fn zero(mu_min: f64, mu_max: f64) -> Self {
        assert!(mu_min < mu_max, "empty mean domain [{mu_min}, {mu_max}]");
        CostFunction {
            pieces: vec![PoissonPiece::constant_on(
                0.0,
                mu_min,
                mu_max,
                Backtrace::START,
            )],
            mu_min,
            mu_max,
        }
    }

    pub fn infinite(mu_min: f64, mu_max: f64) -> Self {
        CostFunction {
            pieces: Vec::new(),
            mu_min,
            mu_max,
        }
    }

    /// Builds a function from explicit pieces, checking tiling, convexity of
    /// each piece and continuity at breakpoints.
    pub fn from_pieces(pieces: Vec<PoissonPiece>) -> Result<Self> {
        let (first, last) = match (pieces.first(), pieces.last()) {
            (Some(f), Some(l)) => (f.mu_lo, l.mu_hi),
            _ => return Err(Error::InvalidArgument("no pieces".into())),
        };
        for (k, p) in pieces.iter().enumerate() {
            if !(p.mu_lo < p.mu_hi) {
                return Err(Error::InvalidArgument(format!(
                    "piece {k} has empty interval"
                )));
            }
            if p.log > 0.0 {
                return Err(Error::InvalidArgument(format!("piece {k} is not convex")));
            }
            if k > 0 {
                let prev = &pieces[k - 1];
                if prev.mu_hi != p.mu_lo {
                    return Err(Error::InvalidArgument(format!("gap before piece {k}")));
                }
                let (u, v) = (prev.eval(p.mu_lo), p.eval(p.mu_lo));
                if !(u == v || (u - v).abs() <= 1e-8 * u.abs().max(v.abs()).max(1.0)) {
                    return Err(Error::InvalidArgument(format!(
                        "discontinuity before piece {k}"
                    )));
                }
            }
        }
        Ok(CostFunction {
            pieces,
            mu_min: first,
            mu_max: last,
        })
    }

    /// `w * (mu - z ln mu)` over the domain.
    pub fn loss(z: f64, w: f64, mu_min: f64, mu_max: f64) -> Self {
        Self::zero(mu_min, mu_max).add_loss(z, w)
    }

    pub fn pieces(&self) -> &[PoissonPiece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.mu_min, self.mu_max)
    }

    pub fn is_infinite(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Adds the weighted Poisson loss of one data point.
    pub fn add_loss(mut self, z: f64, w: f64) -> Self {
        for p in &mut self.pieces {
            p.linear += w;
            p.log -= w * z;
        }
        self
    }

    pub fn add_constant(mut self, lambda: f64) -> Self {
        for p in &mut self.pieces {
            p.constant += lambda;
        }
        self
    }

    /// Marks every piece as reached through a change out of `state` at
    /// data index `prev_end`, keeping the stored previous means.
    pub fn with_change_from(mut self, prev_end: usize, state: State) -> Self {
        for p in &mut self.pieces {
            p.trace.prev_end = Some(prev_end);
            p.trace.prev_state = Some(state);
        }
        self
    }

    /// Piece covering `mu`; on a shared breakpoint the left piece wins.
    pub fn piece_at(&self, mu: f64) -> Option<&PoissonPiece> {
        if self.pieces.is_empty() || mu < self.mu_min || mu > self.mu_max {
            return None;
        }
        let k = self.pieces.partition_point(|p| p.mu_hi < mu);
        self.pieces.get(k.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, mu: f64) -> Result<f64> {
        if !(mu >= self.mu_min && mu <= self.mu_max) {
            return Err(Error::OutOfDomain {
                mu,
                lo: self.mu_min,
                hi: self.mu_max,
            });
        }
        Ok(self.piece_at(mu).map_or(f64::INFINITY, |p| p.eval(mu)))
    }

    /// Global minimum; ties go to the smallest mean.
    pub fn minimize(&self) -> Result<Minimum> {
        let mut best: Option<Minimum> = None;
        for (k, p) in self.pieces.iter().enumerate() {
            let mu = p.argmin();
            let cost = p.eval(mu);
            if best.is_none_or(|b| cost < b.cost) {
                best = Some(Minimum { mu, cost, piece: k });
            }
        }
        best.ok_or(Error::NoFeasibleModel)
    }

    /// Prefix minimum `mu -> min_{x <= mu} C(x)`, the cost of a change up.
    ///
    /// Constant stretches record the attaining mean in `prev_mean`;
    /// stretches that follow `C` itself record [`PrevMean::SameAsCurrent`].
    pub fn min_less(&self) -> Self {
        let mut out = Vec::with_capacity(self.pieces.len() + 2);
        let mut best = f64::INFINITY;
        let mut best_trace = Backtrace::START;
        for p in &self.pieces {
            let (l, r) = (p.mu_lo, p.mu_hi);
            let m = p.argmin();
            let fm = p.eval(m);
            if dips_below(fm, best) {
                let x0 = if p.eval(l) <= best {
                    l
                } else {
                    snap(
                        roots::bracketed_root(p.linear, p.log, p.constant - best, l, m, false),
                        l,
                        m,
                    )
                };
                if x0 > l {
                    push_merge(&mut out, PoissonPiece::constant_on(best, l, x0, best_trace));
                }
                if m > x0 {
                    let mut q = p.on(x0, m);
                    q.trace.prev_mean = PrevMean::SameAsCurrent;
                    push_merge(&mut out, q);
                }
                best = fm;
                best_trace = Backtrace {
                    prev_mean: PrevMean::At(m),
                    ..p.trace
                };
                if r > m {
                    push_merge(&mut out, PoissonPiece::constant_on(best, m, r, best_trace));
                }
            } else {
                push_merge(&mut out, PoissonPiece::constant_on(best, l, r, best_trace));
            }
        }
        CostFunction {
            pieces: out,
            mu_min: self.mu_min,
            mu_max: self.mu_max,
        }
    }

    /// Suffix minimum `mu -> min_{x >= mu} C(x)`, the cost of a change down.
    pub fn min_more(&self) -> Self {
        // Built right to left, then reversed.
        let mut rev = Vec::with_capacity(self.pieces.len() + 2);
        let mut best = f64::INFINITY;
        let mut best_trace = Backtrace::START;
        for p in self.pieces.iter().rev() {
            let (l, r) = (p.mu_lo, p.mu_hi);
            let m = p.argmin();
            let fm = p.eval(m);
            if dips_below(fm, best) {
                let x0 = if p.eval(r) <= best {
                    r
                } else {
                    snap(
                        roots::bracketed_root(p.linear, p.log, p.constant - best, m, r, true),
                        m,
                        r,
                    )
                };
                if r > x0 {
                    push_merge_left(&mut rev, PoissonPiece::constant_on(best, x0, r, best_trace));
                }
                if x0 > m {
                    let mut q = p.on(m, x0);
                    q.trace.prev_mean = PrevMean::SameAsCurrent;
                    push_merge_left(&mut rev, q);
                }
                best = fm;
                best_trace = Backtrace {
                    prev_mean: PrevMean::At(m),
                    ..p.trace
                };
                if m > l {
                    push_merge_left(&mut rev, PoissonPiece::constant_on(best, l, m, best_trace));
                }
            } else {
                push_merge_left(&mut rev, PoissonPiece::constant_on(best, l, r, best_trace));
            }
        }
        rev.reverse();
        CostFunction {
            pieces: rev,
            mu_min: self.mu_min,
            mu_max: self.mu_max,
        }
    }

    /// Pointwise minimum. Where the two agree `self` wins, so callers pass
    /// the no-change term first.
    pub fn pointwise_min(&self, other: &CostFunction) -> Self {
        if other.is_infinite() {
            return self.clone();
        }
        if self.is_infinite() {
            return other.clone();
        }
        debug_assert_eq!(self.domain(), other.domain());
        let (a, b) = (&self.pieces, &other.pieces);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut ia, mut ib) = (0, 0);
        let mut lo = self.mu_min;
        while ia < a.len() && ib < b.len() {
            let (pa, pb) = (&a[ia], &b[ib]);
            let hi = pa.mu_hi.min(pb.mu_hi);
            if hi > lo {
                let (da, db, dc) = (
                    pa.linear - pb.linear,
                    pa.log - pb.log,
                    pa.constant - pb.constant,
                );
                let roots = roots_in(da, db, dc, lo, hi);
                let mut x0 = lo;
                for x1 in roots.iter().copied().chain(std::iter::once(hi)) {
                    let mid = 0.5 * (x0 + x1);
                    let chosen = if log_linear(da, db, dc, mid) <= 0.0 {
                        pa
                    } else {
                        pb
                    };
                    push_merge(&mut out, chosen.on(x0, x1));
                    x0 = x1;
                }
                lo = hi;
            }
            if pa.mu_hi <= hi {
                ia += 1;
            }
            if pb.mu_hi <= hi {
                ib += 1;
            }
        }
        CostFunction {
            pieces: out,
            mu_min: self.mu_min,
            mu_max: self.mu_max,
        }
    }

    /// Tab-separated dump, one line per piece:
    /// `mu_lo mu_hi linear log const prev_end prev_state prev_mean`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for p in &self.pieces {
            let end = p.trace.prev_end.map_or("NA".to_string(), |e| e.to_string());
            let state = p
                .trace
                .prev_state
                .map_or("NA".to_string(), |s| s.index().to_string());
            let mean = match p.trace.prev_mean {
                PrevMean::SameAsCurrent => "same".to_string(),
                PrevMean::At(m) => format!("{m}"),
            };
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.mu_lo, p.mu_hi, p.linear, p.log, p.constant, end, state, mean
            );
        }
        s
    }
}

fn dips_below(v: f64, best: f64) -> bool {
    if best.is_finite() {
        v < best - DIP_TOL * best.abs().max(1.0)
    } else {
        v < best
    }
}

fn snap(x: f64, lo: f64, hi: f64) -> f64 {
    if roots::near(x, lo, SNAP_TOL) {
        lo
    } else if roots::near(x, hi, SNAP_TOL) {
        hi
    } else {
        x.clamp(lo, hi)
    }
}

fn push_merge(out: &mut Vec<PoissonPiece>, p: PoissonPiece) {
    if !(p.mu_hi > p.mu_lo) {
        return;
    }
    if let Some(last) = out.last_mut() {
        if last.trace == p.trace && last.same_coefs(&p) {
            last.mu_hi = p.mu_hi;
            return;
        }
        // Piece boundaries must tile exactly even after snapping.
        debug_assert!(last.mu_hi == p.mu_lo);
    }
    out.push(p);
}

fn push_merge_left(rev: &mut Vec<PoissonPiece>, p: PoissonPiece) {
    if !(p.mu_hi > p.mu_lo) {
        return;
    }
    if let Some(last) = rev.last_mut() {
        if last.trace == p.trace && last.same_coefs(&p) {
            last.mu_lo = p.mu_lo;
            return;
        }
        debug_assert!(last.mu_lo == p.mu_hi);
    }
    rev.push(p);
}

impl PoissonPiece {
    /// Piece with an explicit formula and the start backtrace.
    pub fn new(linear: f64, log: f64, constant: f64, mu_lo: f64, mu_hi: f64) -> Self {
        PoissonPiece {
            linear,
            log,
            constant,
            mu_lo,
            mu_hi,
            trace: Backtrace::START,
        }
    }

    pub fn with_trace(mut self, trace: Backtrace) -> Self {
        self.trace = trace;
        self
    }

    pub fn is_flat(&self) -> bool {
        self.is_constant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    fn single(a: f64, b: f64, c: f64, lo: f64, hi: f64) -> CostFunction {
        CostFunction::from_pieces(vec![PoissonPiece::new(a, b, c, lo, hi)]).unwrap()
    }

    #[test]
    fn add_loss_coefficients() {
        let f = CostFunction::zero(0.0, 5.0).add_loss(2.0, 1.0);
        let p = f.pieces()[0];
        assert_eq!((p.linear, p.log, p.constant), (1.0, -2.0, 0.0));
        let g = CostFunction::zero(0.0, 5.0).add_loss(0.0, 3.0);
        assert_eq!((g.pieces()[0].linear, g.pieces()[0].log), (3.0, 0.0));
    }

    #[test]
    fn add_loss_twice_then_minimize() {
        let f = CostFunction::zero(1.0, 5.0)
            .add_loss(1.0, 1.0)
            .add_loss(5.0, 1.0);
        let m = f.minimize().unwrap();
        assert!(close(m.mu, 3.0));
        assert!(close(m.cost, 6.0 - 6.0 * 3f64.ln()));
        assert!((m.cost - -0.591_673_732).abs() < 1e-9);
        // dense grid agrees
        let grid_min = (0..=4000)
            .map(|k| f.eval(1.0 + 4.0 * k as f64 / 4000.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(m.cost <= grid_min + 1e-12);
        assert!(grid_min - m.cost < 1e-6);
    }

    #[test]
    fn add_constant_shifts() {
        let f = single(1.0, 0.0, 0.0, 0.0, 4.0);
        let g = f.clone().add_constant(1.0);
        assert_eq!(g.eval(2.0).unwrap(), 3.0);
        assert_eq!(f.clone().add_constant(0.0), f);
        let (m0, m1) = (f.minimize().unwrap(), g.minimize().unwrap());
        assert_eq!(m0.mu, m1.mu);
        assert_eq!(m1.cost, m0.cost + 1.0);
    }

    #[test]
    fn infinite_propagates() {
        let f = CostFunction::infinite(0.0, 1.0)
            .add_loss(1.0, 1.0)
            .add_constant(2.0);
        assert!(f.is_infinite());
        assert!(matches!(f.minimize(), Err(Error::NoFeasibleModel)));
        assert_eq!(f.eval(0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn min_less_of_convex() {
        let c = single(1.0, -2.0, 0.0, 0.5, 4.0);
        let out = c.min_less();
        let v = 2.0 - 2.0 * LN2;
        assert!((v - 0.613_705_639).abs() < 1e-9);
        assert_eq!(out.len(), 2);
        let (p0, p1) = (out.pieces()[0], out.pieces()[1]);
        assert!(close(p0.mu_hi, 2.0));
        assert_eq!(p0.trace.prev_mean, PrevMean::SameAsCurrent);
        assert!(p1.is_flat() && close(p1.constant, v));
        assert_eq!(p1.trace.prev_mean, PrevMean::At(p1.mu_lo));
        assert!(close(out.eval(3.0).unwrap(), v));
        assert!(close(out.eval(1.0).unwrap(), 1.0));
    }

    #[test]
    fn min_less_noop_on_decreasing() {
        let c = single(0.0, -1.0, 0.0, 0.5, 4.0);
        let out = c.min_less();
        assert_eq!(out.len(), 1);
        assert_eq!(out.pieces()[0].linear, 0.0);
        assert_eq!(out.pieces()[0].log, -1.0);
    }

    #[test]
    fn min_more_of_convex() {
        let c = single(1.0, -2.0, 0.0, 0.5, 4.0);
        let out = c.min_more();
        assert_eq!(out.len(), 2);
        assert!(out.pieces()[0].is_flat());
        assert!(close(out.pieces()[0].mu_hi, 2.0));
        assert!(close(out.eval(1.0).unwrap(), 2.0 - 2.0 * LN2));
        assert!(close(out.eval(3.0).unwrap(), 3.0 - 2.0 * 3f64.ln()));
    }

    #[test]
    fn min_more_of_min_less_is_global_min() {
        let c = single(1.0, -2.0, 0.0, 0.5, 4.0);
        let out = c.min_less().min_more();
        for p in out.pieces() {
            assert!(p.is_flat());
            assert!(close(p.constant, 2.0 - 2.0 * LN2));
        }
    }

    #[test]
    fn pointwise_min_crossing() {
        let a = single(1.0, 0.0, 0.0, 0.0, 4.0);
        let b = single(-1.0, 0.0, 2.0, 0.0, 4.0);
        let out = a.pointwise_min(&b);
        assert_eq!(out.len(), 2);
        assert!(close(out.pieces()[0].mu_hi, 1.0));
        assert_eq!(out.pieces()[0].linear, 1.0);
        assert_eq!(out.pieces()[1].linear, -1.0);
        assert_eq!(out.eval(3.0).unwrap(), -1.0);
    }

    #[test]
    fn pointwise_min_dominated_and_identity() {
        let c = single(1.0, -2.0, 0.0, 0.5, 4.0);
        assert_eq!(c.pointwise_min(&c.clone().add_constant(5.0)), c);
        assert_eq!(c.pointwise_min(&CostFunction::infinite(0.5, 4.0)), c);
        assert_eq!(CostFunction::infinite(0.5, 4.0).pointwise_min(&c), c);
        assert!(CostFunction::infinite(0.5, 4.0)
            .pointwise_min(&CostFunction::infinite(0.5, 4.0))
            .is_infinite());
    }

    #[test]
    fn eval_conventions() {
        let c = single(1.0, -2.0, 0.0, 0.0, 4.0);
        assert_eq!(c.eval(1.0).unwrap(), 1.0);
        assert!(close(
            c.eval(std::f64::consts::E).unwrap(),
            std::f64::consts::E - 2.0
        ));
        assert_eq!(c.eval(0.0).unwrap(), f64::INFINITY);
        assert_eq!(single(2.0, 0.0, 7.0, 0.0, 4.0).eval(0.0).unwrap(), 7.0);
        assert!(matches!(c.eval(5.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn minimize_boundary() {
        let m = single(1.0, 0.0, 0.0, 1.0, 5.0).minimize().unwrap();
        assert_eq!((m.mu, m.cost), (1.0, 1.0));
    }

    #[test]
    fn dump_format() {
        let c = single(1.0, -2.0, 0.0, 0.5, 4.0)
            .min_less()
            .with_change_from(3, State::Background);
        let dump = c.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines[0], "0.5\t2\t1\t-2\t0\t3\t0\tsame");
        assert!(lines[1].starts_with("2\t4\t0\t0\t"));
        assert!(lines[1].ends_with("\t3\t0\t2"));
    }

    #[test]
    fn from_pieces_rejects_gaps_and_jumps() {
        let p = PoissonPiece::new(1.0, 0.0, 0.0, 0.0, 1.0);
        let q = PoissonPiece::new(0.0, 0.0, 5.0, 1.0, 2.0);
        assert!(CostFunction::from_pieces(vec![p, q]).is_err());
        let q = PoissonPiece::new(0.0, 0.0, 1.0, 1.5, 2.0);
        assert!(CostFunction::from_pieces(vec![p, q]).is_err());
        assert!(
            CostFunction::from_pieces(vec![PoissonPiece::new(1.0, 1.0, 0.0, 0.0, 1.0)]).is_err()
        );
    }
}
