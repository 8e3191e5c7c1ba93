//! Root finding for `d(mu) = a mu + b ln mu + c` on `mu >= 0`.

use arrayvec::ArrayVec;

/// Relative tolerance on root location.
pub const ROOT_TOL: f64 = 1e-12;
/// Roots closer than this (relative) to an interval endpoint are snapped onto it.
pub const SNAP_TOL: f64 = 1e-12;

const MAX_ITER: usize = 400;

/// `a mu + b ln mu + c`, taking the limit at `mu = 0`.
#[inline]
pub fn log_linear(a: f64, b: f64, c: f64, mu: f64) -> f64 {
    if mu > 0.0 {
        a * mu + b * mu.ln() + c
    } else if b == 0.0 {
        c
    } else if b < 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

#[inline]
fn scale(x: f64) -> f64 {
    x.abs().max(1.0)
}

#[inline]
pub(crate) fn near(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * scale(x.max(y))
}

/// Sign changes of `d` strictly inside `(lo, hi)`, in increasing order.
///
/// `d` has at most one stationary point, `-b / a`; each side of it is
/// monotone and holds at most one root. Roots within [`SNAP_TOL`] of an
/// endpoint are dropped since the endpoint is already a breakpoint.
pub fn roots_in(a: f64, b: f64, c: f64, lo: f64, hi: f64) -> ArrayVec<f64, 2> {
    let mut out = ArrayVec::new();
    if !(hi > lo) {
        return out;
    }
    if b == 0.0 {
        if a != 0.0 {
            push_root(&mut out, -c / a, lo, hi);
        }
        return out;
    }
    let mut cuts: ArrayVec<f64, 3> = ArrayVec::new();
    cuts.push(lo);
    if a != 0.0 {
        let s = -b / a;
        if s > lo && s < hi {
            cuts.push(s);
        }
    }
    cuts.push(hi);
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        let dl = log_linear(a, b, c, l);
        let dr = log_linear(a, b, c, r);
        if dl == 0.0 || dr == 0.0 || dl.is_nan() || dr.is_nan() {
            continue;
        }
        if (dl < 0.0) != (dr < 0.0) {
            let x = bracketed_root(a, b, c, l, r, dl < 0.0);
            push_root(&mut out, x, lo, hi);
        }
    }
    out
}

fn push_root(out: &mut ArrayVec<f64, 2>, x: f64, lo: f64, hi: f64) {
    if !(x > lo && x < hi) || near(x, lo, SNAP_TOL) || near(x, hi, SNAP_TOL) {
        return;
    }
    if let Some(&last) = out.last() {
        if near(x, last, SNAP_TOL) {
            return;
        }
    }
    if !out.is_full() {
        out.push(x);
    }
}

/// Root of `d` in `[l, r]` given a sign change, by Newton steps safeguarded
/// with bisection. `neg_left` is the sign of `d(l)`.
pub fn bracketed_root(a: f64, b: f64, c: f64, mut l: f64, mut r: f64, neg_left: bool) -> f64 {
    let mut x = midpoint(l, r);
    for _ in 0..MAX_ITER {
        let fx = log_linear(a, b, c, x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == neg_left {
            l = x;
        } else {
            r = x;
        }
        if r - l <= ROOT_TOL * r.abs().max(f64::MIN_POSITIVE) {
            return 0.5 * (l + r);
        }
        let slope = a + b / x;
        let newton = x - fx / slope;
        if newton.is_finite() && newton > l && newton < r {
            if (newton - x).abs() <= ROOT_TOL * newton.abs() {
                return newton;
            }
            x = newton;
        } else {
            x = midpoint(l, r);
        }
    }
    x
}

/// Midpoint that bisects geometrically when the bracket spans orders of
/// magnitude, so roots near zero are reached quickly.
fn midpoint(l: f64, r: f64) -> f64 {
    if l > 0.0 && r > 4.0 * l {
        (l * r).sqrt()
    } else if l == 0.0 && r > 0.0 {
        r * 0.0625
    } else {
        0.5 * (l + r)
    }
}
