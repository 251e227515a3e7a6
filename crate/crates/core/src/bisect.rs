//! Threshold search for monotone predicates.

/// Absolute tolerance on the searched variable.
pub const BISECTION_TOL: f64 = 1e-15;

/// Outcome of a threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Smallest point found where the predicate holds.
    pub value: f64,
    /// Number of predicate evaluations.
    pub evaluations: u32,
}

/// Smallest `y` in `[lo, hi]` with `pred(y)`, for a predicate that is false
/// below some threshold and true above it. `pred(hi)` must hold.
///
/// The returned value always satisfies the predicate, so ties at the
/// threshold resolve toward feasibility.
pub fn threshold(lo: f64, hi: f64, tol: f64, mut pred: impl FnMut(f64) -> bool) -> Threshold {
    let mut evaluations = 1;
    if pred(lo) {
        return Threshold { value: lo, evaluations };
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        evaluations += 1;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Threshold { value: hi, evaluations }
}

/// Like [`threshold`] on `[0, ∞)`, growing the upper bracket from 1 by
/// doubling. Returns `+∞` when no finite bracket is found.
pub fn threshold_unbounded(tol: f64, mut pred: impl FnMut(f64) -> bool) -> Threshold {
    if pred(0.0) {
        return Threshold { value: 0.0, evaluations: 1 };
    }
    let mut hi = 1.0_f64;
    let mut evaluations = 1;
    loop {
        evaluations += 1;
        if pred(hi) {
            break;
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return Threshold { value: f64::INFINITY, evaluations };
        }
    }
    let lo = if hi > 1.0 { hi * 0.5 } else { 0.0 };
    let inner = threshold(lo, hi, tol, pred);
    Threshold { value: inner.value, evaluations: evaluations + inner.evaluations }
}
