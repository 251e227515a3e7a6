//! Non-decreasing, right-continuous functions with values in the extended
//! reals, their left limits and their upper inverses.
//!
//! `f64` carries the extended reals directly: `±∞` are ordinary values and
//! every comparison used by the distance code is total on them. The limits
//! `f(±∞)` are obtained by evaluating at `±∞`.

use std::sync::Arc;

use crate::bisect;
use crate::error::{LevyError, Result};

/// A jump of a monotone map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub location: f64,
    pub left: f64,
    pub right: f64,
}

/// A non-decreasing, right-continuous map `ℝ → [−∞, +∞]`.
pub trait MonotoneMap: Send + Sync {
    /// `f(x)`; at `x = ±∞` this is the limit `f(±∞)`.
    fn eval(&self, x: f64) -> f64;

    /// The left limit `f₋(x)`.
    fn eval_left(&self, x: f64) -> f64;

    /// `(f(−∞), f(+∞))`.
    fn limits(&self) -> (f64, f64) {
        (self.eval(f64::NEG_INFINITY), self.eval(f64::INFINITY))
    }

    /// Finite list of discontinuities in increasing order, if known.
    fn discontinuities(&self) -> Option<Vec<Jump>> {
        None
    }

    /// Exact piecewise-constant representation, when the map is a step map.
    fn as_step(&self) -> Option<StepMap> {
        None
    }

    /// Region outside of which the map is (numerically) constant.
    fn span(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Piecewise constant map: `values[0]` left of the first breakpoint and
/// `values[k]` on `[breaks[k-1], breaks[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMap {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepMap {
    /// Builds a step map; equal breakpoints are merged (the last value
    /// wins) and breakpoints across which the value does not change are
    /// dropped. Breakpoints at `±∞` are absorbed into the limits.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(LevyError::invalid(format!(
                "step map needs {} values for {} breakpoints, got {}",
                breaks.len() + 1,
                breaks.len(),
                values.len()
            )));
        }
        if breaks.iter().chain(values.iter()).any(|v| v.is_nan()) {
            return Err(LevyError::invalid("step map contains NaN"));
        }
        if breaks.windows(2).any(|w| w[0] > w[1]) {
            return Err(LevyError::invalid("step map breakpoints must be sorted"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(LevyError::invalid("step map values must be non-decreasing"));
        }
        let mut out_breaks: Vec<f64> = Vec::with_capacity(breaks.len());
        let mut out_values: Vec<f64> = Vec::with_capacity(values.len());
        out_values.push(values[0]);
        for (k, &b) in breaks.iter().enumerate() {
            let v = values[k + 1];
            if b == f64::NEG_INFINITY {
                // applies to every finite argument
                *out_values.last_mut().expect("non-empty") = v;
                continue;
            }
            if b == f64::INFINITY {
                continue;
            }
            if out_breaks.last() == Some(&b) {
                *out_values.last_mut().expect("non-empty") = v;
            } else {
                out_breaks.push(b);
                out_values.push(v);
            }
        }
        // drop breakpoints without a change in value
        let mut breaks = Vec::with_capacity(out_breaks.len());
        let mut values = vec![out_values[0]];
        for (k, &b) in out_breaks.iter().enumerate() {
            let v = out_values[k + 1];
            if v != *values.last().expect("non-empty") {
                breaks.push(b);
                values.push(v);
            }
        }
        Ok(StepMap { breaks, values })
    }

    /// Distribution function of `Σ p_j δ_{x_j}`.
    pub fn cdf_of_atoms(locations: &[f64], cumulative: &[f64]) -> Result<Self> {
        // cumulative = (P_0 = 0, P_1, ..., P_n = 1)
        StepMap::new(locations.to_vec(), cumulative.to_vec())
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The upper inverse `s ↦ sup{y : f(y) ≤ s}`, again a step map.
    pub fn inverse(&self) -> StepMap {
        let k = self.breaks.len();
        let mut values = Vec::with_capacity(k + 2);
        values.push(f64::NEG_INFINITY);
        values.extend_from_slice(&self.breaks);
        values.push(f64::INFINITY);
        StepMap::new(self.values.clone(), values).expect("inverse of a valid step map is valid")
    }
}

impl MonotoneMap for StepMap {
    fn eval(&self, x: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b <= x);
        self.values[k]
    }

    fn eval_left(&self, x: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b < x);
        self.values[k]
    }

    fn discontinuities(&self) -> Option<Vec<Jump>> {
        Some(
            self.breaks
                .iter()
                .enumerate()
                .map(|(k, &b)| Jump { location: b, left: self.values[k], right: self.values[k + 1] })
                .collect(),
        )
    }

    fn as_step(&self) -> Option<StepMap> {
        Some(self.clone())
    }

    fn span(&self) -> Option<(f64, f64)> {
        match (self.breaks.first(), self.breaks.last()) {
            (Some(&a), Some(&b)) => Some((a, b)),
            _ => Some((0.0, 0.0)),
        }
    }
}

/// A continuous map given by a closure.
pub struct FnMap<F> {
    f: F,
    span: Option<(f64, f64)>,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnMap<F> {
    pub fn new(f: F, span: Option<(f64, f64)>) -> Self {
        FnMap { f, span }
    }
}

impl FnMap<fn(f64) -> f64> {
    pub fn identity() -> Self {
        FnMap { f: |x| x, span: None }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> MonotoneMap for FnMap<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn eval_left(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn discontinuities(&self) -> Option<Vec<Jump>> {
        Some(Vec::new())
    }

    fn span(&self) -> Option<(f64, f64)> {
        self.span
    }
}

/// `x ↦ c·f(x)` for `c > 0`.
pub struct ValueScaled<'a> {
    inner: &'a dyn MonotoneMap,
    factor: f64,
}

impl<'a> ValueScaled<'a> {
    pub fn new(inner: &'a dyn MonotoneMap, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        ValueScaled { inner, factor }
    }
}

impl MonotoneMap for ValueScaled<'_> {
    fn eval(&self, x: f64) -> f64 {
        self.factor * self.inner.eval(x)
    }

    fn eval_left(&self, x: f64) -> f64 {
        self.factor * self.inner.eval_left(x)
    }

    fn discontinuities(&self) -> Option<Vec<Jump>> {
        self.inner.discontinuities().map(|js| {
            js.into_iter()
                .map(|j| Jump { location: j.location, left: self.factor * j.left, right: self.factor * j.right })
                .collect()
        })
    }

    fn as_step(&self) -> Option<StepMap> {
        self.inner.as_step().map(|s| {
            let values = s.values().iter().map(|v| self.factor * v).collect();
            StepMap::new(s.breaks().to_vec(), values).expect("scaling preserves monotonicity")
        })
    }

    fn span(&self) -> Option<(f64, f64)> {
        self.inner.span()
    }
}

/// Upper inverse of an arbitrary monotone map, evaluated by bisection.
pub struct NumericInverse {
    inner: Arc<dyn MonotoneMap>,
}

impl NumericInverse {
    const MAX_DOUBLINGS: i32 = 1100;

    /// `sup{y : pred(y)}` for a down-closed predicate.
    fn sup_where(&self, mut pred: impl FnMut(f64) -> bool) -> f64 {
        // locate a point where pred fails, going right
        let mut hi = 1.0_f64;
        let mut k = 0;
        while pred(hi) {
            hi *= 2.0;
            k += 1;
            if k > Self::MAX_DOUBLINGS || !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        let mut lo = -1.0_f64;
        k = 0;
        while !pred(lo) {
            lo *= 2.0;
            k += 1;
            if k > Self::MAX_DOUBLINGS || !lo.is_finite() {
                return f64::NEG_INFINITY;
            }
        }
        // pred(lo) holds, pred(hi) fails
        let t = bisect::threshold(lo, hi, 0.0, |y| !pred(y));
        // the supremum sits between the last true point and t.value
        t.value
    }
}

impl MonotoneMap for NumericInverse {
    fn eval(&self, s: f64) -> f64 {
        let (lo, hi) = self.inner.limits();
        if s >= hi {
            return f64::INFINITY;
        }
        if s < lo {
            return f64::NEG_INFINITY;
        }
        self.sup_where(|y| self.inner.eval(y) <= s)
    }

    fn eval_left(&self, s: f64) -> f64 {
        let (lo, hi) = self.inner.limits();
        if s > hi {
            return f64::INFINITY;
        }
        if s <= lo {
            return f64::NEG_INFINITY;
        }
        self.sup_where(|y| self.inner.eval(y) < s)
    }
}

/// The upper inverse `f⁻¹(x) = sup{y : f(y) ≤ x}`.
///
/// Step maps are inverted exactly; anything else is wrapped in a bisection
/// based evaluator.
pub fn invert(f: Arc<dyn MonotoneMap>) -> Arc<dyn MonotoneMap> {
    match f.as_step() {
        Some(step) => Arc::new(step.inverse()),
        None => Arc::new(NumericInverse { inner: f }),
    }
}
