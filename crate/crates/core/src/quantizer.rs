//! Best `n`-atom approximations: given locations, given weights, with
//! uniform weights, and unconstrained.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bisect::{self, BISECTION_TOL};
use crate::distributions::DistributionSpec;
use crate::error::{LevyError, Result};
use crate::levy::{ell, ell_star, AtomicMeasure, IntervalX};
use crate::monotone::ValueScaled;

/// Slack added to the error level when a solver certifies its own output.
pub const CERT_SLACK: f64 = 1e-8;

/// Which optimality conditions hold at a given level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// Weight condition: `F₋(x_{j+1} − L/ε) − L ≤ P_j ≤ F(x_j + L/ε) + L`.
    pub weights: bool,
    /// Location condition: `εg₋(P_j − L) − L ≤ εx_j ≤ εg(P_{j−1} + L) + L`.
    pub locations: bool,
    pub level: f64,
}

impl Certificate {
    pub fn both(&self) -> bool {
        self.weights && self.locations
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SolverStats {
    /// Steps of the outer search on the error level.
    pub bisection_iterations: u32,
    /// Feasibility evaluations (greedy passes or `ℓ*` evaluations).
    pub feasibility_calls: u32,
}

/// Output of a solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub measure: AtomicMeasure,
    pub error: f64,
    pub eps: f64,
    pub certificate: Certificate,
    pub stats: SolverStats,
}

impl ApproxResult {
    pub fn n(&self) -> usize {
        self.measure.n()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(LevyError::invalid(format!("ε must be positive and finite, got {eps}")))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(LevyError::invalid("n must be at least 1"))
    }
}

/// The weight condition for every `j = 0, …, n` at `level`.
pub fn weights_condition(spec: &DistributionSpec, m: &AtomicMeasure, eps: f64, level: f64) -> bool {
    let shift = level / eps;
    let p = m.cumulative();
    (0..=m.n()).all(|j| spec.cdf_left(m.x(j + 1) - shift) - level <= p[j] && p[j] <= spec.cdf(m.x(j) + shift) + level)
}

/// The location condition for every `j = 1, …, n` at `level`.
pub fn locations_condition(spec: &DistributionSpec, m: &AtomicMeasure, eps: f64, level: f64) -> bool {
    let p = m.cumulative();
    (1..=m.n()).all(|j| {
        let x = eps * m.x(j);
        eps * spec.quantile_left(p[j] - level) - level <= x && x <= eps * spec.quantile(p[j - 1] + level) + level
    })
}

/// Re-evaluates both optimality conditions at `level`.
pub fn certify(spec: &DistributionSpec, m: &AtomicMeasure, eps: f64, level: f64) -> Certificate {
    Certificate {
        weights: weights_condition(spec, m, eps, level),
        locations: locations_condition(spec, m, eps, level),
        level,
    }
}

/// Location inside the feasible window `[g₋(P_j − ℓ) − ℓ/ε, g(P_{j−1} + ℓ) + ℓ/ε]`:
/// the midpoint, or the finite end when the other one is infinite.
pub fn place_atom(spec: &DistributionSpec, eps: f64, lower_level: f64, upper_level: f64, ell: f64) -> f64 {
    let lo = spec.quantile_left(upper_level - ell) - ell / eps;
    let hi = spec.quantile(lower_level + ell) + ell / eps;
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => spec.quantile(0.5 * (lower_level + upper_level)),
    }
}

/// Atoms for the given cumulative levels at error `ell`, kept sorted by
/// clamping against the previous atom (which stays inside each window
/// because both window ends are non-decreasing in `j`).
fn place_atoms(spec: &DistributionSpec, eps: f64, cumulative: &[f64], ell: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = Vec::with_capacity(cumulative.len() - 1);
    for w in cumulative.windows(2) {
        let x = place_atom(spec, eps, w[0], w[1], ell);
        let x = match xs.last() {
            Some(&prev) if prev > x => prev,
            _ => x,
        };
        xs.push(x);
    }
    xs
}

fn finish(
    spec: &DistributionSpec,
    measure: AtomicMeasure,
    error: f64,
    eps: f64,
    stats: SolverStats,
) -> Result<ApproxResult> {
    if let Some(x) = measure.locations().iter().find(|x| !x.is_finite()) {
        return Err(LevyError::integrity(format!("solver produced a non-finite atom {x}")));
    }
    let certificate = certify(spec, &measure, eps, error + CERT_SLACK);
    if !certificate.both() {
        return Err(LevyError::integrity(format!(
            "optimality certificate failed at level {error} for {spec:?} (weights: {}, locations: {})",
            certificate.weights, certificate.locations
        )));
    }
    Ok(ApproxResult { measure, error, eps, certificate, stats })
}

/// Best weights for fixed sorted locations `x`.
///
/// The error is `ε·max{ℓ_{F/ε,[−∞,x_1]}(0), ℓ*_{F/ε,[x_j,x_{j+1}]}, ℓ_{F/ε,[x_n,+∞]}(1/ε)}`;
/// each `P_j` is the midpoint of its feasible window intersected with
/// `[P_{j−1}, 1]`.
pub fn best_weights_given_locations(spec: &DistributionSpec, x: &[f64], eps: f64) -> Result<ApproxResult> {
    check_eps(eps)?;
    check_n(x.len())?;
    if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| w[0] > w[1]) {
        return Err(LevyError::invalid("locations must be finite and sorted"));
    }
    let n = x.len();
    let cdf = spec.cdf_map();
    let f = ValueScaled::new(&cdf, 1.0 / eps);
    let mut worst = ell(&f, IntervalX { lower: f64::NEG_INFINITY, upper: x[0] }, 0.0);
    for w in x.windows(2) {
        worst = worst.max(ell_star(&f, IntervalX { lower: w[0], upper: w[1] }));
    }
    worst = worst.max(ell(&f, IntervalX { lower: x[n - 1], upper: f64::INFINITY }, 1.0 / eps));
    let error = (eps * worst).min(1.0);

    let shift = error / eps;
    let mut levels = Vec::with_capacity(n);
    let mut prev = 0.0_f64;
    for j in 1..n {
        let lo = (spec.cdf_left(x[j] - shift) - error).max(prev);
        let hi = (spec.cdf(x[j - 1] + shift) + error).min(1.0);
        let p = if lo <= hi { 0.5 * (lo + hi) } else { lo.min(1.0) };
        levels.push(p);
        prev = p;
    }
    levels.push(1.0);
    let measure = AtomicMeasure::from_cumulative(x.to_vec(), &levels)?;
    let stats = SolverStats { bisection_iterations: 0, feasibility_calls: (n + 1) as u32 };
    finish(spec, measure, error, eps, stats)
}

/// Best locations for fixed weights `p`; the error is
/// `max_j ℓ*_{εg,[P_{j−1},P_j]}`.
pub fn best_locations_given_weights(spec: &DistributionSpec, p: &[f64], eps: f64) -> Result<ApproxResult> {
    check_eps(eps)?;
    check_n(p.len())?;
    // validates the weights and builds P
    let template = AtomicMeasure::new(vec![0.0; p.len()], p.to_vec())?;
    let cumulative = template.cumulative().to_vec();
    let q = spec.quantile_map();
    let g = ValueScaled::new(&q, eps);
    let error = cumulative.windows(2).map(|w| ell_star(&g, IntervalX { lower: w[0], upper: w[1] })).fold(0.0, f64::max);
    let xs = place_atoms(spec, eps, &cumulative, error);
    let measure = AtomicMeasure::from_cumulative(xs, &cumulative[1..])?;
    let stats = SolverStats { bisection_iterations: 0, feasibility_calls: p.len() as u32 };
    finish(spec, measure, error, eps, stats)
}

/// Best approximation with weights `u_n = (1/n, …, 1/n)`.
pub fn best_uniform(spec: &DistributionSpec, n: usize, eps: f64) -> Result<ApproxResult> {
    check_n(n)?;
    let weights = vec![1.0 / n as f64; n];
    best_locations_given_weights(spec, &weights, eps)
}

/// One greedy step: the largest `P ≤ 1` with `ℓ*_{εg,[prev,P]} ≤ ell`.
///
/// `ℓ*_{εg,[a,P]} ≤ ℓ` iff `g₋(P − ℓ) ≤ g(a + ℓ) + 2ℓ/ε`, and by the
/// Galois property of the upper inverse this is `P ≤ F(g(a + ℓ) + 2ℓ/ε) + ℓ`.
pub fn greedy_step(spec: &DistributionSpec, eps: f64, prev: f64, ell: f64) -> f64 {
    let reach = spec.quantile(prev + ell) + 2.0 * ell / eps;
    (spec.cdf(reach) + ell).min(1.0)
}

/// Greedy cover of `[0, 1]` by at most `n` cells of cost `≤ ell`; returns
/// `P_1, …, P_n` (the last equals 1 iff `ell` is feasible).
pub fn greedy_levels(spec: &DistributionSpec, n: usize, eps: f64, ell: f64) -> Vec<f64> {
    let mut levels = Vec::with_capacity(n);
    let mut p = 0.0;
    for _ in 0..n {
        p = if p >= 1.0 { 1.0 } else { greedy_step(spec, eps, p, ell) };
        levels.push(p);
    }
    levels
}

/// The same greedy cover with each step found by bisection on `P` against
/// `ℓ*` directly. Slower; kept as an independent check of [`greedy_step`].
pub fn greedy_levels_by_bisection(spec: &DistributionSpec, n: usize, eps: f64, ell: f64) -> Vec<f64> {
    let q = spec.quantile_map();
    let g = ValueScaled::new(&q, eps);
    let mut levels = Vec::with_capacity(n);
    let mut prev = 0.0_f64;
    for _ in 0..n {
        let cost = |p: f64| ell_star(&g, IntervalX { lower: prev, upper: p });
        let next = if cost(1.0) <= ell {
            1.0
        } else {
            // smallest P whose cost exceeds ell is the supremum we want
            bisect::threshold(prev, 1.0, 1e-13, |p| cost(p) > ell).value
        };
        levels.push(next);
        prev = next;
    }
    levels
}

/// Best `n`-atom approximation over all locations and weights.
///
/// The optimal error is the smallest `ℓ ∈ [0, ½]` for which the greedy cover
/// reaches 1 within `n` cells; feasibility is monotone in `ℓ`.
pub fn best_unconstrained(spec: &DistributionSpec, n: usize, eps: f64) -> Result<ApproxResult> {
    check_eps(eps)?;
    check_n(n)?;
    let mut calls = 0u32;
    let mut feasible = |l: f64| {
        calls += 1;
        greedy_levels(spec, n, eps, l).last().is_some_and(|&p| p >= 1.0)
    };
    if !feasible(0.5) {
        return Err(LevyError::integrity(format!("level 1/2 infeasible for {spec:?}, n = {n}")));
    }
    let t = bisect::threshold(0.0, 0.5, BISECTION_TOL, &mut feasible);
    let error = t.value;
    let mut levels = greedy_levels(spec, n, eps, error);
    *levels.last_mut().expect("n ≥ 1") = 1.0;
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    cumulative.extend_from_slice(&levels);
    let xs = place_atoms(spec, eps, &cumulative, error);
    let measure = AtomicMeasure::from_cumulative(xs, &levels)?;
    let stats = SolverStats { bisection_iterations: t.evaluations, feasibility_calls: calls };
    finish(spec, measure, error, eps, stats)
}

/// A named solver strategy.
pub trait Quantizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn solve(&self, spec: &DistributionSpec, n: usize, eps: f64) -> Result<ApproxResult>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UniformQuantizer;

impl Quantizer for UniformQuantizer {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn description(&self) -> &'static str {
        "best approximation with equal weights 1/n"
    }

    fn solve(&self, spec: &DistributionSpec, n: usize, eps: f64) -> Result<ApproxResult> {
        best_uniform(spec, n, eps)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BestQuantizer;

impl Quantizer for BestQuantizer {
    fn name(&self) -> &'static str {
        "best"
    }

    fn description(&self) -> &'static str {
        "best approximation over all locations and weights"
    }

    fn solve(&self, spec: &DistributionSpec, n: usize, eps: f64) -> Result<ApproxResult> {
        best_unconstrained(spec, n, eps)
    }
}

/// Solvers selectable by name.
#[derive(Clone, Default)]
pub struct QuantizerRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn Quantizer>>,
}

impl QuantizerRegistry {
    pub fn builtin() -> Self {
        let mut r = Self::default();
        r.register(Arc::new(UniformQuantizer));
        r.register(Arc::new(BestQuantizer));
        r
    }

    pub fn register(&mut self, q: Arc<dyn Quantizer>) {
        self.solvers.insert(q.name(), q);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Quantizer>> {
        self.solvers.get(name).cloned().ok_or_else(|| {
            LevyError::unsupported(format!("unknown solver {name:?}; known: {}", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }
}
