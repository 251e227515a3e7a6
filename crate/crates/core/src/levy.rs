//! The auxiliary functions `ℓ_{f,I}`, `ℓ*_{f,I}` and exact ε-Lévy distances
//! between a distribution and a finitely supported measure.

use crate::bisect::{self, BISECTION_TOL};
use crate::distributions::DistributionSpec;
use crate::error::{LevyError, Result};
use crate::monotone::{MonotoneMap, StepMap, ValueScaled};

/// Tolerance for the primal and dual distance formulas to agree.
pub const DUAL_AGREEMENT_TOL: f64 = 1e-9;

/// Tolerance on the total weight of an [`AtomicMeasure`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A closed interval of the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalX {
    pub lower: f64,
    pub upper: f64,
}

impl IntervalX {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(LevyError::invalid(format!("not an interval: [{lower}, {upper}]")));
        }
        Ok(IntervalX { lower, upper })
    }

    pub fn length(&self) -> f64 {
        if self.lower == self.upper {
            0.0
        } else {
            self.upper - self.lower
        }
    }

    /// `f₋(sup I − x) < +∞` and `f(inf I + x) > −∞` for every `x > 0`,
    /// checked at a small positive `x` (both sides are monotone in `x`).
    pub fn admissible_for(&self, f: &dyn MonotoneMap) -> bool {
        let x = 1e-300;
        f.eval_left(self.upper - x) < f64::INFINITY && f.eval(self.lower + x) > f64::NEG_INFINITY
    }
}

/// `ℓ_{f,I}(x) = inf{y ≥ 0 : f₋(sup I − y) − y ≤ x ≤ f(inf I + y) + y}`.
///
/// Both conditions are monotone in `y` and closed from the right, so the
/// infimum is attained and the search returns a feasible point.
pub fn ell(f: &dyn MonotoneMap, interval: IntervalX, x: f64) -> f64 {
    let pred = |y: f64| f.eval_left(interval.upper - y) - y <= x && x <= f.eval(interval.lower + y) + y;
    bisect::threshold_unbounded(BISECTION_TOL, pred).value
}

/// `ℓ*_{f,I} = inf{y ≥ 0 : f₋(sup I − y) − y ≤ f(inf I + y) + y}`.
pub fn ell_star(f: &dyn MonotoneMap, interval: IntervalX) -> f64 {
    let pred = |y: f64| f.eval_left(interval.upper - y) - y <= f.eval(interval.lower + y) + y;
    let half = 0.5 * interval.length();
    let value = if half.is_finite() {
        bisect::threshold(0.0, half, BISECTION_TOL, pred).value
    } else {
        bisect::threshold_unbounded(BISECTION_TOL, pred).value
    };
    debug_assert!(value <= half);
    value
}

/// An `n`-atom probability measure `Σ p_j δ_{x_j}` with sorted locations.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    locations: Vec<f64>,
    weights: Vec<f64>,
    /// `P_0 = 0, P_1, …, P_n = 1`.
    cumulative: Vec<f64>,
}

impl AtomicMeasure {
    /// Locations must be finite and non-decreasing; weights non-negative
    /// with total within [`WEIGHT_SUM_TOL`] of one.
    pub fn new(locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if locations.is_empty() || locations.len() != weights.len() {
            return Err(LevyError::invalid(format!(
                "need n ≥ 1 locations and as many weights, got {} and {}",
                locations.len(),
                weights.len()
            )));
        }
        if let Some(x) = locations.iter().find(|x| !x.is_finite()) {
            return Err(LevyError::invalid(format!("atom location must be finite, got {x}")));
        }
        if locations.windows(2).any(|w| w[0] > w[1]) {
            return Err(LevyError::invalid("atom locations must be sorted"));
        }
        if let Some(p) = weights.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(LevyError::invalid(format!("weights must be non-negative, got {p}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(LevyError::invalid(format!("weights sum to {total}, expected 1")));
        }
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for p in &weights {
            acc += p;
            cumulative.push(acc.min(1.0));
        }
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(AtomicMeasure { locations, weights, cumulative })
    }

    /// From locations and cumulative levels `P_1 ≤ … ≤ P_n = 1`.
    pub fn from_cumulative(locations: Vec<f64>, levels: &[f64]) -> Result<Self> {
        if levels.len() != locations.len() {
            return Err(LevyError::invalid("need one cumulative level per atom"));
        }
        if levels.windows(2).any(|w| w[0] > w[1]) || levels.first().is_some_and(|p| *p < 0.0) {
            return Err(LevyError::invalid("cumulative levels must be non-decreasing in [0, 1]"));
        }
        if (levels[levels.len() - 1] - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(LevyError::invalid("last cumulative level must be 1"));
        }
        let mut cumulative = Vec::with_capacity(levels.len() + 1);
        cumulative.push(0.0);
        cumulative.extend_from_slice(levels);
        *cumulative.last_mut().expect("non-empty") = 1.0;
        let weights = cumulative.windows(2).map(|w| w[1] - w[0]).collect();
        let m = AtomicMeasure { locations, weights, cumulative };
        if m.locations.windows(2).any(|w| w[0] > w[1]) || m.locations.iter().any(|x| !x.is_finite()) {
            return Err(LevyError::invalid("atom locations must be finite and sorted"));
        }
        Ok(m)
    }

    /// `u_n = (1/n, …, 1/n)` on the given locations.
    pub fn uniform(locations: Vec<f64>) -> Result<Self> {
        let n = locations.len();
        let levels: Vec<f64> = (1..=n).map(|j| j as f64 / n as f64).collect();
        Self::from_cumulative(locations, &levels)
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `P_0, …, P_n`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Location `x_j` for `j = 0, …, n+1` with `x_0 = −∞`, `x_{n+1} = +∞`.
    pub fn x(&self, j: usize) -> f64 {
        if j == 0 {
            f64::NEG_INFINITY
        } else if j > self.n() {
            f64::INFINITY
        } else {
            self.locations[j - 1]
        }
    }

    pub fn cdf(&self) -> StepMap {
        StepMap::cdf_of_atoms(&self.locations, &self.cumulative).expect("atomic measure has a valid CDF")
    }

    /// Pushforward under `x ↦ εx`.
    pub fn dilate(&self, eps: f64) -> Self {
        AtomicMeasure {
            locations: self.locations.iter().map(|x| x * eps).collect(),
            weights: self.weights.clone(),
            cumulative: self.cumulative.clone(),
        }
    }
}

/// `ε·max_{j=0..n} ℓ_{F/ε,[x_j,x_{j+1}]}(P_j/ε)`.
pub fn distance_primal(spec: &DistributionSpec, nu: &AtomicMeasure, eps: f64) -> f64 {
    let cdf = spec.cdf_map();
    let f = ValueScaled::new(&cdf, 1.0 / eps);
    (0..=nu.n())
        .map(|j| {
            let interval = IntervalX { lower: nu.x(j), upper: nu.x(j + 1) };
            eps * ell(&f, interval, nu.cumulative[j] / eps)
        })
        .fold(0.0, f64::max)
}

/// `max_{j=1..n} ℓ_{εg,[P_{j−1},P_j]}(εx_j)`.
pub fn distance_dual(spec: &DistributionSpec, nu: &AtomicMeasure, eps: f64) -> f64 {
    let q = spec.quantile_map();
    let g = ValueScaled::new(&q, eps);
    (1..=nu.n())
        .map(|j| {
            let interval = IntervalX { lower: nu.cumulative[j - 1], upper: nu.cumulative[j] };
            ell(&g, interval, eps * nu.x(j))
        })
        .fold(0.0, f64::max)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(LevyError::invalid(format!("ε must be positive and finite, got {eps}")))
    }
}

/// `d_ε(μ, ν)` for atomic `ν`, evaluated through both the CDF and the
/// quantile of `μ`; the two must agree within [`DUAL_AGREEMENT_TOL`].
pub fn distance_to_atomic(spec: &DistributionSpec, nu: &AtomicMeasure, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let primal = distance_primal(spec, nu, eps);
    let dual = distance_dual(spec, nu, eps);
    if (primal - dual).abs() > DUAL_AGREEMENT_TOL {
        return Err(LevyError::integrity(format!(
            "primal distance {primal} and dual distance {dual} disagree for {spec:?}"
        )));
    }
    if primal > 1.0 + DUAL_AGREEMENT_TOL {
        return Err(LevyError::integrity(format!("distance {primal} exceeds 1")));
    }
    Ok(primal.min(1.0))
}

/// Number of uniform grid points added when `G` is not a step map.
pub const GENERAL_GRID_POINTS: usize = 10_000;

/// `d_ε(F, G) = inf{y ≥ 0 : F(t − y/ε) − y ≤ G(t) ≤ F(t + y/ε) + y ∀t}`,
/// straight from the definition.
///
/// For step `G` the test set (jumps of both maps and `±∞`) is exhaustive:
/// between consecutive jumps of `G` the lower condition is tightest at the
/// right end and the upper one at the left end. Otherwise a uniform grid
/// over the spans of both maps is added and the result is approximate.
pub fn distance_general(f: &dyn MonotoneMap, g: &dyn MonotoneMap, eps: f64) -> f64 {
    let mut points = vec![f64::NEG_INFINITY, f64::INFINITY];
    for m in [f, g] {
        if let Some(js) = m.discontinuities() {
            points.extend(js.iter().map(|j| j.location));
        }
    }
    let g_step = g.as_step().is_some();
    if !g_step {
        let spans: Vec<(f64, f64)> = [f.span(), g.span()].into_iter().flatten().collect();
        if let (Some(lo), Some(hi)) = (
            spans.iter().map(|s| s.0).filter(|v| v.is_finite()).reduce(f64::min),
            spans.iter().map(|s| s.1).filter(|v| v.is_finite()).reduce(f64::max),
        ) {
            let k = GENERAL_GRID_POINTS;
            points.extend((0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64));
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let pred = |y: f64| {
        let shift = y / eps;
        points.iter().all(|&t| {
            let lower = f.eval_left(t - shift) - y <= g.eval_left(t);
            let upper = g.eval(t) <= f.eval(t + shift) + y;
            // continuous G also needs the right-hand values checked
            lower && upper && (g_step || f.eval(t - shift) - y <= g.eval(t))
        })
    };
    bisect::threshold_unbounded(BISECTION_TOL, pred).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::FnMap;

    fn iv(a: f64, b: f64) -> IntervalX {
        IntervalX::new(a, b).unwrap()
    }

    #[test]
    fn ell_identity_on_unit_interval() {
        let id = FnMap::identity();
        assert!((ell(&id, iv(0.0, 1.0), 0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ell_of_constant_map_vanishes() {
        let c = FnMap::new(|_| 0.7, None);
        assert_eq!(ell(&c, iv(-3.0, 5.0), 0.7), 0.0);
        assert_eq!(ell_star(&c, iv(-3.0, 5.0)), 0.0);
    }

    #[test]
    fn ell_star_identity_is_quarter_length() {
        let id = FnMap::identity();
        for (a, b) in [(0.0, 1.0), (-2.0, 6.0), (3.0, 3.5)] {
            assert!((ell_star(&id, iv(a, b)) - (b - a) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ell_star_zero_iff_no_increase() {
        let step = StepMap::new(vec![1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(ell_star(&step, iv(1.0, 2.0)), 0.0);
        assert!(ell_star(&step, iv(0.0, 2.0)) > 0.0);
    }

    #[test]
    fn point_mass_matches_itself() {
        let spec = DistributionSpec::point_mass(2.0).unwrap();
        let nu = AtomicMeasure::new(vec![2.0], vec![1.0]).unwrap();
        assert_eq!(distance_to_atomic(&spec, &nu, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn two_point_matches_itself() {
        let spec = DistributionSpec::two_point(crate::Mass::exact(1, 2)).unwrap();
        let nu = AtomicMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(distance_to_atomic(&spec, &nu, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn distance_between_point_masses() {
        // d_1(δ_0, δ_c) = min(c, 1): the tube must bridge the full jump
        for c in [0.0, 0.3, 0.99, 1.0, 1.7, 4.0] {
            let f = StepMap::cdf_of_atoms(&[0.0], &[0.0, 1.0]).unwrap();
            let g = StepMap::cdf_of_atoms(&[c], &[0.0, 1.0]).unwrap();
            let expected = c.min(1.0);
            assert!((distance_general(&f, &g, 1.0) - expected).abs() < 1e-14, "c = {c}");
            let spec = DistributionSpec::point_mass(0.0).unwrap();
            let nu = AtomicMeasure::new(vec![c], vec![1.0]).unwrap();
            let d = distance_to_atomic(&spec, &nu, 1.0).unwrap();
            assert!((d - expected).abs() < 1e-10, "c = {c}: {d}");
        }
    }

    #[test]
    fn atomic_measure_validation() {
        assert!(AtomicMeasure::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(AtomicMeasure::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(AtomicMeasure::new(vec![0.0], vec![f64::NAN]).is_err());
        let m = AtomicMeasure::uniform(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(m.cumulative(), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let nu = AtomicMeasure::new(vec![0.5], vec![1.0]).unwrap();
        assert!(distance_to_atomic(&spec, &nu, 0.0).is_err());
    }
}
