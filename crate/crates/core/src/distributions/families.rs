use std::sync::Arc;

use num_rational::Rational64;

use super::{AcPiece, Family, InverseAtom, InverseSingular, SecondOrderBest};
use crate::error::{LevyError, Result};
use crate::monotone::{MonotoneMap, StepMap};

/// A probability mass, optionally known exactly as a rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mass {
    pub value: f64,
    pub exact: Option<Rational64>,
}

impl Mass {
    pub fn from_f64(value: f64) -> Self {
        Mass { value, exact: None }
    }

    pub fn exact(num: i64, den: i64) -> Self {
        let r = Rational64::new(num, den);
        Mass { value: ratio_to_f64(r), exact: Some(r) }
    }

    pub fn from_ratio(r: Rational64) -> Self {
        Mass { value: ratio_to_f64(r), exact: Some(r) }
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LevyError::invalid(msg()))
    }
}

/// `exp(a)`: `F(x) = 1 − e^{−ax}` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    a: f64,
}

impl Exponential {
    pub fn new(a: f64) -> Result<Self> {
        check(a > 0.0 && a.is_finite(), || format!("exponential rate must be positive, got {a}"))?;
        Ok(Exponential { a })
    }

    pub fn rate(&self) -> f64 {
        self.a
    }
}

impl Family for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a)]
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.a * x).exp_m1()
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        -(-t).ln_1p() / self.a
    }

    fn ac_pieces(&self) -> Vec<AcPiece> {
        vec![AcPiece { lo: 0.0, hi: f64::INFINITY, tail_exponent: f64::INFINITY }]
    }

    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.a * (-self.a * x).exp()
        }
    }

    fn inverse_density(&self, t: f64) -> f64 {
        1.0 / (self.a * (1.0 - t))
    }

    fn inverse_density_sup(&self) -> f64 {
        f64::INFINITY
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        Ok(InverseSingular::default())
    }

    fn quantile_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        let s = 1.0 - t;
        Some([1.0 / (self.a * s), 1.0 / (self.a * s * s), 2.0 / (self.a * s * s * s)])
    }

    fn second_order_best(&self) -> Option<SecondOrderBest> {
        Some(SecondOrderBest::Finite)
    }

    fn second_order_uniform_eligible(&self) -> bool {
        true
    }

    fn dilated(&self, factor: f64) -> Option<Arc<dyn Family>> {
        Some(Arc::new(Exponential { a: self.a / factor }))
    }
}

/// Benford's law on `[1, b]`: `F(x) = log x / log b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benford {
    b: f64,
    ln_b: f64,
}

impl Benford {
    pub fn new(b: f64) -> Result<Self> {
        check(b > 1.0 && b.is_finite(), || format!("Benford base must exceed 1, got {b}"))?;
        Ok(Benford { b, ln_b: b.ln() })
    }

    pub fn base(&self) -> f64 {
        self.b
    }
}

impl Family for Benford {
    fn name(&self) -> &'static str {
        "benford"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("b", self.b)]
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            0.0
        } else if x >= self.b {
            1.0
        } else {
            x.ln() / self.ln_b
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        if t >= 1.0 {
            self.b
        } else {
            (t * self.ln_b).exp()
        }
    }

    fn ac_pieces(&self) -> Vec<AcPiece> {
        vec![AcPiece { lo: 1.0, hi: self.b, tail_exponent: f64::INFINITY }]
    }

    fn density(&self, x: f64) -> f64 {
        if x < 1.0 || x > self.b {
            0.0
        } else {
            1.0 / (x * self.ln_b)
        }
    }

    fn inverse_density(&self, t: f64) -> f64 {
        self.ln_b * (t * self.ln_b).exp()
    }

    fn inverse_density_sup(&self) -> f64 {
        self.b * self.ln_b
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        Ok(InverseSingular::default())
    }

    fn quantile_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        let g = (t * self.ln_b).exp();
        let l = self.ln_b;
        Some([l * g, l * l * g, l * l * l * g])
    }

    fn second_order_best(&self) -> Option<SecondOrderBest> {
        Some(SecondOrderBest::Finite)
    }

    fn second_order_uniform_eligible(&self) -> bool {
        true
    }
}

/// Pareto law with tail index `α`: `F(x) = 1 − x^{−α}` on `[1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pareto {
    alpha: f64,
}

impl Pareto {
    pub fn new(alpha: f64) -> Result<Self> {
        check(alpha > 0.0 && alpha.is_finite(), || format!("Pareto index must be positive, got {alpha}"))?;
        Ok(Pareto { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Family for Pareto {
    fn name(&self) -> &'static str {
        "pareto"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("alpha", self.alpha)]
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            0.0
        } else {
            -(-self.alpha * x.ln()).exp_m1()
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        (-(-t).ln_1p() / self.alpha).exp()
    }

    fn ac_pieces(&self) -> Vec<AcPiece> {
        vec![AcPiece { lo: 1.0, hi: f64::INFINITY, tail_exponent: self.alpha + 1.0 }]
    }

    fn density(&self, x: f64) -> f64 {
        if x < 1.0 {
            0.0
        } else {
            self.alpha * x.powf(-self.alpha - 1.0)
        }
    }

    fn inverse_density(&self, t: f64) -> f64 {
        let r = 1.0 / self.alpha;
        r * (1.0 - t).powf(-r - 1.0)
    }

    fn inverse_density_sup(&self) -> f64 {
        f64::INFINITY
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        Ok(InverseSingular::default())
    }

    fn quantile_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        let r = 1.0 / self.alpha;
        let s = 1.0 - t;
        let g1 = r * s.powf(-r - 1.0);
        Some([g1, g1 * (r + 1.0) / s, g1 * (r + 1.0) * (r + 2.0) / (s * s)])
    }

    fn second_order_best(&self) -> Option<SecondOrderBest> {
        Some(SecondOrderBest::Finite)
    }

    fn second_order_uniform_eligible(&self) -> bool {
        true
    }
}

/// Uniform law on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    a: f64,
    b: f64,
}

impl Uniform {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check(a < b && a.is_finite() && b.is_finite(), || format!("uniform needs a < b, got ({a}, {b})"))?;
        Ok(Uniform { a, b })
    }
}

impl Family for Uniform {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a), ("b", self.b)]
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.a {
            0.0
        } else if x >= self.b {
            1.0
        } else {
            (x - self.a) / (self.b - self.a)
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        if t >= 1.0 {
            self.b
        } else {
            self.a + (self.b - self.a) * t
        }
    }

    fn ac_pieces(&self) -> Vec<AcPiece> {
        vec![AcPiece { lo: self.a, hi: self.b, tail_exponent: f64::INFINITY }]
    }

    fn density(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            0.0
        } else {
            1.0 / (self.b - self.a)
        }
    }

    fn inverse_density(&self, _t: f64) -> f64 {
        self.b - self.a
    }

    fn inverse_density_sup(&self) -> f64 {
        self.b - self.a
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        Ok(InverseSingular::default())
    }

    fn quantile_derivatives(&self, _t: f64) -> Option<[f64; 3]> {
        Some([self.b - self.a, 0.0, 0.0])
    }

    fn second_order_best(&self) -> Option<SecondOrderBest> {
        Some(SecondOrderBest::Finite)
    }

    fn second_order_uniform_eligible(&self) -> bool {
        true
    }

    fn dilated(&self, factor: f64) -> Option<Arc<dyn Family>> {
        Some(Arc::new(Uniform { a: self.a * factor, b: self.b * factor }))
    }
}

/// Finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    locations: Vec<f64>,
    masses: Vec<f64>,
    /// Exact cumulative levels `C_1, …, C_{n−1}` when every mass is rational.
    exact_levels: Option<Vec<Rational64>>,
    cdf: StepMap,
    quantile: StepMap,
}

impl Empirical {
    /// Relative tolerance on the total mass before normalisation is refused.
    pub const SUM_TOL: f64 = 1e-9;

    /// Builds from `(location, mass)` pairs in any order. Equal locations
    /// are merged; masses must be non-negative and sum to one within
    /// [`Self::SUM_TOL`], after which they are normalised.
    pub fn new(mut atoms: Vec<(f64, Mass)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(LevyError::invalid("empirical distribution needs at least one atom"));
        }
        for (x, m) in &atoms {
            check(x.is_finite(), || format!("atom location must be finite, got {x}"))?;
            check(m.value >= 0.0 && m.value.is_finite(), || {
                format!("atom mass must be non-negative, got {}", m.value)
            })?;
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, Mass)> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            match merged.last_mut() {
                Some((y, acc)) if *y == x => {
                    acc.value += m.value;
                    acc.exact = match (acc.exact, m.exact) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                }
                _ => merged.push((x, m)),
            }
        }
        let total: f64 = merged.iter().map(|(_, m)| m.value).sum();
        check((total - 1.0).abs() <= Self::SUM_TOL, || format!("atom masses sum to {total}, expected 1"))?;
        let exact_total: Option<Rational64> =
            merged.iter().map(|(_, m)| m.exact).try_fold(Rational64::from_integer(0), |acc, m| m.map(|m| acc + m));

        let locations: Vec<f64> = merged.iter().map(|(x, _)| *x).collect();
        let masses: Vec<f64> = merged.iter().map(|(_, m)| m.value / total).collect();
        let mut exact_levels = None;
        let mut cumulative = Vec::with_capacity(masses.len() + 1);
        cumulative.push(0.0);
        if let Some(sum) = exact_total.filter(|s| *s > Rational64::from_integer(0)) {
            let mut acc = Rational64::from_integer(0);
            let mut levels = Vec::with_capacity(masses.len());
            for (_, m) in &merged {
                acc += m.exact.expect("checked above") / sum;
                levels.push(acc);
                cumulative.push(ratio_to_f64(acc));
            }
            levels.pop();
            exact_levels = Some(levels);
        } else {
            let mut acc = 0.0;
            for m in &masses {
                acc += m;
                cumulative.push(acc.min(1.0));
            }
        }
        *cumulative.last_mut().expect("non-empty") = 1.0;
        let cdf = StepMap::cdf_of_atoms(&locations, &cumulative)?;
        let quantile = cdf.inverse();
        Ok(Empirical { locations, masses, exact_levels, cdf, quantile })
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

impl Family for Empirical {
    fn name(&self) -> &'static str {
        if self.locations.len() == 1 {
            "point_mass"
        } else {
            "empirical"
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        if self.locations.len() == 1 {
            vec![("x", self.locations[0])]
        } else {
            Vec::new()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        self.cdf.eval(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf.eval_left(x)
    }

    fn quantile(&self, t: f64) -> f64 {
        self.quantile.eval(t)
    }

    fn quantile_left(&self, t: f64) -> f64 {
        self.quantile.eval_left(t)
    }

    fn step_cdf(&self) -> Option<StepMap> {
        Some(self.cdf.clone())
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        Some(self.locations.iter().copied().zip(self.masses.iter().copied()).collect())
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        // gaps of the support sit at the cumulative levels of the step CDF
        let levels = self.cdf.values();
        let breaks = self.cdf.breaks();
        let mut atoms = Vec::new();
        for k in 1..breaks.len() {
            let location = levels[k];
            let exact =
                self.exact_levels.as_ref().and_then(|ls| ls.iter().copied().find(|r| ratio_to_f64(*r) == location));
            atoms.push(InverseAtom { location, exact, mass: breaks[k] - breaks[k - 1] });
        }
        Ok(InverseSingular { atoms, singular_continuous_mass: 0.0, truncated: false })
    }

    fn dilated(&self, factor: f64) -> Option<Arc<dyn Family>> {
        let atoms: Vec<(f64, Mass)> = self
            .locations
            .iter()
            .zip(&self.masses)
            .enumerate()
            .map(|(k, (x, m))| {
                let exact = self.exact_levels.as_ref().map(|ls| {
                    let hi = ls.get(k).copied().unwrap_or(Rational64::from_integer(1));
                    let lo = if k == 0 { Rational64::from_integer(0) } else { ls[k - 1] };
                    hi - lo
                });
                (x * factor, Mass { value: *m, exact })
            })
            .collect();
        Empirical::new(atoms).ok().map(|e| Arc::new(e) as Arc<dyn Family>)
    }
}

/// `a·δ_{−1} + (1 − a)·δ_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPoint {
    a: Mass,
    inner: Empirical,
}

impl TwoPoint {
    pub fn new(a: Mass) -> Result<Self> {
        check(a.value > 0.0 && a.value < 1.0, || format!("two-point weight must lie in (0, 1), got {}", a.value))?;
        let rest = Mass { value: 1.0 - a.value, exact: a.exact.map(|r| Rational64::from_integer(1) - r) };
        Ok(TwoPoint { a, inner: Empirical::new(vec![(-1.0, a), (1.0, rest)])? })
    }
}

impl Family for TwoPoint {
    fn name(&self) -> &'static str {
        "two_point"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a.value)]
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.inner.cdf_left(x)
    }

    fn quantile(&self, t: f64) -> f64 {
        self.inner.quantile(t)
    }

    fn quantile_left(&self, t: f64) -> f64 {
        self.inner.quantile_left(t)
    }

    fn step_cdf(&self) -> Option<StepMap> {
        self.inner.step_cdf()
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        self.inner.atoms()
    }

    fn inverse_singular(&self, m_max: u32) -> Result<InverseSingular> {
        self.inner.inverse_singular(m_max)
    }
}

/// `a·δ_{−1} + (1 − a)·U[1, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomUniformMixture {
    a: Mass,
    b: f64,
}

impl AtomUniformMixture {
    pub fn new(a: Mass, b: f64) -> Result<Self> {
        check(a.value >= 0.0 && a.value < 1.0, || format!("mixture weight must lie in [0, 1), got {}", a.value))?;
        check(b >= 1.0 && b.is_finite(), || format!("mixture upper end must be at least 1, got {b}"))?;
        Ok(AtomUniformMixture { a, b })
    }

    fn weight(&self) -> f64 {
        self.a.value
    }
}

impl Family for AtomUniformMixture {
    fn name(&self) -> &'static str {
        "atom_uniform_mixture"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a.value), ("b", self.b)]
    }

    fn cdf(&self, x: f64) -> f64 {
        let a = self.weight();
        if x < -1.0 {
            0.0
        } else if x < 1.0 {
            a
        } else if x >= self.b {
            1.0
        } else {
            a + (1.0 - a) * (x - 1.0) / (self.b - 1.0)
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        let a = self.weight();
        if x <= -1.0 {
            0.0
        } else if x <= 1.0 {
            a
        } else if x > self.b {
            1.0
        } else {
            a + (1.0 - a) * (x - 1.0) / (self.b - 1.0)
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        let a = self.weight();
        if t < a {
            -1.0
        } else if self.b == 1.0 {
            1.0
        } else {
            1.0 + (self.b - 1.0) * (t - a) / (1.0 - a)
        }
    }

    fn quantile_left(&self, t: f64) -> f64 {
        let a = self.weight();
        if t <= a {
            -1.0
        } else if self.b == 1.0 {
            1.0
        } else {
            1.0 + (self.b - 1.0) * (t - a) / (1.0 - a)
        }
    }

    fn step_cdf(&self) -> Option<StepMap> {
        (self.b == 1.0)
            .then(|| StepMap::cdf_of_atoms(&[-1.0, 1.0], &[0.0, self.weight(), 1.0]).expect("valid two-point CDF"))
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        let a = self.weight();
        let mut atoms = Vec::new();
        if a > 0.0 {
            atoms.push((-1.0, a));
        }
        if self.b == 1.0 {
            atoms.push((1.0, 1.0 - a));
        }
        Some(atoms)
    }

    fn ac_pieces(&self) -> Vec<AcPiece> {
        if self.b > 1.0 {
            vec![AcPiece { lo: 1.0, hi: self.b, tail_exponent: f64::INFINITY }]
        } else {
            Vec::new()
        }
    }

    fn density(&self, x: f64) -> f64 {
        if self.b > 1.0 && (1.0..=self.b).contains(&x) {
            (1.0 - self.weight()) / (self.b - 1.0)
        } else {
            0.0
        }
    }

    fn inverse_density(&self, t: f64) -> f64 {
        if t > self.weight() {
            (self.b - 1.0) / (1.0 - self.weight())
        } else {
            0.0
        }
    }

    fn inverse_density_sup(&self) -> f64 {
        (self.b - 1.0) / (1.0 - self.weight())
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        let mut atoms = Vec::new();
        if self.weight() > 0.0 {
            atoms.push(InverseAtom { location: self.weight(), exact: self.a.exact, mass: 2.0 });
        }
        Ok(InverseSingular { atoms, singular_continuous_mass: 0.0, truncated: false })
    }
}
