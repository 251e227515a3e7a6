//! Probability measures on the real line and their monotone views.
//!
//! A [`DistributionSpec`] wraps a [`Family`] trait object together with a
//! dilation factor. Families are looked up by name in a [`FamilyRegistry`],
//! so new ones can be added without touching the solvers.

mod cantor;
mod families;
mod normal;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{LevyError, Result};
use crate::monotone::{Jump, MonotoneMap, StepMap};

pub use cantor::{cantor_cdf, cantor_quantile, cantor_quantile_left, Cantor, InverseCantor};
pub use families::{AtomUniformMixture, Benford, Empirical, Exponential, Mass, Pareto, TwoPoint, Uniform};
pub use normal::{inverse_phi, phi, Normal};
pub use parse::{empirical_from_csv, parse_mass, parse_rational, FamilyEntry, FamilyRegistry};

/// Default generation depth when enumerating inverse-measure atoms of
/// self-similar families.
pub const DEFAULT_M_MAX: u32 = 20;

/// A smooth piece of the absolutely continuous part of `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcPiece {
    pub lo: f64,
    pub hi: f64,
    /// Polynomial decay exponent `p` of the density (`f(x) ~ |x|^{-p}`) on
    /// an infinite end; `f64::INFINITY` for faster than polynomial decay.
    pub tail_exponent: f64,
}

/// Whether the second-order correction for best approximations is finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondOrderBest {
    Finite,
    NegativeInfinite,
}

/// One probability distribution family.
///
/// `cdf` and `cdf_left` must be total on the extended reals. `quantile` is
/// only called on `[0, 1)` and `quantile_left` only on `(0, 1]`; the
/// conventions outside are applied by [`DistributionSpec`].
pub trait Family: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Parameters in registry order, for display and serialization.
    fn params(&self) -> Vec<(&'static str, f64)>;

    fn cdf(&self, x: f64) -> f64;

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// `sup{y : F(y) ≤ t}` for `t ∈ [0, 1)`.
    fn quantile(&self, t: f64) -> f64;

    /// `inf{y : F(y) ≥ t}` for `t ∈ (0, 1]`.
    fn quantile_left(&self, t: f64) -> f64 {
        self.quantile(t)
    }

    /// Exact step representation of the CDF, for purely atomic families
    /// with finitely many atoms.
    fn step_cdf(&self) -> Option<StepMap> {
        None
    }

    /// Atoms `(location, mass)` of `μ` in increasing order; `None` when
    /// there are infinitely many.
    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        Some(Vec::new())
    }

    /// Smooth pieces of `μ_A`; empty when `μ` has no absolutely continuous
    /// part.
    fn ac_pieces(&self) -> Vec<AcPiece> {
        Vec::new()
    }

    /// Density of `μ_A`.
    fn density(&self, _x: f64) -> f64 {
        0.0
    }

    /// Density `g′` of the absolutely continuous part of `μ⁻¹` on `(0, 1)`.
    fn inverse_density(&self, _t: f64) -> f64 {
        0.0
    }

    /// `ess sup g′` of the absolutely continuous part of `μ⁻¹`; `NaN` when
    /// no closed form is known.
    fn inverse_density_sup(&self) -> f64 {
        if self.ac_pieces().is_empty() {
            0.0
        } else {
            f64::NAN
        }
    }

    /// Atoms of `μ⁻¹` and singular continuous mass.
    fn inverse_singular(&self, m_max: u32) -> Result<InverseSingular>;

    /// `(g′, g″, g‴)` at `t ∈ (0, 1)` for families with a smooth quantile.
    fn quantile_derivatives(&self, _t: f64) -> Option<[f64; 3]> {
        None
    }

    fn second_order_best(&self) -> Option<SecondOrderBest> {
        None
    }

    /// Whether the uniform second-order expansion applies.
    fn second_order_uniform_eligible(&self) -> bool {
        false
    }

    /// The same family pushed forward under `x ↦ factor·x`, when the
    /// family is closed under dilation.
    fn dilated(&self, _factor: f64) -> Option<Arc<dyn Family>> {
        None
    }

    /// Closed-form second-order prediction of `n·d_ε(μ, δ^{u_n})`, for
    /// families where the generic expansion does not apply.
    fn uniform_second_order_override(&self, _eps: f64, _n: usize) -> Option<f64> {
        None
    }

    /// Closed form for `limsup n·d_ε(μ, δ^{u_n})` that overrides the
    /// general formula (self-similar families).
    fn limit_uniform_override(&self) -> Option<f64> {
        None
    }
}

/// Singular part of the inverse measure, before dilation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InverseSingular {
    pub atoms: Vec<InverseAtom>,
    pub singular_continuous_mass: f64,
    /// True when `atoms` is a truncation of an infinite family.
    pub truncated: bool,
}

/// An atom of the inverse measure, at a probability level.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseAtom {
    pub location: f64,
    /// Exact location, when the level is known as a rational.
    pub exact: Option<Rational64>,
    pub mass: f64,
}

/// Lebesgue decomposition of the inverse measure `μ⁻¹ = λ_g`.
#[derive(Clone)]
pub struct InverseMeasure {
    spec: DistributionSpec,
    pub atoms: Vec<InverseAtom>,
    pub singular_continuous_mass: f64,
    pub truncated: bool,
    /// `ess sup` of the absolutely continuous density.
    pub ac_density_sup: f64,
}

impl InverseMeasure {
    /// `d(μ⁻¹)_A/dλ` at `t ∈ (0, 1)`.
    pub fn ac_density(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        self.spec.scale * self.spec.family.inverse_density(t)
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

impl fmt::Debug for InverseMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InverseMeasure")
            .field("spec", &self.spec)
            .field("atoms", &self.atoms)
            .field("singular_continuous_mass", &self.singular_continuous_mass)
            .field("ac_density_sup", &self.ac_density_sup)
            .finish()
    }
}

/// A probability measure: a family pushed forward under `x ↦ scale·x`.
#[derive(Clone)]
pub struct DistributionSpec {
    family: Arc<dyn Family>,
    scale: f64,
}

impl fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 1.0 {
            write!(f, "{}", self.label())
        } else {
            write!(f, "{} dilated by {}", self.label(), self.scale)
        }
    }
}

impl DistributionSpec {
    pub fn new(family: Arc<dyn Family>) -> Self {
        DistributionSpec { family, scale: 1.0 }
    }

    pub fn from_family(family: impl Family + 'static) -> Self {
        Self::new(Arc::new(family))
    }

    pub fn exponential(a: f64) -> Result<Self> {
        Ok(Self::from_family(Exponential::new(a)?))
    }

    pub fn benford(b: f64) -> Result<Self> {
        Ok(Self::from_family(Benford::new(b)?))
    }

    pub fn pareto(alpha: f64) -> Result<Self> {
        Ok(Self::from_family(Pareto::new(alpha)?))
    }

    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        Ok(Self::from_family(Normal::new(mean, variance)?))
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Ok(Self::from_family(Uniform::new(a, b)?))
    }

    pub fn two_point(a: Mass) -> Result<Self> {
        Ok(Self::from_family(TwoPoint::new(a)?))
    }

    pub fn atom_uniform_mixture(a: Mass, b: f64) -> Result<Self> {
        Ok(Self::from_family(AtomUniformMixture::new(a, b)?))
    }

    pub fn cantor() -> Self {
        Self::from_family(Cantor)
    }

    pub fn inverse_cantor() -> Self {
        Self::from_family(InverseCantor)
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Ok(Self::from_family(Empirical::new(vec![(x, Mass::exact(1, 1))])?))
    }

    pub fn empirical(atoms: Vec<(f64, Mass)>) -> Result<Self> {
        Ok(Self::from_family(Empirical::new(atoms)?))
    }

    pub fn family(&self) -> &dyn Family {
        self.family.as_ref()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Human-readable `name(p1,p2)` label.
    pub fn label(&self) -> String {
        let params = self.family.params();
        if params.is_empty() {
            self.family.name().to_string()
        } else {
            let inner: Vec<String> = params.iter().map(|(_, v)| format!("{v}")).collect();
            format!("{}({})", self.family.name(), inner.join(","))
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.family.cdf(x / self.scale)
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        self.family.cdf_left(x / self.scale)
    }

    /// Upper quantile `g(t) = sup{y : F(y) ≤ t}`, with `g(t) = −∞` for
    /// `t < 0` and `g(t) = +∞` for `t ≥ 1`.
    pub fn quantile(&self, t: f64) -> f64 {
        if t < 0.0 {
            f64::NEG_INFINITY
        } else if t >= 1.0 || t.is_nan() {
            f64::INFINITY
        } else {
            self.scale * self.family.quantile(t)
        }
    }

    /// Left limit `g₋(t)`, with `g₋(t) = −∞` for `t ≤ 0` and `+∞` for
    /// `t > 1`.
    pub fn quantile_left(&self, t: f64) -> f64 {
        if t <= 0.0 {
            f64::NEG_INFINITY
        } else if t > 1.0 || t.is_nan() {
            f64::INFINITY
        } else {
            self.scale * self.family.quantile_left(t)
        }
    }

    /// Pushforward under `x ↦ εx`.
    pub fn dilate(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(LevyError::invalid(format!("dilation factor must be positive, got {eps}")));
        }
        let total = self.scale * eps;
        if let Some(family) = self.family.dilated(total) {
            return Ok(DistributionSpec { family, scale: 1.0 });
        }
        Ok(DistributionSpec { family: self.family.clone(), scale: total })
    }

    pub fn step_cdf(&self) -> Option<StepMap> {
        let step = self.family.step_cdf()?;
        if self.scale == 1.0 {
            return Some(step);
        }
        let breaks = step.breaks().iter().map(|b| b * self.scale).collect();
        StepMap::new(breaks, step.values().to_vec()).ok()
    }

    pub fn is_atomic_step(&self) -> bool {
        self.family.step_cdf().is_some()
    }

    pub fn has_ac_part(&self) -> bool {
        !self.family.ac_pieces().is_empty()
    }

    pub fn ac_pieces(&self) -> Vec<AcPiece> {
        self.family
            .ac_pieces()
            .into_iter()
            .map(|p| AcPiece { lo: p.lo * self.scale, hi: p.hi * self.scale, tail_exponent: p.tail_exponent })
            .collect()
    }

    /// Density of the absolutely continuous part of `μ`.
    pub fn density(&self, x: f64) -> f64 {
        self.family.density(x / self.scale) / self.scale
    }

    /// `(g′, g″, g‴)` at `t`.
    pub fn quantile_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        self.family.quantile_derivatives(t).map(|d| [d[0] * self.scale, d[1] * self.scale, d[2] * self.scale])
    }

    pub fn inverse_measure(&self, m_max: u32) -> Result<InverseMeasure> {
        let s = self.family.inverse_singular(m_max)?;
        let atoms = s.atoms.into_iter().map(|a| InverseAtom { mass: a.mass * self.scale, ..a }).collect();
        Ok(InverseMeasure {
            spec: self.clone(),
            atoms,
            singular_continuous_mass: s.singular_continuous_mass * self.scale,
            truncated: s.truncated,
            ac_density_sup: self.family.inverse_density_sup() * self.scale,
        })
    }

    /// CDF as a monotone map.
    pub fn cdf_map(&self) -> CdfMap<'_> {
        CdfMap(self)
    }

    /// Upper quantile as a monotone map.
    pub fn quantile_map(&self) -> QuantileMap<'_> {
        QuantileMap(self)
    }
}

/// `F_μ` as a [`MonotoneMap`].
#[derive(Clone, Copy)]
pub struct CdfMap<'a>(&'a DistributionSpec);

impl MonotoneMap for CdfMap<'_> {
    fn eval(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }

    fn eval_left(&self, x: f64) -> f64 {
        self.0.cdf_left(x)
    }

    fn limits(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn discontinuities(&self) -> Option<Vec<Jump>> {
        if let Some(step) = self.0.step_cdf() {
            return step.discontinuities();
        }
        let scale = self.0.scale;
        let atoms = self.0.family.atoms()?;
        Some(
            atoms
                .into_iter()
                .map(|(x, _)| {
                    let location = x * scale;
                    Jump { location, left: self.0.cdf_left(location), right: self.0.cdf(location) }
                })
                .collect(),
        )
    }

    fn as_step(&self) -> Option<StepMap> {
        self.0.step_cdf()
    }

    fn span(&self) -> Option<(f64, f64)> {
        let lo = self.0.quantile(1e-12);
        let hi = self.0.quantile_left(1.0 - 1e-12);
        Some((lo, hi))
    }
}

/// `F_μ⁻¹` as a [`MonotoneMap`].
#[derive(Clone, Copy)]
pub struct QuantileMap<'a>(&'a DistributionSpec);

impl MonotoneMap for QuantileMap<'_> {
    fn eval(&self, t: f64) -> f64 {
        self.0.quantile(t)
    }

    fn eval_left(&self, t: f64) -> f64 {
        self.0.quantile_left(t)
    }

    fn limits(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn as_step(&self) -> Option<StepMap> {
        self.0.step_cdf().map(|s| s.inverse())
    }

    fn discontinuities(&self) -> Option<Vec<Jump>> {
        self.as_step().and_then(|s| s.discontinuities())
    }

    fn span(&self) -> Option<(f64, f64)> {
        Some((0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cdf_examples() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(e.cdf(0.0), 0.0);
        assert!(close(e.cdf_left(1.0), 1.0 - (-1.0f64).exp(), 1e-15));
        let p = DistributionSpec::pareto(1.0).unwrap();
        assert!(close(p.cdf(2.0), 0.5, 1e-15));
        let t = DistributionSpec::two_point(Mass::from_f64(0.3)).unwrap();
        assert!(close(t.cdf(0.0), 0.3, 1e-15));
        assert!(close(t.cdf_left(1.0), 0.3, 1e-15));
        assert_eq!(t.cdf_left(1.5), 1.0);
    }

    #[test]
    fn quantile_examples() {
        let b = DistributionSpec::benford(10.0).unwrap();
        assert!(close(b.quantile(0.5), 10f64.sqrt(), 1e-14));
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.quantile(0.25), 0.25);
        let t = DistributionSpec::two_point(Mass::from_f64(0.3)).unwrap();
        assert_eq!(t.quantile(0.3), 1.0);
        assert_eq!(t.quantile_left(0.3), -1.0);
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert!(close(e.quantile(0.5), std::f64::consts::LN_2, 1e-15));
        assert_eq!(e.quantile_left(0.0), f64::NEG_INFINITY);
        assert_eq!(e.quantile(1.0), f64::INFINITY);
        assert_eq!(e.quantile(0.0), 0.0);
    }

    #[test]
    fn dilation_rewrites_closed_families() {
        let e = DistributionSpec::exponential(2.0).unwrap().dilate(4.0).unwrap();
        assert_eq!(e.family().name(), "exponential");
        assert_eq!(e.family().params(), vec![("a", 0.5)]);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap().dilate(2.0).unwrap();
        assert_eq!(u.family().params(), vec![("a", 0.0), ("b", 2.0)]);
        assert!(DistributionSpec::cantor().dilate(0.0).is_err());
        assert!(DistributionSpec::cantor().dilate(-1.0).is_err());
    }

    #[test]
    fn dilation_pushes_forward() {
        let p = DistributionSpec::pareto(1.5).unwrap();
        let d = p.dilate(3.0).unwrap();
        for x in [1.0, 1.7, 4.0, 30.0] {
            assert!(close(d.cdf(3.0 * x), p.cdf(x), 1e-15));
        }
        let back = d.dilate(1.0 / 3.0).unwrap();
        for x in [1.2, 2.0, 9.0] {
            assert!(close(back.cdf(x), p.cdf(x), 1e-12));
        }
    }

    #[test]
    fn inverse_measure_of_mixture() {
        let m = DistributionSpec::atom_uniform_mixture(Mass::exact(1, 3), 4.0).unwrap();
        let im = m.inverse_measure(DEFAULT_M_MAX).unwrap();
        assert_eq!(im.atoms.len(), 1);
        assert_eq!(im.atoms[0].exact, Some(Rational64::new(1, 3)));
        assert_eq!(im.atoms[0].mass, 2.0);
        assert!(close(im.ac_density(0.5), 4.5, 1e-14));
        assert_eq!(im.ac_density(0.2), 0.0);
        assert!(close(im.ac_density_sup, 4.5, 1e-14));
    }

    #[test]
    fn inverse_measure_of_exponential() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let im = e.inverse_measure(DEFAULT_M_MAX).unwrap();
        assert!(im.atoms.is_empty());
        for t in [0.1, 0.5, 0.9] {
            assert!(close(im.ac_density(t), 1.0 / (1.0 - t), 1e-12));
        }
        assert_eq!(im.ac_density_sup, f64::INFINITY);
    }

    #[test]
    fn inverse_measure_of_cantor_has_dyadic_atoms() {
        let c = DistributionSpec::cantor();
        let im = c.inverse_measure(3).unwrap();
        let levels: Vec<(f64, f64)> = im.atoms.iter().map(|a| (a.location, a.mass)).collect();
        assert_eq!(levels.len(), 1 + 2 + 4);
        assert!(levels.contains(&(0.5, 1.0 / 3.0)));
        assert!(levels.contains(&(0.25, 1.0 / 9.0)));
        assert!(levels.contains(&(0.875, 1.0 / 27.0)));
        let ic = DistributionSpec::inverse_cantor().inverse_measure(3).unwrap();
        assert!(ic.atoms.is_empty());
        assert_eq!(ic.singular_continuous_mass, 1.0);
    }
}
