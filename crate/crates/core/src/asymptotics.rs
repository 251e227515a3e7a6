//! Limits of `n·d_ε(μ, ·)` as `n → ∞`, their second-order refinements and
//! the asymptotic point density of best approximations.

use std::sync::OnceLock;

use num_rational::Rational64;
use serde::Serialize;

use crate::distributions::{DistributionSpec, SecondOrderBest, DEFAULT_M_MAX};
use crate::error::{LevyError, Result};
use crate::quadrature::{integrate, integrate_range};

/// Absolute tolerance of every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-12;

/// Largest admissible gap between the primal and dual best limits.
pub const PRIMAL_DUAL_TOL: f64 = 1e-8;

/// Sample count for the essential supremum when no closed form is known.
pub const FALLBACK_SAMPLES: usize = 100_000;

const POLYLOG_MAX_TERMS: usize = 100_000;
const POLYLOG_TERM_TOL: f64 = 1e-16;
const VALUE_SET_TOL: f64 = 1e-12;

/// `Ω(x) = x/(2 + 2|x|)`, with `Ω(±∞) = ±½`.
pub fn omega(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.5
    } else if x == f64::NEG_INFINITY {
        -0.5
    } else {
        x / (2.0 + 2.0 * x.abs())
    }
}

/// `ι(q) = 2·min{k ≥ 0 : (2k+1)q ∈ ℤ}`; `None` stands for `+∞`.
///
/// With `q = p/d` in lowest terms, `(2k+1)p/d ∈ ℤ` iff `d | 2k+1`, which
/// has a solution iff `d` is odd, the least being `2k+1 = d`.
pub fn iota(q: Rational64) -> Option<u64> {
    let d = q.denom().unsigned_abs();
    if d.is_multiple_of(2) {
        None
    } else {
        Some(d - 1)
    }
}

/// `Ω(ι(q))`, equal to `limsup_n dist(nq, ℤ)`.
pub fn omega_iota(q: Rational64) -> f64 {
    match iota(q) {
        None => 0.5,
        Some(k) => omega(k as f64),
    }
}

/// Whether `v = Ω(2m)` for some `m ∈ ℕ ∪ {∞}`, i.e. `v ∈ {⅓, ⅖, 3/7, …, ½}`.
pub fn in_even_omega_set(v: f64) -> bool {
    if (v - 0.5).abs() <= VALUE_SET_TOL {
        return true;
    }
    if !(v > 0.0 && v < 0.5) {
        return false;
    }
    // Ω(2m) = m/(2m + 1)
    let m = (v / (1.0 - 2.0 * v)).round();
    m >= 1.0 && (omega(2.0 * m) - v).abs() <= VALUE_SET_TOL
}

/// The dichotomy for best uniform approximations: a limsup below ⅓ comes
/// with convergence, and otherwise the sequence converges (its limsup equals
/// the liminf bound from the absolutely continuous part) or the limsup is
/// `Ω(2m)` for some `m`.
pub fn uniform_value_set_admissible(limsup: f64, liminf_bound: f64) -> bool {
    limsup < 1.0 / 3.0 - VALUE_SET_TOL || (limsup - liminf_bound).abs() <= VALUE_SET_TOL || in_even_omega_set(limsup)
}

/// `Li_{1/2}(z) = Σ_{k≥1} z^k/√k` for `|z| < 1`.
pub fn polylog_half(z: f64) -> Result<f64> {
    if z.is_nan() || z.abs() >= 1.0 {
        return Err(LevyError::invalid(format!("Li_1/2 needs |z| < 1, got {z}")));
    }
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..=POLYLOG_MAX_TERMS {
        power *= z;
        let term = power / (k as f64).sqrt();
        sum += term;
        if term.abs() < POLYLOG_TERM_TOL {
            return Ok(sum);
        }
    }
    Err(LevyError::integrity(format!("Li_1/2({z}) did not converge in {POLYLOG_MAX_TERMS} terms")))
}

/// `lim n·d_ε(μ, δ^{•,n})` for `μ = N(m, σ²)`:
/// `−ε√(πσ²/2)·Li_{1/2}(−1/(ε√(2πσ²)))`.
pub fn normal_best_limit(variance: f64, eps: f64) -> Result<f64> {
    let z = -1.0 / (eps * (2.0 * std::f64::consts::PI * variance).sqrt());
    Ok(-eps * (std::f64::consts::PI * variance / 2.0).sqrt() * polylog_half(z)?)
}

mod ext_real {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    UniformLimsup,
    UniformLiminfBound,
    BestLimit,
    SecondOrder,
    PointDensitySample,
}

/// How a number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Series,
    /// Sampled on a grid; an approximation without a guaranteed bound.
    Sampled,
}

/// A named contribution to a reported value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub name: &'static str,
    #[serde(with = "ext_real")]
    pub value: f64,
    pub method: Method,
}

/// One asymptotic quantity with its ingredients and their provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub kind: ReportKind,
    pub spec: String,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(with = "ext_real")]
    pub value: f64,
    pub method: Method,
    pub approximate: bool,
    pub components: Vec<Component>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AsymptoticReport {
    fn new(kind: ReportKind, spec: &DistributionSpec, eps: f64, value: f64, method: Method) -> Self {
        AsymptoticReport {
            kind,
            spec: spec.label(),
            eps,
            n: None,
            x: None,
            value,
            method,
            approximate: method == Method::Sampled,
            components: Vec::new(),
            note: None,
        }
    }

    fn with(mut self, name: &'static str, value: f64, method: Method) -> Self {
        self.components.push(Component { name, value, method });
        self
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|c| c.name == name).map(|c| c.value)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(LevyError::invalid(format!("ε must be positive and finite, got {eps}")))
    }
}

/// `ess sup` of the absolutely continuous density of `μ⁻¹`, with its method.
fn inverse_density_sup(spec: &DistributionSpec) -> (f64, Method) {
    let sup = spec.family().inverse_density_sup();
    if !sup.is_nan() {
        return (sup * spec.scale(), Method::ClosedForm);
    }
    let n = FALLBACK_SAMPLES;
    let sampled =
        (0..n).map(|k| spec.scale() * spec.family().inverse_density((k as f64 + 0.5) / n as f64)).fold(0.0, f64::max);
    (sampled, Method::Sampled)
}

/// `limsup n·d_ε(μ, δ^{u_n}) = max{‖Ω(ε g′_A)‖_∞, sup Ω∘ι(atoms of μ⁻¹)}`.
///
/// The `liminf-bound` component is `‖Ω(ε g′_A)‖_∞`, a lower bound for the
/// liminf. Atoms of `μ⁻¹` must sit at exact rational levels. Families with
/// infinitely many such atoms are refused unless they carry a closed form.
pub fn limit_uniform(spec: &DistributionSpec, eps: f64) -> Result<AsymptoticReport> {
    check_eps(eps)?;
    let (sup, sup_method) = inverse_density_sup(spec);
    let ac = if sup > 0.0 { omega(eps * sup) } else { 0.0 };
    if let Some(v) = spec.family().limit_uniform_override() {
        let mut r = AsymptoticReport::new(ReportKind::UniformLimsup, spec, eps, v, Method::ClosedForm)
            .with("ac", ac, sup_method)
            .with("singular", v, Method::ClosedForm)
            .with("liminf-bound", ac, sup_method);
        r.note = Some("the exact liminf is not known for this family".into());
        return Ok(r);
    }
    let im = spec.inverse_measure(DEFAULT_M_MAX)?;
    if im.truncated {
        return Err(LevyError::unsupported(format!(
            "{} has infinitely many inverse atoms and no closed-form limit",
            spec.label()
        )));
    }
    if im.singular_continuous_mass > 0.0 {
        return Err(LevyError::unsupported(format!(
            "{} has a singular continuous inverse part and no closed-form limit",
            spec.label()
        )));
    }
    let mut singular = 0.0_f64;
    for atom in &im.atoms {
        let q = atom.exact.ok_or_else(|| {
            LevyError::unsupported(format!(
                "inverse atom at level {} is not an exact rational; give masses as \"p/q\"",
                atom.location
            ))
        })?;
        singular = singular.max(omega_iota(q));
    }
    let value = ac.max(singular);
    let method = if sup_method == Method::Sampled && ac >= singular { Method::Sampled } else { Method::ClosedForm };
    let mut r = AsymptoticReport::new(ReportKind::UniformLimsup, spec, eps, value, method)
        .with("ac", ac, sup_method)
        .with("singular", singular, Method::ClosedForm)
        .with("liminf-bound", ac, sup_method);
    r.approximate = sup_method == Method::Sampled;
    Ok(r)
}

/// The liminf lower bound `‖Ω(ε g′_A)‖_∞` as a report of its own.
pub fn uniform_liminf_bound(spec: &DistributionSpec, eps: f64) -> Result<AsymptoticReport> {
    check_eps(eps)?;
    let (sup, method) = inverse_density_sup(spec);
    let ac = if sup > 0.0 { omega(eps * sup) } else { 0.0 };
    Ok(AsymptoticReport::new(ReportKind::UniformLiminfBound, spec, eps, ac, method))
}

/// `ε ∫ Ω(f/ε) dλ` over the absolutely continuous part of `μ`.
fn dual_integral(spec: &DistributionSpec, eps: f64, upper: f64) -> f64 {
    let centre = spec.quantile(0.5);
    spec.ac_pieces()
        .iter()
        .filter(|p| p.lo < upper)
        .map(|p| {
            let hi = p.hi.min(upper);
            integrate_range(|x| omega(spec.density(x) / eps), p.lo, hi, p.tail_exponent, centre, QUAD_TOL).value
        })
        .sum::<f64>()
        * eps
}

/// `lim n·d_ε(μ, δ^{•,n}) = ∫₀¹ Ω(ε g′_A) dλ = ε ∫ Ω(f_A/ε) dλ`.
///
/// Both integrals are evaluated; they must agree within
/// [`PRIMAL_DUAL_TOL`]. The limit is 0 when `μ` has no absolutely
/// continuous part.
pub fn limit_best(spec: &DistributionSpec, eps: f64) -> Result<AsymptoticReport> {
    check_eps(eps)?;
    if !spec.has_ac_part() {
        return Ok(AsymptoticReport::new(ReportKind::BestLimit, spec, eps, 0.0, Method::ClosedForm)
            .with("primal", 0.0, Method::ClosedForm)
            .with("dual", 0.0, Method::ClosedForm));
    }
    // split the primal integral where g jumps
    let mut cuts = vec![0.0, 1.0];
    if let Ok(im) = spec.inverse_measure(DEFAULT_M_MAX) {
        cuts.extend(im.atoms.iter().map(|a| a.location).filter(|t| *t > 0.0 && *t < 1.0));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let scale = spec.scale();
    let family = spec.family();
    let primal: f64 = cuts
        .windows(2)
        .map(|w| integrate(|t| omega(eps * scale * family.inverse_density(t)), w[0], w[1], QUAD_TOL).value)
        .sum();
    let dual = dual_integral(spec, eps, f64::INFINITY);
    if (primal - dual).abs() > PRIMAL_DUAL_TOL {
        return Err(LevyError::integrity(format!(
            "best limit for {}: primal {primal} and dual {dual} disagree",
            spec.label()
        )));
    }
    Ok(AsymptoticReport::new(ReportKind::BestLimit, spec, eps, primal, Method::Quadrature)
        .with("primal", primal, Method::Quadrature)
        .with("dual", dual, Method::Quadrature))
}

/// Second-order prediction of `n·d_ε(μ, δ^{u_n})`: `c − (2c²/ε)·e_n` with
/// `c = ‖Ω(ε g′)‖_∞`.
///
/// For `c < ½`, `e_n = 1/g′(1⁻) + n(g(1 − (1−c)/n) − g(1 − c/n))/((1 − 2c)g′(1⁻)²)`;
/// for `c = ½`, `e_n = 1/g′(1 − 1/(2n))`. Families with a closed form of
/// their own (the normal) use it instead.
pub fn second_order_uniform(spec: &DistributionSpec, eps: f64, n: usize) -> Result<AsymptoticReport> {
    check_eps(eps)?;
    if n == 0 {
        return Err(LevyError::invalid("n must be at least 1"));
    }
    let family = spec.family();
    if !family.second_order_uniform_eligible() {
        return Err(LevyError::unsupported(format!(
            "{} lacks the smooth convex quantile the uniform expansion needs",
            spec.label()
        )));
    }
    if let Some(v) = family.uniform_second_order_override(eps * spec.scale(), n) {
        let mut r = AsymptoticReport::new(ReportKind::SecondOrder, spec, eps, v, Method::ClosedForm).with(
            "c",
            0.5,
            Method::ClosedForm,
        );
        r.n = Some(n);
        return Ok(r);
    }
    let (sup, method) = inverse_density_sup(spec);
    let c = omega(eps * sup);
    let nf = n as f64;
    let e_n = if c < 0.5 {
        let g = |t: f64| spec.quantile(t);
        1.0 / sup + nf * (g(1.0 - (1.0 - c) / nf) - g(1.0 - c / nf)) / ((1.0 - 2.0 * c) * sup * sup)
    } else {
        let d = spec
            .quantile_derivatives(1.0 - 0.5 / nf)
            .ok_or_else(|| LevyError::unsupported(format!("{} has no quantile derivative", spec.label())))?;
        1.0 / d[0]
    };
    let value = c - 2.0 * c * c / eps * e_n;
    let mut r = AsymptoticReport::new(ReportKind::SecondOrder, spec, eps, value, Method::ClosedForm)
        .with("c", c, method)
        .with("e_n", e_n, Method::ClosedForm);
    r.n = Some(n);
    r.approximate = method == Method::Sampled;
    Ok(r)
}

/// `n·d_ε(μ, δ^{•,n}) = c₁ + (c₁²c₂/12)·n⁻² + …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestExpansion {
    pub c1: f64,
    #[serde(with = "ext_real")]
    pub c2: f64,
    pub c2_method: Method,
}

impl BestExpansion {
    /// `c₁ + c₁²c₂/(12n²)`; `−∞` when `c₂ = −∞`.
    pub fn predict(&self, n: usize) -> f64 {
        let n = n as f64;
        self.c1 + self.c1 * self.c1 * self.c2 / (12.0 * n * n)
    }

    pub fn report(&self, spec: &DistributionSpec, eps: f64, n: usize) -> AsymptoticReport {
        let mut r = AsymptoticReport::new(ReportKind::SecondOrder, spec, eps, self.predict(n), self.c2_method)
            .with("c1", self.c1, Method::Quadrature)
            .with("c2", self.c2, self.c2_method);
        r.n = Some(n);
        r
    }
}

/// `c₁` from [`limit_best`] and
/// `c₂ = ∫₀¹ (2(1+εg′)g″² − (2+εg′)g′g‴)/((1+εg′)²g′²) dλ`.
pub fn second_order_best(spec: &DistributionSpec, eps: f64) -> Result<BestExpansion> {
    check_eps(eps)?;
    let kind = spec.family().second_order_best().ok_or_else(|| {
        LevyError::unsupported(format!("{} lacks the smooth quantile the best expansion needs", spec.label()))
    })?;
    let c1 = limit_best(spec, eps)?.value;
    if kind == SecondOrderBest::NegativeInfinite {
        return Ok(BestExpansion { c1, c2: f64::NEG_INFINITY, c2_method: Method::ClosedForm });
    }
    let integrand = |t: f64| match spec.quantile_derivatives(t) {
        Some([g1, g2, g3]) => {
            let ge = eps * g1;
            let num = 2.0 * (1.0 + ge) * g2 * g2 - (2.0 + ge) * g1 * g3;
            num / ((1.0 + ge) * (1.0 + ge) * g1 * g1)
        }
        None => f64::NAN,
    };
    let c2 = integrate(integrand, 0.0, 1.0, QUAD_TOL).value;
    Ok(BestExpansion { c1, c2, c2_method: Method::Quadrature })
}

/// The asymptotic point density `μ*_ε`, proportional to `Ω(f_A/ε)`.
///
/// The normalising integral is computed on first use and cached.
#[derive(Debug)]
pub struct PointDensity {
    spec: DistributionSpec,
    eps: f64,
    norm: OnceLock<f64>,
}

impl PointDensity {
    pub fn new(spec: &DistributionSpec, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if !spec.has_ac_part() {
            return Err(LevyError::unsupported(format!(
                "{} is singular; the point density needs an absolutely continuous part",
                spec.label()
            )));
        }
        Ok(PointDensity { spec: spec.clone(), eps, norm: OnceLock::new() })
    }

    /// `∫ Ω(f_A/ε) dλ`.
    pub fn normaliser(&self) -> f64 {
        *self.norm.get_or_init(|| dual_integral(&self.spec, self.eps, f64::INFINITY) / self.eps)
    }

    pub fn density(&self, x: f64) -> f64 {
        omega(self.spec.density(x) / self.eps) / self.normaliser()
    }

    /// `μ*_ε((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        (dual_integral(&self.spec, self.eps, x) / self.eps / self.normaliser()).clamp(0.0, 1.0)
    }

    pub fn report(&self, x: f64) -> AsymptoticReport {
        let mut r = AsymptoticReport::new(
            ReportKind::PointDensitySample,
            &self.spec,
            self.eps,
            self.density(x),
            Method::Quadrature,
        )
        .with("normaliser", self.normaliser(), Method::Quadrature);
        r.x = Some(x);
        r
    }
}

/// `dμ*_ε/dλ` at `x`.
pub fn point_density(spec: &DistributionSpec, eps: f64, x: f64) -> Result<f64> {
    Ok(PointDensity::new(spec, eps)?.density(x))
}
