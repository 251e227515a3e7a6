use levyq::asymptotics::{limit_best, limit_uniform, uniform_liminf_bound, PointDensity};
use levyq::quadrature::integrate_range;
use levyq::{best_unconstrained, DistributionSpec, Mass};

fn ac_specs() -> Vec<(DistributionSpec, f64)> {
    // (spec, decay exponent of the density)
    vec![
        (DistributionSpec::exponential(1.0).unwrap(), f64::INFINITY),
        (DistributionSpec::exponential(3.0).unwrap(), f64::INFINITY),
        (DistributionSpec::benford(10.0).unwrap(), f64::INFINITY),
        (DistributionSpec::pareto(1.0).unwrap(), 2.0),
        (DistributionSpec::pareto(0.5).unwrap(), 1.5),
        (DistributionSpec::normal(0.0, 1.0).unwrap(), f64::INFINITY),
        (DistributionSpec::normal(2.0, 0.25).unwrap(), f64::INFINITY),
        (DistributionSpec::uniform(-1.0, 3.0).unwrap(), f64::INFINITY),
        (DistributionSpec::atom_uniform_mixture(Mass::exact(1, 3), 6.0).unwrap(), f64::INFINITY),
    ]
}

#[test]
fn best_limit_below_liminf_bound_below_uniform_limit() {
    for (spec, _) in ac_specs() {
        for &eps in &[0.5, 1.0, 4.0] {
            let best = limit_best(&spec, eps).unwrap().value;
            let liminf = uniform_liminf_bound(&spec, eps).unwrap().value;
            let limsup = limit_uniform(&spec, eps).unwrap().value;
            assert!(best <= liminf + 1e-12, "{} ε={eps}: {best} > {liminf}", spec.label());
            assert!(liminf <= limsup + 1e-12, "{} ε={eps}: {liminf} > {limsup}", spec.label());
        }
    }
}

#[test]
fn primal_and_dual_agree() {
    for (spec, _) in ac_specs() {
        let r = limit_best(&spec, 1.0).unwrap();
        let (p, d) = (r.component("primal").unwrap(), r.component("dual").unwrap());
        assert!((p - d).abs() <= 1e-8, "{}: {p} vs {d}", spec.label());
    }
}

#[test]
fn singular_measures_have_zero_best_limit() {
    for spec in [
        DistributionSpec::cantor(),
        DistributionSpec::inverse_cantor(),
        DistributionSpec::two_point(Mass::exact(3, 10)).unwrap(),
        DistributionSpec::point_mass(1.0).unwrap(),
    ] {
        assert_eq!(limit_best(&spec, 1.0).unwrap().value, 0.0, "{}", spec.label());
    }
}

#[test]
fn best_error_converges_monotonically() {
    for spec in [
        DistributionSpec::exponential(1.0).unwrap(),
        DistributionSpec::benford(10.0).unwrap(),
        DistributionSpec::pareto(1.0).unwrap(),
        DistributionSpec::uniform(0.0, 1.0).unwrap(),
    ] {
        let limit = limit_best(&spec, 1.0).unwrap().value;
        let gaps: Vec<f64> = (3..=9)
            .map(|k| {
                let n = 1usize << k;
                (n as f64 * best_unconstrained(&spec, n, 1.0).unwrap().error - limit).abs()
            })
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{}: gaps {gaps:?}", spec.label());
        }
    }
}

#[test]
fn point_density_is_a_probability_density() {
    for (spec, decay) in ac_specs() {
        for &eps in &[0.5, 1.0, 2.0] {
            let pd = PointDensity::new(&spec, eps).unwrap();
            let (lo, hi) = (spec.quantile(0.0), spec.quantile_left(1.0));
            let mut cuts = vec![lo];
            // split at the atoms so the integrand is smooth on each piece
            if let Some(atom) = spec.family().atoms().unwrap_or_default().first().copied() {
                cuts.push(atom.0);
            }
            cuts.push(hi);
            let mut total = 0.0;
            for w in cuts.windows(2) {
                total += integrate_range(|x| pd.density(x), w[0], w[1], decay, 0.0, 1e-12).value;
            }
            assert!((total - 1.0).abs() <= 1e-8, "{} ε={eps}: {total}", spec.label());
            for k in 0..=100 {
                let x = spec.quantile_left(0.001 + 0.998 * k as f64 / 100.0);
                assert!(pd.density(x) >= 0.0);
            }
        }
    }
}

#[test]
fn point_density_of_uniform_is_uniform() {
    let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
    let pd = PointDensity::new(&spec, 1.0).unwrap();
    for x in [0.1, 0.5, 0.9] {
        assert!((pd.density(x) - 1.0).abs() < 1e-12);
        assert!((pd.cdf(x) - x).abs() < 1e-10);
    }
}

#[test]
fn point_density_refuses_singular_measures() {
    assert!(PointDensity::new(&DistributionSpec::cantor(), 1.0).is_err());
    assert!(PointDensity::new(&DistributionSpec::two_point(Mass::exact(1, 2)).unwrap(), 1.0).is_err());
}
