use levyq::{DistributionSpec, Mass, MonotoneMap};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn families() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::exponential(1.5).unwrap(),
        DistributionSpec::benford(10.0).unwrap(),
        DistributionSpec::pareto(0.5).unwrap(),
        DistributionSpec::normal(0.3, 2.0).unwrap(),
        DistributionSpec::uniform(-1.0, 2.0).unwrap(),
        DistributionSpec::two_point(Mass::exact(3, 10)).unwrap(),
        DistributionSpec::atom_uniform_mixture(Mass::exact(1, 3), 6.0).unwrap(),
        DistributionSpec::cantor(),
        DistributionSpec::inverse_cantor(),
        DistributionSpec::point_mass(0.7).unwrap(),
    ]
}

fn sample_x(rng: &mut StdRng, spec: &DistributionSpec) -> f64 {
    let t: f64 = rng.gen_range(0.001..0.999);
    spec.quantile(t) + rng.gen_range(-0.5..0.5)
}

#[test]
fn cdf_and_quantile_are_monotone() {
    let mut rng = StdRng::seed_from_u64(7);
    for spec in families() {
        for _ in 0..1000 {
            let (a, b) = (sample_x(&mut rng, &spec), sample_x(&mut rng, &spec));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            assert!(spec.cdf(lo) <= spec.cdf(hi), "{}: cdf at {lo}, {hi}", spec.label());
            let (s, t) = (rng.gen_range(0.0..1.0f64), rng.gen_range(0.0..1.0f64));
            let (s, t) = if s <= t { (s, t) } else { (t, s) };
            assert!(spec.quantile(s) <= spec.quantile(t), "{}: quantile at {s}, {t}", spec.label());
        }
    }
}

#[test]
fn left_limits_sit_below() {
    let mut rng = StdRng::seed_from_u64(11);
    for spec in families() {
        let jumps: Vec<f64> = spec.cdf_map().discontinuities().unwrap_or_default().iter().map(|j| j.location).collect();
        for _ in 0..1000 {
            let x = sample_x(&mut rng, &spec);
            assert!(spec.cdf_left(x) <= spec.cdf(x));
            if !jumps.contains(&x) {
                assert_eq!(spec.cdf_left(x), spec.cdf(x), "{} at {x}", spec.label());
            }
        }
        for &x in &jumps {
            assert!(spec.cdf_left(x) < spec.cdf(x), "{} jump at {x}", spec.label());
        }
    }
}

#[test]
fn upper_inverse_is_galois_dual() {
    let mut rng = StdRng::seed_from_u64(13);
    for spec in families() {
        for _ in 0..1000 {
            let y = sample_x(&mut rng, &spec);
            let t: f64 = rng.gen_range(0.0..1.0);
            // F(y) ≤ t ⇔ y ≤ g(t) away from the jumps of g
            if spec.quantile_left(t) != spec.quantile(t) {
                continue;
            }
            assert_eq!(spec.cdf(y) <= t, y <= spec.quantile(t), "{}: y={y}, t={t}", spec.label());
        }
    }
}

#[test]
fn dilation_round_trips() {
    let mut rng = StdRng::seed_from_u64(17);
    for spec in families() {
        let eps: f64 = rng.gen_range(0.1..10.0);
        let back = spec.dilate(eps).unwrap().dilate(1.0 / eps).unwrap();
        for _ in 0..200 {
            let x = sample_x(&mut rng, &spec);
            // skip points where rounding of εx/ε can cross a jump
            if spec.cdf_left(x - 1e-9) != spec.cdf(x + 1e-9) && spec.step_cdf().is_some() {
                continue;
            }
            assert!((back.cdf(x) - spec.cdf(x)).abs() <= 1e-12, "{} ε={eps} x={x}", spec.label());
        }
    }
}

#[test]
fn dilated_closed_families() {
    let e = DistributionSpec::exponential(2.0).unwrap().dilate(4.0).unwrap();
    assert!((e.cdf(1.0) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
    let u = DistributionSpec::uniform(0.0, 1.0).unwrap().dilate(2.0).unwrap();
    assert_eq!(u.cdf(1.0), 0.5);
    assert_eq!(u.quantile(0.25), 0.5);
    assert_eq!(u.quantile_left(1.0), 2.0);
}
