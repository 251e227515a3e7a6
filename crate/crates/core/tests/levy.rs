use levyq::{
    best_uniform, distance_general, distance_to_atomic, ell, ell_star, AtomicMeasure, DistributionSpec, IntervalX, Mass,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn distance_between_point_masses_is_min_c_one() {
    for c in [0.0, 0.3, 1.0, 1.7, 2.5, 10.0] {
        let f = DistributionSpec::point_mass(0.0).unwrap();
        let nu = AtomicMeasure::new(vec![c], vec![1.0]).unwrap();
        let direct = distance_to_atomic(&f, &nu, 1.0).unwrap();
        let general = distance_general(&f.cdf_map(), &nu.cdf(), 1.0);
        let want = f64::min(c, 1.0);
        assert!((direct - want).abs() < 1e-12 && (general - want).abs() < 1e-12, "c={c}: {direct} {general}");
    }
}

#[test]
fn both_distance_paths_agree() {
    let mut rng = StdRng::seed_from_u64(3);
    let specs = [
        DistributionSpec::exponential(1.0).unwrap(),
        DistributionSpec::normal(0.0, 1.0).unwrap(),
        DistributionSpec::uniform(0.0, 2.0).unwrap(),
        DistributionSpec::two_point(Mass::exact(3, 10)).unwrap(),
        DistributionSpec::atom_uniform_mixture(Mass::exact(1, 3), 2.0).unwrap(),
    ];
    for _ in 0..100 {
        let spec = &specs[rng.gen_range(0..specs.len())];
        let n = rng.gen_range(1..6);
        let mut xs: Vec<f64> =
            (0..n).map(|_| spec.quantile(rng.gen_range(0.02..0.98)) + rng.gen_range(-0.2..0.2)).collect();
        xs.sort_by(f64::total_cmp);
        let ws: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = ws.iter().sum();
        let nu = AtomicMeasure::new(xs, ws.iter().map(|w| w / total).collect()).unwrap();
        let eps = rng.gen_range(0.3..3.0);
        let direct = distance_to_atomic(spec, &nu, eps).unwrap();
        // the general routine is exact only when its second argument is a step map
        let general = distance_general(&spec.cdf_map(), &nu.cdf(), eps);
        assert!((direct - general).abs() <= 1e-8, "{}: {direct} vs {general}", spec.label());
    }
}

#[test]
fn uniform_anchor_distance() {
    let spec = DistributionSpec::exponential(1.0).unwrap();
    let r = best_uniform(&spec, 4, 1.0).unwrap();
    let d = distance_to_atomic(&spec, &r.measure, 1.0).unwrap();
    assert!((d - 0.111150).abs() <= 5e-5 / 4.0, "{d}");
}

#[test]
fn ell_of_exponential_cdf_matches_grid() {
    let spec = DistributionSpec::exponential(1.0).unwrap();
    let f = spec.cdf_map();
    let iv = IntervalX::new(0.0, f64::INFINITY).unwrap();
    let got = ell(&f, iv, 0.0);
    // smallest y with 1 − y ≤ 0 ≤ F(y) + y, scanned on a fine grid
    let grid = (0..=200_000).map(|k| k as f64 * 1e-5).find(|&y| 1.0 - y <= 0.0 && 0.0 <= spec.cdf(y) + y).unwrap();
    assert!((got - grid).abs() <= 1e-5, "{got} vs {grid}");
}

#[test]
fn ell_star_continuous_along_shrinking_intervals() {
    let spec = DistributionSpec::exponential(1.0).unwrap();
    let f = spec.cdf_map();
    let target = ell_star(&f, IntervalX::new(0.5, 2.0).unwrap());
    let gaps: Vec<f64> = (1..=6)
        .map(|k| {
            let h = 10f64.powi(-k);
            (ell_star(&f, IntervalX::new(0.5 - h, 2.0 + h).unwrap()) - target).abs()
        })
        .collect();
    assert!(gaps[5] < 1e-6, "{gaps:?}");
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{gaps:?}");
}

#[test]
fn uniform_quantile_cell_level() {
    let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
    let g = spec.quantile_map();
    for n in [1usize, 3, 10] {
        for j in 1..=n {
            let iv = IntervalX::new((j - 1) as f64 / n as f64, j as f64 / n as f64).unwrap();
            assert!((ell_star(&g, iv) - 0.25 / n as f64).abs() < 1e-14);
        }
    }
}
