use levyq::oracle::empirical_point_check;
use levyq::{best_unconstrained, brute_force_best, AtomicMeasure, DistributionSpec, GridConfig, Mass};

#[test]
fn oracle_single_atom_for_uniform() {
    let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
    let cfg = GridConfig::for_spec(&spec, 1, 1e-3).unwrap();
    let r = brute_force_best(&spec, 1, 1.0, &cfg).unwrap();
    assert!((r.error - 0.25).abs() <= 2e-3, "{}", r.error);
}

#[test]
fn oracle_recovers_two_point() {
    let spec = DistributionSpec::two_point(Mass::exact(3, 10)).unwrap();
    let cfg = GridConfig::for_spec(&spec, 2, 1e-4).unwrap();
    let r = brute_force_best(&spec, 2, 1.0, &cfg).unwrap();
    assert_eq!(r.error, 0.0);
    assert_eq!(r.measure.locations(), &[-1.0, 1.0]);
    assert!((r.measure.weights()[0] - 0.3).abs() < 1e-12);
}

#[test]
fn oracle_never_beats_solver() {
    let spec = DistributionSpec::exponential(1.0).unwrap();
    for n in 1..=2 {
        let solver = best_unconstrained(&spec, n, 1.0).unwrap().error;
        let cfg = GridConfig::for_spec(&spec, n, 1e-3).unwrap();
        let oracle = brute_force_best(&spec, n, 1.0, &cfg).unwrap().error;
        assert!(oracle >= solver - 1e-9 && oracle - solver <= 2e-3, "n={n}: {oracle} vs {solver}");
    }
}

#[test]
fn oracle_refuses_large_grids() {
    assert!(GridConfig::new(0.0, 1.0, 1e-9, 1e-3, 3).is_err());
    let spec = DistributionSpec::exponential(1.0).unwrap();
    assert!(GridConfig::for_spec(&spec, 4, 1e-2).is_err());
}

#[test]
fn point_check_trend_for_exponential() {
    let spec = DistributionSpec::exponential(1.0).unwrap();
    let devs: Vec<f64> = [50usize, 100, 200, 400]
        .iter()
        .map(|&n| {
            let m = best_unconstrained(&spec, n, 1.0).unwrap().measure;
            empirical_point_check(&m, &spec, 1.0).unwrap().deviation
        })
        .collect();
    let inversions = devs.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(inversions <= 1, "{devs:?}");
    assert!(devs[3] < devs[0], "{devs:?}");
}

#[test]
fn point_check_for_equally_spaced_uniform_atoms() {
    let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
    let n = 100;
    let atoms = AtomicMeasure::uniform((1..=n).map(|j| (2 * j - 1) as f64 / (2 * n) as f64).collect()).unwrap();
    let dev = empirical_point_check(&atoms, &spec, 1.0).unwrap().deviation;
    assert!(dev <= 0.02, "{dev}");
}
