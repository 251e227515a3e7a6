//! One function per subcommand.

use levyq::asymptotics::{uniform_liminf_bound, AsymptoticReport};
use levyq::oracle::MAX_ORACLE_N;
use levyq::{
    best_unconstrained, brute_force_best, distance_to_atomic, limit_best, limit_uniform, second_order_best,
    second_order_uniform, ApproxResult, AtomicMeasure, DistributionSpec, GridConfig, LevyError, PointDensity,
    QuantizerRegistry, Result,
};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::output::{four, num, opt_num, Output};

fn head(spec: &DistributionSpec, eps: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("spec".into(), Value::from(spec.label()));
    m.insert("eps".into(), num(eps));
    m
}

pub fn dist(spec: &DistributionSpec, nu: &AtomicMeasure, eps: f64) -> Result<Output> {
    let d = distance_to_atomic(spec, nu, eps)?;
    let mut out = Output::new("dist", head(spec, eps));
    out.set("n", Value::from(nu.n()));
    out.table("rows", vec!["distance"], vec![vec![num(d)]]);
    out.set("distance", num(d));
    out.summary.push(format!("d_ε = {} (n = {}, ε = {})", four(d), nu.n(), eps));
    Ok(out)
}

fn atom_rows(r: &ApproxResult) -> Vec<Vec<Value>> {
    let m = &r.measure;
    (1..=m.n()).map(|j| vec![Value::from(j), num(m.x(j)), num(m.weights()[j - 1]), num(m.cumulative()[j])]).collect()
}

pub fn solve(mode: &str, spec: &DistributionSpec, n: usize, eps: f64) -> Result<Output> {
    let q = QuantizerRegistry::builtin().get(mode)?;
    let r = q.solve(spec, n, eps)?;
    let mut out = Output::new(mode, head(spec, eps));
    out.set("mode", Value::from(mode));
    out.set("n", Value::from(n));
    out.set("error", num(r.error));
    out.set("n_error", num(n as f64 * r.error));
    out.set("certificate", serde_json::to_value(r.certificate).expect("certificate serialises"));
    out.set("stats", serde_json::to_value(r.stats).expect("stats serialise"));
    out.table("atoms", vec!["j", "x", "p", "cumulative"], atom_rows(&r));
    out.summary.push(format!("{mode}: n = {n}, error = {}, n·error = {}", four(r.error), four(n as f64 * r.error)));
    Ok(out)
}

pub fn sweep(mode: &str, spec: &DistributionSpec, ns: &[usize], eps: f64) -> Result<Output> {
    let q = QuantizerRegistry::builtin().get(mode)?;
    let best = mode == "best";
    let limit = if best { limit_best(spec, eps) } else { limit_uniform(spec, eps) };
    let limit = optional(limit)?.map(|r| r.value);
    let expansion = if best { optional(second_order_best(spec, eps))? } else { None };
    let errors: Vec<Result<f64>> = ns.par_iter().map(|&n| q.solve(spec, n, eps).map(|r| r.error)).collect();
    let mut rows = Vec::with_capacity(ns.len());
    for (&n, e) in ns.iter().zip(errors) {
        let e = e?;
        let second = if best {
            expansion.as_ref().map(|x| x.predict(n))
        } else {
            optional(second_order_uniform(spec, eps, n))?.map(|r| r.value)
        };
        rows.push(vec![Value::from(n), num(e), num(n as f64 * e), opt_num(limit), opt_num(second)]);
    }
    let mut out = Output::new("sweep", head(spec, eps));
    out.set("mode", Value::from(mode));
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        for row in [first, last] {
            let ne = row[2].as_f64().unwrap_or(f64::NAN);
            out.summary.push(format!("{mode}: n = {}, n·error = {}", row[0], four(ne)));
        }
    }
    if let Some(l) = limit {
        out.summary.push(format!("predicted limit {}", four(l)));
    }
    out.table("rows", vec!["n", "error", "n_error", "predicted_limit", "second_order"], rows);
    Ok(out)
}

/// `Ok(None)` for quantities that do not apply to the distribution.
fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(LevyError::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn limits(spec: &DistributionSpec, eps: f64, n: Option<usize>) -> Result<(Output, Vec<String>)> {
    let mut reports: Vec<AsymptoticReport> = Vec::new();
    let mut skipped = Vec::new();
    let mut collect = |name: &str, r: Result<AsymptoticReport>| -> Result<()> {
        match optional(r)? {
            Some(rep) => reports.push(rep),
            None => skipped.push(format!("note: {name} does not apply to {}", spec.label())),
        }
        Ok(())
    };
    collect("uniform limsup", limit_uniform(spec, eps))?;
    collect("uniform liminf bound", uniform_liminf_bound(spec, eps))?;
    collect("best limit", limit_best(spec, eps))?;
    if let Some(n) = n {
        collect("uniform second-order prediction", second_order_uniform(spec, eps, n))?;
        collect("best second-order prediction", second_order_best(spec, eps).map(|x| x.report(spec, eps, n)))?;
    }
    if reports.is_empty() {
        return Err(LevyError::Unsupported(format!("no asymptotic quantity applies to {}", spec.label())));
    }
    let mut out = Output::new("limits", head(spec, eps));
    let mut rows = Vec::new();
    for r in &reports {
        let kind = serde_json::to_value(r.kind).expect("kind serialises");
        let method = |m| serde_json::to_value(m).expect("method serialises");
        rows.push(vec![kind.clone(), Value::from(""), num(r.value), method(r.method), Value::from(r.approximate)]);
        for c in &r.components {
            rows.push(vec![
                kind.clone(),
                Value::from(c.name),
                num(c.value),
                method(c.method),
                Value::from(r.approximate),
            ]);
        }
        let label = kind.as_str().unwrap_or_default().to_string();
        out.summary.push(format!("{label} {}", four(r.value)));
    }
    out.columns = vec!["kind", "component", "value", "method", "approximate"];
    out.rows = rows;
    out.set("reports", serde_json::to_value(&reports).expect("reports serialise"));
    Ok((out, skipped))
}

pub fn density(
    spec: &DistributionSpec,
    eps: f64,
    range: Option<(f64, f64)>,
    points: usize,
    n: usize,
) -> Result<Output> {
    if points < 2 {
        return Err(LevyError::InvalidParameter("need at least 2 points".into()));
    }
    let pd = PointDensity::new(spec, eps)?;
    let (lo, hi) = range.unwrap_or((spec.quantile(1e-3), spec.quantile(1.0 - 1e-3)));
    let h = (hi - lo) / (points - 1) as f64;
    let atoms = best_unconstrained(spec, n, eps)?.measure;
    let rows: Vec<Vec<Value>> = (0..points)
        .map(|k| {
            let x = lo + h * k as f64;
            let (a, b) = (x - 0.5 * h, x + 0.5 * h);
            let count = atoms.locations().iter().filter(|&&xj| a <= xj && xj < b).count();
            vec![num(x), num(pd.density(x)), num(count as f64 / (n as f64 * h))]
        })
        .collect();
    let mut out = Output::new("density", head(spec, eps));
    out.set("n", Value::from(n));
    out.set("normaliser", num(pd.normaliser()));
    out.summary.push(format!("μ*_ε normaliser {} over {points} points, histogram at n = {n}", four(pd.normaliser())));
    out.table("rows", vec!["x", "density", "histogram"], rows);
    Ok(out)
}

/// Returns the output and whether every row passed.
pub fn verify(
    spec: &DistributionSpec,
    eps: f64,
    n_max: usize,
    resolution: f64,
    tolerance: f64,
) -> Result<(Output, bool)> {
    if n_max == 0 || n_max > MAX_ORACLE_N {
        return Err(LevyError::InvalidParameter(format!("oracle runs need 1 ≤ n ≤ {MAX_ORACLE_N}")));
    }
    let mut rows = Vec::new();
    let mut all_ok = true;
    let mut out = Output::new("verify", head(spec, eps));
    for n in 1..=n_max {
        let solver = best_unconstrained(spec, n, eps)?.error;
        let cfg = GridConfig::for_spec(spec, n, resolution)?;
        let oracle = brute_force_best(spec, n, eps, &cfg)?;
        let gap = oracle.error - solver;
        let ok = oracle.error >= solver - 1e-9 && gap <= tolerance;
        all_ok &= ok;
        out.summary.push(format!(
            "n = {n}: solver {}, oracle {}, gap {gap:.2e} {}",
            four(solver),
            four(oracle.error),
            if ok { "ok" } else { "VIOLATION" }
        ));
        rows.push(vec![Value::from(n), num(solver), num(oracle.error), num(gap), Value::from(ok)]);
    }
    out.set("resolution", num(resolution));
    out.set("tolerance", num(tolerance));
    out.set("ok", Value::from(all_ok));
    out.table("rows", vec!["n", "solver_error", "oracle_error", "gap", "ok"], rows);
    Ok((out, all_ok))
}
