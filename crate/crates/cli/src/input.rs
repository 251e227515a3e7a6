//! Parsing of spec, atom and n-range arguments.

use std::fs;
use std::path::Path;

use levyq::distributions::empirical_from_csv;
use levyq::{AtomicMeasure, DistributionSpec, FamilyRegistry, LevyError, Result};
use serde::Deserialize;

/// Largest total-mass defect that is silently normalised away.
pub const MASS_NORMALISE_TOL: f64 = 1e-9;

fn parse_err(msg: impl Into<String>) -> LevyError {
    LevyError::Parse(msg.into())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_err(format!("cannot read {}: {e}", path.display())))
}

/// A spec given as shorthand (`exp(1)`), inline JSON, a JSON file, or a
/// `location,mass` CSV file.
pub fn spec(arg: &str) -> Result<DistributionSpec> {
    let path = Path::new(arg);
    let registry = FamilyRegistry::builtin();
    if path.is_file() {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            let file = fs::File::open(path).map_err(|e| parse_err(format!("cannot read {arg}: {e}")))?;
            return empirical_from_csv(file);
        }
        return registry.parse(&read(path)?);
    }
    registry.parse(arg)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomIn {
    x: f64,
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomsIn {
    atoms: Vec<AtomIn>,
}

/// An atomic measure given as `{"atoms": [{"x": .., "p": ..}]}`, inline or
/// in a file. Weights off by at most [`MASS_NORMALISE_TOL`] are rescaled,
/// with a warning.
pub fn atoms(arg: &str) -> Result<(AtomicMeasure, Option<String>)> {
    let path = Path::new(arg);
    let text = if path.is_file() { read(path)? } else { arg.to_string() };
    let parsed: AtomsIn = serde_json::from_str(&text).map_err(|e| parse_err(format!("atoms: {e}")))?;
    let mut atoms = parsed.atoms;
    if atoms.is_empty() {
        return Err(parse_err("atoms: at least one atom is required"));
    }
    if atoms.iter().any(|a| !a.x.is_finite() || a.p.is_nan() || a.p < 0.0) {
        return Err(parse_err("atoms: locations must be finite and weights non-negative"));
    }
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    let total: f64 = atoms.iter().map(|a| a.p).sum();
    let defect = (total - 1.0).abs();
    if defect > MASS_NORMALISE_TOL {
        return Err(parse_err(format!("atoms: weights sum to {total}, not 1")));
    }
    let warning = (defect > 0.0).then(|| format!("warning: atom weights sum to {total}; normalised"));
    let xs = atoms.iter().map(|a| a.x).collect();
    let ps = atoms.iter().map(|a| a.p / total).collect();
    Ok((AtomicMeasure::new(xs, ps)?, warning))
}

/// `N`, `a,b,c`, `a..b` (step 1), `a..b+k` (step k) or `a..b*k` (factor k).
pub fn n_values(arg: &str) -> Result<Vec<usize>> {
    let num = |s: &str| -> Result<usize> {
        s.trim().parse::<usize>().map_err(|_| parse_err(format!("not a positive integer: {s:?}")))
    };
    let values = if let Some((start, rest)) = arg.split_once("..") {
        let start = num(start)?;
        let (stop, step) = if let Some((stop, k)) = rest.split_once('*') {
            (num(stop)?, Step::Factor(num(k)?))
        } else if let Some((stop, k)) = rest.split_once('+') {
            (num(stop)?, Step::Add(num(k)?))
        } else {
            (num(rest)?, Step::Add(1))
        };
        match step {
            Step::Factor(k) if k < 2 => return Err(parse_err("geometric step must be at least 2")),
            Step::Add(0) => return Err(parse_err("arithmetic step must be positive")),
            _ => {}
        }
        let mut out = Vec::new();
        let mut n = start;
        while n <= stop {
            out.push(n);
            n = match step {
                Step::Add(k) => n + k,
                Step::Factor(k) => n * k,
            };
            if n == 0 {
                break;
            }
        }
        out
    } else {
        arg.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(parse_err(format!("empty n-range {arg:?}")));
    }
    if values.contains(&0) {
        return Err(parse_err("n must be at least 1"));
    }
    Ok(values)
}

enum Step {
    Add(usize),
    Factor(usize),
}

/// `a..b` as a closed real interval.
pub fn x_range(arg: &str) -> Result<(f64, f64)> {
    let (a, b) = arg.split_once("..").ok_or_else(|| parse_err(format!("expected lo..hi, got {arg:?}")))?;
    let p = |s: &str| s.trim().parse::<f64>().map_err(|_| parse_err(format!("not a number: {s:?}")));
    let (a, b) = (p(a)?, p(b)?);
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(parse_err(format!("not a finite interval: {arg:?}")));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(n_values("4").unwrap(), vec![4]);
        assert_eq!(n_values("1,3,9").unwrap(), vec![1, 3, 9]);
        assert_eq!(n_values("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(n_values("4..512*2").unwrap(), vec![4, 8, 16, 32, 64, 128, 256, 512]);
        assert_eq!(n_values("10..40+10").unwrap(), vec![10, 20, 30, 40]);
        assert!(n_values("5..2").is_err());
        assert!(n_values("0..3").is_err());
        assert!(n_values("1..8*1").is_err());
        assert!(n_values("x").is_err());
    }

    #[test]
    fn atom_weights() {
        let (m, w) = atoms(r#"{"atoms": [{"x": 1, "p": 0.5}, {"x": -1, "p": 0.5}]}"#).unwrap();
        assert_eq!(m.locations(), &[-1.0, 1.0]);
        assert!(w.is_none());
        let (_, w) = atoms(r#"{"atoms": [{"x": 0, "p": 0.5}, {"x": 1, "p": 0.5000000001}]}"#).unwrap();
        assert!(w.is_some());
        assert!(atoms(r#"{"atoms": [{"x": 0, "p": 0.5}, {"x": 1, "p": 0.6}]}"#).is_err());
    }
}
