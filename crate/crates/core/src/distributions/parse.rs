use std::io::Read;
use std::sync::Arc;

use num_rational::Rational64;
use serde_json::{Map, Value};

use super::{
    AtomUniformMixture, Benford, Cantor, DistributionSpec, Empirical, Exponential, Family, InverseCantor, Mass, Normal,
    Pareto, TwoPoint, Uniform,
};
use crate::error::{LevyError, Result};

type Builder = Box<dyn Fn(&Map<String, Value>) -> Result<Arc<dyn Family>> + Send + Sync>;

/// A named constructor in a [`FamilyRegistry`].
pub struct FamilyEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    /// Parameter names, in the order used by the `name(p1,p2)` shorthand.
    pub params: &'static [&'static str],
    pub summary: &'static str,
    build: Builder,
}

impl FamilyEntry {
    pub fn new(
        name: &'static str,
        aliases: &'static [&'static str],
        params: &'static [&'static str],
        summary: &'static str,
        build: impl Fn(&Map<String, Value>) -> Result<Arc<dyn Family>> + Send + Sync + 'static,
    ) -> Self {
        FamilyEntry { name, aliases, params, summary, build: Box::new(build) }
    }
}

/// Families selectable by name at runtime.
pub struct FamilyRegistry {
    entries: Vec<FamilyEntry>,
}

fn parse_err(msg: impl Into<String>) -> LevyError {
    LevyError::Parse(msg.into())
}

/// Parses `"p/q"` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i64 = num.parse().map_err(|_| parse_err(format!("not a rational: {s:?}")))?;
    let den: i64 = den.parse().map_err(|_| parse_err(format!("not a rational: {s:?}")))?;
    if den == 0 {
        return Err(parse_err(format!("zero denominator in {s:?}")));
    }
    Ok(Rational64::new(num, den))
}

/// A mass given as a JSON number (inexact) or a `"p/q"` string (exact).
pub fn parse_mass(v: &Value) -> Result<Mass> {
    match v {
        Value::Number(n) => n.as_f64().map(Mass::from_f64).ok_or_else(|| parse_err(format!("not a number: {n}"))),
        Value::String(s) => {
            if let Ok(r) = parse_rational(s) {
                return Ok(Mass::from_ratio(r));
            }
            s.trim().parse::<f64>().map(Mass::from_f64).map_err(|_| parse_err(format!("not a mass: {s:?}")))
        }
        other => Err(parse_err(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

fn param<'a>(params: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    params.get(name).ok_or_else(|| parse_err(format!("missing parameter {name:?}")))
}

fn number(params: &Map<String, Value>, name: &str) -> Result<f64> {
    Ok(parse_mass(param(params, name)?)?.value)
}

fn mass(params: &Map<String, Value>, name: &str) -> Result<Mass> {
    parse_mass(param(params, name)?)
}

fn atom_list(v: &Value) -> Result<Vec<(f64, Mass)>> {
    let items = v.as_array().ok_or_else(|| parse_err("atoms must be an array"))?;
    items
        .iter()
        .map(|item| match item {
            Value::Array(pair) if pair.len() == 2 => {
                let x = parse_mass(&pair[0])?.value;
                Ok((x, parse_mass(&pair[1])?))
            }
            Value::Object(obj) => {
                let x = parse_mass(param(obj, "x")?)?.value;
                Ok((x, parse_mass(param(obj, "p")?)?))
            }
            other => Err(parse_err(format!("atom must be [x, p] or {{\"x\", \"p\"}}, got {other}"))),
        })
        .collect()
}

fn arc(f: impl Family + 'static) -> Arc<dyn Family> {
    Arc::new(f)
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        FamilyRegistry { entries: Vec::new() }
    }

    /// All built-in families.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(FamilyEntry::new("exponential", &["exp"], &["a"], "rate a > 0", |p| {
            Ok(arc(Exponential::new(number(p, "a")?)?))
        }));
        r.register(FamilyEntry::new("benford", &[], &["b"], "Benford's law on [1, b], b > 1", |p| {
            Ok(arc(Benford::new(number(p, "b")?)?))
        }));
        r.register(FamilyEntry::new("pareto", &[], &["alpha"], "tail index alpha > 0 on [1, ∞)", |p| {
            Ok(arc(Pareto::new(number(p, "alpha")?)?))
        }));
        r.register(FamilyEntry::new("normal", &["gaussian"], &["mean", "variance"], "mean and variance > 0", |p| {
            Ok(arc(Normal::new(number(p, "mean")?, number(p, "variance")?)?))
        }));
        r.register(FamilyEntry::new("uniform", &[], &["a", "b"], "uniform on [a, b]", |p| {
            Ok(arc(Uniform::new(number(p, "a")?, number(p, "b")?)?))
        }));
        r.register(FamilyEntry::new("two_point", &["twopoint"], &["a"], "a·δ(−1) + (1−a)·δ(1)", |p| {
            Ok(arc(TwoPoint::new(mass(p, "a")?)?))
        }));
        r.register(FamilyEntry::new(
            "atom_uniform_mixture",
            &["mixture"],
            &["a", "b"],
            "a·δ(−1) + (1−a)·U[1, b]",
            |p| Ok(arc(AtomUniformMixture::new(mass(p, "a")?, number(p, "b")?)?)),
        ));
        r.register(FamilyEntry::new("cantor", &[], &[], "Cantor measure on [0, 1]", |_| Ok(arc(Cantor))));
        r.register(FamilyEntry::new("inverse_cantor", &[], &[], "measure whose CDF is the Cantor quantile", |_| {
            Ok(arc(InverseCantor))
        }));
        r.register(FamilyEntry::new("point_mass", &["dirac"], &["x"], "δ(x)", |p| {
            Ok(arc(Empirical::new(vec![(number(p, "x")?, Mass::exact(1, 1))])?))
        }));
        r.register(FamilyEntry::new("empirical", &[], &["atoms"], "finitely many atoms [[x, p], ...]", |p| {
            Ok(arc(Empirical::new(atom_list(param(p, "atoms")?)?)?))
        }));
        r
    }

    /// Adds an entry, replacing one with the same name.
    pub fn register(&mut self, entry: FamilyEntry) {
        self.entries.retain(|e| e.name != entry.name);
        self.entries.push(entry);
    }

    pub fn get(&self, name: &str) -> Option<&FamilyEntry> {
        let name = name.trim().to_ascii_lowercase();
        self.entries.iter().find(|e| e.name == name || e.aliases.contains(&name.as_str()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &FamilyEntry> {
        self.entries.iter()
    }

    pub fn build(&self, name: &str, params: &Map<String, Value>) -> Result<DistributionSpec> {
        let entry = self.get(name).ok_or_else(|| LevyError::unsupported(format!("unknown family {name:?}")))?;
        Ok(DistributionSpec::new((entry.build)(params)?))
    }

    /// `{"family": ..., "params": {...}, "scale": ...}`; a bare
    /// `{"atoms": [...]}` object is read as an empirical measure.
    pub fn from_json(&self, v: &Value) -> Result<DistributionSpec> {
        let obj = v.as_object().ok_or_else(|| parse_err("distribution spec must be a JSON object"))?;
        let spec = if let Some(atoms) = obj.get("atoms").filter(|_| !obj.contains_key("family")) {
            DistributionSpec::empirical(atom_list(atoms)?)?
        } else {
            let family = obj
                .get("family")
                .and_then(Value::as_str)
                .ok_or_else(|| parse_err("missing string field \"family\""))?;
            let empty = Map::new();
            let params = match obj.get("params") {
                None | Some(Value::Null) => &empty,
                Some(Value::Object(m)) => m,
                Some(other) => return Err(parse_err(format!("params must be an object, got {other}"))),
            };
            self.build(family, params)?
        };
        match obj.get("scale") {
            None | Some(Value::Null) => Ok(spec),
            Some(s) => {
                let s = parse_mass(s)?.value;
                spec.dilate(s)
            }
        }
    }

    /// `name(p1, p2, ...)` or a bare `name` for parameterless families.
    pub fn from_shorthand(&self, s: &str) -> Result<DistributionSpec> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s
                    .rfind(')')
                    .filter(|&c| c > open && c == s.len() - 1)
                    .ok_or_else(|| parse_err(format!("unbalanced parentheses in {s:?}")))?;
                (&s[..open], s[open + 1..close].trim())
            }
            None => (s, ""),
        };
        let entry = self.get(name).ok_or_else(|| LevyError::unsupported(format!("unknown family {name:?}")))?;
        let args: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(',').map(str::trim).collect() };
        if args.len() != entry.params.len() {
            return Err(parse_err(format!(
                "{} takes {} parameter(s) ({}), got {}",
                entry.name,
                entry.params.len(),
                entry.params.join(", "),
                args.len()
            )));
        }
        let mut params = Map::new();
        for (name, arg) in entry.params.iter().zip(args) {
            let value = if arg.contains('/') {
                Value::String(arg.to_string())
            } else {
                let x: f64 = arg.parse().map_err(|_| parse_err(format!("not a number: {arg:?}")))?;
                serde_json::Number::from_f64(x)
                    .map(Value::Number)
                    .ok_or_else(|| parse_err(format!("not a finite number: {arg:?}")))?
            };
            params.insert(name.to_string(), value);
        }
        Ok(DistributionSpec::new((entry.build)(&params)?))
    }

    /// JSON text when it starts with `{`, shorthand otherwise.
    pub fn parse(&self, s: &str) -> Result<DistributionSpec> {
        let t = s.trim();
        if t.starts_with('{') {
            let v: Value = serde_json::from_str(t).map_err(|e| parse_err(e.to_string()))?;
            self.from_json(&v)
        } else {
            self.from_shorthand(t)
        }
    }
}

/// Reads `location,mass` rows; a non-numeric first row is taken as a header.
/// Masses may be written as `p/q`.
pub fn empirical_from_csv(reader: impl Read) -> Result<DistributionSpec> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let mut atoms = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        if record.len() != 2 {
            return Err(parse_err(format!("row {} has {} columns, expected 2", i + 1, record.len())));
        }
        let x = record[0].parse::<f64>();
        let m = parse_mass(&Value::String(record[1].to_string()));
        match (x, m) {
            (Ok(x), Ok(m)) => atoms.push((x, m)),
            _ if i == 0 => continue,
            _ => return Err(parse_err(format!("row {} is not numeric", i + 1))),
        }
    }
    DistributionSpec::empirical(atoms)
}
