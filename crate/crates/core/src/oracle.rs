//! Brute-force references that share no code with the solvers: grid
//! minimisation of the definition-level distance for small `n`, and the
//! empirical distribution of atoms against the asymptotic point density.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::asymptotics::PointDensity;
use crate::distributions::DistributionSpec;
use crate::error::{LevyError, Result};
use crate::levy::{distance_general, AtomicMeasure};

/// Upper bound on `n·(x-range / x-resolution)`.
pub const CANDIDATE_CAP: u128 = 10_000_000;

/// Largest `n` the grid search accepts.
pub const MAX_ORACLE_N: usize = 3;

/// Number of test points in [`empirical_point_check`].
pub const POINT_CHECK_INTERVALS: usize = 1000;

/// Cells that cannot beat the incumbent by more than this are discarded,
/// so the result is within this much of the lattice minimum.
pub const PRUNE_SLACK: f64 = 1e-5;

const COARSE_X_CELLS: i64 = 16;
const COARSE_P_CELLS: i64 = 8;

/// Search grid: locations `x_lo + i·h_x` and cumulative levels `k·h_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub x_lo: f64,
    pub x_hi: f64,
    pub x_resolution: f64,
    pub p_resolution: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn new(x_lo: f64, x_hi: f64, x_resolution: f64, p_resolution: f64, n: usize) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo <= x_hi) {
            return Err(LevyError::invalid(format!("bad x-range [{x_lo}, {x_hi}]")));
        }
        if !(x_resolution > 0.0 && p_resolution > 0.0 && p_resolution <= 1.0) {
            return Err(LevyError::invalid("grid resolutions must be positive"));
        }
        if n == 0 || n > MAX_ORACLE_N {
            return Err(LevyError::unsupported(format!("grid search supports 1 ≤ n ≤ {MAX_ORACLE_N}, got {n}")));
        }
        let cfg = GridConfig { x_lo, x_hi, x_resolution, p_resolution, n };
        let candidates = n as u128 * cfg.x_cells() as u128;
        if candidates > CANDIDATE_CAP {
            return Err(LevyError::CandidateCap { candidates, cap: CANDIDATE_CAP });
        }
        Ok(cfg)
    }

    /// A grid covering `[g(0), g(1)]`, with infinite ends replaced by the
    /// `10⁻³` and `1 − 10⁻³` quantiles.
    pub fn for_spec(spec: &DistributionSpec, n: usize, resolution: f64) -> Result<Self> {
        let lo = Some(spec.quantile(0.0)).filter(|v| v.is_finite()).unwrap_or_else(|| spec.quantile(1e-3));
        let hi =
            Some(spec.quantile_left(1.0)).filter(|v| v.is_finite()).unwrap_or_else(|| spec.quantile_left(1.0 - 1e-3));
        Self::new(lo, hi, resolution, resolution, n)
    }

    fn x_cells(&self) -> i64 {
        (((self.x_hi - self.x_lo) / self.x_resolution).ceil() as i64).max(1)
    }

    fn p_cells(&self) -> i64 {
        ((1.0 / self.p_resolution).ceil() as i64).max(1)
    }
}

/// Minimiser found by [`brute_force_best`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub measure: AtomicMeasure,
    pub error: f64,
    pub evaluations: u64,
}

/// Lattice point: `n` location indices then `n − 1` level indices.
type Coords = Vec<i64>;

struct Lattice<'a> {
    spec: &'a DistributionSpec,
    eps: f64,
    n: usize,
    x_lo: f64,
    hx: f64,
    nx: i64,
    np: i64,
}

impl Lattice<'_> {
    fn valid(&self, c: &[i64]) -> bool {
        let (xs, ps) = c.split_at(self.n);
        xs.iter().all(|i| (0..=self.nx).contains(i))
            && ps.iter().all(|k| (0..=self.np).contains(k))
            && xs.windows(2).all(|w| w[0] <= w[1])
            && ps.windows(2).all(|w| w[0] <= w[1])
    }

    fn measure(&self, c: &[i64]) -> AtomicMeasure {
        let (xs, ps) = c.split_at(self.n);
        let locations = xs.iter().map(|&i| self.x_lo + i as f64 * self.hx).collect();
        let mut levels: Vec<f64> = ps.iter().map(|&k| k as f64 / self.np as f64).collect();
        levels.push(1.0);
        AtomicMeasure::from_cumulative(locations, &levels).expect("lattice point is a valid measure")
    }

    fn error(&self, c: &[i64]) -> f64 {
        let cdf = self.measure(c).cdf();
        distance_general(&self.spec.cdf_map(), &cdf, self.eps)
    }
}

fn by_error_then_coords(a: &(f64, Coords), b: &(f64, Coords)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

/// Non-decreasing sequences of length `len` drawn from `values`.
fn sorted_tuples(values: &[i64], len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                let floor = prefix.last().copied().unwrap_or(i64::MIN);
                values
                    .iter()
                    .filter(move |&&v| v >= floor)
                    .map(move |&v| {
                        let mut next = prefix.clone();
                        next.push(v);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// A box of lattice points `centre ± h` (per coordinate group).
#[derive(Debug, Clone)]
struct Cell {
    centre: Coords,
    hx: i64,
    hp: i64,
}

impl Lattice<'_> {
    /// A valid lattice point near the centre, and the largest distance
    /// `max{ε·max|Δx|, max|ΔP|}` from it to any point of the cell.
    fn representative(&self, cell: &Cell) -> (Coords, f64) {
        let (cx, cp) = cell.centre.split_at(self.n);
        let fix = |c: &[i64], hi: i64| {
            let mut r: Vec<i64> = c.iter().map(|&v| v.clamp(0, hi)).collect();
            r.sort_unstable();
            let shift = c.iter().zip(&r).map(|(a, b)| (a - b).abs()).max().unwrap_or(0);
            (r, shift)
        };
        let (rx, dx) = fix(cx, self.nx);
        let (rp, dp) = fix(cp, self.np);
        let radius = (self.eps * (cell.hx + dx) as f64 * self.hx).max((cell.hp + dp) as f64 / self.np as f64);
        ([rx, rp].concat(), radius)
    }

    /// Whether the cell can contain a sorted point inside the domain.
    fn may_contain_valid(&self, cell: &Cell) -> bool {
        let (cx, cp) = cell.centre.split_at(self.n);
        let group = |c: &[i64], h: i64, hi: i64| {
            let mut floor = 0;
            c.iter().all(|&v| {
                floor = floor.max(v - h);
                floor <= (v + h).min(hi)
            })
        };
        group(cx, cell.hx, self.nx) && group(cp, cell.hp, self.np)
    }

    /// Halves the coordinate group with the larger contribution to the
    /// cell radius.
    fn split(&self, cell: &Cell) -> Vec<Cell> {
        let x_radius = self.eps * cell.hx as f64 * self.hx;
        let p_radius = cell.hp as f64 / self.np as f64;
        let split_x = cell.hx > 1 && (x_radius >= p_radius || cell.hp <= 1);
        let (hx, hp) = if split_x { (cell.hx / 2, cell.hp) } else { (cell.hx, cell.hp / 2) };
        let mut out = vec![Vec::with_capacity(cell.centre.len())];
        for (d, &c) in cell.centre.iter().enumerate() {
            let (old, new) = if d < self.n { (cell.hx, hx) } else { (cell.hp, hp) };
            let choices: Vec<i64> = if new < old { vec![c - new, c + new] } else { vec![c] };
            out = out
                .into_iter()
                .flat_map(|p: Coords| {
                    choices.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(|centre| Cell { centre, hx, hp }).filter(|c| self.may_contain_valid(c)).collect()
    }

    fn points(&self, cell: &Cell) -> Vec<Coords> {
        let mut out = vec![Vec::with_capacity(cell.centre.len())];
        for (d, &c) in cell.centre.iter().enumerate() {
            let h = if d < self.n { cell.hx } else { cell.hp };
            out = out
                .into_iter()
                .flat_map(|p: Coords| {
                    (c - h..=c + h).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out.retain(|c| self.valid(c));
        out
    }
}

/// Initial cells of half-width `h` (a power of two) tiling `[0, cells]`.
fn tiling(cells: i64, parts: i64) -> (Vec<i64>, i64) {
    let target = (cells + 2 * parts - 1) / (2 * parts);
    let h = (target.max(1) as u64).next_power_of_two() as i64;
    let centres = (0..).map(|k| h * (2 * k + 1)).take_while(|c| c - h <= cells).collect();
    (centres, h)
}

/// Grid minimisation of `d_ε(μ, ν)` over `n`-atom measures `ν` with
/// locations and cumulative levels on the lattice, every error computed by
/// [`distance_general`].
///
/// Branch and bound: for `ν`, `ν′` with the same number of atoms,
/// `d_ε(ν, ν′) ≤ max{ε·max|Δx|, max|ΔP|}`, so the error on a cell is at least
/// the error at a representative minus the cell radius. Cells whose bound
/// cannot beat the best error found by [`PRUNE_SLACK`] are discarded, the
/// rest are halved until single lattice points remain. The result is within
/// `PRUNE_SLACK` of the lattice minimum; among evaluated points, ties go to
/// the lexicographically smallest.
pub fn brute_force_best(spec: &DistributionSpec, n: usize, eps: f64, cfg: &GridConfig) -> Result<OracleResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LevyError::invalid(format!("ε must be positive and finite, got {eps}")));
    }
    if n != cfg.n {
        return Err(LevyError::invalid(format!("grid is for n = {}, asked for n = {n}", cfg.n)));
    }
    let nx = cfg.x_cells();
    let np = cfg.p_cells();
    let lat = Lattice { spec, eps, n, x_lo: cfg.x_lo, hx: (cfg.x_hi - cfg.x_lo) / nx as f64, nx, np };
    let mut search = Search { lat: &lat, memo: HashMap::new(), best: None };

    let (xc, hx0) = tiling(nx, COARSE_X_CELLS);
    let (pc, hp0) = tiling(np, COARSE_P_CELLS);
    let mut frontier: Vec<Cell> = sorted_tuples(&xc, n)
        .into_iter()
        .flat_map(|xs| sorted_tuples(&pc, n - 1).into_iter().map(move |ps| [xs.clone(), ps].concat()))
        .map(|centre| Cell { centre, hx: hx0, hp: hp0 })
        .filter(|c| lat.may_contain_valid(c))
        .collect();
    while !frontier.is_empty() {
        let reps: Vec<(Coords, f64)> = frontier.iter().map(|c| lat.representative(c)).collect();
        search.evaluate(reps.iter().map(|r| r.0.clone()).collect());
        // a greedy descent from the most promising cell sharpens the bound
        if let Some(i) = (0..frontier.len()).min_by(|&i, &j| {
            search.memo[&reps[i].0].total_cmp(&search.memo[&reps[j].0]).then_with(|| reps[i].0.cmp(&reps[j].0))
        }) {
            search.dive(frontier[i].clone());
        }
        let bound = search.bound();
        if bound <= PRUNE_SLACK {
            // errors are non-negative, so nothing can do better by the slack
            break;
        }
        let mut next = Vec::new();
        let mut leaf_points = Vec::new();
        for (cell, (rep, radius)) in frontier.into_iter().zip(reps) {
            if search.memo[&rep] - radius > bound - PRUNE_SLACK {
                continue;
            }
            if cell.hx <= 1 && cell.hp <= 1 {
                leaf_points.extend(lat.points(&cell));
            } else {
                next.extend(lat.split(&cell));
            }
        }
        search.evaluate(leaf_points);
        frontier = next;
    }
    let (error, coords) = search.best.expect("at least one point was evaluated");
    let evaluations = search.memo.len() as u64;
    Ok(OracleResult { measure: lat.measure(&coords), error, evaluations })
}

struct Search<'a> {
    lat: &'a Lattice<'a>,
    memo: HashMap<Coords, f64>,
    best: Option<(f64, Coords)>,
}

impl Search<'_> {
    fn evaluate(&mut self, mut points: Vec<Coords>) {
        points.retain(|c| !self.memo.contains_key(c));
        points.sort();
        points.dedup();
        let lat = self.lat;
        let scored: Vec<(f64, Coords)> = points.into_par_iter().map(|c| (lat.error(&c), c)).collect();
        for cand in scored {
            if self.best.as_ref().is_none_or(|b| by_error_then_coords(&cand, b) == Ordering::Less) {
                self.best = Some(cand.clone());
            }
            self.memo.insert(cand.1, cand.0);
        }
    }

    fn bound(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.0)
    }

    /// Follows the child with the smallest representative error down to a
    /// single lattice neighbourhood and evaluates it.
    fn dive(&mut self, mut cell: Cell) {
        while cell.hx > 1 || cell.hp > 1 {
            let children = self.lat.split(&cell);
            let reps: Vec<Coords> = children.iter().map(|c| self.lat.representative(c).0).collect();
            self.evaluate(reps.clone());
            let Some(i) = (0..children.len()).min_by(|&i, &j| {
                self.memo[&reps[i]].total_cmp(&self.memo[&reps[j]]).then_with(|| reps[i].cmp(&reps[j]))
            }) else {
                return;
            };
            cell = children[i].clone();
        }
        let points = self.lat.points(&cell);
        self.evaluate(points);
    }
}

/// Deviation of the atom locations of one approximation from `μ*_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub n: usize,
    pub deviation: f64,
}

/// `sup_x |#{j : x_j ≤ x}/n − μ*_ε((−∞, x])|` over the `(k − ½)/1000`
/// quantiles of `μ`, `k = 1, …, 1000`.
pub fn empirical_point_check(atoms: &AtomicMeasure, spec: &DistributionSpec, eps: f64) -> Result<PointCheck> {
    let density = PointDensity::new(spec, eps)?;
    let xs = atoms.locations();
    let n = xs.len();
    let m = POINT_CHECK_INTERVALS;
    let deviation = (1..=m)
        .into_par_iter()
        .map(|k| {
            let x = spec.quantile((k as f64 - 0.5) / m as f64);
            let count = xs.partition_point(|&v| v <= x);
            (count as f64 / n as f64 - density.cdf(x)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(PointCheck { n, deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mass;

    #[test]
    fn grid_cap() {
        let err = GridConfig::new(0.0, 1e4, 1e-4, 1e-4, 2).unwrap_err();
        assert!(matches!(err, LevyError::CandidateCap { .. }));
        assert!(GridConfig::new(0.0, 1.0, 1e-4, 1e-4, 4).is_err());
        assert!(GridConfig::new(0.0, 1.0, 0.0, 1e-4, 1).is_err());
    }

    #[test]
    fn sorted_tuples_count() {
        let v: Vec<i64> = (0..5).collect();
        assert_eq!(sorted_tuples(&v, 3).len(), 35);
        assert_eq!(sorted_tuples(&v, 0).len(), 1);
    }

    #[test]
    fn uniform_single_atom() {
        let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let cfg = GridConfig::for_spec(&spec, 1, 1e-3).unwrap();
        let r = brute_force_best(&spec, 1, 1.0, &cfg).unwrap();
        assert!((r.error - 0.25).abs() < 2e-3, "{r:?}");
    }

    #[test]
    fn two_point_is_recovered() {
        let spec = DistributionSpec::two_point(Mass::exact(3, 10)).unwrap();
        let cfg = GridConfig::for_spec(&spec, 2, 1e-3).unwrap();
        let r = brute_force_best(&spec, 2, 1.0, &cfg).unwrap();
        assert!(r.error < 1e-12, "{r:?}");
        assert_eq!(r.measure.locations(), &[-1.0, 1.0]);
        assert!((r.measure.weights()[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn uniform_atoms_match_uniform_density() {
        let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let n = 100;
        let xs = (0..n).map(|j| (j as f64 + 0.5) / n as f64).collect();
        let m = AtomicMeasure::uniform(xs).unwrap();
        let check = empirical_point_check(&m, &spec, 1.0).unwrap();
        assert!(check.deviation <= 0.02, "{check:?}");
        assert!(empirical_point_check(&m, &DistributionSpec::cantor(), 1.0).is_err());
    }
}
