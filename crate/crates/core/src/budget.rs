//! Allocation of the covertness budget along the capacity boundary.
//!
//! With normalized throughputs `r1 = sqrt(lambda * delta1)` and
//! `r2 = sqrt((1 - lambda) * (delta - delta1))`, the area under the curve
//! traced by a path `lambda -> delta1(lambda)` is maximized by the linear
//! allocation `delta1 = lambda * delta`. [`optimize_budget_path`] recovers it
//! numerically.

use log::warn;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetPath {
    lambdas: Vec<f64>,
    delta1: Vec<f64>,
    delta: f64,
}

impl BudgetPath {
    /// Validates an increasing grid in `[0,1]` and values in `[0, delta]`.
    /// When the grid reaches `0` or `1` the pinned values `delta1(0) = 0` and
    /// `delta1(1) = delta` are enforced.
    pub fn new(lambdas: Vec<f64>, delta1: Vec<f64>, delta: f64) -> Result<Self> {
        if delta.is_nan() || delta <= 0.0 || !delta.is_finite() {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
        if lambdas.len() != delta1.len() || lambdas.is_empty() {
            return Err(Error::InvalidParameter(
                "grid and values differ in length".into(),
            ));
        }
        if lambdas
            .windows(2)
            .any(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1])
            || lambdas[0] < 0.0
            || lambdas[lambdas.len() - 1] > 1.0
        {
            return Err(Error::InvalidParameter(
                "lambda grid must increase within [0,1]".into(),
            ));
        }
        if delta1.iter().any(|&v| !(0.0..=delta).contains(&v)) {
            return Err(Error::InvalidParameter(
                "delta1 must lie in [0, delta]".into(),
            ));
        }
        if (lambdas[0] == 0.0 && delta1[0] != 0.0)
            || (lambdas[lambdas.len() - 1] == 1.0 && delta1[delta1.len() - 1] != delta)
        {
            return Err(Error::InvalidParameter(
                "boundary conditions delta1(0) = 0, delta1(1) = delta violated".into(),
            ));
        }
        Ok(BudgetPath {
            lambdas,
            delta1,
            delta,
        })
    }

    /// Uniform grid with `delta1 = delta * f(lambda)`.
    pub fn from_fn(delta: f64, grid_size: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let m = grid_size.saturating_sub(1).max(1) as f64;
        let lambdas: Vec<f64> = (0..grid_size).map(|k| k as f64 / m).collect();
        let delta1 = lambdas
            .iter()
            .map(|&l| (delta * f(l)).clamp(0.0, delta))
            .collect();
        BudgetPath::new(lambdas, delta1, delta)
    }

    /// The optimum `delta1 = lambda * delta` on a uniform grid.
    pub fn linear(delta: f64, grid_size: usize) -> Result<Self> {
        BudgetPath::from_fn(delta, grid_size, |l| l)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn delta1_values(&self) -> &[f64] {
        &self.delta1
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `max |delta1(lambda) - lambda * delta|`.
    pub fn max_deviation_from_linear(&self) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.delta1)
            .map(|(l, d)| (d - l * self.delta).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathArea {
    /// Signed trapezoid integral of `r2 dr1`.
    pub area: f64,
    pub r1_monotone: bool,
    /// Fewer than three grid points; area reported as 0.
    pub degenerate: bool,
}

fn r1(l: f64, d1: f64) -> f64 {
    (l * d1).sqrt()
}

fn r2(l: f64, d1: f64, delta: f64) -> f64 {
    ((1.0 - l) * (delta - d1).max(0.0)).sqrt()
}

/// Signed area between the polygon through `(r1_k, r2_k)` and the `r1`
/// axis, summed over segments `lo..=hi` (segment `k` joins nodes `k` and
/// `k + 1`). A path on which `r1` backtracks cancels its own area.
fn area_terms(path: &BudgetPath, r1s: &[f64], lo: usize, hi: usize) -> f64 {
    (lo..=hi)
        .map(|k| {
            let (a, b) = (k, k + 1);
            let r2a = r2(path.lambdas[a], path.delta1[a], path.delta);
            let r2b = r2(path.lambdas[b], path.delta1[b], path.delta);
            0.5 * (r2a + r2b) * (r1s[b] - r1s[a])
        })
        .sum()
}

/// Area of the region traced by the path, `int r2 dr1`, by the trapezoid
/// rule on the polygon through the grid points.
pub fn area_of_budget_path(path: &BudgetPath) -> PathArea {
    let n = path.lambdas.len();
    if n < 3 {
        warn!("budget path has {n} grid points; area is degenerate");
        return PathArea {
            area: 0.0,
            r1_monotone: true,
            degenerate: true,
        };
    }
    let r1s: Vec<f64> = path
        .lambdas
        .iter()
        .zip(&path.delta1)
        .map(|(&l, &d)| r1(l, d))
        .collect();
    let r1_monotone = r1s.windows(2).all(|w| w[1] >= w[0]);
    if !r1_monotone {
        warn!("r1 is not monotone along the budget path; returning the signed integral");
    }
    PathArea {
        area: area_terms(path, &r1s, 0, n - 2),
        r1_monotone,
        degenerate: false,
    }
}

/// Result of coordinate ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedPath {
    pub path: BudgetPath,
    pub area: f64,
    pub sweeps: usize,
}

pub const MAX_SWEEPS: usize = 10_000;
const GAIN_TOL: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Coordinate ascent on the interior values of `start`, boundary pinned,
/// until one full sweep gains less than `1e-10` in area.
///
/// Each update keeps `r1` non-decreasing along the path. Without that
/// constraint the discretized signed area rewards paths that wind around
/// the same region several times and is not bounded by the true region.
pub fn optimize_from(start: BudgetPath) -> Result<OptimizedPath> {
    let mut path = start;
    let n = path.lambdas.len();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "budget path needs at least 3 points".into(),
        ));
    }
    let tol = 1e-12 * path.delta;
    let mut r1s: Vec<f64> = (0..n)
        .map(|i| r1(path.lambdas[i], path.delta1[i]))
        .collect();
    if r1s.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "start path must have non-decreasing r1".into(),
        ));
    }
    for sweep in 1..=MAX_SWEEPS {
        let mut gain = 0.0;
        for i in 1..n - 1 {
            let l = path.lambdas[i];
            // r1(v) = sqrt(l v) must stay between its neighbours
            let lo_v = (r1s[i - 1] * r1s[i - 1] / l).min(path.delta);
            let hi_v = (r1s[i + 1] * r1s[i + 1] / l).min(path.delta);
            if hi_v <= lo_v {
                continue;
            }
            let before = area_terms(&path, &r1s, i - 1, i);
            let old = path.delta1[i];
            let local = |v: f64| {
                let mut p = path.clone();
                p.delta1[i] = v;
                let mut rs = r1s.clone();
                rs[i] = r1(l, v);
                area_terms(&p, &rs, i - 1, i)
            };
            let best = golden_max(lo_v, hi_v, tol, local);
            path.delta1[i] = best;
            r1s[i] = r1(l, best);
            let after = area_terms(&path, &r1s, i - 1, i);
            // the objective is flat near its optimum; ignore rounding-level gains
            if after - before > 4.0 * f64::EPSILON * before.abs() {
                gain += after - before;
            } else {
                path.delta1[i] = old;
                r1s[i] = r1(l, old);
            }
        }
        if gain < GAIN_TOL {
            let area = area_of_budget_path(&path).area;
            return Ok(OptimizedPath {
                path,
                area,
                sweeps: sweep,
            });
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

/// Maximizes the area over paths on a uniform grid of `grid_size` points,
/// starting from `delta1 = delta * lambda^2`.
pub fn optimize_budget_path(delta: f64, grid_size: usize) -> Result<BudgetPath> {
    if grid_size < 11 {
        return Err(Error::InvalidParameter(
            "grid_size must be at least 11".into(),
        ));
    }
    let start = BudgetPath::from_fn(delta, grid_size, |l| l * l)?;
    Ok(optimize_from(start)?.path)
}
