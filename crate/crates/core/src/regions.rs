//! Covert throughput regions in units of nats per `sqrt(n * delta)`:
//! public time sharing, the coordinated capacity region, the general
//! outer bound, and the per-symbol weight budget.

use log::warn;
use rayon::prelude::*;

use crate::channel::{check_assumptions, Link, RowId, TwoWayChannel};
use crate::distribution::{kahan_sum, Distribution};
use crate::error::{Error, Result};
use crate::metrics::{chi_squared, kl_divergence};

/// Default number of `lambda` points in a boundary sweep.
pub const DEFAULT_LAMBDA_GRID: usize = 201;
/// Default simplex resolution of the outer bound.
pub const DEFAULT_SIMPLEX_RESOLUTION: usize = 50;

/// Constants attached to a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionConstants {
    /// `c1 = sqrt(2 / chi2(Q10 || Q00))`, `c2 = sqrt(2 / chi2(Q01 || Q00))`.
    Pts { c1: f64, c2: f64, delta1_frac: f64 },
    /// `c_lambda = sqrt(2 / chi2(lambda Q10 + (1-lambda) Q01 || Q00))`.
    Capacity { c_lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    pub constants: RegionConstants,
}

/// Weights `rho_ij` on the non-innocent input pairs (`rho00 = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoWeights {
    pub rho01: f64,
    pub rho10: f64,
    pub rho11: f64,
}

impl RhoWeights {
    pub fn new(rho01: f64, rho10: f64, rho11: f64) -> Result<Self> {
        if [rho01, rho10, rho11]
            .iter()
            .any(|v| v.is_nan() || *v < 0.0 || !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "rho weights must be non-negative".into(),
            ));
        }
        if (rho01 + rho10 + rho11 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "rho weights sum to {}, not 1",
                rho01 + rho10 + rho11
            )));
        }
        Ok(RhoWeights {
            rho01,
            rho10,
            rho11,
        })
    }

    /// `sum rho_ij Q_ij`.
    pub fn eve_mixture(&self, ch: &TwoWayChannel) -> Distribution {
        mix3(self, ch.q(0, 1), ch.q(1, 0), ch.q(1, 1))
    }
}

fn mix3(
    rho: &RhoWeights,
    a01: &Distribution,
    a10: &Distribution,
    a11: &Distribution,
) -> Distribution {
    let v = (0..a01.len())
        .map(|k| {
            kahan_sum([
                rho.rho01 * a01.probs()[k],
                rho.rho10 * a10.probs()[k],
                rho.rho11 * a11.probs()[k],
            ])
        })
        .collect();
    Distribution::from_raw(v)
}

/// One grid point of the outer bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversePoint {
    pub rho: RhoWeights,
    pub r1: f64,
    pub r2: f64,
    pub tau: f64,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {v} is outside [0,1]"
        )))
    }
}

/// Warns when the channel is not physically degraded in both directions.
pub fn warn_if_not_degraded(ch: &TwoWayChannel) {
    let rep = check_assumptions(ch);
    if !(rep.degraded_dir1 && rep.degraded_dir2) {
        warn!(
            "channel is not physically degraded (dir1: {}, dir2: {}); region formulas are evaluated anyway",
            rep.degraded_dir1, rep.degraded_dir2
        );
    }
}

/// `sqrt(2 / chi2(p || Q00))`; a zero distance is an unbounded direction.
fn inv_root_chi(p: &Distribution, q00: &Distribution, what: &str) -> Result<f64> {
    let chi = chi_squared(p, q00)?;
    if chi <= 0.0 {
        return Err(Error::UnboundedDirection(what.to_string()));
    }
    Ok((2.0 / chi).sqrt())
}

struct LinkDivergences {
    d2: f64,
    d1: f64,
}

fn link_divergences(ch: &TwoWayChannel) -> Result<LinkDivergences> {
    Ok(LinkDivergences {
        d2: kl_divergence(ch.p2(1, 0), ch.p2(0, 0))?,
        d1: kl_divergence(ch.p1(0, 1), ch.p1(0, 0))?,
    })
}

fn pts_point(
    ch: &TwoWayChannel,
    div: &LinkDivergences,
    lambda: f64,
    delta1_frac: f64,
) -> Result<RegionPoint> {
    check_unit("lambda", lambda)?;
    check_unit("delta1_frac", delta1_frac)?;
    let q00 = ch.q(0, 0);
    let w1 = lambda * delta1_frac;
    let w2 = (1.0 - lambda) * (1.0 - delta1_frac);
    let c1 = inv_root_chi(ch.q(1, 0), q00, "Q10 vs Q00");
    let c2 = inv_root_chi(ch.q(0, 1), q00, "Q01 vs Q00");
    let r1 = if w1 == 0.0 {
        0.0
    } else {
        w1.sqrt() * c1.clone()? * div.d2
    };
    let r2 = if w2 == 0.0 {
        0.0
    } else {
        w2.sqrt() * c2.clone()? * div.d1
    };
    Ok(RegionPoint {
        lambda,
        r1,
        r2,
        constants: RegionConstants::Pts {
            c1: c1.unwrap_or(f64::INFINITY),
            c2: c2.unwrap_or(f64::INFINITY),
            delta1_frac,
        },
    })
}

/// Public time sharing with a fraction `delta1_frac` of the covertness
/// budget spent by User 1: `r1 = sqrt(2 lambda delta1_frac / chi2(Q10||Q00)) D(P2_10||P2_00)`
/// and symmetrically for `r2`.
pub fn pts_region_point(ch: &TwoWayChannel, lambda: f64, delta1_frac: f64) -> Result<RegionPoint> {
    warn_if_not_degraded(ch);
    pts_point(ch, &link_divergences(ch)?, lambda, delta1_frac)
}

fn capacity_point(ch: &TwoWayChannel, div: &LinkDivergences, lambda: f64) -> Result<RegionPoint> {
    check_unit("lambda", lambda)?;
    let mix = Distribution::mixture(&[(lambda, ch.q(1, 0)), (1.0 - lambda, ch.q(0, 1))])?;
    let c = inv_root_chi(&mix, ch.q(0, 0), "lambda-mixture vs Q00")?;
    Ok(RegionPoint {
        lambda,
        r1: lambda * c * div.d2,
        r2: (1.0 - lambda) * c * div.d1,
        constants: RegionConstants::Capacity { c_lambda: c },
    })
}

/// Boundary point of the coordinated covert capacity region at `lambda`.
pub fn capacity_region_point(ch: &TwoWayChannel, lambda: f64) -> Result<RegionPoint> {
    warn_if_not_degraded(ch);
    capacity_point(ch, &link_divergences(ch)?, lambda)
}

/// `lambda_k = k / (points - 1)`.
pub fn lambda_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParameter(
            "lambda grid needs at least 2 points".into(),
        ));
    }
    let m = (points - 1) as f64;
    Ok((0..points).map(|k| k as f64 / m).collect())
}

/// Capacity boundary over a uniform `lambda` grid.
pub fn capacity_sweep(ch: &TwoWayChannel, points: usize) -> Result<Vec<RegionPoint>> {
    warn_if_not_degraded(ch);
    let div = link_divergences(ch)?;
    lambda_grid(points)?
        .into_iter()
        .map(|l| capacity_point(ch, &div, l))
        .collect()
}

/// Public time-sharing boundary with the optimal split `delta1 = lambda * delta`.
pub fn pts_sweep(ch: &TwoWayChannel, points: usize) -> Result<Vec<RegionPoint>> {
    warn_if_not_degraded(ch);
    let div = link_divergences(ch)?;
    lambda_grid(points)?
        .into_iter()
        .map(|l| pts_point(ch, &div, l, l))
        .collect()
}

/// `s * D(mix || base)` for `mix = (w_a A + w_b B) / s`, `s = w_a + w_b`;
/// zero when `s = 0`.
fn weighted_mixture_divergence(
    wa: f64,
    a: &Distribution,
    wb: f64,
    b: &Distribution,
    base: &Distribution,
) -> Result<f64> {
    let s = wa + wb;
    if s == 0.0 {
        return Ok(0.0);
    }
    let mix = Distribution::mixture(&[(wa / s, a), (wb / s, b)])?;
    Ok(s * kl_divergence(&mix, base)?)
}

/// Outer bound evaluated at a single weight vector. `Ok(None)` when the
/// eavesdropper mixture is not absolutely continuous w.r.t. `Q00`, i.e. the
/// weights would raise an alarm.
pub fn converse_point(ch: &TwoWayChannel, rho: RhoWeights) -> Result<Option<ConversePoint>> {
    let q00 = ch.q(0, 0);
    let m = rho.eve_mixture(ch);
    if !m.is_abs_continuous_wrt(q00) {
        return Ok(None);
    }
    let tau = inv_root_chi(&m, q00, "rho-mixture vs Q00")?;
    let terms = |link: Link| -> Result<f64> {
        let row = |x1, x2| ch.row(RowId::new(link, x1, x2));
        let base = row(0, 0);
        let mut acc = Vec::new();
        for (w, x1, x2) in [(rho.rho01, 0, 1), (rho.rho10, 1, 0), (rho.rho11, 1, 1)] {
            if w > 0.0 {
                acc.push(w * kl_divergence(row(x1, x2), base)?);
            }
        }
        let sub = match link {
            // inputs with x2 = 1, seen through Y2
            Link::User2 => {
                weighted_mixture_divergence(rho.rho01, row(0, 1), rho.rho11, row(1, 1), base)?
            }
            // inputs with x1 = 1, seen through Y1
            _ => weighted_mixture_divergence(rho.rho10, row(1, 0), rho.rho11, row(1, 1), base)?,
        };
        // The bracket is a Jensen gap and hence non-negative; clamp roundoff.
        Ok((kahan_sum(acc) - sub).max(0.0))
    };
    Ok(Some(ConversePoint {
        rho,
        r1: tau * terms(Link::User2)?,
        r2: tau * terms(Link::User1)?,
        tau,
    }))
}

/// Pareto-maximal points of the outer bound over a barycentric grid of the
/// weight simplex with step `1 / resolution`. Alarm-raising weights are
/// excluded, and so are weights whose mixture equals `Q00` (the bound is
/// vacuous there; a warning reports how many). This is an outer bound only.
pub fn converse_frontier(ch: &TwoWayChannel, resolution: usize) -> Result<Vec<ConversePoint>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(
            "simplex resolution must be at least 2".into(),
        ));
    }
    ch.warn_if_defaulted(
        &[
            RowId::new(Link::User1, 1, 0),
            RowId::new(Link::User1, 1, 1),
            RowId::new(Link::User2, 0, 1),
            RowId::new(Link::User2, 1, 1),
            RowId::new(Link::Eve, 1, 1),
        ],
        "outer bound",
    );
    let r = resolution as f64;
    let cells: Vec<(usize, usize)> = (0..=resolution)
        .flat_map(|i| (0..=resolution - i).map(move |j| (i, j)))
        .collect();
    let evaluated = cells
        .par_iter()
        .map(|&(i, j)| {
            let k = resolution - i - j;
            let rho = RhoWeights {
                rho01: i as f64 / r,
                rho10: j as f64 / r,
                rho11: k as f64 / r,
            };
            match converse_point(ch, rho) {
                Err(Error::UnboundedDirection(_)) => Ok((None, true)),
                other => other.map(|p| (p, false)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let unbounded = evaluated.iter().filter(|(_, u)| *u).count();
    if unbounded > 0 {
        warn!("outer bound is unbounded at {unbounded} weight vectors; they are omitted");
    }
    let points: Vec<ConversePoint> = evaluated.into_iter().filter_map(|(p, _)| p).collect();
    let coords: Vec<(f64, f64)> = points.iter().map(|p| (p.r1, p.r2)).collect();
    let keep = pareto_mask(&coords);
    Ok(points
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect())
}

/// `mask[i]` is true when no other point weakly dominates point `i` in both
/// coordinates with a strict improvement in one. Exact duplicates all survive.
pub fn pareto_mask(points: &[(f64, f64)]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[b]
            .0
            .total_cmp(&points[a].0)
            .then(points[b].1.total_cmp(&points[a].1))
    });
    let mut keep = vec![false; points.len()];
    // Best r2 among points with strictly larger r1.
    let mut best_r2 = f64::NEG_INFINITY;
    let mut g = 0;
    while g < order.len() {
        let r1 = points[order[g]].0;
        let mut h = g;
        while h < order.len() && points[order[h]].0 == r1 {
            h += 1;
        }
        let group_max = points[order[g]].1;
        for &idx in &order[g..h] {
            let r2 = points[idx].1;
            keep[idx] = r2 == group_max && r2 > best_r2;
        }
        best_r2 = best_r2.max(group_max);
        g = h;
    }
    keep
}

/// Symmetric Hausdorff distance between two finite point sets in the plane.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let directed = |x: &[(f64, f64)], y: &[(f64, f64)]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p.0 - q.0).hypot(p.1 - q.1))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Maximum average codeword weight compatible with the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightBudget {
    pub mu: f64,
    /// The weights would emit a symbol that `Q00` never produces.
    pub alarm: bool,
}

/// `mu_n = sqrt(2 delta / (n chi2(sum rho_ij Q_ij || Q00)))`.
pub fn weight_budget(
    ch: &TwoWayChannel,
    rho: RhoWeights,
    n: u64,
    delta: f64,
) -> Result<WeightBudget> {
    if n == 0 || delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter("need n >= 1 and delta > 0".into()));
    }
    let m = rho.eve_mixture(ch);
    let q00 = ch.q(0, 0);
    if !m.is_abs_continuous_wrt(q00) {
        return Ok(WeightBudget {
            mu: 0.0,
            alarm: true,
        });
    }
    let chi = chi_squared(&m, q00)?;
    if chi <= 0.0 {
        return Err(Error::UnboundedDirection("rho-mixture equals Q00".into()));
    }
    Ok(WeightBudget {
        mu: (2.0 * delta / (n as f64 * chi)).sqrt(),
        alarm: false,
    })
}
