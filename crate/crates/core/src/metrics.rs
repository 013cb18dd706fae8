//! Divergences and distances between distributions on a common finite
//! alphabet. All logarithms are natural, so results are in nats.

use crate::distribution::{kahan_sum, Distribution, ZERO_TOL};
use crate::error::{Error, Result};

fn check_sizes(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::AlphabetMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// `(1+r) ln(1+r) - r`, accurate for small `|r|`.
fn excess(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        // sum_{k>=2} (-1)^k r^k / (k (k-1))
        let mut term = r * r;
        let mut acc = 0.0;
        for k in 2..12 {
            let kf = k as f64;
            let signed = if k % 2 == 0 { term } else { -term };
            acc += signed / (kf * (kf - 1.0));
            term *= r;
        }
        acc
    } else {
        (1.0 + r) * r.ln_1p() - r
    }
}

/// Relative entropy on raw slices. Each term `p ln(p/q)` is split as
/// `q*excess(r) + (p - q)` with `r = (p-q)/q`, which keeps precision when
/// `p` and `q` are close.
pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    check_sizes(p, q)?;
    let mut curv = Vec::with_capacity(p.len());
    let mut lin = Vec::with_capacity(p.len());
    for (x, (&px, &qx)) in p.iter().zip(q).enumerate() {
        if px <= 0.0 {
            continue;
        }
        if qx <= 0.0 {
            return Err(Error::Support {
                symbol: x,
                what: "p(x) > 0 where q(x) = 0 in relative entropy",
            });
        }
        let r = (px - qx) / qx;
        curv.push(qx * excess(r));
        lin.push(px - qx);
    }
    // Zero-mass symbols of p contribute q*excess(-1) + (0 - q) = 0.
    let d = kahan_sum(curv) + kahan_sum(lin);
    Ok(d.max(0.0))
}

/// `D(base + dp || base + dq)` where the perturbations are given
/// separately, so that `p - q = dp - dq` is free of cancellation when both
/// sit close to `base`.
pub(crate) fn kl_perturbed(base: &[f64], dp: &[f64], dq: &[f64]) -> Result<f64> {
    check_sizes(base, dp)?;
    check_sizes(base, dq)?;
    let mut curv = Vec::with_capacity(base.len());
    let mut lin = Vec::with_capacity(base.len());
    for x in 0..base.len() {
        let px = base[x] + dp[x];
        let qx = base[x] + dq[x];
        if px <= 0.0 {
            continue;
        }
        if qx <= 0.0 {
            return Err(Error::Support {
                symbol: x,
                what: "p(x) > 0 where q(x) = 0 in relative entropy",
            });
        }
        let diff = dp[x] - dq[x];
        curv.push(qx * excess(diff / qx));
        lin.push(diff);
    }
    Ok((kahan_sum(curv) + kahan_sum(lin)).max(0.0))
}

/// Relative entropy `D(p || q) = sum p ln(p/q)` in nats, with `0 ln 0 = 0`.
///
/// Fails when `p` is not absolutely continuous with respect to `q`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    kl_slices(p.probs(), q.probs())
}

pub(crate) fn chi_squared_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    check_sizes(p, q)?;
    let mut terms = Vec::with_capacity(p.len());
    for (x, (&px, &qx)) in p.iter().zip(q).enumerate() {
        let diff = px - qx;
        if qx <= 0.0 {
            if diff.abs() > ZERO_TOL {
                return Err(Error::Support {
                    symbol: x,
                    what: "p(x) != q(x) where q(x) = 0 in chi-squared distance",
                });
            }
            continue;
        }
        terms.push(diff * diff / qx);
    }
    Ok(kahan_sum(terms))
}

/// Chi-squared distance `sum (p - q)^2 / q`.
pub fn chi_squared(p: &Distribution, q: &Distribution) -> Result<f64> {
    chi_squared_slices(p.probs(), q.probs())
}

/// Total variation distance `1/2 sum |p - q|`.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_sizes(p.probs(), q.probs())?;
    let tv = 0.5 * kahan_sum(p.probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs()));
    Ok(tv.clamp(0.0, 1.0))
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (-p).ln_1p()
}

/// Bernstein tail bound `exp(-(t^2/2) / (variance_sum + c t / 3))` for a sum
/// of independent zero-mean variables bounded by `c`.
pub fn bernstein_tail_bound(variance_sum: f64, c: f64, t: f64) -> f64 {
    assert!(variance_sum >= 0.0 && c > 0.0 && t >= 0.0);
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    (-(0.5 * t * t) / (variance_sum + c * t / 3.0)).exp()
}
