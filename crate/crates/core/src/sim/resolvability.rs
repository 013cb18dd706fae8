use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::channel::TwoWayChannel;
use crate::design::{eavesdropper_marginal, CovertInputDesign};
use crate::distribution::{kahan_sum, Distribution};
use crate::error::{Error, Result};
use crate::metrics::{binary_entropy, kl_divergence, kl_slices};
use crate::quantities::{
    exact_finite_n_quantities, exact_from_joint, leading_order_quantities, InfoQuantities,
};
use crate::sim::codebook::{Codebook, CodebookSizes};

/// Default cap on `|Z|^n` for exact enumeration.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 20;
/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "TWOWAY_COVERT_ENUM_CAP";

fn enum_cap() -> u128 {
    std::env::var(ENUM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

/// Fixed chunk count so that the summation order, and hence every bit of
/// the result, is independent of the thread pool.
const CHUNKS: usize = 16;

/// Exact average output law over all messages, with the enumeration cap
/// read from [`ENUM_CAP_ENV`].
pub fn exact_induced_distribution(ch: &TwoWayChannel, cb: &Codebook) -> Result<Distribution> {
    exact_induced_distribution_with_cap(ch, cb, enum_cap())
}

/// `Q^n(z^n) = avg_{w0,w1,w2} prod_t Q_{x1_t x2_t}(z_t)` over `Z^n`,
/// indexed big-endian (the first symbol is most significant).
pub fn exact_induced_distribution_with_cap(
    ch: &TwoWayChannel,
    cb: &Codebook,
    cap: u128,
) -> Result<Distribution> {
    let z = ch.z_size();
    let n = cb.len();
    let needed = (z as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let s = cb.sizes();
    // Identical codeword pairs contribute identical products.
    let mut pairs: BTreeMap<(&[u8], &[u8]), u64> = BTreeMap::new();
    for w0 in 0..s.m0 {
        for w1 in 0..s.m1() {
            for w2 in 0..s.m2() {
                *pairs
                    .entry((cb.x1_word(w0, w1), cb.x2_word(w0, w2)))
                    .or_default() += 1;
            }
        }
    }
    let total = (s.m0 * s.m1() * s.m2()) as f64;
    let pairs: Vec<_> = pairs.into_iter().collect();
    let size = needed as usize;
    let chunk = pairs.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Vec<f64>> = pairs
        .par_chunks(chunk)
        .map(|group| {
            let mut acc = vec![0.0; size];
            let mut prod = Vec::with_capacity(size);
            let mut next = Vec::with_capacity(size);
            for ((x1, x2), count) in group {
                prod.clear();
                prod.push(*count as f64 / total);
                for t in 0..n {
                    let row = ch.q(x1[t], x2[t]).probs();
                    next.clear();
                    for &p in &prod {
                        next.extend(row.iter().map(|&q| p * q));
                    }
                    std::mem::swap(&mut prod, &mut next);
                }
                for (a, p) in acc.iter_mut().zip(&prod) {
                    *a += p;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; size];
    for part in &partials {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    Ok(Distribution::from_raw(out))
}

/// `Q^{(x) n}` over `Z^n`, big-endian.
fn product_distribution(q: &[f64], n: usize) -> Vec<f64> {
    let mut prod = vec![1.0];
    for _ in 0..n {
        prod = prod
            .iter()
            .flat_map(|&p| q.iter().map(move |&v| p * v))
            .collect();
    }
    prod
}

/// Exact covertness diagnostics of one realized block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvabilityReport {
    /// `D(Q^n || Q_Z^{(x) n})`
    pub d_hat_vs_qz: f64,
    /// `D(Q^n || Q00^{(x) n})`
    pub d_hat_vs_q00: f64,
    /// `|d_hat_vs_q00 - n D(Q_Z || Q00)|`
    pub gap: f64,
    /// Smallest positive `Q00(z)`.
    pub nu_min: f64,
    /// Sum of the four soft-covering terms at slack `mu`.
    pub four_term_bound: f64,
}

/// `e^{t1}/(M1p M2p M0) + e^{t2}/(M2p M0) + e^{t3}/(M1p M0) + e^{t4}/M0` with
/// `t = (1 + mu) n (I(X1X2;Z), I(X2U;Z), I(X1U;Z), I(U;Z))`. The `M2p M0`
/// term pairs with `P_{Z|X2U}` and hence with `I(X2,U;Z)`.
pub fn four_term_bound(q: &InfoQuantities, sizes: &CodebookSizes, n: f64, mu: f64) -> f64 {
    let t = |i: f64| ((1.0 + mu) * n * i).exp();
    let (m0, m1p, m2p) = (sizes.m0 as f64, sizes.m1p as f64, sizes.m2p as f64);
    t(q.i_x1x2_z) / (m1p * m2p * m0)
        + t(q.i_x2u_z) / (m2p * m0)
        + t(q.i_x1u_z) / (m1p * m0)
        + t(q.i_u_z) / m0
}

pub fn resolvability_report(
    ch: &TwoWayChannel,
    cb: &Codebook,
    mu: f64,
) -> Result<ResolvabilityReport> {
    let q_hat = exact_induced_distribution(ch, cb)?;
    let n = cb.len();
    let qz = eavesdropper_marginal(ch, cb.joint());
    let q00 = ch.q(0, 0);
    let qz_n = product_distribution(qz.probs(), n);
    let q00_n = product_distribution(q00.probs(), n);
    let d_hat_vs_qz = kl_slices(q_hat.probs(), &qz_n)?;
    let d_hat_vs_q00 = kl_slices(q_hat.probs(), &q00_n).map_err(|e| match e {
        Error::Support { .. } => Error::AlarmEmitted,
        other => other,
    })?;
    let d_qz = kl_divergence(&qz, q00)?;
    let nu_min = q00
        .probs()
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let q = exact_from_joint(ch, cb.joint())?;
    Ok(ResolvabilityReport {
        d_hat_vs_qz,
        d_hat_vs_q00,
        gap: (d_hat_vs_q00 - n as f64 * d_qz).abs(),
        nu_min,
        four_term_bound: four_term_bound(&q, cb.sizes(), n as f64, mu),
    })
}

/// Rate conditions in nats: upper bounds for reliable decoding and lower
/// bounds for soft covering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateThresholds {
    /// `log M1 < (1 - mu) a1 sqrt(n) D(P2_10 || P2_00)`
    pub log_m1_max: f64,
    /// `log M2 < (1 - mu) a2 sqrt(n) D(P1_01 || P1_00)`
    pub log_m2_max: f64,
    /// `log M1p M2p M0 > (1 + mu) sqrt(n) (a1 D(Q10||Q00) + a2 D(Q01||Q00))`
    pub log_m1p_m2p_m0_min: f64,
    /// `log M2p M0 > (1 + mu) sqrt(n) a2 D(Q01||Q00)`
    pub log_m2p_m0_min: f64,
    /// `log M1p M0 > (1 + mu) sqrt(n) a1 D(Q10||Q00)`
    pub log_m1p_m0_min: f64,
    /// `log M0 > (1 + mu) n I(U;Z)`, exact.
    pub log_m0_min: f64,
}

pub fn rate_thresholds(
    ch: &TwoWayChannel,
    d: &CovertInputDesign,
    mu: f64,
) -> Result<RateThresholds> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidParameter("mu must lie in [0,1]".into()));
    }
    let n = d.n as f64;
    let lead = leading_order_quantities(ch, d)?;
    let exact = exact_finite_n_quantities(ch, d)?;
    // leading terms carry n^{-1/2}; multiplying by n gives sqrt(n) scaling
    Ok(RateThresholds {
        log_m1_max: (1.0 - mu) * n * lead.i_x1_y2,
        log_m2_max: (1.0 - mu) * n * lead.i_x2_y1,
        log_m1p_m2p_m0_min: (1.0 + mu) * n * lead.i_x1x2_z,
        log_m2p_m0_min: (1.0 + mu) * n * lead.i_x2u_z,
        log_m1p_m0_min: (1.0 + mu) * n * lead.i_x1u_z,
        log_m0_min: (1.0 + mu) * n * exact.i_u_z,
    })
}

/// Per-block inputs of the chaining bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStats {
    pub divergence: f64,
    pub pe: f64,
    pub m1s: u64,
    pub m2s: u64,
}

/// `2 sum_b D_b + sum_b [h(pe_b) + pe_b ln m1s_b + h(pe_b) + pe_b ln m2s_b]`.
pub fn chaining_bound(blocks: &[BlockStats]) -> Result<f64> {
    let mut terms = Vec::with_capacity(2 * blocks.len());
    for b in blocks {
        if !(0.0..=1.0).contains(&b.pe)
            || b.divergence.is_nan()
            || b.divergence < 0.0
            || b.m1s == 0
            || b.m2s == 0
        {
            return Err(Error::InvalidParameter(
                "blocks need pe in [0,1], divergence >= 0 and secret sizes >= 1".into(),
            ));
        }
        terms.push(2.0 * b.divergence);
        let h = binary_entropy(b.pe);
        terms.push(2.0 * h + b.pe * ((b.m1s as f64).ln() + (b.m2s as f64).ln()));
    }
    Ok(kahan_sum(terms))
}
