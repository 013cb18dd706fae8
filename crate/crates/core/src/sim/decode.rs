use rand::Rng;
use rayon::prelude::*;

use crate::channel::TwoWayChannel;
use crate::design::JointInputDist;
use crate::error::{Error, Result};
use crate::output::KeyValue;
use crate::quantities::exact_from_joint;
use crate::sim::codebook::Codebook;
use crate::sim::rng::{categorical, trial_rng};

/// Which message is being decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// User 2 decodes `w1` from `Y2`, knowing `x2` and `u`.
    ToUser2,
    /// User 1 decodes `w2` from `Y1`, knowing `x1` and `u`.
    ToUser1,
}

/// Accumulated log-likelihood ratio. `flagged` marks a `+inf` produced by
/// an observation impossible under the decoder's reference distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub flagged: bool,
}

/// Per-letter `ln W(y | a, b)` and `ln sum_a' P(a'|u) W(y | a', b)` where
/// `a` is the decoded user's input and `b` the known one.
struct ScoreTable {
    ln_num: [[Vec<f64>; 2]; 2],
    ln_den: Vec<[Vec<f64>; 2]>,
}

impl ScoreTable {
    fn new(ch: &TwoWayChannel, j: &JointInputDist, dir: Direction) -> Self {
        let row = |a: u8, b: u8| match dir {
            Direction::ToUser2 => ch.p2(a, b).probs(),
            Direction::ToUser1 => ch.p1(b, a).probs(),
        };
        let pa = |u: usize, a: u8| match dir {
            Direction::ToUser2 => j.px1_given_u(u, a),
            Direction::ToUser1 => j.px2_given_u(u, a),
        };
        let ln = |v: f64| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
        let ln_num = std::array::from_fn(|a| {
            std::array::from_fn(|b| row(a as u8, b as u8).iter().map(|&v| ln(v)).collect())
        });
        let ln_den = (0..j.u_size())
            .map(|u| {
                std::array::from_fn(|b| {
                    let (r0, r1) = (row(0, b as u8), row(1, b as u8));
                    let (w0, w1) = (pa(u, 0), pa(u, 1));
                    r0.iter()
                        .zip(r1)
                        .map(|(&v0, &v1)| {
                            // skip zero weights so that 0 * x adds nothing at all
                            let mut s = 0.0;
                            if w0 > 0.0 {
                                s += w0 * v0;
                            }
                            if w1 > 0.0 {
                                s += w1 * v1;
                            }
                            ln(s)
                        })
                        .collect()
                })
            })
            .collect();
        ScoreTable { ln_num, ln_den }
    }

    fn score(&self, cand: &[u8], known: &[u8], u: &[u8], y: &[usize]) -> Score {
        let mut total = 0.0;
        let mut flagged = false;
        for t in 0..y.len() {
            let (a, b) = (cand[t] as usize, known[t] as usize);
            let num = self.ln_num[a][b][y[t]];
            if num == f64::NEG_INFINITY {
                return Score {
                    value: f64::NEG_INFINITY,
                    flagged: false,
                };
            }
            let den = self.ln_den[u[t] as usize][b][y[t]];
            if den == f64::NEG_INFINITY {
                flagged = true;
                total = f64::INFINITY;
                continue;
            }
            total += num - den;
        }
        Score {
            value: total,
            flagged,
        }
    }
}

/// `sum_t ln [ W(y_t | a_t, b_t) / sum_a' P(a' | u_t) W(y_t | a', b_t) ]`
/// for the candidate codeword `a` of the decoded user, known codeword `b`,
/// schedule `u` (indices into the design's `U` alphabet) and observation `y`.
/// A zero numerator gives `-inf`; a zero denominator under a positive
/// numerator gives a flagged `+inf`.
pub fn decoding_score(
    ch: &TwoWayChannel,
    j: &JointInputDist,
    dir: Direction,
    candidate: &[u8],
    known: &[u8],
    u: &[u8],
    y: &[usize],
) -> Result<Score> {
    let n = y.len();
    if candidate.len() != n || known.len() != n || u.len() != n {
        return Err(Error::InvalidParameter(
            "sequences must have equal length".into(),
        ));
    }
    let size = match dir {
        Direction::ToUser2 => ch.y2_size(),
        Direction::ToUser1 => ch.y1_size(),
    };
    if candidate.iter().chain(known).any(|&x| x > 1)
        || u.iter().any(|&s| s as usize >= j.u_size())
        || y.iter().any(|&s| s >= size)
    {
        return Err(Error::InvalidParameter(
            "symbol outside its alphabet".into(),
        ));
    }
    Ok(ScoreTable::new(ch, j, dir).score(candidate, known, u, y))
}

/// Decoding thresholds in nats. A score equal to the threshold passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Thresholds {
    /// `gamma_i = (1 - mu) * len * I_i` with the exact single-letter
    /// mutual informations of the codebook's design.
    pub fn for_codebook(ch: &TwoWayChannel, cb: &Codebook, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParameter("mu must lie in (0,1)".into()));
        }
        let q = exact_from_joint(ch, cb.joint())?;
        let n = cb.len() as f64;
        Ok(Thresholds {
            gamma1: (1.0 - mu) * n * q.i_x1_y2,
            gamma2: (1.0 - mu) * n * q.i_x2_y1,
        })
    }
}

/// Monte Carlo outcome of threshold decoding with a genie common message.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    /// Trials in which User 2 failed to decode `w1`.
    pub errors1: u64,
    /// Trials in which User 1 failed to decode `w2`.
    pub errors2: u64,
    /// Trials with at least one failure.
    pub errors: u64,
    pub pe_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_half_width: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub mu_slack: f64,
    /// Scores that hit the `+inf` convention.
    pub flagged_scores: u64,
    pub seed: u64,
}

impl SimReport {
    pub fn to_record(&self) -> KeyValue {
        KeyValue::new()
            .int("trials", self.trials)
            .int("errors1", self.errors1)
            .int("errors2", self.errors2)
            .int("errors", self.errors)
            .num("pe_hat", self.pe_hat)
            .num("ci_low", self.ci_low)
            .num("ci_high", self.ci_high)
            .num("ci_half_width", self.ci_half_width)
            .num("gamma1", self.gamma1)
            .num("gamma2", self.gamma2)
            .num("mu_slack", self.mu_slack)
            .int("flagged_scores", self.flagged_scores)
            .int("seed", self.seed)
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    // the endpoints are exactly 0 and 1 at k = 0 and k = n
    let lo = if k == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if k >= n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Default, Clone, Copy)]
struct Counts {
    e1: u64,
    e2: u64,
    any: u64,
    flagged: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            e1: self.e1 + o.e1,
            e2: self.e2 + o.e2,
            any: self.any + o.any,
            flagged: self.flagged + o.flagged,
        }
    }
}

/// Unique-threshold decision: wrong if the true message fails or any
/// competitor passes.
fn decode_fails<'a>(
    table: &ScoreTable,
    m: usize,
    truth: usize,
    gamma: f64,
    word: impl Fn(usize) -> &'a [u8],
    score_of: impl Fn(&ScoreTable, &[u8]) -> Score,
    flagged: &mut u64,
) -> bool {
    let mut test = |w: usize| {
        let s = score_of(table, word(w));
        if s.flagged {
            *flagged += 1;
        }
        s.value >= gamma
    };
    if !test(truth) {
        return true;
    }
    (0..m).filter(|&w| w != truth).any(test)
}

/// Monte Carlo estimate with explicit thresholds. Trial `t` draws from
/// stream `t` of `seed`, so the report does not depend on scheduling.
pub fn estimate_with_thresholds(
    ch: &TwoWayChannel,
    cb: &Codebook,
    thresholds: Thresholds,
    mu_slack: f64,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let j = cb.joint();
    let t2 = ScoreTable::new(ch, j, Direction::ToUser2);
    let t1 = ScoreTable::new(ch, j, Direction::ToUser1);
    let s = *cb.sizes();
    let n = cb.len();
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let w0 = rng.random_range(0..s.m0);
            let w1 = rng.random_range(0..s.m1());
            let w2 = rng.random_range(0..s.m2());
            let (u, x1, x2) = (cb.u_word(w0), cb.x1_word(w0, w1), cb.x2_word(w0, w2));
            let mut y1 = Vec::with_capacity(n);
            let mut y2 = Vec::with_capacity(n);
            for k in 0..n {
                y1.push(categorical(&mut rng, ch.p1(x1[k], x2[k]).probs()));
                y2.push(categorical(&mut rng, ch.p2(x1[k], x2[k]).probs()));
            }
            let mut c = Counts::default();
            let fail1 = decode_fails(
                &t2,
                s.m1(),
                w1,
                thresholds.gamma1,
                |w| cb.x1_word(w0, w),
                |tab, x| tab.score(x, x2, u, &y2),
                &mut c.flagged,
            );
            let fail2 = decode_fails(
                &t1,
                s.m2(),
                w2,
                thresholds.gamma2,
                |w| cb.x2_word(w0, w),
                |tab, x| tab.score(x, x1, u, &y1),
                &mut c.flagged,
            );
            c.e1 = u64::from(fail1);
            c.e2 = u64::from(fail2);
            c.any = u64::from(fail1 || fail2);
            c
        })
        .reduce(Counts::default, |a, b| a + b);
    let (lo, hi) = wilson_interval(counts.any, trials);
    Ok(SimReport {
        trials,
        errors1: counts.e1,
        errors2: counts.e2,
        errors: counts.any,
        pe_hat: counts.any as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        ci_half_width: 0.5 * (hi - lo),
        gamma1: thresholds.gamma1,
        gamma2: thresholds.gamma2,
        mu_slack,
        flagged_scores: counts.flagged,
        seed,
    })
}

/// Monte Carlo estimate of the block error probability with thresholds
/// `gamma_i = (1 - mu) n I_i`.
pub fn estimate_error_probability(
    ch: &TwoWayChannel,
    cb: &Codebook,
    mu_slack: f64,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    let th = Thresholds::for_codebook(ch, cb, mu_slack)?;
    estimate_with_thresholds(ch, cb, th, mu_slack, trials, seed)
}
