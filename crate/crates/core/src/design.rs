//! Covert input designs: time sharing (TS) and sparse time sharing (STS).
//!
//! Both designs make `X1` and `X2` conditionally independent given an
//! auxiliary schedule `U`, never let both users send `1` at once, and put
//! total weight `1 - P(0,0) = (a1 + a2) / sqrt(n)` on non-innocent inputs,
//! where `(a1, a2)` are [`CovertInputDesign::weights`].

use crate::channel::TwoWayChannel;
use crate::distribution::{kahan_sum, Distribution};
use crate::error::{Error, Result};

/// Schedule family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// `U in {1,2}`, `P_U(1) = q`; the active user sends `1` w.p. `p / sqrt(n)`.
    TimeSharing { q: f64 },
    /// `U in {0,1,2}`, `P_U(i) = q_i n^{-1/4}`; the active user sends `1`
    /// w.p. `p / n^{1/4}`.
    SparseTimeSharing { q1: f64, q2: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::TimeSharing { .. } => "ts",
            Scheme::SparseTimeSharing { .. } => "sts",
        }
    }
}

/// A design family without a blocklength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignFamily {
    pub scheme: Scheme,
    pub p1: f64,
    pub p2: f64,
}

impl DesignFamily {
    pub fn at(&self, n: u64) -> CovertInputDesign {
        CovertInputDesign {
            scheme: self.scheme,
            p1: self.p1,
            p2: self.p2,
            n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovertInputDesign {
    pub scheme: Scheme,
    pub p1: f64,
    pub p2: f64,
    pub n: u64,
}

impl CovertInputDesign {
    pub fn time_sharing(q: f64, p1: f64, p2: f64, n: u64) -> Self {
        CovertInputDesign {
            scheme: Scheme::TimeSharing { q },
            p1,
            p2,
            n,
        }
    }

    pub fn sparse_time_sharing(q1: f64, q2: f64, p1: f64, p2: f64, n: u64) -> Self {
        CovertInputDesign {
            scheme: Scheme::SparseTimeSharing { q1, q2 },
            p1,
            p2,
            n,
        }
    }

    pub fn family(&self) -> DesignFamily {
        DesignFamily {
            scheme: self.scheme,
            p1: self.p1,
            p2: self.p2,
        }
    }

    pub fn with_n(&self, n: u64) -> Self {
        CovertInputDesign { n, ..*self }
    }

    /// `(a1, a2)` such that `P(X1=1) = a1/sqrt(n)` and `P(X2=1) = a2/sqrt(n)`.
    pub fn weights(&self) -> (f64, f64) {
        match self.scheme {
            Scheme::TimeSharing { q } => (q * self.p1, (1.0 - q) * self.p2),
            Scheme::SparseTimeSharing { q1, q2 } => (q1 * self.p1, q2 * self.p2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidDesign(format!(
                    "{name} = {v} is outside [0,1]"
                )))
            }
        };
        if self.n == 0 {
            return Err(Error::InvalidDesign("blocklength must be positive".into()));
        }
        unit("p1", self.p1)?;
        unit("p2", self.p2)?;
        let n = self.n as f64;
        match self.scheme {
            Scheme::TimeSharing { q } => {
                unit("q", q)?;
                let s = n.sqrt();
                if q * self.p1 / s > 1.0 || (1.0 - q) * self.p2 / s > 1.0 {
                    return Err(Error::InvalidDesign("time-sharing weight exceeds 1".into()));
                }
            }
            Scheme::SparseTimeSharing { q1, q2 } => {
                unit("q1", q1)?;
                unit("q2", q2)?;
                let r = n.powf(0.25);
                if (q1 + q2) / r > 1.0 {
                    return Err(Error::InvalidDesign(format!(
                        "(q1+q2) n^(-1/4) = {} > 1",
                        (q1 + q2) / r
                    )));
                }
                if self.p1 / r > 1.0 || self.p2 / r > 1.0 {
                    return Err(Error::InvalidDesign("p n^(-1/4) exceeds 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// `P_U * P_{X1|U} * P_{X2|U}` over an indexed `U` alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct JointInputDist {
    pu: Distribution,
    labels: Vec<u8>,
    px1: Vec<f64>,
    px2: Vec<f64>,
}

impl JointInputDist {
    /// Builds a joint from per-`u` parameters. `px1[u] = P(X1=1|U=u)`.
    pub fn new(pu: Distribution, labels: Vec<u8>, px1: Vec<f64>, px2: Vec<f64>) -> Result<Self> {
        let k = pu.len();
        if labels.len() != k || px1.len() != k || px2.len() != k {
            return Err(Error::AlphabetMismatch {
                left: k,
                right: labels.len().min(px1.len()).min(px2.len()),
            });
        }
        if px1.iter().chain(&px2).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidDesign("conditional outside [0,1]".into()));
        }
        Ok(JointInputDist {
            pu,
            labels,
            px1,
            px2,
        })
    }

    pub fn u_size(&self) -> usize {
        self.pu.len()
    }

    pub fn pu(&self) -> &Distribution {
        &self.pu
    }

    /// Conventional labels of the `U` indices: `[1, 2]` for TS, `[0, 1, 2]` for STS.
    pub fn u_labels(&self) -> &[u8] {
        &self.labels
    }

    /// `P(X1 = x | U = u)` for index `u`.
    pub fn px1_given_u(&self, u: usize, x: u8) -> f64 {
        if x == 1 {
            self.px1[u]
        } else {
            1.0 - self.px1[u]
        }
    }

    pub fn px2_given_u(&self, u: usize, x: u8) -> f64 {
        if x == 1 {
            self.px2[u]
        } else {
            1.0 - self.px2[u]
        }
    }

    pub fn prob(&self, u: usize, x1: u8, x2: u8) -> f64 {
        self.pu.probs()[u] * self.px1_given_u(u, x1) * self.px2_given_u(u, x2)
    }

    /// `P(X1 = x1, X2 = x2)`.
    pub fn px1x2(&self, x1: u8, x2: u8) -> f64 {
        kahan_sum((0..self.u_size()).map(|u| self.prob(u, x1, x2)))
    }
}

/// The exact joint of the chosen design.
pub fn build_design_joint(d: &CovertInputDesign) -> Result<JointInputDist> {
    d.validate()?;
    let n = d.n as f64;
    match d.scheme {
        Scheme::TimeSharing { q } => {
            let s = n.sqrt();
            JointInputDist::new(
                Distribution::new(vec![q, 1.0 - q])?,
                vec![1, 2],
                vec![d.p1 / s, 0.0],
                vec![0.0, d.p2 / s],
            )
        }
        Scheme::SparseTimeSharing { q1, q2 } => {
            let r = n.powf(0.25);
            let (u1, u2) = (q1 / r, q2 / r);
            JointInputDist::new(
                Distribution::new(vec![1.0 - u1 - u2, u1, u2])?,
                vec![0, 1, 2],
                vec![0.0, d.p1 / r, 0.0],
                vec![0.0, 0.0, d.p2 / r],
            )
        }
    }
}

/// `Q_Z(z) = sum P_U P_{X1|U} P_{X2|U} Q_{x1 x2}(z)` by direct summation.
pub fn eavesdropper_marginal(ch: &TwoWayChannel, j: &JointInputDist) -> Distribution {
    let mut out = vec![0.0; ch.z_size()];
    for (z, slot) in out.iter_mut().enumerate() {
        let mut terms = Vec::with_capacity(4 * j.u_size());
        for u in 0..j.u_size() {
            for (x1, x2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let w = j.prob(u, x1, x2);
                if w > 0.0 {
                    terms.push(w * ch.q(x1, x2).probs()[z]);
                }
            }
        }
        *slot = kahan_sum(terms);
    }
    Distribution::from_raw(out)
}

/// Closed form `Q00 + n^{-1/2} (a1 (Q10 - Q00) + a2 (Q01 - Q00))`.
pub fn eavesdropper_marginal_closed_form(
    ch: &TwoWayChannel,
    d: &CovertInputDesign,
) -> Distribution {
    let (a1, a2) = d.weights();
    let s = (d.n as f64).sqrt();
    let (q00, q01, q10) = (ch.q(0, 0).probs(), ch.q(0, 1).probs(), ch.q(1, 0).probs());
    let out = (0..ch.z_size())
        .map(|z| q00[z] + (a1 * (q10[z] - q00[z]) + a2 * (q01[z] - q00[z])) / s)
        .collect();
    Distribution::from_raw(out)
}
