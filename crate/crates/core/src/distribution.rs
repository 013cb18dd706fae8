use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Absolute tolerance below which a probability counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// A probability vector over a finite alphabet `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates non-negativity and unit mass (within [`STOCHASTIC_TOL`]).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::labelled(probs, "<anonymous>")
    }

    pub(crate) fn labelled(probs: Vec<f64>, row: &str) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::AlphabetSize(format!("row {row} is empty")));
        }
        if let Some(&v) = probs.iter().find(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!(
                "row {row} has non-finite entry {v}"
            )));
        }
        if let Some(&v) = probs.iter().find(|&&v| v < 0.0) {
            return Err(Error::NegativeEntry {
                row: row.to_string(),
                value: v,
            });
        }
        let sum = kahan_sum(probs.iter().copied());
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NonStochastic {
                row: row.to_string(),
                sum,
            });
        }
        Ok(Distribution { probs })
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "alphabet must be non-empty");
        Distribution {
            probs: vec![1.0 / size as f64; size],
        }
    }

    /// Point mass on `symbol`.
    pub fn point(size: usize, symbol: usize) -> Self {
        assert!(symbol < size);
        let mut probs = vec![0.0; size];
        probs[symbol] = 1.0;
        Distribution { probs }
    }

    /// Convex combination `sum_i w_i * d_i`. Weights must be non-negative and
    /// sum to one.
    pub fn mixture(parts: &[(f64, &Distribution)]) -> Result<Self> {
        let size = parts
            .first()
            .map(|(_, d)| d.len())
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut probs = vec![0.0; size];
        for (w, d) in parts {
            if d.len() != size {
                return Err(Error::AlphabetMismatch {
                    left: size,
                    right: d.len(),
                });
            }
            for (acc, p) in probs.iter_mut().zip(d.probs()) {
                *acc += w * p;
            }
        }
        Distribution::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Symbols with probability above [`ZERO_TOL`].
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > ZERO_TOL)
            .map(|(i, _)| i)
    }

    /// `self << other`: every symbol with positive mass here has positive
    /// mass in `other`.
    pub fn is_abs_continuous_wrt(&self, other: &Distribution) -> bool {
        self.len() == other.len()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(&p, &q)| p <= ZERO_TOL || q > ZERO_TOL)
    }

    /// Relabels symbols: output symbol `perm[i]` receives the mass of `i`.
    pub fn permuted(&self, perm: &[usize]) -> Distribution {
        assert_eq!(perm.len(), self.len());
        let mut probs = vec![0.0; self.len()];
        for (i, &j) in perm.iter().enumerate() {
            probs[j] = self.probs[i];
        }
        Distribution { probs }
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Distribution { probs }
    }
}

impl AsRef<[f64]> for Distribution {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// Kahan-Babuska (Neumaier) compensated summation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
