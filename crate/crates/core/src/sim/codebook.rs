use crate::channel::TwoWayChannel;
use crate::design::{build_design_joint, CovertInputDesign, JointInputDist};
use crate::error::{Error, Result};
use crate::sim::rng::{bernoulli, categorical, codebook_rng};

/// Upper bound on the number of stored codeword symbols.
pub const MAX_CODEBOOK_SYMBOLS: u128 = 1 << 28;

/// Message-set sizes. User `i`'s message is the pair `(w_ip, w_is)`,
/// flattened as `w_ip * m_is + w_is`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodebookSizes {
    pub m0: usize,
    pub m1p: usize,
    pub m1s: usize,
    pub m2p: usize,
    pub m2s: usize,
}

impl CodebookSizes {
    pub fn new(m0: usize, m1p: usize, m1s: usize, m2p: usize, m2s: usize) -> Result<Self> {
        if [m0, m1p, m1s, m2p, m2s].contains(&0) {
            return Err(Error::InvalidParameter(
                "codebook sizes must be at least 1".into(),
            ));
        }
        Ok(CodebookSizes {
            m0,
            m1p,
            m1s,
            m2p,
            m2s,
        })
    }

    pub fn m1(&self) -> usize {
        self.m1p * self.m1s
    }

    pub fn m2(&self) -> usize {
        self.m2p * self.m2s
    }

    /// Secret messages can seed the next block's common message.
    pub fn supports_chaining(&self) -> bool {
        self.m1s as u128 * self.m2s as u128 >= self.m0 as u128
    }
}

/// Realized codewords. `U` words hold indices into the design's `U`
/// alphabet (see [`JointInputDist::u_labels`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    design: CovertInputDesign,
    joint: JointInputDist,
    sizes: CodebookSizes,
    seed: u64,
    len: usize,
    u_words: Vec<Vec<u8>>,
    x1_words: Vec<Vec<u8>>,
    x2_words: Vec<Vec<u8>>,
}

impl Codebook {
    /// Assembles a codebook from explicit words, e.g. for exhaustive checks.
    /// `x1_words[w0 * m1 + w1]`, `x2_words[w0 * m2 + w2]`. Words may be
    /// shorter than the design's blocklength; the design only fixes the
    /// conditionals used by the decoder.
    pub fn from_parts(
        design: CovertInputDesign,
        sizes: CodebookSizes,
        u_words: Vec<Vec<u8>>,
        x1_words: Vec<Vec<u8>>,
        x2_words: Vec<Vec<u8>>,
    ) -> Result<Self> {
        let joint = build_design_joint(&design)?;
        if u_words.len() != sizes.m0
            || x1_words.len() != sizes.m0 * sizes.m1()
            || x2_words.len() != sizes.m0 * sizes.m2()
        {
            return Err(Error::InvalidParameter(
                "word counts do not match the sizes".into(),
            ));
        }
        let len = u_words[0].len();
        if len == 0
            || u_words
                .iter()
                .chain(&x1_words)
                .chain(&x2_words)
                .any(|w| w.len() != len)
        {
            return Err(Error::InvalidParameter(
                "codewords must share a positive length".into(),
            ));
        }
        let cb = Codebook {
            design,
            joint,
            sizes,
            seed: 0,
            len,
            u_words,
            x1_words,
            x2_words,
        };
        cb.check_support()?;
        Ok(cb)
    }

    fn check_support(&self) -> Result<()> {
        let k = self.joint.u_size();
        for w0 in 0..self.sizes.m0 {
            let u = &self.u_words[w0];
            if u.iter().any(|&s| s as usize >= k) {
                return Err(Error::InvalidParameter(
                    "U symbol outside the design alphabet".into(),
                ));
            }
            for w in 0..self.sizes.m1() {
                let x = self.x1_word(w0, w);
                if x.iter().zip(u).any(|(&b, &s)| {
                    b > 1 || (b == 1 && self.joint.px1_given_u(s as usize, 1) == 0.0)
                }) {
                    return Err(Error::InvalidParameter(
                        "x1 word violates the schedule".into(),
                    ));
                }
            }
            for w in 0..self.sizes.m2() {
                let x = self.x2_word(w0, w);
                if x.iter().zip(u).any(|(&b, &s)| {
                    b > 1 || (b == 1 && self.joint.px2_given_u(s as usize, 1) == 0.0)
                }) {
                    return Err(Error::InvalidParameter(
                        "x2 word violates the schedule".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn design(&self) -> &CovertInputDesign {
        &self.design
    }

    pub fn joint(&self) -> &JointInputDist {
        &self.joint
    }

    pub fn sizes(&self) -> &CodebookSizes {
        &self.sizes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Word length.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn u_word(&self, w0: usize) -> &[u8] {
        &self.u_words[w0]
    }

    pub fn x1_word(&self, w0: usize, w1: usize) -> &[u8] {
        &self.x1_words[w0 * self.sizes.m1() + w1]
    }

    pub fn x2_word(&self, w0: usize, w2: usize) -> &[u8] {
        &self.x2_words[w0 * self.sizes.m2() + w2]
    }
}

/// Samples a codebook of length `d.n`: all `U` words i.i.d. from `P_U`,
/// then every `X1` word given its `U` word, then every `X2` word, all from
/// stream 0 of `seed`.
pub fn generate_codebook(
    _ch: &TwoWayChannel,
    d: &CovertInputDesign,
    sizes: CodebookSizes,
    seed: u64,
) -> Result<Codebook> {
    let joint = build_design_joint(d)?;
    let n = d.n as u128;
    let words = sizes.m0 as u128 * (1 + sizes.m1() as u128 + sizes.m2() as u128);
    let needed = n.saturating_mul(words);
    if needed > MAX_CODEBOOK_SYMBOLS {
        return Err(Error::CapExceeded {
            needed,
            cap: MAX_CODEBOOK_SYMBOLS,
        });
    }
    let n = d.n as usize;
    let mut rng = codebook_rng(seed);
    let u_words: Vec<Vec<u8>> = (0..sizes.m0)
        .map(|_| {
            (0..n)
                .map(|_| categorical(&mut rng, joint.pu().probs()) as u8)
                .collect()
        })
        .collect();
    let mut draw = |count: usize, p: &dyn Fn(usize) -> f64| -> Vec<Vec<u8>> {
        let mut out = Vec::with_capacity(sizes.m0 * count);
        for u in &u_words {
            for _ in 0..count {
                out.push(
                    u.iter()
                        .map(|&s| {
                            let q = p(s as usize);
                            u8::from(q > 0.0 && bernoulli(&mut rng, q))
                        })
                        .collect(),
                );
            }
        }
        out
    };
    let x1_words = draw(sizes.m1(), &|s| joint.px1_given_u(s, 1));
    let x2_words = draw(sizes.m2(), &|s| joint.px2_given_u(s, 1));
    Ok(Codebook {
        design: *d,
        joint,
        sizes,
        seed,
        len: n,
        u_words,
        x1_words,
        x2_words,
    })
}
