//! Binary-input two-way channels: representation, the channel document
//! format, alarm detection and the structural assumption checks.
//!
//! A channel is stored through its three marginal kernels: `P1[x1,x2]` is
//! the law of User 1's observation `Y1`, `P2[x1,x2]` that of User 2's
//! observation `Y2`, and `Q[x1,x2]` that of the eavesdropper's `Z`.
//!
//! # Document format
//!
//! ```toml
//! y1 = 3
//! y2 = 3
//! z = 4
//!
//! [P1]
//! "0,0" = [0.15, 0.25, 0.6]
//! "0,1" = [0.45, 0.3, 0.25]
//!
//! [P2]
//! "0,0" = [0.4, 0.35, 0.25]
//! "1,0" = [0.25, 0.2, 0.55]
//!
//! [Q]
//! "0,0" = [0.2, 0.3, 0.3, 0.2]
//! "0,1" = [0.35, 0.2, 0.2, 0.25]
//! "1,0" = [0.2, 0.1, 0.4, 0.3]
//! ```
//!
//! Missing `"x1,x2"` rows default to the `"0,0"` row of the same table and
//! are recorded in [`TwoWayChannel::filled_rows`]. Instead of the three
//! tables a document may give `joint`, an array indexed
//! `[x1][x2][y1][y2][z]`, which is marginalized on load.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::{Mutex, OnceLock};

use log::warn;

use crate::distribution::{Distribution, STOCHASTIC_TOL, ZERO_TOL};
use crate::error::{Error, Result};
use crate::metrics::kl_divergence;

/// Which marginal kernel a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    /// `P1`: observation of User 1.
    User1,
    /// `P2`: observation of User 2.
    User2,
    /// `Q`: observation of the eavesdropper.
    Eve,
}

impl Link {
    fn table_key(self) -> &'static str {
        match self {
            Link::User1 => "P1",
            Link::User2 => "P2",
            Link::Eve => "Q",
        }
    }
}

/// A kernel row, identified by table and input pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId {
    pub link: Link,
    pub x1: u8,
    pub x2: u8,
}

impl RowId {
    pub fn new(link: Link, x1: u8, x2: u8) -> Self {
        RowId { link, x1, x2 }
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.link.table_key(), self.x1, self.x2)
    }
}

const PAIRS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn slot(x1: u8, x2: u8) -> usize {
    assert!(x1 < 2 && x2 < 2, "inputs are binary");
    2 * x1 as usize + x2 as usize
}

/// Marginal kernels of a binary-input two-way channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWayChannel {
    p1: [Distribution; 4],
    p2: [Distribution; 4],
    q: [Distribution; 4],
    filled: BTreeSet<RowId>,
}

impl TwoWayChannel {
    /// Builds a channel from fully specified rows, indexed `(0,0),(0,1),(1,0),(1,1)`.
    pub fn from_rows(
        p1: [Distribution; 4],
        p2: [Distribution; 4],
        q: [Distribution; 4],
    ) -> Result<Self> {
        for (name, rows) in [("P1", &p1), ("P2", &p2), ("Q", &q)] {
            let size = rows[0].len();
            if rows.iter().any(|r| r.len() != size) {
                return Err(Error::AlphabetSize(format!(
                    "rows of {name} differ in length"
                )));
            }
        }
        Ok(TwoWayChannel {
            p1,
            p2,
            q,
            filled: BTreeSet::new(),
        })
    }

    pub fn p1(&self, x1: u8, x2: u8) -> &Distribution {
        &self.p1[slot(x1, x2)]
    }

    pub fn p2(&self, x1: u8, x2: u8) -> &Distribution {
        &self.p2[slot(x1, x2)]
    }

    pub fn q(&self, x1: u8, x2: u8) -> &Distribution {
        &self.q[slot(x1, x2)]
    }

    pub fn row(&self, id: RowId) -> &Distribution {
        match id.link {
            Link::User1 => self.p1(id.x1, id.x2),
            Link::User2 => self.p2(id.x1, id.x2),
            Link::Eve => self.q(id.x1, id.x2),
        }
    }

    pub fn y1_size(&self) -> usize {
        self.p1[0].len()
    }

    pub fn y2_size(&self) -> usize {
        self.p2[0].len()
    }

    pub fn z_size(&self) -> usize {
        self.q[0].len()
    }

    /// Rows that were defaulted to the innocent row instead of specified.
    pub fn filled_rows(&self) -> &BTreeSet<RowId> {
        &self.filled
    }

    pub fn is_filled(&self, id: RowId) -> bool {
        self.filled.contains(&id)
    }

    /// Logs a warning naming the rows of `rows` that were defaulted. Each
    /// distinct message is logged once per process.
    pub fn warn_if_defaulted(&self, rows: &[RowId], context: &str) -> bool {
        static SEEN: OnceLock<Mutex<BTreeSet<String>>> = OnceLock::new();
        let hits: Vec<String> = rows
            .iter()
            .filter(|r| self.is_filled(**r))
            .map(|r| r.to_string())
            .collect();
        if !hits.is_empty() {
            let msg = format!("{context}: consuming defaulted rows {}", hits.join(", "));
            let seen = SEEN.get_or_init(Default::default);
            if seen
                .lock()
                .map(|mut s| s.insert(msg.clone()))
                .unwrap_or(true)
            {
                warn!("{msg}");
            }
        }
        !hits.is_empty()
    }

    /// Relabels the output alphabets; `perm_y1[i]` is the new label of old symbol `i`.
    pub fn permute_outputs(&self, perm_y1: &[usize], perm_y2: &[usize], perm_z: &[usize]) -> Self {
        let map = |rows: &[Distribution; 4], perm: &[usize]| -> [Distribution; 4] {
            std::array::from_fn(|i| rows[i].permuted(perm))
        };
        TwoWayChannel {
            p1: map(&self.p1, perm_y1),
            p2: map(&self.p2, perm_y2),
            q: map(&self.q, perm_z),
            filled: self.filled.clone(),
        }
    }

    /// Replaces one row; the row no longer counts as defaulted.
    pub fn with_row(mut self, id: RowId, row: Distribution) -> Result<Self> {
        let expected = match id.link {
            Link::User1 => self.y1_size(),
            Link::User2 => self.y2_size(),
            Link::Eve => self.z_size(),
        };
        if row.len() != expected {
            return Err(Error::AlphabetMismatch {
                left: expected,
                right: row.len(),
            });
        }
        let s = slot(id.x1, id.x2);
        match id.link {
            Link::User1 => self.p1[s] = row,
            Link::User2 => self.p2[s] = row,
            Link::Eve => self.q[s] = row,
        }
        self.filled.remove(&id);
        Ok(self)
    }

    /// Renders the channel as a channel document. Defaulted rows are
    /// omitted so that parsing the output reproduces `self` exactly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "y1 = {}", self.y1_size());
        let _ = writeln!(out, "y2 = {}", self.y2_size());
        let _ = writeln!(out, "z = {}", self.z_size());
        for link in [Link::User1, Link::User2, Link::Eve] {
            let _ = writeln!(out, "\n[{}]", link.table_key());
            for (x1, x2) in PAIRS {
                let id = RowId::new(link, x1, x2);
                if self.is_filled(id) {
                    continue;
                }
                let vals: Vec<String> = self
                    .row(id)
                    .probs()
                    .iter()
                    .map(|v| format!("{v:?}"))
                    .collect();
                let _ = writeln!(out, "\"{x1},{x2}\" = [{}]", vals.join(", "));
            }
        }
        out
    }
}

fn as_size(table: &toml::Table, key: &str) -> Result<usize> {
    match table.get(key) {
        Some(toml::Value::Integer(v)) if *v >= 1 => Ok(*v as usize),
        Some(other) => Err(Error::Malformed(format!(
            "`{key}` must be a positive integer, got {other}"
        ))),
        None => Err(Error::Malformed(format!("missing alphabet size `{key}`"))),
    }
}

fn as_number(v: &toml::Value, ctx: &str) -> Result<f64> {
    match v {
        toml::Value::Float(f) if f.is_finite() => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::Malformed(format!(
            "{ctx}: expected a finite number, got {other}"
        ))),
    }
}

fn as_array<'a>(v: &'a toml::Value, ctx: &str) -> Result<&'a Vec<toml::Value>> {
    v.as_array()
        .ok_or_else(|| Error::Malformed(format!("{ctx}: expected an array")))
}

fn parse_pair_key(key: &str) -> Option<(u8, u8)> {
    let (a, b) = key.split_once(',')?;
    let x1: u8 = a.trim().parse().ok()?;
    let x2: u8 = b.trim().parse().ok()?;
    (x1 < 2 && x2 < 2).then_some((x1, x2))
}

fn parse_table(
    doc: &toml::Table,
    link: Link,
    size: usize,
    filled: &mut BTreeSet<RowId>,
) -> Result<[Distribution; 4]> {
    let key = link.table_key();
    let table = match doc.get(key) {
        Some(toml::Value::Table(t)) => t,
        Some(_) => return Err(Error::Malformed(format!("`{key}` must be a table"))),
        None => return Err(Error::Malformed(format!("missing table `{key}`"))),
    };
    let mut rows: [Option<Distribution>; 4] = Default::default();
    for (k, v) in table {
        let (x1, x2) = parse_pair_key(k)
            .ok_or_else(|| Error::Malformed(format!("`{key}` has bad row key \"{k}\"")))?;
        let id = RowId::new(link, x1, x2);
        let vals = as_array(v, &id.to_string())?
            .iter()
            .map(|e| as_number(e, &id.to_string()))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != size {
            return Err(Error::AlphabetSize(format!(
                "row {id} has {} entries, alphabet size is {size}",
                vals.len()
            )));
        }
        rows[slot(x1, x2)] = Some(Distribution::labelled(vals, &id.to_string())?);
    }
    let innocent = rows[0].clone().ok_or_else(|| {
        Error::Malformed(format!("`{key}` must specify the innocent row \"0,0\""))
    })?;
    Ok(std::array::from_fn(|s| {
        rows[s].clone().unwrap_or_else(|| {
            let (x1, x2) = PAIRS[s];
            filled.insert(RowId::new(link, x1, x2));
            innocent.clone()
        })
    }))
}

fn parse_joint(joint: &toml::Value, y1: usize, y2: usize, z: usize) -> Result<TwoWayChannel> {
    let outer = as_array(joint, "joint")?;
    if outer.len() != 2 {
        return Err(Error::AlphabetSize(
            "joint must have 2 entries for x1".into(),
        ));
    }
    let mut p1: Vec<Distribution> = Vec::with_capacity(4);
    let mut p2: Vec<Distribution> = Vec::with_capacity(4);
    let mut q: Vec<Distribution> = Vec::with_capacity(4);
    for (x1, by_x2) in outer.iter().enumerate() {
        let by_x2 = as_array(by_x2, "joint[x1]")?;
        if by_x2.len() != 2 {
            return Err(Error::AlphabetSize(
                "joint must have 2 entries for x2".into(),
            ));
        }
        for (x2, block) in by_x2.iter().enumerate() {
            let ctx = format!("joint[{x1}][{x2}]");
            let mut cube = vec![0.0; y1 * y2 * z];
            let a = as_array(block, &ctx)?;
            if a.len() != y1 {
                return Err(Error::AlphabetSize(format!("{ctx} must have {y1} entries")));
            }
            for (i, b) in a.iter().enumerate() {
                let b = as_array(b, &ctx)?;
                if b.len() != y2 {
                    return Err(Error::AlphabetSize(format!(
                        "{ctx}[{i}] must have {y2} entries"
                    )));
                }
                for (j, c) in b.iter().enumerate() {
                    let c = as_array(c, &ctx)?;
                    if c.len() != z {
                        return Err(Error::AlphabetSize(format!(
                            "{ctx}[{i}][{j}] must have {z} entries"
                        )));
                    }
                    for (k, v) in c.iter().enumerate() {
                        cube[(i * y2 + j) * z + k] = as_number(v, &ctx)?;
                    }
                }
            }
            // Validate the full conditional before marginalizing.
            Distribution::labelled(cube.clone(), &ctx)?;
            let mut m1 = vec![0.0; y1];
            let mut m2 = vec![0.0; y2];
            let mut mz = vec![0.0; z];
            for i in 0..y1 {
                for j in 0..y2 {
                    for k in 0..z {
                        let v = cube[(i * y2 + j) * z + k];
                        m1[i] += v;
                        m2[j] += v;
                        mz[k] += v;
                    }
                }
            }
            p1.push(Distribution::labelled(m1, &format!("P1[{x1},{x2}]"))?);
            p2.push(Distribution::labelled(m2, &format!("P2[{x1},{x2}]"))?);
            q.push(Distribution::labelled(mz, &format!("Q[{x1},{x2}]"))?);
        }
    }
    let arr =
        |v: Vec<Distribution>| -> [Distribution; 4] { v.try_into().expect("four input pairs") };
    TwoWayChannel::from_rows(arr(p1), arr(p2), arr(q))
}

/// Parses and validates a channel document.
pub fn parse_channel(text: &str) -> Result<TwoWayChannel> {
    let doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Malformed(e.message().to_string()))?;
    for key in doc.keys() {
        if !matches!(
            key.as_str(),
            "y1" | "y2" | "z" | "P1" | "P2" | "Q" | "joint"
        ) {
            return Err(Error::Malformed(format!("unknown key `{key}`")));
        }
    }
    let y1 = as_size(&doc, "y1")?;
    let y2 = as_size(&doc, "y2")?;
    let z = as_size(&doc, "z")?;
    if let Some(joint) = doc.get("joint") {
        if ["P1", "P2", "Q"].iter().any(|k| doc.contains_key(*k)) {
            return Err(Error::Malformed(
                "`joint` is mutually exclusive with the marginal tables".into(),
            ));
        }
        return parse_joint(joint, y1, y2, z);
    }
    let mut filled = BTreeSet::new();
    let p1 = parse_table(&doc, Link::User1, y1, &mut filled)?;
    let p2 = parse_table(&doc, Link::User2, y2, &mut filled)?;
    let q = parse_table(&doc, Link::Eve, z, &mut filled)?;
    let mut ch = TwoWayChannel::from_rows(p1, p2, q)?;
    ch.filled = filled;
    Ok(ch)
}

/// Eavesdropper symbols that only the simultaneous `(1,1)` input can produce.
pub fn detect_alarm_symbols(ch: &TwoWayChannel) -> BTreeSet<usize> {
    (0..ch.z_size())
        .filter(|&z| {
            ch.q(1, 1).probs()[z] > ZERO_TOL
                && [(0, 0), (0, 1), (1, 0)]
                    .iter()
                    .all(|&(a, b)| ch.q(a, b).probs()[z] <= ZERO_TOL)
        })
        .collect()
}

/// The four divergences that decide physical degradation, in nats.
/// A support violation is reported as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceTable {
    /// `D(P2[1,0] || P2[0,0])`
    pub user2_link: f64,
    /// `D(Q[1,0] || Q[0,0])`
    pub eve_from_user1: f64,
    /// `D(P1[0,1] || P1[0,0])`
    pub user1_link: f64,
    /// `D(Q[0,1] || Q[0,0])`
    pub eve_from_user2: f64,
}

/// Structural classification of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub alarm_symbols: BTreeSet<usize>,
    pub is_alarm: bool,
    /// `Q[1,1]` puts mass both on alarm symbols and on ordinary symbols.
    pub q11_mixed_support: bool,
    /// `Q[0,1] << Q[0,0]` and `Q[1,0] << Q[0,0]`.
    pub abs_continuity_ok: bool,
    pub q00_in_hull_pair: bool,
    pub q00_in_hull_triple: bool,
    pub degraded_dir1: bool,
    pub degraded_dir2: bool,
    pub divergences: DivergenceTable,
    pub filled_rows: Vec<RowId>,
}

impl ChannelReport {
    /// Key-value text rendering, one field per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list: Vec<String> = self.alarm_symbols.iter().map(|z| z.to_string()).collect();
        let filled: Vec<String> = self
            .filled_rows
            .iter()
            .map(|r| format!("\"{r}\""))
            .collect();
        let _ = writeln!(s, "alarm_symbols = [{}]", list.join(", "));
        let _ = writeln!(s, "is_alarm = {}", self.is_alarm);
        let _ = writeln!(s, "q11_mixed_support = {}", self.q11_mixed_support);
        let _ = writeln!(s, "abs_continuity_ok = {}", self.abs_continuity_ok);
        let _ = writeln!(s, "q00_in_hull_pair = {}", self.q00_in_hull_pair);
        let _ = writeln!(s, "q00_in_hull_triple = {}", self.q00_in_hull_triple);
        let _ = writeln!(s, "degraded_dir1 = {}", self.degraded_dir1);
        let _ = writeln!(s, "degraded_dir2 = {}", self.degraded_dir2);
        let d = &self.divergences;
        let _ = writeln!(
            s,
            "d_p2_10_p2_00 = {}",
            crate::output::fmt_sig(d.user2_link)
        );
        let _ = writeln!(
            s,
            "d_q10_q00 = {}",
            crate::output::fmt_sig(d.eve_from_user1)
        );
        let _ = writeln!(
            s,
            "d_p1_01_p1_00 = {}",
            crate::output::fmt_sig(d.user1_link)
        );
        let _ = writeln!(
            s,
            "d_q01_q00 = {}",
            crate::output::fmt_sig(d.eve_from_user2)
        );
        let _ = writeln!(s, "filled_rows = [{}]", filled.join(", "));
        s
    }
}

/// Is `target = t*a + (1-t)*b` for some `t` in `[0,1]`, coordinate-wise
/// within `tol`? Each coordinate restricts `t` to an interval.
pub fn in_segment_hull(target: &[f64], a: &[f64], b: &[f64], tol: f64) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for ((&c, &av), &bv) in target.iter().zip(a).zip(b) {
        let slope = av - bv;
        let rhs = c - bv;
        if slope.abs() <= ZERO_TOL {
            if rhs.abs() > tol {
                return false;
            }
            continue;
        }
        let (t1, t2) = ((rhs - tol) / slope, (rhs + tol) / slope);
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
        if lo > hi {
            return false;
        }
    }
    true
}

/// Is `target` in the convex hull of `{a, b, c}` within `tol`?
///
/// Writes `target - c = s (a - c) + t (b - c)` with `s, t >= 0, s + t <= 1`.
/// Every coordinate is a line in the `(s, t)` plane; the feasible set is a
/// polytope inside the triangle whose vertices lie among the triangle
/// corners, line/edge intersections and line/line intersections, so it is
/// enough to test those candidates.
pub fn in_triangle_hull(target: &[f64], a: &[f64], b: &[f64], c: &[f64], tol: f64) -> bool {
    // Coordinate lines: alpha*s + beta*t = gamma.
    let lines: Vec<(f64, f64, f64)> = target
        .iter()
        .zip(a)
        .zip(b)
        .zip(c)
        .map(|(((&x, &av), &bv), &cv)| (av - cv, bv - cv, x - cv))
        .collect();
    let feasible = |s: f64, t: f64| {
        let slack = 1e-12;
        s >= -slack
            && t >= -slack
            && s + t <= 1.0 + slack
            && lines
                .iter()
                .all(|&(al, be, ga)| (al * s + be * t - ga).abs() <= tol)
    };
    let mut cands: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    // Triangle edges as lines: s = 0, t = 0, s + t = 1.
    let edges = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, 1.0)];
    let nontrivial: Vec<(f64, f64, f64)> = lines
        .iter()
        .copied()
        .filter(|&(al, be, _)| al.abs() > ZERO_TOL || be.abs() > ZERO_TOL)
        .collect();
    let intersect = |l1: (f64, f64, f64), l2: (f64, f64, f64)| -> Option<(f64, f64)> {
        let det = l1.0 * l2.1 - l1.1 * l2.0;
        if det.abs() <= 1e-14 {
            return None;
        }
        Some((
            (l1.2 * l2.1 - l1.1 * l2.2) / det,
            (l1.0 * l2.2 - l1.2 * l2.0) / det,
        ))
    };
    for (i, &l) in nontrivial.iter().enumerate() {
        for &e in &edges {
            cands.extend(intersect(l, e));
        }
        for &m in &nontrivial[i + 1..] {
            cands.extend(intersect(l, m));
        }
    }
    cands.into_iter().any(|(s, t)| feasible(s, t))
}

/// Fills every field of [`ChannelReport`].
pub fn check_assumptions(ch: &TwoWayChannel) -> ChannelReport {
    let alarm_symbols = detect_alarm_symbols(ch);
    let q00 = ch.q(0, 0);
    let q01 = ch.q(0, 1);
    let q10 = ch.q(1, 0);
    let q11 = ch.q(1, 1);
    let div = |p: &Distribution, q: &Distribution| kl_divergence(p, q).unwrap_or(f64::INFINITY);
    let divergences = DivergenceTable {
        user2_link: div(ch.p2(1, 0), ch.p2(0, 0)),
        eve_from_user1: div(q10, q00),
        user1_link: div(ch.p1(0, 1), ch.p1(0, 0)),
        eve_from_user2: div(q01, q00),
    };
    let q11_mixed_support =
        !alarm_symbols.is_empty() && q11.support().any(|z| !alarm_symbols.contains(&z));
    ChannelReport {
        is_alarm: !alarm_symbols.is_empty(),
        q11_mixed_support,
        abs_continuity_ok: q01.is_abs_continuous_wrt(q00) && q10.is_abs_continuous_wrt(q00),
        q00_in_hull_pair: in_segment_hull(q00.probs(), q01.probs(), q10.probs(), STOCHASTIC_TOL),
        q00_in_hull_triple: in_triangle_hull(
            q00.probs(),
            q01.probs(),
            q10.probs(),
            q11.probs(),
            STOCHASTIC_TOL,
        ),
        degraded_dir1: divergences.user2_link > divergences.eve_from_user1,
        degraded_dir2: divergences.user1_link > divergences.eve_from_user2,
        divergences,
        alarm_symbols,
        filled_rows: ch.filled_rows().iter().copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = include_str!("../channels/example.toml");

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn parses_example_and_defaults_rows() {
        let ch = parse_channel(EXAMPLE).unwrap();
        assert_eq!(ch.p1(0, 0).probs(), &[0.15, 0.25, 0.6]);
        assert_eq!(ch.p2(1, 0).probs(), &[0.25, 0.2, 0.55]);
        assert_eq!(ch.q(0, 0).probs(), &[0.2, 0.3, 0.3, 0.2]);
        let want: BTreeSet<RowId> = [
            RowId::new(Link::User1, 1, 0),
            RowId::new(Link::User1, 1, 1),
            RowId::new(Link::User2, 0, 1),
            RowId::new(Link::User2, 1, 1),
            RowId::new(Link::Eve, 1, 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(ch.filled_rows(), &want);
        assert_eq!(ch.p2(0, 1), ch.p2(0, 0));
        assert_eq!(ch.q(1, 1), ch.q(0, 0));
    }

    #[test]
    fn rejects_non_stochastic_row() {
        let text = EXAMPLE.replace("[0.45, 0.3, 0.25]", "[0.45, 0.3, 0.15]");
        let err = parse_channel(&text).unwrap_err();
        assert!(err.to_string().contains("non-stochastic row"), "{err}");
    }

    #[test]
    fn rejects_negative_entry() {
        let text = EXAMPLE.replace("[0.45, 0.3, 0.25]", "[0.8, 0.3, -0.1]");
        assert!(matches!(
            parse_channel(&text),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn rejects_inconsistent_sizes() {
        let text = EXAMPLE.replace("[0.45, 0.3, 0.25]", "[0.45, 0.3, 0.25, 0.0]");
        assert!(matches!(parse_channel(&text), Err(Error::AlphabetSize(_))));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(
            parse_channel("y1 = = 3"),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            parse_channel("y1 = 3\ny2 = 3"),
            Err(Error::Malformed(_))
        ));
        let bad_key = EXAMPLE.replace("\"0,1\" = [0.45", "\"0;1\" = [0.45");
        assert!(matches!(parse_channel(&bad_key), Err(Error::Malformed(_))));
        let extra = format!("{EXAMPLE}\n[R]\n\"0,0\" = [1.0]\n");
        assert!(matches!(parse_channel(&extra), Err(Error::Malformed(_))));
    }

    #[test]
    fn uniform_channel_has_no_filled_rows() {
        let mut text = String::from("y1 = 2\ny2 = 2\nz = 2\n");
        for t in ["P1", "P2", "Q"] {
            text.push_str(&format!("[{t}]\n"));
            for k in ["0,0", "0,1", "1,0", "1,1"] {
                text.push_str(&format!("\"{k}\" = [0.5, 0.5]\n"));
            }
        }
        let ch = parse_channel(&text).unwrap();
        assert!(ch.filled_rows().is_empty());
        assert!(detect_alarm_symbols(&ch).is_empty());
    }

    #[test]
    fn joint_kernel_is_marginalized() {
        // y1 = y2 = z = 2; outputs are copies of (x1 xor x2, x2, x1) with noise-free kernels.
        let mut blocks = Vec::new();
        for x1 in 0..2 {
            let mut row = Vec::new();
            for x2 in 0..2 {
                let mut cube = vec![vec![vec![0.0; 2]; 2]; 2];
                cube[x1 ^ x2][x2][x1] = 1.0;
                row.push(format!("{cube:?}"));
            }
            blocks.push(format!("[{}]", row.join(", ")));
        }
        let text = format!("y1 = 2\ny2 = 2\nz = 2\njoint = [{}]\n", blocks.join(", "));
        let ch = parse_channel(&text).unwrap();
        assert_eq!(ch.p1(1, 0).probs(), &[0.0, 1.0]);
        assert_eq!(ch.p2(1, 1).probs(), &[0.0, 1.0]);
        assert_eq!(ch.q(1, 0).probs(), &[0.0, 1.0]);
        assert!(ch.filled_rows().is_empty());
        let both = format!("{text}\n[Q]\n\"0,0\" = [0.5, 0.5]\n");
        assert!(matches!(parse_channel(&both), Err(Error::Malformed(_))));
    }

    #[test]
    fn render_round_trips() {
        let ch = parse_channel(EXAMPLE).unwrap();
        let again = parse_channel(&ch.render()).unwrap();
        assert_eq!(ch, again);
    }

    #[test]
    fn alarm_detection() {
        let base = parse_channel(EXAMPLE).unwrap();
        assert!(detect_alarm_symbols(&base).is_empty());
        let alarm = parse_channel(include_str!("../channels/example_alarm.toml")).unwrap();
        assert_eq!(detect_alarm_symbols(&alarm), BTreeSet::from([4]));
        let rep = check_assumptions(&alarm);
        assert!(rep.is_alarm && !rep.q11_mixed_support);
        // all-positive rows never alarm
        let pos = base
            .with_row(RowId::new(Link::Eve, 1, 1), d(&[0.1, 0.2, 0.3, 0.4]))
            .unwrap();
        assert!(detect_alarm_symbols(&pos).is_empty());
    }

    #[test]
    fn constructed_alarm_on_four_symbols() {
        let q00 = d(&[0.5, 0.25, 0.25, 0.0]);
        let q01 = d(&[0.25, 0.5, 0.25, 0.0]);
        let q10 = d(&[0.25, 0.25, 0.5, 0.0]);
        let q11 = d(&[0.0, 0.0, 0.0, 1.0]);
        let p = || std::array::from_fn(|_| d(&[0.5, 0.5]));
        let ch = TwoWayChannel::from_rows(p(), p(), [q00, q01, q10, q11]).unwrap();
        assert_eq!(detect_alarm_symbols(&ch), BTreeSet::from([3]));
        let mixed = ch
            .with_row(RowId::new(Link::Eve, 1, 1), d(&[0.5, 0.0, 0.0, 0.5]))
            .unwrap();
        let rep = check_assumptions(&mixed);
        assert!(rep.is_alarm && rep.q11_mixed_support);
    }

    #[test]
    fn example_assumptions() {
        let rep = check_assumptions(&parse_channel(EXAMPLE).unwrap());
        assert!(rep.degraded_dir1 && rep.degraded_dir2);
        assert!(!rep.q00_in_hull_pair);
        assert!(rep.abs_continuity_ok);
        assert!((rep.divergences.user2_link - 0.204_227_483_301_830_2).abs() < 1e-12);
        assert!((rep.divergences.eve_from_user2 - 0.089_465_370_362_684_6).abs() < 1e-12);
        // Q11 defaults to Q00, which is trivially in the triple hull.
        assert!(rep.q00_in_hull_triple);
        let alarm = check_assumptions(
            &parse_channel(include_str!("../channels/example_alarm.toml")).unwrap(),
        );
        assert!(!alarm.q00_in_hull_triple);
    }

    #[test]
    fn hull_tests() {
        let q = [0.2, 0.3, 0.5];
        assert!(in_segment_hull(&q, &q, &q, 1e-9));
        let a = [0.4, 0.2, 0.4];
        let b = [0.0, 0.4, 0.6];
        assert!(in_segment_hull(&[0.1, 0.35, 0.55], &a, &b, 1e-9));
        assert!(!in_segment_hull(&[0.1, 0.36, 0.54], &a, &b, 1e-9));
        // outside [0,1]
        assert!(!in_segment_hull(&[0.6, 0.1, 0.3], &a, &b, 1e-9));
        let c = [0.0, 0.0, 1.0];
        let inner: Vec<f64> = (0..3)
            .map(|i| 0.2 * a[i] + 0.3 * b[i] + 0.5 * c[i])
            .collect();
        assert!(in_triangle_hull(&inner, &a, &b, &c, 1e-9));
        // a point on an edge
        let edge: Vec<f64> = (0..3).map(|i| 0.5 * a[i] + 0.5 * c[i]).collect();
        assert!(in_triangle_hull(&edge, &a, &b, &c, 1e-9));
        assert!(!in_triangle_hull(&[1.0, 0.0, 0.0], &a, &b, &c, 1e-9));
        // degenerate triangle (all equal vertices)
        assert!(in_triangle_hull(&q, &q, &q, &q, 1e-9));
    }

    #[test]
    fn pair_hull_when_all_equal() {
        let ch = parse_channel(EXAMPLE).unwrap();
        let q00 = ch.q(0, 0).clone();
        let ch = ch
            .with_row(RowId::new(Link::Eve, 0, 1), q00.clone())
            .unwrap()
            .with_row(RowId::new(Link::Eve, 1, 0), q00)
            .unwrap();
        assert!(check_assumptions(&ch).q00_in_hull_pair);
    }

    #[test]
    fn undegraded_when_link_is_useless() {
        let ch = parse_channel(EXAMPLE).unwrap();
        let p00 = ch.p2(0, 0).clone();
        let ch = ch.with_row(RowId::new(Link::User2, 1, 0), p00).unwrap();
        let rep = check_assumptions(&ch);
        assert_eq!(rep.divergences.user2_link, 0.0);
        assert!(!rep.degraded_dir1);
        assert!(rep.degraded_dir2);
    }
}
