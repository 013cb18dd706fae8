//! Text outputs: fixed nine-significant-digit numbers, CSV tables and flat
//! key-value records. Every writer is deterministic.

use std::io::{self, Write};

use crate::quantities::ScalingPoint;
use crate::regions::{ConversePoint, RegionConstants, RegionPoint};

/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// removed, scientific notation when the decimal exponent is below -4 or at
/// least 9.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.8e}", v.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let sign = if v < 0.0 { "-" } else { "" };
    if !(-4..9).contains(&exp) {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        strip_zeros(&mut m);
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{m}e{esign}{:02}", exp.abs());
    }
    let mut s = if exp >= 0 {
        let k = exp as usize + 1;
        format!("{}.{}", &digits[..k], &digits[k..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    strip_zeros(&mut s);
    format!("{sign}{s}")
}

fn strip_zeros(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

fn row<W: Write>(w: &mut W, cells: &[f64]) -> io::Result<()> {
    let line: Vec<String> = cells.iter().map(|&v| fmt_sig(v)).collect();
    writeln!(w, "{}", line.join(","))
}

pub const CAPACITY_HEADER: &str = "lambda,r1,r2,c_lambda";
pub const PTS_HEADER: &str = "lambda,delta1_frac,r1,r2";
pub const CONVERSE_HEADER: &str = "rho01,rho10,rho11,r1,r2,tau";
pub const SCALING_HEADER: &str = "n,quantity,exact,leading";
pub const BUDGET_HEADER: &str = "rho01,rho10,rho11,n,mu,flag";
pub const DISTRIBUTION_HEADER: &str = "index,probability";

pub fn write_capacity_csv<W: Write>(w: &mut W, points: &[RegionPoint]) -> io::Result<()> {
    writeln!(w, "{CAPACITY_HEADER}")?;
    for p in points {
        let c = match p.constants {
            RegionConstants::Capacity { c_lambda } => c_lambda,
            _ => f64::NAN,
        };
        row(w, &[p.lambda, p.r1, p.r2, c])?;
    }
    Ok(())
}

pub fn write_pts_csv<W: Write>(w: &mut W, points: &[RegionPoint]) -> io::Result<()> {
    writeln!(w, "{PTS_HEADER}")?;
    for p in points {
        let frac = match p.constants {
            RegionConstants::Pts { delta1_frac, .. } => delta1_frac,
            _ => f64::NAN,
        };
        row(w, &[p.lambda, frac, p.r1, p.r2])?;
    }
    Ok(())
}

pub fn write_converse_csv<W: Write>(w: &mut W, points: &[ConversePoint]) -> io::Result<()> {
    writeln!(w, "{CONVERSE_HEADER}")?;
    for p in points {
        row(
            w,
            &[p.rho.rho01, p.rho.rho10, p.rho.rho11, p.r1, p.r2, p.tau],
        )?;
    }
    Ok(())
}

pub fn write_scaling_csv<W: Write>(
    w: &mut W,
    quantity: &str,
    points: &[ScalingPoint],
) -> io::Result<()> {
    writeln!(w, "{SCALING_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{quantity},{},{}",
            p.n,
            fmt_sig(p.exact),
            fmt_sig(p.leading)
        )?;
    }
    Ok(())
}

/// One line of the weight-budget table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetRow {
    pub rho: [f64; 3],
    pub n: u64,
    pub mu: f64,
    pub flag: &'static str,
}

pub fn write_budget_csv<W: Write>(w: &mut W, rows: &[BudgetRow]) -> io::Result<()> {
    writeln!(w, "{BUDGET_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_sig(r.rho[0]),
            fmt_sig(r.rho[1]),
            fmt_sig(r.rho[2]),
            r.n,
            fmt_sig(r.mu),
            r.flag
        )?;
    }
    Ok(())
}

/// `index,probability` with the sequence index as an integer.
pub fn write_distribution_csv<W: Write>(w: &mut W, probs: &[f64]) -> io::Result<()> {
    writeln!(w, "{DISTRIBUTION_HEADER}")?;
    for (i, p) in probs.iter().enumerate() {
        writeln!(w, "{i},{}", fmt_sig(*p))?;
    }
    Ok(())
}

/// A flat `key = value` record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValue {
    entries: Vec<(String, String)>,
}

impl KeyValue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.entries.push((key.into(), fmt_sig(v)));
        self
    }

    pub fn int(mut self, key: &str, v: u64) -> Self {
        self.entries.push((key.into(), v.to_string()));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.entries.push((key.into(), v.into()));
        self
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_matches_printf_g() {
        let cases = [
            (0.5, "0.5"),
            (0.398_611_231_704_702_8, "0.398611232"),
            (3.903_600_291_794_133, "3.90360029"),
            (100.0, "100"),
            (123_456_789.0, "123456789"),
            (1_234_567_890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.000_012_345, "1.2345e-05"),
            (-2.5, "-2.5"),
            (9.999_999_999_9, "10"),
            (1e300, "1e+300"),
            (0.0, "0"),
        ];
        for (v, s) in cases {
            assert_eq!(fmt_sig(v), s, "{v}");
        }
    }

    #[test]
    fn key_value_record() {
        let kv = KeyValue::new()
            .int("trials", 3)
            .num("pe_hat", 0.25)
            .text("scheme", "sts");
        assert_eq!(kv.render(), "trials = 3\npe_hat = 0.25\nscheme = sts\n");
    }
}
