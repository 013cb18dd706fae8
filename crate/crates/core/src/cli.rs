//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit status: `0` on success, `1` when
//! a channel or computation fails validation, `2` on a usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::{check_assumptions, parse_channel, TwoWayChannel};
use crate::design::{CovertInputDesign, DesignFamily, Scheme};
use crate::error::Error;
use crate::output::{
    fmt_sig, write_budget_csv, write_capacity_csv, write_converse_csv, write_distribution_csv,
    write_pts_csv, write_scaling_csv, BudgetRow, KeyValue,
};
use crate::quantities::{fit_scaling_exponent, FitMode, Quantity};
use crate::regions::{
    capacity_sweep, converse_frontier, pts_sweep, weight_budget, RhoWeights, DEFAULT_LAMBDA_GRID,
    DEFAULT_SIMPLEX_RESOLUTION,
};
use crate::sim::{
    estimate_error_probability, exact_induced_distribution, generate_codebook,
    resolvability_report, CodebookSizes,
};

#[derive(Debug, Parser)]
#[command(
    name = "twoway-covert",
    version,
    about = "Covert communication over binary-input two-way channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a channel file and report its structural properties.
    Validate {
        channel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write pts.csv, capacity.csv and converse.csv into a directory.
    Region {
        channel: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact and leading-order values of one quantity over a blocklength grid,
    /// with a log-log slope.
    Scaling {
        channel: PathBuf,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<u64>,
        #[arg(long, default_value = "i_u_z")]
        quantity: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// CSV path; the fit is written next to it with a `.fit` suffix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo error probability of one random codebook.
    Simulate {
        channel: PathBuf,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        n: u64,
        /// m0,m1p,m1s,m2p,m2s
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        mu: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also enumerate the induced eavesdropper distribution into this CSV.
        #[arg(long)]
        exact: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight budget mu_n over a table of (rho, n).
    Budget {
        channel: PathBuf,
        /// rho01,rho10,rho11; repeatable.
        #[arg(long, value_delimiter = ',', num_args = 1, required = true, action = clap::ArgAction::Append)]
        rho: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Ts,
    Sts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Difference,
}

/// Design parameters. For `ts`, `--q1` is the probability that User 1 holds
/// the slot and `--q2` must be absent or equal `1 - q1`.
#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Sts)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 0.5)]
    pub q1: f64,
    #[arg(long)]
    pub q2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub p1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p2: f64,
}

impl DesignArgs {
    pub fn family(&self) -> Result<DesignFamily, Error> {
        let scheme = match self.scheme {
            SchemeArg::Ts => {
                if let Some(q2) = self.q2 {
                    if (q2 - (1.0 - self.q1)).abs() > 1e-12 {
                        return Err(Error::InvalidParameter(
                            "for ts, q2 must equal 1 - q1".into(),
                        ));
                    }
                }
                Scheme::TimeSharing { q: self.q1 }
            }
            SchemeArg::Sts => Scheme::SparseTimeSharing {
                q1: self.q1,
                q2: self.q2.unwrap_or(self.q1),
            },
        };
        Ok(DesignFamily {
            scheme,
            p1: self.p1,
            p2: self.p2,
        })
    }
}

/// Failure of a subcommand, with its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) | Error::InvalidDesign(m) => CliError::Usage(m),
            other => CliError::Validation(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Validation(e.into())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    match execute(&cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<TwoWayChannel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(parse_channel(&text)?)
}

/// Writes `bytes` to `out` when given, otherwise to `stdout`.
fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

/// Runs one subcommand, sending undirected output to `stdout`.
pub fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Validate { channel, out } => {
            let ch = load(channel)?;
            emit(
                out.as_deref(),
                stdout,
                check_assumptions(&ch).to_text().as_bytes(),
            )
        }
        Command::Region {
            channel,
            grid,
            resolution,
            out,
        } => {
            let ch = load(channel)?;
            let pts = pts_sweep(&ch, *grid)?;
            let cap = capacity_sweep(&ch, *grid)?;
            let conv = converse_frontier(&ch, *resolution)?;
            fs::create_dir_all(out)?;
            let mut buf = Vec::new();
            write_pts_csv(&mut buf, &pts)?;
            fs::write(out.join("pts.csv"), &buf)?;
            buf.clear();
            write_capacity_csv(&mut buf, &cap)?;
            fs::write(out.join("capacity.csv"), &buf)?;
            buf.clear();
            write_converse_csv(&mut buf, &conv)?;
            fs::write(out.join("converse.csv"), &buf)?;
            Ok(())
        }
        Command::Scaling {
            channel,
            design,
            n_grid,
            quantity,
            mode,
            out,
        } => {
            let ch = load(channel)?;
            let q: Quantity = quantity.parse()?;
            let family = design.family()?;
            family.at(n_grid[0]).validate()?;
            let mode = match mode {
                ModeArg::Exact => FitMode::Exact,
                ModeArg::Difference => FitMode::Difference,
            };
            let fit = fit_scaling_exponent(&ch, &family, q, n_grid, mode)?;
            let mut csv = Vec::new();
            write_scaling_csv(&mut csv, q.name(), &fit.points)?;
            let excluded: Vec<String> = fit.excluded.iter().map(u64::to_string).collect();
            let summary = KeyValue::new()
                .text("quantity", q.name())
                .text("scheme", family.scheme.name())
                .num("slope", fit.slope)
                .num("intercept", fit.intercept)
                .num("r2", fit.r2)
                .text("well_fit", fit.well_fit.to_string())
                .text("excluded", excluded.join(","))
                .render();
            match out {
                Some(p) => {
                    fs::write(p, &csv)?;
                    let mut side = p.clone().into_os_string();
                    side.push(".fit");
                    fs::write(PathBuf::from(side), summary)?;
                }
                None => {
                    stdout.write_all(&csv)?;
                    eprint!("{summary}");
                }
            }
            Ok(())
        }
        Command::Simulate {
            channel,
            design,
            n,
            sizes,
            mu,
            trials,
            seed,
            exact,
            out,
        } => {
            let ch = load(channel)?;
            let [m0, m1p, m1s, m2p, m2s] = sizes[..] else {
                return Err(CliError::Usage("--sizes takes m0,m1p,m1s,m2p,m2s".into()));
            };
            let sizes = CodebookSizes::new(m0, m1p, m1s, m2p, m2s)?;
            let d: CovertInputDesign = design.family()?.at(*n);
            let cb = generate_codebook(&ch, &d, sizes, *seed)?;
            let report = estimate_error_probability(&ch, &cb, *mu, *trials, *seed)?;
            let mut kv = KeyValue::new()
                .text("scheme", d.scheme.name())
                .int("n", d.n)
                .text("sizes", format!("{m0},{m1p},{m1s},{m2p},{m2s}"));
            let mut record = kv.render() + &report.to_record().render();
            if let Some(path) = exact {
                let q_hat = exact_induced_distribution(&ch, &cb)?;
                let mut buf = Vec::new();
                write_distribution_csv(&mut buf, q_hat.probs())?;
                fs::write(path, buf)?;
                kv = match resolvability_report(&ch, &cb, *mu) {
                    Ok(r) => KeyValue::new()
                        .num("d_hat_vs_qz", r.d_hat_vs_qz)
                        .num("d_hat_vs_q00", r.d_hat_vs_q00)
                        .num("gap", r.gap)
                        .num("nu_min", r.nu_min)
                        .num("four_term_bound", r.four_term_bound),
                    Err(Error::AlarmEmitted) => {
                        KeyValue::new().text("d_hat_vs_q00", fmt_sig(f64::INFINITY))
                    }
                    Err(e) => return Err(e.into()),
                };
                record += &kv.render();
            }
            emit(out.as_deref(), stdout, record.as_bytes())
        }
        Command::Budget {
            channel,
            rho,
            n,
            delta,
            out,
        } => {
            let ch = load(channel)?;
            if rho.is_empty() || rho.len() % 3 != 0 {
                return Err(CliError::Usage(
                    "--rho takes triples rho01,rho10,rho11".into(),
                ));
            }
            let mut rows = Vec::new();
            for r in rho.chunks(3) {
                let w = RhoWeights::new(r[0], r[1], r[2])?;
                for &nn in n {
                    let (mu, flag) = match weight_budget(&ch, w, nn, *delta) {
                        Ok(b) if b.alarm => (b.mu, "alarm"),
                        Ok(b) => (b.mu, "ok"),
                        Err(Error::UnboundedDirection(_)) => (f64::INFINITY, "unbounded"),
                        Err(e) => return Err(e.into()),
                    };
                    rows.push(BudgetRow {
                        rho: [r[0], r[1], r[2]],
                        n: nn,
                        mu,
                        flag,
                    });
                }
            }
            let mut buf = Vec::new();
            write_budget_csv(&mut buf, &rows)?;
            emit(out.as_deref(), stdout, &buf)
        }
    }
}
