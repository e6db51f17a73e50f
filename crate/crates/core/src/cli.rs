//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 resource limit.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use crate::classifier::{self, DiffSpec, SCantorSpec, SpecError, TopologicalType};
use crate::digits::{self, DigitError, DigitSet};
use crate::geometry::{self, CoverLimits, GeometryError};
use crate::render::{self, RenderError, RenderSpec};
use crate::verifier::{self, SweepOptions, VerifyError, DEFAULT_BASE_DEPTH, DEFAULT_PROBE_DEPTH};

pub const BUDGET_ENV: &str = "CANTORVAL_INTERVAL_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cantorval", version, about = "Classify and draw differences of S-Cantor sets")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type of C(l1,r1,p) - C(l2,r2,p).
    Classify(SpecArgs),
    /// Type of C(l1,l1,p) - C(l2,l2,p).
    ClassifySym {
        #[arg(long)]
        l1: u32,
        #[arg(long)]
        l2: u32,
        #[arg(long)]
        p: u32,
    },
    /// Type of C(l,l,p) - C(l,l,p) from l/p alone.
    Kraft {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        p: u32,
    },
    /// Measures of a digit set, optionally combined with a second one.
    Digits {
        #[command(flatten)]
        set: SetArgs,
        /// Replace the set by A - B.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "plus")]
        minus: Option<String>,
        /// Replace the set by A + B.
        #[arg(long, allow_hyphen_values = true)]
        plus: Option<String>,
    },
    /// Depth-n cover of A_p.
    Cover(DepthArgs),
    /// Gaps of the depth-n cover of A_p.
    Gaps(DepthArgs),
    /// Decide whether num/den lies in A_p.
    Member {
        #[arg(long, allow_hyphen_values = true)]
        num: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        den: BigInt,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Classify every spec up to p-max and check each against its signature.
    Sweep {
        #[arg(long)]
        p_max: u32,
        #[arg(long, default_value_t = DEFAULT_BASE_DEPTH)]
        base_depth: u32,
        #[arg(long, default_value_t = DEFAULT_PROBE_DEPTH)]
        probe_depth: u32,
        /// Also check the classifier's partition, mirror and interval invariants.
        #[arg(long)]
        verify: bool,
        /// Write JSON Lines here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the first construction stages.
    Render {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 1000)]
        width: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub l1: u32,
    #[arg(long)]
    pub r1: u32,
    #[arg(long)]
    pub l2: u32,
    #[arg(long)]
    pub r2: u32,
    #[arg(long)]
    pub p: u32,
}

#[derive(Debug, Args)]
pub struct SetArgs {
    /// Comma-separated integers, e.g. -4,0,2,3,4.
    #[arg(long, allow_hyphen_values = true)]
    pub digits: String,
    #[arg(long)]
    pub p: u32,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long)]
    pub depth: u32,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Limit(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Limit(_) => EXIT_LIMIT,
            Failure::Verify(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Limit(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<DigitError> for Failure {
    fn from(e: DigitError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        if e.is_resource_limit() {
            Failure::Limit(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Geometry(g) => g.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Geometry(g) => g.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `-4,0,2` into integers; whitespace is rejected.
pub fn parse_digit_list(raw: &str) -> Result<Vec<i64>, String> {
    if raw.chars().any(char::is_whitespace) {
        return Err(format!("digit list {raw:?} must not contain whitespace"));
    }
    if raw.is_empty() {
        return Err("digit list is empty".into());
    }
    raw.split(',').map(|t| t.parse::<i64>().map_err(|e| format!("bad digit {t:?}: {e}"))).collect()
}

fn digit_set(args: &SetArgs) -> Result<DigitSet, Failure> {
    let list = parse_digit_list(&args.digits).map_err(Failure::Usage)?;
    Ok(DigitSet::new(args.p, list)?)
}

fn limits_from_env(value: Option<OsString>) -> Result<CoverLimits, Failure> {
    match value {
        None => Ok(CoverLimits::default()),
        Some(v) => {
            let s = v.to_string_lossy();
            let max_intervals = s
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::Usage(format!("{BUDGET_ENV} must be a positive integer, got {s:?}")))?;
            Ok(CoverLimits { max_intervals })
        }
    }
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, budget: Option<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = limits_from_env(budget).and_then(|limits| dispatch(&cli, &limits, out));
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cli: &Cli, limits: &CoverLimits, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Classify(a) => {
            let spec = DiffSpec::new(a.l1, a.r1, a.l2, a.r2, a.p)?;
            let t = classifier::classify(spec)?;
            if cli.json {
                let value = json!({
                    "spec": spec,
                    "type": t,
                    "conditions": classifier::conditions(spec)?,
                    "digits": spec.difference_digits()?.digits(),
                });
                writeln!(out, "{}", serde_json::to_string(&value)?)?;
            } else {
                writeln!(out, "{spec}: {t}")?;
                writeln!(out, "digits: {}", spec.difference_digits()?)?;
            }
        }
        Command::ClassifySym { l1, l2, p } => {
            let t = classifier::classify_symmetric(*l1, *l2, *p)?;
            emit_type(cli.json, out, json!({"l1": l1, "l2": l2, "p": p}), t)?;
        }
        Command::Kraft { l, p } => {
            let t = classifier::kraft_classify(*l, *p)?;
            let digits = classifier::a_set(SCantorSpec::new(*l, *l, *p)?)?;
            let diff = digits::minkowski_diff(&digits, &digits)?;
            if cli.json {
                let value = json!({"l": l, "p": p, "type": t, "digits": diff.digits()});
                writeln!(out, "{}", serde_json::to_string(&value)?)?;
            } else {
                writeln!(out, "C({l},{l},{p}) - C({l},{l},{p}): {t}")?;
                writeln!(out, "digits: {diff}")?;
            }
        }
        Command::Digits { set, minus, plus } => {
            let a = digit_set(set)?;
            let other = |raw: &str| -> Result<DigitSet, Failure> {
                Ok(DigitSet::new(set.p, parse_digit_list(raw).map_err(Failure::Usage)?)?)
            };
            let d = match (minus, plus) {
                (Some(b), _) => digits::minkowski_diff(&a, &other(b)?)?,
                (_, Some(b)) => digits::minkowski_sum(&a, &other(b)?)?,
                _ => a,
            };
            let ratio = d.interval_ratio()?;
            let full = digits::is_full_interval(&d)?;
            if cli.json {
                let value = json!({
                    "p": d.base(),
                    "digits": d.digits(),
                    "diam": d.diam(),
                    "delta": d.delta()?,
                    "interval_ratio": ratio.to_string(),
                    "full_interval": full,
                });
                writeln!(out, "{}", serde_json::to_string(&value)?)?;
            } else {
                writeln!(out, "{d}")?;
                writeln!(out, "diam {}  delta {}  I {}  interval: {}", d.diam(), d.delta()?, ratio, full)?;
            }
        }
        Command::Cover(a) => {
            let d = digit_set(&a.set)?;
            let cover = geometry::cover_with(&d, a.depth, limits)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&cover.to_json())?)?;
            } else {
                for iv in cover.intervals() {
                    writeln!(out, "{iv}")?;
                }
            }
        }
        Command::Gaps(a) => {
            let d = digit_set(&a.set)?;
            let gaps = geometry::gaps_with(&d, a.depth, limits)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&gaps.to_json())?)?;
            } else {
                for g in &gaps.gaps {
                    writeln!(out, "{g}")?;
                }
            }
        }
        Command::Member { num, den, set } => {
            if den.is_zero() {
                return Err(Failure::Usage("denominator must be nonzero".into()));
            }
            let d = digit_set(set)?;
            let x = BigRational::new(num.clone(), den.clone());
            let m = geometry::member(&x, &d)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&m)?)?;
            } else {
                writeln!(out, "{x} in {d}: {}", m.label())?;
            }
        }
        Command::Sweep { p_max, base_depth, probe_depth, verify, out: path } => {
            if *p_max < 3 {
                return Err(Failure::Usage("--p-max must be at least 3".into()));
            }
            let opts = SweepOptions { base_depth: *base_depth, probe_depth: *probe_depth, verify: *verify, limits: *limits };
            let report = verifier::sweep(*p_max, &opts)?;
            let mut text = String::new();
            for row in &report.rows {
                text.push_str(&serde_json::to_string(&row.to_json())?);
                text.push('\n');
            }
            let summary = serde_json::to_string(&json!({ "summary": report.summary() }))?;
            text.push_str(&summary);
            text.push('\n');
            match path {
                Some(p) => {
                    fs::write(p, text)?;
                    writeln!(out, "{summary}")?;
                }
                None => out.write_all(text.as_bytes())?,
            }
            if !report.all_consistent() {
                let bad: Vec<String> = report
                    .rows
                    .iter()
                    .filter(|r| r.consistent == verifier::Consistency::Inconsistent)
                    .map(|r| format!("{}: {}", r.spec, r.notes.join("; ")))
                    .collect();
                return Err(Failure::Verify(format!("{} inconsistent rows\n{}", bad.len(), bad.join("\n"))));
            }
        }
        Command::Render { set, steps, width, out: path } => {
            let d = digit_set(set)?;
            let spec = RenderSpec { width: *width, ..RenderSpec::new(d, *steps) };
            let svg = render::render_svg_with(&spec, limits)?;
            match path {
                Some(p) => fs::write(p, svg)?,
                None => out.write_all(svg.as_bytes())?,
            }
        }
    }
    Ok(EXIT_OK)
}

fn emit_type(as_json: bool, out: &mut dyn Write, spec: serde_json::Value, t: TopologicalType) -> Result<(), Failure> {
    if as_json {
        let mut value = spec;
        value["type"] = json!(t);
        writeln!(out, "{}", serde_json::to_string(&value)?)?;
    } else {
        writeln!(out, "{t}")?;
    }
    Ok(())
}
