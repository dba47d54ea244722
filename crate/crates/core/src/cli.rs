//! The `hecke` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 inconclusive
//! certification (including precision failures and bound violations).

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::Error;
use crate::kernel::{self, Certificate, Sign, MAX_WEIGHT, MIN_WEIGHT};
use crate::lfunction::central_values;
use crate::petersson::{triangle_check, QuadratureSpec, TriangleCheck};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

/// Largest weight the triangle check runs at.
const MAX_TRIANGLE_WEIGHT: u32 = 28;

#[derive(Debug, Parser)]
#[command(name = "hecke", version, about = "Certify non-vanishing of central Hecke L-values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify r_k(1) > 0 for one weight.
    Certify {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Kernel coefficient r_k(n) and its bracket.
    Rk {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Check the global bound and the per-weight bound chain.
    CheckBounds {
        #[arg(long)]
        json: bool,
    },
    /// Certificates and central values for a range of weights.
    Report {
        /// start:stop:step, both ends inclusive, or a single weight.
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        /// Also compare r_k(1) with the eigenform side (weights <= 28).
        #[arg(long)]
        triangle: bool,
        #[arg(long)]
        json: bool,
    },
}

fn sci<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateView {
    pub nonvanishing: bool,
    pub sign: Sign,
    #[serde(serialize_with = "sci")]
    pub rho: f64,
    #[serde(serialize_with = "sci")]
    pub rho_abs_err: f64,
    #[serde(serialize_with = "sci")]
    pub per_k_bound: f64,
    #[serde(serialize_with = "sci")]
    pub global_bound: f64,
    #[serde(serialize_with = "sci")]
    pub log_prefactor: f64,
    pub terms_used: u64,
}

impl From<&Certificate> for CertificateView {
    fn from(c: &Certificate) -> Self {
        Self {
            nonvanishing: c.nonvanishing,
            sign: c.sign,
            rho: c.rho.value,
            rho_abs_err: c.rho.abs_err,
            per_k_bound: c.per_k_bound,
            global_bound: c.global_bound,
            log_prefactor: c.log_prefactor,
            terms_used: c.terms_used,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValueEntry {
    pub form_index: usize,
    pub coefficient_field_degree: usize,
    #[serde(serialize_with = "sci")]
    pub value: f64,
    #[serde(serialize_with = "sci")]
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleView {
    #[serde(serialize_with = "sci")]
    pub lhs: f64,
    #[serde(serialize_with = "sci")]
    pub lhs_abs_err: f64,
    #[serde(serialize_with = "sci")]
    pub rhs: f64,
    #[serde(serialize_with = "sci")]
    pub rhs_abs_err: f64,
    #[serde(serialize_with = "sci")]
    pub ratio: f64,
    #[serde(serialize_with = "sci")]
    pub ratio_abs_err: f64,
}

impl From<&TriangleCheck> for TriangleView {
    fn from(t: &TriangleCheck) -> Self {
        Self {
            lhs: t.lhs.value,
            lhs_abs_err: t.lhs.abs_err,
            rhs: t.rhs.value,
            rhs_abs_err: t.rhs.abs_err,
            ratio: t.ratio.value,
            ratio_abs_err: t.ratio.abs_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub certify: u64,
    pub l_values: u64,
    pub triangle: Option<u64>,
}

/// One weight's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub weight: u32,
    pub certificate: CertificateView,
    pub l_values: Vec<LValueEntry>,
    pub triangle: Option<TriangleView>,
    pub timings_ms: Timings,
}

impl Report {
    /// One-line JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkView {
    pub schema_version: String,
    pub weight: u32,
    pub n: u64,
    #[serde(serialize_with = "sci")]
    pub rho: f64,
    #[serde(serialize_with = "sci")]
    pub rho_abs_err: f64,
    #[serde(serialize_with = "sci")]
    pub value: f64,
    #[serde(serialize_with = "sci")]
    pub value_abs_err: f64,
    #[serde(serialize_with = "sci")]
    pub log_prefactor: f64,
    #[serde(serialize_with = "sci")]
    pub tail_bound: f64,
    pub terms_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub weight: u32,
    #[serde(serialize_with = "sci")]
    pub per_k_bound: f64,
    #[serde(serialize_with = "sci")]
    pub chain_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsView {
    pub schema_version: String,
    #[serde(serialize_with = "sci")]
    pub global_bound: f64,
    #[serde(serialize_with = "sci")]
    pub margin: f64,
    pub rows: Vec<BoundRow>,
    pub monotone: bool,
    pub all_below_global: bool,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Unsupported(_) => EXIT_USAGE,
            Error::Precision(_) | Error::BoundViolation(_) => EXIT_INCONCLUSIVE,
        };
        Self { code, message: e.to_string() }
    }
}

fn check_weight(k: u32) -> Result<(), Failure> {
    if k % 4 != 0 || !(MIN_WEIGHT..=MAX_WEIGHT).contains(&k) {
        return Err(Failure::usage(format!(
            "weight {k} rejected: weights must be multiples of 4 between {MIN_WEIGHT} and {MAX_WEIGHT}"
        )));
    }
    Ok(())
}

/// Parses `start:stop:step` (inclusive) or a single weight; every weight
/// must pass the weight check.
pub fn parse_weights(spec: &str) -> Result<Vec<u32>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim().parse::<u32>().map_err(|_| format!("malformed weight range '{spec}'"))
    };
    let (start, stop, step) = match parts.as_slice() {
        [k] => (num(k)?, num(k)?, 1),
        [a, b] => (num(a)?, num(b)?, 4),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(format!("malformed weight range '{spec}'")),
    };
    if step == 0 {
        return Err("weight range step must be positive".into());
    }
    if stop < start {
        return Err(format!("weight range '{spec}' is empty"));
    }
    let weights: Vec<u32> = (start..=stop).step_by(step as usize).collect();
    for &k in &weights {
        check_weight(k).map_err(|f| f.message)?;
    }
    Ok(weights)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serialization")
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

/// Builds the report for one weight.
pub fn build_report(k: u32, eps: f64, triangle: bool) -> crate::Result<Report> {
    let t0 = Instant::now();
    let cert = kernel::certify(k, eps)?;
    let t_cert = ms(t0);
    let t1 = Instant::now();
    let l_values = central_values(k, eps)?
        .iter()
        .enumerate()
        .map(|(i, (f, v))| LValueEntry {
            form_index: i,
            coefficient_field_degree: f.coefficient_field_degree(),
            value: v.value,
            abs_err: v.abs_err,
        })
        .collect();
    let t_l = ms(t1);
    let (triangle, t_tri) = if triangle && k <= MAX_TRIANGLE_WEIGHT {
        let t2 = Instant::now();
        let t = triangle_check(k, eps, &QuadratureSpec::default())?;
        (Some(TriangleView::from(&t)), Some(ms(t2)))
    } else {
        (None, None)
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION.into(),
        weight: k,
        certificate: CertificateView::from(&cert),
        l_values,
        triangle,
        timings_ms: Timings { certify: t_cert, l_values: t_l, triangle: t_tri },
    })
}

fn certify_cmd(k: u32, eps: f64, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    check_weight(k)?;
    let t0 = Instant::now();
    let cert = kernel::certify(k, eps)?;
    let report = Report {
        schema_version: SCHEMA_VERSION.into(),
        weight: k,
        certificate: CertificateView::from(&cert),
        l_values: Vec::new(),
        triangle: None,
        timings_ms: Timings { certify: ms(t0), l_values: 0, triangle: None },
    };
    if json {
        writeln!(out, "{}", to_json(&report)).ok();
    } else {
        writeln!(out, "weight        {k}").ok();
        writeln!(out, "rho           {}", cert.rho).ok();
        writeln!(out, "|rho - 1|     {:.6e}", (cert.rho.value - 1.0).abs()).ok();
        writeln!(out, "per-k bound   {:.6e}", cert.per_k_bound).ok();
        writeln!(out, "global bound  {:.10}", cert.global_bound).ok();
        writeln!(out, "terms used    {}", cert.terms_used).ok();
        writeln!(out, "nonvanishing  {}", cert.nonvanishing).ok();
        writeln!(out, "sign          {}", cert.sign.as_str()).ok();
    }
    Ok(if cert.nonvanishing { EXIT_OK } else { EXIT_INCONCLUSIVE })
}

fn rk_cmd(k: u32, n: u64, eps: f64, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    check_weight(k)?;
    let r = kernel::r_k(k, n, eps)?;
    if json {
        let view = RkView {
            schema_version: SCHEMA_VERSION.into(),
            weight: k,
            n,
            rho: r.rho.value,
            rho_abs_err: r.rho.abs_err,
            value: r.value.value,
            value_abs_err: r.value.abs_err,
            log_prefactor: r.log_prefactor,
            tail_bound: r.tail_bound,
            terms_used: r.terms_used,
        };
        writeln!(out, "{}", to_json(&view)).ok();
    } else {
        writeln!(out, "r_{k}({n})      {}", r.value).ok();
        writeln!(out, "rho          {}", r.rho).ok();
        writeln!(out, "ln prefactor {:.15e}", r.log_prefactor).ok();
        writeln!(out, "terms used   {} (tail <= {:.3e})", r.terms_used, r.tail_bound).ok();
    }
    Ok(EXIT_OK)
}

fn bounds_cmd(json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let global = kernel::global_bound();
    let mut rows = Vec::new();
    for k in (MIN_WEIGHT..=MAX_WEIGHT).step_by(4) {
        rows.push(BoundRow {
            weight: k,
            per_k_bound: kernel::per_k_bound(k)?,
            chain_bound: kernel::factorial_chain_bound(k)?,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].per_k_bound < w[0].per_k_bound);
    let all_below = rows
        .iter()
        .all(|r| r.per_k_bound <= r.chain_bound * (1.0 + 1e-12) && r.chain_bound <= global * (1.0 + 1e-12));
    let ok = global < 1.0 && monotone && all_below;
    if json {
        let view = BoundsView {
            schema_version: SCHEMA_VERSION.into(),
            global_bound: global,
            margin: 1.0 - global,
            rows,
            monotone,
            all_below_global: all_below,
        };
        writeln!(out, "{}", to_json(&view)).ok();
    } else {
        writeln!(out, "global bound      {global:.10}").ok();
        writeln!(out, "1 - global bound  {:.10}", 1.0 - global).ok();
        writeln!(out, "{:>6}  {:>22}  {:>22}", "weight", "per-k bound", "chain bound").ok();
        for r in &rows {
            writeln!(out, "{:>6}  {:>22.15e}  {:>22.15e}", r.weight, r.per_k_bound, r.chain_bound).ok();
        }
        writeln!(out, "monotone decreasing: {monotone}; all below global: {all_below}").ok();
    }
    Ok(if ok { EXIT_OK } else { EXIT_INCONCLUSIVE })
}

fn report_cmd(
    weights: &str,
    eps: f64,
    triangle: bool,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let weights = parse_weights(weights).map_err(Failure::usage)?;
    let results: Vec<crate::Result<Report>> = std::thread::scope(|s| {
        let handles: Vec<_> = weights
            .iter()
            .map(|&k| s.spawn(move || build_report(k, eps, triangle)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| {
                    Err(Error::Precision("worker thread panicked".into()))
                })
            })
            .collect()
    });
    let mut code = EXIT_OK;
    if !json {
        writeln!(
            out,
            "{:>6}  {:>22}  {:>10}  {:>4}  {:>5}  {}",
            "weight", "rho", "abs err", "sign", "forms", "triangle ratio"
        )
        .ok();
    }
    for (k, result) in weights.iter().zip(results) {
        match result {
            Ok(r) => {
                if !r.certificate.nonvanishing {
                    code = code.max(EXIT_INCONCLUSIVE);
                }
                if json {
                    writeln!(out, "{}", to_json(&r)).ok();
                } else {
                    let ratio = r
                        .triangle
                        .as_ref()
                        .map_or("-".to_string(), |t| format!("{:.12}", t.ratio));
                    writeln!(
                        out,
                        "{:>6}  {:>22.15e}  {:>10.2e}  {:>4}  {:>5}  {}",
                        k,
                        r.certificate.rho,
                        r.certificate.rho_abs_err,
                        r.certificate.sign.as_str(),
                        r.l_values.len(),
                        ratio
                    )
                    .ok();
                }
            }
            Err(e) => {
                let f = Failure::from(e);
                writeln!(err, "weight {k}: {}", f.message).ok();
                code = code.max(f.code);
            }
        }
    }
    Ok(code)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Certify { weight, eps, json } => certify_cmd(weight, eps, json, out),
        Command::Rk { weight, n, eps, json } => rk_cmd(weight, n, eps, json, out),
        Command::CheckBounds { json } => bounds_cmd(json, out),
        Command::Report { weights, eps, triangle, json } => {
            report_cmd(&weights, eps, triangle, json, out, err)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            if code == EXIT_OK {
                write!(out, "{e}").ok();
            } else {
                write!(err, "{e}").ok();
            }
            return code;
        }
    };
    match catch_unwind(AssertUnwindSafe(|| dispatch(cli, out, err))) {
        Ok(Ok(code)) => code,
        Ok(Err(f)) => {
            writeln!(err, "error: {}", f.message).ok();
            f.code
        }
        Err(_) => {
            writeln!(err, "error: internal failure").ok();
            EXIT_INCONCLUSIVE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_ranges() {
        assert_eq!(parse_weights("12:40:4").unwrap(), vec![12, 16, 20, 24, 28, 32, 36, 40]);
        assert_eq!(parse_weights("12:24:4").unwrap().len(), 4);
        assert_eq!(parse_weights("16").unwrap(), vec![16]);
        assert!(parse_weights("14:14:1").is_err());
        assert!(parse_weights("12:20:2").is_err());
        assert!(parse_weights("12:44:4").is_err());
        assert!(parse_weights("12:x:4").is_err());
        assert!(parse_weights("12:40:0").is_err());
        assert!(parse_weights("20:12:4").is_err());
        assert!(parse_weights("").is_err());
    }

    #[test]
    fn floats_keep_full_precision() {
        let v = LValueEntry { form_index: 0, coefficient_field_degree: 1, value: 0.1, abs_err: f64::NAN };
        let s = to_json(&v);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"abs_err\":null"));
    }
}
