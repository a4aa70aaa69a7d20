//! Batch front end: evaluate expression JSON, take derivatives, build skew
//! inverses, expand spherical series, run Cauchy reconstruction, and run
//! the verification suites. Reports are JSON with stable field order, so a
//! repeated invocation with the same inputs is byte-identical.
//!
//! Exit codes: 0 success, 1 domain errors (per-point error entries or a
//! failed suite), 2 usage and schema errors.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use skewq_core::calculus::{skew_derivative, DerivMethod};
use skewq_core::contour::{cauchy_eval, spherical_coeff_extract, Contour};
use skewq_core::expr::{skew_inverse_roundtrip, FuncExpr};
use skewq_core::json;
use skewq_core::quat::{dist, Quaternion};
use skewq_core::verify::{self, SuiteReport};
use skewq_core::{Error, Orbit};

#[derive(Parser)]
#[command(name = "skewq", version, about = "Skew analysis over quaternions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an expression at each point.
    Eval {
        /// Expression JSON: inline, a file path, or `-` for stdin.
        #[arg(long)]
        expr: String,
        /// Points JSON (`[[w,x,y,z], ...]` or `{"points": [...]}`).
        #[arg(long)]
        points: String,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Skew and orbital derivatives at each point.
    Derive {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        points: String,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Build the skew inverse of the expression and evaluate it at each
    /// point, with both round-trip residuals.
    Invert {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        points: String,
        /// Residual threshold for the per-point `within_tol` flag.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Extract spherical series coefficients of the expression around an
    /// orbit by contour integration.
    SeriesExpand {
        #[arg(long)]
        expr: String,
        /// Orbit JSON `{"re": x, "norm": y}`.
        #[arg(long)]
        orbit: String,
        /// Contour JSON; winding must be +1 around the orbit.
        #[arg(long)]
        contour: String,
        /// Highest coefficient order to extract.
        #[arg(long, default_value_t = 32)]
        order: usize,
        /// Optional points at which to report the reconstruction residual.
        #[arg(long)]
        points: Option<String>,
        /// Override the contour's node count.
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Reconstruct values from contour integrals of the expression.
    Cauchy {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        contour: String,
        #[arg(long)]
        points: String,
        /// Override the contour's node count.
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Run verification suites (all of them when none are named).
    Verify {
        /// Suite names; see `--list`.
        suites: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List the available suite names and exit.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Run a job described by a single JSON spec.
    Run {
        /// Job JSON: inline, a file path, or `-` for stdin.
        #[arg(long)]
        job: String,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ErrorObj {
    kind: &'static str,
    path: String,
    message: String,
}

impl ErrorObj {
    fn of(e: &Error) -> ErrorObj {
        ErrorObj {
            kind: e.kind_name(),
            path: e.path().unwrap_or("").to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct EvalEntry {
    point: Quaternion,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Quaternion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorObj>,
}

#[derive(Serialize)]
struct EvalReport {
    command: &'static str,
    results: Vec<EvalEntry>,
}

#[derive(Serialize)]
struct DeriveEntry {
    point: Quaternion,
    #[serde(skip_serializing_if = "Option::is_none")]
    skew: Option<Quaternion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbital: Option<Quaternion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorObj>,
}

#[derive(Serialize)]
struct DeriveReport {
    command: &'static str,
    results: Vec<DeriveEntry>,
}

#[derive(Serialize)]
struct InvertEntry {
    point: Quaternion,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Quaternion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tol: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorObj>,
}

#[derive(Serialize)]
struct InvertReport {
    command: &'static str,
    tolerance: f64,
    results: Vec<InvertEntry>,
}

#[derive(Serialize)]
struct SampleEntry {
    point: Quaternion,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tol: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorObj>,
}

#[derive(Serialize)]
struct SeriesReport {
    command: &'static str,
    orbit: Orbit,
    order: usize,
    declared_radius: Option<f64>,
    s1: Vec<Quaternion>,
    s2: Vec<Quaternion>,
    samples: Vec<SampleEntry>,
}

#[derive(Serialize)]
struct CauchyEntry {
    point: Quaternion,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Quaternion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_vs_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tol: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorObj>,
}

#[derive(Serialize)]
struct CauchyReport {
    command: &'static str,
    results: Vec<CauchyEntry>,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    seed: u64,
    pass: bool,
    suites: Vec<SuiteReport>,
}

/// A finished report plus the exit status its contents imply.
struct Outcome {
    body: String,
    domain_errors: bool,
}

fn render<T: Serialize>(report: &T, domain_errors: bool) -> Outcome {
    Outcome {
        body: serde_json::to_string_pretty(report).expect("reports serialize"),
        domain_errors,
    }
}

/// Usage or schema failure: message for stderr, exit 2.
struct Usage(String);

impl From<std::io::Error> for Usage {
    fn from(e: std::io::Error) -> Usage {
        Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Usage {
    fn from(e: serde_json::Error) -> Usage {
        Usage(format!("invalid JSON: {e}"))
    }
}

impl From<Error> for Usage {
    fn from(e: Error) -> Usage {
        Usage(e.to_string())
    }
}

/// Inline JSON, `-` for stdin, or a file path.
fn load_text(arg: &str) -> Result<String, Usage> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Usage(format!("cannot read {arg}: {e}")))
}

fn load_value(arg: &str) -> Result<Value, Usage> {
    Ok(serde_json::from_str(&load_text(arg)?)?)
}

fn load_expr(arg: &str) -> Result<FuncExpr, Usage> {
    Ok(json::expr_from_json(&load_value(arg)?)?)
}

fn load_points(arg: &str) -> Result<Vec<Quaternion>, Usage> {
    Ok(json::points_from_json(&load_value(arg)?)?)
}

fn load_contour(arg: &str, nodes: Option<usize>) -> Result<Contour, Usage> {
    let c = json::contour_from_json(&load_value(arg)?)?;
    match nodes {
        None => Ok(c),
        Some(n) => Ok(Contour::new(c.plane, c.circles, n)?),
    }
}

fn run_eval(f: &FuncExpr, points: &[Quaternion]) -> Outcome {
    let mut bad = false;
    let results = points
        .iter()
        .map(|&p| match f.eval(p) {
            Ok(v) => EvalEntry { point: p, value: Some(v), error: None },
            Err(e) => {
                bad = true;
                EvalEntry { point: p, value: None, error: Some(ErrorObj::of(&e)) }
            }
        })
        .collect();
    render(&EvalReport { command: "eval", results }, bad)
}

fn run_derive(f: &FuncExpr, points: &[Quaternion]) -> Outcome {
    let mut bad = false;
    let results = points
        .iter()
        .map(|&p| match skew_derivative(f, p) {
            Ok(d) => {
                let (method, spread) = match d.method {
                    DerivMethod::ExactPoly => ("exact-poly", None),
                    DerivMethod::ExactSeries => ("exact-series", None),
                    DerivMethod::Mixed => ("mixed", None),
                    DerivMethod::NumericLimit(s) => ("numeric-limit", Some(s)),
                };
                DeriveEntry {
                    point: p,
                    skew: Some(d.skew),
                    orbital: Some(d.orbital),
                    method: Some(method),
                    spread,
                    error: None,
                }
            }
            Err(e) => {
                bad = true;
                DeriveEntry {
                    point: p,
                    skew: None,
                    orbital: None,
                    method: None,
                    spread: None,
                    error: Some(ErrorObj::of(&e)),
                }
            }
        })
        .collect();
    render(&DeriveReport { command: "derive", results }, bad)
}

/// Expressions with a built-in skew inverse: real polynomials of any
/// degree and degree-one polynomials.
fn inverse_of(f: &FuncExpr) -> Result<FuncExpr, Usage> {
    let p = f.as_poly().ok_or_else(|| {
        Usage("invert expects a polynomial expression (poly, sums, scales and skew products of them)".into())
    })?;
    if p.is_real(1e-12) {
        return Ok(FuncExpr::skew_inv_real_poly(p)?);
    }
    match p.degree() {
        Some(1) => Ok(FuncExpr::skew_inv_affine(p.coeff(0), p.coeff(1))?),
        _ => Err(Usage(
            "invert supports real polynomials and degree-1 polynomials; this expression is neither".into(),
        )),
    }
}

fn run_invert(f: &FuncExpr, points: &[Quaternion], tol: f64) -> Result<Outcome, Usage> {
    let h = inverse_of(f)?;
    let mut bad = false;
    let results = points
        .iter()
        .map(|&p| {
            let value = match h.eval(p) {
                Ok(v) => v,
                Err(e) => {
                    bad = true;
                    return InvertEntry {
                        point: p,
                        value: None,
                        left_residual: None,
                        right_residual: None,
                        within_tol: None,
                        error: Some(ErrorObj::of(&e)),
                    };
                }
            };
            match skew_inverse_roundtrip(f, &h, p) {
                Ok((l, r)) => InvertEntry {
                    point: p,
                    value: Some(value),
                    left_residual: Some(l),
                    right_residual: Some(r),
                    within_tol: Some(l <= tol && r <= tol),
                    error: None,
                },
                Err(e) => {
                    bad = true;
                    InvertEntry {
                        point: p,
                        value: Some(value),
                        left_residual: None,
                        right_residual: None,
                        within_tol: None,
                        error: Some(ErrorObj::of(&e)),
                    }
                }
            }
        })
        .collect();
    Ok(render(&InvertReport { command: "invert", tolerance: tol, results }, bad))
}

fn run_series_expand(
    f: &FuncExpr,
    orbit: Orbit,
    contour: &Contour,
    order: usize,
    points: &[Quaternion],
    tol: f64,
) -> Outcome {
    let pair = match spherical_coeff_extract(f, contour, orbit, order) {
        Ok(p) => p,
        Err(e) => {
            // job-level domain failure: an empty report carrying the error
            #[derive(Serialize)]
            struct Failed {
                command: &'static str,
                orbit: Orbit,
                order: usize,
                error: ErrorObj,
            }
            return render(
                &Failed { command: "series-expand", orbit, order, error: ErrorObj::of(&e) },
                true,
            );
        }
    };
    let mut bad = false;
    let samples = points
        .iter()
        .map(|&q| {
            let direct = f.eval(q).and_then(|d| pair.eval(q).map(|v| dist(v, d)));
            match direct {
                Ok(r) => SampleEntry {
                    point: q,
                    residual: Some(r),
                    within_tol: Some(r <= tol),
                    error: None,
                },
                Err(e) => {
                    bad = true;
                    SampleEntry { point: q, residual: None, within_tol: None, error: Some(ErrorObj::of(&e)) }
                }
            }
        })
        .collect();
    render(
        &SeriesReport {
            command: "series-expand",
            orbit,
            order,
            declared_radius: pair.s1.declared_radius(),
            s1: pair.s1.coeffs().to_vec(),
            s2: pair.s2.coeffs().to_vec(),
            samples,
        },
        bad,
    )
}

fn run_cauchy(f: &FuncExpr, contour: &Contour, points: &[Quaternion], tol: f64) -> Outcome {
    let mut bad = false;
    let results = points
        .iter()
        .map(|&p| match cauchy_eval(f, contour, p) {
            Ok(v) => {
                let residual = f.eval(p).ok().map(|d| dist(v, d));
                CauchyEntry {
                    point: p,
                    value: Some(v),
                    residual_vs_direct: residual,
                    within_tol: residual.map(|r| r <= tol),
                    error: None,
                }
            }
            Err(e) => {
                bad = true;
                CauchyEntry {
                    point: p,
                    value: None,
                    residual_vs_direct: None,
                    within_tol: None,
                    error: Some(ErrorObj::of(&e)),
                }
            }
        })
        .collect();
    render(&CauchyReport { command: "cauchy", results }, bad)
}

fn run_verify(names: &[String], seed: u64) -> Result<Outcome, Usage> {
    for n in names {
        if !verify::SUITES.contains(&n.as_str()) {
            return Err(Usage(Error::UnknownSuite(n.clone()).to_string()));
        }
    }
    let suites: Vec<SuiteReport> = names
        .iter()
        .map(|n| verify::run_suite(n, seed))
        .collect::<Result<_, _>>()?;
    let pass = suites.iter().all(|s| s.passed);
    Ok(render(&VerifyReport { command: "verify", seed, pass, suites }, !pass))
}

/// Dispatch a JobSpec object: `{"command": ..., "expr": ..., "points": ...,
/// "contour": ..., "orbit": ..., "suites": ..., "options": {...}}`.
fn run_job(v: &Value) -> Result<Outcome, Usage> {
    let obj = v.as_object().ok_or_else(|| Usage("job spec must be a JSON object".into()))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| Usage("job spec needs a string field 'command'".into()))?;
    let options = obj.get("options").and_then(Value::as_object);
    let opt_u64 = |name: &str, default: u64| -> u64 {
        options
            .and_then(|o| o.get(name))
            .and_then(Value::as_u64)
            .unwrap_or(default)
    };
    let opt_f64 = |name: &str, default: f64| -> f64 {
        options
            .and_then(|o| o.get(name))
            .and_then(Value::as_f64)
            .unwrap_or(default)
    };
    let expr = || -> Result<FuncExpr, Usage> {
        Ok(json::expr_from_json(obj.get("expr").ok_or_else(|| Usage("job spec needs 'expr'".into()))?)?)
    };
    let points = || -> Result<Vec<Quaternion>, Usage> {
        match obj.get("points") {
            None => Ok(Vec::new()),
            Some(p) => Ok(json::points_from_json(p)?),
        }
    };
    let contour = || -> Result<Contour, Usage> {
        let c = json::contour_from_json(
            obj.get("contour").ok_or_else(|| Usage("job spec needs 'contour'".into()))?,
        )?;
        match options.and_then(|o| o.get("nodes")).and_then(Value::as_u64) {
            None => Ok(c),
            Some(n) => Ok(Contour::new(c.plane, c.circles, n as usize)?),
        }
    };

    match command {
        "eval" => Ok(run_eval(&expr()?, &points()?)),
        "derive" => Ok(run_derive(&expr()?, &points()?)),
        "invert" => run_invert(&expr()?, &points()?, opt_f64("tolerance", 1e-8)),
        "series-expand" => {
            let orbit = json::orbit_from_json(
                obj.get("orbit").ok_or_else(|| Usage("series-expand needs 'orbit'".into()))?,
            )?;
            Ok(run_series_expand(
                &expr()?,
                orbit,
                &contour()?,
                opt_u64("order", 32) as usize,
                &points()?,
                opt_f64("tolerance", 1e-8),
            ))
        }
        "cauchy" => Ok(run_cauchy(&expr()?, &contour()?, &points()?, opt_f64("tolerance", 1e-8))),
        "verify" => {
            let names: Vec<String> = match obj.get("suites") {
                None => verify::SUITES.iter().map(|s| s.to_string()).collect(),
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| Usage("'suites' must be an array of strings".into()))
                    })
                    .collect::<Result<_, _>>()?,
                Some(_) => return Err(Usage("'suites' must be an array of strings".into())),
            };
            run_verify(&names, opt_u64("seed", 0))
        }
        other => Err(Usage(format!("unknown job command '{other}'"))),
    }
}

fn execute(cmd: &Cmd) -> Result<(Outcome, Option<PathBuf>), Usage> {
    match cmd {
        Cmd::Eval { expr, points, json_out } => {
            Ok((run_eval(&load_expr(expr)?, &load_points(points)?), json_out.clone()))
        }
        Cmd::Derive { expr, points, json_out } => {
            Ok((run_derive(&load_expr(expr)?, &load_points(points)?), json_out.clone()))
        }
        Cmd::Invert { expr, points, tol, json_out } => Ok((
            run_invert(&load_expr(expr)?, &load_points(points)?, *tol)?,
            json_out.clone(),
        )),
        Cmd::SeriesExpand { expr, orbit, contour, order, points, nodes, tol, json_out } => {
            let f = load_expr(expr)?;
            let o = json::orbit_from_json(&load_value(orbit)?)?;
            let c = load_contour(contour, *nodes)?;
            let pts = match points {
                None => Vec::new(),
                Some(p) => load_points(p)?,
            };
            Ok((run_series_expand(&f, o, &c, *order, &pts, *tol), json_out.clone()))
        }
        Cmd::Cauchy { expr, contour, points, nodes, tol, json_out } => Ok((
            run_cauchy(
                &load_expr(expr)?,
                &load_contour(contour, *nodes)?,
                &load_points(points)?,
                *tol,
            ),
            json_out.clone(),
        )),
        Cmd::Verify { suites, seed, list, json_out } => {
            if *list {
                let body = serde_json::to_string_pretty(&verify::SUITES).expect("serializable");
                return Ok((Outcome { body, domain_errors: false }, json_out.clone()));
            }
            let names: Vec<String> = if suites.is_empty() {
                verify::SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suites.clone()
            };
            Ok((run_verify(&names, *seed)?, json_out.clone()))
        }
        Cmd::Run { job, json_out } => Ok((run_job(&load_value(job)?)?, json_out.clone())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.cmd) {
        Ok((outcome, json_out)) => {
            let body = outcome.body + "\n";
            match json_out {
                None => print!("{body}"),
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, body) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
            }
            if outcome.domain_errors {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
