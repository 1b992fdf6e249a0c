//! The four `fock` subcommands and their JSON/CSV reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{complex_point, EvalConfig, QuadratureParams, Quantity, RunConfig};
use crate::error::{FockError, Result};
use crate::kernel::{self, fock_rule, inner_product_fa, inner_product_fa_exact, kernel_eval};
use crate::operator::{decompose, OperatorContext};
use crate::quadrature::QuadratureRule;
use crate::report::{Check, ComplexValue, ContextSummary, ErrorObject};
use crate::space::SpaceContext;
use crate::transforms::*;
use crate::truncation::ca_sequence;
use crate::verify::{group_names, run_suite, VerifyOptions};

/// Bumped whenever a report field is renamed or removed.
pub const REPORT_SCHEMA_VERSION: &str = "1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fock", version, about = "Weighted Fock spaces: kernels, transforms, verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report destination; a .csv path selects CSV (eval only). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks and Monte Carlo estimates.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Gauss–Hermite nodes per axis.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// H, K, the real form and constants of an operator, with invariant residuals.
    Decompose,
    /// Kernel, transform and coherent-state values at configured points.
    Eval,
    /// The full verification suite.
    Verify,
    /// c_{A_n} along a sequence of finite truncations.
    Truncate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Eval => "eval",
            Command::Verify => "verify",
            Command::Truncate => "truncate",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub fock_core: &'static str,
    pub report_schema: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    /// The configuration as read, before flag overrides.
    pub config: Value,
    pub quadrature: QuadratureParams,
    pub seed: u64,
    pub versions: Versions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextSummary>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    fn new(command: Command, raw: &Value, q: QuadratureParams, context: Option<&OperatorContext>, results: Value, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report {
            command: command.name(),
            config: raw.clone(),
            quadrature: q,
            seed: q.seed,
            versions: Versions { fock_core: env!("CARGO_PKG_VERSION"), report_schema: REPORT_SCHEMA_VERSION },
            context: context.map(ContextSummary::new),
            results,
            checks,
            pass,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILURE
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// One evaluated point: a value or the error it raised.
#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<ComplexValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
}

pub fn error_json(err: &FockError) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "error": ErrorObject::from(err) })).expect("serializes");
    s.push('\n');
    s
}

/// Runs one command on an already-parsed config.
pub fn execute(command: Command, config: &RunConfig, raw: &Value, seed: Option<u64>, nodes: Option<usize>) -> Result<Report> {
    let q = config.quadrature_params(seed, nodes);
    if q.nodes == 0 {
        return Err(FockError::InvalidInput("nodes must be positive".into()));
    }
    match command {
        Command::Decompose => cmd_decompose(config, raw, q),
        Command::Eval => cmd_eval(config, raw, q),
        Command::Verify => Ok(cmd_verify(raw, q)),
        Command::Truncate => cmd_truncate(config, raw, q),
    }
}

pub fn cmd_decompose(config: &RunConfig, raw: &Value, q: QuadratureParams) -> Result<Report> {
    let ctx = config.require_operator()?.build()?;
    let a = ctx.a();
    let (h, k) = decompose(a)?;
    let j = ctx.space().j();
    let sigma = ctx.space().sigma();
    let scale = a.norm();
    let mut checks = vec![
        residual_check("decompose.sum", a.sub(&h.add(&k)).norm() / scale, 1e-12),
        residual_check("decompose.h_commutes_with_j", h.compose(&j).sub(&j.compose(&h)).norm() / scale, 1e-12),
        residual_check("decompose.k_anticommutes_with_j", k.compose(&j).add(&j.compose(&k)).norm() / scale, 1e-12),
        Check::holds("decompose.h_positive_definite", crate::linalg::min_eigenvalue(h.matrix()) > 0.0),
        residual_check(
            "operator.sigma_k_transpose",
            sigma.compose(&k).transpose().sub(&k.compose(&sigma)).norm() / scale,
            1e-12,
        ),
        Check::holds("operator.c_a_at_most_one", ctx.c_a() <= 1.0 + 1e-15),
    ];
    let c = kernel::constants_check(&ctx);
    checks.push(Check::new("constants.c_a_c_product", c.lhs, c.rhs, c.residual, 1e-12));
    if ctx.real_preserving() {
        let d = kernel::det_s_check(&ctx)?;
        checks.push(Check::new("constants.det_s", d.lhs, d.rhs, d.residual, 1e-12));
    }
    let (vals, vecs) = ctx.h_eigenbasis();
    let results = json!({
        "A": a.to_rows(),
        "H": h.to_rows(),
        "K": k.to_rows(),
        "T1": ctx.t1().to_rows(),
        "hComplex": complex_rows(ctx.h_complex()),
        "kComplex": complex_rows(ctx.k_complex()),
        "hEigenbasis": {
            "values": vals,
            "vectors": vecs.iter().map(|v| v.iter().map(|c| ComplexValue::from(*c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        },
    });
    Ok(Report::new(Command::Decompose, raw, q, Some(&ctx), results, checks))
}

fn residual_check(name: &str, r: f64, tol: f64) -> Check {
    Check::new(name, r, 0.0, r, tol)
}

fn complex_rows(m: &crate::space::CMatrix) -> Vec<Vec<ComplexValue>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect()
}

/// Operator context and dimension for an eval config, with all guards applied.
fn eval_setup(config: &RunConfig, eval: &EvalConfig) -> Result<(Option<OperatorContext>, usize)> {
    let ctx = match &config.operator {
        Some(op) => Some(op.build()?),
        None if eval.quantity.needs_operator() => return Err(config.require_operator().unwrap_err()),
        None => None,
    };
    let n = match (&ctx, eval.points.first().and_then(|p| p.z.as_ref())) {
        (Some(c), _) => c.n(),
        (None, Some(z)) if !z.is_empty() && z.len() % 2 == 0 => z.len() / 2,
        (None, _) => return Err(FockError::InvalidInput("cannot infer n: give an operator or a point z of even length".into())),
    };
    eval.validate(n)?;
    if let Some(c) = &ctx {
        if eval.quantity.requires_real_form() && !c.real_preserving() {
            return Err(FockError::RequiresRealForm);
        }
    }
    Ok((ctx, n))
}

/// The report plus per-point rows for CSV export.
pub struct EvalOutcome {
    pub report: Report,
    pub rows: Vec<PointResult>,
}

pub fn cmd_eval(config: &RunConfig, raw: &Value, q: QuadratureParams) -> Result<Report> {
    Ok(run_eval(config, raw, q)?.report)
}

pub fn run_eval(config: &RunConfig, raw: &Value, q: QuadratureParams) -> Result<EvalOutcome> {
    let eval = config.eval.as_ref().ok_or_else(|| FockError::InvalidInput("config needs an \"eval\" section".into()))?;
    let (ctx, n) = eval_setup(config, eval)?;
    let space = SpaceContext::new(n)?;
    let ctx_ref = ctx.as_ref();
    let mut checks = Vec::new();
    let method;
    let rows: Vec<PointResult>;

    if eval.quantity == Quantity::Norm {
        let ctx = ctx_ref.expect("norm needs an operator");
        let f = eval.function.as_ref().expect("validated").holomorphic(n, ctx_ref)?;
        let rule = fock_rule(ctx, q.nodes)?;
        let quad = inner_product_fa(ctx, &f, &f, &rule)?.re;
        let exact = inner_product_fa_exact(ctx, &f, &f)?.re;
        let scale = quad.abs().max(exact.abs()).max(f64::MIN_POSITIVE);
        checks.push(Check::new("eval.norm_quadrature_vs_closed_form", quad.sqrt(), exact.sqrt(), (quad - exact).abs() / scale, 1e-6));
        let results = json!({
            "quantity": eval.quantity,
            "method": "quadrature_and_closed_form",
            "nodes": q.nodes,
            "normSquared": { "quadrature": quad, "closedForm": exact },
            "norm": exact.sqrt(),
        });
        let rows = vec![PointResult { index: 0, value: Some(Complex64::new(exact.sqrt(), 0.0).into()), error: None }];
        return Ok(EvalOutcome { report: Report::new(Command::Eval, raw, q, ctx_ref, results, checks), rows });
    }

    let hol = match &eval.function {
        Some(sel) if matches!(eval.quantity, Quantity::Function | Quantity::Psi | Quantity::PsiStar | Quantity::Restrict) => {
            Some(sel.holomorphic(n, ctx_ref)?)
        }
        _ => None,
    };
    let real = match &eval.function {
        Some(sel) if hol.is_none() => Some(sel.real(n, ctx_ref)?),
        _ => None,
    };

    // Pre-transform once; per point only evaluation remains.
    let transformed: Option<crate::holomorphic::HolomorphicFunction> = match eval.quantity {
        Quantity::Function => hol.clone(),
        Quantity::Psi => Some(kernel::psi(ctx_ref.unwrap(), hol.as_ref().unwrap())?),
        Quantity::PsiStar => Some(kernel::psi_star(ctx_ref.unwrap(), hol.as_ref().unwrap())?),
        Quantity::ClassicalBargmann => Some(classical_bargmann(real.as_ref().unwrap())?),
        Quantity::Bargmann => Some(generalized_bargmann(ctx_ref.unwrap(), real.as_ref().unwrap())?),
        Quantity::GaussianBargmann => Some(gaussian_bargmann(ctx_ref.unwrap(), real.as_ref().unwrap())?),
        Quantity::RestrictAdjoint => Some(restrict_adjoint(ctx_ref.unwrap(), real.as_ref().unwrap())?),
        _ => None,
    };
    let on_real: Option<RealDomainFunction> = match eval.quantity {
        Quantity::Restrict => Some(restrict(ctx_ref.unwrap(), hol.as_ref().unwrap())?),
        Quantity::RrStar => Some(rr_star(ctx_ref.unwrap(), real.as_ref().unwrap(), q.nodes)?),
        Quantity::AbsRStar => Some(abs_r_star(ctx_ref.unwrap(), real.as_ref().unwrap(), q.nodes)?),
        _ => None,
    };
    let integral_rule = match eval.quantity {
        Quantity::KernelIntegral => {
            let rf = ctx_ref.unwrap().require_real_form()?;
            Some(QuadratureRule::new(n, q.nodes, 2.0 * &rf.t - &rf.s)?)
        }
        _ => None,
    };
    method = match eval.quantity {
        Quantity::KernelIntegral => "quadrature",
        Quantity::RrStar | Quantity::AbsRStar if !real.as_ref().unwrap().is_closed_form() => "quadrature",
        _ => "closed_form",
    };

    let point = |i: usize| -> Result<Complex64> {
        let p = &eval.points[i];
        let z = p.z.as_ref().map(|v| complex_point(space, v, "z")).transpose()?;
        let w = p.w.as_ref().map(|v| complex_point(space, v, "w")).transpose()?;
        let x = p.x.clone();
        match eval.quantity {
            Quantity::Kernel => kernel_eval(ctx_ref.unwrap(), z.as_ref().unwrap(), w.as_ref().unwrap()),
            Quantity::KernelIntegral => {
                kernel_integral_quadrature(ctx_ref.unwrap(), z.as_ref().unwrap(), w.as_ref().unwrap(), integral_rule.as_ref().unwrap())
            }
            Quantity::MeasureDensity => Ok(Complex64::new(kernel::measure_density(ctx_ref.unwrap(), z.as_ref().unwrap()), 0.0)),
            Quantity::EvalNorm => Ok(Complex64::new(kernel::eval_functional_norm(ctx_ref.unwrap(), z.as_ref().unwrap())?, 0.0)),
            Quantity::CoherentState => coherent_state(ctx_ref.unwrap(), x.as_ref().unwrap(), z.as_ref().unwrap()),
            Quantity::Multiplier => {
                Ok(multiplier(ctx_ref.unwrap(), &DVector::from_vec(x.unwrap()), z.as_ref().unwrap()))
            }
            Quantity::Restrict | Quantity::RrStar | Quantity::AbsRStar => Ok(on_real.as_ref().unwrap().eval(x.as_ref().unwrap())),
            _ => Ok(transformed.as_ref().unwrap().eval(z.as_ref().unwrap())),
        }
        .and_then(|v| if v.re.is_finite() && v.im.is_finite() { Ok(v) } else { Err(FockError::Range { exponent: f64::INFINITY }) })
    };
    rows = (0..eval.points.len())
        .map(|i| match point(i) {
            Ok(v) => PointResult { index: i, value: Some(v.into()), error: None },
            Err(e) => PointResult { index: i, value: None, error: Some((&e).into()) },
        })
        .collect();

    if eval.quantity == Quantity::KernelIntegral {
        let ctx = ctx_ref.unwrap();
        for (i, r) in rows.iter().enumerate() {
            let (Some(v), p) = (r.value, &eval.points[i]) else { continue };
            let z = complex_point(space, p.z.as_ref().unwrap(), "z")?;
            let w = complex_point(space, p.w.as_ref().unwrap(), "w")?;
            let k = kernel_eval(ctx, &z, &w)?;
            let got = Complex64::new(v.re, v.im);
            checks.push(Check::new(format!("eval.kernel_integral_point_{i}"), got.re, k.re, (got - k).norm() / k.norm(), 1e-6));
        }
    }
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    checks.push(
        Check::new("eval.points_evaluated", (rows.len() - failures) as f64, rows.len() as f64, failures as f64, 0.0)
            .with_note(format!("{failures} of {} points raised an error", rows.len())),
    );
    let results = json!({
        "quantity": eval.quantity,
        "method": method,
        "nodes": q.nodes,
        "values": rows,
    });
    Ok(EvalOutcome { report: Report::new(Command::Eval, raw, q, ctx_ref, results, checks), rows })
}

pub fn cmd_verify(raw: &Value, q: QuadratureParams) -> Report {
    let opts = VerifyOptions { seed: q.seed, nodes: q.nodes, mc_samples: q.mc_samples };
    let checks = run_suite(&opts);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let results = json!({
        "groups": group_names(),
        "checkCount": checks.len(),
        "failed": failed,
    });
    Report::new(Command::Verify, raw, q, None, results, checks)
}

pub fn cmd_truncate(config: &RunConfig, raw: &Value, q: QuadratureParams) -> Result<Report> {
    let input = config.truncation.clone().ok_or_else(|| FockError::InvalidInput("config needs a \"truncation\" section".into()))?;
    let spec = input.into_spec()?;
    let rep = ca_sequence(&spec);
    let checks = vec![
        Check::holds("truncation.factors_at_least_one", rep.increments.iter().all(|d| *d >= 0.0)),
        Check::holds("truncation.monotone", rep.log_inv_ca.windows(2).all(|w| w[1] >= w[0])),
    ];
    let results = json!({
        "spec": spec,
        "logInvCA": rep.log_inv_ca,
        "invCA": rep.inv_ca(),
        "increments": rep.increments,
        "verdict": rep.verdict,
    });
    Ok(Report::new(Command::Truncate, raw, q, None, results, checks))
}

/// `index,re,im,error_kind` rows.
pub fn eval_csv(rows: &[PointResult]) -> String {
    let mut s = String::from("index,re,im,error_kind\n");
    for r in rows {
        match (&r.value, &r.error) {
            (Some(v), _) => writeln!(s, "{},{:e},{:e},", r.index, v.re, v.im),
            (None, Some(e)) => writeln!(s, "{},,,{}", r.index, e.kind),
            (None, None) => writeln!(s, "{},,,", r.index),
        }
        .expect("string write");
    }
    s
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Output text and destination for a finished command.
pub struct Rendered {
    pub text: String,
    pub path: Option<PathBuf>,
    pub exit_code: i32,
}

/// Parses the config file, runs the command and renders the result; never panics on bad input.
pub fn run(cli: &Cli) -> Rendered {
    let (config, raw) = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return usage_error(&e, cli.out.clone()),
    };
    let out = cli.out.clone().or_else(|| config.output.clone().map(PathBuf::from));
    let csv = out.as_deref().is_some_and(is_csv);
    if csv && cli.command != Command::Eval {
        let e = FockError::InvalidInput("CSV output is only available for eval".into());
        return usage_error(&e, None);
    }
    let result = if cli.command == Command::Eval {
        let q = config.quadrature_params(cli.seed, cli.nodes);
        run_eval(&config, &raw, q).map(|o| (o.report, Some(o.rows)))
    } else {
        execute(cli.command, &config, &raw, cli.seed, cli.nodes).map(|r| (r, None))
    };
    match result {
        Ok((report, rows)) => {
            let text = match (csv, rows) {
                (true, Some(rows)) => eval_csv(&rows),
                _ => report.to_json(),
            };
            Rendered { text, path: out, exit_code: report.exit_code() }
        }
        Err(e) => usage_error(&e, if csv { None } else { out }),
    }
}

fn usage_error(e: &FockError, path: Option<PathBuf>) -> Rendered {
    Rendered { text: error_json(e), path, exit_code: EXIT_USAGE }
}

/// Reads and parses the config; no file means an empty config.
pub fn load_config(path: Option<&Path>) -> Result<(RunConfig, Value)> {
    let Some(path) = path else {
        return Ok((RunConfig::default(), json!({})));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| FockError::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| FockError::InvalidInput(format!("config is not JSON: {e}")))?;
    let config = RunConfig::from_json(&text)?;
    Ok((config, raw))
}
