//! Machine-readable report pieces shared by the CLI and the verification suite.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::FockError;
use crate::operator::OperatorContext;
use crate::space::matrix_to_rows;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes iff residual ≤ tolerance (NaN fails).
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), lhs, rhs, residual, tolerance, pass: residual <= tolerance, note: None }
    }

    /// |lhs − rhs| / max(1, |rhs|) style comparison with the given scale floor.
    pub fn relative(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        Self::new(name, lhs, rhs, (lhs - rhs).abs() / scale, tolerance)
    }

    /// A boolean property; lhs = 1 when it holds.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check { name: name.into(), lhs: v, rhs: 1.0, residual: 1.0 - v, tolerance: 0.0, pass: ok, note: None }
    }

    pub fn failed(name: impl Into<String>, err: &FockError) -> Self {
        Check {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            residual: f64::NAN,
            tolerance: 0.0,
            pass: false,
            note: Some(format!("{}: {}", err.kind(), err)),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(c: Complex64) -> Self {
        ComplexValue { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorObject {
    pub kind: String,
    pub message: String,
}

impl From<&FockError> for ErrorObject {
    fn from(e: &FockError) -> Self {
        ErrorObject { kind: e.kind().to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextSummary {
    pub n: usize,
    #[serde(rename = "cA")]
    pub c_a: f64,
    #[serde(rename = "cConst")]
    pub c_const: f64,
    #[serde(rename = "detVA")]
    pub det_v_a: f64,
    #[serde(rename = "detVH")]
    pub det_v_h: f64,
    #[serde(rename = "detH")]
    pub det_h: f64,
    #[serde(rename = "realPreserving")]
    pub real_preserving: bool,
    #[serde(rename = "hEigenvalues")]
    pub h_eigenvalues: Vec<f64>,
    #[serde(rename = "realForm", skip_serializing_if = "Option::is_none")]
    pub real_form: Option<RealFormSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealFormSummary {
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<f64>>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    #[serde(rename = "detR")]
    pub det_r: f64,
    #[serde(rename = "detT")]
    pub det_t: f64,
    #[serde(rename = "detS")]
    pub det_s: f64,
    #[serde(rename = "detL")]
    pub det_l: f64,
}

impl ContextSummary {
    pub fn new(ctx: &OperatorContext) -> Self {
        ContextSummary {
            n: ctx.n(),
            c_a: ctx.c_a(),
            c_const: ctx.c_const(),
            det_v_a: ctx.det_v_a(),
            det_v_h: ctx.det_v_h(),
            det_h: ctx.det_h(),
            real_preserving: ctx.real_preserving(),
            h_eigenvalues: ctx.h_eigenvalues().iter().copied().collect(),
            real_form: ctx.real_form().map(|rf| RealFormSummary {
                r: matrix_to_rows(&rf.r),
                t: matrix_to_rows(&rf.t),
                s: matrix_to_rows(&rf.s),
                l: matrix_to_rows(&rf.l),
                m: matrix_to_rows(&rf.m),
                d: matrix_to_rows(&rf.d),
                det_r: rf.det_r,
                det_t: rf.det_t,
                det_s: rf.det_s,
                det_l: rf.det_l,
            }),
        }
    }
}
