//! Finite truncations A_n = d(R_n, T_n) with commuting diagonal R, T and the
//! growth of c_{A_n}⁻¹ as n increases.

use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};

/// Exponent above which the fitted power-law tail is treated as summable.
pub const SUMMABLE_EXPONENT: f64 = 1.05;

/// Eigenvalue sequences r_k, t_k for k = 1..maxN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationSpec {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    #[serde(rename = "maxN")]
    pub max_n: usize,
}

/// JSON forms accepted for a truncation spec.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TruncationInput {
    Generator(Generator),
    Explicit(ExplicitSpec),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    #[serde(rename = "maxN")]
    pub max_n: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Generator {
    /// r_k = r, t_k = t.
    Constant {
        r: f64,
        t: f64,
        #[serde(rename = "maxN")]
        max_n: usize,
    },
    /// r_k = t (1 + amplitude · k^{−power}), t_k = t.
    Perturbation {
        t: f64,
        amplitude: f64,
        power: f64,
        #[serde(rename = "maxN")]
        max_n: usize,
    },
}

impl TruncationInput {
    pub fn into_spec(self) -> Result<TruncationSpec> {
        match self {
            TruncationInput::Explicit(e) => TruncationSpec::new(e.r, e.t, e.max_n),
            TruncationInput::Generator(Generator::Constant { r, t, max_n }) => TruncationSpec::constant(r, t, max_n),
            TruncationInput::Generator(Generator::Perturbation { t, amplitude, power, max_n }) => {
                TruncationSpec::perturbation(t, amplitude, power, max_n)
            }
        }
    }
}

impl TruncationSpec {
    pub fn new(r: Vec<f64>, t: Vec<f64>, max_n: usize) -> Result<Self> {
        if max_n == 0 {
            return Err(FockError::InvalidInput("maxN must be at least 1".into()));
        }
        for (name, seq) in [("r", &r), ("t", &t)] {
            if seq.len() < max_n {
                return Err(FockError::InvalidInput(format!("sequence {name} has {} entries, maxN is {max_n}", seq.len())));
            }
            if let Some(k) = seq.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(FockError::InvalidInput(format!("{name}[{k}] must be finite and positive")));
            }
        }
        Ok(TruncationSpec { r, t, max_n })
    }

    pub fn constant(r: f64, t: f64, max_n: usize) -> Result<Self> {
        Self::new(vec![r; max_n], vec![t; max_n], max_n)
    }

    pub fn perturbation(t: f64, amplitude: f64, power: f64, max_n: usize) -> Result<Self> {
        let r = (1..=max_n).map(|k| t * (1.0 + amplitude * (k as f64).powf(-power))).collect();
        Self::new(r, vec![t; max_n], max_n)
    }
}

/// log[(r + t) / (2√(rt))] = log cosh(½ log(r/t)), evaluated without cancellation.
pub fn log_factor(r: f64, t: f64) -> f64 {
    let u = 0.5 * (r / t).ln();
    let s = (0.5 * u).sinh();
    (2.0 * s * s).ln_1p()
}

/// Closed form [(r + t) / (2√(rt))]^{n/2}.
pub fn driver_hall(r: f64, t: f64, n: usize) -> f64 {
    (0.5 * n as f64 * log_factor(r, t)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// Always "heuristic": a power-law fit to the last increments, not a proof.
    pub method: &'static str,
    pub bounded: bool,
    /// Fitted decay exponent p in δ_k ≈ C k^{−p}; absent when increments vanish.
    pub exponent: Option<f64>,
    /// Estimated Σ_{k>N} δ_k when bounded.
    pub tail_bound: Option<f64>,
    /// Estimated lim log c_{A_n}⁻¹ when bounded.
    pub limit_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    /// log c_{A_n}⁻¹ for n = 1..maxN.
    pub log_inv_ca: Vec<f64>,
    /// Per-coordinate increments ½ log[(r_k + t_k)/(2√(r_k t_k))].
    pub increments: Vec<f64>,
    pub verdict: Verdict,
}

impl TruncationReport {
    /// c_{A_n}⁻¹, possibly +∞ when the logarithm is very large.
    pub fn inv_ca(&self) -> Vec<f64> {
        self.log_inv_ca.iter().map(|v| v.exp()).collect()
    }
}

pub fn ca_sequence(spec: &TruncationSpec) -> TruncationReport {
    let increments: Vec<f64> = (0..spec.max_n).map(|k| 0.5 * log_factor(spec.r[k], spec.t[k])).collect();
    let mut acc = 0.0;
    let log_inv_ca = increments
        .iter()
        .map(|d| {
            acc += d;
            acc
        })
        .collect::<Vec<_>>();
    let verdict = verdict(&increments, *log_inv_ca.last().unwrap_or(&0.0));
    TruncationReport { log_inv_ca, increments, verdict }
}

fn verdict(increments: &[f64], total: f64) -> Verdict {
    let n = increments.len();
    let start = n / 2;
    let tail: Vec<(f64, f64)> = increments[start..]
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 0.0)
        .map(|(i, d)| (((start + i + 1) as f64).ln(), d.ln()))
        .collect();
    if tail.is_empty() {
        return Verdict { method: "heuristic", bounded: true, exponent: None, tail_bound: Some(0.0), limit_estimate: Some(total) };
    }
    if tail.len() < 2 {
        return Verdict { method: "heuristic", bounded: false, exponent: None, tail_bound: None, limit_estimate: None };
    }
    let m = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / m;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let p = if sxx > 0.0 { -sxy / sxx } else { 0.0 };
    if p > SUMMABLE_EXPONENT {
        let last = increments[n - 1];
        let tail_bound = last * n as f64 / (p - 1.0);
        Verdict { method: "heuristic", bounded: true, exponent: Some(p), tail_bound: Some(tail_bound), limit_estimate: Some(total + tail_bound) }
    } else {
        Verdict { method: "heuristic", bounded: false, exponent: Some(p), tail_bound: None, limit_estimate: None }
    }
}
