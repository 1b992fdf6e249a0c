//! Tensor Gauss–Hermite quadrature against Gaussian measures, with a seeded
//! Monte Carlo fallback.
//!
//! A rule with precision P integrates against N(0, P⁻¹): nodes are mapped by
//! x = P^{-1/2} √2 u from the physicists' Hermite nodes u. Sums run in fixed
//! lexicographic node order with compensated accumulation, so results are
//! bit-identical run to run.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{FockError, Result};
use crate::linalg;

pub const DEFAULT_NODES: usize = 40;
pub const NODE_BUDGET: u128 = 10_000_000;

/// Nodes and weights for ∫ f(u) e^{−u²} du.
///
/// Golub–Welsch eigensolve of the Jacobi matrix, followed by Newton polishing
/// on the orthonormal Hermite recurrence and Christoffel-function weights.
pub fn gauss_hermite(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k > 0, "need at least one node");
    let jac = DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(k);
    for u in nodes.iter_mut() {
        for _ in 0..3 {
            let (psi, dpsi, _) = hermite_orthonormal(k, *u);
            if dpsi == 0.0 {
                break;
            }
            let step = psi / dpsi;
            *u -= step;
            if step.abs() < 1e-15 * u.abs().max(1.0) {
                break;
            }
        }
        let (_, _, sum_sq) = hermite_orthonormal(k, *u);
        weights.push(1.0 / sum_sq);
    }
    // exact symmetry of the rule
    for i in 0..k / 2 {
        let j = k - 1 - i;
        let u = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -u;
        nodes[j] = u;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    (nodes, weights)
}

/// (ψ_k(u), ψ_k'(u), Σ_{j<k} ψ_j(u)²) for the orthonormal Hermite functions of weight e^{−u²}.
fn hermite_orthonormal(k: usize, u: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for j in 0..k {
        sum_sq += cur * cur;
        let next = (2.0 / (j as f64 + 1.0)).sqrt() * u * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    // ψ_k' = √(2k) ψ_{k−1}
    (cur, (2.0 * k as f64).sqrt() * prev, sum_sq)
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    fn push_part(acc: &mut (f64, f64), v: f64) {
        let t = acc.0 + v;
        if acc.0.abs() >= v.abs() {
            acc.1 += (acc.0 - t) + v;
        } else {
            acc.1 += (v - t) + acc.0;
        }
        acc.0 = t;
    }

    pub fn add(&mut self, v: Complex64) {
        Self::push_part(&mut self.re, v.re);
        Self::push_part(&mut self.im, v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    nodes_per_axis: usize,
    scaling: DMatrix<f64>,
    transform: DMatrix<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_det_scaling: f64,
}

impl QuadratureRule {
    /// Rule for the probability measure N(0, scaling⁻¹) on ℝ^dim.
    pub fn new(dim: usize, nodes_per_axis: usize, scaling: DMatrix<f64>) -> Result<Self> {
        if dim == 0 || nodes_per_axis == 0 {
            return Err(FockError::InvalidInput("quadrature dimension and node count must be positive".into()));
        }
        if scaling.nrows() != dim || scaling.ncols() != dim {
            return Err(FockError::DimensionMismatch { expected: dim, got: scaling.nrows() });
        }
        let total = (nodes_per_axis as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > NODE_BUDGET {
            return Err(FockError::QuadratureBudget { nodes: total, limit: NODE_BUDGET });
        }
        let transform = linalg::inv_sqrt_spd(&scaling)? * std::f64::consts::SQRT_2;
        let log_det_scaling = linalg::log_det_spd(&scaling)?;
        let (nodes, w) = gauss_hermite(nodes_per_axis);
        let norm = std::f64::consts::PI.sqrt();
        Ok(QuadratureRule {
            dim,
            nodes_per_axis,
            scaling,
            transform,
            nodes,
            weights: w.into_iter().map(|v| v / norm).collect(),
            log_det_scaling,
        })
    }

    /// Standard normal rule.
    pub fn standard(dim: usize, nodes_per_axis: usize) -> Result<Self> {
        Self::new(dim, nodes_per_axis, DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn scaling(&self) -> &DMatrix<f64> {
        &self.scaling
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis.pow(self.dim as u32)
    }

    /// E[f(X)] for X ~ N(0, scaling⁻¹).
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Complex64> {
        self.integrate_weighted(|x, _| f(x))
    }

    /// ∫ f(x) dx over ℝ^dim, by dividing out the rule's Gaussian density.
    pub fn integrate_lebesgue(&self, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Complex64> {
        let log_norm = 0.5 * self.dim as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * self.log_det_scaling;
        self.integrate_weighted(|x, half_quad| f(x) * (log_norm + half_quad).exp())
    }

    fn integrate_weighted(&self, mut f: impl FnMut(&[f64], f64) -> Complex64) -> Result<Complex64> {
        let out = self.integrate_many_weighted(1, |x, half_quad, v| v[0] = f(x, half_quad))?;
        Ok(out[0])
    }

    /// E[fᵢ(X)] for m integrands sharing node evaluations; `f` fills one value per integrand.
    ///
    /// Each integral is summed in the same order as [`Self::integrate`], so
    /// results are bit-identical to m separate calls.
    pub fn integrate_many(&self, m: usize, mut f: impl FnMut(&[f64], &mut [Complex64])) -> Result<Vec<Complex64>> {
        self.integrate_many_weighted(m, |x, _, v| f(x, v))
    }

    fn integrate_many_weighted(&self, m: usize, mut f: impl FnMut(&[f64], f64, &mut [Complex64])) -> Result<Vec<Complex64>> {
        let d = self.dim;
        let k = self.nodes_per_axis;
        let mut idx = vec![0usize; d];
        let mut u = DVector::zeros(d);
        let mut x = vec![0.0; d];
        let mut acc = vec![CompensatedSum::default(); m];
        let mut vals = vec![Complex64::new(0.0, 0.0); m];
        for count in 0..self.node_count() {
            let mut w = 1.0;
            let mut half_quad = 0.0;
            for j in 0..d {
                u[j] = self.nodes[idx[j]];
                w *= self.weights[idx[j]];
                half_quad += u[j] * u[j];
            }
            let xv = &self.transform * &u;
            x.copy_from_slice(xv.as_slice());
            f(&x, half_quad, &mut vals);
            for (a, v) in acc.iter_mut().zip(&vals) {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(FockError::NonFinite { index: count });
                }
                a.add(v * w);
            }
            // lexicographic increment, last axis fastest
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < k {
                    break;
                }
                idx[j] = 0;
            }
        }
        Ok(acc.iter().map(CompensatedSum::value).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub std_error: f64,
    pub seed: u64,
    pub samples: usize,
}

/// Monte Carlo estimate of E[f(X)], X ~ N(0, scaling⁻¹), from a seeded ChaCha stream.
pub fn mc_integrate(
    seed: u64,
    samples: usize,
    scaling: &DMatrix<f64>,
    mut f: impl FnMut(&[f64]) -> Complex64,
) -> Result<McEstimate> {
    if samples < 1000 {
        return Err(FockError::InvalidInput(format!("Monte Carlo needs at least 1000 samples, got {samples}")));
    }
    let d = scaling.nrows();
    let transform = linalg::inv_sqrt_spd(scaling)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    let mut acc = CompensatedSum::default();
    let mut g = DVector::zeros(d);
    for i in 0..samples {
        for j in 0..d {
            g[j] = StandardNormal.sample(&mut rng);
        }
        let x = &transform * &g;
        let v = f(x.as_slice());
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(FockError::NonFinite { index: i });
        }
        acc.add(v);
        values.push(v);
    }
    let mean = acc.value() / samples as f64;
    let var: f64 = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (samples as f64 - 1.0);
    Ok(McEstimate { estimate: mean, std_error: (var / samples as f64).sqrt(), seed, samples })
}
