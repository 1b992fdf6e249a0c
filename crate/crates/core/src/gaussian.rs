//! Closed-form Gaussian integration over the class
//! p(v) · exp(½ vᵀQv + b·v + γ) with complex coefficients.
//!
//! Integrating out a block of variables completes the square in that block and
//! replaces the polynomial by its Gaussian expectation (Isserlis moments of a
//! complex-symmetric covariance). The result stays in the same class, so
//! convolutions, transforms and inner products of such functions are exact up
//! to rounding and can be evaluated at complex points by direct substitution.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::linalg;
use crate::poly::{MultiIndex, Polynomial};
use crate::space::{CMatrix, CVector};

/// exp(½ vᵀQv + b·v + γ), Q complex symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpQuadratic {
    pub q: CMatrix,
    pub b: CVector,
    pub gamma: Complex64,
}

impl ExpQuadratic {
    pub fn new(q: CMatrix, b: CVector, gamma: Complex64) -> Self {
        assert_eq!(q.nrows(), q.ncols());
        assert_eq!(q.nrows(), b.len());
        ExpQuadratic { q: linalg::symmetrize_c(&q), b, gamma }
    }

    /// The constant function 1.
    pub fn unit(nvars: usize) -> Self {
        ExpQuadratic { q: CMatrix::zeros(nvars, nvars), b: CVector::zeros(nvars), gamma: Complex64::new(0.0, 0.0) }
    }

    pub fn constant(nvars: usize, log_value: Complex64) -> Self {
        ExpQuadratic { gamma: log_value, ..Self::unit(nvars) }
    }

    pub fn nvars(&self) -> usize {
        self.b.len()
    }

    pub fn exponent(&self, v: &[Complex64]) -> Complex64 {
        let n = self.nvars();
        let mut acc = self.gamma;
        for i in 0..n {
            let mut qi = Complex64::new(0.0, 0.0);
            for j in 0..n {
                qi += self.q[(i, j)] * v[j];
            }
            acc += v[i] * (0.5 * qi + self.b[i]);
        }
        acc
    }

    pub fn eval(&self, v: &[Complex64]) -> Complex64 {
        self.exponent(v).exp()
    }

    pub fn mul(&self, other: &ExpQuadratic) -> ExpQuadratic {
        assert_eq!(self.nvars(), other.nvars());
        ExpQuadratic { q: &self.q + &other.q, b: &self.b + &other.b, gamma: self.gamma + other.gamma }
    }

    pub fn scale_log(&self, log_factor: Complex64) -> ExpQuadratic {
        ExpQuadratic { gamma: self.gamma + log_factor, ..self.clone() }
    }

    /// exp(…)(M u + s) as a function of u.
    pub fn compose_affine(&self, m: &CMatrix, s: &CVector) -> ExpQuadratic {
        let mt = m.transpose();
        let qs = &self.q * s;
        ExpQuadratic::new(
            &mt * &self.q * m,
            &mt * (&qs + &self.b),
            self.gamma + s.dot(&(qs * Complex64::new(0.5, 0.0))) + self.b.dot(s),
        )
    }

    pub fn embed(&self, offset: usize, total: usize) -> ExpQuadratic {
        let n = self.nvars();
        let mut q = CMatrix::zeros(total, total);
        q.view_mut((offset, offset), (n, n)).copy_from(&self.q);
        let mut b = CVector::zeros(total);
        b.rows_mut(offset, n).copy_from(&self.b);
        ExpQuadratic { q, b, gamma: self.gamma }
    }

    pub fn conj_coeffs(&self) -> ExpQuadratic {
        ExpQuadratic { q: self.q.map(|v| v.conj()), b: self.b.map(|v| v.conj()), gamma: self.gamma.conj() }
    }

    pub fn max_diff(&self, other: &ExpQuadratic) -> f64 {
        let dq = (&self.q - &other.q).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let db = (&self.b - &other.b).iter().map(|v| v.norm()).fold(0.0, f64::max);
        dq.max(db).max((self.gamma - other.gamma).norm())
    }
}

/// p(v) · exp(½ vᵀQv + b·v + γ).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussTerm {
    pub poly: Polynomial,
    pub exp: ExpQuadratic,
}

impl GaussTerm {
    pub fn new(poly: Polynomial, exp: ExpQuadratic) -> Self {
        assert_eq!(poly.nvars(), exp.nvars());
        GaussTerm { poly, exp }
    }

    pub fn nvars(&self) -> usize {
        self.exp.nvars()
    }

    /// Normalized density of N(0, P⁻¹) as a term: √det P (2π)^{-d/2} e^{−½xᵀPx}.
    pub fn gaussian_density(p: &DMatrix<f64>) -> Result<Self> {
        let d = p.nrows();
        let log_norm = 0.5 * linalg::log_det_spd(p)? - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln();
        Ok(GaussTerm::new(
            Polynomial::one(d),
            ExpQuadratic::new(-crate::space::to_cmatrix(p), CVector::zeros(d), Complex64::new(log_norm, 0.0)),
        ))
    }

    pub fn eval(&self, v: &[Complex64]) -> Complex64 {
        let e = self.exp.exponent(v);
        if self.poly.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.poly.eval(v) * e.exp()
    }

    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let v: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.eval(&v)
    }

    pub fn mul(&self, other: &GaussTerm) -> GaussTerm {
        GaussTerm { poly: self.poly.mul(&other.poly), exp: self.exp.mul(&other.exp) }
    }

    pub fn mul_exp(&self, e: &ExpQuadratic) -> GaussTerm {
        GaussTerm { poly: self.poly.clone(), exp: self.exp.mul(e) }
    }

    pub fn scale(&self, s: Complex64) -> GaussTerm {
        GaussTerm { poly: self.poly.scale(s), exp: self.exp.clone() }
    }

    pub fn compose_affine(&self, m: &CMatrix, s: &CVector) -> GaussTerm {
        GaussTerm { poly: self.poly.compose_affine(m, s), exp: self.exp.compose_affine(m, s) }
    }

    pub fn embed(&self, offset: usize, total: usize) -> GaussTerm {
        GaussTerm { poly: self.poly.embed(offset, total), exp: self.exp.embed(offset, total) }
    }

    pub fn conj_coeffs(&self) -> GaussTerm {
        GaussTerm { poly: self.poly.conj_coeffs(), exp: self.exp.conj_coeffs() }
    }

    /// Integrate the last `k` variables over ℝᵏ (Lebesgue measure).
    ///
    /// Requires −Re Q restricted to those variables to be positive definite.
    pub fn integrate_trailing(&self, k: usize) -> Result<GaussTerm> {
        let m = self.nvars();
        if k > m {
            return Err(FockError::DimensionMismatch { expected: m, got: k });
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let keep = m - k;
        let q = &self.exp.q;
        let q_xx = q.view((0, 0), (keep, keep)).into_owned();
        let q_xy = q.view((0, keep), (keep, k)).into_owned();
        let q_yx = q.view((keep, 0), (k, keep)).into_owned();
        let precision = -q.view((keep, keep), (k, k)).into_owned();
        let b_x = self.exp.b.rows(0, keep).into_owned();
        let b_y = self.exp.b.rows(keep, k).into_owned();

        let log_det = linalg::log_det_complex_symmetric(&precision)?;
        let cov = linalg::complex_inverse(&precision)?;

        // stationary point y*(x) = cov (b_y + Q_yx x)
        let shift_y = &cov * &b_y;
        let slope_y = &cov * &q_yx;

        let new_q = &q_xx + &q_xy * &slope_y;
        let new_b = &b_x + &q_xy * &shift_y;
        let log_norm = Complex64::new(0.5 * k as f64 * (2.0 * std::f64::consts::PI).ln(), 0.0) - 0.5 * log_det;
        let new_gamma = self.exp.gamma + 0.5 * b_y.dot(&shift_y) + log_norm;

        // substitute x ↦ x, y ↦ slope_y x + η + shift_y; variables (x, η)
        let mut sub = CMatrix::zeros(m, m);
        for i in 0..keep {
            sub[(i, i)] = Complex64::new(1.0, 0.0);
        }
        sub.view_mut((keep, 0), (k, keep)).copy_from(&slope_y);
        for i in 0..k {
            sub[(keep + i, keep + i)] = Complex64::new(1.0, 0.0);
        }
        let mut shift = CVector::zeros(m);
        shift.rows_mut(keep, k).copy_from(&shift_y);
        let substituted = self.poly.compose_affine(&sub, &shift);

        let mut moments = MomentTable::new(cov);
        let mut poly = Polynomial::zero(keep);
        for (alpha, c) in substituted.terms() {
            let (xa, ya) = alpha.split_at(keep);
            let mom = moments.moment(ya);
            if mom != Complex64::new(0.0, 0.0) {
                poly.add_term(xa.to_vec(), c * mom);
            }
        }
        Ok(GaussTerm { poly, exp: ExpQuadratic::new(new_q, new_b, new_gamma) })
    }

    /// Integral over all variables.
    pub fn integrate_all(&self) -> Result<Complex64> {
        let t = self.integrate_trailing(self.nvars())?;
        Ok(t.eval(&[]))
    }
}

/// Integral over ℝᵈ of a sum of terms.
pub fn integrate_sum(terms: &[GaussTerm]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        acc += t.integrate_all()?;
    }
    Ok(acc)
}

/// Moments E[η^α] of a centred Gaussian with (complex symmetric) covariance Σ,
/// via E[ηᵢ f(η)] = Σⱼ Σᵢⱼ E[∂ⱼ f(η)].
pub struct MomentTable {
    cov: CMatrix,
    memo: HashMap<MultiIndex, Complex64>,
}

impl MomentTable {
    pub fn new(cov: CMatrix) -> Self {
        MomentTable { cov, memo: HashMap::new() }
    }

    pub fn moment(&mut self, alpha: &[u32]) -> Complex64 {
        let total: u32 = alpha.iter().sum();
        if total == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if total % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        if let Some(v) = self.memo.get(alpha) {
            return *v;
        }
        let i = alpha.iter().position(|&a| a > 0).unwrap();
        let mut rest = alpha.to_vec();
        rest[i] -= 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut reduced = rest.clone();
            reduced[j] -= 1;
            acc += self.cov[(i, j)] * rest[j] as f64 * self.moment(&reduced);
        }
        self.memo.insert(alpha.to_vec(), acc);
        acc
    }
}
