//! Positive-definite real-linear operators on V and everything derived from them.
//!
//! `build_context` validates A once and caches the complex-linear part H, the
//! conjugate-linear part K, the normalizing constants c_A and c, and (when A maps
//! V_ℝ into itself) the block data R, T, S, L, M, D used by the Gaussian
//! formulation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FockError, Result};
use crate::linalg::{self, SPD_EIGEN_FLOOR};
use crate::space::{CMatrix, CVector, RealLinearMap, SpaceContext};

/// Relative tolerance for structural identities (symmetry, block zeros).
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpdDiagnostics {
    pub symmetric: bool,
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
    pub spd: bool,
}

/// Checks symmetry and strict positivity of `a` as a 2n×2n real matrix.
pub fn validate_spd(space: SpaceContext, a: &RealLinearMap) -> Result<SpdDiagnostics> {
    if a.n() != space.n() {
        return Err(FockError::DimensionMismatch { expected: space.real_dim(), got: a.ctx().real_dim() });
    }
    let m = a.matrix();
    let scale = m.norm();
    let asymmetry = (m - m.transpose()).norm();
    let symmetric = asymmetry <= STRUCTURE_TOL * scale;
    let min_eigenvalue = linalg::min_eigenvalue(m);
    let spd = symmetric && min_eigenvalue > SPD_EIGEN_FLOOR * scale;
    Ok(SpdDiagnostics { symmetric, asymmetry, min_eigenvalue, spd })
}

fn require_spd(a: &RealLinearMap) -> Result<()> {
    let d = validate_spd(a.ctx(), a)?;
    if !d.symmetric {
        return Err(FockError::NotSymmetric { asymmetry: d.asymmetry });
    }
    if !d.spd {
        return Err(FockError::NotPositiveDefinite { min_eigenvalue: d.min_eigenvalue });
    }
    Ok(())
}

/// Splits A into H = (A + J⁻¹AJ)/2 (commutes with J) and K = (A − J⁻¹AJ)/2
/// (anticommutes with J).
pub fn decompose(a: &RealLinearMap) -> Result<(RealLinearMap, RealLinearMap)> {
    require_spd(a)?;
    Ok(split(a))
}

fn split(a: &RealLinearMap) -> (RealLinearMap, RealLinearMap) {
    let j = a.ctx().j();
    let j_inv = j.transpose();
    let conj = j_inv.compose(a).compose(&j);
    let h = RealLinearMap::new(a.ctx(), 0.5 * (a.matrix() + conj.matrix())).expect("same dims");
    let k = RealLinearMap::new(a.ctx(), 0.5 * (a.matrix() - conj.matrix())).expect("same dims");
    (h, k)
}

/// Block data available when A = d(R, T).
#[derive(Debug, Clone, PartialEq)]
pub struct RealForm {
    pub r: DMatrix<f64>,
    pub t: DMatrix<f64>,
    /// S = 2(R⁻¹ + T⁻¹)⁻¹
    pub s: DMatrix<f64>,
    /// L = (2T − S)^{1/2}
    pub l: DMatrix<f64>,
    /// M = L⁻¹T
    pub m: DMatrix<f64>,
    /// D = (R^{-1/2} T R^{-1/2})^{1/4}
    pub d: DMatrix<f64>,
    /// H restricted to V_ℝ, (R + T)/2
    pub h: DMatrix<f64>,
    /// C = (R − T)/2, so K z = C z̄
    pub c: DMatrix<f64>,
    pub det_r: f64,
    pub det_t: f64,
    pub det_s: f64,
    pub det_l: f64,
}

#[derive(Debug, Clone)]
pub struct OperatorContext {
    space: SpaceContext,
    a: RealLinearMap,
    h: RealLinearMap,
    k: RealLinearMap,
    h_c: CMatrix,
    k_c: CMatrix,
    t1: RealLinearMap,
    t1_c: CMatrix,
    sqrt_h_c: CMatrix,
    h_eigenvalues: DVector<f64>,
    real_form: Option<RealForm>,
    h_real: bool,
    log_det_v_a: f64,
    log_det_h: f64,
}

/// Builds the full derived-operator context for SPD A.
pub fn build_context(a: &RealLinearMap) -> Result<OperatorContext> {
    require_spd(a)?;
    let space = a.ctx();
    let n = space.n();
    let (h, k) = split(a);
    let h_c = h.complex_linear_part();
    let k_c = linalg::symmetrize_c(&k.conjugate_linear_part());
    let (h_eigenvalues, _) = linalg::hermitian_eigen(&h_c);
    if h_eigenvalues[0] <= 0.0 {
        return Err(FockError::NumericalBreakdown(format!(
            "H not positive definite (eigenvalue {:e})",
            h_eigenvalues[0]
        )));
    }
    let t1_c = linalg::hermitian_function(&h_c, |v| 1.0 / v.sqrt())?;
    let sqrt_h_c = linalg::hermitian_function(&h_c, f64::sqrt)?;
    let t1 = RealLinearMap::from_complex_linear(space, &t1_c);

    let log_det_v_a = linalg::log_det_spd(a.matrix())?;
    let log_det_h: f64 = h_eigenvalues.iter().map(|v| v.ln()).sum();

    let scale = a.norm();
    let h_real = h_c.iter().all(|v| v.im.abs() <= STRUCTURE_TOL * scale);

    let off = a.real_to_imag_block();
    let real_preserving = off.iter().all(|v| v.abs() <= STRUCTURE_TOL * scale);
    let real_form = if real_preserving { Some(real_form(a, n)?) } else { None };

    Ok(OperatorContext {
        space,
        a: a.clone(),
        h,
        k,
        h_c,
        k_c,
        t1,
        t1_c,
        sqrt_h_c,
        h_eigenvalues,
        real_form,
        h_real,
        log_det_v_a,
        log_det_h,
    })
}

fn real_form(a: &RealLinearMap, n: usize) -> Result<RealForm> {
    let sym = |m: DMatrix<f64>| 0.5 * (&m + m.transpose());
    let r = sym(a.xx_block());
    let t = sym(a.yy_block());
    let breakdown = |what: &str, e: FockError| FockError::NumericalBreakdown(format!("{what}: {e}"));
    let r_inv = linalg::inverse(&r)?;
    let t_inv = linalg::inverse(&t)?;
    let s = sym(2.0 * linalg::inverse(&(&r_inv + &t_inv))?);
    let two_t_minus_s = sym(2.0 * &t - &s);
    let l = linalg::sqrt_spd(&two_t_minus_s).map_err(|e| breakdown("2T - S not SPD", e))?;
    let m = linalg::inverse(&l)? * &t;
    let r_ih = linalg::inv_sqrt_spd(&r)?;
    let inner = sym(&r_ih * &t * &r_ih);
    let d = linalg::pow_spd(&inner, 0.25)?;
    let det_s = linalg::log_det_spd(&s).map_err(|e| breakdown("S not SPD", e))?.exp();
    let det_r = linalg::log_det_spd(&r)?.exp();
    let det_t = linalg::log_det_spd(&t)?.exp();
    let det_l = linalg::log_det_spd(&l)?.exp();
    debug_assert_eq!(r.nrows(), n);
    Ok(RealForm {
        h: 0.5 * (&r + &t),
        c: 0.5 * (&r - &t),
        r,
        t,
        s,
        l,
        m,
        d,
        det_r,
        det_t,
        det_s,
        det_l,
    })
}

impl OperatorContext {
    pub fn space(&self) -> SpaceContext {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn a(&self) -> &RealLinearMap {
        &self.a
    }

    pub fn h(&self) -> &RealLinearMap {
        &self.h
    }

    pub fn k(&self) -> &RealLinearMap {
        &self.k
    }

    /// H as a Hermitian complex matrix.
    pub fn h_complex(&self) -> &CMatrix {
        &self.h_c
    }

    /// The complex symmetric matrix C with K z = C z̄.
    pub fn k_complex(&self) -> &CMatrix {
        &self.k_c
    }

    /// T₁ = H^{-1/2}.
    pub fn t1(&self) -> &RealLinearMap {
        &self.t1
    }

    pub fn t1_complex(&self) -> &CMatrix {
        &self.t1_c
    }

    pub fn sqrt_h_complex(&self) -> &CMatrix {
        &self.sqrt_h_c
    }

    pub fn real_form(&self) -> Option<&RealForm> {
        self.real_form.as_ref()
    }

    pub fn require_real_form(&self) -> Result<&RealForm> {
        self.real_form.as_ref().ok_or(FockError::RequiresRealForm)
    }

    /// Whether A maps V_ℝ into V_ℝ.
    pub fn real_preserving(&self) -> bool {
        self.real_form.is_some()
    }

    /// Whether H maps V_ℝ into V_ℝ (⟨Hx, y⟩ real on V_ℝ).
    pub fn h_preserves_real(&self) -> bool {
        self.h_real
    }

    pub fn log_det_v_a(&self) -> f64 {
        self.log_det_v_a
    }

    pub fn det_v_a(&self) -> f64 {
        self.log_det_v_a.exp()
    }

    /// det_V H = (det H)².
    pub fn det_v_h(&self) -> f64 {
        (2.0 * self.log_det_h).exp()
    }

    /// Complex determinant of H, the product of its eigenvalues.
    pub fn det_h(&self) -> f64 {
        self.log_det_h.exp()
    }

    pub fn log_det_h(&self) -> f64 {
        self.log_det_h
    }

    /// log c_A = ¼ (log det_V A − log det_V H).
    pub fn log_c_a(&self) -> f64 {
        0.25 * (self.log_det_v_a - 2.0 * self.log_det_h)
    }

    /// c_A = (det_V A / det_V H)^{1/4}.
    pub fn c_a(&self) -> f64 {
        self.log_c_a().exp()
    }

    /// c = (2π)^{-n/4} (det_V A / det H)^{1/4}.
    pub fn c_const(&self) -> f64 {
        let n = self.n() as f64;
        (-0.25 * n * (2.0 * std::f64::consts::PI).ln() + 0.25 * (self.log_det_v_a - self.log_det_h)).exp()
    }

    pub fn h_eigenvalues(&self) -> &DVector<f64> {
        &self.h_eigenvalues
    }

    /// Largest eigenvalue of A, used for overflow estimates.
    pub fn a_norm(&self) -> f64 {
        self.a.norm()
    }

    /// H-eigenbasis: eigenvalues ascending with orthonormal eigenvectors.
    ///
    /// Phases are fixed so the largest-modulus coordinate of each vector is real
    /// positive (lowest index on ties). Within a degenerate eigenspace the basis
    /// is the Gram–Schmidt orthonormalization of the projected standard basis.
    pub fn h_eigenbasis(&self) -> (Vec<f64>, Vec<CVector>) {
        let n = self.n();
        let (vals, vecs) = linalg::hermitian_eigen(&self.h_c);
        let scale = vals[n - 1].abs().max(1.0);
        let mut out_vals = Vec::with_capacity(n);
        let mut out_vecs: Vec<CVector> = Vec::with_capacity(n);
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (vals[end] - vals[start]).abs() <= 1e-10 * scale {
                end += 1;
            }
            let block: Vec<CVector> = (start..end).map(|c| vecs.column(c).into_owned()).collect();
            let basis = if block.len() == 1 { block } else { canonical_subspace_basis(&block, n) };
            for (offset, v) in basis.into_iter().enumerate() {
                out_vals.push(vals[start + offset]);
                out_vecs.push(fix_phase(v));
            }
            start = end;
        }
        (out_vals, out_vecs)
    }
}

fn canonical_subspace_basis(block: &[CVector], n: usize) -> Vec<CVector> {
    let project = |v: &CVector| -> CVector {
        let mut out = CVector::zeros(n);
        for b in block {
            let coef: Complex64 = b.iter().zip(v.iter()).map(|(bi, vi)| bi.conj() * vi).sum();
            out += b * coef;
        }
        out
    };
    let mut basis: Vec<CVector> = Vec::with_capacity(block.len());
    for i in 0..n {
        if basis.len() == block.len() {
            break;
        }
        let mut e = CVector::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        let mut v = project(&e);
        for b in &basis {
            let coef: Complex64 = b.iter().zip(v.iter()).map(|(bi, vi)| bi.conj() * vi).sum();
            v -= b * coef;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    basis
}

fn fix_phase(v: CVector) -> CVector {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, c) in v.iter().enumerate() {
        if c.norm() > best_abs + 1e-12 {
            best = i;
            best_abs = c.norm();
        }
    }
    let phase = v[best] / Complex64::new(v[best].norm(), 0.0);
    let mut out = v.map(|c| c * phase.conj());
    out[best] = Complex64::new(out[best].norm(), 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::herm;

    fn d41() -> RealLinearMap {
        RealLinearMap::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let i2 = RealLinearMap::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(validate_spd(i2.ctx(), &i2).unwrap().spd);
        let bad = RealLinearMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let d = validate_spd(bad.ctx(), &bad).unwrap();
        assert!(!d.spd);
        assert!((d.min_eigenvalue + 1.0).abs() < 1e-14);
        assert!(validate_spd(d41().ctx(), &d41()).unwrap().spd);
    }

    #[test]
    fn validate_dimension_mismatch() {
        let space = SpaceContext::new(2).unwrap();
        assert!(matches!(validate_spd(space, &d41()), Err(FockError::DimensionMismatch { .. })));
    }

    #[test]
    fn decompose_identity_and_d41() {
        let i2 = SpaceContext::new(1).unwrap().identity();
        let (h, k) = decompose(&i2).unwrap();
        assert_eq!(h.matrix(), i2.matrix());
        assert!(k.norm() == 0.0);

        let (h, k) = decompose(&d41()).unwrap();
        assert!((h.matrix() - DMatrix::identity(2, 2) * 2.5).norm() < 1e-15);
        let sigma = SpaceContext::new(1).unwrap().sigma();
        assert!((k.matrix() - sigma.matrix() * 1.5).norm() < 1e-15);
    }

    #[test]
    fn decompose_rejects_asymmetric() {
        let a = RealLinearMap::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert!(matches!(decompose(&a), Err(FockError::NotSymmetric { .. })));
    }

    #[test]
    fn context_for_d41() {
        let ctx = build_context(&d41()).unwrap();
        let rf = ctx.real_form().unwrap();
        assert!((rf.r[(0, 0)] - 4.0).abs() < 1e-15);
        assert!((rf.t[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((rf.s[(0, 0)] - 1.6).abs() < 1e-14);
        assert!((rf.l[(0, 0)] - 0.4f64.sqrt()).abs() < 1e-14);
        assert!((ctx.c_a() - 0.8f64.sqrt()).abs() < 1e-14);
        // c = (2π)^{-1/4} (4 / 2.5)^{1/4}
        let c = (2.0 * std::f64::consts::PI).powf(-0.25) * 1.6f64.powf(0.25);
        assert!((ctx.c_const() - c).abs() < 1e-14);
        let lhs = ctx.c_a().powi(-2) * ctx.c_const().powi(2);
        let rhs = 2.5f64.sqrt() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn context_for_identity() {
        let ctx = build_context(&SpaceContext::new(1).unwrap().identity()).unwrap();
        let rf = ctx.real_form().unwrap();
        assert!((rf.s[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((rf.l[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((ctx.c_a() - 1.0).abs() < 1e-15);
        assert!((ctx.c_const() - (2.0 * std::f64::consts::PI).powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn rotated_operator_is_not_real_preserving() {
        let (c, s) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let a = &q * DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]) * q.transpose();
        let a = RealLinearMap::new(SpaceContext::new(1).unwrap(), a).unwrap();
        let ctx = build_context(&a).unwrap();
        assert!(!ctx.real_preserving());
        assert!(matches!(ctx.require_real_form(), Err(FockError::RequiresRealForm)));
        let ax = a.matrix().column(0).into_owned();
        assert!(ax[1].abs() > 1.0);
    }

    #[test]
    fn eigenbasis_examples() {
        let ctx = build_context(&d41()).unwrap();
        let (vals, vecs) = ctx.h_eigenbasis();
        assert!((vals[0] - 2.5).abs() < 1e-14);
        assert!((vecs[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        let ctx = build_context(&SpaceContext::new(2).unwrap().identity()).unwrap();
        let (vals, vecs) = ctx.h_eigenbasis();
        assert_eq!(vals.len(), 2);
        for (j, v) in vecs.iter().enumerate() {
            for i in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v[i] - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }

        let r = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 9.0]));
        let t = DMatrix::identity(2, 2);
        let ctx = build_context(&RealLinearMap::block_diag(&r, &t).unwrap()).unwrap();
        let (vals, vecs) = ctx.h_eigenbasis();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 5.0).abs() < 1e-14);
        assert!((vecs[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((vecs[1][1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenbasis_is_orthonormal_for_complex_h() {
        let rows = vec![
            vec![3.0, 0.2, 0.1, 0.5],
            vec![0.2, 2.0, -0.4, 0.3],
            vec![0.1, -0.4, 2.5, 0.0],
            vec![0.5, 0.3, 0.0, 1.5],
        ];
        let ctx = build_context(&RealLinearMap::from_rows(&rows).unwrap()).unwrap();
        let (vals, vecs) = ctx.h_eigenbasis();
        assert!(vals[0] <= vals[1]);
        for j in 0..2 {
            for k in 0..2 {
                let ip = herm(&vecs[j], &vecs[k]);
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
            let hv = ctx.h_complex() * &vecs[j];
            assert!((hv - &vecs[j] * Complex64::new(vals[j], 0.0)).norm() < 1e-10);
        }
    }
}
