//! Dense symmetric/Hermitian matrix functions built on eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::space::CMatrix;

/// Relative eigenvalue floor below which a matrix is treated as singular.
pub const SPD_EIGEN_FLOOR: f64 = 1e-10;

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = 0.5 * (m + m.transpose());
    let eig = SymmetricEigen::new(sym);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigen(m).0[0]
}

fn check_spd(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if m.nrows() != m.ncols() {
        return Err(FockError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).norm();
    if asym > 1e-12 * scale {
        return Err(FockError::NotSymmetric { asymmetry: asym });
    }
    let (vals, vecs) = sym_eigen(m);
    if vals[0] <= SPD_EIGEN_FLOOR * scale {
        return Err(FockError::NotPositiveDefinite { min_eigenvalue: vals[0] });
    }
    Ok((vals, vecs))
}

/// f(M) = V diag(f(λ)) Vᵀ for SPD M.
pub fn spd_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let (vals, vecs) = check_spd(m)?;
    let d = DMatrix::from_diagonal(&vals.map(f));
    let out = &vecs * d * vecs.transpose();
    Ok(0.5 * (&out + out.transpose()))
}

/// Principal square root of an SPD matrix.
pub fn sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_function(m, f64::sqrt)
}

pub fn inv_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_function(m, |v| 1.0 / v.sqrt())
}

pub fn pow_spd(m: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    spd_function(m, |v| v.powf(p))
}

/// log det of an SPD matrix, from eigenvalues.
pub fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let (vals, _) = check_spd(m)?;
    Ok(vals.iter().map(|v| v.ln()).sum())
}

pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| FockError::NumericalBreakdown("singular matrix".into()))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let herm = (m + m.adjoint()).map(|v| v * 0.5);
    let eig = SymmetricEigen::new(herm);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vecs = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// f(M) for a positive-definite Hermitian M.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(m);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    if vals[0] <= SPD_EIGEN_FLOOR * scale {
        return Err(FockError::NotPositiveDefinite { min_eigenvalue: vals[0] });
    }
    let d = CMatrix::from_diagonal(&vals.map(|v| Complex64::new(f(v), 0.0)));
    let out = &vecs * d * vecs.adjoint();
    Ok((&out + out.adjoint()).map(|v| v * 0.5))
}

pub fn complex_inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| FockError::NumericalBreakdown("singular complex matrix".into()))
}

/// log det M for complex symmetric M with positive-definite real part, on the
/// branch continuous from the real SPD case. Writing M = Mr + iMi with
/// Mr = LLᵀ, det M = det Mr · Π(1 + iμⱼ) where μ are the (real) eigenvalues of
/// L⁻¹ Mi L⁻ᵀ; every factor has real part 1 so the principal log is correct.
pub fn log_det_complex_symmetric(m: &CMatrix) -> Result<Complex64> {
    let re = m.map(|v| v.re);
    let im = m.map(|v| v.im);
    let re_sym = 0.5 * (&re + re.transpose());
    let chol = nalgebra::Cholesky::new(re_sym.clone()).ok_or_else(|| {
        FockError::Divergent(format!(
            "real part of precision is not positive definite (min eigenvalue {:e})",
            min_eigenvalue(&re_sym)
        ))
    })?;
    let l = chol.l();
    let scale = re_sym.norm().max(f64::MIN_POSITIVE);
    let min_ev = min_eigenvalue(&re_sym);
    if min_ev <= 1e-13 * scale {
        return Err(FockError::Divergent(format!("precision real part nearly singular ({min_ev:e})")));
    }
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| FockError::NumericalBreakdown("Cholesky factor singular".into()))?;
    let n_mat = &l_inv * (0.5 * (&im + im.transpose())) * l_inv.transpose();
    let (mu, _) = sym_eigen(&n_mat);
    let mut log_det = Complex64::new((0..l.nrows()).map(|i| 2.0 * l[(i, i)].ln()).sum(), 0.0);
    for v in mu.iter() {
        log_det += Complex64::new(1.0, *v).ln();
    }
    Ok(log_det)
}

pub fn symmetrize_c(m: &CMatrix) -> CMatrix {
    (m + m.transpose()).map(|v| v * 0.5)
}
