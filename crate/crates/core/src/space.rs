//! Coordinates on V = ℂⁿ viewed as ℝ²ⁿ.
//!
//! A vector z = x + iy is stored as the real column (x₁..xₙ, y₁..yₙ). The real
//! subspace V_ℝ is {y = 0}. Under this convention multiplication by i and
//! complex conjugation are constant block matrices, and complex-linear or
//! conjugate-linear maps have a fixed block shape.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{FockError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceContext {
    n: usize,
}

impl SpaceContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FockError::InvalidInput("complex dimension must be positive".into()));
        }
        Ok(SpaceContext { n })
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension 2n.
    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    /// J = [[0, −I], [I, 0]], multiplication by i.
    pub fn j(&self) -> RealLinearMap {
        let n = self.n;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            m[(k, n + k)] = -1.0;
            m[(n + k, k)] = 1.0;
        }
        RealLinearMap { ctx: *self, m }
    }

    /// σ = [[I, 0], [0, −I]], complex conjugation fixing V_ℝ.
    pub fn sigma(&self) -> RealLinearMap {
        let n = self.n;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            m[(k, k)] = 1.0;
            m[(n + k, n + k)] = -1.0;
        }
        RealLinearMap { ctx: *self, m }
    }

    pub fn identity(&self) -> RealLinearMap {
        RealLinearMap { ctx: *self, m: DMatrix::identity(2 * self.n, 2 * self.n) }
    }

    /// Real coordinates of a complex vector.
    pub fn to_real(&self, z: &CVector) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
    }

    pub fn to_complex(&self, v: &DVector<f64>) -> CVector {
        let n = self.n;
        CVector::from_fn(n, |i, _| Complex64::new(v[i], v[n + i]))
    }

    /// Parse a length-2n real array (x-block then y-block) into ℂⁿ.
    pub fn point_from_slice(&self, xs: &[f64]) -> Result<CVector> {
        if xs.len() != 2 * self.n {
            return Err(FockError::DimensionMismatch { expected: 2 * self.n, got: xs.len() });
        }
        Ok(CVector::from_fn(self.n, |i, _| Complex64::new(xs[i], xs[self.n + i])))
    }
}

/// A real-linear operator on V in the fixed (x, y) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearMap {
    ctx: SpaceContext,
    m: DMatrix<f64>,
}

impl RealLinearMap {
    pub fn new(ctx: SpaceContext, m: DMatrix<f64>) -> Result<Self> {
        let d = ctx.real_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(FockError::DimensionMismatch { expected: d, got: m.nrows().max(m.ncols()) });
        }
        Ok(RealLinearMap { ctx, m })
    }

    /// Build from row-major rows, inferring n from the row count.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 || d % 2 != 0 {
            return Err(FockError::InvalidInput(format!("matrix must be 2n×2n, got {d} rows")));
        }
        for r in rows {
            if r.len() != d {
                return Err(FockError::DimensionMismatch { expected: d, got: r.len() });
            }
        }
        let ctx = SpaceContext::new(d / 2)?;
        Ok(RealLinearMap { ctx, m: DMatrix::from_fn(d, d, |i, j| rows[i][j]) })
    }

    /// d(X, Y): acts as X on V_ℝ and as Y on iV_ℝ.
    pub fn block_diag(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Self> {
        let n = x.nrows();
        if x.ncols() != n || y.nrows() != n || y.ncols() != n {
            return Err(FockError::DimensionMismatch { expected: n, got: y.nrows() });
        }
        let ctx = SpaceContext::new(n)?;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(x);
        m.view_mut((n, n), (n, n)).copy_from(y);
        Ok(RealLinearMap { ctx, m })
    }

    /// Real matrix of the complex-linear map z ↦ Mz.
    pub fn from_complex_linear(ctx: SpaceContext, c: &CMatrix) -> Self {
        let n = ctx.n();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (c[(i, j)].re, c[(i, j)].im);
                m[(i, j)] = a;
                m[(i, n + j)] = -b;
                m[(n + i, j)] = b;
                m[(n + i, n + j)] = a;
            }
        }
        RealLinearMap { ctx, m }
    }

    /// Real matrix of the conjugate-linear map z ↦ C z̄.
    pub fn from_conjugate_linear(ctx: SpaceContext, c: &CMatrix) -> Self {
        let n = ctx.n();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let (p, q) = (c[(i, j)].re, c[(i, j)].im);
                m[(i, j)] = p;
                m[(i, n + j)] = q;
                m[(n + i, j)] = q;
                m[(n + i, n + j)] = -p;
            }
        }
        RealLinearMap { ctx, m }
    }

    /// Complex matrix of the complex-linear part, (A − JAJ)/2 read off as a + ib.
    pub fn complex_linear_part(&self) -> CMatrix {
        let n = self.ctx.n();
        let m = &self.m;
        CMatrix::from_fn(n, n, |i, j| {
            let a = 0.5 * (m[(i, j)] + m[(n + i, n + j)]);
            let b = 0.5 * (m[(n + i, j)] - m[(i, n + j)]);
            Complex64::new(a, b)
        })
    }

    /// Complex matrix C of the conjugate-linear part z ↦ C z̄.
    pub fn conjugate_linear_part(&self) -> CMatrix {
        let n = self.ctx.n();
        let m = &self.m;
        CMatrix::from_fn(n, n, |i, j| {
            let p = 0.5 * (m[(i, j)] - m[(n + i, n + j)]);
            let q = 0.5 * (m[(i, n + j)] + m[(n + i, j)]);
            Complex64::new(p, q)
        })
    }

    pub fn ctx(&self) -> SpaceContext {
        self.ctx
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn apply(&self, z: &CVector) -> CVector {
        self.ctx.to_complex(&(&self.m * self.ctx.to_real(z)))
    }

    pub fn compose(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { ctx: self.ctx, m: &self.m * &other.m }
    }

    pub fn transpose(&self) -> RealLinearMap {
        RealLinearMap { ctx: self.ctx, m: self.m.transpose() }
    }

    pub fn add(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { ctx: self.ctx, m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { ctx: self.ctx, m: &self.m - &other.m }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// Block of A mapping V_ℝ into iV_ℝ; zero iff A preserves V_ℝ.
    pub fn real_to_imag_block(&self) -> DMatrix<f64> {
        let n = self.ctx.n();
        self.m.view((n, 0), (n, n)).into_owned()
    }

    pub fn xx_block(&self) -> DMatrix<f64> {
        let n = self.ctx.n();
        self.m.view((0, 0), (n, n)).into_owned()
    }

    pub fn yy_block(&self) -> DMatrix<f64> {
        let n = self.ctx.n();
        self.m.view((n, n), (n, n)).into_owned()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m.nrows()).map(|i| self.m.row(i).iter().copied().collect()).collect()
    }
}

/// Complex Hermitian inner product ⟨z, w⟩ = Σ zⱼ w̄ⱼ.
pub fn herm(z: &CVector, w: &CVector) -> Complex64 {
    z.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Symmetric bilinear pairing z·w = Σ zⱼ wⱼ.
pub fn bilin(z: &CVector, w: &CVector) -> Complex64 {
    z.iter().zip(w.iter()).map(|(a, b)| a * b).sum()
}

pub fn to_cmatrix(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn to_cvector(v: &DVector<f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    if r == 0 {
        return Err(FockError::InvalidInput("empty matrix".into()));
    }
    let c = rows[0].len();
    if rows.iter().any(|row| row.len() != c) {
        return Err(FockError::InvalidInput("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
