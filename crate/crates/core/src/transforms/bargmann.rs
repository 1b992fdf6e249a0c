//! Segal–Bargmann transforms: classical U, generalized U_A on L²(V_ℝ, dx), the
//! Gaussian formulation S_A on L²(V_ℝ, ρ_S dx), and coherent states c(x, z).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::gaussian::{ExpQuadratic, GaussTerm};
use crate::holomorphic::HolomorphicFunction;
use crate::linalg;
use crate::operator::OperatorContext;
use crate::poly::Polynomial;
use crate::quadrature::QuadratureRule;
use crate::space::{bilin, to_cmatrix, to_cvector, CMatrix, CVector};

use super::real_function::{GaussianDensity, RealDomainFunction};

/// Joint kernel exp(½ (z,y)ᵀQ(z,y) + γ) applied to f and integrated over y.
fn integral_transform(q: CMatrix, gamma: f64, f: &RealDomainFunction) -> Result<HolomorphicFunction> {
    let n = f.nvars();
    let kernel = GaussTerm::new(Polynomial::one(2 * n), ExpQuadratic::new(q, CVector::zeros(2 * n), Complex64::new(gamma, 0.0)));
    let terms = f
        .terms()?
        .iter()
        .map(|t| kernel.mul(&t.embed(n, 2 * n)).integrate_trailing(n))
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() {
        return Ok(HolomorphicFunction::Polynomial(Polynomial::zero(n)));
    }
    Ok(HolomorphicFunction::from_terms(terms))
}

fn block(zz: &DMatrix<f64>, zy: &DMatrix<f64>, yy: &DMatrix<f64>) -> CMatrix {
    let n = zz.nrows();
    let mut q = DMatrix::zeros(2 * n, 2 * n);
    q.view_mut((0, 0), (n, n)).copy_from(zz);
    q.view_mut((0, n), (n, n)).copy_from(zy);
    q.view_mut((n, 0), (n, n)).copy_from(&zy.transpose());
    q.view_mut((n, n), (n, n)).copy_from(yy);
    to_cmatrix(&q)
}

fn check_point(n: usize, z: &CVector, rule: &QuadratureRule, f: &RealDomainFunction) -> Result<()> {
    for got in [z.len(), rule.dim(), f.nvars()] {
        if got != n {
            return Err(FockError::DimensionMismatch { expected: n, got });
        }
    }
    Ok(())
}

/// Ug(z) = (2/π)^{n/4} ∫ g(y) exp(−y·y + 2z·y − z·z/2) dy.
pub fn classical_bargmann(g: &RealDomainFunction) -> Result<HolomorphicFunction> {
    let n = g.nvars();
    let i = DMatrix::<f64>::identity(n, n);
    integral_transform(block(&(-&i), &(2.0 * &i), &(-2.0 * &i)), 0.25 * n as f64 * (2.0 / PI).ln(), g)
}

pub fn classical_bargmann_quadrature(g: &RealDomainFunction, z: &CVector, rule: &QuadratureRule) -> Result<Complex64> {
    let n = g.nvars();
    check_point(n, z, rule, g)?;
    let zz = bilin(z, z);
    let pre = (0.25 * n as f64 * (2.0 / PI).ln() - 0.5 * zz).exp();
    let v = rule.integrate_lebesgue(|y| {
        let yc = to_cvector(&nalgebra::DVector::from_column_slice(y));
        g.eval(y) * (-bilin(&yc, &yc) + 2.0 * bilin(z, &yc)).exp()
    })?;
    Ok(pre * v)
}

fn generalized_log_prefactor(ctx: &OperatorContext) -> f64 {
    0.25 * ctx.n() as f64 * (2.0 / PI).ln() + 0.75 * ctx.log_det_h() - 0.25 * ctx.log_det_v_a()
}

/// U_A f(z) = (2/π)^{n/4} (det H)^{3/4} (det_V A)^{−1/4} e^{½ zᵀRz} ∫ e^{−(z−y)ᵀH(z−y)} f(y) dy.
pub fn generalized_bargmann(ctx: &OperatorContext, f: &RealDomainFunction) -> Result<HolomorphicFunction> {
    let rf = ctx.require_real_form()?;
    if f.nvars() != ctx.n() {
        return Err(FockError::DimensionMismatch { expected: ctx.n(), got: f.nvars() });
    }
    let h2 = 2.0 * &rf.h;
    integral_transform(block(&(&rf.r - &h2), &h2, &(-&h2)), generalized_log_prefactor(ctx), f)
}

pub fn generalized_bargmann_quadrature(
    ctx: &OperatorContext,
    f: &RealDomainFunction,
    z: &CVector,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let rf = ctx.require_real_form()?;
    let n = ctx.n();
    check_point(n, z, rule, f)?;
    let h = to_cmatrix(&rf.h);
    let pre = (generalized_log_prefactor(ctx) + 0.5 * bilin(z, &(to_cmatrix(&rf.r) * z))).exp();
    let mut d = CVector::zeros(n);
    let v = rule.integrate_lebesgue(|y| {
        for i in 0..n {
            d[i] = z[i] - y[i];
        }
        f.eval(y) * (-bilin(&d, &(&h * &d))).exp()
    })?;
    Ok(pre * v)
}

/// ρ_P, the normalized density with precision P, for P = T or S.
pub fn rho(ctx: &OperatorContext, which: RhoKind) -> Result<GaussianDensity> {
    let rf = ctx.require_real_form()?;
    GaussianDensity::new(match which {
        RhoKind::T => rf.t.clone(),
        RhoKind::S => rf.s.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoKind {
    T,
    S,
}

/// S_A f(z) = ∫ f(x) ρ_T(z − x) dx.
pub fn gaussian_bargmann(ctx: &OperatorContext, f: &RealDomainFunction) -> Result<HolomorphicFunction> {
    let rf = ctx.require_real_form()?;
    if f.nvars() != ctx.n() {
        return Err(FockError::DimensionMismatch { expected: ctx.n(), got: f.nvars() });
    }
    let log_norm = rho(ctx, RhoKind::T)?.log_norm();
    integral_transform(block(&(-&rf.t), &rf.t, &(-&rf.t)), log_norm, f)
}

pub fn gaussian_bargmann_quadrature(
    ctx: &OperatorContext,
    f: &RealDomainFunction,
    z: &CVector,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let n = ctx.n();
    check_point(n, z, rule, f)?;
    let rho_t = rho(ctx, RhoKind::T)?;
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    rule.integrate_lebesgue(|x| {
        for i in 0..n {
            d[i] = z[i] - x[i];
        }
        f.eval(x) * rho_t.eval_complex(&d)
    })
}

/// c(x, z) = ρ_T(x − z) / ρ_S(x).
pub fn coherent_state(ctx: &OperatorContext, x: &[f64], z: &CVector) -> Result<Complex64> {
    Ok(coherent_state_function(ctx, z)?.eval(x))
}

/// x ↦ c(x, w) = exp(½ xᵀ(S − T)x + (Tw)·x − ½ wᵀTw + ½ log(det T / det S)).
pub fn coherent_state_function(ctx: &OperatorContext, w: &CVector) -> Result<RealDomainFunction> {
    let rf = ctx.require_real_form()?;
    let n = ctx.n();
    if w.len() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: w.len() });
    }
    let t = to_cmatrix(&rf.t);
    let tw = &t * w;
    let gamma = -0.5 * bilin(w, &tw) + 0.5 * (linalg::log_det_spd(&rf.t)? - linalg::log_det_spd(&rf.s)?);
    Ok(RealDomainFunction::from_term(GaussTerm::new(
        Polynomial::one(n),
        ExpQuadratic::new(to_cmatrix(&(&rf.s - &rf.t)), tw, gamma),
    )))
}

/// ∫ ρ_T(x − z) ρ_T(x − w̄) / ρ_S(x) dx by quadrature, with a rule over ℝⁿ.
pub fn kernel_integral_quadrature(ctx: &OperatorContext, z: &CVector, w: &CVector, rule: &QuadratureRule) -> Result<Complex64> {
    let n = ctx.n();
    let rho_t = rho(ctx, RhoKind::T)?;
    let rho_s = rho(ctx, RhoKind::S)?;
    if rule.dim() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: rule.dim() });
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    rule.integrate_lebesgue(|x| {
        for i in 0..n {
            a[i] = x[i] - z[i];
            b[i] = x[i] - w[i].conj();
        }
        rho_t.eval_complex(&a) * rho_t.eval_complex(&b) / rho_s.eval(x)
    })
}
