//! The multiplier m(x, z), translations T_x, the restriction R and its
//! adjoint, the phase operator W, RR* and |R*|.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FockError, Result};
use crate::gaussian::{ExpQuadratic, GaussTerm};
use crate::holomorphic::HolomorphicFunction;
use crate::operator::OperatorContext;
use crate::poly::Polynomial;
use crate::quadrature::QuadratureRule;
use crate::space::{bilin, to_cmatrix, to_cvector, CMatrix, CVector};

use super::real_function::{convolve_terms, gaussian_convolve, GaussianDensity, RealDomainFunction};

/// H + K on V_ℝ, as the complex matrix Hc + C acting on real x.
fn multiplier_matrix(ctx: &OperatorContext) -> CMatrix {
    ctx.h_complex() + ctx.k_complex()
}

/// m(x, z) = e^{⟨Hz,x⟩} e^{⟨Kz̄,x⟩} e^{−⟨Ax,x⟩/2} for x ∈ V_ℝ.
pub fn multiplier(ctx: &OperatorContext, x: &DVector<f64>, z: &CVector) -> Complex64 {
    let m = multiplier_matrix(ctx);
    let xc = to_cvector(x);
    (bilin(&xc, &(&m * z)) - 0.5 * bilin(&xc, &(&m * &xc))).exp()
}

/// T_x F(z) = m(x, z) F(z − x).
pub fn translate(ctx: &OperatorContext, x: &DVector<f64>, f: &HolomorphicFunction) -> Result<HolomorphicFunction> {
    let n = ctx.n();
    if x.len() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: x.len() });
    }
    if f.nvars() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: f.nvars() });
    }
    let m = multiplier_matrix(ctx);
    let xc = to_cvector(x);
    let factor = ExpQuadratic::new(CMatrix::zeros(n, n), m.transpose() * &xc, -0.5 * bilin(&xc, &(&m * &xc)));
    Ok(f.compose_affine(&CMatrix::identity(n, n), &(-xc)).mul_exp(&factor))
}

/// R F(x) = c e^{−⟨Ax,x⟩/2} F(x) on V_ℝ.
pub fn restrict(ctx: &OperatorContext, f: &HolomorphicFunction) -> Result<RealDomainFunction> {
    let rf = ctx.require_real_form()?;
    if f.nvars() != ctx.n() {
        return Err(FockError::DimensionMismatch { expected: ctx.n(), got: f.nvars() });
    }
    let weight = ExpQuadratic::new(-to_cmatrix(&rf.r), CVector::zeros(ctx.n()), Complex64::new(ctx.c_const().ln(), 0.0));
    RealDomainFunction::from_terms(ctx.n(), f.terms().iter().map(|t| t.mul_exp(&weight)).collect())
}

/// R*h(z) = c_A⁻² c e^{½ zᵀRz} ∫ e^{−½ (z−y)ᵀH(z−y)} h(y) dy, in closed form.
pub fn restrict_adjoint(ctx: &OperatorContext, h: &RealDomainFunction) -> Result<HolomorphicFunction> {
    let rf = ctx.require_real_form()?;
    let n = ctx.n();
    if h.nvars() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: h.nvars() });
    }
    let kernel = GaussTerm::new(Polynomial::one(n), ExpQuadratic::new(-to_cmatrix(&rf.h), CVector::zeros(n), Complex64::new(0.0, 0.0)));
    let outer = ExpQuadratic::new(
        to_cmatrix(&rf.r),
        CVector::zeros(n),
        Complex64::new(ctx.c_const().ln() - 2.0 * ctx.log_c_a(), 0.0),
    );
    let terms = h
        .terms()?
        .iter()
        .map(|t| Ok(convolve_terms(&kernel, t)?.mul_exp(&outer)))
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() {
        return Ok(HolomorphicFunction::Polynomial(Polynomial::zero(n)));
    }
    Ok(HolomorphicFunction::from_terms(terms))
}

/// R*h(z) by quadrature over y with an arbitrary rule on ℝⁿ.
pub fn restrict_adjoint_quadrature(
    ctx: &OperatorContext,
    h: &RealDomainFunction,
    z: &CVector,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let rf = ctx.require_real_form()?;
    let n = ctx.n();
    if rule.dim() != n || h.nvars() != n || z.len() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: rule.dim() });
    }
    let hc = to_cmatrix(&rf.h);
    let mut diff = CVector::zeros(n);
    let integral = rule.integrate_lebesgue(|y| {
        for i in 0..n {
            diff[i] = z[i] - y[i];
        }
        (-0.5 * bilin(&diff, &(&hc * &diff))).exp() * h.eval(y)
    })?;
    let zr = to_cmatrix(&rf.r) * z;
    let prefactor = (Complex64::new(ctx.c_const().ln() - 2.0 * ctx.log_c_a(), 0.0) + 0.5 * bilin(z, &zr)).exp();
    Ok(prefactor * integral)
}

/// φ_{P(t)}(x) with P(t) = P/t.
pub fn gauss_density(p: &DMatrix<f64>, t: f64, x: &[f64]) -> Result<f64> {
    let d = GaussianDensity::at_time(p, t)?;
    if x.len() != d.nvars() {
        return Err(FockError::DimensionMismatch { expected: d.nvars(), got: x.len() });
    }
    Ok(d.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemigroupCheck {
    /// (φ_{P(t)} ∗ φ_{P(s)})(x), closed form
    pub lhs: f64,
    /// φ_{P(t+s)}(x)
    pub rhs: f64,
    pub residual: f64,
}

pub fn convolve_semigroup(p: &DMatrix<f64>, t: f64, s: f64, x: &[f64]) -> Result<SemigroupCheck> {
    let a = GaussianDensity::at_time(p, t)?;
    let b = GaussianDensity::at_time(p, s)?;
    let ab = GaussianDensity::at_time(p, t + s)?;
    if x.len() != a.nvars() {
        return Err(FockError::DimensionMismatch { expected: a.nvars(), got: x.len() });
    }
    let lhs = convolve_terms(&a.term(), &b.term())?.eval_real(x).re;
    let rhs = ab.eval(x);
    Ok(SemigroupCheck { lhs, rhs, residual: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE) })
}

/// The symmetric matrix Y with Im⟨x, Ax⟩ = −xᵀYx on V_ℝ.
fn w_form(ctx: &OperatorContext) -> DMatrix<f64> {
    let b = ctx.a().real_to_imag_block();
    0.5 * (&b + b.transpose())
}

/// e^{i Im⟨x, Ax⟩}.
pub fn w_phase(ctx: &OperatorContext, x: &[f64]) -> Complex64 {
    if ctx.real_preserving() {
        return Complex64::new(1.0, 0.0);
    }
    let v = DVector::from_column_slice(x);
    Complex64::new(0.0, -v.dot(&(w_form(ctx) * &v))).exp()
}

/// Wh(x) = e^{i Im⟨x, Ax⟩} h(x).
pub fn w_operator(ctx: &OperatorContext, h: &RealDomainFunction, x: &[f64]) -> Complex64 {
    w_phase(ctx, x) * h.eval(x)
}

/// W as a multiplication operator on functions.
pub fn w_apply(ctx: &OperatorContext, h: &RealDomainFunction) -> RealDomainFunction {
    if ctx.real_preserving() {
        return h.clone();
    }
    let n = ctx.n();
    let q = to_cmatrix(&w_form(ctx)).map(|v| Complex64::new(0.0, -2.0) * v);
    h.mul_exp(&ExpQuadratic::new(q, CVector::zeros(n), Complex64::new(0.0, 0.0)))
}

/// H compressed to V_ℝ: xᵀH_ℝx = ⟨Hx, x⟩ for real x.
pub fn h_on_real(ctx: &OperatorContext) -> DMatrix<f64> {
    ctx.h().xx_block()
}

/// RR*h = W(φ_H ∗ h).
pub fn rr_star(ctx: &OperatorContext, h: &RealDomainFunction, nodes: usize) -> Result<RealDomainFunction> {
    let conv = gaussian_convolve(&GaussianDensity::new(h_on_real(ctx))?, h, nodes)?;
    Ok(w_apply(ctx, &conv))
}

/// |R*|h = φ_{H(1/2)} ∗ h = φ_{2H} ∗ h.
pub fn abs_r_star(ctx: &OperatorContext, h: &RealDomainFunction, nodes: usize) -> Result<RealDomainFunction> {
    let rf = ctx.require_real_form()?;
    gaussian_convolve(&GaussianDensity::at_time(&rf.h, 0.5)?, h, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::fock_rule;
    use crate::operator::build_context;
    use crate::space::{RealLinearMap, SpaceContext};

    fn d41() -> OperatorContext {
        build_context(&RealLinearMap::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap()).unwrap()
    }

    fn rotated() -> OperatorContext {
        build_context(&RealLinearMap::from_rows(&[vec![2.5, 1.5], vec![1.5, 2.5]]).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn multiplier_examples() {
        let ctx = d41();
        let z = CVector::from_vec(vec![c(0.3, -0.8)]);
        assert_eq!(multiplier(&ctx, &DVector::zeros(1), &z), c(1.0, 0.0));
        let m = multiplier(&ctx, &DVector::from_vec(vec![1.0]), &CVector::zeros(1));
        assert!((m.re - (-2.0f64).exp()).abs() < 1e-16 && m.im == 0.0);
    }

    #[test]
    fn translation_on_constants() {
        let ctx = build_context(&SpaceContext::new(1).unwrap().identity()).unwrap();
        let x = DVector::from_vec(vec![0.6]);
        let t = translate(&ctx, &x, &HolomorphicFunction::one(1)).unwrap();
        let z = CVector::from_vec(vec![c(0.2, 0.9)]);
        let expect = (z[0] * 0.6 - 0.18).exp();
        assert!((t.eval(&z) - expect).norm() < 1e-15);
        let t0 = translate(&ctx, &DVector::zeros(1), &HolomorphicFunction::monomial(&[2])).unwrap();
        assert!((t0.eval(&z) - z[0] * z[0]).norm() < 1e-15);
    }

    #[test]
    fn translation_unitary_only_for_real_preserving() {
        let x = DVector::from_vec(vec![0.7]);
        for (ctx, expect_unitary) in [(d41(), true), (rotated(), false)] {
            let rule = fock_rule(&ctx, 40).unwrap();
            let f = HolomorphicFunction::one(1);
            let tf = translate(&ctx, &x, &f).unwrap();
            let a = crate::kernel::inner_product_fa(&ctx, &tf, &tf, &rule).unwrap().re;
            if expect_unitary {
                assert!((a - 1.0).abs() < 1e-10, "{a}");
            } else {
                assert!((a - 1.0).abs() > 1e-3, "{a}");
            }
        }
    }

    #[test]
    fn restriction_examples() {
        let ctx = d41();
        let r = restrict(&ctx, &HolomorphicFunction::one(1)).unwrap();
        let c = (2.0 * std::f64::consts::PI).powf(-0.25) * 1.6f64.powf(0.25);
        assert!((r.eval(&[0.0]).re - c).abs() < 1e-15);
        assert!((c - 0.710_373).abs() < 5e-6);
        assert!(matches!(restrict(&rotated(), &HolomorphicFunction::one(1)), Err(FockError::RequiresRealForm)));
        let id = build_context(&SpaceContext::new(1).unwrap().identity()).unwrap();
        let r = restrict(&id, &HolomorphicFunction::one(1)).unwrap();
        let expect = (2.0 * std::f64::consts::PI).powf(-0.25) * (-0.5f64 * 0.49).exp();
        assert!((r.eval(&[0.7]).re - expect).abs() < 1e-15);
    }

    #[test]
    fn adjoint_closed_form_vs_quadrature() {
        let ctx = d41();
        let h = GaussianDensity::new(DMatrix::from_element(1, 1, 2.5)).unwrap().function();
        let closed = restrict_adjoint(&ctx, &h).unwrap().eval(&CVector::zeros(1));
        let rule = QuadratureRule::new(1, 40, DMatrix::from_element(1, 1, 5.0)).unwrap();
        let quad = restrict_adjoint_quadrature(&ctx, &h, &CVector::zeros(1), &rule).unwrap();
        assert!((closed - quad).norm() <= 1e-8 * closed.norm());
        let zero = restrict_adjoint(&ctx, &RealDomainFunction::zero(1)).unwrap();
        assert_eq!(zero.eval(&CVector::from_vec(vec![c(0.4, 0.1)])), c(0.0, 0.0));
    }

    #[test]
    fn semigroup_examples() {
        assert!((gauss_density(&DMatrix::identity(1, 1), 1.0, &[0.0]).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let chk = convolve_semigroup(&p, 1.0, 1.0, &[0.3, -0.2]).unwrap();
        assert!(chk.residual <= 1e-12, "{chk:?}");
    }

    #[test]
    fn w_examples() {
        let h = RealDomainFunction::hermite_function(&[1]);
        assert_eq!(w_phase(&d41(), &[0.7]), c(1.0, 0.0));
        let ctx = rotated();
        let x = [0.7];
        // ⟨x, Ax⟩ with Ax = (2.5x) + i(1.5x): Im = −1.5x²
        let expect = c(0.0, -1.5 * 0.49).exp();
        assert!((w_phase(&ctx, &x) - expect).norm() < 1e-15);
        assert!((w_operator(&ctx, &h, &x).norm() - h.eval(&x).norm()).abs() < 1e-15);
        assert!((w_apply(&ctx, &h).eval(&x) - w_operator(&ctx, &h, &x)).norm() < 1e-15);
    }

    #[test]
    fn abs_r_star_of_one() {
        let one = RealDomainFunction::constant(1, c(1.0, 0.0));
        let v = abs_r_star(&d41(), &one, 40).unwrap().eval(&[0.4]);
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
    }
}
