//! The measure μ_A, the reproducing kernel K_A, the unitary Ψ: F → F_A,
//! inner products on F_A, and the determinant identities behind c_A.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FockError, Result};
use crate::gaussian::{ExpQuadratic, GaussTerm};
use crate::holomorphic::HolomorphicFunction;
use crate::linalg;
use crate::operator::{build_context, OperatorContext};
use crate::poly::Polynomial;
use crate::quadrature::QuadratureRule;
use crate::space::{bilin, herm, to_cmatrix, CMatrix, CVector, RealLinearMap};

/// Largest real exponent accepted before reporting a range error.
pub const MAX_EXPONENT: f64 = 700.0;

fn checked_exp(exponent: Complex64) -> Result<Complex64> {
    if exponent.re > MAX_EXPONENT {
        return Err(FockError::Range { exponent: exponent.re });
    }
    Ok(exponent.exp())
}

/// (Az, z) = Re⟨Az, z⟩.
pub fn real_quadratic(ctx: &OperatorContext, z: &CVector) -> f64 {
    let v = ctx.space().to_real(z);
    v.dot(&(ctx.a().matrix() * &v))
}

/// dμ_A/dxdy = π^{-n} √(det_V A) e^{−(Az,z)}.
pub fn measure_density(ctx: &OperatorContext, z: &CVector) -> f64 {
    let n = ctx.n() as f64;
    (-n * PI.ln() + 0.5 * ctx.log_det_v_a() - real_quadratic(ctx, z)).exp()
}

/// log K_A(z, w) = −2 log c_A + ½ z·(C̄z) + ⟨Hz, w⟩ + ½ w̄·(C w̄).
pub fn kernel_exponent(ctx: &OperatorContext, z: &CVector, w: &CVector) -> Complex64 {
    let c = ctx.k_complex();
    let c_bar = c.map(|v| v.conj());
    let wb = w.map(|v| v.conj());
    let hz = ctx.h_complex() * z;
    -2.0 * ctx.log_c_a() + 0.5 * bilin(z, &(&c_bar * z)) + herm(&hz, w) + 0.5 * bilin(&wb, &(c * &wb))
}

pub fn kernel_eval(ctx: &OperatorContext, z: &CVector, w: &CVector) -> Result<Complex64> {
    checked_exp(kernel_exponent(ctx, z, w))
}

/// Classical kernel e^{⟨z, w⟩}.
pub fn classical_kernel(z: &CVector, w: &CVector) -> Result<Complex64> {
    checked_exp(herm(z, w))
}

/// The kernel section K_{A,w} = K_A(·, w) as a symbolic holomorphic function.
#[derive(Debug, Clone)]
pub struct KernelSection {
    pub w: CVector,
    pub function: HolomorphicFunction,
}

impl KernelSection {
    pub fn new(ctx: &OperatorContext, w: &CVector) -> Self {
        let c = ctx.k_complex();
        let wb = w.map(|v| v.conj());
        let q = c.map(|v| v.conj());
        let b = ctx.h_complex().transpose() * &wb;
        let gamma = -2.0 * ctx.log_c_a() + 0.5 * bilin(&wb, &(c * &wb));
        KernelSection { w: w.clone(), function: HolomorphicFunction::ExpQuadratic(ExpQuadratic::new(q, b, gamma)) }
    }

    pub fn eval(&self, z: &CVector) -> Complex64 {
        self.function.eval(z)
    }
}

/// Ψ(F)(w) = c_A exp(−conj⟨K T₁w, T₁w⟩ / 2) F(T₁ w).
pub fn psi(ctx: &OperatorContext, f: &HolomorphicFunction) -> Result<HolomorphicFunction> {
    check_dim(ctx, f)?;
    let t1 = ctx.t1_complex();
    let c_bar = ctx.k_complex().map(|v| v.conj());
    let q = -(t1.transpose() * c_bar * t1);
    let factor = ExpQuadratic::new(q, CVector::zeros(ctx.n()), Complex64::new(ctx.log_c_a(), 0.0));
    Ok(f.compose_linear(t1).mul_exp(&factor))
}

/// Ψ*(F)(w) = c_A⁻¹ exp(conj⟨Kw, w⟩ / 2) F(√H w).
pub fn psi_star(ctx: &OperatorContext, f: &HolomorphicFunction) -> Result<HolomorphicFunction> {
    check_dim(ctx, f)?;
    let c_bar = ctx.k_complex().map(|v| v.conj());
    let factor = ExpQuadratic::new(c_bar, CVector::zeros(ctx.n()), Complex64::new(-ctx.log_c_a(), 0.0));
    Ok(f.compose_linear(ctx.sqrt_h_complex()).mul_exp(&factor))
}

fn check_dim(ctx: &OperatorContext, f: &HolomorphicFunction) -> Result<()> {
    if f.nvars() != ctx.n() {
        return Err(FockError::DimensionMismatch { expected: ctx.n(), got: f.nvars() });
    }
    Ok(())
}

/// Rule whose Gaussian is μ_A itself (precision 2A on ℝ²ⁿ).
pub fn fock_rule(ctx: &OperatorContext, nodes: usize) -> Result<QuadratureRule> {
    QuadratureRule::new(ctx.space().real_dim(), nodes, 2.0 * ctx.a().matrix())
}

/// Quadrature approximation of ∫ F conj(G) dμ_A.
///
/// The rule may use any precision on ℝ²ⁿ; the density ratio to μ_A is applied
/// at each node.
pub fn inner_product_fa(
    ctx: &OperatorContext,
    f: &HolomorphicFunction,
    g: &HolomorphicFunction,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    Ok(inner_products_fa(ctx, std::slice::from_ref(f), g, rule)?[0])
}

/// ⟨Fᵢ, G⟩_A for several Fᵢ, evaluating G once per node.
pub fn inner_products_fa(
    ctx: &OperatorContext,
    fs: &[HolomorphicFunction],
    g: &HolomorphicFunction,
    rule: &QuadratureRule,
) -> Result<Vec<Complex64>> {
    check_dim(ctx, g)?;
    integrate_fa(ctx, fs, rule, |z, ratio, fs, out| {
        let gz = g.eval(z).conj() * ratio;
        for (o, f) in out.iter_mut().zip(fs) {
            *o = f.eval(z) * gz;
        }
    })
}

/// ‖Fᵢ‖²_A for several Fᵢ in one pass over the rule.
pub fn squared_norms_fa(ctx: &OperatorContext, fs: &[HolomorphicFunction], rule: &QuadratureRule) -> Result<Vec<f64>> {
    let v = integrate_fa(ctx, fs, rule, |z, ratio, fs, out| {
        for (o, f) in out.iter_mut().zip(fs) {
            *o = Complex64::new(f.eval(z).norm_sqr() * ratio, 0.0);
        }
    })?;
    Ok(v.into_iter().map(|c| c.re).collect())
}

/// Integrates against μ_A with any rule; `fill` receives z and the density ratio dμ_A/d(rule).
fn integrate_fa(
    ctx: &OperatorContext,
    fs: &[HolomorphicFunction],
    rule: &QuadratureRule,
    mut fill: impl FnMut(&CVector, f64, &[HolomorphicFunction], &mut [Complex64]),
) -> Result<Vec<Complex64>> {
    let d = ctx.space().real_dim();
    if rule.dim() != d {
        return Err(FockError::DimensionMismatch { expected: d, got: rule.dim() });
    }
    for f in fs {
        check_dim(ctx, f)?;
    }
    let target = 2.0 * ctx.a().matrix();
    let diff = &rule.scaling().clone() - &target;
    let log_ratio_const = 0.5 * (linalg::log_det_spd(&target)? - linalg::log_det_spd(rule.scaling())?);
    let matched = diff.norm() == 0.0;
    let space = ctx.space();
    rule.integrate_many(fs.len(), |x, out| {
        let v = nalgebra::DVector::from_column_slice(x);
        let z = space.to_complex(&v);
        let ratio = if matched { 1.0 } else { (log_ratio_const + 0.5 * v.dot(&(&diff * &v))).exp() };
        fill(&z, ratio, fs, out);
    })
}

/// Closed-form ∫ F conj(G) dμ_A via Gaussian integration over ℝ²ⁿ.
pub fn inner_product_fa_exact(ctx: &OperatorContext, f: &HolomorphicFunction, g: &HolomorphicFunction) -> Result<Complex64> {
    check_dim(ctx, f)?;
    check_dim(ctx, g)?;
    let n = ctx.n();
    let i = Complex64::new(0.0, 1.0);
    let mut to_z = CMatrix::zeros(n, 2 * n);
    let mut to_zbar = CMatrix::zeros(n, 2 * n);
    for k in 0..n {
        to_z[(k, k)] = Complex64::new(1.0, 0.0);
        to_z[(k, n + k)] = i;
        to_zbar[(k, k)] = Complex64::new(1.0, 0.0);
        to_zbar[(k, n + k)] = -i;
    }
    let zero = CVector::zeros(n);
    let density = GaussTerm::gaussian_density(&(2.0 * ctx.a().matrix()))?;
    let mut acc = Complex64::new(0.0, 0.0);
    for tf in f.terms() {
        let left = tf.compose_affine(&to_z, &zero).mul(&density);
        for tg in g.terms() {
            let right = tg.conj_coeffs().compose_affine(&to_zbar, &zero);
            acc += left.mul(&right).integrate_all()?;
        }
    }
    Ok(acc)
}

/// ‖δ_z‖ = K_A(z, z)^{1/2} = c_A⁻¹ e^{(Az,z)/2}.
pub fn eval_functional_norm(ctx: &OperatorContext, z: &CVector) -> Result<f64> {
    let e = kernel_exponent(ctx, z, z);
    if e.re > MAX_EXPONENT {
        return Err(FockError::Range { exponent: e.re });
    }
    Ok((0.5 * e.re).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        IdentityCheck { lhs, rhs, residual: (lhs - rhs).abs() / scale }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    /// √(det R det T)
    pub lhs: f64,
    /// det((R + T)/2)
    pub rhs: f64,
    /// (rhs − lhs) / rhs
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetIdentityReport {
    /// c_A⁻² against det T / ((det S)^{1/2} det L)
    pub ca_det: IdentityCheck,
    /// det R det T / det((R+T)/2)² against det{I + (D/√2 − D⁻¹/√2)²}⁻²
    pub determinant_identity: IdentityCheck,
    pub inequality: InequalityCheck,
    /// c_A⁻² c² against √(det H) / (2π)^{n/2}
    pub constants: IdentityCheck,
}

/// Evaluates the four determinant relations for A = d(R, T).
pub fn det_identity_suite(r: &DMatrix<f64>, t: &DMatrix<f64>) -> Result<DetIdentityReport> {
    let a = RealLinearMap::block_diag(r, t)?;
    let ctx = build_context(&a)?;
    let rf = ctx.require_real_form()?;
    let n = r.nrows();

    let ca_m2 = (-2.0 * ctx.log_c_a()).exp();
    let ca_det = IdentityCheck::new(ca_m2, rf.det_t / (rf.det_s.sqrt() * rf.det_l));

    let log_dr = linalg::log_det_spd(&rf.r)?;
    let log_dt = linalg::log_det_spd(&rf.t)?;
    let log_dh = linalg::log_det_spd(&rf.h)?;
    let lhs_b = (log_dr + log_dt - 2.0 * log_dh).exp();
    let d_inv = linalg::inverse(&rf.d)?;
    let x = (&rf.d - &d_inv) / std::f64::consts::SQRT_2;
    let inner = DMatrix::identity(n, n) + &x * &x;
    let rhs_b = (-2.0 * linalg::log_det_spd(&(0.5 * (&inner + inner.transpose())))?).exp();
    let determinant_identity = IdentityCheck::new(lhs_b, rhs_b);

    let geo = (0.5 * (log_dr + log_dt)).exp();
    let arith = log_dh.exp();
    let inequality = InequalityCheck { lhs: geo, rhs: arith, relative_gap: (arith - geo) / arith };

    let constants = constants_check(&ctx);
    Ok(DetIdentityReport { ca_det, determinant_identity, inequality, constants })
}

/// c_A⁻² c² against √(det H) / (2π)^{n/2}, valid for every context.
pub fn constants_check(ctx: &OperatorContext) -> IdentityCheck {
    let n = ctx.n() as f64;
    let lhs = (-2.0 * ctx.log_c_a()).exp() * ctx.c_const().powi(2);
    let rhs = (0.5 * ctx.log_det_h() - 0.5 * n * (2.0 * PI).ln()).exp();
    IdentityCheck::new(lhs, rhs)
}

/// det S against det_V A / det H (real-preserving contexts only).
pub fn det_s_check(ctx: &OperatorContext) -> Result<IdentityCheck> {
    let rf = ctx.require_real_form()?;
    Ok(IdentityCheck::new(rf.det_s, (ctx.log_det_v_a() - ctx.log_det_h()).exp()))
}

/// Constant polynomial of the context's dimension, for quick construction.
pub fn constant_function(ctx: &OperatorContext, c: Complex64) -> HolomorphicFunction {
    HolomorphicFunction::Polynomial(Polynomial::constant(ctx.n(), c))
}

pub fn real_matrix_as_complex(m: &DMatrix<f64>) -> CMatrix {
    to_cmatrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceContext;

    fn d41() -> OperatorContext {
        build_context(&RealLinearMap::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap()).unwrap()
    }

    fn ident(n: usize) -> OperatorContext {
        build_context(&SpaceContext::new(n).unwrap().identity()).unwrap()
    }

    fn pt(vals: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(vals.len(), vals.iter().map(|&(a, b)| Complex64::new(a, b)))
    }

    #[test]
    fn measure_density_examples() {
        assert!((measure_density(&d41(), &pt(&[(0.0, 0.0)])) - 2.0 / PI).abs() < 1e-15);
        assert!((measure_density(&ident(1), &pt(&[(0.0, 0.0)])) - 1.0 / PI).abs() < 1e-15);
        assert!((measure_density(&ident(1), &pt(&[(1.0, 0.0)])) - (-1.0f64).exp() / PI).abs() < 1e-15);
    }

    #[test]
    fn kernel_examples() {
        let z0 = pt(&[(0.0, 0.0)]);
        assert!((kernel_eval(&ident(1), &z0, &z0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((kernel_eval(&d41(), &z0, &z0).unwrap().re - 1.25).abs() < 1e-14);
        let z1 = pt(&[(1.0, 0.0)]);
        let k = kernel_eval(&d41(), &z1, &z1).unwrap();
        assert!((k.re - 1.25 * 4f64.exp()).abs() < 1e-12);
        assert!(k.im.abs() < 1e-14);
        // classical form for A = I
        let z = pt(&[(0.3, -0.2), (1.0, 0.5)]);
        let w = pt(&[(-0.7, 0.1), (0.2, 0.2)]);
        let lhs = kernel_eval(&ident(2), &z, &w).unwrap();
        assert!((lhs - classical_kernel(&z, &w).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn kernel_range_error() {
        let z = pt(&[(30.0, 0.0)]);
        assert!(matches!(kernel_eval(&d41(), &z, &z), Err(FockError::Range { .. })));
        assert!(matches!(eval_functional_norm(&d41(), &z), Err(FockError::Range { .. })));
    }

    #[test]
    fn kernel_section_matches_kernel() {
        let ctx = d41();
        let w = pt(&[(0.4, -0.9)]);
        let s = KernelSection::new(&ctx, &w);
        let z = pt(&[(-0.3, 0.6)]);
        let direct = kernel_eval(&ctx, &z, &w).unwrap();
        assert!((s.eval(&z) - direct).norm() <= 1e-14 * direct.norm());
    }

    #[test]
    fn eval_norm_examples() {
        assert!((eval_functional_norm(&d41(), &pt(&[(0.0, 0.0)])).unwrap() - 1.25f64.sqrt()).abs() < 1e-14);
        let v = eval_functional_norm(&d41(), &pt(&[(1.0, 0.0)])).unwrap();
        assert!((v - (1.25 * 4f64.exp()).sqrt()).abs() < 1e-12);
        let z = pt(&[(0.5, 0.5)]);
        let v = eval_functional_norm(&ident(1), &z).unwrap();
        assert!((v - (0.5f64 * 0.5).exp()).abs() < 1e-14);
    }

    #[test]
    fn psi_examples() {
        let ctx = ident(1);
        let f = HolomorphicFunction::monomial(&[3]);
        let g = psi(&ctx, &f).unwrap();
        let z = pt(&[(0.2, 0.7)]);
        assert!((g.eval(&z) - f.eval(&z)).norm() < 1e-14);

        let ctx = d41();
        let one = HolomorphicFunction::one(1);
        assert!((psi(&ctx, &one).unwrap().eval(&pt(&[(0.0, 0.0)])).re - 0.8f64.sqrt()).abs() < 1e-14);

        let f = HolomorphicFunction::monomial(&[1]);
        let back = psi_star(&ctx, &psi(&ctx, &f).unwrap()).unwrap();
        let (p, e) = back.simplify(1e-12).unwrap();
        assert!(e == ExpQuadratic::unit(1));
        let Some(HolomorphicFunction::Polynomial(orig)) = Some(f) else { unreachable!() };
        assert!(p.max_coeff_diff(&orig) <= 1e-12);
    }

    #[test]
    fn inner_products_of_monomials() {
        let ctx = ident(1);
        let rule = fock_rule(&ctx, 40).unwrap();
        let one = HolomorphicFunction::one(1);
        let z = HolomorphicFunction::monomial(&[1]);
        let z2 = HolomorphicFunction::monomial(&[2]);
        assert!((inner_product_fa(&ctx, &one, &one, &rule).unwrap().re - 1.0).abs() < 1e-12);
        assert!((inner_product_fa(&ctx, &z, &z, &rule).unwrap().re - 1.0).abs() < 1e-12);
        assert!((inner_product_fa(&ctx, &z2, &z2, &rule).unwrap().re - 2.0).abs() < 1e-11);
        assert!((inner_product_fa_exact(&ctx, &z2, &z2).unwrap().re - 2.0).abs() < 1e-12);
        let ctx = d41();
        let rule = fock_rule(&ctx, 40).unwrap();
        assert!((inner_product_fa(&ctx, &one, &one, &rule).unwrap().re - 1.0).abs() < 1e-12);
        assert!((inner_product_fa_exact(&ctx, &one, &one).unwrap().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn inner_product_dimension_errors() {
        let ctx = ident(1);
        let rule = QuadratureRule::standard(1, 10).unwrap();
        let one = HolomorphicFunction::one(1);
        assert!(matches!(
            inner_product_fa(&ctx, &one, &one, &rule),
            Err(FockError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn det_suite_examples() {
        let i = DMatrix::identity(2, 2);
        let rep = det_identity_suite(&i, &i).unwrap();
        assert!((rep.ca_det.lhs - 1.0).abs() < 1e-14 && rep.ca_det.residual < 1e-14);
        assert!(rep.inequality.relative_gap.abs() < 1e-14);

        let r = DMatrix::from_element(1, 1, 4.0);
        let t = DMatrix::from_element(1, 1, 1.0);
        let rep = det_identity_suite(&r, &t).unwrap();
        assert!((rep.determinant_identity.lhs - 0.64).abs() < 1e-14);
        assert!((rep.determinant_identity.rhs - 0.64).abs() < 1e-14);
        assert!((rep.ca_det.lhs - 1.25).abs() < 1e-14);
        assert!(rep.inequality.relative_gap > 0.0);
    }
}
