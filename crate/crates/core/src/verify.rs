//! The full verification suite behind `fock verify`.
//!
//! Every group draws its random inputs from its own ChaCha stream derived from
//! the seed, so groups are independent of each other and of evaluation order.

use std::ops::{AddAssign, SubAssign};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::holomorphic::HolomorphicFunction;
use crate::kernel::{self, fock_rule, inner_product_fa, kernel_eval, KernelSection};
use crate::linalg;
use crate::operator::{build_context, decompose, OperatorContext};
use crate::poly::Polynomial;
use crate::quadrature::{mc_integrate, QuadratureRule};
use crate::random;
use crate::report::Check;
use crate::space::{herm, CVector, RealLinearMap, SpaceContext};
use crate::transforms::*;
use crate::truncation::{ca_sequence, driver_hall, log_factor, TruncationSpec};

pub const DEFAULT_NODES: usize = 40;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Nodes per axis for n = 1 integrals over V; n = 2 uses half.
    pub nodes: usize,
    pub mc_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: DEFAULT_SEED, nodes: DEFAULT_NODES, mc_samples: DEFAULT_MC_SAMPLES }
    }
}

impl VerifyOptions {
    fn nodes_for(&self, real_dim: usize) -> usize {
        match real_dim {
            0..=2 => self.nodes,
            _ => (self.nodes / 2).max(1),
        }
    }
}

type Group = fn(&VerifyOptions, &mut ChaCha8Rng) -> Result<Vec<Check>>;

const GROUPS: &[(&str, Group)] = &[
    ("operator.decomposition", decomposition),
    ("operator.structure", structure),
    ("operator.sqrt_and_eigenbasis", sqrt_and_eigenbasis),
    ("kernel.constants", constants),
    ("kernel.determinant_identity", determinant_identity),
    ("kernel.kernel", kernel_properties),
    ("kernel.reproducing", reproducing),
    ("kernel.psi", psi_checks),
    ("transforms.multiplier", multiplier_checks),
    ("transforms.restriction", restriction_checks),
    ("transforms.semigroup", semigroup_checks),
    ("transforms.bargmann", bargmann_checks),
    ("transforms.gaussian", gaussian_checks),
    ("quadrature", quadrature_checks),
    ("truncation", truncation_checks),
];

/// Runs every group; a group that errors contributes one failed check.
pub fn run_suite(opts: &VerifyOptions) -> Vec<Check> {
    GROUPS.iter().flat_map(|(name, _)| run_group(name, opts).expect("known group")).collect()
}

/// Runs a single named group with the same stream it gets inside the full suite.
pub fn run_group(name: &str, opts: &VerifyOptions) -> Option<Vec<Check>> {
    let stream = GROUPS.iter().position(|(n, _)| *n == name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(stream as u64);
    Some(GROUPS[stream].1(opts, &mut rng).unwrap_or_else(|e| vec![Check::failed(name, &e)]))
}

pub fn group_names() -> Vec<&'static str> {
    GROUPS.iter().map(|(n, _)| *n).collect()
}

fn worst(name: &str, residuals: impl IntoIterator<Item = f64>, tol: f64) -> Check {
    let w = residuals.into_iter().fold(0.0f64, |a, r| if r.is_nan() || a.is_nan() { f64::NAN } else { a.max(r) });
    Check::new(name, w, 0.0, w, tol)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn pt(vals: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(vals.len(), vals.iter().map(|&(a, b)| Complex64::new(a, b)))
}

fn d41() -> Result<OperatorContext> {
    build_context(&RealLinearMap::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]])?)
}

fn rotated_d41() -> Result<OperatorContext> {
    build_context(&RealLinearMap::from_rows(&[vec![2.5, 1.5], vec![1.5, 2.5]])?)
}

fn identity(n: usize) -> Result<OperatorContext> {
    build_context(&SpaceContext::new(n)?.identity())
}

fn monomials(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|a: Vec<u32>| {
                let used: u32 = a.iter().sum();
                (0..=max_degree - used).map(move |k| {
                    let mut b = a.clone();
                    b.push(k);
                    b
                })
            })
            .collect();
    }
    out
}

fn decomposition(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (mut sum, mut hj, mut kj, mut hsa, mut ksym) = (vec![], vec![], vec![], vec![], vec![]);
    let mut h_spd = true;
    for i in 0..200 {
        let n = 1 + i % 3;
        let a = random::spd_operator(rng, n);
        let (h, k) = decompose(&a)?;
        let scale = a.norm();
        let j = a.ctx().j();
        sum.push(a.sub(&h.add(&k)).norm() / scale);
        hj.push(h.compose(&j).sub(&j.compose(&h)).norm() / scale);
        kj.push(k.compose(&j).add(&j.compose(&k)).norm() / scale);
        h_spd &= linalg::min_eigenvalue(h.matrix()) > 0.0;
        let z = random::complex_point(rng, n, 1.0);
        let w = random::complex_point(rng, n, 1.0);
        let zw = z.norm() * w.norm() * scale;
        hsa.push((herm(&h.apply(&z), &w) - herm(&z, &h.apply(&w))).norm() / zw.max(f64::MIN_POSITIVE));
        ksym.push((herm(&k.apply(&z), &w) - herm(&k.apply(&w), &z)).norm() / zw.max(f64::MIN_POSITIVE));
    }
    Ok(vec![
        worst("decompose.sum", sum, 1e-12),
        worst("decompose.h_commutes_with_j", hj, 1e-12),
        worst("decompose.k_anticommutes_with_j", kj, 1e-12),
        Check::holds("decompose.h_positive_definite", h_spd),
        worst("decompose.h_self_adjoint", hsa, 1e-12),
        worst("decompose.k_symmetric", ksym, 1e-12),
    ])
}

fn structure(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut sigma_k = vec![];
    let mut recon = vec![];
    let mut det_s = vec![];
    let mut ca_bound = true;
    for i in 0..50 {
        let n = 1 + i % 3;
        let a = random::spd_operator(rng, n);
        let ctx = build_context(&a)?;
        let sigma = a.ctx().sigma();
        let sk = sigma.compose(ctx.k());
        sigma_k.push(sk.transpose().sub(&ctx.k().compose(&sigma)).norm() / a.norm());
        ca_bound &= ctx.c_a() <= 1.0 + 1e-15;

        let b = random::real_preserving_operator(rng, n);
        let ctx = build_context(&b)?;
        let rf = ctx.require_real_form()?;
        recon.push(RealLinearMap::block_diag(&rf.r, &rf.t)?.sub(&b).norm() / b.norm());
        det_s.push(kernel::det_s_check(&ctx)?.residual);
        ca_bound &= ctx.c_a() <= 1.0 + 1e-15;
    }
    let t = random::spd(rng, 3, 0.5, 3.0);
    let equal = build_context(&RealLinearMap::block_diag(&t, &t)?)?;
    let near = build_context(&RealLinearMap::block_diag(&(&t + DMatrix::identity(3, 3) * 1e-3), &t)?)?;
    Ok(vec![
        worst("operator.sigma_k_transpose", sigma_k, 1e-12),
        worst("operator.real_form_reconstruction", recon, 1e-12),
        worst("operator.det_s_times_det_h", det_s, 1e-12),
        Check::holds("operator.c_a_at_most_one", ca_bound),
        Check::new("operator.c_a_equals_one_when_r_equals_t", equal.c_a(), 1.0, (equal.c_a() - 1.0).abs(), 1e-12),
        Check::holds("operator.c_a_below_one_when_r_differs", 1.0 - near.c_a() > 1e-12),
    ])
}

fn sqrt_and_eigenbasis(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut sq = vec![];
    for d in 1..=6 {
        let m = random::spd(rng, d, 0.1, 10.0);
        let x = linalg::sqrt_spd(&m)?;
        sq.push((&x * &x - &m).norm() / m.norm());
    }
    let (mut ortho, mut eig) = (vec![], vec![]);
    let mut sorted = true;
    for i in 0..30 {
        let n = 1 + i % 3;
        let ctx = build_context(&random::spd_operator(rng, n))?;
        let (vals, vecs) = ctx.h_eigenbasis();
        sorted &= vals.windows(2).all(|w| w[0] <= w[1]);
        for (j, v) in vecs.iter().enumerate() {
            for (k, u) in vecs.iter().enumerate() {
                let expect = if j == k { 1.0 } else { 0.0 };
                ortho.push((herm(v, u) - Complex64::new(expect, 0.0)).norm());
            }
            eig.push((ctx.h().apply(v) - v.scale(vals[j])).norm());
        }
    }
    let ctx = build_context(&RealLinearMap::block_diag(
        &DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 9.0])),
        &DMatrix::identity(2, 2),
    )?)?;
    let (vals, vecs) = ctx.h_eigenbasis();
    let golden = (vals[0] - 1.0).abs().max((vals[1] - 5.0).abs())
        + (vecs[0].clone() - pt(&[(1.0, 0.0), (0.0, 0.0)])).norm()
        + (vecs[1].clone() - pt(&[(0.0, 0.0), (1.0, 0.0)])).norm();
    Ok(vec![
        worst("linalg.sqrt_spd_residual", sq, 1e-12),
        worst("operator.eigenbasis_orthonormal", ortho, 1e-12),
        worst("operator.eigenbasis_residual", eig, 1e-10),
        Check::holds("operator.eigenvalues_ascending", sorted),
        Check::new("operator.eigenbasis_golden", golden, 0.0, golden, 1e-12),
    ])
}

fn constants(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (mut ca, mut lcons, mut dets) = (vec![], vec![], vec![]);
    for i in 0..100 {
        let n = 1 + i % 5;
        let r = random::spd(rng, n, 0.5, 3.0);
        let t = random::spd(rng, n, 0.5, 3.0);
        let rep = kernel::det_identity_suite(&r, &t)?;
        ca.push(rep.ca_det.residual);
        lcons.push(rep.constants.residual);
        let ctx = build_context(&RealLinearMap::block_diag(&r, &t)?)?;
        dets.push(kernel::det_s_check(&ctx)?.residual);
    }
    for i in 0..20 {
        let ctx = build_context(&random::spd_operator(rng, 1 + i % 3))?;
        lcons.push(kernel::constants_check(&ctx).residual);
    }
    let golden = kernel::det_identity_suite(&DMatrix::from_element(1, 1, 4.0), &DMatrix::from_element(1, 1, 1.0))?;
    Ok(vec![
        worst("constants.c_a_determinant_form", ca, 1e-12),
        worst("constants.c_a_c_product", lcons, 1e-12),
        worst("constants.det_s", dets, 1e-12),
        Check::new("constants.golden_c_a_inverse_square", golden.ca_det.lhs, 1.25, (golden.ca_det.lhs - 1.25).abs(), 1e-14),
    ])
}

fn determinant_identity(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut res = vec![];
    let mut strict = true;
    let mut eq_gap: f64 = 0.0;
    for i in 0..100 {
        let n = 1 + i % 5;
        let r = random::spd(rng, n, 0.5, 3.0);
        let t = random::spd(rng, n, 0.5, 3.0);
        let rep = kernel::det_identity_suite(&r, &t)?;
        res.push(rep.determinant_identity.residual);
        if (&r - &t).norm() > 1e-6 {
            strict &= rep.inequality.lhs < rep.inequality.rhs;
        }
        let same = kernel::det_identity_suite(&r, &r)?;
        eq_gap = eq_gap.max(same.inequality.relative_gap.abs());
    }
    let golden = kernel::det_identity_suite(&DMatrix::from_element(1, 1, 4.0), &DMatrix::from_element(1, 1, 1.0))?;
    Ok(vec![
        worst("determinant_identity.residual", res, 1e-10),
        Check::holds("determinant_identity.inequality_strict", strict),
        Check::new("determinant_identity.equality_at_r_equals_t", eq_gap, 0.0, eq_gap, 1e-12),
        Check::relative("determinant_identity.golden_lhs", golden.determinant_identity.lhs, 0.64, 1e-14),
        Check::relative("determinant_identity.golden_rhs", golden.determinant_identity.rhs, 0.64, 1e-14),
    ])
}

fn kernel_properties(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (mut herm_sym, mut diag, mut gram) = (vec![], vec![], vec![]);
    for i in 0..30 {
        let n = 1 + i % 3;
        let ctx = build_context(&random::spd_operator(rng, n))?;
        let z = random::complex_point(rng, n, 1.5);
        let w = random::complex_point(rng, n, 1.5);
        herm_sym.push(rel(kernel_eval(&ctx, &z, &w)?, kernel_eval(&ctx, &w, &z)?.conj()));
        let kzz = kernel_eval(&ctx, &z, &z)?;
        let expect = (-2.0 * ctx.log_c_a() + kernel::real_quadratic(&ctx, &z)).exp();
        diag.push(rel(kzz, Complex64::new(expect, 0.0)));
        let m = 2 + i % 5;
        let pts: Vec<CVector> = (0..m).map(|_| random::complex_point(rng, n, 1.0)).collect();
        let mut g = crate::space::CMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                g[(a, b)] = kernel_eval(&ctx, &pts[a], &pts[b])?;
            }
        }
        let trace: f64 = (0..m).map(|a| g[(a, a)].re).sum();
        let (vals, _) = linalg::hermitian_eigen(&(g.adjoint().scale(0.5) + g.scale(0.5)));
        gram.push((-vals[0] / trace).max(0.0));
    }
    let ctx = d41()?;
    let one = pt(&[(1.0, 0.0)]);
    let golden = kernel_eval(&ctx, &one, &one)?.re;
    let norm = kernel::eval_functional_norm(&ctx, &one)?;
    let section = KernelSection::new(&ctx, &pt(&[(0.3, -0.4)]));
    let sec_res = rel(section.eval(&pt(&[(-0.2, 0.5)])), kernel_eval(&ctx, &pt(&[(-0.2, 0.5)]), &pt(&[(0.3, -0.4)]))?);
    Ok(vec![
        worst("kernel.hermitian_symmetry", herm_sym, 1e-13),
        worst("kernel.diagonal", diag, 1e-12),
        worst("kernel.gram_positive", gram, 1e-10),
        Check::relative("kernel.golden_d41_at_one", golden, 1.25 * 4f64.exp(), 1e-14),
        Check::relative("kernel.eval_norm_golden", norm, (1.25 * 4f64.exp()).sqrt(), 1e-14),
        Check::new("kernel.section_matches_kernel", sec_res, 0.0, sec_res, 1e-14),
    ])
}

fn reproducing(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = vec![];
    for n in 1..=2 {
        let rule_nodes = opts.nodes_for(2 * n);
        let mut res = vec![];
        for _ in 0..5 {
            let ctx = build_context(&random::real_preserving_operator(rng, n))?;
            let rule = fock_rule(&ctx, rule_nodes)?;
            let w = random::complex_point(rng, n, 1.0);
            let section = KernelSection::new(&ctx, &w).function;
            let fs: Vec<_> = monomials(n, 4).iter().map(|a| HolomorphicFunction::monomial(a)).collect();
            for (f, ip) in fs.iter().zip(kernel::inner_products_fa(&ctx, &fs, &section, &rule)?) {
                let fw = f.eval(&w);
                res.push((ip - fw).norm() / (1.0 + fw.norm()));
            }
        }
        out.push(worst(&format!("reproducing.n{n}"), res, 1e-6).with_note(format!("{rule_nodes} nodes per axis")));
    }
    let ctx = identity(1)?;
    let rule = fock_rule(&ctx, opts.nodes)?;
    for (k, expect) in [(0u32, 1.0), (1, 1.0), (2, 2.0)] {
        let f = HolomorphicFunction::monomial(&[k]);
        let v = inner_product_fa(&ctx, &f, &f, &rule)?.re;
        out.push(Check::relative(format!("inner_product.classical_z{k}"), v, expect, 1e-8));
    }
    let ctx = d41()?;
    let one = HolomorphicFunction::one(1);
    let v = inner_product_fa(&ctx, &one, &one, &fock_rule(&ctx, opts.nodes)?)?.re;
    out.push(Check::relative("inner_product.unit_norm_d41", v, 1.0, 1e-8));
    Ok(out)
}

fn psi_checks(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut ctxs = vec![d41()?, rotated_d41()?, build_context(&random::real_preserving_operator(rng, 1))?];
    ctxs.push(build_context(&random::spd_operator(rng, 1))?);
    ctxs.push(build_context(&random::spd_operator(rng, 2))?);
    let (mut iso, mut round) = (vec![], vec![]);
    for ctx in &ctxs {
        let n = ctx.n();
        let rule_a = fock_rule(ctx, opts.nodes_for(2 * n))?;
        let classical = identity(n)?;
        let rule = QuadratureRule::new(2 * n, opts.nodes_for(2 * n), psi_image_precision(ctx))?;
        let fs: Vec<_> =
            monomials(n, if n == 1 { 4 } else { 2 }).iter().map(|a| HolomorphicFunction::normalized_monomial(a)).collect();
        let pfs: Vec<_> = fs.iter().map(|f| kernel::psi(ctx, f)).collect::<Result<_>>()?;
        let images = kernel::squared_norms_fa(&classical, &pfs, &rule)?;
        let sources = kernel::squared_norms_fa(ctx, &fs, &rule_a)?;
        for (image, source) in images.iter().zip(&sources) {
            iso.push((image - source).abs() / source);
        }
        for (f, pf) in fs.iter().zip(&pfs) {
            let (p, e) = kernel::psi_star(ctx, pf)?.simplify(1e-12)?;
            let HolomorphicFunction::Polynomial(orig) = f else { unreachable!() };
            let trivial = e.max_diff(&crate::gaussian::ExpQuadratic::unit(n));
            round.push(p.max_coeff_diff(orig).max(trivial));
        }
    }
    let ctx = d41()?;
    let v = kernel::psi(&ctx, &HolomorphicFunction::one(1))?.eval(&pt(&[(0.0, 0.0)])).re;
    Ok(vec![
        worst("psi.isometry", iso, 1e-6),
        worst("psi.roundtrip", round, 1e-12),
        Check::relative("psi.golden_one_at_zero", v, 0.8f64.sqrt(), 1e-14),
    ])
}

/// Precision of the Gaussian e^{−|w|²} |e^{−½ wᵀQw}|² with Q = T₁ᵀ C̄ T₁, so the
/// rule for ‖ΨF‖² sees only a polynomial.
fn psi_image_precision(ctx: &OperatorContext) -> DMatrix<f64> {
    let n = ctx.n();
    let t1 = ctx.t1_complex();
    let q = t1.transpose() * ctx.k_complex().map(|v| v.conj()) * t1;
    let (a, b) = (q.map(|v| v.re), q.map(|v| v.im));
    let mut p = DMatrix::identity(2 * n, 2 * n);
    p.view_mut((0, 0), (n, n)).add_assign(&a);
    p.view_mut((n, n), (n, n)).sub_assign(&a);
    p.view_mut((0, n), (n, n)).sub_assign(&b);
    p.view_mut((n, 0), (n, n)).sub_assign(&b);
    2.0 * p
}

fn multiplier_checks(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut cocycle = vec![];
    let mut modulus = vec![];
    for i in 0..10 {
        let n = 1 + i % 3;
        let a = if i % 2 == 0 { random::real_preserving_operator(rng, n) } else { random::real_h_operator(rng, n) };
        let ctx = build_context(&a)?;
        for _ in 0..50 {
            let x = random::real_point(rng, n, 1.0);
            let y = random::real_point(rng, n, 1.0);
            let z = random::complex_point(rng, n, 1.5);
            let zx = &z - x.map(|v| Complex64::new(v, 0.0));
            cocycle.push(rel(multiplier(&ctx, &x, &z) * multiplier(&ctx, &y, &zx), multiplier(&ctx, &(&x + &y), &z)));
            if ctx.real_preserving() {
                let xc = x.map(|v| Complex64::new(v, 0.0));
                let az_x = herm(&ctx.a().apply(&z), &xc).re;
                let ax_x = herm(&ctx.a().apply(&xc), &xc).re;
                modulus.push(((multiplier(&ctx, &x, &z).norm()) - (az_x - 0.5 * ax_x).exp()).abs() / (az_x - 0.5 * ax_x).exp());
            }
        }
    }
    // T_x T_y = T_{x+y}
    let ctx = build_context(&random::real_preserving_operator(rng, 2))?;
    let f = HolomorphicFunction::monomial(&[1, 2]);
    let x = random::real_point(rng, 2, 1.0);
    let y = random::real_point(rng, 2, 1.0);
    let lhs = translate(&ctx, &x, &translate(&ctx, &y, &f)?)?;
    let rhs = translate(&ctx, &(&x + &y), &f)?;
    let mut group = vec![];
    for _ in 0..10 {
        let z = random::complex_point(rng, 2, 1.5);
        let (a, b) = (lhs.eval(&z), rhs.eval(&z));
        group.push((a - b).norm() / (1.0 + b.norm()));
    }
    let ctx = d41()?;
    let z = random::complex_point(rng, 1, 1.0);
    let m0 = multiplier(&ctx, &DVector::zeros(1), &z);
    let m1 = multiplier(&ctx, &DVector::from_vec(vec![1.0]), &CVector::zeros(1)).re;

    let xs = DVector::from_vec(vec![0.7]);
    let mut unitary = vec![];
    let rule = fock_rule(&ctx, opts.nodes)?;
    for f in [HolomorphicFunction::one(1), HolomorphicFunction::monomial(&[1])] {
        let tf = translate(&ctx, &xs, &f)?;
        let a = inner_product_fa(&ctx, &tf, &tf, &rule)?.re.sqrt();
        let b = inner_product_fa(&ctx, &f, &f, &rule)?.re.sqrt();
        unitary.push((a - b).abs());
    }
    let rot = rotated_d41()?;
    let rule = fock_rule(&rot, opts.nodes)?;
    let one = HolomorphicFunction::one(1);
    let t1 = translate(&rot, &xs, &one)?;
    let change = (inner_product_fa(&rot, &t1, &t1, &rule)?.re.sqrt() - 1.0).abs();
    Ok(vec![
        worst("multiplier.cocycle", cocycle, 1e-12),
        worst("multiplier.modulus", modulus, 1e-12),
        worst("translation.group_law", group, 1e-12),
        Check::new("multiplier.at_zero", m0.re, 1.0, (m0 - Complex64::new(1.0, 0.0)).norm(), 0.0),
        Check::relative("multiplier.golden_d41", m1, (-2.0f64).exp(), 1e-14),
        worst("translation.unitary_real_preserving", unitary, 1e-6),
        Check::new("translation.norm_change_non_real_preserving", change, 1e-3, if change > 1e-3 { 0.0 } else { 1.0 }, 0.0),
    ])
}

fn restriction_checks(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut inter = vec![];
    let mut rr = vec![];
    let mut sq = vec![];
    for i in 0..6 {
        let n = 1 + i % 2;
        let ctx = build_context(&random::real_preserving_operator(rng, n))?;
        let y = random::real_point(rng, n, 1.0);
        for alpha in monomials(n, 2) {
            let f = HolomorphicFunction::monomial(&alpha);
            let lhs = restrict(&ctx, &translate(&ctx, &y, &f)?)?;
            let rhs = restrict(&ctx, &f)?.shift(&y);
            for _ in 0..5 {
                let x = random::real_point(rng, n, 2.0);
                let (a, b) = (lhs.eval(x.as_slice()), rhs.eval(x.as_slice()));
                inter.push((a - b).norm() / (1.0 + b.norm()));
            }
        }
        for h in real_test_functions(n) {
            let direct = rr_star(&ctx, &h, opts.nodes)?;
            let composed = restrict(&ctx, &restrict_adjoint(&ctx, &h)?)?;
            let half = abs_r_star(&ctx, &h, opts.nodes)?;
            let twice = abs_r_star(&ctx, &half, opts.nodes)?;
            for _ in 0..4 {
                let x = random::real_point(rng, n, 1.5);
                let a = direct.eval(x.as_slice());
                rr.push((a - composed.eval(x.as_slice())).norm() / (1.0 + a.norm()));
                sq.push((a - twice.eval(x.as_slice())).norm() / (1.0 + a.norm()));
            }
        }
    }
    // R* closed form vs quadrature
    let ctx = d41()?;
    let h = GaussianDensity::new(h_on_real(&ctx))?.function();
    let closed = restrict_adjoint(&ctx, &h)?.eval(&CVector::zeros(1));
    let rule = QuadratureRule::new(1, opts.nodes, 2.0 * h_on_real(&ctx))?;
    let quad = restrict_adjoint_quadrature(&ctx, &h, &CVector::zeros(1), &rule)?;
    let mut dual = vec![];
    for _ in 0..5 {
        let z = random::complex_point(rng, 1, 1.0);
        let g = RealDomainFunction::hermite_function(&[2]);
        let a = restrict_adjoint(&ctx, &g)?.eval(&z);
        let rule = QuadratureRule::new(1, opts.nodes, DMatrix::from_element(1, 1, 1.0) + h_on_real(&ctx))?;
        dual.push(rel(a, restrict_adjoint_quadrature(&ctx, &g, &z, &rule)?));
    }
    let zero = restrict_adjoint(&ctx, &RealDomainFunction::zero(1))?.eval(&pt(&[(0.3, 0.2)])).norm();

    // A = I: RR*g = g ∗ p₁ and R*g = (2π)^{n/4} e^{z·z/2} (g ∗ p)(z)
    let id = identity(1)?;
    let g = RealDomainFunction::hermite_function(&[1]);
    let p1 = GaussianDensity::new(DMatrix::identity(1, 1))?;
    let conv = gaussian_convolve(&p1, &g, opts.nodes)?;
    let rr_id = rr_star(&id, &g, opts.nodes)?;
    let adj = restrict_adjoint(&id, &g)?;
    let mut classical = vec![];
    for _ in 0..5 {
        let x = random::real_point(rng, 1, 1.5);
        classical.push((rr_id.eval(x.as_slice()) - conv.eval(x.as_slice())).norm());
        let z = random::complex_point(rng, 1, 1.0);
        let expect = (2.0 * std::f64::consts::PI).powf(0.25) * (0.5 * z[0] * z[0]).exp() * conv.eval_complex(z.as_slice())?;
        classical.push(rel(adj.eval(&z), expect));
    }
    let one = RealDomainFunction::constant(1, Complex64::new(1.0, 0.0));
    let abs_one = abs_r_star(&ctx, &one, opts.nodes)?.eval(&[0.37]);

    // W
    let rot = rotated_d41()?;
    let mut w_res = vec![];
    let mut modulus = vec![];
    let h = RealDomainFunction::hermite_function(&[1]);
    for _ in 0..10 {
        let x = random::real_point(rng, 1, 2.0);
        let direct = Complex64::new(0.0, herm(&x.map(|v| Complex64::new(v, 0.0)), &rot.a().apply(&x.map(|v| Complex64::new(v, 0.0)))).im).exp();
        w_res.push((w_phase(&rot, x.as_slice()) - direct).norm());
        modulus.push((w_operator(&rot, &h, x.as_slice()).norm() - h.eval(x.as_slice()).norm()).abs());
        w_res.push((w_phase(&ctx, x.as_slice()) - Complex64::new(1.0, 0.0)).norm());
    }
    Ok(vec![
        worst("restriction.intertwining", inter, 1e-12),
        worst("restriction.rr_star_factorization", rr, 1e-6),
        worst("restriction.abs_r_star_squared", sq, 1e-6),
        Check::new("restriction.adjoint_dual_path_golden", closed.re, quad.re, rel(closed, quad), 1e-8),
        worst("restriction.adjoint_dual_path", dual, 1e-6),
        Check::new("restriction.adjoint_of_zero", zero, 0.0, zero, 0.0),
        worst("restriction.classical_reduction", classical, 1e-12),
        Check::new("restriction.abs_r_star_one", abs_one.re, 1.0, (abs_one - Complex64::new(1.0, 0.0)).norm(), 1e-12),
        worst("w.phase", w_res, 1e-13),
        worst("w.modulus", modulus, 1e-15),
    ])
}

fn real_test_functions(n: usize) -> Vec<RealDomainFunction> {
    let mut out = vec![RealDomainFunction::hermite_function(&vec![0; n])];
    let mut a = vec![0; n];
    a[0] = 1;
    out.push(RealDomainFunction::hermite_function(&a));
    a[n - 1] += 1;
    out.push(RealDomainFunction::hermite_function(&a).scale(Complex64::new(0.5, -0.5)));
    out.push(RealDomainFunction::gauss_poly(
        Polynomial::one(n),
        &(DMatrix::identity(n, n) * 1.7),
        CVector::from_element(n, Complex64::new(0.3, -0.2)),
        Complex64::new(0.0, 0.0),
    ));
    out
}

fn semigroup_checks(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let p = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
    let golden = convolve_semigroup(&p, 1.0, 1.0, &[0.3, -0.2])?;
    let mut res = vec![];
    let mut mass = vec![];
    for i in 0..20 {
        let n = 1 + i % 3;
        let p = random::spd(rng, n, 0.3, 4.0);
        let t = rand::Rng::random_range(rng, 0.1..2.0);
        let s = rand::Rng::random_range(rng, 0.1..2.0);
        let x = random::real_point(rng, n, 1.0);
        res.push(convolve_semigroup(&p, t, s, x.as_slice())?.residual);
        mass.push((GaussianDensity::at_time(&p, t)?.total_mass()? - 1.0).abs());
    }
    let v = gauss_density(&DMatrix::identity(1, 1), 1.0, &[0.0])?;
    Ok(vec![
        Check::new("semigroup.golden", golden.lhs, golden.rhs, golden.residual, 1e-12),
        worst("semigroup.random", res, 1e-12),
        worst("semigroup.unit_mass", mass, 1e-12),
        Check::relative("semigroup.heat_kernel_at_zero", v, (2.0 * std::f64::consts::PI).powf(-0.5), 1e-15),
    ])
}

fn bargmann_checks(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let id = identity(1)?;
    let fs = real_test_functions(1);
    let mut reduce = vec![];
    for f in &fs {
        let u = classical_bargmann(f)?;
        let ua = generalized_bargmann(&id, f)?;
        for z in [(0.0, 0.0), (0.5, 0.5), (-1.0, 0.3), (1.2, -0.7), (0.1, 2.0)] {
            let z = pt(&[z]);
            let (a, b) = (u.eval(&z), ua.eval(&z));
            reduce.push((a - b).norm() / (1.0 + a.norm()));
        }
    }
    let g0 = RealDomainFunction::gauss_poly(
        Polynomial::one(1),
        &DMatrix::from_element(1, 1, 2.0),
        CVector::zeros(1),
        Complex64::new(0.25 * (2.0 / std::f64::consts::PI).ln(), 0.0),
    );
    let ug0 = classical_bargmann(&g0)?;
    let mut ground = vec![];
    for _ in 0..5 {
        let z = random::complex_point(rng, 1, 2.0);
        ground.push((ug0.eval(&z) - Complex64::new(1.0, 0.0)).norm());
    }

    // U by quadrature on both sides
    let rule_v = fock_rule(&id, opts.nodes)?;
    let rule_r = QuadratureRule::standard(1, opts.nodes)?;
    let us: Vec<_> = fs.iter().map(classical_bargmann).collect::<Result<_>>()?;
    let mut gram_u = vec![];
    for i in 0..fs.len() {
        for j in 0..fs.len() {
            let a = l2_inner_quadrature(&fs[i], &fs[j], &rule_r)?;
            let b = inner_product_fa(&id, &us[i], &us[j], &rule_v)?;
            gram_u.push((a - b).norm());
        }
    }
    // U_A, closed form on both sides, plus the polarization U_A |R*| = R*
    let mut gram_ua = vec![];
    let mut polar = vec![];
    for n in 1..=2 {
        let ctx = build_context(&random::real_preserving_operator(rng, n))?;
        let fs = real_test_functions(n);
        let ua: Vec<_> = fs.iter().map(|f| generalized_bargmann(&ctx, f)).collect::<Result<_>>()?;
        for i in 0..fs.len() {
            for j in 0..fs.len() {
                let a = l2_inner(&fs[i], &fs[j])?;
                let b = kernel::inner_product_fa_exact(&ctx, &ua[i], &ua[j])?;
                gram_ua.push((a - b).norm());
            }
            let lhs = generalized_bargmann(&ctx, &abs_r_star(&ctx, &fs[i], opts.nodes)?)?;
            let rhs = restrict_adjoint(&ctx, &fs[i])?;
            for _ in 0..3 {
                let x = random::real_point(rng, n, 1.0).map(|v| Complex64::new(v, 0.0));
                let b = rhs.eval(&x);
                polar.push((lhs.eval(&x) - b).norm() / (1.0 + b.norm()));
            }
        }
    }
    let rot = rotated_d41()?;
    let guard = generalized_bargmann(&rot, &g0).err().map(|e| e.kind());
    Ok(vec![
        worst("bargmann.generalized_reduces_to_classical", reduce, 1e-10),
        worst("bargmann.classical_ground_state", ground, 1e-8),
        worst("bargmann.classical_unitary_quadrature", gram_u, 1e-6),
        worst("bargmann.generalized_unitary", gram_ua, 1e-6),
        worst("bargmann.generalized_polarizes_adjoint", polar, 1e-10),
        Check::holds("bargmann.generalized_requires_real_form", guard == Some("requires_real_form")),
    ])
}

fn gaussian_checks(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (mut coh, mut integral, mut gram, mut unitary) = (vec![], vec![], vec![], vec![]);
    let mut ctxs = vec![d41()?];
    for n in 1..=2 {
        ctxs.push(build_context(&random::real_preserving_operator(rng, n))?);
    }
    for ctx in &ctxs {
        let n = ctx.n();
        let rf = ctx.require_real_form()?;
        let w = random::complex_point(rng, n, 1.0);
        let z = random::complex_point(rng, n, 1.0);
        let cw = coherent_state_function(ctx, &w)?;
        let wbar = w.map(|v| v.conj());
        coh.push(rel(gaussian_bargmann(ctx, &cw)?.eval(&z), kernel_eval(ctx, &z, &wbar)?));

        let rule = QuadratureRule::new(n, opts.nodes_for(2 * n), 2.0 * &rf.t - &rf.s)?;
        integral.push(rel(kernel_integral_quadrature(ctx, &z, &w, &rule)?, kernel_eval(ctx, &z, &w)?));

        let rho_s = rho(ctx, RhoKind::S)?;
        let pts: Vec<CVector> = (0..3).map(|_| random::complex_point(rng, n, 1.0)).collect();
        let cs: Vec<_> = pts.iter().map(|p| coherent_state_function(ctx, p)).collect::<Result<_>>()?;
        for a in 0..pts.len() {
            for b in 0..pts.len() {
                let k = kernel_eval(ctx, &pts[a], &pts[b])?;
                gram.push(rel(l2_inner_weighted(&cs[a], &cs[b], &rho_s)?, k));
                let weighted = cs[a].mul_exp(&rho_s.exp_quadratic());
                gram.push(rel(l2_inner_quadrature(&weighted, &cs[b], &rule)?, k));
            }
        }

        let fs = real_test_functions(n);
        let sa: Vec<_> = fs.iter().map(|f| gaussian_bargmann(ctx, f)).collect::<Result<_>>()?;
        for i in 0..fs.len() {
            for j in 0..fs.len() {
                let a = l2_inner_weighted(&fs[i], &fs[j], &rho_s)?;
                let b = kernel::inner_product_fa_exact(ctx, &sa[i], &sa[j])?;
                unitary.push((a - b).norm());
            }
        }
    }
    let ctx = d41()?;
    let c00 = coherent_state(&ctx, &[0.0], &CVector::zeros(1))?.re;
    let c0 = coherent_state_function(&ctx, &CVector::zeros(1))?;
    let rho_s = rho(&ctx, RhoKind::S)?;
    let rf = ctx.require_real_form()?;
    let rule = QuadratureRule::new(1, opts.nodes, 2.0 * &rf.t - &rf.s)?;
    let norm_q = l2_inner_quadrature(&c0.mul_exp(&rho_s.exp_quadratic()), &c0, &rule)?.re;
    let one = RealDomainFunction::constant(1, Complex64::new(1.0, 0.0));
    let s1 = gaussian_bargmann(&ctx, &one)?.eval(&pt(&[(0.8, 0.0)]));
    Ok(vec![
        worst("gaussian.transform_of_coherent_state", coh, 1e-8),
        worst("gaussian.kernel_integral_quadrature", integral, 1e-6),
        worst("gaussian.coherent_gram", gram, 1e-6),
        worst("gaussian.unitary", unitary, 1e-6),
        Check::new("gaussian.golden_c00", c00, 0.790_569, (c00 - 0.790_569).abs(), 1e-6),
        Check::new("gaussian.golden_coherent_norm", norm_q, 1.25, (norm_q - 1.25).abs(), 1e-6),
        Check::new("gaussian.transform_of_one", s1.re, 1.0, (s1 - Complex64::new(1.0, 0.0)).norm(), 1e-12),
    ])
}

fn quadrature_checks(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let k = opts.nodes;
    let rule = QuadratureRule::standard(1, k)?;
    let mut exact = vec![];
    let max_deg = (2 * k - 1).min(40);
    let mut moment = 1.0;
    for d in 0..=max_deg {
        let v = rule.integrate(|x| Complex64::new(x[0].powi(d as i32), 0.0))?;
        let expect = if d % 2 == 1 { 0.0 } else { moment };
        exact.push((v.re - expect).abs() / expect.max(1.0));
        if d % 2 == 1 {
            // E[x^{d+1}] = d · E[x^{d−1}]
            moment *= d as f64;
        }
    }
    let p = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
    let r2 = QuadratureRule::new(2, k.min(40), p.clone())?;
    let mass = r2.integrate(|_| Complex64::new(1.0, 0.0))?.re;
    let mixed = r2.integrate(|x| Complex64::new(x[0] * x[0] * x[1] * x[1], 0.0))?.re;

    // scaling covariance: ∫ g dx via precision P equals det(P)^{-1/2} ∫ g(P^{-1/2}u) du via precision I
    let pm = random::spd(rng, 2, 0.5, 3.0);
    let g = |x: &[f64]| Complex64::new((-(x[0] * x[0] + 0.5 * x[1] * x[1] + 0.3 * x[0] * x[1])).exp() * (1.0 + x[0] * x[1]), 0.0);
    let a = QuadratureRule::new(2, k.min(40), pm.clone())?.integrate_lebesgue(g)?;
    let ih = linalg::inv_sqrt_spd(&pm)?;
    let det = linalg::log_det_spd(&pm)?.exp();
    let b = QuadratureRule::standard(2, k.min(40))?.integrate_lebesgue(|u| {
        let x = &ih * DVector::from_column_slice(u);
        g(x.as_slice())
    })? / det.sqrt();

    // Monte Carlo
    let one = mc_integrate(opts.seed, opts.mc_samples, &DMatrix::identity(1, 1), |_| Complex64::new(1.0, 0.0))?;
    let sq = mc_integrate(opts.seed, opts.mc_samples, &DMatrix::identity(1, 1), |x| Complex64::new(x[0] * x[0], 0.0))?;
    let quartic = |x: &[f64]| Complex64::new(x[0].powi(4) + x[0] * x[0] * x[1] * x[1] - x[1], 0.0);
    let mc = mc_integrate(opts.seed, opts.mc_samples, &p, quartic)?;
    let tensor = r2.integrate(quartic)?;
    let mc_dev = |e: Complex64, target: f64, se: f64| (e.re - target).abs() / (3.0 * se).max(f64::MIN_POSITIVE);
    Ok(vec![
        worst("quadrature.polynomial_exactness", exact, 1e-12),
        Check::relative("quadrature.scaled_mass", mass, 1.0, 1e-13),
        Check::relative("quadrature.scaled_mixed_moment", mixed, 0.25, 1e-13),
        Check::new("quadrature.scaling_covariance", a.re, b.re, rel(a, b), 1e-12),
        Check::new("mc.constant", one.estimate.re, 1.0, (one.estimate.re - 1.0).abs() + one.std_error, 1e-15),
        Check::new("mc.second_moment_within_3se", sq.estimate.re, 1.0, mc_dev(sq.estimate, 1.0, sq.std_error), 1.0),
        Check::new("mc.matches_tensor_within_3se", mc.estimate.re, tensor.re, mc_dev(mc.estimate, tensor.re, mc.std_error), 1.0),
    ])
}

fn truncation_checks(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let rep = ca_sequence(&TruncationSpec::constant(4.0, 1.0, 20)?);
    let dh: Vec<f64> = rep
        .inv_ca()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let expect = 1.25f64.powf((i + 1) as f64 / 2.0);
            (v - expect).abs() / expect
        })
        .collect();
    let mut verdicts = true;
    for (r, t) in [(1.0, 1.0), (2.0, 2.0), (4.0, 1.0), (1.0, 3.0), (1.001, 1.0)] {
        let v = ca_sequence(&TruncationSpec::constant(r, t, 200)?).verdict;
        verdicts &= v.bounded == (r == t);
    }
    let mut explicit = vec![];
    let mut factors = true;
    for n in 1..=10 {
        let r: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(rng, 0.2..5.0)).collect();
        let t: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(rng, 0.2..5.0)).collect();
        factors &= r.iter().zip(&t).all(|(a, b)| log_factor(*a, *b) >= 0.0);
        let seq = ca_sequence(&TruncationSpec::new(r.clone(), t.clone(), n)?);
        let ctx = build_context(&RealLinearMap::block_diag(
            &DMatrix::from_diagonal(&DVector::from_vec(r)),
            &DMatrix::from_diagonal(&DVector::from_vec(t)),
        )?)?;
        let ca = (-seq.log_inv_ca[n - 1]).exp();
        explicit.push((ca - ctx.c_a()).abs() / ctx.c_a());
    }
    let pert = ca_sequence(&TruncationSpec::perturbation(1.0, 1.0, 2.0, 10_000)?);
    let tail = pert.verdict.tail_bound.unwrap_or(f64::INFINITY);
    let monotone = pert.log_inv_ca.windows(2).all(|w| w[1] >= w[0]);
    let closed = driver_hall(4.0, 1.0, 20);
    Ok(vec![
        worst("truncation.driver_hall", dh, 1e-12),
        Check::relative("truncation.driver_hall_closed_form", closed, 1.25f64.powi(10), 1e-12),
        Check::holds("truncation.constant_verdicts", verdicts),
        worst("truncation.matches_operator_core", explicit, 1e-12),
        Check::holds("truncation.factors_at_least_one", factors),
        Check::new("truncation.perturbation_tail", tail, 0.0, tail, 1e-3)
            .with_note(format!("heuristic verdict: bounded = {}", pert.verdict.bounded)),
        Check::holds("truncation.monotone", monotone),
    ])
}
