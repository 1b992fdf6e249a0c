//! Functions on V_ℝ ≅ ℝⁿ: closed-form Gaussian-polynomial sums or black-box
//! evaluators, plus the normalized Gaussian densities φ_P.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::gaussian::{ExpQuadratic, GaussTerm};
use crate::linalg;
use crate::operator::STRUCTURE_TOL;
use crate::poly::Polynomial;
use crate::quadrature::QuadratureRule;
use crate::space::{to_cmatrix, to_cvector, CMatrix, CVector};

pub type RealEvaluator = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum RealDomainFunction {
    /// Σ pₖ(x) e^{½ xᵀQₖx + bₖ·x + γₖ}.
    GaussPoly { nvars: usize, terms: Vec<GaussTerm> },
    /// Quadrature-only evaluator.
    Callable { nvars: usize, f: RealEvaluator },
}

impl fmt::Debug for RealDomainFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealDomainFunction::GaussPoly { nvars, terms } => {
                f.debug_struct("GaussPoly").field("nvars", nvars).field("terms", terms).finish()
            }
            RealDomainFunction::Callable { nvars, .. } => f.debug_struct("Callable").field("nvars", nvars).finish(),
        }
    }
}

impl RealDomainFunction {
    pub fn zero(nvars: usize) -> Self {
        RealDomainFunction::GaussPoly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self::from_term(GaussTerm::new(Polynomial::constant(nvars, c), ExpQuadratic::unit(nvars)))
    }

    pub fn from_term(t: GaussTerm) -> Self {
        RealDomainFunction::GaussPoly { nvars: t.nvars(), terms: vec![t] }
    }

    pub fn from_terms(nvars: usize, terms: Vec<GaussTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.nvars() != nvars) {
            return Err(FockError::DimensionMismatch { expected: nvars, got: t.nvars() });
        }
        Ok(RealDomainFunction::GaussPoly { nvars, terms })
    }

    pub fn callable(nvars: usize, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        RealDomainFunction::Callable { nvars, f: Arc::new(f) }
    }

    /// p(x) e^{−½ xᵀPx + b·x + γ} with real P.
    pub fn gauss_poly(poly: Polynomial, p: &DMatrix<f64>, b: CVector, gamma: Complex64) -> Self {
        Self::from_term(GaussTerm::new(poly, ExpQuadratic::new(-to_cmatrix(p), b, gamma)))
    }

    /// Hermite function h_α(x) = (−1)^{|α|} (D^α e^{−‖x‖²}) e^{‖x‖²/2} = Π H_{αᵢ}(xᵢ) e^{−‖x‖²/2}.
    pub fn hermite_function(alpha: &[u32]) -> Self {
        let n = alpha.len();
        let mut poly = Polynomial::one(n);
        for (i, &k) in alpha.iter().enumerate() {
            poly = poly.mul(&hermite_polynomial(n, i, k));
        }
        Self::gauss_poly(poly, &DMatrix::identity(n, n), CVector::zeros(n), Complex64::new(0.0, 0.0))
    }

    pub fn nvars(&self) -> usize {
        match self {
            RealDomainFunction::GaussPoly { nvars, .. } | RealDomainFunction::Callable { nvars, .. } => *nvars,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, RealDomainFunction::GaussPoly { .. })
    }

    pub fn terms(&self) -> Result<&[GaussTerm]> {
        match self {
            RealDomainFunction::GaussPoly { terms, .. } => Ok(terms),
            RealDomainFunction::Callable { .. } => {
                Err(FockError::UnsupportedForm("closed form requested for a black-box function".into()))
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            RealDomainFunction::GaussPoly { terms, .. } => terms.iter().map(|t| t.eval_real(x)).sum(),
            RealDomainFunction::Callable { f, .. } => f(x),
        }
    }

    /// Holomorphic extension, available for closed forms only.
    pub fn eval_complex(&self, z: &[Complex64]) -> Result<Complex64> {
        Ok(self.terms()?.iter().map(|t| t.eval(z)).sum())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            RealDomainFunction::GaussPoly { nvars, terms } => {
                RealDomainFunction::GaussPoly { nvars: *nvars, terms: terms.iter().map(|t| t.scale(s)).collect() }
            }
            RealDomainFunction::Callable { nvars, f } => {
                let f = f.clone();
                Self::callable(*nvars, move |x| s * f(x))
            }
        }
    }

    pub fn add(&self, other: &RealDomainFunction) -> Result<Self> {
        if self.nvars() != other.nvars() {
            return Err(FockError::DimensionMismatch { expected: self.nvars(), got: other.nvars() });
        }
        match (self, other) {
            (RealDomainFunction::GaussPoly { nvars, terms: a }, RealDomainFunction::GaussPoly { terms: b, .. }) => {
                Ok(RealDomainFunction::GaussPoly { nvars: *nvars, terms: a.iter().chain(b).cloned().collect() })
            }
            _ => {
                let (f, g) = (self.clone(), other.clone());
                Ok(Self::callable(self.nvars(), move |x| f.eval(x) + g.eval(x)))
            }
        }
    }

    /// Pointwise product with e^{½ xᵀQx + b·x + γ}.
    pub fn mul_exp(&self, e: &ExpQuadratic) -> Self {
        match self {
            RealDomainFunction::GaussPoly { nvars, terms } => {
                RealDomainFunction::GaussPoly { nvars: *nvars, terms: terms.iter().map(|t| t.mul_exp(e)).collect() }
            }
            RealDomainFunction::Callable { nvars, f } => {
                let (f, e) = (f.clone(), e.clone());
                Self::callable(*nvars, move |x| {
                    let v: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
                    f(x) * e.eval(&v)
                })
            }
        }
    }

    /// x ↦ conj(h(x)).
    pub fn conj(&self) -> Self {
        match self {
            RealDomainFunction::GaussPoly { nvars, terms } => {
                RealDomainFunction::GaussPoly { nvars: *nvars, terms: terms.iter().map(|t| t.conj_coeffs()).collect() }
            }
            RealDomainFunction::Callable { nvars, f } => {
                let f = f.clone();
                Self::callable(*nvars, move |x| f(x).conj())
            }
        }
    }

    /// L_y h(x) = h(x − y).
    pub fn shift(&self, y: &DVector<f64>) -> Self {
        match self {
            RealDomainFunction::GaussPoly { nvars, terms } => {
                let id = CMatrix::identity(*nvars, *nvars);
                let s = -to_cvector(y);
                RealDomainFunction::GaussPoly { nvars: *nvars, terms: terms.iter().map(|t| t.compose_affine(&id, &s)).collect() }
            }
            RealDomainFunction::Callable { nvars, f } => {
                let (f, y) = (f.clone(), y.clone());
                Self::callable(*nvars, move |x| {
                    let shifted: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
                    f(&shifted)
                })
            }
        }
    }
}

/// Physicists' Hermite polynomial H_k in variable i of n.
fn hermite_polynomial(n: usize, i: usize, k: u32) -> Polynomial {
    let x = Polynomial::variable(n, i);
    let two_x = x.scale(Complex64::new(2.0, 0.0));
    let mut prev = Polynomial::one(n);
    if k == 0 {
        return prev;
    }
    let mut cur = two_x.clone();
    for j in 1..k {
        let next = two_x.mul(&cur).add(&prev.scale(Complex64::new(-2.0 * j as f64, 0.0)));
        prev = cur;
        cur = next;
    }
    cur
}

/// φ_P(x) = √det P (2π)^{−n/2} e^{−½ xᵀPx}.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDensity {
    p: DMatrix<f64>,
    log_norm: f64,
}

impl GaussianDensity {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        if !p.is_square() {
            return Err(FockError::DimensionMismatch { expected: p.nrows(), got: p.ncols() });
        }
        let scale = p.norm().max(f64::MIN_POSITIVE);
        let asym = (&p - p.transpose()).norm();
        if asym > STRUCTURE_TOL * scale {
            return Err(FockError::NotSymmetric { asymmetry: asym });
        }
        let min = linalg::min_eigenvalue(&p);
        if min <= linalg::SPD_EIGEN_FLOOR * scale {
            return Err(FockError::NotPositiveDefinite { min_eigenvalue: min });
        }
        let n = p.nrows() as f64;
        let log_norm = 0.5 * linalg::log_det_spd(&p)? - 0.5 * n * (2.0 * PI).ln();
        Ok(GaussianDensity { p, log_norm })
    }

    /// P(t) = P / t.
    pub fn at_time(p: &DMatrix<f64>, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(FockError::InvalidInput(format!("time parameter must be positive, got {t}")));
        }
        Self::new(p / t)
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn nvars(&self) -> usize {
        self.p.nrows()
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        (self.log_norm - 0.5 * v.dot(&(&self.p * &v))).exp()
    }

    /// Holomorphic extension e^{log_norm − ½ zᵀPz}.
    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        self.exp_quadratic().eval(z)
    }

    pub fn exp_quadratic(&self) -> ExpQuadratic {
        let n = self.nvars();
        ExpQuadratic::new(-to_cmatrix(&self.p), CVector::zeros(n), Complex64::new(self.log_norm, 0.0))
    }

    pub fn term(&self) -> GaussTerm {
        GaussTerm::new(Polynomial::one(self.nvars()), self.exp_quadratic())
    }

    pub fn function(&self) -> RealDomainFunction {
        RealDomainFunction::from_term(self.term())
    }

    /// ∫ φ_P dx in closed form.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.term().integrate_all()?.re)
    }

    /// Quadrature rule whose weight is this density.
    pub fn rule(&self, nodes: usize) -> Result<QuadratureRule> {
        QuadratureRule::new(self.nvars(), nodes, self.p.clone())
    }
}

/// (k ∗ h)(z) = ∫ k(z − y) h(y) dy for closed-form terms, as a term in z.
pub fn convolve_terms(k: &GaussTerm, h: &GaussTerm) -> Result<GaussTerm> {
    let n = k.nvars();
    if h.nvars() != n {
        return Err(FockError::DimensionMismatch { expected: n, got: h.nvars() });
    }
    let mut diff = CMatrix::zeros(n, 2 * n);
    for i in 0..n {
        diff[(i, i)] = Complex64::new(1.0, 0.0);
        diff[(i, n + i)] = Complex64::new(-1.0, 0.0);
    }
    let joint = k.compose_affine(&diff, &CVector::zeros(n)).mul(&h.embed(n, 2 * n));
    joint.integrate_trailing(n)
}

/// φ_P ∗ h. Closed form for GaussPoly; black boxes are integrated on demand
/// with a `nodes`-per-axis rule for φ_P.
pub fn gaussian_convolve(density: &GaussianDensity, h: &RealDomainFunction, nodes: usize) -> Result<RealDomainFunction> {
    if h.nvars() != density.nvars() {
        return Err(FockError::DimensionMismatch { expected: density.nvars(), got: h.nvars() });
    }
    match h {
        RealDomainFunction::GaussPoly { nvars, terms } => {
            let k = density.term();
            let out = terms.iter().map(|t| convolve_terms(&k, t)).collect::<Result<Vec<_>>>()?;
            Ok(RealDomainFunction::GaussPoly { nvars: *nvars, terms: out })
        }
        RealDomainFunction::Callable { nvars, f } => {
            let rule = density.rule(nodes)?;
            let f = f.clone();
            Ok(RealDomainFunction::callable(*nvars, move |x| {
                let mut buf = vec![0.0; x.len()];
                rule.integrate(|y| {
                    for i in 0..x.len() {
                        buf[i] = x[i] - y[i];
                    }
                    f(&buf)
                })
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            }))
        }
    }
}

/// Closed-form ∫ f conj(g) dx over ℝⁿ.
pub fn l2_inner(f: &RealDomainFunction, g: &RealDomainFunction) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in f.terms()? {
        for b in g.terms()? {
            acc += a.mul(&b.conj_coeffs()).integrate_all()?;
        }
    }
    Ok(acc)
}

/// Closed-form ∫ f conj(g) ρ dx.
pub fn l2_inner_weighted(f: &RealDomainFunction, g: &RealDomainFunction, weight: &GaussianDensity) -> Result<Complex64> {
    let fw = RealDomainFunction::GaussPoly {
        nvars: f.nvars(),
        terms: f.terms()?.iter().map(|t| t.mul(&weight.term())).collect(),
    };
    l2_inner(&fw, g)
}

/// Quadrature ∫ f conj(g) dx with an arbitrary rule on ℝⁿ.
pub fn l2_inner_quadrature(f: &RealDomainFunction, g: &RealDomainFunction, rule: &QuadratureRule) -> Result<Complex64> {
    if rule.dim() != f.nvars() || rule.dim() != g.nvars() {
        return Err(FockError::DimensionMismatch { expected: rule.dim(), got: f.nvars() });
    }
    rule.integrate_lebesgue(|x| f.eval(x) * g.eval(x).conj())
}

/// Quadrature ∫ f conj(g) ρ dx where the rule's weight is ρ itself.
pub fn l2_inner_density(f: &RealDomainFunction, g: &RealDomainFunction, rule: &QuadratureRule) -> Result<Complex64> {
    if rule.dim() != f.nvars() || rule.dim() != g.nvars() {
        return Err(FockError::DimensionMismatch { expected: rule.dim(), got: f.nvars() });
    }
    rule.integrate(|x| f.eval(x) * g.eval(x).conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_match_definition() {
        // h₂(x) = (4x² − 2) e^{−x²/2}
        let h = RealDomainFunction::hermite_function(&[2]);
        for x in [0.0f64, 0.7, -1.3] {
            let expect = (4.0 * x * x - 2.0) * (-x * x / 2.0).exp();
            assert!((h.eval(&[x]).re - expect).abs() < 1e-14);
        }
        // orthogonality ∫ h₀ h₁ = 0, ‖h₁‖² = 2√π
        let h0 = RealDomainFunction::hermite_function(&[0]);
        let h1 = RealDomainFunction::hermite_function(&[1]);
        assert!(l2_inner(&h0, &h1).unwrap().norm() < 1e-15);
        assert!((l2_inner(&h1, &h1).unwrap().re - 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn density_examples() {
        let d = GaussianDensity::new(DMatrix::identity(1, 1)).unwrap();
        assert!((d.eval(&[0.0]) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((d.total_mass().unwrap() - 1.0).abs() < 1e-14);
        let d = GaussianDensity::at_time(&DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])), 0.3).unwrap();
        assert!((d.total_mass().unwrap() - 1.0).abs() < 1e-14);
        assert!(GaussianDensity::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        assert!(GaussianDensity::at_time(&DMatrix::identity(1, 1), 0.0).is_err());
    }

    #[test]
    fn closed_form_and_quadrature_convolution_agree() {
        let d = GaussianDensity::new(DMatrix::from_element(1, 1, 2.0)).unwrap();
        let h = RealDomainFunction::hermite_function(&[2]);
        let closed = gaussian_convolve(&d, &h, 40).unwrap();
        let hb = h.clone();
        let black = RealDomainFunction::callable(1, move |x| hb.eval(x));
        let quad = gaussian_convolve(&d, &black, 40).unwrap();
        for x in [0.0, 0.4, -1.1] {
            assert!((closed.eval(&[x]) - quad.eval(&[x])).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_and_conj() {
        let h = RealDomainFunction::hermite_function(&[1]).scale(Complex64::new(0.0, 1.0));
        let y = DVector::from_vec(vec![0.5]);
        assert!((h.shift(&y).eval(&[0.8]) - h.eval(&[0.3])).norm() < 1e-15);
        assert!((h.conj().eval(&[0.8]) - h.eval(&[0.8]).conj()).norm() < 1e-15);
        let black = RealDomainFunction::callable(1, |x| Complex64::new(x[0], 0.0));
        assert!((black.shift(&y).eval(&[0.8]).re - 0.3).abs() < 1e-15);
        assert!(black.terms().is_err());
    }
}
