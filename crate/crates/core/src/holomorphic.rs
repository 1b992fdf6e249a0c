//! Symbolic holomorphic functions on ℂⁿ: polynomials, exponentials of
//! quadratics, and their sums and products.
//!
//! The class is closed under composition with complex-affine maps and under
//! multiplication by exponential-quadratics, which is all the transforms need.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::gaussian::{ExpQuadratic, GaussTerm};
use crate::poly::Polynomial;
use crate::space::{CMatrix, CVector};

#[derive(Debug, Clone, PartialEq)]
pub enum HolomorphicFunction {
    Polynomial(Polynomial),
    ExpQuadratic(ExpQuadratic),
    Sum(Vec<HolomorphicFunction>),
    Product(Polynomial, ExpQuadratic),
}

impl HolomorphicFunction {
    pub fn one(n: usize) -> Self {
        HolomorphicFunction::Polynomial(Polynomial::one(n))
    }

    /// z^α.
    pub fn monomial(alpha: &[u32]) -> Self {
        HolomorphicFunction::Polynomial(Polynomial::monomial(alpha, Complex64::new(1.0, 0.0)))
    }

    /// e_α(z) = z^α / √(α!), orthonormal in the classical Fock space.
    pub fn normalized_monomial(alpha: &[u32]) -> Self {
        let fact: f64 = alpha.iter().map(|&a| (1..=a).map(f64::from).product::<f64>()).product();
        HolomorphicFunction::Polynomial(Polynomial::monomial(alpha, Complex64::new(1.0 / fact.sqrt(), 0.0)))
    }

    pub fn from_term(t: GaussTerm) -> Self {
        HolomorphicFunction::Product(t.poly, t.exp)
    }

    pub fn from_terms(terms: Vec<GaussTerm>) -> Self {
        if terms.len() == 1 {
            return Self::from_term(terms.into_iter().next().unwrap());
        }
        HolomorphicFunction::Sum(terms.into_iter().map(Self::from_term).collect())
    }

    pub fn nvars(&self) -> usize {
        match self {
            HolomorphicFunction::Polynomial(p) => p.nvars(),
            HolomorphicFunction::ExpQuadratic(e) => e.nvars(),
            HolomorphicFunction::Sum(fs) => fs.first().map(|f| f.nvars()).unwrap_or(0),
            HolomorphicFunction::Product(p, _) => p.nvars(),
        }
    }

    /// Flatten into a list of polynomial × exponential-quadratic terms.
    pub fn terms(&self) -> Vec<GaussTerm> {
        match self {
            HolomorphicFunction::Polynomial(p) => vec![GaussTerm::new(p.clone(), ExpQuadratic::unit(p.nvars()))],
            HolomorphicFunction::ExpQuadratic(e) => vec![GaussTerm::new(Polynomial::one(e.nvars()), e.clone())],
            HolomorphicFunction::Sum(fs) => fs.iter().flat_map(|f| f.terms()).collect(),
            HolomorphicFunction::Product(p, e) => vec![GaussTerm::new(p.clone(), e.clone())],
        }
    }

    pub fn eval(&self, z: &CVector) -> Complex64 {
        self.eval_slice(z.as_slice())
    }

    pub fn eval_slice(&self, z: &[Complex64]) -> Complex64 {
        match self {
            HolomorphicFunction::Polynomial(p) => p.eval(z),
            HolomorphicFunction::ExpQuadratic(e) => e.eval(z),
            HolomorphicFunction::Sum(fs) => fs.iter().map(|f| f.eval_slice(z)).sum(),
            HolomorphicFunction::Product(p, e) => p.eval(z) * e.eval(z),
        }
    }

    /// F(Mz + s).
    pub fn compose_affine(&self, m: &CMatrix, s: &CVector) -> Self {
        match self {
            HolomorphicFunction::Polynomial(p) => HolomorphicFunction::Polynomial(p.compose_affine(m, s)),
            HolomorphicFunction::ExpQuadratic(e) => HolomorphicFunction::ExpQuadratic(e.compose_affine(m, s)),
            HolomorphicFunction::Sum(fs) => HolomorphicFunction::Sum(fs.iter().map(|f| f.compose_affine(m, s)).collect()),
            HolomorphicFunction::Product(p, e) => {
                HolomorphicFunction::Product(p.compose_affine(m, s), e.compose_affine(m, s))
            }
        }
    }

    pub fn compose_linear(&self, m: &CMatrix) -> Self {
        self.compose_affine(m, &CVector::zeros(m.nrows()))
    }

    pub fn mul_exp(&self, e: &ExpQuadratic) -> Self {
        match self {
            HolomorphicFunction::Polynomial(p) => HolomorphicFunction::Product(p.clone(), e.clone()),
            HolomorphicFunction::ExpQuadratic(f) => HolomorphicFunction::ExpQuadratic(f.mul(e)),
            HolomorphicFunction::Sum(fs) => HolomorphicFunction::Sum(fs.iter().map(|f| f.mul_exp(e)).collect()),
            HolomorphicFunction::Product(p, f) => HolomorphicFunction::Product(p.clone(), f.mul(e)),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            HolomorphicFunction::Polynomial(p) => HolomorphicFunction::Polynomial(p.scale(s)),
            HolomorphicFunction::ExpQuadratic(e) => HolomorphicFunction::Product(Polynomial::constant(e.nvars(), s), e.clone()),
            HolomorphicFunction::Sum(fs) => HolomorphicFunction::Sum(fs.iter().map(|f| f.scale(s)).collect()),
            HolomorphicFunction::Product(p, e) => HolomorphicFunction::Product(p.scale(s), e.clone()),
        }
    }

    /// Collapse to polynomial × exponential-quadratic when every term shares the
    /// same exponential part (within `tol`), absorbing e^γ into the polynomial
    /// and dropping exponential parts that are numerically trivial.
    pub fn simplify(&self, tol: f64) -> Result<(Polynomial, ExpQuadratic)> {
        let terms = self.terms();
        let first = terms.first().ok_or_else(|| FockError::UnsupportedForm("empty sum".into()))?;
        let n = first.nvars();
        let mut exp = first.exp.clone();
        exp.gamma = Complex64::new(0.0, 0.0);
        let mut poly = Polynomial::zero(n);
        for t in &terms {
            let mut e = t.exp.clone();
            let g = e.gamma;
            e.gamma = Complex64::new(0.0, 0.0);
            if e.max_diff(&exp) > tol {
                return Err(FockError::UnsupportedForm("terms have distinct exponential parts".into()));
            }
            poly = poly.add(&t.poly.scale(g.exp()));
        }
        if exp.max_diff(&ExpQuadratic::unit(n)) <= tol {
            exp = ExpQuadratic::unit(n);
        }
        Ok((poly, exp))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FunctionRepr::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let repr: FunctionRepr =
            serde_json::from_value(v.clone()).map_err(|e| FockError::InvalidInput(e.to_string()))?;
        repr.try_into()
    }
}

/// Complex number as {"re", "im"}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(c: Complex64) -> Self {
        ComplexRepr { re: c.re, im: c.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(c: ComplexRepr) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    alpha: Vec<u32>,
    coef: ComplexRepr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpRepr {
    #[serde(rename = "Q")]
    q: Vec<Vec<ComplexRepr>>,
    b: Vec<ComplexRepr>,
    gamma: ComplexRepr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FunctionRepr {
    Polynomial(PolyRepr),
    ExpQuadratic(ExpRepr),
    Sum { terms: Vec<FunctionRepr> },
    Product { polynomial: PolyRepr, exp_quadratic: ExpRepr },
}

impl From<&Polynomial> for PolyRepr {
    fn from(p: &Polynomial) -> Self {
        PolyRepr {
            n: p.nvars(),
            terms: p.terms().iter().map(|(a, c)| TermRepr { alpha: a.clone(), coef: (*c).into() }).collect(),
        }
    }
}

impl From<&ExpQuadratic> for ExpRepr {
    fn from(e: &ExpQuadratic) -> Self {
        let n = e.nvars();
        ExpRepr {
            q: (0..n).map(|i| (0..n).map(|j| e.q[(i, j)].into()).collect()).collect(),
            b: e.b.iter().map(|v| (*v).into()).collect(),
            gamma: e.gamma.into(),
        }
    }
}

impl From<&HolomorphicFunction> for FunctionRepr {
    fn from(f: &HolomorphicFunction) -> Self {
        match f {
            HolomorphicFunction::Polynomial(p) => FunctionRepr::Polynomial(p.into()),
            HolomorphicFunction::ExpQuadratic(e) => FunctionRepr::ExpQuadratic(e.into()),
            HolomorphicFunction::Sum(fs) => FunctionRepr::Sum { terms: fs.iter().map(Into::into).collect() },
            HolomorphicFunction::Product(p, e) => FunctionRepr::Product { polynomial: p.into(), exp_quadratic: e.into() },
        }
    }
}

impl TryFrom<PolyRepr> for Polynomial {
    type Error = FockError;
    fn try_from(r: PolyRepr) -> Result<Self> {
        if r.terms.iter().any(|t| t.alpha.len() != r.n) {
            return Err(FockError::InvalidInput("multi-index length differs from n".into()));
        }
        Ok(Polynomial::from_terms(r.n, r.terms.into_iter().map(|t| (t.alpha, t.coef.into()))))
    }
}

impl TryFrom<ExpRepr> for ExpQuadratic {
    type Error = FockError;
    fn try_from(r: ExpRepr) -> Result<Self> {
        let n = r.b.len();
        if r.q.len() != n || r.q.iter().any(|row| row.len() != n) {
            return Err(FockError::InvalidInput("Q must be n×n with n = len(b)".into()));
        }
        let q = CMatrix::from_fn(n, n, |i, j| r.q[i][j].into());
        let asym = (&q - q.transpose()).norm();
        if asym > 1e-12 * q.norm().max(1.0) {
            return Err(FockError::InvalidInput("Q must be symmetric".into()));
        }
        Ok(ExpQuadratic::new(q, CVector::from_iterator(n, r.b.into_iter().map(Into::into)), r.gamma.into()))
    }
}

impl TryFrom<FunctionRepr> for HolomorphicFunction {
    type Error = FockError;
    fn try_from(r: FunctionRepr) -> Result<Self> {
        Ok(match r {
            FunctionRepr::Polynomial(p) => HolomorphicFunction::Polynomial(p.try_into()?),
            FunctionRepr::ExpQuadratic(e) => HolomorphicFunction::ExpQuadratic(e.try_into()?),
            FunctionRepr::Sum { terms } => {
                let fs = terms.into_iter().map(TryInto::try_into).collect::<Result<Vec<HolomorphicFunction>>>()?;
                if fs.windows(2).any(|w| w[0].nvars() != w[1].nvars()) {
                    return Err(FockError::InvalidInput("sum terms differ in dimension".into()));
                }
                HolomorphicFunction::Sum(fs)
            }
            FunctionRepr::Product { polynomial, exp_quadratic } => {
                let p: Polynomial = polynomial.try_into()?;
                let e: ExpQuadratic = exp_quadratic.try_into()?;
                if p.nvars() != e.nvars() {
                    return Err(FockError::InvalidInput("product factors differ in dimension".into()));
                }
                HolomorphicFunction::Product(p, e)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> HolomorphicFunction {
        let e = ExpQuadratic::new(
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.1), c(0.2, 0.0), c(0.2, 0.0), c(-0.3, 0.4)]),
            CVector::from_vec(vec![c(1.0, -1.0), c(0.0, 0.5)]),
            c(0.1, 0.0),
        );
        HolomorphicFunction::Sum(vec![
            HolomorphicFunction::Product(Polynomial::monomial(&[1, 2], c(2.0, 0.0)), e.clone()),
            HolomorphicFunction::monomial(&[0, 1]),
            HolomorphicFunction::ExpQuadratic(e),
        ])
    }

    #[test]
    fn json_roundtrip_preserves_values() {
        let f = sample();
        let back = HolomorphicFunction::from_json(&f.to_json()).unwrap();
        let z = CVector::from_vec(vec![c(0.3, -0.2), c(-0.7, 0.4)]);
        assert_eq!(f.eval(&z), back.eval(&z));
        assert_eq!(f.to_json()["kind"], "sum");
    }

    #[test]
    fn json_rejects_unknown_kind() {
        let v = serde_json::json!({"kind": "spline", "terms": []});
        assert!(HolomorphicFunction::from_json(&v).is_err());
    }

    #[test]
    fn compose_affine_pointwise() {
        let f = sample();
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.0, -1.0), c(0.3, 0.0), c(2.0, 0.0)]);
        let s = CVector::from_vec(vec![c(0.1, 0.2), c(-0.4, 0.0)]);
        let g = f.compose_affine(&m, &s);
        let z = CVector::from_vec(vec![c(0.5, 0.5), c(-0.2, 0.1)]);
        let direct = f.eval(&(&m * &z + &s));
        assert!((g.eval(&z) - direct).norm() < 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn normalized_monomial_coefficient() {
        let f = HolomorphicFunction::normalized_monomial(&[2, 1]);
        let z = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((f.eval(&z) - c(1.0 / 2f64.sqrt(), 0.0)).norm() < 1e-15);
    }
}
