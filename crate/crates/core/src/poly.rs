//! Multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::space::{CMatrix, CVector};

pub type MultiIndex = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(alpha: &[u32], c: Complex64) -> Self {
        let mut p = Self::zero(alpha.len());
        p.add_term(alpha.to_vec(), c);
        p
    }

    /// The i-th coordinate function.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut alpha = vec![0; nvars];
        alpha[i] = 1;
        Self::monomial(&alpha, Complex64::new(1.0, 0.0))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (alpha, c) in terms {
            assert_eq!(alpha.len(), nvars, "multi-index length must equal variable count");
            p.add_term(alpha, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(alpha).or_default();
        *entry += c;
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(alpha, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj_coeffs(&self) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(a, c)| (a.clone(), c.conj())).collect() }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars);
        let max_deg = self.terms.keys().flat_map(|a| a.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&v| {
                let mut p = Vec::with_capacity(max_deg + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=max_deg {
                    p.push(acc);
                    acc *= v;
                }
                p
            })
            .collect();
        self.terms
            .iter()
            .map(|(alpha, c)| {
                let mut m = *c;
                for (j, &e) in alpha.iter().enumerate() {
                    m *= powers[j][e as usize];
                }
                m
            })
            .sum()
    }

    /// p(M u + s) as a polynomial in u, where M is nvars × m.
    pub fn compose_affine(&self, m: &CMatrix, shift: &CVector) -> Polynomial {
        assert_eq!(m.nrows(), self.nvars);
        assert_eq!(shift.len(), self.nvars);
        let new_vars = m.ncols();
        let linear: Vec<Polynomial> = (0..self.nvars)
            .map(|j| {
                let mut p = Polynomial::constant(new_vars, shift[j]);
                for k in 0..new_vars {
                    let mut alpha = vec![0; new_vars];
                    alpha[k] = 1;
                    p.add_term(alpha, m[(j, k)]);
                }
                p
            })
            .collect();
        let mut cache: Vec<Vec<Polynomial>> = linear.iter().map(|l| vec![Polynomial::one(new_vars), l.clone()]).collect();
        let mut out = Polynomial::zero(new_vars);
        for (alpha, c) in &self.terms {
            let mut term = Polynomial::constant(new_vars, *c);
            for (j, &e) in alpha.iter().enumerate() {
                while cache[j].len() <= e as usize {
                    let next = cache[j].last().unwrap().mul(&linear[j]);
                    cache[j].push(next);
                }
                if e > 0 {
                    term = term.mul(&cache[j][e as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Re-index into `total` variables, placing ours at positions offset..offset+nvars.
    pub fn embed(&self, offset: usize, total: usize) -> Polynomial {
        assert!(offset + self.nvars <= total);
        Polynomial {
            nvars: total,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| {
                    let mut alpha = vec![0; total];
                    alpha[offset..offset + self.nvars].copy_from_slice(a);
                    (alpha, *c)
                })
                .collect(),
        }
    }

    /// Largest coefficient modulus of self − other.
    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        self.add(&other.scale(Complex64::new(-1.0, 0.0))).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients with modulus ≤ tol.
    pub fn prune(&self, tol: f64) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(a, c)| (a.clone(), *c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_and_mul() {
        // (1 + 2z₀)(z₁ − i) at (0.5, 2 + i)
        let p = Polynomial::from_terms(2, vec![(vec![0, 0], c(1.0, 0.0)), (vec![1, 0], c(2.0, 0.0))]);
        let q = Polynomial::from_terms(2, vec![(vec![0, 1], c(1.0, 0.0)), (vec![0, 0], c(0.0, -1.0))]);
        let z = [c(0.5, 0.0), c(2.0, 1.0)];
        let direct = (c(1.0, 0.0) + c(2.0, 0.0) * z[0]) * (z[1] - c(0.0, 1.0));
        assert!((p.mul(&q).eval(&z) - direct).norm() < 1e-15);
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let p = Polynomial::from_terms(
            2,
            vec![(vec![2, 1], c(1.0, 0.5)), (vec![0, 3], c(-2.0, 0.0)), (vec![1, 0], c(0.0, 1.0))],
        );
        let m = CMatrix::from_row_slice(2, 3, &[c(1.0, 0.0), c(0.5, 1.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(2.0, -1.0)]);
        let s = CVector::from_vec(vec![c(0.3, 0.0), c(0.0, -0.7)]);
        let q = p.compose_affine(&m, &s);
        let u = CVector::from_vec(vec![c(0.2, 0.1), c(-0.4, 0.3), c(1.1, 0.0)]);
        let mapped = &m * &u + &s;
        let lhs = q.eval(u.as_slice());
        let rhs = p.eval(mapped.as_slice());
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn embed_relabels() {
        let p = Polynomial::monomial(&[2], c(3.0, 0.0));
        let e = p.embed(1, 3);
        assert_eq!(e.coefficient(&[0, 2, 0]), c(3.0, 0.0));
    }
}
