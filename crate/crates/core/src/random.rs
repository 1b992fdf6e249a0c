//! Seeded random test inputs: SPD operators, rotations, complex points.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::space::{CMatrix, CVector, RealLinearMap, SpaceContext};

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-ish orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn rotation<R: Rng>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, d, d).qr();
    let (q, r) = qr.unpack();
    let signs = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

/// QᵀΛQ with eigenvalues drawn uniformly from [lo, hi].
pub fn spd<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q = rotation(rng, d);
    let lambda = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| rng.random_range(lo..hi)));
    let m = q.transpose() * lambda * &q;
    0.5 * (&m + m.transpose())
}

pub fn symmetric<R: Rng>(rng: &mut R, d: usize, scale: f64) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, d, d);
    (&g + g.transpose()) * (0.5 * scale)
}

/// Random SPD operator on ℂⁿ with no structure.
pub fn spd_operator<R: Rng>(rng: &mut R, n: usize) -> RealLinearMap {
    RealLinearMap::new(SpaceContext::new(n).expect("n > 0"), spd(rng, 2 * n, 0.3, 4.0)).expect("dims")
}

/// Random A = d(R, T).
pub fn real_preserving_operator<R: Rng>(rng: &mut R, n: usize) -> RealLinearMap {
    RealLinearMap::block_diag(&spd(rng, n, 0.5, 3.0), &spd(rng, n, 0.5, 3.0)).expect("dims")
}

/// Random A whose complex-linear part is real symmetric but whose conjugate-linear
/// part K z = C z̄ has complex C, so A need not preserve V_ℝ.
pub fn real_h_operator<R: Rng>(rng: &mut R, n: usize) -> RealLinearMap {
    let ctx = SpaceContext::new(n).expect("n > 0");
    let h = spd(rng, n, 1.0, 3.0);
    let cr = symmetric(rng, n, 0.15);
    let ci = symmetric(rng, n, 0.15);
    let c = CMatrix::from_fn(n, n, |i, j| Complex64::new(cr[(i, j)], ci[(i, j)]));
    let hm = RealLinearMap::from_complex_linear(ctx, &h.map(|v| Complex64::new(v, 0.0)));
    hm.add(&RealLinearMap::from_conjugate_linear(ctx, &c))
}

pub fn complex_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> CVector {
    let v = CVector::from_fn(n, |_, _| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let r = radius * rng.random_range(0.0..1.0f64);
    v.scale(r / v.norm().max(f64::MIN_POSITIVE))
}

pub fn real_point<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| scale * rng.random_range(-1.0..1.0f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_operators_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let q = rotation(&mut rng, 2 * n);
            assert!((q.transpose() * &q - DMatrix::identity(2 * n, 2 * n)).norm() < 1e-13);
            assert!(crate::operator::build_context(&spd_operator(&mut rng, n)).is_ok());
            assert!(crate::operator::build_context(&real_preserving_operator(&mut rng, n)).unwrap().real_preserving());
            let ctx = crate::operator::build_context(&real_h_operator(&mut rng, n)).unwrap();
            assert!(ctx.h_preserves_real());
            assert!(complex_point(&mut rng, n, 1.0).norm() <= 1.0);
        }
    }
}
