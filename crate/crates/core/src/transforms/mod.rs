//! Transforms between L²(V_ℝ) and F_A.

pub mod bargmann;
pub mod real_function;
pub mod representation;

pub use bargmann::{
    classical_bargmann, classical_bargmann_quadrature, coherent_state, coherent_state_function, gaussian_bargmann,
    gaussian_bargmann_quadrature, generalized_bargmann, generalized_bargmann_quadrature, kernel_integral_quadrature, rho,
    RhoKind,
};
pub use real_function::{
    convolve_terms, gaussian_convolve, l2_inner, l2_inner_density, l2_inner_quadrature, l2_inner_weighted, GaussianDensity,
    RealDomainFunction,
};
pub use representation::{
    abs_r_star, convolve_semigroup, gauss_density, h_on_real, multiplier, restrict, restrict_adjoint,
    restrict_adjoint_quadrature, rr_star, translate, w_apply, w_operator, w_phase, SemigroupCheck,
};
