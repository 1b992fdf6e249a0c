//! Twisted Fock spaces F_A for a positive-definite real-linear operator A on ℂⁿ.
//!
//! Points z = x + iy ∈ ℂⁿ are identified with (x, y) ∈ ℝ²ⁿ throughout.

pub mod cli;
pub mod config;
pub mod error;
pub mod gaussian;
pub mod holomorphic;
pub mod kernel;
pub mod linalg;
pub mod operator;
pub mod poly;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod space;
pub mod transforms;
pub mod truncation;
pub mod verify;

pub use error::{FockError, Result};
pub use holomorphic::HolomorphicFunction;
pub use operator::{build_context, OperatorContext};
pub use quadrature::QuadratureRule;
pub use space::{CMatrix, CVector, RealLinearMap, SpaceContext};
