//! JSON run configuration for the `fock` binary.
//!
//! Every object rejects unknown keys, and all shape checks that depend on the
//! operator dimension run in [`EvalConfig::validate`] before any work starts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::holomorphic::HolomorphicFunction;
use crate::kernel::KernelSection;
use crate::operator::{build_context, OperatorContext};
use crate::poly::Polynomial;
use crate::space::{matrix_from_rows, CVector, RealLinearMap, SpaceContext};
use crate::transforms::{coherent_state_function, RealDomainFunction};
use crate::truncation::TruncationInput;
use crate::verify::{DEFAULT_MC_SAMPLES, DEFAULT_NODES, DEFAULT_SEED};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub operator: Option<OperatorInput>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub eval: Option<EvalConfig>,
    pub truncation: Option<TruncationInput>,
    /// Report path; the `--out` flag takes precedence.
    pub output: Option<String>,
    /// Shorthand for `quadrature.seed`.
    pub seed: Option<u64>,
}

/// `{"n", "A"}` with A row-major 2n×2n, or `{"n", "R", "T"}` with n×n blocks.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OperatorInput {
    Full(FullOperator),
    Blocks(BlockOperator),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullOperator {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockOperator {
    pub n: usize,
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
}

impl OperatorInput {
    pub fn n(&self) -> usize {
        match self {
            OperatorInput::Full(f) => f.n,
            OperatorInput::Blocks(b) => b.n,
        }
    }

    pub fn to_map(&self) -> Result<RealLinearMap> {
        let space = SpaceContext::new(self.n())?;
        match self {
            OperatorInput::Full(f) => RealLinearMap::new(space, matrix_from_rows(&f.a)?),
            OperatorInput::Blocks(b) => {
                let r = square(&b.r, b.n, "R")?;
                let t = square(&b.t, b.n, "T")?;
                RealLinearMap::block_diag(&r, &t)
            }
        }
    }

    pub fn build(&self) -> Result<OperatorContext> {
        build_context(&self.to_map()?)
    }
}

fn square(rows: &[Vec<f64>], n: usize, name: &str) -> Result<DMatrix<f64>> {
    let m = matrix_from_rows(rows)?;
    if m.nrows() != n || m.ncols() != n {
        return Err(FockError::InvalidInput(format!("{name} must be {n}×{n}, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub nodes: Option<usize>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
}

/// Resolved quadrature parameters after flags and defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureParams {
    pub nodes: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FockError::InvalidInput(format!("config: {e}")))
    }

    /// Flags override the config, which overrides the defaults.
    pub fn quadrature_params(&self, seed_flag: Option<u64>, nodes_flag: Option<usize>) -> QuadratureParams {
        QuadratureParams {
            nodes: nodes_flag.or(self.quadrature.nodes).unwrap_or(DEFAULT_NODES),
            mc_samples: self.quadrature.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES),
            seed: seed_flag.or(self.quadrature.seed).or(self.seed).unwrap_or(DEFAULT_SEED),
        }
    }

    pub fn require_operator(&self) -> Result<&OperatorInput> {
        self.operator.as_ref().ok_or_else(|| FockError::InvalidInput("config needs an \"operator\" section".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// K_A(z, w).
    Kernel,
    /// K_A(z, w) as a Gaussian integral over V_ℝ, by quadrature.
    KernelIntegral,
    /// dμ_A/dλ at z.
    MeasureDensity,
    /// ‖δ_z‖.
    EvalNorm,
    /// A holomorphic function at z.
    Function,
    /// ‖F‖_A by quadrature and in closed form.
    Norm,
    Psi,
    PsiStar,
    /// Classical U g at z.
    ClassicalBargmann,
    /// U_A f at z.
    Bargmann,
    /// S_A f at z.
    GaussianBargmann,
    /// c(x, z).
    CoherentState,
    /// m(x, z).
    Multiplier,
    /// R F at x.
    Restrict,
    /// R* h at z.
    RestrictAdjoint,
    /// RR* h at x.
    RrStar,
    /// |R*| h at x.
    AbsRStar,
}

impl Quantity {
    pub fn requires_real_form(self) -> bool {
        matches!(
            self,
            Quantity::KernelIntegral
                | Quantity::Bargmann
                | Quantity::GaussianBargmann
                | Quantity::CoherentState
                | Quantity::Restrict
                | Quantity::RestrictAdjoint
                | Quantity::RrStar
                | Quantity::AbsRStar
        )
    }

    pub fn needs_operator(self) -> bool {
        !matches!(self, Quantity::ClassicalBargmann)
    }

    fn needs(self) -> (bool, bool, bool, FunctionDomain) {
        use FunctionDomain::*;
        use Quantity::*;
        // (z, w, x, function)
        match self {
            Kernel | KernelIntegral => (true, true, false, NoFunction),
            MeasureDensity | EvalNorm => (true, false, false, NoFunction),
            Function | Psi | PsiStar => (true, false, false, Holomorphic),
            Norm => (false, false, false, Holomorphic),
            ClassicalBargmann | Bargmann | GaussianBargmann | RestrictAdjoint => (true, false, false, Real),
            CoherentState | Multiplier => (true, false, true, NoFunction),
            Restrict => (false, false, true, Holomorphic),
            RrStar | AbsRStar => (false, false, true, Real),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FunctionDomain {
    NoFunction,
    Holomorphic,
    Real,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub quantity: Quantity,
    #[serde(default)]
    pub points: Vec<EvalPoint>,
    pub function: Option<FunctionSelector>,
}

/// z and w as length-2n arrays (x-block then y-block); x as a length-n array.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalPoint {
    pub z: Option<Vec<f64>>,
    pub w: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSelector {
    /// Precision P of exp(−½ (x − c)ᵀ P (x − c)).
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub center: Option<Vec<f64>>,
}

/// Named test functions; any other object is read as a symbolic holomorphic function.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FunctionSelector {
    Hermite {
        hermite: Vec<u32>,
    },
    Gaussian {
        gaussian: GaussianSelector,
    },
    Coherent {
        coherent: Vec<f64>,
    },
    Constant {
        constant: f64,
    },
    Monomial {
        monomial: Vec<u32>,
    },
    KernelSection {
        kernel_section: Vec<f64>,
    },
    Symbolic(serde_json::Value),
}

pub fn complex_point(space: SpaceContext, xs: &[f64], name: &str) -> Result<CVector> {
    space
        .point_from_slice(xs)
        .map_err(|_| FockError::InvalidInput(format!("{name} must have length {}, got {}", space.real_dim(), xs.len())))
}

pub fn real_point(n: usize, xs: &[f64], name: &str) -> Result<Vec<f64>> {
    if xs.len() != n {
        return Err(FockError::InvalidInput(format!("{name} must have length {n}, got {}", xs.len())));
    }
    Ok(xs.to_vec())
}

impl FunctionSelector {
    pub fn holomorphic(&self, n: usize, ctx: Option<&OperatorContext>) -> Result<HolomorphicFunction> {
        let f = match self {
            FunctionSelector::Monomial { monomial } => HolomorphicFunction::monomial(monomial),
            FunctionSelector::Constant { constant } => {
                HolomorphicFunction::Polynomial(Polynomial::constant(n, Complex64::new(*constant, 0.0)))
            }
            FunctionSelector::KernelSection { kernel_section } => {
                let ctx = ctx.ok_or_else(|| FockError::InvalidInput("kernel_section needs an operator".into()))?;
                KernelSection::new(ctx, &complex_point(ctx.space(), kernel_section, "kernel_section")?).function
            }
            FunctionSelector::Symbolic(v) => HolomorphicFunction::from_json(v)?,
            _ => return Err(FockError::InvalidInput("selector names a function on V_ℝ, a holomorphic function is required".into())),
        };
        if f.nvars() != n {
            return Err(FockError::DimensionMismatch { expected: n, got: f.nvars() });
        }
        Ok(f)
    }

    pub fn real(&self, n: usize, ctx: Option<&OperatorContext>) -> Result<RealDomainFunction> {
        let f = match self {
            FunctionSelector::Hermite { hermite } => RealDomainFunction::hermite_function(hermite),
            FunctionSelector::Constant { constant } => RealDomainFunction::constant(n, Complex64::new(*constant, 0.0)),
            FunctionSelector::Gaussian { gaussian } => {
                let p = square(&gaussian.p, n, "P")?;
                let c = real_point(n, gaussian.center.as_deref().unwrap_or(&vec![0.0; n]), "center")?;
                let c = nalgebra::DVector::from_vec(c);
                let b = (&p * &c).map(|v| Complex64::new(v, 0.0));
                let gamma = Complex64::new(-0.5 * c.dot(&(&p * &c)), 0.0);
                RealDomainFunction::gauss_poly(Polynomial::one(n), &p, b, gamma)
            }
            FunctionSelector::Coherent { coherent } => {
                let ctx = ctx.ok_or_else(|| FockError::InvalidInput("coherent needs an operator".into()))?;
                coherent_state_function(ctx, &complex_point(ctx.space(), coherent, "coherent")?)?
            }
            _ => return Err(FockError::InvalidInput("selector names a holomorphic function, a function on V_ℝ is required".into())),
        };
        if f.nvars() != n {
            return Err(FockError::DimensionMismatch { expected: n, got: f.nvars() });
        }
        Ok(f)
    }
}

impl EvalConfig {
    /// Checks point shapes and the function selector against n.
    pub fn validate(&self, n: usize) -> Result<()> {
        let (needs_z, needs_w, needs_x, domain) = self.quantity.needs();
        let space = SpaceContext::new(n)?;
        for (i, p) in self.points.iter().enumerate() {
            for (needed, value, name) in [(needs_z, &p.z, "z"), (needs_w, &p.w, "w"), (needs_x, &p.x, "x")] {
                match (needed, value) {
                    (true, None) => return Err(FockError::InvalidInput(format!("point {i} is missing {name}"))),
                    (false, Some(_)) => {
                        return Err(FockError::InvalidInput(format!("point {i}: {name} is not used by {:?}", self.quantity)))
                    }
                    (true, Some(v)) if name == "x" => {
                        real_point(n, v, &format!("point {i} x"))?;
                    }
                    (true, Some(v)) => {
                        complex_point(space, v, &format!("point {i} {name}"))?;
                    }
                    _ => {}
                }
            }
        }
        if self.quantity != Quantity::Norm && self.points.is_empty() {
            return Err(FockError::InvalidInput("eval needs at least one point".into()));
        }
        match (domain, &self.function) {
            (FunctionDomain::NoFunction, Some(_)) => Err(FockError::InvalidInput(format!("{:?} takes no function", self.quantity))),
            (FunctionDomain::NoFunction, None) => Ok(()),
            (_, None) => Err(FockError::InvalidInput(format!("{:?} needs a function", self.quantity))),
            _ => Ok(()),
        }
    }
}
