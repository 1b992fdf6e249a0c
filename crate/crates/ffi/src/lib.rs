//! C ABI over `fock-core`.
//!
//! Operators live behind an opaque `FockContext` handle. Every fallible call
//! returns a `FockStatus`; on failure the message is available from
//! `fock_last_error_message` on the same thread. Complex points are passed as
//! 2n doubles, real parts first, then imaginary parts. Matrices are row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fock_core::kernel;
use fock_core::transforms::coherent_state;
use fock_core::truncation::{ca_sequence, TruncationSpec};
use fock_core::verify::{run_suite, VerifyOptions};
use fock_core::{build_context, FockError, OperatorContext, RealLinearMap, SpaceContext};
use nalgebra::DMatrix;

/// Opaque operator context.
pub struct FockContext {
    inner: OperatorContext,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    NotSymmetric = 3,
    NotPositiveDefinite = 4,
    NumericalBreakdown = 5,
    Range = 6,
    Divergent = 7,
    RequiresRealForm = 8,
    UnsupportedForm = 9,
    QuadratureBudget = 10,
    NonFinite = 11,
    InvalidInput = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FockComplex {
    pub re: f64,
    pub im: f64,
}

impl From<&FockError> for FockStatus {
    fn from(e: &FockError) -> Self {
        match e {
            FockError::DimensionMismatch { .. } => FockStatus::DimensionMismatch,
            FockError::NotSymmetric { .. } => FockStatus::NotSymmetric,
            FockError::NotPositiveDefinite { .. } => FockStatus::NotPositiveDefinite,
            FockError::NumericalBreakdown(_) => FockStatus::NumericalBreakdown,
            FockError::Range { .. } => FockStatus::Range,
            FockError::Divergent(_) => FockStatus::Divergent,
            FockError::RequiresRealForm => FockStatus::RequiresRealForm,
            FockError::UnsupportedForm(_) => FockStatus::UnsupportedForm,
            FockError::QuadratureBudget { .. } => FockStatus::QuadratureBudget,
            FockError::NonFinite { .. } => FockStatus::NonFinite,
            FockError::InvalidInput(_) => FockStatus::InvalidInput,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Core(FockError),
}

impl From<FockError> for Failure {
    fn from(e: FockError) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's last message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FockStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FockStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            FockStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(format!("{}: {e}", e.kind()));
            FockStatus::from(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FockStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn context<'a>(ctx: *const FockContext) -> Result<&'a OperatorContext, Failure> {
    ctx.as_ref().map(|c| &c.inner).ok_or(Failure::Null("ctx"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or(Failure::Null(what))
}

fn square(d: usize) -> Result<usize, Failure> {
    d.checked_mul(d).ok_or_else(|| FockError::InvalidInput(format!("dimension {d} too large")).into())
}

fn matrix(d: usize, rows: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(d, d, rows)
}

unsafe fn point(ctx: &OperatorContext, p: *const f64, what: &'static str) -> Result<fock_core::CVector, Failure> {
    let n = ctx.n();
    Ok(ctx.space().point_from_slice(slice(p, 2 * n, what)?)?)
}

unsafe fn emit_context(a: Result<RealLinearMap, FockError>, out: *mut *mut FockContext) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let inner = build_context(&a?)?;
    out.write(Box::into_raw(Box::new(FockContext { inner })));
    Ok(())
}

/// Builds a context from the 2n×2n row-major matrix of A in the (x, y) basis.
///
/// # Safety
/// `a` must point to 4n² doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_context_new(n: usize, a: *const f64, out: *mut *mut FockContext) -> FockStatus {
    guard(|| {
        let space = SpaceContext::new(n)?;
        let d = n.checked_mul(2).ok_or_else(|| FockError::InvalidInput(format!("dimension {n} too large")))?;
        let m = matrix(d, slice(a, square(d)?, "a")?);
        emit_context(RealLinearMap::new(space, m), out)
    })
}

/// Builds a context for A = diag(R, T) from two n×n row-major blocks.
///
/// # Safety
/// `r` and `t` must each point to n² doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_context_from_blocks(
    n: usize,
    r: *const f64,
    t: *const f64,
    out: *mut *mut FockContext,
) -> FockStatus {
    guard(|| {
        SpaceContext::new(n)?;
        let r = matrix(n, slice(r, square(n)?, "r")?);
        let t = matrix(n, slice(t, square(n)?, "t")?);
        emit_context(RealLinearMap::block_diag(&r, &t), out)
    })
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must come from a constructor in this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fock_context_free(ctx: *mut FockContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Complex dimension n, or 0 for a null handle.
///
/// # Safety
/// `ctx` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fock_context_dim(ctx: *const FockContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.inner.n())
}

/// Whether A maps the real subspace into itself.
///
/// # Safety
/// `ctx` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fock_context_real_preserving(ctx: *const FockContext) -> bool {
    ctx.as_ref().is_some_and(|c| c.inner.real_preserving())
}

/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fock_c_a(ctx: *const FockContext, out: *mut f64) -> FockStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = context(ctx)?.c_a();
        Ok(())
    })
}

/// K_A(z, w).
///
/// # Safety
/// `z` and `w` must point to 2n doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_kernel(
    ctx: *const FockContext,
    z: *const f64,
    w: *const f64,
    out: *mut FockComplex,
) -> FockStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = context(ctx)?;
        let v = kernel::kernel_eval(c, &point(c, z, "z")?, &point(c, w, "w")?)?;
        *out = FockComplex { re: v.re, im: v.im };
        Ok(())
    })
}

/// Density of the Gaussian measure defining the space, at z.
///
/// # Safety
/// `z` must point to 2n doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_measure_density(ctx: *const FockContext, z: *const f64, out: *mut f64) -> FockStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = context(ctx)?;
        *out = kernel::measure_density(c, &point(c, z, "z")?);
        Ok(())
    })
}

/// Norm of the evaluation functional at z.
///
/// # Safety
/// `z` must point to 2n doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_eval_norm(ctx: *const FockContext, z: *const f64, out: *mut f64) -> FockStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = context(ctx)?;
        *out = kernel::eval_functional_norm(c, &point(c, z, "z")?)?;
        Ok(())
    })
}

/// Coherent state c(x, z) for real x ∈ ℝⁿ. Needs a real-preserving A.
///
/// # Safety
/// `x` must point to n doubles, `z` to 2n doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_coherent_state(
    ctx: *const FockContext,
    x: *const f64,
    z: *const f64,
    out: *mut FockComplex,
) -> FockStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = context(ctx)?;
        let x = slice(x, c.n(), "x")?;
        let v = coherent_state(c, x, &point(c, z, "z")?)?;
        *out = FockComplex { re: v.re, im: v.im };
        Ok(())
    })
}

/// log c_{A_k}⁻¹ for k = 1..len along diagonal truncations with entries r_k, t_k.
///
/// # Safety
/// `r`, `t` and `out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fock_truncation_log_inv_ca(
    r: *const f64,
    t: *const f64,
    len: usize,
    out: *mut f64,
) -> FockStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let spec = TruncationSpec::new(slice(r, len, "r")?.to_vec(), slice(t, len, "t")?.to_vec(), len)?;
        let rep = ca_sequence(&spec);
        ptr::copy_nonoverlapping(rep.log_inv_ca.as_ptr(), out, len);
        Ok(())
    })
}

/// Runs the verification suite. `nodes` = 0 selects the default rule size.
///
/// # Safety
/// `checks` and `failed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fock_verify(seed: u64, nodes: usize, checks: *mut usize, failed: *mut usize) -> FockStatus {
    guard(|| {
        let checks = out_ref(checks, "checks")?;
        let failed = out_ref(failed, "failed")?;
        let mut opts = VerifyOptions { seed, ..VerifyOptions::default() };
        if nodes > 0 {
            opts.nodes = nodes;
        }
        let all = run_suite(&opts);
        *checks = all.len();
        *failed = all.iter().filter(|c| !c.pass).count();
        Ok(())
    })
}

/// Message for the most recent failure on this thread; empty if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fock_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Stable snake_case name of a status code.
#[no_mangle]
pub extern "C" fn fock_status_name(status: FockStatus) -> *const c_char {
    let s: &'static std::ffi::CStr = match status {
        FockStatus::Ok => c"ok",
        FockStatus::NullPointer => c"null_pointer",
        FockStatus::DimensionMismatch => c"dimension_mismatch",
        FockStatus::NotSymmetric => c"not_symmetric",
        FockStatus::NotPositiveDefinite => c"not_positive_definite",
        FockStatus::NumericalBreakdown => c"numerical_breakdown",
        FockStatus::Range => c"range",
        FockStatus::Divergent => c"divergent",
        FockStatus::RequiresRealForm => c"requires_real_form",
        FockStatus::UnsupportedForm => c"unsupported_form",
        FockStatus::QuadratureBudget => c"quadrature_budget",
        FockStatus::NonFinite => c"non_finite",
        FockStatus::InvalidInput => c"invalid_input",
        FockStatus::Panic => c"panic",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn fock_version() -> *const c_char {
    const V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}
