use std::ffi::CStr;
use std::ptr;

use fock_ffi::*;

fn message() -> String {
    unsafe { CStr::from_ptr(fock_last_error_message()) }.to_string_lossy().into_owned()
}

struct Handle(*mut FockContext);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { fock_context_free(self.0) }
    }
}

fn d41() -> Handle {
    let mut ctx = ptr::null_mut();
    let a = [4.0, 0.0, 0.0, 1.0];
    assert_eq!(unsafe { fock_context_new(1, a.as_ptr(), &mut ctx) }, FockStatus::Ok);
    Handle(ctx)
}

#[test]
fn constant_and_kernel() {
    let h = d41();
    let mut c_a = 0.0;
    assert_eq!(unsafe { fock_c_a(h.0, &mut c_a) }, FockStatus::Ok);
    assert!((c_a.powi(-2) - 1.25).abs() < 1e-14);
    let one = [1.0, 0.0];
    let mut k = FockComplex::default();
    assert_eq!(unsafe { fock_kernel(h.0, one.as_ptr(), one.as_ptr(), &mut k) }, FockStatus::Ok);
    assert!((k.re - 68.2477).abs() < 1e-4);
    let mut norm = 0.0;
    assert_eq!(unsafe { fock_eval_norm(h.0, one.as_ptr(), &mut norm) }, FockStatus::Ok);
    assert!((norm * norm - k.re).abs() < 1e-10 * k.re);
    let mut density = 0.0;
    assert_eq!(unsafe { fock_measure_density(h.0, one.as_ptr(), &mut density) }, FockStatus::Ok);
    assert!(density > 0.0);
}

#[test]
fn blocks_match_full_matrix() {
    let (r, t) = ([4.0], [1.0]);
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { fock_context_from_blocks(1, r.as_ptr(), t.as_ptr(), &mut ctx) }, FockStatus::Ok);
    let blocks = Handle(ctx);
    let full = d41();
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        fock_c_a(blocks.0, &mut a);
        fock_c_a(full.0, &mut b);
        assert!(fock_context_real_preserving(blocks.0));
        assert_eq!(fock_context_dim(blocks.0), 1);
    }
    assert_eq!(a, b);
}

#[test]
fn coherent_state_golden_and_guard() {
    let h = d41();
    let (x, z) = ([0.0], [0.0, 0.0]);
    let mut v = FockComplex::default();
    assert_eq!(unsafe { fock_coherent_state(h.0, x.as_ptr(), z.as_ptr(), &mut v) }, FockStatus::Ok);
    assert!((v.re - 0.790_569).abs() < 1e-6);

    let rotated = [2.5, 1.5, 1.5, 2.5];
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { fock_context_new(1, rotated.as_ptr(), &mut ctx) }, FockStatus::Ok);
    let rot = Handle(ctx);
    assert_eq!(unsafe { fock_coherent_state(rot.0, x.as_ptr(), z.as_ptr(), &mut v) }, FockStatus::RequiresRealForm);
    assert!(message().starts_with("requires_real_form"));
}

#[test]
fn errors_map_to_codes() {
    let mut ctx = ptr::null_mut();
    let asym = [1.0, 2.0, 0.0, 1.0];
    assert_eq!(unsafe { fock_context_new(1, asym.as_ptr(), &mut ctx) }, FockStatus::NotSymmetric);
    assert!(ctx.is_null());
    let indefinite = [1.0, 0.0, 0.0, -1.0];
    assert_eq!(unsafe { fock_context_new(1, indefinite.as_ptr(), &mut ctx) }, FockStatus::NotPositiveDefinite);
    assert_eq!(unsafe { fock_context_new(1, ptr::null(), &mut ctx) }, FockStatus::NullPointer);
    assert_eq!(message(), "null pointer: a");
    assert_eq!(unsafe { fock_context_new(0, asym.as_ptr(), &mut ctx) }, FockStatus::InvalidInput);

    let h = d41();
    let far = [20.0, 0.0];
    let mut k = FockComplex::default();
    assert_eq!(unsafe { fock_kernel(h.0, far.as_ptr(), far.as_ptr(), &mut k) }, FockStatus::Range);
    assert_eq!(unsafe { fock_kernel(ptr::null(), far.as_ptr(), far.as_ptr(), &mut k) }, FockStatus::NullPointer);
    assert_eq!(unsafe { fock_kernel(h.0, far.as_ptr(), far.as_ptr(), ptr::null_mut()) }, FockStatus::NullPointer);
}

#[test]
fn status_names() {
    let name = |s| unsafe { CStr::from_ptr(fock_status_name(s)) }.to_str().unwrap().to_owned();
    assert_eq!(name(FockStatus::Ok), "ok");
    assert_eq!(name(FockStatus::NotPositiveDefinite), "not_positive_definite");
    assert_eq!(name(FockStatus::Panic), "panic");
    let v = unsafe { CStr::from_ptr(fock_version()) }.to_str().unwrap().to_owned();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn truncation_sequence() {
    let (r, t) = ([4.0; 3], [1.0; 3]);
    let mut out = [0.0; 3];
    assert_eq!(unsafe { fock_truncation_log_inv_ca(r.as_ptr(), t.as_ptr(), 3, out.as_mut_ptr()) }, FockStatus::Ok);
    for (k, v) in out.iter().enumerate() {
        assert!((v.exp() - 1.25f64.powf((k + 1) as f64 / 2.0)).abs() < 1e-13);
    }
    let bad = [-1.0];
    assert_eq!(unsafe { fock_truncation_log_inv_ca(bad.as_ptr(), t.as_ptr(), 1, out.as_mut_ptr()) }, FockStatus::InvalidInput);
}

#[test]
fn verify_suite_passes() {
    let (mut checks, mut failed) = (0usize, usize::MAX);
    assert_eq!(unsafe { fock_verify(1, 0, &mut checks, &mut failed) }, FockStatus::Ok);
    assert!(checks > 50);
    assert_eq!(failed, 0);
}
