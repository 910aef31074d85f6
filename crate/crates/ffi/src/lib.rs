//! C ABI over `repdigit-prover`.
//!
//! Every function returns an [`RpStatus`] code or a value that cannot fail.
//! On failure the message is available from [`rp_last_error`] on the same
//! thread. Strings handed out by the library are freed with
//! [`rp_string_free`], certificates with [`rp_certificate_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use repdigit_prover::prover::{
    canonical_json, emit_report, prove, Certificate, ProveError, ProveOptions, ReportFormat,
};
use repdigit_prover::reduction::ConvergentPolicy;
use repdigit_prover::search::search;
use repdigit_prover::sequence::RecurrenceDef;
use repdigit_prover::PrecisionPolicy;

/// Status codes; the nonzero values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    Error = 1,
    ProofIncomplete = 2,
    PrecisionExhausted = 3,
    InvalidArgument = 4,
    Panic = 5,
}

/// Opaque certificate handle.
pub struct RpCertificate(Certificate);

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RpProveOptions {
    pub search_ceiling: u64,
    pub precision_bits: u32,
    pub paper_faithful: bool,
    pub tight: bool,
    /// Scan convergents in increasing order instead of trying the published
    /// one first.
    pub increasing_policy: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(s).expect("no interior nul")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: RpStatus, msg: impl Into<String>) -> RpStatus {
    set_error(msg);
    status
}

/// Run `f`, turning a panic into [`RpStatus::Panic`].
fn guard(f: impl FnOnce() -> RpStatus) -> RpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RpStatus::Panic, msg)
        }
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn status_of(e: &ProveError) -> RpStatus {
    match e {
        ProveError::ProofIncomplete { .. } => RpStatus::ProofIncomplete,
        ProveError::PrecisionExhausted { .. } => RpStatus::PrecisionExhausted,
        ProveError::InvalidOptions(_) => RpStatus::InvalidArgument,
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn rp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next library call on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Fill `opts` with the defaults of the CLI.
///
/// # Safety
/// `opts` must be null or point to writable memory for one `RpProveOptions`.
#[no_mangle]
pub unsafe extern "C" fn rp_prove_options_default(opts: *mut RpProveOptions) -> RpStatus {
    guard(|| {
        if opts.is_null() {
            return fail(RpStatus::InvalidArgument, "opts is null");
        }
        let d = ProveOptions::default();
        // SAFETY: checked non-null; caller guarantees it is writable.
        unsafe {
            opts.write(RpProveOptions {
                search_ceiling: d.search_ceiling,
                precision_bits: d.precision.max_bits,
                paper_faithful: d.paper_faithful,
                tight: d.tight,
                increasing_policy: d.policy == ConvergentPolicy::Increasing,
            })
        };
        RpStatus::Ok
    })
}

/// Run the proof. `opts` may be null for defaults.
///
/// On `RP_STATUS_OK` `*out` receives the certificate. On
/// `RP_STATUS_PROOF_INCOMPLETE` it receives the partial certificate when
/// every stage ran, and null otherwise.
///
/// # Safety
/// `opts` must be null or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rp_prove(opts: *const RpProveOptions, out: *mut *mut RpCertificate) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return fail(RpStatus::InvalidArgument, "out is null");
        }
        // SAFETY: checked non-null.
        unsafe { out.write(ptr::null_mut()) };
        let mut options = ProveOptions::default();
        // SAFETY: caller guarantees `opts` is null or valid.
        if let Some(o) = unsafe { opts.as_ref() } {
            let bits = o.precision_bits;
            options.precision = match PrecisionPolicy::new(bits.min(256), bits, 2.0) {
                Ok(p) => p,
                Err(e) => return fail(RpStatus::InvalidArgument, e.to_string()),
            };
            options.search_ceiling = o.search_ceiling;
            options.paper_faithful = o.paper_faithful;
            options.tight = o.tight;
            if o.increasing_policy {
                options.policy = ConvergentPolicy::Increasing;
            }
        }
        match prove(&options) {
            Ok(cert) => {
                // SAFETY: checked non-null.
                unsafe { out.write(Box::into_raw(Box::new(RpCertificate(cert)))) };
                RpStatus::Ok
            }
            Err(e) => {
                let status = status_of(&e);
                set_error(e.to_string());
                if let ProveError::ProofIncomplete {
                    certificate: Some(cert),
                    ..
                } = e
                {
                    // SAFETY: checked non-null.
                    unsafe { out.write(Box::into_raw(Box::new(RpCertificate(*cert)))) };
                }
                status
            }
        }
    })
}

/// # Safety
/// `cert` must be null or a handle from [`rp_prove`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rp_certificate_free(cert: *mut RpCertificate) {
    if !cert.is_null() {
        // SAFETY: the handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(cert) });
    }
}

/// # Safety
/// `cert` must be null or a live handle.
unsafe fn cert_ref<'a>(cert: *const RpCertificate) -> Option<&'a Certificate> {
    // SAFETY: forwarded to the caller.
    unsafe { cert.as_ref() }.map(|c| &c.0)
}

/// Whether the certificate closes the proof; false for null.
///
/// # Safety
/// `cert` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_certificate_proof_complete(cert: *const RpCertificate) -> bool {
    // SAFETY: forwarded to the caller.
    unsafe { cert_ref(cert) }.is_some_and(|c| c.contradiction.proof_complete)
}

/// Reduced bound on n; 0 for null.
///
/// # Safety
/// `cert` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_certificate_final_bound(cert: *const RpCertificate) -> u64 {
    // SAFETY: forwarded to the caller.
    unsafe { cert_ref(cert) }.map_or(0, |c| c.final_bound)
}

/// # Safety
/// `cert` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_certificate_solution_count(cert: *const RpCertificate) -> usize {
    // SAFETY: forwarded to the caller.
    unsafe { cert_ref(cert) }.map_or(0, |c| c.solutions.len())
}

/// Decimal value and smallest index of solution `i`.
///
/// # Safety
/// `cert` must be a live handle; `value_out` writable; `n_out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rp_certificate_solution(
    cert: *const RpCertificate,
    i: usize,
    value_out: *mut *mut c_char,
    n_out: *mut u64,
) -> RpStatus {
    guard(|| {
        // SAFETY: forwarded to the caller.
        let Some(c) = (unsafe { cert_ref(cert) }) else {
            return fail(RpStatus::InvalidArgument, "cert is null");
        };
        if value_out.is_null() {
            return fail(RpStatus::InvalidArgument, "value_out is null");
        }
        let Some(s) = c.solutions.get(i) else {
            return fail(RpStatus::InvalidArgument, format!("index {i} out of range"));
        };
        // SAFETY: checked non-null; n_out checked by as_mut.
        unsafe {
            value_out.write(into_c_string(s.value.to_string()));
            if let Some(n) = n_out.as_mut() {
                *n = s.n;
            }
        }
        RpStatus::Ok
    })
}

/// Canonical JSON (`text = false`) or the text report (`text = true`).
///
/// # Safety
/// `cert` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_certificate_report(
    cert: *const RpCertificate,
    text: bool,
    out: *mut *mut c_char,
) -> RpStatus {
    guard(|| {
        // SAFETY: forwarded to the caller.
        let Some(c) = (unsafe { cert_ref(cert) }) else {
            return fail(RpStatus::InvalidArgument, "cert is null");
        };
        if out.is_null() {
            return fail(RpStatus::InvalidArgument, "out is null");
        }
        let s = if text {
            emit_report(c, ReportFormat::Text)
        } else {
            canonical_json(c)
        };
        // SAFETY: checked non-null.
        unsafe { out.write(into_c_string(s)) };
        RpStatus::Ok
    })
}

/// Exhaustive search over `n_min..=n_max` of the recurrence with initial
/// terms `t0, t1, t2`; writes a JSON array of solutions.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rp_search(
    n_min: u64,
    n_max: u64,
    t0: u64,
    t1: u64,
    t2: u64,
    out: *mut *mut c_char,
) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return fail(RpStatus::InvalidArgument, "out is null");
        }
        let rec = RecurrenceDef {
            initial_terms: [t0, t1, t2],
        };
        match search(n_min, n_max, &rec) {
            Ok(sol) => {
                let json = serde_json::to_string(&sol).expect("solutions serialize");
                // SAFETY: checked non-null.
                unsafe { out.write(into_c_string(json)) };
                RpStatus::Ok
            }
            Err(e) => fail(RpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rp_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string came from CString::into_raw.
        drop(unsafe { CString::from_raw(s) });
    }
}
