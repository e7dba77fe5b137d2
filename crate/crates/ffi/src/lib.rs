//! C ABI over the l2box decoders.
//!
//! Codes are opaque [`L2boxCode`] handles created by one of the
//! `l2box_code_*` constructors and released with [`l2box_code_free`].
//! Every fallible function returns an [`L2boxStatus`]; on failure a
//! human-readable message is available from [`l2box_last_error`] on the
//! same thread until the next failing call.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use l2box::admm::{self, L2BoxParams, PenalizedParams};
use l2box::code;
use l2box::harness;
use l2box::mp::{self, MpParams, MpVariant};
use l2box::{DecodeResult, Error, ParityCheckMatrix, Termination};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2boxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidMatrix = 4,
    LengthMismatch = 5,
    NonFiniteLlr = 6,
    InvalidParams = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2boxTermination {
    Converged = 0,
    MaxIters = 1,
    EarlyCodeword = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2boxMpVariant {
    SumProduct = 0,
    MinSum = 1,
    NormalizedMinSum = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct L2boxL2Params {
    pub mu1: f64,
    pub mu2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub early_exit_on_codeword: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct L2boxPenalizedParams {
    pub alpha: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub early_exit_on_codeword: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct L2boxMpParams {
    pub variant: L2boxMpVariant,
    pub max_iters: usize,
    pub normalization: f64,
    pub llr_clip: f64,
}

/// Scalar part of a decode; the word itself goes to a caller buffer.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct L2boxDecodeInfo {
    pub is_valid_codeword: bool,
    pub iterations: usize,
    pub termination: L2boxTermination,
    pub wall_time: f64,
    pub objective: f64,
}

/// Opaque parity-check matrix.
pub struct L2boxCode {
    h: ParityCheckMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> L2boxStatus {
    match e {
        Error::Alist { .. } => L2boxStatus::Parse,
        Error::InvalidMatrix(_) => L2boxStatus::InvalidMatrix,
        Error::LengthMismatch { .. } => L2boxStatus::LengthMismatch,
        Error::NonFiniteLlr(_) => L2boxStatus::NonFiniteLlr,
        Error::InvalidParams(_) | Error::TooManyCodewords { .. } | Error::UnknownDecoder(_) => {
            L2boxStatus::InvalidParams
        }
        Error::Io { .. } => L2boxStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (L2boxStatus, String)>) -> L2boxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => L2boxStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            L2boxStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (L2boxStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (L2boxStatus, String) {
    (L2boxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (L2boxStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (L2boxStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn store_code(out: *mut *mut L2boxCode, h: ParityCheckMatrix) -> Result<(), (L2boxStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(L2boxCode { h }));
    Ok(())
}

/// Message of the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn l2box_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn l2box_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses alist text.
#[no_mangle]
pub unsafe extern "C" fn l2box_code_from_alist(text: *const c_char, out: *mut *mut L2boxCode) -> L2boxStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        store_code(out, code::parse_alist(text).map_err(lib_err)?)
    })
}

/// Loads a built-in code name (e.g. "regular96") or an alist file path.
#[no_mangle]
pub unsafe extern "C" fn l2box_code_load(code_ref: *const c_char, out: *mut *mut L2boxCode) -> L2boxStatus {
    guard(|| {
        let r = read_str(code_ref, "code_ref")?;
        store_code(out, harness::load_code(r).map_err(lib_err)?)
    })
}

/// Builds a code from a row-major dense 0/1 matrix of `n_checks * n_vars` bytes.
#[no_mangle]
pub unsafe extern "C" fn l2box_code_from_dense(
    dense: *const u8,
    n_checks: usize,
    n_vars: usize,
    out: *mut *mut L2boxCode,
) -> L2boxStatus {
    guard(|| {
        if dense.is_null() {
            return Err(null("dense"));
        }
        let flat = std::slice::from_raw_parts(dense, n_checks * n_vars);
        let rows: Vec<Vec<u8>> = flat.chunks(n_vars.max(1)).take(n_checks).map(<[u8]>::to_vec).collect();
        store_code(out, ParityCheckMatrix::from_dense(&rows).map_err(lib_err)?)
    })
}

/// Releases a handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn l2box_code_free(code: *mut L2boxCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length N (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn l2box_code_n_vars(code: *const L2boxCode) -> usize {
    code.as_ref().map_or(0, |c| c.h.n_vars())
}

/// Number of checks M (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn l2box_code_n_checks(code: *const L2boxCode) -> usize {
    code.as_ref().map_or(0, |c| c.h.n_checks())
}

/// GF(2) rank of H (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn l2box_code_rank(code: *const L2boxCode) -> usize {
    code.as_ref().map_or(0, |c| c.h.rank())
}

/// Writes whether the `len`-bit word (bytes 0/1) satisfies every check.
#[no_mangle]
pub unsafe extern "C" fn l2box_code_is_codeword(
    code: *const L2boxCode,
    word: *const u8,
    len: usize,
    out: *mut bool,
) -> L2boxStatus {
    guard(|| {
        let c = code.as_ref().ok_or_else(|| null("code"))?;
        if word.is_null() {
            return Err(null("word"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let w = l2box::BinaryWord::new(std::slice::from_raw_parts(word, len).to_vec()).map_err(lib_err)?;
        *out = code::is_codeword(&c.h, &w).map_err(lib_err)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn l2box_l2_params_default() -> L2boxL2Params {
    let p = L2BoxParams::default();
    L2boxL2Params {
        mu1: p.mu1,
        mu2: p.mu2,
        epsilon: p.epsilon,
        max_iters: p.max_iters,
        early_exit_on_codeword: p.early_exit_on_codeword,
    }
}

#[no_mangle]
pub extern "C" fn l2box_penalized_params_default() -> L2boxPenalizedParams {
    let p = PenalizedParams::default();
    L2boxPenalizedParams {
        alpha: p.alpha,
        mu: p.mu,
        epsilon: p.epsilon,
        max_iters: p.max_iters,
        early_exit_on_codeword: p.early_exit_on_codeword,
    }
}

#[no_mangle]
pub extern "C" fn l2box_mp_params_default(variant: L2boxMpVariant) -> L2boxMpParams {
    let p = MpParams::new(mp_variant(variant));
    L2boxMpParams { variant, max_iters: p.max_iters, normalization: p.normalization, llr_clip: p.llr_clip }
}

fn mp_variant(v: L2boxMpVariant) -> MpVariant {
    match v {
        L2boxMpVariant::SumProduct => MpVariant::SumProduct,
        L2boxMpVariant::MinSum => MpVariant::MinSum,
        L2boxMpVariant::NormalizedMinSum => MpVariant::NormalizedMinSum,
    }
}

/// Shared plumbing: validates pointers, runs `decode`, copies the outputs.
unsafe fn run_decode(
    code: *const L2boxCode,
    llr: *const f64,
    n: usize,
    word_out: *mut u8,
    info_out: *mut L2boxDecodeInfo,
    decode: impl FnOnce(&ParityCheckMatrix, &[f64]) -> l2box::Result<DecodeResult>,
) -> L2boxStatus {
    guard(|| {
        let c = code.as_ref().ok_or_else(|| null("code"))?;
        if llr.is_null() {
            return Err(null("llr"));
        }
        let gamma = std::slice::from_raw_parts(llr, n);
        let r = decode(&c.h, gamma).map_err(lib_err)?;
        if !word_out.is_null() {
            ptr::copy_nonoverlapping(r.word.bits().as_ptr(), word_out, r.word.len());
        }
        if !info_out.is_null() {
            *info_out = L2boxDecodeInfo {
                is_valid_codeword: r.is_valid_codeword,
                iterations: r.iterations,
                termination: match r.termination {
                    Termination::Converged => L2boxTermination::Converged,
                    Termination::MaxIters => L2boxTermination::MaxIters,
                    Termination::EarlyCodeword => L2boxTermination::EarlyCodeword,
                },
                wall_time: r.wall_time,
                objective: r.objective,
            };
        }
        Ok(())
    })
}

/// l2-box ADMM decode of `n` LLRs. `word_out` (may be NULL) receives N bytes.
/// `params` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn l2box_decode_l2box(
    code: *const L2boxCode,
    llr: *const f64,
    n: usize,
    params: *const L2boxL2Params,
    word_out: *mut u8,
    info_out: *mut L2boxDecodeInfo,
) -> L2boxStatus {
    let p = params.as_ref().copied().unwrap_or_else(|| l2box_l2_params_default());
    let p = L2BoxParams {
        mu1: p.mu1,
        mu2: p.mu2,
        epsilon: p.epsilon,
        max_iters: p.max_iters,
        early_exit_on_codeword: p.early_exit_on_codeword,
    };
    run_decode(code, llr, n, word_out, info_out, |h, g| admm::l2box_decode(h, g, &p, None))
}

/// Penalized ADMM-LP decode; see [`l2box_decode_l2box`] for the buffers.
#[no_mangle]
pub unsafe extern "C" fn l2box_decode_penalized(
    code: *const L2boxCode,
    llr: *const f64,
    n: usize,
    params: *const L2boxPenalizedParams,
    word_out: *mut u8,
    info_out: *mut L2boxDecodeInfo,
) -> L2boxStatus {
    let p = params.as_ref().copied().unwrap_or_else(|| l2box_penalized_params_default());
    let p = PenalizedParams {
        alpha: p.alpha,
        mu: p.mu,
        epsilon: p.epsilon,
        max_iters: p.max_iters,
        early_exit_on_codeword: p.early_exit_on_codeword,
    };
    run_decode(code, llr, n, word_out, info_out, |h, g| admm::penalized_decode(h, g, &p))
}

/// Message-passing decode; `params` may be NULL for sum-product defaults.
#[no_mangle]
pub unsafe extern "C" fn l2box_decode_mp(
    code: *const L2boxCode,
    llr: *const f64,
    n: usize,
    params: *const L2boxMpParams,
    word_out: *mut u8,
    info_out: *mut L2boxDecodeInfo,
) -> L2boxStatus {
    let p = params.as_ref().copied().unwrap_or_else(|| l2box_mp_params_default(L2boxMpVariant::SumProduct));
    let p = MpParams {
        max_iters: p.max_iters,
        variant: mp_variant(p.variant),
        normalization: p.normalization,
        llr_clip: p.llr_clip,
    };
    run_decode(code, llr, n, word_out, info_out, |h, g| mp::mp_decode(h, g, &p))
}
