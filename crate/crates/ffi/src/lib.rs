//! C ABI over the laboratory's core: coefficient handles, resonance algebra,
//! regime classification, modulation scans, and config-driven runs.
//!
//! Conventions: every fallible call returns a [`QdnlsStatus`]; outputs go
//! through pointers; `qdnls_last_error` retrieves a thread-local message for
//! the most recent failure. Handles created by `_new` functions are owned by
//! the caller and released with their `_free` counterpart. All functions
//! catch panics and report them as `QDNLS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdnls_core::config::parse_config;
use qdnls_core::params::{SigmaTriple, SystemParams};
use qdnls_core::resonance::{classify_regime, compute_m_factors, modulation_scan, ScanCondition};
use qdnls_core::run::{run, Outcome};
use qdnls_core::Error;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdnlsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    /// The run aborted on the numerical blow-up signal (artifacts were kept).
    Blowup = 4,
    InconclusiveFit = 5,
    VerifyFailed = 6,
    IoError = 7,
    Utf8Error = 8,
    Panic = 9,
}

fn status_of(err: &Error) -> QdnlsStatus {
    match err {
        Error::Config { .. } => QdnlsStatus::ConfigError,
        Error::Io(_) => QdnlsStatus::IoError,
        _ => QdnlsStatus::InvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> QdnlsStatus) -> QdnlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside qdnls");
            QdnlsStatus::Panic
        }
    }
}

/// Opaque dispersion-coefficient handle.
pub struct QdnlsParams(SystemParams);

/// Derived coefficient algebra, plain-old-data for easy binding.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QdnlsResonance {
    pub theta: f64,
    pub kappa: f64,
    /// (alpha - gamma) * (beta + gamma)
    pub acg_bc: f64,
    /// Scaling-critical Sobolev exponent d/2 - 1.
    pub s_critical: f64,
    pub same_sign: u8,
    pub has_m_factor: u8,
    /// Set when theta < 0 and alpha != gamma; then m_plus != m_minus.
    pub has_m_pair: u8,
    pub m_factor: f64,
    pub m_plus: f64,
    pub m_minus: f64,
}

/// Creates a coefficient handle. Fails unless alpha, beta, gamma are nonzero
/// finite and dim is 1 or 2.
#[no_mangle]
pub extern "C" fn qdnls_params_new(
    alpha: f64,
    beta: f64,
    gamma: f64,
    dim: u32,
    out: *mut *mut QdnlsParams,
) -> QdnlsStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return QdnlsStatus::NullPointer;
        }
        match SystemParams::new(alpha, beta, gamma, dim as usize) {
            Ok(p) => {
                unsafe { *out = Box::into_raw(Box::new(QdnlsParams(p))) };
                QdnlsStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                unsafe { *out = ptr::null_mut() };
                QdnlsStatus::InvalidArgument
            }
        }
    })
}

/// Releases a handle created by `qdnls_params_new`. Null is a no-op.
#[no_mangle]
pub extern "C" fn qdnls_params_free(params: *mut QdnlsParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// theta = beta*gamma - alpha*gamma - alpha*beta (division-free form).
#[no_mangle]
pub extern "C" fn qdnls_theta(params: *const QdnlsParams, out: *mut f64) -> QdnlsStatus {
    guarded(|| {
        if params.is_null() || out.is_null() {
            set_error("null pointer");
            return QdnlsStatus::NullPointer;
        }
        let p = unsafe { &(*params).0 };
        unsafe { *out = qdnls_core::resonance::compute_theta(p) };
        QdnlsStatus::Ok
    })
}

/// kappa = (alpha - beta)(alpha - gamma)(beta + gamma).
#[no_mangle]
pub extern "C" fn qdnls_kappa(params: *const QdnlsParams, out: *mut f64) -> QdnlsStatus {
    guarded(|| {
        if params.is_null() || out.is_null() {
            set_error("null pointer");
            return QdnlsStatus::NullPointer;
        }
        let p = unsafe { &(*params).0 };
        unsafe { *out = qdnls_core::resonance::compute_kappa(p) };
        QdnlsStatus::Ok
    })
}

/// Fills the full derived algebra of the handle.
#[no_mangle]
pub extern "C" fn qdnls_resonance(
    params: *const QdnlsParams,
    out: *mut QdnlsResonance,
) -> QdnlsStatus {
    guarded(|| {
        if params.is_null() || out.is_null() {
            set_error("null pointer");
            return QdnlsStatus::NullPointer;
        }
        let p = unsafe { &(*params).0 };
        let r = compute_m_factors(p);
        let filled = QdnlsResonance {
            theta: r.theta,
            kappa: r.kappa,
            acg_bc: r.acg_bc,
            s_critical: p.s_critical(),
            same_sign: r.same_sign as u8,
            has_m_factor: r.m_factor.is_some() as u8,
            has_m_pair: r.m_plus.is_some() as u8,
            m_factor: r.m_factor.unwrap_or(f64::NAN),
            m_plus: r.m_plus.unwrap_or(f64::NAN),
            m_minus: r.m_minus.unwrap_or(f64::NAN),
        };
        unsafe { *out = filled };
        QdnlsStatus::Ok
    })
}

/// Writes the applicable-statement lines ("T1.4(iii): s ≥ 0.5", one per
/// line, UTF-8, NUL-terminated) into `buf`. `written` receives the full
/// length including the terminator; if it exceeds `cap` the text is
/// truncated but the status is still Ok.
#[no_mangle]
pub extern "C" fn qdnls_regime_labels(
    params: *const QdnlsParams,
    buf: *mut c_char,
    cap: usize,
    written: *mut usize,
) -> QdnlsStatus {
    guarded(|| {
        if params.is_null() || written.is_null() {
            set_error("null pointer");
            return QdnlsStatus::NullPointer;
        }
        let p = unsafe { &(*params).0 };
        let regime = classify_regime(p);
        let mut text = String::new();
        for (label, bound) in &regime.labels {
            text.push_str(&format!("{label}: {bound}\n"));
        }
        let bytes = text.as_bytes();
        unsafe { *written = bytes.len() + 1 };
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        QdnlsStatus::Ok
    })
}

/// Admissibility condition selector for `qdnls_modulation_scan`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdnlsScanCondition {
    Unconstrained = 0,
    ThetaPositive = 1,
    Separated = 2,
}

/// Lattice scan of min |sigma1|xi1|^2 + sigma2|xi2|^2 + sigma3|xi3|^2| /
/// max_j |xi_j|^2 over xi1 + xi2 + xi3 = 0. `ratio` is only read for the
/// Separated condition (and must be >= 4).
#[no_mangle]
pub extern "C" fn qdnls_modulation_scan(
    sigma1: f64,
    sigma2: f64,
    sigma3: f64,
    dim: u32,
    condition: QdnlsScanCondition,
    ratio: f64,
    extent: u32,
    step: f64,
    out_min_ratio: *mut f64,
) -> QdnlsStatus {
    guarded(|| {
        if out_min_ratio.is_null() {
            set_error("out pointer is null");
            return QdnlsStatus::NullPointer;
        }
        let sigma = match SigmaTriple::new(sigma1, sigma2, sigma3) {
            Ok(s) => s,
            Err(e) => {
                set_error(e.to_string());
                return QdnlsStatus::InvalidArgument;
            }
        };
        let cond = match condition {
            QdnlsScanCondition::Unconstrained => ScanCondition::Unconstrained,
            QdnlsScanCondition::ThetaPositive => ScanCondition::ThetaPositive,
            QdnlsScanCondition::Separated => ScanCondition::Separated { ratio },
        };
        match modulation_scan(&sigma, cond, dim as usize, extent, step) {
            Ok(v) => {
                unsafe { *out_min_ratio = v };
                QdnlsStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                QdnlsStatus::InvalidArgument
            }
        }
    })
}

/// Parses a strict-JSON run configuration and executes it; artifacts land in
/// the configuration's out_dir exactly as with the CLI.
#[no_mangle]
pub extern "C" fn qdnls_run_json(config_json: *const c_char) -> QdnlsStatus {
    guarded(|| {
        if config_json.is_null() {
            set_error("config pointer is null");
            return QdnlsStatus::NullPointer;
        }
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config is not valid UTF-8");
                return QdnlsStatus::Utf8Error;
            }
        };
        let cfg = match parse_config(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return QdnlsStatus::ConfigError;
            }
        };
        match run(&cfg) {
            Ok(Outcome::Ok) => QdnlsStatus::Ok,
            Ok(Outcome::BlowUp) => {
                set_error("numerical blow-up signal; partial diagnostics kept");
                QdnlsStatus::Blowup
            }
            Ok(Outcome::InconclusiveFit) => {
                set_error("fit r-squared below the gate");
                QdnlsStatus::InconclusiveFit
            }
            Ok(Outcome::VerifyFailed) => {
                set_error("verification battery reported failures");
                QdnlsStatus::VerifyFailed
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Copies the last error message (NUL-terminated, possibly truncated) into
/// `buf` and returns the message's full length in bytes.
#[no_mangle]
pub extern "C" fn qdnls_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qdnls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
