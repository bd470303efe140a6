//! C interface to `sct_core`.
//!
//! Configs and reports are opaque heap handles. Every fallible call returns an
//! [`SctStatus`]; on failure a message is kept per thread and can be read with
//! [`sct_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sct_core::harness::{run_trial, Chain, ReconstructionReport, TrialConfig};
use sct_core::Error;

/// Status codes. Zero is success, everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SctStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Io = 4,
    Format = 5,
    Infeasible = 6,
    InvalidArgument = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Transmission chain selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SctChain {
    Digital = 0,
    Analog = 1,
    Baseline = 2,
}

impl From<SctChain> for Chain {
    fn from(c: SctChain) -> Self {
        match c {
            SctChain::Digital => Chain::Digital,
            SctChain::Analog => Chain::Analog,
            SctChain::Baseline => Chain::Baseline,
        }
    }
}

/// Opaque trial configuration.
pub struct SctConfig(TrialConfig);

/// Opaque trial result.
pub struct SctReport(ReconstructionReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> SctStatus {
    match e {
        Error::Io { .. } => SctStatus::Io,
        Error::UnsupportedFormat(_)
        | Error::MalformedHeader(_)
        | Error::UnsupportedMaxval(_)
        | Error::Truncated { .. }
        | Error::DimensionMismatch { .. } => SctStatus::Format,
        Error::Infeasible { .. } | Error::RbOverflow { .. } => SctStatus::Infeasible,
        Error::Config(_) => SctStatus::Config,
        Error::InvalidSize(_) | Error::InvalidWeight(_) | Error::InvalidArgument(_) => SctStatus::InvalidArgument,
    }
}

fn fail(status: SctStatus, msg: impl Into<String>) -> SctStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> SctStatus) -> SctStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(SctStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SctStatus> {
    if p.is_null() {
        return Err(fail(SctStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SctStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn store_config(out: *mut *mut SctConfig, r: sct_core::Result<TrialConfig>) -> SctStatus {
    if out.is_null() {
        return fail(SctStatus::NullPointer, "null output pointer");
    }
    match r {
        Ok(cfg) => {
            unsafe { *out = Box::into_raw(Box::new(SctConfig(cfg))) };
            SctStatus::Ok
        }
        Err(e) => fail(status_of(&e), e.to_string()),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf`.
///
/// Returns the message length excluding the terminator, 0 when there is none.
/// When `buf_len` is too small the message is truncated but still terminated.
///
/// # Safety
/// `buf` must be null or point to `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sct_last_error_message(buf: *mut c_char, buf_len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && buf_len > 0 {
            let n = bytes.len().min(buf_len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Default configuration. Never null.
#[no_mangle]
pub extern "C" fn sct_config_default() -> *mut SctConfig {
    Box::into_raw(Box::new(SctConfig(TrialConfig::default())))
}

/// Parses `key = value` config text.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sct_config_parse(text: *const c_char, out: *mut *mut SctConfig) -> SctStatus {
    guard(|| match str_arg(text) {
        Ok(t) => store_config(out, TrialConfig::parse(t)),
        Err(s) => s,
    })
}

/// Reads a config file.
///
/// # Safety
/// `path` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sct_config_from_file(path: *const c_char, out: *mut *mut SctConfig) -> SctStatus {
    guard(|| match str_arg(path) {
        Ok(p) => store_config(out, TrialConfig::from_file(p)),
        Err(s) => s,
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sct_config_free(cfg: *mut SctConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn with_config(cfg: *mut SctConfig, f: impl FnOnce(&mut TrialConfig) -> SctStatus) -> SctStatus {
    match cfg.as_mut() {
        Some(c) => guard(|| f(&mut c.0)),
        None => fail(SctStatus::NullPointer, "null config handle"),
    }
}

/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn sct_config_set_seed(cfg: *mut SctConfig, seed: u64) -> SctStatus {
    with_config(cfg, |c| {
        c.seed = seed;
        SctStatus::Ok
    })
}

/// Channel symbols per source pixel; must be positive.
///
/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn sct_config_set_rate(cfg: *mut SctConfig, rate: f64) -> SctStatus {
    with_config(cfg, |c| {
        let old = c.rate;
        c.rate = rate;
        if let Err(e) = c.validate() {
            c.rate = old;
            return fail(status_of(&e), e.to_string());
        }
        SctStatus::Ok
    })
}

/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn sct_config_set_snr_db(cfg: *mut SctConfig, snr_db: f64) -> SctStatus {
    with_config(cfg, |c| {
        if !snr_db.is_finite() {
            return fail(SctStatus::InvalidArgument, "snr_db must be finite");
        }
        c.channel.snr_db = snr_db;
        SctStatus::Ok
    })
}

/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn sct_config_set_chain(cfg: *mut SctConfig, chain: SctChain) -> SctStatus {
    with_config(cfg, |c| {
        c.chain = chain.into();
        SctStatus::Ok
    })
}

/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn sct_config_set_correction(cfg: *mut SctConfig, enabled: bool) -> SctStatus {
    with_config(cfg, |c| {
        c.correction = enabled;
        SctStatus::Ok
    })
}

/// Runs one trial.
///
/// # Safety
/// `cfg` must be a live config handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sct_run_trial(cfg: *const SctConfig, out: *mut *mut SctReport) -> SctStatus {
    if out.is_null() {
        return fail(SctStatus::NullPointer, "null output pointer");
    }
    let Some(cfg) = cfg.as_ref() else {
        return fail(SctStatus::NullPointer, "null config handle");
    };
    guard(|| match run_trial(&cfg.0) {
        Ok(r) => {
            *out = Box::into_raw(Box::new(SctReport(r)));
            SctStatus::Ok
        }
        Err(e) => fail(status_of(&e), e.to_string()),
    })
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sct_report_free(report: *mut SctReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

macro_rules! report_getter {
    ($(#[$m:meta])* $name:ident, $ty:ty, $default:expr, |$r:ident| $body:expr) => {
        $(#[$m])*
        ///
        /// # Safety
        /// `report` must be null or a live report handle.
        #[no_mangle]
        pub unsafe extern "C" fn $name(report: *const SctReport) -> $ty {
            match report.as_ref() {
                Some(SctReport($r)) => $body,
                None => $default,
            }
        }
    };
}

report_getter!(
    /// PSNR in dB; NaN for a null handle.
    sct_report_psnr, f64, f64::NAN, |r| r.psnr
);
report_getter!(sct_report_mse, f64, f64::NAN, |r| r.mse);
report_getter!(
    /// Importance-weighted MSE.
    sct_report_weighted_mse, f64, f64::NAN, |r| r.weighted_mse
);
report_getter!(
    /// Fraction of blocks flagged as unreliable.
    sct_report_mask_fraction, f64, f64::NAN, |r| r.mask_fraction
);
report_getter!(sct_report_budget, usize, 0, |r| r.budget);
report_getter!(sct_report_symbols_used, usize, 0, |r| r.symbols_used);
report_getter!(sct_report_side_info_symbols, usize, 0, |r| r.side_info_symbols);
report_getter!(sct_report_side_info_lost, bool, false, |r| r.side_info_lost);
report_getter!(sct_report_degraded, bool, false, |r| r.degraded);
report_getter!(sct_report_width, usize, 0, |r| r.image.width());
report_getter!(sct_report_height, usize, 0, |r| r.image.height());

/// Copies the reconstructed 8-bit image, row-major, into `buf`.
///
/// # Safety
/// `report` must be a live report handle; `buf` must point to `buf_len`
/// writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sct_report_image(report: *const SctReport, buf: *mut u8, buf_len: usize) -> SctStatus {
    let Some(r) = report.as_ref() else {
        return fail(SctStatus::NullPointer, "null report handle");
    };
    if buf.is_null() {
        return fail(SctStatus::NullPointer, "null buffer");
    }
    let samples = r.0.image.samples();
    if buf_len < samples.len() {
        return fail(
            SctStatus::BufferTooSmall,
            format!("buffer holds {buf_len} bytes, image needs {}", samples.len()),
        );
    }
    ptr::copy_nonoverlapping(samples.as_ptr(), buf, samples.len());
    SctStatus::Ok
}

/// CRC-16 of a byte buffer, as used for packet checks.
///
/// # Safety
/// `data` must point to `len` readable bytes (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn sct_crc16(data: *const u8, len: usize) -> u16 {
    let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(data, len) };
    sct_core::digital::crc16(bytes)
}
