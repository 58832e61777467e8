//! C ABI over `fbmc-bep`.
//!
//! Filters and interference tables are opaque heap handles owned by the
//! caller and released with the matching `_free` function. Every fallible
//! call returns an [`FbmcStatus`] and writes its result through an out
//! pointer; on failure `fbmc_last_error()` describes what went wrong on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::ptr;

use fbmc_bep::analytic::{self, EnumerationConfig, Fading, Form};
use fbmc_bep::interference::truncate;
use fbmc_bep::{Error, FbmcGrid, FilterFamily, InterferenceTable, PrototypeFilter};

/// Passed as `kmax` to keep every entry of the interference set.
pub const FBMC_KMAX_ALL: usize = usize::MAX;

pub const FBMC_CHANNEL_AWGN: c_int = 0;
pub const FBMC_CHANNEL_RAYLEIGH: c_int = 1;

pub const FBMC_FORM_APPROX: c_int = 0;
pub const FBMC_FORM_EXACT: c_int = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedFilter = 3,
    BudgetExceeded = 4,
    Internal = 5,
}

/// Opaque prototype filter.
pub struct FbmcFilter(PrototypeFilter);

/// Opaque, possibly truncated, interference table.
pub struct FbmcTable(InterferenceTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn fail(status: FbmcStatus, message: impl Into<String>) -> FbmcStatus {
    set_error(message.into());
    status
}

fn status_of(err: &Error) -> FbmcStatus {
    match err {
        Error::UnsupportedFilterOrder(_) | Error::UnsupportedSpreading { .. } | Error::DegenerateFilter => {
            FbmcStatus::UnsupportedFilter
        }
        Error::EnumerationBudgetExceeded { .. } => FbmcStatus::BudgetExceeded,
        Error::Io(_) => FbmcStatus::Internal,
        _ => FbmcStatus::InvalidArgument,
    }
}

/// Runs `f`, storing its value through `out` or recording the error.
unsafe fn deliver<T>(out: *mut T, f: impl FnOnce() -> fbmc_bep::Result<T>) -> FbmcStatus {
    if out.is_null() {
        return fail(FbmcStatus::NullPointer, "output pointer is null");
    }
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(value)) => {
            out.write(value);
            FbmcStatus::Ok
        }
        Ok(Err(err)) => fail(status_of(&err), err.to_string()),
        Err(_) => fail(FbmcStatus::Internal, "internal panic"),
    }
}

unsafe fn deliver_filter(out: *mut *mut FbmcFilter, f: impl FnOnce() -> fbmc_bep::Result<PrototypeFilter>) -> FbmcStatus {
    deliver(out, || f().map(|p| Box::into_raw(Box::new(FbmcFilter(p)))))
}

fn fading(channel: c_int) -> fbmc_bep::Result<Fading> {
    match channel {
        FBMC_CHANNEL_AWGN => Ok(Fading::Awgn),
        FBMC_CHANNEL_RAYLEIGH => Ok(Fading::Rayleigh),
        other => Err(Error::InvalidParameter(format!("unknown channel {other}"))),
    }
}

fn form(form: c_int) -> fbmc_bep::Result<Form> {
    match form {
        FBMC_FORM_APPROX => Ok(Form::Approx),
        FBMC_FORM_EXACT => Ok(Form::Exact),
        other => Err(Error::InvalidParameter(format!("unknown form {other}"))),
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fbmc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Mirabbasi-Martin filter with `overlap` in {3, 4}.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_martin(overlap: usize, subcarriers: usize, out: *mut *mut FbmcFilter) -> FbmcStatus {
    deliver_filter(out, || fbmc_bep::make_martin(overlap, subcarriers))
}

/// Extended Gaussian filter with spreading factor `alpha`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_egf(
    alpha: f64,
    overlap: usize,
    subcarriers: usize,
    out: *mut *mut FbmcFilter,
) -> FbmcStatus {
    deliver_filter(out, || fbmc_bep::make_egf(alpha, overlap, subcarriers))
}

/// Rectangular filter of `subcarriers` taps.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_rect(subcarriers: usize, out: *mut *mut FbmcFilter) -> FbmcStatus {
    deliver_filter(out, || fbmc_bep::make_rect(subcarriers))
}

/// Filter from `len` caller-supplied taps, scaled to unit energy.
///
/// # Safety
/// `taps` must point to `len` readable doubles and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_from_taps(
    taps: *const f64,
    len: usize,
    overlap: usize,
    out: *mut *mut FbmcFilter,
) -> FbmcStatus {
    if taps.is_null() {
        return fail(FbmcStatus::NullPointer, "taps pointer is null");
    }
    let coeffs = std::slice::from_raw_parts(taps, len).to_vec();
    deliver_filter(out, || {
        fbmc_bep::normalize_energy(&PrototypeFilter::from_taps(coeffs, overlap, FilterFamily::Custom)?)
    })
}

/// Number of taps, or 0 for a null handle.
///
/// # Safety
/// `filter` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_len(filter: *const FbmcFilter) -> usize {
    filter.as_ref().map_or(0, |f| f.0.len())
}

/// Copies up to `capacity` taps into `buffer`; `written` receives the count.
///
/// # Safety
/// `filter` must be a live handle, `buffer` must hold `capacity` doubles and
/// `written` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_taps(
    filter: *const FbmcFilter,
    buffer: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> FbmcStatus {
    let Some(filter) = filter.as_ref() else {
        return fail(FbmcStatus::NullPointer, "filter handle is null");
    };
    if buffer.is_null() && capacity > 0 {
        return fail(FbmcStatus::NullPointer, "tap buffer is null");
    }
    deliver(written, || {
        let coeffs = filter.0.coeffs();
        let n = coeffs.len().min(capacity);
        if n > 0 {
            ptr::copy_nonoverlapping(coeffs.as_ptr(), buffer, n);
        }
        Ok(n)
    })
}

/// # Safety
/// `filter` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fbmc_filter_free(filter: *mut FbmcFilter) {
    if !filter.is_null() {
        drop(Box::from_raw(filter));
    }
}

/// Interference set of `filter` on an `subcarriers`-wide grid, truncated to
/// the `kmax` strongest entries (`FBMC_KMAX_ALL` keeps them all).
///
/// # Safety
/// `filter` must be a live handle and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_table_new(
    filter: *const FbmcFilter,
    subcarriers: usize,
    kmax: usize,
    out: *mut *mut FbmcTable,
) -> FbmcStatus {
    let Some(filter) = filter.as_ref() else {
        return fail(FbmcStatus::NullPointer, "filter handle is null");
    };
    deliver(out, || {
        let full = fbmc_bep::build_set(&FbmcGrid::new(subcarriers, filter.0.clone())?);
        let table = if kmax == FBMC_KMAX_ALL { full } else { truncate(&full, kmax)? };
        Ok(Box::into_raw(Box::new(FbmcTable(table))))
    })
}

/// Number of entries, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fbmc_table_len(table: *const FbmcTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// Signal-to-interference ratio of the table in dB.
///
/// # Safety
/// `table` must be a live handle and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_table_sir(table: *const FbmcTable, out: *mut f64) -> FbmcStatus {
    let Some(table) = table.as_ref() else {
        return fail(FbmcStatus::NullPointer, "table handle is null");
    };
    deliver(out, || Ok(fbmc_bep::sir(&table.0)))
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fbmc_table_free(table: *mut FbmcTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Size of the interference set for `subcarriers` and a filter of
/// `filter_len` taps.
#[no_mangle]
pub extern "C" fn fbmc_set_size(subcarriers: usize, filter_len: usize) -> usize {
    fbmc_bep::set_size(subcarriers, filter_len)
}

/// Single-carrier Gray `order`-PAM bit error probability at `gamma_b`
/// (linear Eb/N0).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_pam_bep(order: usize, channel: c_int, kind: c_int, gamma_b: f64, out: *mut f64) -> FbmcStatus {
    deliver(out, || analytic::pam_bep(order, fading(channel)?, form(kind)?, gamma_b))
}

/// CP-OFDM square-QAM bit error probability.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_ofdm_bep(
    qam_order: usize,
    subcarriers: usize,
    cp: usize,
    channel: c_int,
    kind: c_int,
    gamma_b: f64,
    out: *mut f64,
) -> FbmcStatus {
    deliver(out, || analytic::ofdm_bep(qam_order, subcarriers, cp, fading(channel)?, form(kind)?, gamma_b))
}

/// FBMC/OQAM bit error probability with `order`-PAM per real dimension and
/// the interference in `table`. Fails with `BudgetExceeded` when the table
/// needs more than `budget` offset combinations.
///
/// # Safety
/// `table` must be a live handle and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fbmc_fbmc_bep(
    order: usize,
    table: *const FbmcTable,
    channel: c_int,
    kind: c_int,
    gamma_b: f64,
    budget: u64,
    out: *mut f64,
) -> FbmcStatus {
    let Some(table) = table.as_ref() else {
        return fail(FbmcStatus::NullPointer, "table handle is null");
    };
    deliver(out, || {
        let config = EnumerationConfig { budget, ..Default::default() };
        analytic::fbmc_bep(order, &table.0, fading(channel)?, form(kind)?, gamma_b, config)
    })
}
