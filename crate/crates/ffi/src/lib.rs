//! C ABI over the `typealign` library.
//!
//! Profile sets, alignment tables and rankings are opaque heap handles owned
//! by the caller and released with the matching `ta_*_free`. Every fallible
//! call returns a [`TaStatus`]; on failure the message is available from
//! [`ta_last_error`] on the same thread until the next failing call.
//!
//! Strings passed in must be NUL-terminated UTF-8. Strings returned point into
//! the owning handle and stay valid until that handle is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use typealign::alignment::score_all_pairs;
use typealign::{AlignmentTable, Error, ProfileSet, SimilarityMeasure};

pub const TA_MEASURE_JACCARD: u32 = 0;
pub const TA_MEASURE_G_JACCARD: u32 = 1;
pub const TA_MEASURE_LOG_TF: u32 = 2;

/// Bit `1 << TA_MEASURE_*` selects a measure in [`ta_align`].
pub const TA_MEASURES_ALL: u32 = 0b111;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Format = 5,
    NotFound = 6,
    Internal = 7,
}

pub struct TaProfileSet(ProfileSet);

pub struct TaAlignmentTable(AlignmentTable);

/// Top-k targets of one source with their scores.
pub struct TaRanking {
    targets: Vec<CString>,
    scores: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(TaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => TaStatus::Io,
            Error::Syntax { .. } | Error::Format { .. } => TaStatus::Format,
            Error::UnknownType(_) => TaStatus::NotFound,
            _ => TaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            TaStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TaStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn measure_arg(m: u32) -> Result<SimilarityMeasure, Failure> {
    SimilarityMeasure::ALL
        .get(m as usize)
        .copied()
        .ok_or_else(|| Failure(TaStatus::InvalidArgument, format!("unknown measure {m}")))
}

fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ta_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread; empty if none.
#[no_mangle]
pub extern "C" fn ta_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a consolidated profile file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_profiles_load(path: *const c_char, out: *mut *mut TaProfileSet) -> TaStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put(out, TaProfileSet(ProfileSet::load(Path::new(path))?))
    })
}

/// Number of types in the set; 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_profiles_len(set: *const TaProfileSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_profiles_free(set: *mut TaProfileSet) {
    free(set)
}

/// Similarity of one type of `a` and one type of `b` under `measure`.
///
/// # Safety
/// Handles must be live, strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_profiles_score(
    a: *const TaProfileSet,
    type_a: *const c_char,
    b: *const TaProfileSet,
    type_b: *const c_char,
    measure: u32,
    out: *mut f64,
) -> TaStatus {
    guard(|| {
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        let (ta, tb) = (str_arg(type_a, "type_a")?, str_arg(type_b, "type_b")?);
        let m = measure_arg(measure)?;
        let pa =
            a.0.get(ta)
                .ok_or_else(|| Failure::from(Error::UnknownType(ta.into())))?;
        let pb =
            b.0.get(tb)
                .ok_or_else(|| Failure::from(Error::UnknownType(tb.into())))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = m.score(pa, pb);
        Ok(())
    })
}

/// Scores every cross pair of `a` and `b` under the measures selected by
/// `measure_mask` (bit `1 << TA_MEASURE_*`).
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_align(
    a: *const TaProfileSet,
    b: *const TaProfileSet,
    measure_mask: u32,
    out: *mut *mut TaAlignmentTable,
) -> TaStatus {
    guard(|| {
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        if measure_mask == 0 || measure_mask & !TA_MEASURES_ALL != 0 {
            return Err(Failure(
                TaStatus::InvalidArgument,
                format!("bad measure mask {measure_mask:#x}"),
            ));
        }
        let measures: Vec<_> = SimilarityMeasure::ALL
            .into_iter()
            .filter(|m| measure_mask & (1 << m.index()) != 0)
            .collect();
        put(out, TaAlignmentTable(score_all_pairs(&a.0, &b.0, &measures)?))
    })
}

/// Reads an alignment table TSV.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_table_load(path: *const c_char, out: *mut *mut TaAlignmentTable) -> TaStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put(out, TaAlignmentTable(AlignmentTable::load(Path::new(path))?))
    })
}

/// Writes the table as TSV.
///
/// # Safety
/// `table` must be live and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ta_table_save(table: *const TaAlignmentTable, path: *const c_char) -> TaStatus {
    guard(|| {
        let t = handle(table, "table")?;
        Ok(t.0.save(Path::new(str_arg(path, "path")?))?)
    })
}

/// Number of scored pairs; 0 for null.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_table_len(table: *const TaAlignmentTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_table_free(table: *mut TaAlignmentTable) {
    free(table)
}

/// Stored score of one pair.
///
/// # Safety
/// `table` must be live, strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_table_score(
    table: *const TaAlignmentTable,
    type_a: *const c_char,
    type_b: *const c_char,
    measure: u32,
    out: *mut f64,
) -> TaStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let (ta, tb) = (str_arg(type_a, "type_a")?, str_arg(type_b, "type_b")?);
        let m = measure_arg(measure)?;
        let entry =
            t.0.get(ta, tb)
                .ok_or_else(|| Failure(TaStatus::NotFound, format!("no pair ({ta}, {tb})")))?;
        let score = entry
            .score(m)
            .ok_or_else(|| Failure::from(Error::MeasureNotEnabled(m)))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = score;
        Ok(())
    })
}

/// Number of pairs scoring at least `theta`.
///
/// # Safety
/// `table` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_table_threshold_count(
    table: *const TaAlignmentTable,
    measure: u32,
    theta: f64,
    out: *mut usize,
) -> TaStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let n = t.0.threshold_filter(measure_arg(measure)?, theta)?.len();
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = n;
        Ok(())
    })
}

/// The `k` best targets of `source`, highest score first.
///
/// # Safety
/// `table` must be live, `source` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_table_top_k(
    table: *const TaAlignmentTable,
    source: *const c_char,
    measure: u32,
    k: usize,
    out: *mut *mut TaRanking,
) -> TaStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let ranked = t.0.top_k(str_arg(source, "source")?, measure_arg(measure)?, k)?;
        let ranking = TaRanking {
            targets: ranked
                .iter()
                .map(|(name, _)| CString::new(*name).unwrap_or_default())
                .collect(),
            scores: ranked.iter().map(|&(_, s)| s).collect(),
        };
        put(out, ranking)
    })
}

/// # Safety
/// `ranking` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_ranking_len(ranking: *const TaRanking) -> usize {
    ranking.as_ref().map_or(0, |r| r.targets.len())
}

/// Target at rank `i`, or null when out of range.
///
/// # Safety
/// `ranking` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_ranking_target(ranking: *const TaRanking, i: usize) -> *const c_char {
    ranking
        .as_ref()
        .and_then(|r| r.targets.get(i))
        .map_or(std::ptr::null(), |s| s.as_ptr())
}

/// Score at rank `i`, or NaN when out of range.
///
/// # Safety
/// `ranking` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_ranking_score(ranking: *const TaRanking, i: usize) -> f64 {
    ranking
        .as_ref()
        .and_then(|r| r.scores.get(i).copied())
        .unwrap_or(f64::NAN)
}

/// # Safety
/// `ranking` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_ranking_free(ranking: *mut TaRanking) {
    free(ranking)
}
