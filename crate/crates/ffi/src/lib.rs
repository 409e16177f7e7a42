//! C ABI for `onebit`.
//!
//! Every fallible function returns an [`OnebitStatus`] and writes its result
//! through an out-pointer. After a non-`Ok` status,
//! [`onebit_last_error_message`] describes the failure on the calling thread.
//! Density operators cross the boundary as opaque [`OnebitOperator`] handles
//! created by [`onebit_operator_new`] and released with
//! [`onebit_operator_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use onebit::highdim::{self, HermitianOperator, Strategy};
use onebit::measures::{self, normalized_measure, Distribution};
use onebit::{Error, SeedStream};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnebitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDistribution = 3,
    InvalidState = 4,
    Dimension = 5,
    NotHermitian = 6,
    InvalidTrace = 7,
    Overflow = 8,
    Numerical = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnebitStrategy {
    FixedBasis = 0,
    Sampled = 1,
    EigenDirected = 2,
    EigenOracle = 3,
}

fn strategy_from_raw(raw: i32) -> Option<Strategy> {
    Some(match raw {
        x if x == OnebitStrategy::FixedBasis as i32 => Strategy::FixedBasis,
        x if x == OnebitStrategy::Sampled as i32 => Strategy::Sampled,
        x if x == OnebitStrategy::EigenDirected as i32 => Strategy::EigenDirected,
        x if x == OnebitStrategy::EigenOracle as i32 => Strategy::EigenOracle,
        _ => return None,
    })
}

/// Opaque handle to a validated Hermitian unit-trace matrix.
pub struct OnebitOperator(HermitianOperator);

/// Result of a positivity test.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnebitPositivity {
    pub positive: bool,
    /// Witness pair indices, or -1 when there is none.
    pub pair_i: i64,
    pub pair_j: i64,
    /// Principal 2x2 minor of the witness pair, NaN when there is none.
    pub minor: f64,
    /// Smallest eigenvalue for the oracle strategy, NaN otherwise.
    pub min_eigenvalue: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OnebitStatus {
    match e {
        Error::InvalidDistribution(_) => OnebitStatus::InvalidDistribution,
        Error::InvalidState(_) | Error::NonPhysical(_) | Error::ZeroBranch { .. } => OnebitStatus::InvalidState,
        Error::Dimension(_) => OnebitStatus::Dimension,
        Error::NotHermitian(_) => OnebitStatus::NotHermitian,
        Error::InvalidTrace(_) => OnebitStatus::InvalidTrace,
        Error::Overflow(_) => OnebitStatus::Overflow,
        Error::Numerical(_) => OnebitStatus::Numerical,
        _ => OnebitStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), (OnebitStatus, String)>>(f: F) -> OnebitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OnebitStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OnebitStatus::Panic
        }
    }
}

fn lib(e: Error) -> (OnebitStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OnebitStatus, String) {
    (OnebitStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], (OnebitStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (OnebitStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn onebit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn onebit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Normalized degree-`alpha` entropy of `probs[0..len]`.
///
/// # Safety
/// `probs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onebit_entropy(probs: *const f64, len: usize, alpha: f64, out: *mut f64) -> OnebitStatus {
    guard(|| {
        let p = slice(probs, len, "probs")?;
        let d = Distribution::new(p.to_vec()).map_err(lib)?;
        let m = normalized_measure(alpha).map_err(lib)?;
        write(out, measures::entropy(&d, &m), "out")
    })
}

/// Sum of binary entropies `H(p_u, 1 - p_u)` over `pairs[0..len]`.
///
/// # Safety
/// `pairs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onebit_total_uncertainty(pairs: *const f64, len: usize, alpha: f64, out: *mut f64) -> OnebitStatus {
    guard(|| {
        let p = slice(pairs, len, "pairs")?;
        let m = normalized_measure(alpha).map_err(lib)?;
        write(out, measures::total_uncertainty(p, &m).map_err(lib)?, "out")
    })
}

/// Degrees of freedom of an `n`-level system with `m` outcomes per measurement.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onebit_degrees_of_freedom(n: u64, m: u64, out: *mut u64) -> OnebitStatus {
    guard(|| write(out, highdim::degrees_of_freedom(n, m).map_err(lib)?, "out"))
}

/// `cos²(theta / 2)`.
#[no_mangle]
pub extern "C" fn onebit_malus_probability(theta: f64) -> f64 {
    onebit::malus_probability(theta)
}

/// Builds an operator from row-major `n*n` real and imaginary parts.
/// Hermiticity and unit trace are checked.
///
/// # Safety
/// `re` and `im` must each point to `n*n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onebit_operator_new(n: usize, re: *const f64, im: *const f64, out: *mut *mut OnebitOperator) -> OnebitStatus {
    guard(|| {
        if n == 0 {
            return Err((OnebitStatus::Dimension, "n must be positive".into()));
        }
        let len = n.checked_mul(n).ok_or((OnebitStatus::Overflow, "n*n overflows".into()))?;
        let (re, im) = (slice(re, len, "re")?, slice(im, len, "im")?);
        let rows = |a: &[f64]| a.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>();
        let op = HermitianOperator::from_parts(&rows(re), &rows(im)).map_err(lib)?;
        write(out, Box::into_raw(Box::new(OnebitOperator(op))), "out")
    })
}

/// Releases an operator. Null is ignored.
///
/// # Safety
/// `op` must be null or a handle from [`onebit_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn onebit_operator_free(op: *mut OnebitOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Dimension of the operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn onebit_operator_dim(op: *const OnebitOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// Positivity test. `strategy` is an [`OnebitStrategy`] value; `n_bases`
/// and `seed` only matter for the sampled and eigen-directed strategies.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onebit_positivity_check(
    op: *const OnebitOperator,
    strategy: i32,
    n_bases: usize,
    seed: u64,
    tol: f64,
    out: *mut OnebitPositivity,
) -> OnebitStatus {
    guard(|| {
        let rho = &op.as_ref().ok_or_else(|| null("op"))?.0;
        let strategy = strategy_from_raw(strategy)
            .ok_or_else(|| (OnebitStatus::InvalidArgument, format!("unknown strategy {strategy}")))?;
        let v = highdim::info_positivity_check(rho, strategy, n_bases, &SeedStream::new(seed), tol).map_err(lib)?;
        let mut result =
            OnebitPositivity { positive: v.positive, pair_i: -1, pair_j: -1, minor: f64::NAN, min_eigenvalue: f64::NAN };
        match v.witness {
            Some(highdim::Witness::Pair { i, j, minor, .. }) => {
                (result.pair_i, result.pair_j, result.minor) = (i as i64, j as i64, minor);
            }
            Some(highdim::Witness::Eigen { min_eigenvalue, .. }) => result.min_eigenvalue = min_eigenvalue,
            None => {}
        }
        if strategy == Strategy::EigenOracle && v.positive {
            result.min_eigenvalue = highdim::min_eigenpair(rho).map_err(lib)?.0;
        }
        write(out, result, "out")
    })
}
