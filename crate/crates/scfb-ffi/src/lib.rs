//! C ABI for the `scfb` library.
//!
//! The surface mirrors the feedback loop's three natural entry points:
//! building a measurement matrix, compressing a channel to sign measurements,
//! reconstructing it with BIHT or SCA-BIHT, plus a one-call end-to-end
//! Monte-Carlo trial that reproduces the sweep engine's seeding.
//!
//! Conventions, shared by every function:
//!
//! * Fallible calls return an [`ScfbStatus`]; `SCFB_STATUS_OK` is zero.
//!   Output buffers are written only on success.
//! * Complex vectors travel as two parallel `double` arrays (real and
//!   imaginary parts); sign measurements as `int8_t` arrays of ±1; support
//!   masks as `uint8_t` arrays of 0/1.
//! * The only owned object is the opaque [`ScfbMatrix`]; release it with
//!   [`scfb_matrix_free`]. Everything else is caller-allocated.
//! * Panics never unwind across the boundary; they surface as
//!   `SCFB_STATUS_PANIC`.
//!
//! The matching header `include/scfb.h` is regenerated by the build script.

use std::panic::{catch_unwind, AssertUnwindSafe};

use scfb::channel::{SparseChannel, SupportVector};
use scfb::onebit::{compress, gen_measurement_matrix, MeasurementMatrix, SignMeasurements};
use scfb::reconstruction::{biht, sca_biht, ReconstructionConfig, ReconstructionResult};
use scfb::schemes::{run_trial, Scheme, SchemeConfig};
use scfb::sim::derive_seeds;
use scfb::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScfbStatus {
    /// The call succeeded and all output buffers are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is outside its documented domain.
    InvalidParameter = 2,
    /// The argument combination is inconsistent for the requested operation.
    InvalidConfiguration = 3,
    /// A caller contract was violated.
    ContractViolation = 4,
    /// An I/O operation failed.
    Io = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

impl From<&Error> for ScfbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => ScfbStatus::InvalidParameter,
            Error::InvalidConfiguration(_) => ScfbStatus::InvalidConfiguration,
            Error::ContractViolation(_) => ScfbStatus::ContractViolation,
            Error::Io(_) => ScfbStatus::Io,
        }
    }
}

/// Compared feedback schemes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScfbScheme {
    /// Superimposed feedback reconstructed with support-aided BIHT.
    PropSca = 0,
    /// Superimposed feedback reconstructed with plain BIHT.
    PropBiht = 1,
    /// Time-division baseline on dedicated symbols.
    Tdm = 2,
}

impl From<ScfbScheme> for Scheme {
    fn from(s: ScfbScheme) -> Self {
        match s {
            ScfbScheme::PropSca => Scheme::PropSca,
            ScfbScheme::PropBiht => Scheme::PropBiht,
            ScfbScheme::Tdm => Scheme::Tdm,
        }
    }
}

/// Opaque handle to a Gaussian measurement matrix.
pub struct ScfbMatrix {
    inner: MeasurementMatrix,
}

/// Diagnostics of one reconstruction run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScfbReconstructionInfo {
    /// Iterations executed before the solver returned.
    pub iterations_used: u64,
    /// Real multiplications spent in projections and sign checks.
    pub multiplies: u64,
    /// True if the final iterate reproduces every sign measurement.
    pub sign_consistent: bool,
}

/// Aggregated result of one end-to-end Monte-Carlo trial.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfbTrialOutcome {
    /// Wrong uplink data bits.
    pub bit_errors: u64,
    /// Uplink data bits sent.
    pub bits_total: u64,
    /// Wrong feedback payload bits after frame detection.
    pub frame_bit_errors: u64,
    /// Reconstruction error against the unit-normalized true channel.
    pub nmse: f64,
    /// Iterations used by the reconstruction.
    pub iterations_used: u64,
    /// True if every reconstructed nonzero lies in the fed-back support
    /// (always true for schemes that feed no support back).
    pub support_respected: bool,
}

/// Runs a closure, translating panics into a status instead of unwinding
/// into the caller.
fn guarded(f: impl FnOnce() -> ScfbStatus) -> ScfbStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(ScfbStatus::Panic)
}

/// Static, null-terminated name of a status code, for diagnostics.
#[no_mangle]
pub extern "C" fn scfb_status_name(status: ScfbStatus) -> *const std::os::raw::c_char {
    let name: &'static [u8] = match status {
        ScfbStatus::Ok => b"ok\0",
        ScfbStatus::NullPointer => b"null pointer\0",
        ScfbStatus::InvalidParameter => b"invalid parameter\0",
        ScfbStatus::InvalidConfiguration => b"invalid configuration\0",
        ScfbStatus::ContractViolation => b"contract violation\0",
        ScfbStatus::Io => b"i/o error\0",
        ScfbStatus::Panic => b"internal panic\0",
    };
    name.as_ptr().cast()
}

/// Creates an `n`×`m` measurement matrix with i.i.d. standard Gaussian
/// entries drawn from the given seed, and stores the handle in `*out`.
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one pointer. On
/// success it receives a handle that must later be released with
/// [`scfb_matrix_free`].
#[no_mangle]
pub unsafe extern "C" fn scfb_matrix_new(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut ScfbMatrix,
) -> ScfbStatus {
    guarded(|| {
        if out.is_null() {
            return ScfbStatus::NullPointer;
        }
        match gen_measurement_matrix(n, m, seed) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(ScfbMatrix { inner })) };
                ScfbStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Releases a matrix handle. A null handle is a no-op.
///
/// # Safety
///
/// `matrix` must be null or a handle obtained from [`scfb_matrix_new`] that
/// has not been freed before; the handle is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn scfb_matrix_free(matrix: *mut ScfbMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Signal dimension N of the matrix, or 0 for a null handle.
///
/// # Safety
///
/// `matrix` must be null or a live handle from [`scfb_matrix_new`].
#[no_mangle]
pub unsafe extern "C" fn scfb_matrix_n(matrix: *const ScfbMatrix) -> usize {
    if matrix.is_null() {
        return 0;
    }
    unsafe { &*matrix }.inner.n()
}

/// Measurement count M of the matrix, or 0 for a null handle.
///
/// # Safety
///
/// `matrix` must be null or a live handle from [`scfb_matrix_new`].
#[no_mangle]
pub unsafe extern "C" fn scfb_matrix_m(matrix: *const ScfbMatrix) -> usize {
    if matrix.is_null() {
        return 0;
    }
    unsafe { &*matrix }.inner.m()
}

/// Collects the ±1 parts of a reconstruction input from raw sign buffers.
///
/// # Safety
///
/// `y_re` and `y_im` must point to `m` readable `int8_t` each.
unsafe fn signs_from_raw(
    y_re: *const i8,
    y_im: *const i8,
    m: usize,
) -> scfb::Result<SignMeasurements> {
    let to_f64 = |p: *const i8| -> Vec<f64> {
        unsafe { std::slice::from_raw_parts(p, m) }
            .iter()
            .map(|&v| f64::from(v))
            .collect()
    };
    SignMeasurements::from_parts(to_f64(y_re), to_f64(y_im))
}

/// Writes a reconstruction back into the caller's buffers.
///
/// # Safety
///
/// `h_re` and `h_im` must point to `n` writable doubles each; `info` must be
/// null or point to writable storage for one [`ScfbReconstructionInfo`].
unsafe fn write_result(
    r: &ReconstructionResult,
    h_re: *mut f64,
    h_im: *mut f64,
    n: usize,
    info: *mut ScfbReconstructionInfo,
) {
    let re = unsafe { std::slice::from_raw_parts_mut(h_re, n) };
    let im = unsafe { std::slice::from_raw_parts_mut(h_im, n) };
    for (i, v) in r.h_hat().iter().enumerate() {
        re[i] = v.re;
        im[i] = v.im;
    }
    if !info.is_null() {
        unsafe {
            *info = ScfbReconstructionInfo {
                iterations_used: r.iterations_used() as u64,
                multiplies: r.multiplies(),
                sign_consistent: r.sign_consistent(),
            };
        }
    }
}

/// 1-bit compression: writes the signs of `Re(Φᵀh)` and `Im(Φᵀh)` into
/// `y_re` and `y_im`.
///
/// `n` and `m` must equal the matrix dimensions; strictly positive values map
/// to +1 and everything else to −1.
///
/// # Safety
///
/// `matrix` must be a live handle; `h_re`/`h_im` must point to `n` readable
/// doubles each; `y_re`/`y_im` must point to `m` writable `int8_t` each.
#[no_mangle]
pub unsafe extern "C" fn scfb_compress(
    matrix: *const ScfbMatrix,
    h_re: *const f64,
    h_im: *const f64,
    n: usize,
    y_re: *mut i8,
    y_im: *mut i8,
    m: usize,
) -> ScfbStatus {
    guarded(|| {
        if matrix.is_null() || h_re.is_null() || h_im.is_null() || y_re.is_null() || y_im.is_null()
        {
            return ScfbStatus::NullPointer;
        }
        let matrix = &unsafe { &*matrix }.inner;
        if n != matrix.n() || m != matrix.m() {
            return ScfbStatus::InvalidParameter;
        }
        let re = unsafe { std::slice::from_raw_parts(h_re, n) };
        let im = unsafe { std::slice::from_raw_parts(h_im, n) };
        let coeffs = re
            .iter()
            .zip(im)
            .map(|(&a, &b)| num_complex::Complex64::new(a, b))
            .collect();
        match compress(&SparseChannel::new(coeffs), matrix) {
            Ok(y) => {
                let out_re = unsafe { std::slice::from_raw_parts_mut(y_re, m) };
                let out_im = unsafe { std::slice::from_raw_parts_mut(y_im, m) };
                for (dst, &src) in out_re.iter_mut().zip(y.y_real()) {
                    *dst = src as i8;
                }
                for (dst, &src) in out_im.iter_mut().zip(y.y_imag()) {
                    *dst = src as i8;
                }
                ScfbStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Plain BIHT reconstruction from ±1 sign measurements.
///
/// Writes the unit-norm (or all-zero) estimate into `h_re`/`h_im` and, if
/// `info` is non-null, the run diagnostics into `*info`. `m` and `n` must
/// equal the matrix dimensions.
///
/// # Safety
///
/// `matrix` must be a live handle; `y_re`/`y_im` must point to `m` readable
/// `int8_t` each; `h_re`/`h_im` must point to `n` writable doubles each;
/// `info` must be null or point to writable storage for one
/// [`ScfbReconstructionInfo`].
#[no_mangle]
pub unsafe extern "C" fn scfb_biht(
    matrix: *const ScfbMatrix,
    y_re: *const i8,
    y_im: *const i8,
    m: usize,
    xi: usize,
    itermax: usize,
    early_stop: bool,
    h_re: *mut f64,
    h_im: *mut f64,
    n: usize,
    info: *mut ScfbReconstructionInfo,
) -> ScfbStatus {
    guarded(|| {
        if matrix.is_null() || y_re.is_null() || y_im.is_null() || h_re.is_null() || h_im.is_null()
        {
            return ScfbStatus::NullPointer;
        }
        let matrix = &unsafe { &*matrix }.inner;
        if m != matrix.m() || n != matrix.n() {
            return ScfbStatus::InvalidParameter;
        }
        let run = || -> scfb::Result<ReconstructionResult> {
            let y = unsafe { signs_from_raw(y_re, y_im, m) }?;
            let cfg = ReconstructionConfig::new(itermax, 1.0, early_stop)?;
            biht(&y, matrix, xi, &cfg)
        };
        match run() {
            Ok(r) => {
                unsafe { write_result(&r, h_re, h_im, n, info) };
                ScfbStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Support-aided BIHT reconstruction from ±1 sign measurements and a 0/1
/// support mask of length `n`.
///
/// # Safety
///
/// As for [`scfb_biht`], plus: `support` must point to `n` readable
/// `uint8_t`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn scfb_sca_biht(
    matrix: *const ScfbMatrix,
    y_re: *const i8,
    y_im: *const i8,
    m: usize,
    support: *const u8,
    xi: usize,
    itermax: usize,
    early_stop: bool,
    h_re: *mut f64,
    h_im: *mut f64,
    n: usize,
    info: *mut ScfbReconstructionInfo,
) -> ScfbStatus {
    guarded(|| {
        if matrix.is_null()
            || y_re.is_null()
            || y_im.is_null()
            || support.is_null()
            || h_re.is_null()
            || h_im.is_null()
        {
            return ScfbStatus::NullPointer;
        }
        let matrix = &unsafe { &*matrix }.inner;
        if m != matrix.m() || n != matrix.n() {
            return ScfbStatus::InvalidParameter;
        }
        let run = || -> scfb::Result<ReconstructionResult> {
            let y = unsafe { signs_from_raw(y_re, y_im, m) }?;
            let bits = unsafe { std::slice::from_raw_parts(support, n) }.to_vec();
            let z = SupportVector::from_bits(bits)?;
            let cfg = ReconstructionConfig::new(itermax, 1.0, early_stop)?;
            sca_biht(&y, matrix, xi, &z, &cfg)
        };
        match run() {
            Ok(r) => {
                unsafe { write_result(&r, h_re, h_im, n, info) };
                ScfbStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}

/// Runs one end-to-end Monte-Carlo trial with the sweep engine's seed
/// derivation: all randomness is a function of (`master_seed`, scheme,
/// `point`, `trial`), so results match a sweep row produced with the same
/// coordinates.
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one
/// [`ScfbTrialOutcome`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn scfb_run_trial(
    scheme: ScfbScheme,
    snr_db: f64,
    rho: f64,
    c: f64,
    n: usize,
    p: usize,
    xi: usize,
    itermax: usize,
    master_seed: u64,
    point: usize,
    trial: usize,
    out: *mut ScfbTrialOutcome,
) -> ScfbStatus {
    guarded(|| {
        if out.is_null() {
            return ScfbStatus::NullPointer;
        }
        let scheme: Scheme = scheme.into();
        let run = || -> scfb::Result<ScfbTrialOutcome> {
            let seeds = derive_seeds(master_seed, scheme, point, trial);
            let cfg = SchemeConfig::new(scheme, snr_db, rho, c, seeds)?
                .with_dimensions(n, p, xi)?
                .with_itermax(itermax)?;
            let o = run_trial(&cfg)?;
            Ok(ScfbTrialOutcome {
                bit_errors: o.bit_errors(),
                bits_total: o.bits_total(),
                frame_bit_errors: o.frame_bit_errors(),
                nmse: o.nmse_value(),
                iterations_used: o.iterations_used() as u64,
                support_respected: o.support_respected(),
            })
        };
        match run() {
            Ok(o) => {
                unsafe { *out = o };
                ScfbStatus::Ok
            }
            Err(e) => (&e).into(),
        }
    })
}
