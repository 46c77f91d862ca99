//! C ABI for the deviation-test library.
//!
//! Conventions:
//! - Every fallible function returns a [`TabdevStatus`] and writes its result
//!   through out-pointers; `TABDEV_STATUS_OK` (0) means success.
//! - Test results are opaque handles created by `tabdev_one_sample_test` /
//!   `tabdev_two_sample_test`, read through `tabdev_result_*` accessors and
//!   released with `tabdev_result_free`.
//! - Matrices are passed as dense row-major `double` buffers (rows =
//!   observations).
//! - No function panics across the boundary; internal panics surface as
//!   `TABDEV_STATUS_PANIC`.
//!
//! The build script regenerates `include/tabdev.h` with cbindgen on every
//! build.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use tabdev::bandit::{bandit_tail_prob, BanditParams};
use tabdev::matrix::{Matrix, SampleMatrix};
use tabdev::power::{kappa_one_sample, theoretical_rejection_prob, PopulationSpec};
use tabdev::tab::{one_sample_deviation_test, OneSampleConfig, TabTrajectory, TestResult};
use tabdev::two_sample::{two_sample_deviation_test, TwoSampleConfig};
use tabdev::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabdevStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DegenerateScale = 4,
    FactorizationError = 5,
    ParseError = 6,
    IoError = 7,
    Panic = 8,
}

fn status_of(err: &Error) -> TabdevStatus {
    match err {
        Error::Domain(_) | Error::Config(_) => TabdevStatus::InvalidArgument,
        Error::DimensionMismatch(_) => TabdevStatus::DimensionMismatch,
        Error::DegenerateScale(_) => TabdevStatus::DegenerateScale,
        Error::Factorization(_) => TabdevStatus::FactorizationError,
        Error::Parse { .. } => TabdevStatus::ParseError,
        Error::Io(_) => TabdevStatus::IoError,
    }
}

fn guarded(f: impl FnOnce() -> TabdevStatus) -> TabdevStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => TabdevStatus::Panic,
    }
}

/// Opaque handle to a finished test run (decision plus trajectory).
pub struct TabdevTestResult {
    result: TestResult,
    trajectory: TabTrajectory,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tabdev_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Human-readable description of a status code (static storage).
#[no_mangle]
pub extern "C" fn tabdev_status_message(status: TabdevStatus) -> *const c_char {
    let msg: &'static str = match status {
        TabdevStatus::Ok => "ok\0",
        TabdevStatus::NullPointer => "null pointer argument\0",
        TabdevStatus::InvalidArgument => "invalid argument\0",
        TabdevStatus::DimensionMismatch => "dimension mismatch\0",
        TabdevStatus::DegenerateScale => "degenerate scale (constant targets)\0",
        TabdevStatus::FactorizationError => "matrix factorization failed\0",
        TabdevStatus::ParseError => "parse error\0",
        TabdevStatus::IoError => "I/O error\0",
        TabdevStatus::Panic => "internal panic\0",
    };
    msg.as_ptr() as *const c_char
}

fn write_out(out: *mut f64, value: tabdev::Result<f64>) -> TabdevStatus {
    if out.is_null() {
        return TabdevStatus::NullPointer;
    }
    match value {
        Ok(v) => {
            unsafe { *out = v };
            TabdevStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Density of the bandit distribution B(kappa) at `x`.
///
/// # Safety
/// `out` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn tabdev_bandit_pdf(x: f64, kappa: f64, out: *mut f64) -> TabdevStatus {
    guarded(|| write_out(out, BanditParams::new(kappa).and_then(|p| p.pdf(x))))
}

/// CDF of B(kappa) at `x`.
///
/// # Safety
/// `out` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn tabdev_bandit_cdf(x: f64, kappa: f64, out: *mut f64) -> TabdevStatus {
    guarded(|| write_out(out, BanditParams::new(kappa).and_then(|p| p.cdf(x))))
}

/// Quantile of B(kappa) at `q` in (0,1).
///
/// # Safety
/// `out` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn tabdev_bandit_quantile(q: f64, kappa: f64, out: *mut f64) -> TabdevStatus {
    guarded(|| write_out(out, BanditParams::new(kappa).and_then(|p| p.quantile(q))))
}

/// Tail probability g(kappa) = P(|B(-kappa)| > z), `z >= 0`.
///
/// # Safety
/// `out` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn tabdev_bandit_tail_prob(
    kappa: f64,
    z: f64,
    out: *mut f64,
) -> TabdevStatus {
    guarded(|| write_out(out, bandit_tail_prob(kappa, z)))
}

/// Fills `out[0..count]` with i.i.d. B(kappa) draws from a seeded stream.
///
/// # Safety
/// `out` must point to a writable buffer of at least `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn tabdev_bandit_sample(
    kappa: f64,
    seed: u64,
    count: usize,
    out: *mut f64,
) -> TabdevStatus {
    guarded(|| {
        if out.is_null() {
            return TabdevStatus::NullPointer;
        }
        let params = match BanditParams::new(kappa) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match params.sample(&mut rng, count) {
            Ok(xs) => {
                let dst = unsafe { std::slice::from_raw_parts_mut(out, count) };
                dst.copy_from_slice(&xs);
                TabdevStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

fn build_matrix(data: *const f64, rows: usize, cols: usize) -> Result<SampleMatrix, TabdevStatus> {
    if data.is_null() {
        return Err(TabdevStatus::NullPointer);
    }
    if rows == 0 || cols == 0 || rows.checked_mul(cols).is_none() {
        return Err(TabdevStatus::InvalidArgument);
    }
    let slice = unsafe { std::slice::from_raw_parts(data, rows * cols) };
    SampleMatrix::new(slice.to_vec(), rows, cols).map_err(|e| status_of(&e))
}

/// One-sample deviation test of `||mu - mu0|| > d0` on `t x n` row-major
/// `data`. `mu0` may be NULL for the zero reference. On success `*out` owns a
/// new result handle.
///
/// # Safety
/// `data` must point to `t * n` doubles, `mu0` to `n` doubles when non-NULL,
/// and `out` to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn tabdev_one_sample_test(
    data: *const f64,
    t: usize,
    n: usize,
    mu0: *const f64,
    d0: f64,
    alpha: f64,
    split_fraction: f64,
    out: *mut *mut TabdevTestResult,
) -> TabdevStatus {
    guarded(|| {
        if out.is_null() {
            return TabdevStatus::NullPointer;
        }
        let matrix = match build_matrix(data, t, n) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let mu0_vec = if mu0.is_null() {
            None
        } else {
            Some(unsafe { std::slice::from_raw_parts(mu0, n) }.to_vec())
        };
        let cfg = OneSampleConfig {
            d0,
            mu0: mu0_vec,
            alpha,
            split_fraction,
        };
        match one_sample_deviation_test(&matrix, &cfg) {
            Ok((result, trajectory)) => {
                let handle = Box::new(TabdevTestResult { result, trajectory });
                unsafe { *out = Box::into_raw(handle) };
                TabdevStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Two-sample deviation test of `||mu1 - mu2|| > d0`; `x` is `m1 x n`, `z` is
/// `m2 x n`, both row-major. `n0 = 0` selects the default TAB-phase length
/// (a third of the smaller group).
///
/// # Safety
/// `x` must point to `m1 * n` doubles, `z` to `m2 * n` doubles, and `out` to
/// a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn tabdev_two_sample_test(
    x: *const f64,
    m1: usize,
    z: *const f64,
    m2: usize,
    n: usize,
    d0: f64,
    alpha: f64,
    n0: usize,
    out: *mut *mut TabdevTestResult,
) -> TabdevStatus {
    guarded(|| {
        if out.is_null() {
            return TabdevStatus::NullPointer;
        }
        let xm = match build_matrix(x, m1, n) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let zm = match build_matrix(z, m2, n) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let n0 = if n0 == 0 {
            TwoSampleConfig::default_n0(m1, m2)
        } else {
            n0
        };
        let cfg = TwoSampleConfig::new(d0, alpha, n0);
        match two_sample_deviation_test(&xm, &zm, &cfg) {
            Ok((result, trajectory)) => {
                let handle = Box::new(TabdevTestResult { result, trajectory });
                unsafe { *out = Box::into_raw(handle) };
                TabdevStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

macro_rules! result_getter {
    ($name:ident, $field:ident) => {
        /// Field accessor; returns NaN when the handle is NULL.
        ///
        /// # Safety
        /// `result` must be NULL or a live handle from a `tabdev_*_test` call.
        #[no_mangle]
        pub unsafe extern "C" fn $name(result: *const TabdevTestResult) -> f64 {
            if result.is_null() {
                return f64::NAN;
            }
            unsafe { (*result).result.$field }
        }
    };
}

result_getter!(tabdev_result_statistic, statistic);
result_getter!(tabdev_result_p_value, p_value);
result_getter!(tabdev_result_critical_value, critical_value);

/// 1 if the deviation hypothesis was rejected, 0 if not, -1 on NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from a `tabdev_*_test` call.
#[no_mangle]
pub unsafe extern "C" fn tabdev_result_reject(result: *const TabdevTestResult) -> i32 {
    if result.is_null() {
        return -1;
    }
    unsafe { (*result).result.reject_h0 as i32 }
}

/// Estimated mean of the target variables; NaN on NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from a `tabdev_*_test` call.
#[no_mangle]
pub unsafe extern "C" fn tabdev_result_tau_hat(result: *const TabdevTestResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { (*result).trajectory.nuisance.tau_hat }
}

/// Estimated variance of the target variables; NaN on NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from a `tabdev_*_test` call.
#[no_mangle]
pub unsafe extern "C" fn tabdev_result_sigma2_hat(result: *const TabdevTestResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { (*result).trajectory.nuisance.sigma2_hat }
}

/// Number of TAB steps (the trajectory length); 0 on NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from a `tabdev_*_test` call.
#[no_mangle]
pub unsafe extern "C" fn tabdev_result_len(result: *const TabdevTestResult) -> usize {
    if result.is_null() {
        return 0;
    }
    unsafe { (*result).trajectory.partials.len() }
}

/// Copies the partial statistics `M_1..M_T2` into `buf[0..len]`; `len` must
/// equal `tabdev_result_len`.
///
/// # Safety
/// `result` must be a live handle and `buf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn tabdev_result_trajectory(
    result: *const TabdevTestResult,
    buf: *mut f64,
    len: usize,
) -> TabdevStatus {
    guarded(|| {
        if result.is_null() || buf.is_null() {
            return TabdevStatus::NullPointer;
        }
        let partials = &unsafe { &*result }.trajectory.partials;
        if partials.len() != len {
            return TabdevStatus::DimensionMismatch;
        }
        unsafe { std::slice::from_raw_parts_mut(buf, len) }.copy_from_slice(partials);
        TabdevStatus::Ok
    })
}

/// Releases a result handle; NULL is a no-op.
///
/// # Safety
/// `result` must be NULL or a handle not previously freed.
#[no_mangle]
pub unsafe extern "C" fn tabdev_result_free(result: *mut TabdevTestResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// One-sample drift parameter kappa for population `(mu, sigma)` (`sigma` is
/// `n x n` row-major); the limiting law of the statistic is B(-kappa).
///
/// # Safety
/// `mu` must point to `n` doubles, `sigma` to `n * n` doubles, `out` to a
/// writable `double`.
#[no_mangle]
pub unsafe extern "C" fn tabdev_kappa_one_sample(
    mu: *const f64,
    n: usize,
    sigma: *const f64,
    d0: f64,
    t1: usize,
    t2: usize,
    out: *mut f64,
) -> TabdevStatus {
    guarded(|| {
        if mu.is_null() || sigma.is_null() || out.is_null() {
            return TabdevStatus::NullPointer;
        }
        if n == 0 {
            return TabdevStatus::InvalidArgument;
        }
        let mu = unsafe { std::slice::from_raw_parts(mu, n) }.to_vec();
        let sigma = unsafe { std::slice::from_raw_parts(sigma, n * n) }.to_vec();
        let value = Matrix::from_row_major(sigma, n, n)
            .and_then(|s| PopulationSpec::new(mu, s))
            .and_then(|pop| kappa_one_sample(&pop, d0, t1, t2));
        write_out(out, value)
    })
}

/// Predicted rejection probability `g(kappa)` at significance `alpha`.
///
/// # Safety
/// `out` must be a valid pointer to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn tabdev_theoretical_rejection_prob(
    kappa: f64,
    alpha: f64,
    out: *mut f64,
) -> TabdevStatus {
    guarded(|| write_out(out, theoretical_rejection_prob(kappa, alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_and_messages_are_nul_terminated() {
        let v = unsafe { std::ffi::CStr::from_ptr(tabdev_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
        let m = unsafe { std::ffi::CStr::from_ptr(tabdev_status_message(TabdevStatus::Ok)) };
        assert_eq!(m.to_str().unwrap(), "ok");
    }

    #[test]
    fn bandit_functions_round_trip() {
        unsafe {
            let mut v = 0.0f64;
            assert_eq!(tabdev_bandit_pdf(0.0, 0.0, &mut v), TabdevStatus::Ok);
            assert!((v - 0.3989422804014327).abs() < 1e-15);

            assert_eq!(
                tabdev_bandit_tail_prob(0.0, 1.959964, &mut v),
                TabdevStatus::Ok
            );
            assert!((v - 0.05).abs() < 1e-7);

            assert_eq!(tabdev_bandit_cdf(0.0, -2.0, &mut v), TabdevStatus::Ok);
            assert_eq!(v, 0.5);

            assert_eq!(tabdev_bandit_quantile(0.9, 1.0, &mut v), TabdevStatus::Ok);
            let mut back = 0.0f64;
            assert_eq!(tabdev_bandit_cdf(v, 1.0, &mut back), TabdevStatus::Ok);
            assert!((back - 0.9).abs() < 1e-10);

            assert_eq!(
                tabdev_bandit_pdf(f64::NAN, 0.0, &mut v),
                TabdevStatus::InvalidArgument
            );
            assert_eq!(
                tabdev_bandit_tail_prob(0.0, -1.0, &mut v),
                TabdevStatus::InvalidArgument
            );
            assert_eq!(
                tabdev_bandit_pdf(0.0, 0.0, std::ptr::null_mut()),
                TabdevStatus::NullPointer
            );
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mut a = vec![0.0f64; 32];
        let mut b = vec![0.0f64; 32];
        unsafe {
            assert_eq!(
                tabdev_bandit_sample(-1.0, 5, 32, a.as_mut_ptr()),
                TabdevStatus::Ok
            );
            assert_eq!(
                tabdev_bandit_sample(-1.0, 5, 32, b.as_mut_ptr()),
                TabdevStatus::Ok
            );
        }
        assert_eq!(a, b);
    }

    #[test]
    fn one_sample_handle_lifecycle() {
        // 8 observations of dimension 2 with an obvious mean near (1, 0).
        let data: Vec<f64> = vec![
            0.9, 0.1, 1.1, -0.2, 0.8, 0.05, 1.2, 0.1, 0.95, -0.1, 1.05, 0.0, 0.9, 0.15, 1.0, -0.05,
        ];
        unsafe {
            let mut handle: *mut TabdevTestResult = std::ptr::null_mut();
            let status = tabdev_one_sample_test(
                data.as_ptr(),
                8,
                2,
                std::ptr::null(),
                1.0,
                0.05,
                0.5,
                &mut handle,
            );
            assert_eq!(status, TabdevStatus::Ok);
            assert!(!handle.is_null());

            // Must agree exactly with the direct library call.
            let matrix = SampleMatrix::new(data.clone(), 8, 2).unwrap();
            let (expect, _) =
                one_sample_deviation_test(&matrix, &OneSampleConfig::new(1.0, 0.05)).unwrap();
            assert_eq!(
                tabdev_result_statistic(handle).to_bits(),
                expect.statistic.to_bits()
            );
            assert_eq!(
                tabdev_result_p_value(handle).to_bits(),
                expect.p_value.to_bits()
            );
            assert_eq!(tabdev_result_reject(handle), expect.reject_h0 as i32);

            let len = tabdev_result_len(handle);
            assert_eq!(len, 4);
            let mut traj = vec![0.0f64; len];
            assert_eq!(
                tabdev_result_trajectory(handle, traj.as_mut_ptr(), len),
                TabdevStatus::Ok
            );
            assert_eq!(*traj.last().unwrap(), expect.statistic);
            let mut bigger = vec![0.0f64; len + 1];
            assert_eq!(
                tabdev_result_trajectory(handle, bigger.as_mut_ptr(), len + 1),
                TabdevStatus::DimensionMismatch
            );
            tabdev_result_free(handle);
            tabdev_result_free(std::ptr::null_mut());
        }
    }

    #[test]
    fn two_sample_errors_surface_as_codes() {
        let x = [0.5f64; 20];
        let z = [0.5f64; 20];
        unsafe {
            let mut handle: *mut TabdevTestResult = std::ptr::null_mut();
            // Constant identical groups with d0 = 1: Y_i = -1 and the test
            // rejects deterministically.
            let status = tabdev_two_sample_test(
                x.as_ptr(),
                10,
                z.as_ptr(),
                10,
                2,
                1.0,
                0.05,
                5,
                &mut handle,
            );
            assert_eq!(status, TabdevStatus::Ok);
            assert_eq!(tabdev_result_reject(handle), 1);
            tabdev_result_free(handle);

            // n0 too large for the groups.
            let status = tabdev_two_sample_test(
                x.as_ptr(),
                10,
                z.as_ptr(),
                10,
                2,
                1.0,
                0.05,
                10,
                &mut handle,
            );
            assert_eq!(status, TabdevStatus::InvalidArgument);

            let status = tabdev_two_sample_test(
                std::ptr::null(),
                10,
                z.as_ptr(),
                10,
                2,
                1.0,
                0.05,
                5,
                &mut handle,
            );
            assert_eq!(status, TabdevStatus::NullPointer);
        }
    }

    #[test]
    fn kappa_and_power_through_the_c_surface() {
        let n = 4usize;
        let mu = vec![0.5f64; n]; // ||mu||^2 = 1
        let sigma: Vec<f64> = (0..n * n)
            .map(|i| if i % (n + 1) == 0 { 1.0 } else { 0.0 })
            .collect();
        unsafe {
            let mut kappa = 0.0f64;
            let status =
                tabdev_kappa_one_sample(mu.as_ptr(), n, sigma.as_ptr(), 1.0, 50, 50, &mut kappa);
            assert_eq!(status, TabdevStatus::Ok);
            assert!(kappa.abs() < 1e-12, "boundary kappa = {kappa}");

            let mut p = 0.0f64;
            assert_eq!(
                tabdev_theoretical_rejection_prob(0.0, 0.05, &mut p),
                TabdevStatus::Ok
            );
            assert!((p - 0.05).abs() < 1e-12);
            assert_eq!(
                tabdev_theoretical_rejection_prob(0.0, 1.5, &mut p),
                TabdevStatus::InvalidArgument
            );
        }
    }
}
