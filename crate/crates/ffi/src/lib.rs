//! C ABI over `resolvent-lab`.
//!
//! Every function returns an [`RlStatus`]; results go through out-pointers.
//! On failure the message is available from [`rl_last_error_message`] on the
//! same thread. Handles are opaque and must be released with the matching
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use resolvent_lab::densities::{self, tail_amplitude, DistributionModel, TailRegime};
use resolvent_lab::ensembles::EnsembleSpec;
use resolvent_lab::resolvent::{sample_g11_exact, sample_g11_matrix, sample_stieltjes_matrix};
use resolvent_lab::stats;
use resolvent_lab::{Error, SampleBatch};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    /// Parameter outside the domain of the law or operation.
    InvalidArgument = 2,
    /// Too few values for the requested statistic.
    InsufficientData = 3,
    /// Matrix draws were rejected beyond the retry budget.
    Partial = 4,
    Unsupported = 5,
    /// Numerical failure (degenerate spectrum, quadrature did not converge).
    Numerical = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// Random matrix ensembles for [`rl_sample_matrix`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlEnsemble {
    Ginibre = 0,
    /// Elliptic Ginibre; uses `tau`.
    Ginue = 1,
    HaarUnitary = 2,
    /// GinUE(tau) x Haar x Ginibre.
    Product = 3,
    Gue = 4,
}

/// Statistic computed from each matrix draw.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatistic {
    /// `[(z - M)^{-1}]_{11}`.
    G11 = 0,
    /// `(1/N) tr (z - M)^{-1}`.
    Trace = 1,
}

/// Regimes with a known tail amplitude.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlTailRegime {
    /// `param` is `|z| < 1`.
    Bulk = 0,
    Critical = 1,
    /// `param` is `alpha`.
    Edge = 2,
    /// `param` is the rescaled overlap.
    Conjecture = 3,
}

macro_rules! c_enum {
    ($t:ident { $($v:ident),+ $(,)? }) => {
        impl $t {
            fn from_raw(raw: u32) -> Result<Self, Fail> {
                $(if raw == $t::$v as u32 {
                    return Ok($t::$v);
                })+
                Err(Fail::Lib(Error::Config(format!(concat!("unknown ", stringify!($t), " value {}"), raw))))
            }
        }
    };
}

c_enum!(RlEnsemble {
    Ginibre,
    Ginue,
    HaarUnitary,
    Product,
    Gue
});
c_enum!(RlStatistic { G11, Trace });
c_enum!(RlTailRegime {
    Bulk,
    Critical,
    Edge,
    Conjecture
});

/// Opaque probability law.
pub struct RlModel(DistributionModel);

/// Opaque batch of complex samples.
pub struct RlBatch(SampleBatch);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RlStatus {
    match e {
        Error::Domain { .. } | Error::Config(_) | Error::Parse(_) => RlStatus::InvalidArgument,
        Error::InsufficientData(_) | Error::EmptySelection(_) => RlStatus::InsufficientData,
        Error::Partial { .. } | Error::Rejected(_) => RlStatus::Partial,
        Error::Unsupported(_) => RlStatus::Unsupported,
        _ => RlStatus::Numerical,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RlStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            RlStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            RlStatus::Internal
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn new_model(m: DistributionModel, dst: *mut *mut RlModel) -> RlStatus {
    guard(|| {
        let dst = out(dst, "out")?;
        m.validate()?;
        *dst = Box::into_raw(Box::new(RlModel(m)));
        Ok(())
    })
}

/// Exact finite-N law of the variance parameter at `|z| = r`.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_finite_n(n: usize, r: f64, dst: *mut *mut RlModel) -> RlStatus {
    new_model(DistributionModel::FiniteNVarianceLaw { n, r }, dst)
}

/// `u^{-2} e^{-1/u}`.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_regime1(dst: *mut *mut RlModel) -> RlStatus {
    new_model(DistributionModel::Regime1Limit, dst)
}

/// Limit law in the critical window.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_regime2(dst: *mut *mut RlModel) -> RlStatus {
    new_model(DistributionModel::Regime2VarianceLaw, dst)
}

/// Edge-window limit law with offset `alpha`.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_regime3(alpha: f64, dst: *mut *mut RlModel) -> RlStatus {
    new_model(DistributionModel::Regime3VarianceLaw { alpha }, dst)
}

/// Complex Student law `(1/π) β / (β + |ω - c|²)²`.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_student(
    beta: f64,
    center_re: f64,
    center_im: f64,
    dst: *mut *mut RlModel,
) -> RlStatus {
    let center = Complex64::new(center_re, center_im);
    new_model(DistributionModel::ComplexStudent { beta, center }, dst)
}

/// Circular complex Gaussian with `E|ω - mean|² = variance`.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_gaussian(
    mean_re: f64,
    mean_im: f64,
    variance: f64,
    dst: *mut *mut RlModel,
) -> RlStatus {
    let mean = Complex64::new(mean_re, mean_im);
    new_model(DistributionModel::ComplexGaussian { mean, variance }, dst)
}

/// Inverse-gamma law with shape `nu` and scale `beta`.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_inverse_gamma(
    nu: f64,
    beta: f64,
    dst: *mut *mut RlModel,
) -> RlStatus {
    new_model(DistributionModel::InverseGamma { nu, beta }, dst)
}

/// Real Cauchy law.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_cauchy(
    location: f64,
    scale: f64,
    dst: *mut *mut RlModel,
) -> RlStatus {
    new_model(DistributionModel::CauchyHermitian { location, scale }, dst)
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from an `rl_model_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_model_free(model: *mut RlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Nonzero for laws on the complex plane.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_model_is_complex(model: *const RlModel, dst: *mut i32) -> RlStatus {
    guard(|| {
        *out(dst, "out")? = get(model, "model")?.0.is_complex() as i32;
        Ok(())
    })
}

/// Density of a real law at `x`.
///
/// # Safety
/// `model` must be a live handle; `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_pdf(model: *const RlModel, x: f64, dst: *mut f64) -> RlStatus {
    guard(|| {
        let m = get(model, "model")?;
        *out(dst, "out")? = m.0.pdf(x)?;
        Ok(())
    })
}

/// Density of a complex law at `re + i im`.
///
/// # Safety
/// `model` must be a live handle; `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_pdf_complex(
    model: *const RlModel,
    re: f64,
    im: f64,
    dst: *mut f64,
) -> RlStatus {
    guard(|| {
        let m = get(model, "model")?;
        *out(dst, "out")? = m.0.pdf_complex(Complex64::new(re, im))?;
        Ok(())
    })
}

/// CDF of a real law at `x`.
///
/// # Safety
/// `model` must be a live handle; `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_cdf(model: *const RlModel, x: f64, dst: *mut f64) -> RlStatus {
    guard(|| {
        let m = get(model, "model")?;
        *out(dst, "out")? = m.0.cdf(x)?;
        Ok(())
    })
}

/// Radial CDF `P(|W - center| <= r)` of a complex law.
///
/// # Safety
/// `model` must be a live handle; `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_radial_cdf(
    model: *const RlModel,
    r: f64,
    dst: *mut f64,
) -> RlStatus {
    guard(|| {
        let m = get(model, "model")?;
        *out(dst, "out")? = m.0.radial_cdf()?.eval(r);
        Ok(())
    })
}

/// `count` i.i.d. draws; real laws have zero imaginary parts.
///
/// # Safety
/// `model` must be a live handle; `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_sample(
    model: *const RlModel,
    count: usize,
    seed: u64,
    dst: *mut *mut RlBatch,
) -> RlStatus {
    guard(|| {
        let m = get(model, "model")?;
        let dst = out(dst, "out")?;
        *dst = Box::into_raw(Box::new(RlBatch(densities::sample(&m.0, count, seed)?)));
        Ok(())
    })
}

/// Matrix draws of a resolvent statistic at `z`. `ensemble` is an
/// [`RlEnsemble`] and `statistic` an [`RlStatistic`]; `tau` is used by
/// `Ginue` and `Product` only.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn rl_sample_matrix(
    ensemble: u32,
    n: usize,
    tau: f64,
    statistic: u32,
    z_re: f64,
    z_im: f64,
    count: usize,
    seed: u64,
    workers: usize,
    dst: *mut *mut RlBatch,
) -> RlStatus {
    guard(|| {
        let dst = out(dst, "out")?;
        let spec = match RlEnsemble::from_raw(ensemble)? {
            RlEnsemble::Ginibre => EnsembleSpec::Ginibre { n },
            RlEnsemble::Ginue => EnsembleSpec::GinUE { n, tau },
            RlEnsemble::HaarUnitary => EnsembleSpec::HaarUnitary { n },
            RlEnsemble::Product => EnsembleSpec::ProductABC { n, tau },
            RlEnsemble::Gue => EnsembleSpec::GUE { n },
        };
        let z = Complex64::new(z_re, z_im);
        let batch = match RlStatistic::from_raw(statistic)? {
            RlStatistic::G11 => sample_g11_matrix(&spec, z, count, seed, workers)?,
            RlStatistic::Trace => sample_stieltjes_matrix(&spec, z, count, seed, workers)?,
        };
        *dst = Box::into_raw(Box::new(RlBatch(batch)));
        Ok(())
    })
}

/// Exact Ginibre `[G]_{11}` draws without matrices.
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_sample_g11_exact(
    n: usize,
    z_re: f64,
    z_im: f64,
    count: usize,
    seed: u64,
    dst: *mut *mut RlBatch,
) -> RlStatus {
    guard(|| {
        let dst = out(dst, "out")?;
        let batch = sample_g11_exact(n, Complex64::new(z_re, z_im), count, seed)?;
        *dst = Box::into_raw(Box::new(RlBatch(batch)));
        Ok(())
    })
}

/// Releases a batch. Null is ignored.
///
/// # Safety
/// `batch` must come from a sampling call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_batch_free(batch: *mut RlBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Number of values in the batch.
///
/// # Safety
/// `batch` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_batch_len(batch: *const RlBatch, dst: *mut usize) -> RlStatus {
    guard(|| {
        *out(dst, "out")? = get(batch, "batch")?.0.len();
        Ok(())
    })
}

/// Copies up to `capacity` values into `re` and `im` (either may be null)
/// and writes the number copied to `written`.
///
/// # Safety
/// Non-null `re`/`im` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn rl_batch_values(
    batch: *const RlBatch,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> RlStatus {
    guard(|| {
        let b = get(batch, "batch")?;
        let k = capacity.min(b.0.len());
        for (i, v) in b.0.values[..k].iter().enumerate() {
            if !re.is_null() {
                *re.add(i) = v.re;
            }
            if !im.is_null() {
                *im.add(i) = v.im;
            }
        }
        if !written.is_null() {
            *written = k;
        }
        Ok(())
    })
}

/// Draws rejected and resampled while filling the batch.
///
/// # Safety
/// `batch` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_batch_rejections(batch: *const RlBatch, dst: *mut usize) -> RlStatus {
    guard(|| {
        *out(dst, "out")? = get(batch, "batch")?.0.rejections;
        Ok(())
    })
}

/// Log-log fit of the radial survival function of `|W - center|` over the
/// quantile window `[q_lo, q_hi]`. `amplitude` uses the slope pinned at -2.
///
/// # Safety
/// `batch` must be a live handle; `slope`/`amplitude` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_batch_tail_fit(
    batch: *const RlBatch,
    center_re: f64,
    center_im: f64,
    q_lo: f64,
    q_hi: f64,
    slope: *mut f64,
    amplitude: *mut f64,
) -> RlStatus {
    guard(|| {
        let b = get(batch, "batch")?;
        let (s, a) = (out(slope, "slope")?, out(amplitude, "amplitude")?);
        let fit = stats::tail_fit(
            &b.0.values,
            Complex64::new(center_re, center_im),
            q_lo,
            q_hi,
        )?;
        *s = fit.slope;
        *a = fit.amplitude();
        Ok(())
    })
}

/// KS distance of `|W - center|` against a complex model's radial CDF, or of
/// the real parts against a real model's CDF.
///
/// # Safety
/// Handles must be live; `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_batch_ks_model(
    batch: *const RlBatch,
    model: *const RlModel,
    dst: *mut f64,
) -> RlStatus {
    guard(|| {
        let b = get(batch, "batch")?;
        let m = get(model, "model")?;
        let d = out(dst, "out")?;
        if m.0.is_complex() {
            let radial = m.0.radial_cdf()?;
            let c = m.0.center();
            let radii: Vec<f64> = b.0.values.iter().map(|v| (v - c).norm()).collect();
            *d = stats::ks_one_sample(&radii, |r| radial.eval(r))?;
        } else {
            let err = std::cell::Cell::new(None);
            let ks = stats::ks_one_sample(&b.0.real_parts(), |x| {
                m.0.cdf(x).unwrap_or_else(|e| {
                    err.set(Some(e));
                    f64::NAN
                })
            })?;
            if let Some(e) = err.into_inner() {
                return Err(e.into());
            }
            *d = ks;
        }
        Ok(())
    })
}

/// Two-sample KS distance between two arrays.
///
/// # Safety
/// `a` and `b` must point to `na` and `nb` doubles.
#[no_mangle]
pub unsafe extern "C" fn rl_ks_two_sample(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    dst: *mut f64,
) -> RlStatus {
    guard(|| {
        let (a, b) = (slice(a, na, "a")?, slice(b, nb, "b")?);
        *out(dst, "out")? = stats::ks_two_sample(a, b)?;
        Ok(())
    })
}

/// Coefficient `A` of `P(|W| >= G) ~ A / G^2`; `regime` is an [`RlTailRegime`].
///
/// # Safety
/// `dst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_tail_amplitude(regime: u32, param: f64, dst: *mut f64) -> RlStatus {
    guard(|| {
        let d = out(dst, "out")?;
        let r = match RlTailRegime::from_raw(regime)? {
            RlTailRegime::Bulk => TailRegime::Bulk { z_modulus: param },
            RlTailRegime::Critical => TailRegime::Critical,
            RlTailRegime::Edge => TailRegime::Edge { alpha: param },
            RlTailRegime::Conjecture => TailRegime::Conjecture {
                rescaled_overlap: param,
            },
        };
        *d = tail_amplitude(r)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enum_values_roundtrip() {
        assert_eq!(RlEnsemble::from_raw(3).ok(), Some(RlEnsemble::Product));
        assert!(RlEnsemble::from_raw(5).is_err());
        assert_eq!(RlStatistic::from_raw(1).ok(), Some(RlStatistic::Trace));
        assert!(RlTailRegime::from_raw(4).is_err());
    }

    #[test]
    fn panics_become_internal_errors() {
        assert_eq!(guard(|| panic!("boom")), RlStatus::Internal);
        let msg = unsafe { std::ffi::CStr::from_ptr(rl_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
    }

    #[test]
    fn status_mapping() {
        assert_eq!(
            status_of(&Error::Config("x".into())),
            RlStatus::InvalidArgument
        );
        assert_eq!(
            status_of(&Error::Unsupported("x".into())),
            RlStatus::Unsupported
        );
        assert_eq!(
            status_of(&Error::DegenerateSpectrum("x".into())),
            RlStatus::Numerical
        );
    }
}
