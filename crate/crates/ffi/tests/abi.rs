use std::ffi::CStr;
use std::ptr;

use resolvent_lab_ffi::*;

fn last_error() -> String {
    let p = rl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn model_lifecycle_and_values() {
    unsafe {
        let mut m: *mut RlModel = ptr::null_mut();
        assert_eq!(rl_model_cauchy(0.0, 1.0, &mut m), RlStatus::Ok);
        let mut v = 0.0;
        assert_eq!(rl_model_pdf(m, 0.0, &mut v), RlStatus::Ok);
        assert!((v - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(rl_model_cdf(m, 0.0, &mut v), RlStatus::Ok);
        assert!((v - 0.5).abs() < 1e-15);
        let mut complex = 1;
        assert_eq!(rl_model_is_complex(m, &mut complex), RlStatus::Ok);
        assert_eq!(complex, 0);
        assert_eq!(rl_model_radial_cdf(m, 1.0, &mut v), RlStatus::Unsupported);
        rl_model_free(m);
        rl_model_free(ptr::null_mut());

        let mut s: *mut RlModel = ptr::null_mut();
        assert_eq!(rl_model_student(2.0, 0.5, 0.0, &mut s), RlStatus::Ok);
        assert_eq!(rl_model_radial_cdf(s, 2.0_f64.sqrt(), &mut v), RlStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        rl_model_free(s);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m: *mut RlModel = ptr::null_mut();
        assert_eq!(rl_model_finite_n(0, 0.5, &mut m), RlStatus::InvalidArgument);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(rl_model_regime1(ptr::null_mut()), RlStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut v = 0.0;
        assert_eq!(
            rl_model_pdf(ptr::null(), 1.0, &mut v),
            RlStatus::NullPointer
        );
        assert_eq!(
            rl_tail_amplitude(99, 0.0, &mut v),
            RlStatus::InvalidArgument
        );
        assert!(last_error().contains("RlTailRegime"));
        assert_eq!(
            rl_tail_amplitude(RlTailRegime::Bulk as u32, 1.5, &mut v),
            RlStatus::InvalidArgument
        );
        let mut b: *mut RlBatch = ptr::null_mut();
        assert_eq!(
            rl_sample_matrix(7, 10, 0.0, 0, 0.0, 0.0, 1, 1, 1, &mut b),
            RlStatus::InvalidArgument
        );
        assert_eq!(
            rl_ks_two_sample(ptr::null(), 0, [1.0].as_ptr(), 1, &mut v),
            RlStatus::InsufficientData
        );
    }
}

#[test]
fn sampling_matches_the_library() {
    unsafe {
        let mut b: *mut RlBatch = ptr::null_mut();
        assert_eq!(
            rl_sample_g11_exact(30, 0.4, 0.1, 64, 5, &mut b),
            RlStatus::Ok
        );
        let direct = resolvent_lab::resolvent::sample_g11_exact(
            30,
            num_complex::Complex64::new(0.4, 0.1),
            64,
            5,
        )
        .unwrap();
        let mut re = vec![0.0; 64];
        let mut im = vec![0.0; 64];
        let mut written = 0;
        assert_eq!(
            rl_batch_values(b, re.as_mut_ptr(), im.as_mut_ptr(), 64, &mut written),
            RlStatus::Ok
        );
        assert_eq!(written, 64);
        for (i, v) in direct.values.iter().enumerate() {
            assert_eq!((re[i], im[i]), (v.re, v.im));
        }
        let mut rej = 1;
        assert_eq!(rl_batch_rejections(b, &mut rej), RlStatus::Ok);
        assert_eq!(rej, 0);
        rl_batch_free(b);

        let mut t: *mut RlBatch = ptr::null_mut();
        assert_eq!(
            rl_sample_matrix(
                RlEnsemble::Gue as u32,
                40,
                0.0,
                RlStatistic::Trace as u32,
                0.3,
                0.05,
                8,
                2,
                2,
                &mut t
            ),
            RlStatus::Ok
        );
        let mut len = 0;
        assert_eq!(rl_batch_len(t, &mut len), RlStatus::Ok);
        assert_eq!(len, 8);
        rl_batch_free(t);
    }
}

#[test]
fn two_sample_ks_of_identical_arrays_is_zero() {
    let a = [0.3, 1.0, -2.0, 4.5];
    let mut d = 1.0;
    unsafe {
        assert_eq!(
            rl_ks_two_sample(a.as_ptr(), a.len(), a.as_ptr(), a.len(), &mut d),
            RlStatus::Ok
        );
    }
    assert_eq!(d, 0.0);
}
