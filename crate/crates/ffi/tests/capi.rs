//! Exercises the C ABI through the exported extern "C" functions.

use std::ffi::CStr;
use std::ptr;

use risdoa_ffi::*;

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(risdoa_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn status_messages_are_static_strings() {
    for s in [
        RisdoaStatus::Ok,
        RisdoaStatus::NullPointer,
        RisdoaStatus::InvalidArgument,
        RisdoaStatus::RankDeficient,
        RisdoaStatus::IoError,
        RisdoaStatus::InternalError,
    ] {
        let m = unsafe { CStr::from_ptr(risdoa_status_message(s)) };
        assert!(!m.to_str().unwrap().is_empty());
    }
}

#[test]
fn invalid_dimensions_yield_null_and_message() {
    // K >= N is rejected
    let p = risdoa_pipeline_new(4, 2, 3, 16, 3.0, 1);
    assert!(p.is_null());
    let msg = unsafe { CStr::from_ptr(risdoa_last_error()) };
    assert!(!msg.to_str().unwrap().is_empty());
}

#[test]
fn null_handle_and_null_buffers_are_caught() {
    let mut out = [0.0f64; 3];
    let st = unsafe {
        risdoa_pipeline_run(ptr::null_mut(), 0, out.as_mut_ptr(), out.len(), ptr::null_mut())
    };
    assert_eq!(st, RisdoaStatus::NullPointer);

    let p = risdoa_pipeline_new(4, 8, 3, 16, 3.0, 1);
    assert!(!p.is_null());
    let st = unsafe { risdoa_pipeline_run(p, 0, ptr::null_mut(), 3, ptr::null_mut()) };
    assert_eq!(st, RisdoaStatus::NullPointer);
    let st = unsafe { risdoa_pipeline_set_angles(p, ptr::null(), 3) };
    assert_eq!(st, RisdoaStatus::NullPointer);
    unsafe { risdoa_pipeline_free(p) };
}

#[test]
fn angle_validation_through_the_abi() {
    let p = risdoa_pipeline_new(4, 8, 2, 16, 3.0, 1);
    assert!(!p.is_null());

    let wrong_len = [0.0f64; 3];
    let st = unsafe { risdoa_pipeline_set_angles(p, wrong_len.as_ptr(), wrong_len.len()) };
    assert_eq!(st, RisdoaStatus::InvalidArgument);

    let out_of_range = [-10.0f64, 95.0];
    let st = unsafe { risdoa_pipeline_set_angles(p, out_of_range.as_ptr(), 2) };
    assert_eq!(st, RisdoaStatus::InvalidArgument);

    let dup = [12.0f64, 12.0];
    let st = unsafe { risdoa_pipeline_set_angles(p, dup.as_ptr(), 2) };
    assert_eq!(st, RisdoaStatus::InvalidArgument);

    let ok = [-10.0f64, 35.5];
    let st = unsafe { risdoa_pipeline_set_angles(p, ok.as_ptr(), 2) };
    assert_eq!(st, RisdoaStatus::Ok);

    let st = unsafe { risdoa_pipeline_set_clip(p, -1.0) };
    assert_eq!(st, RisdoaStatus::InvalidArgument);
    let st = unsafe { risdoa_pipeline_set_clip(p, 2.5) };
    assert_eq!(st, RisdoaStatus::Ok);

    unsafe { risdoa_pipeline_free(p) };
}

#[test]
fn noiseless_trial_recovers_angles() {
    let p = risdoa_pipeline_new(4, 12, 2, 24, f64::INFINITY, 42);
    assert!(!p.is_null());
    let truth = [-15.0f64, 30.0];
    let st = unsafe { risdoa_pipeline_set_angles(p, truth.as_ptr(), 2) };
    assert_eq!(st, RisdoaStatus::Ok);

    let mut est = [f64::NAN; 2];
    let mut rmse = f64::NAN;
    let st = unsafe { risdoa_pipeline_run(p, 0, est.as_mut_ptr(), est.len(), &mut rmse) };
    assert_eq!(st, RisdoaStatus::Ok);
    assert!(est.windows(2).all(|w| w[0] <= w[1]));
    for (e, t) in est.iter().zip(truth.iter()) {
        assert!((e - t).abs() < 0.05, "est {e} vs true {t}");
    }
    assert!(rmse < 0.05, "rmse {rmse}");

    unsafe { risdoa_pipeline_free(p) };
}

#[test]
fn trials_are_reproducible_and_indexed() {
    let mk = || {
        let p = risdoa_pipeline_new(4, 8, 2, 16, 6.0, 7);
        assert!(!p.is_null());
        p
    };
    let run = |p, trial| {
        let mut est = [f64::NAN; 2];
        let st = unsafe { risdoa_pipeline_run(p, trial, est.as_mut_ptr(), 2, ptr::null_mut()) };
        assert_eq!(st, RisdoaStatus::Ok);
        est
    };

    let p1 = mk();
    let p2 = mk();
    let a = run(p1, 0);
    let b = run(p2, 0);
    assert_eq!(a, b);
    let c = run(p1, 1);
    assert_ne!(a, c);
    unsafe {
        risdoa_pipeline_free(p1);
        risdoa_pipeline_free(p2);
    }
}

#[test]
fn free_null_is_noop() {
    unsafe { risdoa_pipeline_free(ptr::null_mut()) };
}
