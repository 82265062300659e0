use std::ffi::CStr;
use std::ptr;

use kac_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kac_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn gaps_through_the_c_interface() {
    let (mut a, mut up) = (0.0, 0.0);
    unsafe {
        assert_eq!(kac_first_gap(3, 1.0, 1.0, 1.0, &mut a), KacStatus::Ok);
        assert_eq!(a, 0.5);
        assert_eq!(kac_second_gap(3, 1.0, 1.0, 1.0, &mut a, &mut up), KacStatus::Ok);
        assert!((a - 0.75).abs() < 1e-12 && (up - 2.125).abs() < 1e-12);
        assert_eq!(kac_second_gap(3, 1.0, 0.0, 1.0, &mut a, ptr::null_mut()), KacStatus::InvalidParameter);
        assert!(last_error().contains("mu"));
        assert_eq!(kac_first_gap(3, 1.0, 1.0, 1.0, ptr::null_mut()), KacStatus::NullPointer);
    }
    assert_eq!(kac_second_gap_limit(1.0, 1.0), 1.0);
}

#[test]
fn ensemble_lifecycle() {
    unsafe {
        let mut ens = ptr::null_mut();
        assert_eq!(kac_ensemble_new(50, 1.0, 1.0, 1.0, 2.0, 200, 7, &mut ens), KacStatus::Ok);
        assert!(!ens.is_null());
        let (mut k, mut err) = (0.0, 0.0);
        assert_eq!(kac_ensemble_kinetic_energy(ens, &mut k, &mut err), KacStatus::Ok);
        assert!((k - 50.0).abs() < 5.0 * err);
        assert_eq!(kac_ensemble_advance(ens, 20.0), KacStatus::Ok);
        assert_eq!(kac_ensemble_kinetic_energy(ens, &mut k, &mut err), KacStatus::Ok);
        assert!((k - 25.0).abs() < 5.0 * err + 0.05);
        let mut m = [0.0; 6];
        assert_eq!(kac_ensemble_moments(ens, m.as_mut_ptr(), 6), KacStatus::Ok);
        assert!((m[1] - 1.0).abs() < 0.05);
        assert_eq!(kac_ensemble_moments(ens, m.as_mut_ptr(), 7), KacStatus::InvalidParameter);
        assert_eq!(kac_ensemble_advance(ens, 1.0), KacStatus::InvalidParameter);
        let mut t = 0.0;
        assert_eq!(kac_ensemble_time(ens, &mut t), KacStatus::Ok);
        assert_eq!(t, 20.0);
        kac_ensemble_free(ens);

        assert_eq!(kac_ensemble_new(5, 0.0, 0.0, 1.0, 1.0, 1, 1, &mut ens), KacStatus::NoEvents);
        assert!(ens.is_null());
        kac_ensemble_free(ptr::null_mut());
    }
}

#[test]
fn moment_integration_into_a_buffer() {
    let m0 = [1.0, 0.0, 2.0, 0.0, 12.0];
    let mut out = vec![0.0; 3 * 5];
    unsafe {
        let s = kac_integrate_moments(m0.as_ptr(), 4, 1.0, 1.0, 1.0, 2.0, 2, out.as_mut_ptr(), out.len());
        assert_eq!(s, KacStatus::Ok);
        let short = kac_integrate_moments(m0.as_ptr(), 4, 1.0, 1.0, 1.0, 2.0, 2, out.as_mut_ptr(), 4);
        assert_eq!(short, KacStatus::BufferTooSmall);
    }
    for (k, t) in [0.0f64, 1.0, 2.0].iter().enumerate() {
        let m2 = 1.0 + (-0.5 * t).exp();
        assert!((out[k * 5 + 2] - m2).abs() < 1e-9);
        assert_eq!(out[k * 5], 1.0);
    }
}

#[test]
fn header_declares_the_interface() {
    let h = include_str!("../include/kac_ffi.h");
    for name in [
        "kac_ensemble_new",
        "kac_ensemble_free",
        "kac_first_gap",
        "kac_second_gap",
        "kac_integrate_moments",
        "kac_last_error",
        "KAC_STATUS_OK",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
