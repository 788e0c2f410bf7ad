use std::ffi::CStr;
use std::ptr;

use tvdp_ffi::*;

fn last_error() -> Option<String> {
    let p = tvdp_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn curve_round_trip() {
    unsafe {
        let mut c: *mut TvdpCurve = ptr::null_mut();
        assert_eq!(tvdp_curve_from_budget(1.0, 0.0, 0.3, &mut c), TvdpStatus::Ok);
        assert!(last_error().is_none());
        let mut n = 0usize;
        assert_eq!(tvdp_curve_vertex_count(c, &mut n), TvdpStatus::Ok);
        assert_eq!(n, 4);
        let (mut xs, mut ys) = (vec![0.0; n], vec![0.0; n]);
        let mut w = 0usize;
        assert_eq!(tvdp_curve_vertices(c, xs.as_mut_ptr(), ys.as_mut_ptr(), n, &mut w), TvdpStatus::Ok);
        assert_eq!(w, n);
        assert_eq!((xs[0], ys[0]), (0.0, 1.0));
        let mut tv = 0.0;
        assert_eq!(tvdp_curve_tv(c, &mut tv), TvdpStatus::Ok);
        assert!((tv - 0.3).abs() < 1e-12);

        let mut copy: *mut TvdpCurve = ptr::null_mut();
        assert_eq!(tvdp_curve_new(xs.as_ptr(), ys.as_ptr(), n, &mut copy), TvdpStatus::Ok);
        let mut v = 0.0;
        assert_eq!(tvdp_curve_eval(copy, 0.1, &mut v), TvdpStatus::Ok);
        let mut v0 = 0.0;
        tvdp_curve_eval(c, 0.1, &mut v0);
        assert_eq!(v, v0);

        let list = [c as *const TvdpCurve, copy as *const TvdpCurve];
        let mut both: *mut TvdpCurve = ptr::null_mut();
        assert_eq!(tvdp_curve_intersect(list.as_ptr(), 2, &mut both), TvdpStatus::Ok);
        let mut d = 1.0;
        assert_eq!(tvdp_curve_delta_for_epsilon(both, 1.0, &mut d), TvdpStatus::Ok);
        assert!(d.abs() < 1e-12);
        tvdp_curve_free(both);
        tvdp_curve_free(copy);
        tvdp_curve_free(c);
        tvdp_curve_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut c: *mut TvdpCurve = ptr::null_mut();
        assert_eq!(tvdp_curve_from_budget(1.0, 0.0, 0.9, &mut c), TvdpStatus::Infeasible);
        assert!(c.is_null());
        assert!(last_error().unwrap().contains("eta exceeds"));
        assert_eq!(tvdp_curve_from_budget(1.0, 0.0, 0.3, ptr::null_mut()), TvdpStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(tvdp_curve_tv(ptr::null(), &mut v), TvdpStatus::NullPointer);
        assert_eq!(tvdp_laplace_tv(-1.0, &mut v), TvdpStatus::InvalidArgument);
        assert!(last_error().is_some());
        assert_eq!(tvdp_laplace_tv(1.0, &mut v), TvdpStatus::Ok);
        assert!(last_error().is_none());
        let mut l: *mut TvdpLedger = ptr::null_mut();
        assert_eq!(
            tvdp_compose(1.0, 0.0, 0.3, 1_000_000, TvdpComposeMode::Exact, 0.0, &mut l),
            TvdpStatus::Capacity
        );
    }
}

#[test]
fn composition_ledger() {
    unsafe {
        let mut l: *mut TvdpLedger = ptr::null_mut();
        let eta = 0.7 * 0.5f64.tanh();
        assert_eq!(tvdp_compose(1.0, 0.0, eta, 2, TvdpComposeMode::Exact, 0.0, &mut l), TvdpStatus::Ok);
        let mut n = 0;
        tvdp_ledger_len(l, &mut n);
        assert_eq!(n, 3);
        let (mut j, mut e, mut d) = (0usize, 0.0, 0.0);
        assert_eq!(tvdp_ledger_entry(l, 0, &mut j, &mut e, &mut d), TvdpStatus::Ok);
        assert_eq!((j, e), (0, 0.0));
        assert!((d - 0.4205266).abs() < 1e-6);
        assert_eq!(tvdp_ledger_entry(l, 9, &mut j, &mut e, &mut d), TvdpStatus::InvalidArgument);
        let mut tv = 0.0;
        tvdp_ledger_tv(l, &mut tv);
        assert_eq!(tv, d);
        let mut c: *mut TvdpCurve = ptr::null_mut();
        assert_eq!(tvdp_ledger_to_curve(l, &mut c), TvdpStatus::Ok);
        let mut ctv = 0.0;
        tvdp_curve_tv(c, &mut ctv);
        assert!((ctv - tv).abs() < 1e-9);
        tvdp_curve_free(c);
        tvdp_ledger_free(l);

        let mut t: *mut TvdpLedger = ptr::null_mut();
        assert_eq!(tvdp_compose(1.0, 0.0, eta, 2, TvdpComposeMode::Types, 1e-12, &mut t), TvdpStatus::Ok);
        tvdp_ledger_free(t);
        let mut k: *mut TvdpLedger = ptr::null_mut();
        assert_eq!(tvdp_compose(1.0, 0.0, 0.0, 4, TvdpComposeMode::Kairouz, 0.0, &mut k), TvdpStatus::Ok);
        tvdp_ledger_len(k, &mut n);
        assert_eq!(n, 3);
        tvdp_ledger_free(k);
    }
}

#[test]
fn scalars_and_channels() {
    unsafe {
        let (mut e, mut d, mut h) = (0.0, 0.0, 0.0);
        assert_eq!(tvdp_subsample(1.0, 0.0, 0.3, 0.1, &mut e, &mut d, &mut h), TvdpStatus::Ok);
        assert!((h - 0.03).abs() < 1e-15);
        let mut v = 0.0;
        assert_eq!(tvdp_gaussian_tv(1.0, &mut v), TvdpStatus::Ok);
        assert_eq!(tvdp_staircase_tv(0.5, 1.0, 1.0, &mut v), TvdpStatus::Ok);
        assert!((v - 0.5f64.tanh()).abs() < 1e-12);
        assert_eq!(tvdp_clt_gap(0.1, 0.04, 100, &mut v), TvdpStatus::Ok);

        let m = [0.5, 0.5, 0.25, 0.75];
        let mut ch: *mut TvdpChannel = ptr::null_mut();
        assert_eq!(tvdp_channel_new(m.as_ptr(), 2, 2, &mut ch), TvdpStatus::Ok);
        assert_eq!(tvdp_channel_epsilon(ch, &mut v), TvdpStatus::Ok);
        assert!((v - 2f64.ln()).abs() < 1e-12);
        assert_eq!(tvdp_channel_tv(ch, &mut v), TvdpStatus::Ok);
        assert!((v - 0.25).abs() < 1e-12);
        tvdp_channel_free(ch);
        let bad = [0.5, 0.6];
        assert_eq!(tvdp_channel_new(bad.as_ptr(), 1, 2, &mut ch), TvdpStatus::Infeasible);

        assert_eq!(tvdp_channel_q_star(1.0, 0.3, &mut ch), TvdpStatus::Ok);
        tvdp_channel_tv(ch, &mut v);
        assert!((v - 0.3).abs() < 1e-12);
        tvdp_channel_free(ch);

        let mut b = TvdpLdpBounds::default();
        assert_eq!(tvdp_ldp_bounds(1.0, 0.3, 1.0, &mut b), TvdpStatus::Ok);
        assert!((b.max_kl - 0.3).abs() < 1e-12);
        assert!((b.chi2_output - 4.0 * b.max_chi2).abs() < 1e-12);
    }
}

#[test]
fn errors_are_thread_local() {
    let mut v = 0.0;
    unsafe { tvdp_laplace_tv(-1.0, &mut v) };
    assert!(last_error().is_some());
    std::thread::spawn(|| assert!(last_error().is_none())).join().unwrap();
}

#[test]
fn header_declares_every_export() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(format!("{dir}/include/tvdp.h")).unwrap();
    let names: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(names.len() > 20);
    for n in names {
        assert!(header.contains(&format!("{n}(")), "{n} missing from header");
    }
    assert!(std::str::from_utf8(unsafe { CStr::from_ptr(tvdp_version()) }.to_bytes()).unwrap().starts_with("0."));
}
