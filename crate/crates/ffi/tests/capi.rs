//! Exercise the C ABI the way a C caller would: raw pointers, status codes
//! and the thread-local error message.

use std::ffi::CStr;
use std::ptr;

use densecap_ffi::*;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `|Φ+⟩⟨Φ+|` as row-major real/imaginary parts.
fn bell_parts() -> (Vec<f64>, Vec<f64>) {
    let mut re = vec![0.0; 16];
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        re[r * 4 + c] = H * H;
    }
    (re, vec![0.0; 16])
}

fn bell() -> *mut DcState {
    let (re, im) = bell_parts();
    let mut s = ptr::null_mut();
    let st = unsafe { dc_state_from_parts(re.as_ptr(), im.as_ptr(), 4, [2usize, 2].as_ptr(), 2, &mut s) };
    assert_eq!(st, DcStatus::Ok);
    assert!(!s.is_null());
    s
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { dc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn bell_state_measures() {
    let s = bell();
    let mut v = 0.0;
    unsafe {
        assert_eq!(dc_dense_coding_capacity(s, DcScenario::OneSenderOneReceiver, &mut v), DcStatus::Ok);
        assert!((v - 2.0).abs() < 1e-9);
        assert_eq!(dc_teleportation_fidelity(s, &mut v), DcStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(dc_chsh_parameter(s, &mut v), DcStatus::Ok);
        assert!((v - 2.0).abs() < 1e-9);
        assert_eq!(dc_negativity(s, [0usize].as_ptr(), 1, &mut v), DcStatus::Ok);
        assert!((v - 0.5).abs() < 1e-9);
        assert_eq!(dc_entropy(s, &mut v), DcStatus::Ok);
        assert!(v.abs() < 1e-9);
        let mut d = 0;
        assert_eq!(dc_state_dim(s, &mut d), DcStatus::Ok);
        assert_eq!(d, 4);
        dc_state_free(s);
    }
}

#[test]
fn entries_round_trip() {
    let s = bell();
    let (re0, _) = bell_parts();
    let (mut re, mut im) = (vec![9.0; 16], vec![9.0; 16]);
    unsafe {
        assert_eq!(dc_state_entries(s, re.as_mut_ptr(), im.as_mut_ptr(), 16), DcStatus::Ok);
        assert_eq!(dc_state_entries(s, re.as_mut_ptr(), im.as_mut_ptr(), 15), DcStatus::InvalidArgument);
        dc_state_free(s);
    }
    assert_eq!(re, re0);
    assert!(im.iter().all(|&x| x == 0.0));
}

#[test]
fn haar_states_are_reproducible() {
    let dims = [2usize, 2];
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    let (mut sa, mut sb) = (0.0, 0.0);
    unsafe {
        assert_eq!(dc_state_haar(dims.as_ptr(), 2, 4, 42, &mut a), DcStatus::Ok);
        assert_eq!(dc_state_haar(dims.as_ptr(), 2, 4, 42, &mut b), DcStatus::Ok);
        dc_entropy(a, &mut sa);
        dc_entropy(b, &mut sb);
        dc_state_free(a);
        dc_state_free(b);
    }
    assert_eq!(sa, sb);
    assert!(sa > 0.0 && sa <= 2.0);
}

#[test]
fn invalid_input_sets_status_and_message() {
    let mut s = ptr::null_mut();
    // Trace 2.
    let mut re = [0.0; 4];
    re[0] = 2.0;
    let im = [0.0; 4];
    let st = unsafe { dc_state_from_parts(re.as_ptr(), im.as_ptr(), 2, [2usize].as_ptr(), 1, &mut s) };
    assert_eq!(st, DcStatus::NotNormalized);
    assert!(s.is_null());
    assert!(last_error().contains("trace"));

    // Subsystem dimensions that do not multiply to the matrix size.
    let (re, im) = bell_parts();
    let st = unsafe { dc_state_from_parts(re.as_ptr(), im.as_ptr(), 4, [2usize, 3].as_ptr(), 2, &mut s) };
    assert_eq!(st, DcStatus::DimensionMismatch);

    // Rank beyond the Hilbert-space dimension.
    let st = unsafe { dc_state_haar([2usize, 2].as_ptr(), 2, 5, 1, &mut s) };
    assert_ne!(st, DcStatus::Ok);
    assert!(!last_error().is_empty());
}

#[test]
fn null_pointers_are_reported() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(dc_entropy(ptr::null(), &mut v), DcStatus::NullPointer);
        let s = bell();
        assert_eq!(dc_entropy(s, ptr::null_mut()), DcStatus::NullPointer);
        dc_state_free(s);
        dc_state_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn scenario_and_measure_mismatches() {
    let s = bell();
    let mut v = 0.0;
    unsafe {
        assert_eq!(dc_dense_coding_capacity(s, DcScenario::TwoSendersOneReceiver, &mut v), DcStatus::ScenarioMismatch);
        dc_state_free(s);
        let mut t = ptr::null_mut();
        assert_eq!(dc_state_haar([2usize, 2, 2].as_ptr(), 3, 2, 3, &mut t), DcStatus::Ok);
        assert_ne!(dc_teleportation_fidelity(t, &mut v), DcStatus::Ok);
        assert_eq!(dc_dense_coding_capacity(t, DcScenario::TwoSendersOneReceiver, &mut v), DcStatus::Ok);
        assert!(v >= 2.0);
        dc_state_free(t);
    }
}

#[test]
fn merits_on_a_bell_state_are_trivial() {
    let s = bell();
    let mut m = DcMerits::default();
    unsafe {
        let st = dc_merits(s, DcScenario::OneSenderOneReceiver, DcActing::Receiver, DcObjective::Capacity, 2, 60, 1e-6, 7, &mut m);
        assert_eq!(st, DcStatus::Ok);
        assert_eq!(
            dc_merits(s, DcScenario::OneSenderOneReceiver, DcActing::Both, DcObjective::Fidelity, 0, 60, 1e-6, 7, &mut m),
            DcStatus::InvalidArgument
        );
        dc_state_free(s);
    }
    assert!((m.before - 2.0).abs() < 1e-9);
    assert!(m.best_outcome >= m.before - 1e-9);
    assert!(m.best_average >= m.average_at_best - 1e-9);
}

#[test]
fn merits_improve_a_weakly_entangled_pure_state() {
    // cos(π/6)|00⟩ + sin(π/6)|11⟩: a local filter on one side reaches a Bell state.
    let (c, s) = ((std::f64::consts::PI / 6.0).cos(), (std::f64::consts::PI / 6.0).sin());
    let mut re = [0.0; 16];
    re[0] = c * c;
    re[3] = c * s;
    re[12] = c * s;
    re[15] = s * s;
    let im = [0.0; 16];
    let mut st = ptr::null_mut();
    let mut m = DcMerits::default();
    unsafe {
        assert_eq!(dc_state_from_parts(re.as_ptr(), im.as_ptr(), 4, [2usize, 2].as_ptr(), 2, &mut st), DcStatus::Ok);
        let r = dc_merits(st, DcScenario::OneSenderOneReceiver, DcActing::Sender, DcObjective::Fidelity, 4, 300, 1e-9, 1, &mut m);
        assert_eq!(r, DcStatus::Ok);
        dc_state_free(st);
    }
    assert!(m.before < 1.0);
    assert!((m.best_outcome - 1.0).abs() < 1e-5, "{m:?}");
    assert!(m.best_outcome_probability > 0.0 && m.best_outcome_probability <= 1.0);
}

#[test]
fn seeds_and_version() {
    assert_eq!(dc_derive_sample_seed(1, 2), densecap::sampling::derive_sample_seed(1, 2));
    assert_ne!(dc_derive_sample_seed(1, 2), dc_derive_sample_seed(1, 3));
    let v = unsafe { CStr::from_ptr(dc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/densecap.h")).unwrap();
    for name in ["dc_state_from_parts", "dc_state_haar", "dc_state_free", "dc_merits", "dc_last_error_message", "DC_STATUS_OK", "DcState"] {
        assert!(h.contains(name), "header lacks {name}");
    }
}
