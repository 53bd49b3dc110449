//! Exercises the C entry points exactly as a foreign caller would: through
//! raw pointers and status codes.

use std::ffi::CStr;
use std::ptr;

use esckd_ffi::*;

fn expect_ok(status: EsckdStatus) {
    if status != EsckdStatus::Ok {
        let msg = unsafe { CStr::from_ptr(esckd_last_error_message()) };
        panic!("status {status:?}: {}", msg.to_string_lossy());
    }
}

#[test]
fn simplex_lifecycle_and_verification() {
    unsafe {
        let mut handle: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_simplex_new(3, &mut handle));
        assert_eq!(esckd_ensemble_dim(handle), 3);
        assert_eq!(esckd_ensemble_size(handle), 4);

        let mut report = EsckdFrameReport {
            v1: 0.0,
            v2: 0.0,
            target_overlap: 0.0,
            max_equiangular_deviation: 0.0,
            max_tightness_deviation: 0.0,
        };
        expect_ok(esckd_frame_verify(handle, &mut report));
        assert!((report.v1 - 16.0 / 3.0).abs() < 1e-12);
        assert!(report.max_equiangular_deviation < 1e-12);
        assert!((report.target_overlap - 1.0 / 9.0).abs() < 1e-15);

        let mut fidelity = 0.0;
        expect_ok(esckd_measure_prepare_fidelity(handle, &mut fidelity));
        assert!(fidelity > 0.0 && fidelity <= 1.0);

        esckd_ensemble_free(handle);
    }
}

#[test]
fn json_round_trip_through_the_abi() {
    unsafe {
        let mut handle: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_simplex_new(2, &mut handle));

        let mut text: *mut std::ffi::c_char = ptr::null_mut();
        expect_ok(esckd_frame_to_json(handle, &mut text));
        let json = CStr::from_ptr(text).to_str().unwrap().to_owned();
        assert!(json.starts_with("{\"d\":2,\"n\":3"));

        let mut back: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_frame_from_json(text, &mut back));
        assert_eq!(esckd_ensemble_size(back), 3);

        esckd_string_free(text);
        esckd_ensemble_free(handle);
        esckd_ensemble_free(back);
    }
}

#[test]
fn solver_produces_usable_frames() {
    unsafe {
        let mut handle: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_frame_solve(2, 4, 7, 8, 25_000, 1e-6, &mut handle));
        let mut report = EsckdFrameReport {
            v1: 0.0,
            v2: 0.0,
            target_overlap: 0.0,
            max_equiangular_deviation: 0.0,
            max_tightness_deviation: 0.0,
        };
        expect_ok(esckd_frame_verify(handle, &mut report));
        assert!(report.max_equiangular_deviation <= 1e-6);
        esckd_ensemble_free(handle);

        // n > d² is rejected up front.
        let mut bad: *mut EsckdEnsemble = ptr::null_mut();
        let status = esckd_frame_solve(2, 5, 7, 2, 100, 1e-6, &mut bad);
        assert_eq!(status, EsckdStatus::InvalidArgument);
        assert!(bad.is_null());
    }
}

#[test]
fn analysis_entry_points_match_known_values() {
    unsafe {
        let mut sift = 0.0;
        expect_ok(esckd_sift_rate_noiseless(6, 3, 4, &mut sift));
        assert!((sift - 0.6).abs() < 1e-15);

        let mut rate = 0.0;
        expect_ok(esckd_key_rate_noiseless(6, 3, 0, &mut rate));
        assert!((rate - 0.424).abs() < 5e-4);

        let mut summary = EsckdAttackSummary { p_sift: 0.0, p_ab: 0.0, p_ae: 0.0, p_question: 0.0 };
        expect_ok(esckd_attack_summary(6, 3, 2, 0.5, &mut summary));
        assert!((summary.p_sift - 0.76).abs() < 1e-12);
        assert!((summary.p_ab - 60.0 / 114.0).abs() < 1e-12);

        let mut bounds = EsckdRateBounds { i_ab: 0.0, i_ae: 0.0, i_be: 0.0, i_e: 0.0, i_ab_given_e: 0.0 };
        expect_ok(esckd_rate_bounds(6, 3, 2, 0.0, &mut bounds));
        assert!((bounds.i_e - bounds.i_ab).abs() < 1e-12);

        let mut th = EsckdThreshold { q_star: 0.0, p_e_star: 0.0, r_star: 0.0, saturated: true };
        expect_ok(esckd_threshold(6, 3, 4, &mut th));
        assert!(!th.saturated);
        assert!(th.q_star > 0.0 && th.q_star <= 1.0);
        assert!(th.r_star > 0.0 && th.r_star < 1.0);

        let mut mub = EsckdMubThreshold { p_e_star: 0.0, r_star: 0.0, rate_max: 0.0 };
        expect_ok(esckd_mub_threshold(25, 2, &mut mub));
        assert!((mub.rate_max - 2.3219).abs() < 5e-5);

        let mut asym = 0.0;
        expect_ok(esckd_asymptotic_rate(25, 1.4, &mut asym));
        assert!((asym - 2.801).abs() < 5e-4);

        let mut err = 0.0;
        expect_ok(esckd_mub_full_intercept_error(2, 2, &mut err));
        assert!((err - 0.25).abs() < 1e-15);
    }
}

#[test]
fn capacity_entry_points() {
    unsafe {
        let mut trine: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_simplex_new(2, &mut trine));

        let mut same = 0.0;
        expect_ok(esckd_channel_capacity(trine, EsckdDecoder::Same, &mut same));
        let mut inverted = 0.0;
        expect_ok(esckd_channel_capacity(trine, EsckdDecoder::BlochInversion, &mut inverted));
        assert!((inverted - (3f64.log2() - 1.0)).abs() < 1e-9);
        assert!(inverted > same);

        let mut rep = 0.0;
        expect_ok(esckd_repudiation_capacity(trine, 1, &mut rep));
        assert!((rep - inverted).abs() < 1e-9);

        let mut best = 0.0;
        let mut unitary = [0.0f64; 8];
        expect_ok(esckd_optimize_rotated_decoder(trine, 3, 4, 500, &mut best, unitary.as_mut_ptr()));
        assert!(best >= same - 1e-12);
        // Row-major re/im pairs of a 2×2 unitary: columns have unit norm.
        let col0 = unitary[0] * unitary[0] + unitary[1] * unitary[1]
            + unitary[4] * unitary[4] + unitary[5] * unitary[5];
        assert!((col0 - 1.0).abs() < 1e-9);

        esckd_ensemble_free(trine);
    }
}

#[test]
fn simulation_is_deterministic_across_calls() {
    unsafe {
        let mut trine: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_simplex_new(2, &mut trine));

        let run = || {
            let mut out = EsckdSimSummary {
                rounds_total: 0,
                rounds_sifted: 0,
                p_sift: 0.0,
                p_ab: 0.0,
                p_ae: 0.0,
                p_question: 0.0,
            };
            expect_ok(esckd_simulate_esc(trine, 3, 2, 1, 0.5, 20_000, 11, &mut out));
            out
        };
        let a = run();
        let b = run();
        assert_eq!(a.rounds_sifted, b.rounds_sifted);
        assert_eq!(a.p_ab.to_bits(), b.p_ab.to_bits());
        assert!(a.p_sift > 0.5 && a.p_sift < 1.0);

        let mut mub: *mut EsckdEnsemble = ptr::null_mut();
        expect_ok(esckd_mub_new(2, 2, &mut mub));
        let mut out = EsckdSimSummary {
            rounds_total: 0,
            rounds_sifted: 0,
            p_sift: 0.0,
            p_ab: 0.0,
            p_ae: 0.0,
            p_question: 0.0,
        };
        expect_ok(esckd_simulate_mub(mub, 2, 2, 1.0, 50_000, 5, &mut out));
        assert!((1.0 - out.p_ab - 0.25).abs() < 0.01);

        esckd_ensemble_free(trine);
        esckd_ensemble_free(mub);
    }
}

#[test]
fn null_and_invalid_inputs_are_reported() {
    unsafe {
        assert_eq!(esckd_ensemble_dim(ptr::null()), 0);

        let mut out = 0.0;
        let status = esckd_measure_prepare_fidelity(ptr::null(), &mut out);
        assert_eq!(status, EsckdStatus::NullPointer);

        let status = esckd_key_rate_noiseless(3, 3, 0, &mut out);
        assert_eq!(status, EsckdStatus::InvalidArgument);
        let msg = CStr::from_ptr(esckd_last_error_message()).to_string_lossy().into_owned();
        assert!(msg.contains("signal count"), "message: {msg}");

        let mut handle: *mut EsckdEnsemble = ptr::null_mut();
        let status = esckd_frame_from_json(ptr::null(), &mut handle);
        assert_eq!(status, EsckdStatus::NullPointer);
    }
}
