//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `cargo test -- --nocapture`).

use std::time::{Duration, Instant};

use esckd::capacity::{channel_mutual_info, optimize_rotated_decoder, repudiation_capacity, DecoderSpec};
use esckd::frames::{
    entangled_state, reduced_first_factor, solve_grassmann_frame, verify_frame, Ensemble,
    SolverConfig,
};
use esckd::linalg::{C64, CMatrix};
use esckd::mcsim::{compare_to_analytic, mub_attack_summary, mub_joint_distribution, simulate, SimConfig, SimParams};
use esckd::mub::{mub_threshold, MubParams};
use esckd::protocol::{
    attack_summary, attack_summary_enumerated, depolarizing_from_error, error_from_depolarizing,
    joint_distribution, key_rate_noiseless, rate_bounds, threshold, EscCode, EscParams, JointMethod,
    THRESHOLD_IE_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The canonical ESC(3,6) for the capacity figures. Distinct (3,6) frames
/// exist with the same pairwise overlaps but different triple products, and
/// the decoder capacities depend on those, so the suite pins the real
/// six-line member.
fn esc36_icosahedron() -> Ensemble {
    let e = esckd::frames::build_qutrit_icosahedron();
    let report = verify_frame(&e);
    assert!(report.max_equiangular_deviation < 1e-12);
    assert!(report.max_tightness_deviation < 1e-12);
    e
}

fn report(criterion: &str, ok: bool, elapsed: Duration, detail: &str) {
    println!(
        "acceptance {criterion}: {} in {elapsed:.2?} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_qutrit_nominal_capacity() {
    let t0 = Instant::now();
    let fixture = channel_mutual_info(&esc36_icosahedron(), &DecoderSpec::SameEnsemble).unwrap();
    let solved = solve_grassmann_frame(3, 6, &SolverConfig::new(7)).unwrap().ensemble;
    let from_solver = channel_mutual_info(&solved, &DecoderSpec::SameEnsemble).unwrap();
    let elapsed = t0.elapsed();
    let ok = (fixture - 0.424).abs() <= 1e-3
        && (from_solver - 0.424).abs() <= 1e-3
        && elapsed < Duration::from_secs(1);
    report(
        "1 (qutrit nominal capacity 0.424 ± 0.001)",
        ok,
        elapsed,
        &format!("fixture {fixture:.6}, solver {from_solver:.6}"),
    );
}

#[test]
fn criterion_02_rotated_decoder_optimization() {
    let t0 = Instant::now();
    let esc = esc36_icosahedron();
    let out = optimize_rotated_decoder(&esc, 7, 32, 4_000).unwrap();
    // Second route: evaluate the found unitary through the general decoder
    // path and confirm the optimizer's internal evaluation.
    let recheck = channel_mutual_info(&esc, &DecoderSpec::UnitaryRotated(out.unitary.clone())).unwrap();
    let elapsed = t0.elapsed();
    let ok = out.capacity >= 0.628
        && (recheck - out.capacity).abs() <= 1e-9
        && elapsed < Duration::from_secs(300);
    report(
        "2 (rotated-decoder capacity ≥ 0.628)",
        ok,
        elapsed,
        &format!(
            "achieved {:.6} at restart {} (recheck {:.6})",
            out.capacity, out.best_restart, recheck
        ),
    );
}

#[test]
fn criterion_03_repudiation_capacity() {
    let t0 = Instant::now();
    let esc = esc36_icosahedron();
    // 15 pair-exclusion outcomes resolve the identity with no failure
    // outcome needed.
    let rep = esckd::frames::repudiation_povm(&esc, 2).unwrap();
    assert_eq!(rep.povm().len(), 15);
    assert!(!rep.failure_outcome(), "residual {:.2e}", rep.residual_norm());
    let cap = repudiation_capacity(&esc, 2).unwrap();
    let elapsed = t0.elapsed();
    let bound = 3f64.log2() / 2.0;
    let ok = (cap - 0.734).abs() <= 5e-3 && cap < bound && elapsed < Duration::from_secs(10);
    report(
        "3 (repudiation capacity 0.734 ± 0.005, below log₂3/2)",
        ok,
        elapsed,
        &format!("achieved {cap:.6}, bound {bound:.6}"),
    );
}

#[test]
fn criterion_04_mub_comparison_numbers() {
    let t0 = Instant::now();
    let rate_max = mub_threshold(&MubParams::new(25, 2).unwrap()).rate_max;
    let esc_rate = key_rate_noiseless(&EscCode::new(35, 25, 0).unwrap());
    let elapsed = t0.elapsed();
    // The 35-state rate evaluates to ≈ 2.813 bits per sifted signal; the
    // qualitative claim under test is that it beats two unbiased bases.
    let ok = (rate_max - 2.3219).abs() <= 5e-5 && esc_rate > 2.3219 && (esc_rate - 2.813).abs() <= 5e-4;
    report(
        "4 (two-basis rate 2.3219; 35-in-25 code rate exceeds it)",
        ok,
        elapsed,
        &format!("rate_max {rate_max:.6}, esc rate {esc_rate:.6}"),
    );
}

#[test]
fn criterion_05_formula_versus_oracle_grid() {
    let t0 = Instant::now();
    let mut cases = 0usize;
    let mut worst: f64 = 0.0;
    for d in 2usize..=11 {
        for n in d + 1..=(d * d).min(12) {
            let mut ms = vec![0usize, 1, n / 2, n - 2];
            ms.sort_unstable();
            ms.dedup();
            for m in ms {
                for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    let params = EscParams::new(n, d, m, q).unwrap();
                    let closed = attack_summary(&params);
                    let enumerated = attack_summary_enumerated(&params).unwrap();
                    for (a, b) in [
                        (closed.p_sift, enumerated.p_sift),
                        (closed.p_ab, enumerated.p_ab),
                        (closed.p_ae, enumerated.p_ae),
                        (closed.p_question, enumerated.p_question),
                    ] {
                        worst = worst.max((a - b).abs());
                    }
                    let fast = joint_distribution(&params, JointMethod::ClosedSymmetry).unwrap();
                    let slow = joint_distribution(&params, JointMethod::BruteForce).unwrap();
                    for (x, y) in fast.probs().iter().zip(slow.probs()) {
                        worst = worst.max((x - y).abs());
                    }
                    cases += 1;
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let ok = worst <= 1e-12 && elapsed < Duration::from_secs(60);
    report(
        "5 (closed forms equal subset enumeration to 1e-12)",
        ok,
        elapsed,
        &format!("{cases} parameter points, worst |Δ| {worst:.2e}"),
    );
}

#[test]
fn criterion_06_monte_carlo_agreement() {
    let t0 = Instant::now();
    let esc = esc36_icosahedron();
    let params = EscParams::new(6, 3, 2, 0.5).unwrap();
    let cfg = SimConfig::new(SimParams::Esc(params), 1_000_000, 20_060_314);
    let res = simulate(&cfg, &esc).unwrap();
    let summary = attack_summary(&params);
    let joint = joint_distribution(&params, JointMethod::ClosedSymmetry).unwrap();
    let esc_report = compare_to_analytic(&res, &summary, &joint).unwrap();

    let mub_ensemble = esckd::frames::build_mub(2, 2).unwrap();
    let mub_params = MubParams::new(2, 2).unwrap();
    let mub_cfg = SimConfig::new(SimParams::Mub { params: mub_params, q: 1.0 }, 1_000_000, 8);
    let mub_res = simulate(&mub_cfg, &mub_ensemble).unwrap();
    let mub_report = compare_to_analytic(
        &mub_res,
        &mub_attack_summary(&mub_params, 1.0),
        &mub_joint_distribution(&mub_params, 1.0),
    )
    .unwrap();
    let mub_error = 1.0 - mub_res.p_ab;
    let error_z = (mub_error - 0.25) / mub_res.p_ab_se;

    let elapsed = t0.elapsed();
    let ok = esc_report.z_pass && mub_report.z_pass && error_z.abs() <= 3.0 && elapsed < Duration::from_secs(30);
    report(
        "6 (10⁶-round simulations match analytics at 3σ)",
        ok,
        elapsed,
        &format!(
            "esc |z|≤3: {}, mub error {:.5} (z {:.2})",
            esc_report.z_pass, mub_error, error_z
        ),
    );
}

#[test]
fn criterion_07_depolarizing_round_trips() {
    let t0 = Instant::now();
    let mut worst_round_trip: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for d in 2usize..=11 {
        for n in d + 1..=(d * d).min(12) {
            let mut ms: Vec<usize> = vec![1, n / 2, n - 2];
            ms.retain(|&m| m >= 1);
            ms.sort_unstable();
            ms.dedup();
            for m in ms {
                let code = EscCode::new(n, d, m).unwrap();
                for i in 0..=10 {
                    let r = i as f64 / 10.0;
                    let p_e = error_from_depolarizing(&code, r).unwrap();
                    let back = depolarizing_from_error(&code, p_e).unwrap();
                    worst_round_trip = worst_round_trip.max((back - r).abs());
                }
                let noiseless = 1.0 - code.d() as f64 * (code.n() as f64 - 1.0) / code.s();
                worst_zero = worst_zero.max(depolarizing_from_error(&code, noiseless).unwrap().abs());
            }
        }
    }
    let elapsed = t0.elapsed();
    let ok = worst_round_trip <= 1e-10 && worst_zero <= 1e-12;
    report(
        "7 (depolarizing conversions invert to 1e-10; noiseless error maps to r = 0)",
        ok,
        elapsed,
        &format!("worst round trip {worst_round_trip:.2e}, worst r(p_e⁰) {worst_zero:.2e}"),
    );
}

#[test]
fn criterion_08_threshold_sweep_beats_unbiased_bases() {
    let t0 = Instant::now();
    let d = 10usize;
    let mut ok = true;
    let mut detail = String::new();
    for k in 2..11 {
        let n = k * d;
        let esc = threshold(&EscCode::new(n, d, n - 2).unwrap()).unwrap();
        let mub = mub_threshold(&MubParams::new(d, k).unwrap());
        if esc.r_star <= mub.r_star {
            ok = false;
        }
        // Announcing all but two outcomes is the more conservative policy.
        let half = threshold(&EscCode::new(n, d, n / 2).unwrap()).unwrap();
        if esc.r_star < half.r_star {
            ok = false;
        }
        detail.push_str(&format!("k={k}: {:.4}>{:.4} ", esc.r_star, mub.r_star));
    }
    let elapsed = t0.elapsed();
    let ok = ok && elapsed < Duration::from_secs(600);
    report("8 (maximal-exclusion codes beat every basis count at d=10)", ok, elapsed, detail.trim());
}

#[test]
fn criterion_09_speed_security_tradeoff() {
    let t0 = Instant::now();
    let rows = esckd::figures::figure2_data(&[2, 3, 5, 7, 10]).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for d in [2usize, 3, 5, 7, 10] {
        let esc = rows
            .iter()
            .find(|r| r.d == d && r.ensemble_kind == esckd::figures::EnsembleKind::Esc)
            .unwrap();
        let mub = rows
            .iter()
            .find(|r| r.d == d && r.ensemble_kind == esckd::figures::EnsembleKind::Mub)
            .unwrap();
        let half_log = (d as f64).log2() / 2.0;
        if !(esc.threshold_r > mub.threshold_r && esc.rate_max < half_log) {
            ok = false;
        }
        detail.push_str(&format!(
            "d={d}: r {:.3}>{:.3}, rate {:.3}<{:.3}; ",
            esc.threshold_r, mub.threshold_r, esc.rate_max, half_log
        ));
    }
    let elapsed = t0.elapsed();
    report("9 (codes at n=2d: more tolerance, less speed)", ok, elapsed, detail.trim());
}

#[test]
fn criterion_10_frame_invariants() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for (d, n) in [(2usize, 3usize), (2, 4), (3, 4), (3, 6), (3, 9), (4, 5), (5, 6)] {
        let out = solve_grassmann_frame(d, n, &SolverConfig::new(7)).unwrap();
        let eq = out.report.max_equiangular_deviation;
        if !out.converged || eq > 1e-6 {
            ok = false;
        }
        let state = entangled_state(&out.ensemble).unwrap();
        let reduced = reduced_first_factor(&state, d).unwrap();
        let target = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        let reduced_dev = (reduced.matrix() - target).norm();
        if reduced_dev > 1e-10 {
            ok = false;
        }
        detail.push_str(&format!("({d},{n}): eq {eq:.1e} ent {reduced_dev:.1e}; "));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let mut v1_ok = true;
    for trial in 0..1000 {
        let d = 2 + trial % 4;
        let n = d + 1 + trial % 7;
        let e = Ensemble::random(d, n, &mut rng).unwrap();
        let report = verify_frame(&e);
        if report.v1 < (n * n) as f64 / d as f64 - 1e-9 {
            v1_ok = false;
        }
    }
    detail.push_str(&format!("V₁ bound on 1000 random ensembles: {v1_ok}"));

    let elapsed = t0.elapsed();
    report("10 (frame search, entanglement, V₁ bound)", ok && v1_ok, elapsed, &detail);
}

#[test]
fn criterion_11_bisection_integrity() {
    let t0 = Instant::now();
    let grid = [
        (4usize, 2usize, 1usize),
        (4, 2, 2),
        (6, 3, 0),
        (6, 3, 2),
        (6, 3, 4),
        (9, 3, 7),
        (20, 10, 10),
        (20, 10, 18),
    ];
    let mut ok = true;
    let mut worst_residual: f64 = 0.0;
    for (n, d, m) in grid {
        let code = EscCode::new(n, d, m).unwrap();
        let res = threshold(&code).unwrap();
        let i_e = |q: f64| {
            let params = EscParams::from_code(code, q).unwrap();
            rate_bounds(&joint_distribution(&params, JointMethod::ClosedSymmetry).unwrap()).i_e
        };
        if !res.saturated {
            let residual = i_e(res.q_star).abs();
            worst_residual = worst_residual.max(residual);
            if residual > THRESHOLD_IE_TOL {
                ok = false;
            }
        }
        let mut prev = f64::INFINITY;
        for i in 0..21 {
            let q = i as f64 / 20.0;
            let v = i_e(q);
            if v > prev + 1e-12 {
                ok = false;
            }
            prev = v;
        }
    }
    let elapsed = t0.elapsed();
    report(
        "11 (|I_E(q*)| ≤ 1e-9; I_E non-increasing on 21-point grids)",
        ok,
        elapsed,
        &format!("worst residual {worst_residual:.2e} over {} codes", grid.len()),
    );
}
