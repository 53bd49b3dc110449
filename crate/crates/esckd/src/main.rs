//! Command-line front end. Every subcommand prints a human summary, or a
//! single JSON document on stdout with `--json`. Exit codes: 0 success,
//! 1 validation error, 2 numerical failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use esckd::capacity::{channel_mutual_info, optimize_rotated_decoder, repudiation_capacity, DecoderSpec};
use esckd::error::Error;
use esckd::figures::{fig1_csv, fig2_csv, figure1_data, figure2_data};
use esckd::frames::{
    build_mub, build_simplex, entangled_state, frame_from_json, frame_to_json, reduced_first_factor,
    solve_grassmann_frame, verify_frame, Ensemble, SolverConfig,
};
use esckd::linalg::{CMatrix, C64};
use esckd::mcsim::{
    compare_to_analytic, mub_attack_summary, mub_joint_distribution, simulate, SimConfig, SimParams,
};
use esckd::mub::MubParams;
use esckd::protocol::{
    attack_summary, joint_distribution, rate_bounds, threshold, EscCode, EscParams, JointMethod,
};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const OPTIMIZER_EVALS: u32 = 4_000;

#[derive(Parser)]
#[command(name = "esckd", version, about = "Equiangular spherical codes and their key-distribution analysis")]
struct Cli {
    /// Emit a single JSON document on stdout instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct or inspect equiangular frames.
    Frame {
        #[command(subcommand)]
        action: FrameAction,
    },
    /// Construct unbiased-basis ensembles.
    Mub {
        #[command(subcommand)]
        action: MubAction,
    },
    /// Closed-form attack quantities and rate bounds at a working point.
    Analyze(AnalyzeArgs),
    /// Critical interception fraction and equivalent depolarizing rate.
    Threshold(ThresholdArgs),
    /// Seeded Monte Carlo run checked against the closed forms.
    Simulate(SimulateArgs),
    /// Mutual information of an encoder/decoder pair.
    Capacity(CapacityArgs),
    /// Comparison sweep datasets (CSV).
    Sweep {
        #[command(subcommand)]
        action: SweepAction,
    },
    /// Bipartite entangled realization of a code.
    Entangle(EntangleArgs),
}

#[derive(Subcommand)]
enum FrameAction {
    /// Search for an equiangular frame and write it to a frame file.
    Gen(FrameGenArgs),
    /// Verify a frame file and print its diagnostics.
    Check(FrameCheckArgs),
}

#[derive(Args)]
struct FrameGenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    restarts: u32,
    /// Success tolerance on both frame deviations.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FrameCheckArgs {
    /// Frame file to verify.
    file: PathBuf,
}

#[derive(Subcommand)]
enum MubAction {
    /// Build k unbiased bases in prime dimension d.
    Gen(MubGenArgs),
}

#[derive(Args)]
struct MubGenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    q: f64,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Frame file for the signal ensemble; constructed when omitted.
    file: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: Option<usize>,
    /// Basis count: switches to the unbiased-basis protocol.
    #[arg(long, conflicts_with_all = ["n", "m"])]
    k: Option<usize>,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderKind {
    /// The ensemble's own measurement.
    Same,
    /// Measurement of the conjugated ensemble.
    Conjugate,
    /// Qubit antipodal preset.
    BlochInversion,
    /// Numerically optimized unitary rotation.
    UnitaryOpt,
    /// Subset-exclusion measurement (requires --b).
    Repudiation,
}

#[derive(Args)]
struct CapacityArgs {
    /// Frame file for the signal ensemble; constructed when omitted.
    file: Option<PathBuf>,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    decoder: DecoderKind,
    /// Excluded-subset size for the repudiation decoder.
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 32)]
    restarts: u32,
}

#[derive(Subcommand)]
enum SweepAction {
    /// Threshold versus ensemble size at fixed dimension.
    Fig1(Fig1Args),
    /// Speed/security pairs at n = 2d.
    Fig2(Fig2Args),
}

#[derive(Args)]
struct Fig1Args {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig2Args {
    /// Dimensions to sweep; may be repeated.
    #[arg(long = "d", default_values_t = vec![2usize, 3, 5, 7, 10])]
    dims: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntangleArgs {
    /// Frame file for the ensemble; constructed when omitted.
    file: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Output {
    code: u8,
    json: Value,
    summary: Vec<String>,
}

impl Output {
    fn ok(json: Value, summary: Vec<String>) -> Self {
        Self { code: 0, json, summary }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NumericalFailure(_) => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not failures.
            if err.use_stderr() {
                eprintln!("{err}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };

    let json_mode = cli.json;
    match run(cli.command) {
        Ok(output) => {
            if json_mode {
                println!("{}", output.json);
            } else {
                let lines = output.summary.join("\n");
                if output.code == 0 {
                    println!("{lines}");
                } else {
                    eprintln!("{lines}");
                }
            }
            ExitCode::from(output.code)
        }
        Err(err) => {
            let code = exit_code_for(&err);
            if json_mode {
                println!("{}", json!({ "error": err.to_string(), "exit_code": code }));
            }
            eprintln!("error: {err}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<Output, Error> {
    match command {
        Command::Frame { action } => match action {
            FrameAction::Gen(args) => frame_gen(args),
            FrameAction::Check(args) => frame_check(args),
        },
        Command::Mub { action } => match action {
            MubAction::Gen(args) => mub_gen(args),
        },
        Command::Analyze(args) => analyze(args),
        Command::Threshold(args) => threshold_cmd(args),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Capacity(args) => capacity_cmd(args),
        Command::Sweep { action } => match action {
            SweepAction::Fig1(args) => sweep_fig1(args),
            SweepAction::Fig2(args) => sweep_fig2(args),
        },
        Command::Entangle(args) => entangle_cmd(args),
    }
}

fn frame_gen(args: FrameGenArgs) -> Result<Output, Error> {
    let mut cfg = SolverConfig::new(args.seed);
    cfg.restarts = args.restarts;
    cfg.success_tolerance = args.tol;
    let outcome = solve_grassmann_frame(args.d, args.n, &cfg)?;
    let report = &outcome.report;

    let mut artifacts = Vec::new();
    if outcome.converged {
        fs::write(&args.out, frame_to_json(&outcome.ensemble))?;
        artifacts.push(args.out.display().to_string());
    }

    let json = json!({
        "command": "frame gen",
        "d": args.d,
        "n": args.n,
        "seed": args.seed,
        "restarts": args.restarts,
        "tol": args.tol,
        "converged": outcome.converged,
        "objective": outcome.objective,
        "best_restart": outcome.best_restart,
        "target_overlap": report.target_overlap,
        "max_equiangular_deviation": report.max_equiangular_deviation,
        "max_tightness_deviation": report.max_tightness_deviation,
        "artifacts": artifacts,
    });
    let mut summary = vec![format!(
        "frame search d={} n={}: equiangular dev {:.3e}, tightness dev {:.3e} (target overlap {:.12})",
        args.d, args.n, report.max_equiangular_deviation, report.max_tightness_deviation, report.target_overlap
    )];
    if outcome.converged {
        summary.push(format!("wrote {}", args.out.display()));
        Ok(Output::ok(json, summary))
    } else {
        summary.push(format!(
            "did not converge within tolerance {:.1e}; best objective {:.3e} from restart {}",
            args.tol, outcome.objective, outcome.best_restart
        ));
        Ok(Output { code: EXIT_NUMERICAL, json, summary })
    }
}

fn frame_check(args: FrameCheckArgs) -> Result<Output, Error> {
    let ensemble = frame_from_json(&fs::read_to_string(&args.file)?)?;
    let report = verify_frame(&ensemble);
    let json = json!({
        "command": "frame check",
        "file": args.file.display().to_string(),
        "d": ensemble.dim(),
        "n": ensemble.len(),
        "v1": report.v1,
        "v2": report.v2,
        "target_overlap": report.target_overlap,
        "max_equiangular_deviation": report.max_equiangular_deviation,
        "max_tightness_deviation": report.max_tightness_deviation,
        "gram_spectrum": report.gram_spectrum,
    });
    let summary = vec![
        format!(
            "{}: d={} n={} v1={:.12} v2={:.12}",
            args.file.display(),
            ensemble.dim(),
            ensemble.len(),
            report.v1,
            report.v2
        ),
        format!(
            "equiangular dev {:.3e} (target {:.12}), tightness dev {:.3e}",
            report.max_equiangular_deviation, report.target_overlap, report.max_tightness_deviation
        ),
    ];
    Ok(Output::ok(json, summary))
}

fn mub_gen(args: MubGenArgs) -> Result<Output, Error> {
    let ensemble = build_mub(args.d, args.k)?;
    let d = args.d;
    // Largest deviation from the unbiased-overlap pattern.
    let gram = ensemble.gram();
    let mut max_dev: f64 = 0.0;
    for j in 0..ensemble.len() {
        for k in 0..ensemble.len() {
            let ov = gram[(j, k)].norm_sqr();
            let expected = if j / d == k / d {
                if j == k { 1.0 } else { 0.0 }
            } else {
                1.0 / d as f64
            };
            max_dev = max_dev.max((ov - expected).abs());
        }
    }

    let mut artifacts = Vec::new();
    if let Some(out) = &args.out {
        fs::write(out, frame_to_json(&ensemble))?;
        artifacts.push(out.display().to_string());
    }
    let json = json!({
        "command": "mub gen",
        "d": args.d,
        "k": args.k,
        "n": ensemble.len(),
        "max_overlap_deviation": max_dev,
        "artifacts": artifacts,
    });
    let mut summary = vec![format!(
        "{} unbiased bases in dimension {}: {} vectors, overlap deviation {:.3e}",
        args.k,
        args.d,
        ensemble.len(),
        max_dev
    )];
    if let Some(out) = &args.out {
        summary.push(format!("wrote {}", out.display()));
    }
    Ok(Output::ok(json, summary))
}

fn analyze(args: AnalyzeArgs) -> Result<Output, Error> {
    let params = EscParams::new(args.n, args.d, args.m, args.q)?;
    let summary_vals = attack_summary(&params);
    let joint = joint_distribution(&params, JointMethod::ClosedSymmetry)?;
    let bounds = rate_bounds(&joint);
    let json = json!({
        "command": "analyze",
        "n": args.n,
        "d": args.d,
        "m": args.m,
        "q": args.q,
        "p_sift": summary_vals.p_sift,
        "p_ab": summary_vals.p_ab,
        "p_ae": summary_vals.p_ae,
        "p_question": summary_vals.p_question,
        "i_ab": bounds.i_ab,
        "i_ae": bounds.i_ae,
        "i_be": bounds.i_be,
        "i_e": bounds.i_e,
        "i_ab_given_e": bounds.i_ab_given_e,
    });
    let summary = vec![
        format!(
            "n={} d={} m={} q={}: p_sift={:.12} p_ab={:.12} p_ae={:.12} p_?={:.12}",
            args.n, args.d, args.m, args.q, summary_vals.p_sift, summary_vals.p_ab, summary_vals.p_ae, summary_vals.p_question
        ),
        format!(
            "bounds (bits/sifted signal): I(A:B)={:.12} I(A:E)={:.12} I(B:E)={:.12} I_E={:.12} I(A:B|E)={:.12}",
            bounds.i_ab, bounds.i_ae, bounds.i_be, bounds.i_e, bounds.i_ab_given_e
        ),
    ];
    Ok(Output::ok(json, summary))
}

fn threshold_cmd(args: ThresholdArgs) -> Result<Output, Error> {
    let code = EscCode::new(args.n, args.d, args.m)?;
    let res = threshold(&code)?;
    let json = json!({
        "command": "threshold",
        "n": args.n,
        "d": args.d,
        "m": args.m,
        "q_star": res.q_star,
        "p_e_star": res.p_e_star,
        "r_star": res.r_star,
        "saturated": res.saturated,
    });
    let summary = vec![format!(
        "n={} d={} m={}: q*={:.12} p_e*={:.12} r*={:.12}{}",
        args.n,
        args.d,
        args.m,
        res.q_star,
        res.p_e_star,
        res.r_star,
        if res.saturated { " (secure at full interception)" } else { "" }
    )];
    Ok(Output::ok(json, summary))
}

fn load_or_build_esc(
    file: Option<&PathBuf>,
    n: usize,
    d: usize,
    seed: Option<u64>,
) -> Result<Ensemble, Error> {
    if let Some(path) = file {
        let e = frame_from_json(&fs::read_to_string(path)?)?;
        if e.len() != n || e.dim() != d {
            return Err(Error::InvalidParameter(format!(
                "frame file holds n={} d={}, flags say n={n} d={d}",
                e.len(),
                e.dim()
            )));
        }
        return Ok(e);
    }
    if n == d + 1 {
        return build_simplex(d);
    }
    let seed = seed.ok_or_else(|| {
        Error::InvalidParameter("--seed is required to construct a frame numerically".into())
    })?;
    let outcome = solve_grassmann_frame(d, n, &SolverConfig::new(seed))?;
    if !outcome.converged {
        return Err(Error::NumericalFailure(format!(
            "frame search for d={d}, n={n} stalled at equiangular deviation {:.3e}",
            outcome.report.max_equiangular_deviation
        )));
    }
    Ok(outcome.ensemble)
}

fn simulate_cmd(args: SimulateArgs) -> Result<Output, Error> {
    let (params, ensemble, mode_json) = if let Some(k) = args.k {
        let mub_params = MubParams::new(args.d, k)?;
        let ensemble = match &args.file {
            Some(path) => frame_from_json(&fs::read_to_string(path)?)?,
            None => build_mub(args.d, k)?,
        };
        let mode = json!({ "protocol": "mub", "d": args.d, "k": k, "q": args.q });
        (SimParams::Mub { params: mub_params, q: args.q }, ensemble, mode)
    } else {
        let n = args.n.ok_or_else(|| Error::InvalidParameter("--n is required (or --k for unbiased bases)".into()))?;
        let m = args.m.ok_or_else(|| Error::InvalidParameter("--m is required (or --k for unbiased bases)".into()))?;
        let esc = EscParams::new(n, args.d, m, args.q)?;
        let ensemble = load_or_build_esc(args.file.as_ref(), n, args.d, Some(args.seed))?;
        let mode = json!({ "protocol": "esc", "n": n, "d": args.d, "m": m, "q": args.q });
        (SimParams::Esc(esc), ensemble, mode)
    };

    let cfg = SimConfig::new(params, args.rounds, args.seed);
    let result = simulate(&cfg, &ensemble)?;
    let (analytic, joint) = match params {
        SimParams::Esc(p) => (attack_summary(&p), joint_distribution(&p, JointMethod::ClosedSymmetry)?),
        SimParams::Mub { params: p, q } => (mub_attack_summary(&p, q), mub_joint_distribution(&p, q)),
    };
    let report = compare_to_analytic(&result, &analytic, &joint)?;

    let json = json!({
        "command": "simulate",
        "mode": mode_json,
        "rounds": args.rounds,
        "seed": args.seed,
        "chunk_size": cfg.chunk_size,
        "result": result,
        "analytic": analytic,
        "comparison": report,
    });
    let summary = vec![
        format!(
            "{} rounds, {} sifted: p_sift={:.6}±{:.1e} p_ab={:.6}±{:.1e} p_ae={:.6}±{:.1e} p_?={:.6}±{:.1e}",
            result.rounds_total,
            result.rounds_sifted,
            result.p_sift,
            result.p_sift_se,
            result.p_ab,
            result.p_ab_se,
            result.p_ae,
            result.p_ae_se,
            result.p_question,
            result.p_question_se
        ),
        format!(
            "analytic: p_sift={:.6} p_ab={:.6} p_ae={:.6} p_?={:.6}",
            analytic.p_sift, analytic.p_ab, analytic.p_ae, analytic.p_question
        ),
        format!(
            "agreement: |z| max {:.2} (3σ {}), chi²={:.2} on {} dof (99% crit {:.2}, {})",
            [report.z_sift, report.z_ab, report.z_ae, report.z_question]
                .iter()
                .fold(0.0f64, |acc, z| acc.max(z.abs())),
            if report.z_pass { "pass" } else { "FAIL" },
            report.chi_square,
            report.chi_square_df,
            report.chi_square_critical_99,
            if report.chi_square_pass { "pass" } else { "FAIL" }
        ),
    ];
    Ok(Output::ok(json, summary))
}

fn capacity_cmd(args: CapacityArgs) -> Result<Output, Error> {
    let needs_solver_seed = args.file.is_none() && args.n != args.d + 1;
    if matches!(args.decoder, DecoderKind::UnitaryOpt) && args.seed.is_none() {
        return Err(Error::InvalidParameter("--seed is required for --decoder unitary-opt".into()));
    }
    if needs_solver_seed && args.seed.is_none() {
        return Err(Error::InvalidParameter(
            "--seed is required to construct a frame numerically (or pass a frame file)".into(),
        ));
    }
    let ensemble = load_or_build_esc(args.file.as_ref(), args.n, args.d, args.seed)?;

    let mut unitary_json = Value::Null;
    let (label, capacity) = match args.decoder {
        DecoderKind::Same => ("same", channel_mutual_info(&ensemble, &DecoderSpec::SameEnsemble)?),
        DecoderKind::Conjugate => ("conjugate", channel_mutual_info(&ensemble, &DecoderSpec::Conjugate)?),
        DecoderKind::BlochInversion => {
            ("bloch-inversion", channel_mutual_info(&ensemble, &DecoderSpec::BlochInversion)?)
        }
        DecoderKind::UnitaryOpt => {
            let seed = args.seed.expect("checked above");
            let out = optimize_rotated_decoder(&ensemble, seed, args.restarts, OPTIMIZER_EVALS)?;
            unitary_json = matrix_json(out.unitary.matrix());
            ("unitary-opt", out.capacity)
        }
        DecoderKind::Repudiation => {
            let b = args
                .b
                .ok_or_else(|| Error::InvalidParameter("--b is required for --decoder repudiation".into()))?;
            ("repudiation", repudiation_capacity(&ensemble, b)?)
        }
    };

    let json = json!({
        "command": "capacity",
        "d": args.d,
        "n": args.n,
        "decoder": label,
        "b": args.b,
        "seed": args.seed,
        "restarts": args.restarts,
        "capacity_bits": capacity,
        "unitary": unitary_json,
    });
    let summary = vec![format!(
        "capacity d={} n={} decoder={}: {:.12} bits",
        args.d, args.n, label, capacity
    )];
    Ok(Output::ok(json, summary))
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

fn sweep_fig1(args: Fig1Args) -> Result<Output, Error> {
    if args.d < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    // One size per basis count: n = kd for k = 2..=d, capped at n ≤ d².
    let n_range: Vec<usize> = (2..=args.d).map(|k| k * args.d).collect();
    let rows = figure1_data(args.d, &n_range)?;
    let csv = fig1_csv(&rows);
    let mut artifacts = Vec::new();
    if let Some(out) = &args.out {
        fs::write(out, &csv)?;
        artifacts.push(out.display().to_string());
    }
    let json = json!({
        "command": "sweep fig1",
        "d": args.d,
        "n_range": n_range,
        "rows": rows,
        "artifacts": artifacts,
    });
    let mut summary = vec![format!("threshold sweep at d={}: {} rows", args.d, rows.len())];
    match &args.out {
        Some(out) => summary.push(format!("wrote {}", out.display())),
        None => summary.push(csv.trim_end().to_string()),
    }
    Ok(Output::ok(json, summary))
}

fn sweep_fig2(args: Fig2Args) -> Result<Output, Error> {
    let rows = figure2_data(&args.dims)?;
    let csv = fig2_csv(&rows);
    let mut artifacts = Vec::new();
    if let Some(out) = &args.out {
        fs::write(out, &csv)?;
        artifacts.push(out.display().to_string());
    }
    let json = json!({
        "command": "sweep fig2",
        "dims": args.dims,
        "rows": rows,
        "artifacts": artifacts,
    });
    let mut summary = vec![format!("speed/security sweep over {:?}: {} rows", args.dims, rows.len())];
    match &args.out {
        Some(out) => summary.push(format!("wrote {}", out.display())),
        None => summary.push(csv.trim_end().to_string()),
    }
    Ok(Output::ok(json, summary))
}

fn entangle_cmd(args: EntangleArgs) -> Result<Output, Error> {
    let ensemble = match (&args.file, args.d, args.n) {
        (Some(path), _, _) => frame_from_json(&fs::read_to_string(path)?)?,
        (None, Some(d), Some(n)) => load_or_build_esc(None, n, d, args.seed)?,
        _ => {
            return Err(Error::InvalidParameter(
                "pass a frame file or both --d and --n".into(),
            ))
        }
    };
    let d = ensemble.dim();
    let state = entangled_state(&ensemble)?;
    let reduced = reduced_first_factor(&state, d)?;
    let target = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
    let reduced_deviation = (reduced.matrix() - target).norm();

    let mut artifacts = Vec::new();
    if let Some(out) = &args.out {
        let mut text = format!("{{\"dim\":{},\"amplitudes\":[", state.dim());
        for (i, amp) in state.amplitudes().iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            text.push_str(&format!("[{:.16e},{:.16e}]", amp.re, amp.im));
        }
        text.push_str("]}\n");
        fs::write(out, text)?;
        artifacts.push(out.display().to_string());
    }

    let json = json!({
        "command": "entangle",
        "d": d,
        "n": ensemble.len(),
        "state_dim": state.dim(),
        "reduced_deviation_from_maximally_mixed": reduced_deviation,
        "artifacts": artifacts,
    });
    let mut summary = vec![format!(
        "entangled state of d={} n={}: dim {} vector, reduced-operator deviation {:.3e}",
        d,
        ensemble.len(),
        state.dim(),
        reduced_deviation
    )];
    if let Some(out) = &args.out {
        summary.push(format!("wrote {}", out.display()));
    }
    Ok(Output::ok(json, summary))
}
