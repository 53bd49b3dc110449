//! Numerical search for Grassmann frames.
//!
//! The objective jointly penalizes non-tightness and non-equiangularity:
//! f(𝒞) = ‖S − (n/d)I‖²_F + β·Σ_{j≠k}(|G_jk|² − c)² with c = (n−d)/(d(n−1)).
//! Vectors are parameterized by unnormalized complex entries and renormalized
//! inside the objective; descent uses an adaptive step with random restarts.
//!
//! Descent alone has a sublinear tail near some solutions (the d = 3, n = 9
//! code most visibly, where the solution set is a continuous family), so
//! each restart is polished: damped Gauss–Newton on the residual system for
//! problems small enough to factor, otherwise alternating projection between
//! the equiangular Gram structure and the rank-d tight spectrum.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};

use super::{ensemble_from_columns, gaussian_matrix, normalize_columns, verify_frame, Ensemble, FrameReport};

/// Knobs for [`solve_grassmann_frame`]. Restarts draw independent streams
/// derived from (seed, restart index), so the outcome does not depend on the
/// order in which restarts are executed.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub seed: u64,
    pub restarts: u32,
    pub max_iterations: u32,
    pub success_tolerance: f64,
    pub penalty_weight: f64,
}

impl SolverConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            restarts: 8,
            max_iterations: 25_000,
            success_tolerance: 1e-6,
            penalty_weight: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidParameter("restarts and max_iterations must be positive".into()));
        }
        if self.success_tolerance <= 0.0 || self.penalty_weight <= 0.0 {
            return Err(Error::InvalidParameter(
                "success_tolerance and penalty_weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Best ensemble found by the search, converged or not.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub ensemble: Ensemble,
    pub report: FrameReport,
    /// Both deviations within the configured success tolerance.
    pub converged: bool,
    /// Final objective value of the best restart.
    pub objective: f64,
    /// Index of the restart that produced the result.
    pub best_restart: u32,
}

struct Eval {
    objective: f64,
    gradient: CMatrix,
    max_equiangular_deviation: f64,
    tightness_deviation: f64,
}

fn objective_terms(phi: &CMatrix, target: f64, beta: f64) -> (f64, CMatrix, CMatrix, f64, f64) {
    let d = phi.nrows();
    let n = phi.ncols();
    let gram = phi.adjoint() * phi;
    let s = phi * phi.adjoint();
    let delta = &s - CMatrix::identity(d, d) * C64::new(n as f64 / d as f64, 0.0);

    let tightness = delta.norm();
    let mut f = tightness * tightness;
    let mut max_eq: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let dev = gram[(j, k)].norm_sqr() - target;
                f += beta * dev * dev;
                max_eq = max_eq.max(dev.abs());
            }
        }
    }
    (f, gram, delta, max_eq, tightness)
}

/// Objective and conjugate gradient with respect to the raw (unnormalized)
/// parameters, so central finite differences on entries match directly.
fn evaluate(params: &CMatrix, target: f64, beta: f64) -> Eval {
    let phi = normalize_columns(params);
    let (f, gram, delta, max_eq, tight) = objective_terms(&phi, target, beta);

    let n = phi.ncols();
    // Gradient with respect to conj(φ): 2·Δ·Φ + 4β·Φ·(W ∘ G), W_jk = |G_jk|² − c off-diagonal.
    let mut weighted = gram.clone();
    for j in 0..n {
        for k in 0..n {
            if j == k {
                weighted[(j, k)] = C64::new(0.0, 0.0);
            } else {
                let w = gram[(j, k)].norm_sqr() - target;
                weighted[(j, k)] *= C64::new(4.0 * beta * w, 0.0);
            }
        }
    }
    let grad_phi = &delta * &phi * C64::new(2.0, 0.0) + &phi * weighted;

    // Chain rule through the per-column normalization φ = x/‖x‖.
    let mut gradient = grad_phi;
    for k in 0..n {
        let r = params.column(k).norm();
        let phi_k = phi.column(k);
        let radial = {
            let g = gradient.column(k);
            g.dotc(&phi_k).re
        };
        let correction = phi_k.into_owned() * C64::new(radial, 0.0);
        let mut col = gradient.column_mut(k);
        col -= correction;
        col /= C64::new(r, 0.0);
    }

    Eval { objective: f, gradient, max_equiangular_deviation: max_eq, tightness_deviation: tight }
}

fn objective_only(params: &CMatrix, target: f64, beta: f64) -> f64 {
    let phi = normalize_columns(params);
    objective_terms(&phi, target, beta).0
}

struct RestartResult {
    params: CMatrix,
    objective: f64,
}

fn descend(
    mut x: CMatrix,
    target: f64,
    beta: f64,
    max_evals: u32,
    stop_dev: f64,
    mut trace: Option<&mut Vec<f64>>,
) -> RestartResult {
    let mut eta = 0.05;
    let mut eval = evaluate(&x, target, beta);
    let mut evals: u32 = 1;
    let mut window_best = eval.objective;
    let mut accepted_since_check: u32 = 0;

    while evals < max_evals {
        if eval.max_equiangular_deviation <= stop_dev && eval.tightness_deviation <= stop_dev {
            break;
        }
        // Backtracking trial loop: shrink until the objective decreases.
        let mut accepted = false;
        while evals < max_evals {
            let trial = &x - &eval.gradient * C64::new(eta, 0.0);
            let f_trial = objective_only(&trial, target, beta);
            evals += 1;
            if f_trial < eval.objective {
                x = trial;
                eta *= 1.1;
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
        eval = evaluate(&x, target, beta);
        evals += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(eval.objective);
        }

        accepted_since_check += 1;
        if accepted_since_check >= 64 {
            accepted_since_check = 0;
            // Abandon restarts that have plateaued away from a frame.
            if window_best - eval.objective < 1e-12 * window_best.max(1e-300) {
                break;
            }
            window_best = eval.objective;
        }
    }

    let objective = objective_only(&x, target, beta);
    RestartResult { params: x, objective }
}

/// Residuals of the frame conditions at raw (unnormalized) parameters:
/// vector norms, pairwise squared overlaps against the target, and the
/// frame-operator entries against (n/d)·I. All residuals vanish exactly on a
/// Grassmann frame.
fn frame_residuals(x: &CMatrix, target: f64, beta: f64, out: &mut nalgebra::DVector<f64>) {
    let d = x.nrows();
    let n = x.ncols();
    let eq_w = (2.0 * beta).sqrt();
    let off_w = std::f64::consts::SQRT_2;
    let mut row = 0;
    for k in 0..n {
        out[row] = x.column(k).norm_squared() - 1.0;
        row += 1;
    }
    for j in 0..n {
        for k in j + 1..n {
            let g = x.column(j).dotc(&x.column(k));
            out[row] = eq_w * (g.norm_sqr() - target);
            row += 1;
        }
    }
    let s = x * x.adjoint();
    for p in 0..d {
        out[row] = s[(p, p)].re - n as f64 / d as f64;
        row += 1;
    }
    for p in 0..d {
        for q in p + 1..d {
            out[row] = off_w * s[(p, q)].re;
            out[row + 1] = off_w * s[(p, q)].im;
            row += 2;
        }
    }
}

fn frame_jacobian(x: &CMatrix, beta: f64, jac: &mut nalgebra::DMatrix<f64>) {
    let d = x.nrows();
    let n = x.ncols();
    let eq_w = (2.0 * beta).sqrt();
    let off_w = std::f64::consts::SQRT_2;
    jac.fill(0.0);
    let col_of = |k: usize, i: usize| 2 * (k * d + i);

    let mut row = 0;
    for k in 0..n {
        for i in 0..d {
            let z = x[(i, k)];
            jac[(row, col_of(k, i))] = 2.0 * z.re;
            jac[(row, col_of(k, i) + 1)] = 2.0 * z.im;
        }
        row += 1;
    }
    for j in 0..n {
        for k in j + 1..n {
            let g = x.column(j).dotc(&x.column(k));
            for i in 0..d {
                // Conjugate-coordinate gradients G_jk·x_j and conj(G_jk)·x_k.
                let gk = g * x[(i, j)];
                jac[(row, col_of(k, i))] = eq_w * 2.0 * gk.re;
                jac[(row, col_of(k, i) + 1)] = eq_w * 2.0 * gk.im;
                let gj = g.conj() * x[(i, k)];
                jac[(row, col_of(j, i))] = eq_w * 2.0 * gj.re;
                jac[(row, col_of(j, i) + 1)] = eq_w * 2.0 * gj.im;
            }
            row += 1;
        }
    }
    for p in 0..d {
        for k in 0..n {
            let z = x[(p, k)];
            jac[(row, col_of(k, p))] = 2.0 * z.re;
            jac[(row, col_of(k, p) + 1)] = 2.0 * z.im;
        }
        row += 1;
    }
    for p in 0..d {
        for q in p + 1..d {
            for k in 0..n {
                let a = x[(p, k)];
                let b = x[(q, k)];
                jac[(row, col_of(k, p))] = off_w * b.re;
                jac[(row, col_of(k, p) + 1)] = off_w * b.im;
                jac[(row, col_of(k, q))] = off_w * a.re;
                jac[(row, col_of(k, q) + 1)] = off_w * a.im;
                jac[(row + 1, col_of(k, p))] = -off_w * b.im;
                jac[(row + 1, col_of(k, p) + 1)] = off_w * b.re;
                jac[(row + 1, col_of(k, q))] = off_w * a.im;
                jac[(row + 1, col_of(k, q) + 1)] = -off_w * a.re;
            }
            row += 2;
        }
    }
}

/// Damped Gauss–Newton on the residual system. Converges to the solution
/// manifold even where it is a continuous family, which defeats first-order
/// descent.
fn gauss_newton_polish(
    start: &CMatrix,
    target: f64,
    beta: f64,
    max_iters: u32,
    stop_dev: f64,
) -> CMatrix {
    let d = start.nrows();
    let n = start.ncols();
    let params = 2 * d * n;
    let residual_count = n + n * (n - 1) / 2 + d * d;

    let mut x = normalize_columns(start);
    let mut r = nalgebra::DVector::zeros(residual_count);
    let mut r_trial = nalgebra::DVector::zeros(residual_count);
    let mut jac = nalgebra::DMatrix::zeros(residual_count, params);
    let mut mu = 1e-6;

    frame_residuals(&x, target, beta, &mut r);
    let mut cost = r.norm_squared();

    for _ in 0..max_iters {
        let phi = normalize_columns(&x);
        let (_, _, _, max_eq, tight) = objective_terms(&phi, target, beta);
        if max_eq.max(tight) <= stop_dev {
            break;
        }

        frame_jacobian(&x, beta, &mut jac);
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * &r;

        let mut stepped = false;
        for _ in 0..24 {
            let mut damped = a.clone();
            for i in 0..params {
                damped[(i, i)] += mu;
            }
            let Some(chol) = damped.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let delta = chol.solve(&g);
            let mut trial = x.clone();
            for k in 0..n {
                for i in 0..d {
                    let p = 2 * (k * d + i);
                    trial[(i, k)] -= C64::new(delta[p], delta[p + 1]);
                }
            }
            frame_residuals(&trial, target, beta, &mut r_trial);
            let trial_cost = r_trial.norm_squared();
            if trial_cost < cost {
                x = trial;
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                mu = (mu * 0.3).max(1e-14);
                stepped = true;
                break;
            }
            mu *= 4.0;
        }
        if !stepped {
            break;
        }
    }
    normalize_columns(&x)
}

/// Alternate between forcing the Gram matrix onto the equiangular pattern
/// (unit diagonal, off-diagonal modulus √c with phases kept) and onto the
/// spectrum of a tight rank-d frame (d eigenvalues equal to n/d). Returns the
/// iterate with the smallest worst-case deviation.
fn alternating_projection_polish(
    start: &CMatrix,
    target: f64,
    beta: f64,
    max_iters: u32,
    stop_dev: f64,
) -> CMatrix {
    let d = start.nrows();
    let n = start.ncols();
    let sqrt_c = target.sqrt();
    let scale = C64::new((n as f64 / d as f64).sqrt(), 0.0);

    let mut phi = normalize_columns(start);
    let mut best = phi.clone();
    let mut best_dev = f64::INFINITY;

    for _ in 0..max_iters {
        let mut gram = phi.adjoint() * &phi;
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    gram[(j, k)] = C64::new(1.0, 0.0);
                } else {
                    let z = gram[(j, k)];
                    let modulus = z.norm();
                    gram[(j, k)] = if modulus > 1e-300 {
                        z * C64::new(sqrt_c / modulus, 0.0)
                    } else {
                        C64::new(sqrt_c, 0.0)
                    };
                }
            }
        }
        let eig = gram.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let mut rows = CMatrix::zeros(d, n);
        for (row, &idx) in order.iter().take(d).enumerate() {
            rows.set_row(row, &(eig.eigenvectors.column(idx).adjoint() * scale));
        }
        phi = normalize_columns(&rows);

        let (_, _, _, max_eq, tight) = objective_terms(&phi, target, beta);
        let dev = max_eq.max(tight);
        if dev < best_dev {
            best_dev = dev;
            best = phi.clone();
        }
        if dev <= stop_dev {
            break;
        }
    }
    best
}

/// Searches for n equiangular unit vectors in dimension d. Requires
/// d + 1 ≤ n ≤ d² (equiangular codes never exist beyond n = d²). On a
/// non-converged search the best ensemble found is still returned, flagged
/// with its deviations, so callers can report how close the search came.
pub fn solve_grassmann_frame(d: usize, n: usize, cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {d}")));
    }
    if n <= d {
        return Err(Error::InvalidParameter(format!(
            "need more vectors than dimensions (n > d), got n={n}, d={d}"
        )));
    }
    if n > d * d {
        return Err(Error::InvalidParameter(format!(
            "equiangular codes require n <= d², got n={n} > {}",
            d * d
        )));
    }

    let target = (n - d) as f64 / (d as f64 * (n - 1) as f64);
    let stop_dev = (cfg.success_tolerance * 1e-3).max(1e-12);

    let mut best: Option<(RestartResult, u32)> = None;
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart as u64);
        let start = gaussian_matrix(d, n, &mut rng);
        let mut result = descend(start, target, cfg.penalty_weight, cfg.max_iterations, stop_dev, None);
        // Normal-equation factorization is cheap for every size the tests
        // exercise; very large frames keep the projection-based polish.
        let polished = if d * n <= 300 {
            gauss_newton_polish(&result.params, target, cfg.penalty_weight, 200, stop_dev)
        } else {
            alternating_projection_polish(&result.params, target, cfg.penalty_weight, 2_000, stop_dev)
        };
        let polished_objective = objective_only(&polished, target, cfg.penalty_weight);
        if polished_objective < result.objective {
            result = RestartResult { params: polished, objective: polished_objective };
        }
        let better = match &best {
            None => true,
            Some((b, _)) => result.objective < b.objective,
        };
        if better {
            best = Some((result, restart));
        }
    }

    let (best, best_restart) = best.expect("at least one restart");
    let ensemble = ensemble_from_columns(d, &best.params)?;
    let report = verify_frame(&ensemble);
    let converged = report.max_equiangular_deviation <= cfg.success_tolerance
        && report.max_tightness_deviation <= cfg.success_tolerance;
    Ok(SolveOutcome { ensemble, report, converged, objective: best.objective, best_restart })
}
