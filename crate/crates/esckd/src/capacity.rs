//! Classical capacity of encoder/decoder pairs over a noiseless quantum
//! channel, and numerical search for the best unitarily rotated decoder.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::frames::{povm_from_ensemble, repudiation_povm, Ensemble};
use crate::info::{mutual_information, JointDistribution2};
use crate::linalg::{unitary_exp_i_hermitian, C64, CMatrix, CVector, Operator, Povm, StateVector};

/// Bob's measurement choice against a fixed signal ensemble.
#[derive(Debug, Clone)]
pub enum DecoderSpec {
    /// The ensemble's own measurement.
    SameEnsemble,
    /// The measurement of the entrywise-conjugated ensemble.
    Conjugate,
    /// The ensemble measurement rotated by a fixed unitary.
    UnitaryRotated(Operator),
    /// Qubit preset: maps every signal to its orthogonal state (conjugation
    /// composed with a fixed rotation), i.e. the antipode on the Bloch
    /// sphere.
    BlochInversion,
    /// Outcomes that each exclude a subset of the signals.
    Repudiation { subset_size: usize },
}

fn bloch_inverted(e: &Ensemble) -> Result<Ensemble> {
    if e.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "Bloch inversion is a qubit decoder, got dimension {}",
            e.dim()
        )));
    }
    let vectors = e
        .vectors()
        .iter()
        .map(|v| {
            let a = v.amplitudes()[0];
            let b = v.amplitudes()[1];
            StateVector::new(CVector::from_vec(vec![-b.conj(), a.conj()]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(2, vectors)
}

fn decoder_povm(e: &Ensemble, dec: &DecoderSpec) -> Result<Povm> {
    match dec {
        DecoderSpec::SameEnsemble => povm_from_ensemble(e),
        DecoderSpec::Conjugate => povm_from_ensemble(&e.conjugate()),
        DecoderSpec::UnitaryRotated(u) => {
            if u.dim() != e.dim() {
                return Err(Error::InvalidParameter(format!(
                    "unitary dimension {} does not match ensemble dimension {}",
                    u.dim(),
                    e.dim()
                )));
            }
            let unitarity = (u.matrix().adjoint() * u.matrix() - CMatrix::identity(u.dim(), u.dim())).norm();
            if unitarity > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "matrix deviates from unitary by {unitarity:.3e}"
                )));
            }
            let base = povm_from_ensemble(e)?;
            let elements = base
                .elements()
                .iter()
                .map(|f| Operator::new(u.matrix() * f.matrix() * u.matrix().adjoint()).expect("square"))
                .collect();
            Povm::new(elements)
        }
        DecoderSpec::BlochInversion => povm_from_ensemble(&bloch_inverted(e)?),
        DecoderSpec::Repudiation { subset_size } => Ok(repudiation_povm(e, *subset_size)?.povm().clone()),
    }
}

fn capacity_against(e: &Ensemble, povm: &Povm) -> Result<f64> {
    let n = e.len();
    let outcomes = povm.len();
    let mut probs = vec![0.0; n * outcomes];
    for (a, v) in e.vectors().iter().enumerate() {
        for (j, p) in povm.outcome_probabilities(v)?.into_iter().enumerate() {
            probs[a * outcomes + j] = p / n as f64;
        }
    }
    let joint = JointDistribution2::new(n, outcomes, probs)?;
    Ok(mutual_information(&joint))
}

/// I(A:B) for uniform signals and the given decoder; exact enumeration with
/// no sifting and no eavesdropper.
pub fn channel_mutual_info(e: &Ensemble, dec: &DecoderSpec) -> Result<f64> {
    let povm = decoder_povm(e, dec)?;
    capacity_against(e, &povm)
}

/// Capacity of the subset-exclusion measurement, with the failure outcome
/// (when one is needed) kept as an explicit outcome.
pub fn repudiation_capacity(e: &Ensemble, subset_size: usize) -> Result<f64> {
    let rep = repudiation_povm(e, subset_size)?;
    capacity_against(e, rep.povm())
}

/// Best unitarily rotated decoder found by local search.
#[derive(Debug, Clone)]
pub struct OptimizedDecoder {
    pub unitary: Operator,
    pub capacity: f64,
    /// Restart that produced the winner (0 starts at the identity).
    pub best_restart: u32,
}

/// Hermitian generator from d² real parameters.
fn generator(theta: &[f64], d: usize) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        h[(i, i)] = C64::new(theta[idx], 0.0);
        idx += 1;
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            let re = theta[idx] * inv_sqrt2;
            let im = theta[idx + 1] * inv_sqrt2;
            idx += 2;
            h[(i, j)] = C64::new(re, -im);
            h[(j, i)] = C64::new(re, im);
        }
    }
    h
}

/// Maximizes [`channel_mutual_info`] over U = exp(iH) by Nelder–Mead descent
/// on −capacity with random restarts; restart 0 starts at U = I, so the
/// result never falls below the same-ensemble capacity. Deterministic given
/// the seed; ties between restarts go to the lowest index.
pub fn optimize_rotated_decoder(
    e: &Ensemble,
    seed: u64,
    restarts: u32,
    iterations: u32,
) -> Result<OptimizedDecoder> {
    if restarts == 0 || iterations == 0 {
        return Err(Error::InvalidParameter("restarts and iterations must be positive".into()));
    }
    let d = e.dim();
    let dims = d * d;

    // Pre-polished decoder columns: capacity(U) needs only |⟨w_j|U†|φ_a⟩|².
    let signal = e.as_matrix();
    let decoder = crate::frames::polished_columns(e)?;

    let n = e.len() as f64;
    let capacity_of = |theta: &[f64]| -> f64 {
        let u = unitary_exp_i_hermitian(&Operator::new(generator(theta, d)).expect("square"))
            .expect("generator is Hermitian by construction");
        let overlap = decoder.adjoint() * u.matrix().adjoint() * &signal;
        let outcomes = overlap.nrows();
        let n_sig = overlap.ncols();
        let mut probs = vec![0.0; n_sig * outcomes];
        for a in 0..n_sig {
            for j in 0..outcomes {
                probs[a * outcomes + j] = overlap[(j, a)].norm_sqr() / n;
            }
        }
        let joint = JointDistribution2::new(n_sig, outcomes, probs).expect("valid joint");
        mutual_information(&joint)
    };

    let mut best: Option<(f64, Vec<f64>, u32)> = None;
    for restart in 0..restarts {
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; dims]
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            (0..dims).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let (theta, value) = nelder_mead_max(&capacity_of, &start, iterations);
        let better = match &best {
            None => true,
            Some((v, _, _)) => value > *v,
        };
        if better {
            best = Some((value, theta, restart));
        }
    }

    let (capacity, theta, best_restart) = best.expect("at least one restart");
    let unitary = unitary_exp_i_hermitian(&Operator::new(generator(&theta, d))?)?;
    Ok(OptimizedDecoder { unitary, capacity, best_restart })
}

/// Standard Nelder–Mead on −f with a fixed evaluation budget.
fn nelder_mead_max(f: &dyn Fn(&[f64]) -> f64, start: &[f64], max_evals: u32) -> (Vec<f64>, f64) {
    let dim = start.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let step = 0.35;

    let evals = std::cell::Cell::new(0u32);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        -f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(start);
    simplex.push((start.to_vec(), v0));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    while evals.get() < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < 1e-12 {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = eval(&reflect);

        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            let fe = eval(&expand);
            simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = eval(&contract);
            if fc < worst.1 {
                simplex[dim] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    let fs = eval(&shrunk);
                    *entry = (shrunk, fs);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x, v) = simplex.swap_remove(0);
    (x, -v)
}
