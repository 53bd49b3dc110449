//! Seeded round-by-round simulation of the protocols, used as the
//! statistical oracle for every closed form.
//!
//! Rounds are processed in fixed-size chunks; chunk i draws from a stream
//! derived from (seed, i), and aggregation is commutative, so the result is
//! a function of (seed, chunk_size) alone no matter how chunks are executed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::frames::{povm_from_ensemble, Ensemble};
use crate::info::TripartiteDistribution;
use crate::mub::MubParams;
use crate::protocol::{AttackSummary, EscParams};

/// Which protocol a simulation runs.
#[derive(Debug, Clone, Copy)]
pub enum SimParams {
    /// Spherical-code rounds with outcome announcements.
    Esc(EscParams),
    /// Unbiased-basis rounds with the basis-announcement sift.
    Mub { params: MubParams, q: f64 },
}

/// Simulation request. `chunk_size` is part of the reproducibility contract.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub params: SimParams,
    pub rounds: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Recompute outcome probabilities by matrix traces every round instead
    /// of the precomputed overlap table; slow, kept as a self-check.
    pub use_matrix_path: bool,
}

impl SimConfig {
    pub fn new(params: SimParams, rounds: u64, seed: u64) -> Self {
        Self { params, rounds, seed, chunk_size: 1 << 16, use_matrix_path: false }
    }
}

/// Sifted counts over (Alice, Bob, Eve∪{?}), relabeled to the surviving
/// alphabet exactly like the analytic joint distribution.
#[derive(Debug, Clone, Serialize)]
pub struct CountsTable {
    pub a_size: usize,
    pub b_size: usize,
    pub e_size: usize,
    counts: Vec<u64>,
}

impl CountsTable {
    fn zeros(a_size: usize, b_size: usize, e_size: usize) -> Self {
        Self { a_size, b_size, e_size, counts: vec![0; a_size * b_size * e_size] }
    }

    pub fn count(&self, a: usize, b: usize, e: usize) -> u64 {
        self.counts[(a * self.b_size + b) * self.e_size + e]
    }

    fn bump(&mut self, a: usize, b: usize, e: usize) {
        self.counts[(a * self.b_size + b) * self.e_size + e] += 1;
    }

    fn merge(&mut self, other: &Self) {
        for (x, y) in self.counts.iter_mut().zip(&other.counts) {
            *x += y;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Empirical quantities with binomial standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub rounds_total: u64,
    pub rounds_sifted: u64,
    pub p_sift: f64,
    pub p_sift_se: f64,
    pub p_ab: f64,
    pub p_ab_se: f64,
    pub p_ae: f64,
    pub p_ae_se: f64,
    pub p_question: f64,
    pub p_question_se: f64,
    pub counts: CountsTable,
}

#[derive(Default)]
struct ChunkStats {
    sifted: u64,
    agree_ab: u64,
    agree_ae: u64,
    question: u64,
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn binomial_se(p_hat: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    (p_hat * (1.0 - p_hat) / trials as f64).sqrt()
}

/// Squared-overlap response table: row x holds the outcome distribution of
/// the ensemble measurement applied to signal x.
fn esc_overlap_table(e: &Ensemble) -> Vec<Vec<f64>> {
    let n = e.len();
    let d = e.dim() as f64;
    let gram = e.gram();
    (0..n)
        .map(|x| {
            let mut row: Vec<f64> = (0..n)
                .map(|k| d / n as f64 * gram[(k, x)].norm_sqr())
                .collect();
            let total: f64 = row.iter().sum();
            for p in row.iter_mut() {
                *p /= total;
            }
            row
        })
        .collect()
}

/// Runs the configured number of rounds. The ensemble must match the
/// parameters: (n, d) for the spherical code, k·d grouped basis vectors for
/// the unbiased-basis mode.
pub fn simulate(cfg: &SimConfig, e: &Ensemble) -> Result<SimResult> {
    if cfg.rounds == 0 || cfg.chunk_size == 0 {
        return Err(Error::InvalidParameter("rounds and chunk_size must be positive".into()));
    }
    match cfg.params {
        SimParams::Esc(params) => simulate_esc(cfg, e, &params),
        SimParams::Mub { params, q } => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("interception fraction {q} outside [0,1]")));
            }
            simulate_mub(cfg, e, &params, q)
        }
    }
}

fn simulate_esc(cfg: &SimConfig, e: &Ensemble, params: &EscParams) -> Result<SimResult> {
    let code = params.code();
    let (n, d, m) = (code.n(), code.d(), code.m());
    if e.len() != n || e.dim() != d {
        return Err(Error::InvalidParameter(format!(
            "ensemble is {} vectors in dimension {}, parameters want n={n}, d={d}",
            e.len(),
            e.dim()
        )));
    }
    let q = params.q();
    let n_kept = n - m;

    let table = esc_overlap_table(e);
    let povm = if cfg.use_matrix_path { Some(povm_from_ensemble(e)?) } else { None };
    let sample_outcome = |x: usize, u: f64| -> Result<usize> {
        match &povm {
            Some(povm) => {
                let mut row = povm.outcome_probabilities(&e.vectors()[x])?;
                let total: f64 = row.iter().sum();
                for p in row.iter_mut() {
                    *p /= total;
                }
                Ok(sample_index(&row, u))
            }
            None => Ok(sample_index(&table[x], u)),
        }
    };

    let mut counts = CountsTable::zeros(n_kept, n_kept, n_kept + 1);
    let mut stats = ChunkStats::default();
    let mut announced = vec![false; n];
    let mut scratch: Vec<usize> = Vec::with_capacity(n - 1);

    let chunks = cfg.rounds.div_ceil(cfg.chunk_size);
    for chunk in 0..chunks {
        let todo = cfg.chunk_size.min(cfg.rounds - chunk * cfg.chunk_size);
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(chunk);
        let mut chunk_counts = CountsTable::zeros(n_kept, n_kept, n_kept + 1);
        let mut chunk_stats = ChunkStats::default();

        for _ in 0..todo {
            let a = rng.random_range(0..n);
            let intercepted = rng.random_bool(q);
            let eve_outcome = if intercepted {
                let u: f64 = rng.random();
                Some(sample_outcome(a, u)?)
            } else {
                None
            };
            let forwarded = eve_outcome.unwrap_or(a);
            let u: f64 = rng.random();
            let b = sample_outcome(forwarded, u)?;

            // Bob announces m outcomes he did not obtain.
            scratch.clear();
            scratch.extend((0..n).filter(|&x| x != b));
            for i in 0..m {
                let j = rng.random_range(i..scratch.len());
                scratch.swap(i, j);
            }
            for &x in &scratch[..m] {
                announced[x] = true;
            }

            let sifted = !announced[a];
            if sifted {
                chunk_stats.sifted += 1;
                let rank = |x: usize| x - scratch[..m].iter().filter(|&&y| y < x).count();
                let (ra, rb) = (rank(a), rank(b));
                let eve_letter = match eve_outcome {
                    Some(ev) if !announced[ev] => rank(ev),
                    _ => n_kept,
                };
                chunk_counts.bump(ra, rb, eve_letter);
                if a == b {
                    chunk_stats.agree_ab += 1;
                }
                if eve_letter < n_kept && eve_letter == ra {
                    chunk_stats.agree_ae += 1;
                }
                if eve_letter == n_kept {
                    chunk_stats.question += 1;
                }
            }
            for &x in &scratch[..m] {
                announced[x] = false;
            }
        }

        counts.merge(&chunk_counts);
        stats.sifted += chunk_stats.sifted;
        stats.agree_ab += chunk_stats.agree_ab;
        stats.agree_ae += chunk_stats.agree_ae;
        stats.question += chunk_stats.question;
    }

    Ok(finish(cfg.rounds, stats, counts))
}

fn simulate_mub(cfg: &SimConfig, e: &Ensemble, params: &MubParams, q: f64) -> Result<SimResult> {
    let (d, k) = (params.d(), params.k());
    if e.len() != k * d || e.dim() != d {
        return Err(Error::InvalidParameter(format!(
            "ensemble is {} vectors in dimension {}, parameters want {} bases of {d}",
            e.len(),
            e.dim(),
            k
        )));
    }

    // Row v, basis β: normalized projective outcome distribution.
    let gram = e.gram();
    let overlap = |signal: usize, basis: usize| -> Vec<f64> {
        let mut row: Vec<f64> = (0..d)
            .map(|y| gram[(basis * d + y, signal)].norm_sqr())
            .collect();
        let total: f64 = row.iter().sum();
        for p in row.iter_mut() {
            *p /= total;
        }
        row
    };
    let table: Vec<Vec<Vec<f64>>> = (0..k * d)
        .map(|v| (0..k).map(|basis| overlap(v, basis)).collect())
        .collect();
    let sample_outcome = |signal: usize, basis: usize, u: f64| -> usize {
        if cfg.use_matrix_path {
            sample_index(&overlap(signal, basis), u)
        } else {
            sample_index(&table[signal][basis], u)
        }
    };

    let mut counts = CountsTable::zeros(d, d, d + 1);
    let mut stats = ChunkStats::default();

    let chunks = cfg.rounds.div_ceil(cfg.chunk_size);
    for chunk in 0..chunks {
        let todo = cfg.chunk_size.min(cfg.rounds - chunk * cfg.chunk_size);
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(chunk);
        let mut chunk_counts = CountsTable::zeros(d, d, d + 1);
        let mut chunk_stats = ChunkStats::default();

        for _ in 0..todo {
            let basis_a = rng.random_range(0..k);
            let letter_a = rng.random_range(0..d);
            let signal = basis_a * d + letter_a;
            let intercepted = rng.random_bool(q);
            let eve = if intercepted {
                let basis_e = rng.random_range(0..k);
                let u: f64 = rng.random();
                Some((basis_e, sample_outcome(signal, basis_e, u)))
            } else {
                None
            };
            let forwarded = eve.map_or(signal, |(basis_e, y)| basis_e * d + y);
            let basis_b = rng.random_range(0..k);
            let u: f64 = rng.random();
            let letter_b = sample_outcome(forwarded, basis_b, u);

            if basis_b == basis_a {
                chunk_stats.sifted += 1;
                let eve_letter = match eve {
                    Some((basis_e, y)) if basis_e == basis_a => y,
                    _ => d,
                };
                chunk_counts.bump(letter_a, letter_b, eve_letter);
                if letter_a == letter_b {
                    chunk_stats.agree_ab += 1;
                }
                if eve_letter < d && eve_letter == letter_a {
                    chunk_stats.agree_ae += 1;
                }
                if eve_letter == d {
                    chunk_stats.question += 1;
                }
            }
        }

        counts.merge(&chunk_counts);
        stats.sifted += chunk_stats.sifted;
        stats.agree_ab += chunk_stats.agree_ab;
        stats.agree_ae += chunk_stats.agree_ae;
        stats.question += chunk_stats.question;
    }

    Ok(finish(cfg.rounds, stats, counts))
}

fn finish(rounds: u64, stats: ChunkStats, counts: CountsTable) -> SimResult {
    let sifted = stats.sifted;
    let p_sift = sifted as f64 / rounds as f64;
    let frac = |x: u64| if sifted > 0 { x as f64 / sifted as f64 } else { f64::NAN };
    let (p_ab, p_ae, p_question) = (frac(stats.agree_ab), frac(stats.agree_ae), frac(stats.question));
    SimResult {
        rounds_total: rounds,
        rounds_sifted: sifted,
        p_sift,
        p_sift_se: binomial_se(p_sift, rounds),
        p_ab,
        p_ab_se: binomial_se(p_ab, sifted),
        p_ae,
        p_ae_se: binomial_se(p_ae, sifted),
        p_question,
        p_question_se: binomial_se(p_question, sifted),
        counts,
    }
}

/// Analytic counterpart of the simulation quadruple for the unbiased-basis
/// mode: sift 1/k; error q(k−1)(d−1)/(kd); Eve keeps a letter only when her
/// basis matched, probability q/k.
pub fn mub_attack_summary(params: &MubParams, q: f64) -> AttackSummary {
    let (d, k) = (params.d() as f64, params.k() as f64);
    AttackSummary {
        p_sift: 1.0 / k,
        p_ab: 1.0 - q * (k - 1.0) * (d - 1.0) / (k * d),
        p_ae: q / k,
        p_question: 1.0 - q / k,
    }
}

/// Analytic post-sift joint for the unbiased-basis mode, alphabets
/// (d, d, d+1) with "?" last.
pub fn mub_joint_distribution(params: &MubParams, q: f64) -> TripartiteDistribution {
    let (d, k) = (params.d(), params.k());
    let df = d as f64;
    let kf = k as f64;
    let e_size = d + 1;
    let mut probs = vec![0.0; d * d * e_size];
    for a in 0..d {
        // Matched interception: Eve learns the letter, Bob is undisturbed.
        probs[(a * d + a) * e_size + a] += q / (kf * df);
        for b in 0..d {
            let idle = if a == b { (1.0 - q) / df } else { 0.0 };
            let mismatch = q * (kf - 1.0) / (kf * df * df);
            probs[(a * d + b) * e_size + d] += idle + mismatch;
        }
    }
    TripartiteDistribution::new(d, d, e_size, probs).expect("closed-form weights sum to one")
}

/// Per-quantity z-scores at 3σ plus a chi-square test of the sifted counts
/// against an analytic joint distribution.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub z_sift: f64,
    pub z_ab: f64,
    pub z_ae: f64,
    pub z_question: f64,
    pub z_pass: bool,
    pub chi_square: f64,
    pub chi_square_df: usize,
    pub chi_square_critical_99: f64,
    pub chi_square_pass: bool,
}

impl ComparisonReport {
    pub fn pass(&self) -> bool {
        self.z_pass && self.chi_square_pass
    }
}

fn z_score(observed: f64, expected: f64, trials: u64) -> f64 {
    let var = expected * (1.0 - expected) / trials as f64;
    if var <= 0.0 {
        if (observed - expected).abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (observed - expected) / var.sqrt()
    }
}

/// Compares a simulation against the analytic quadruple and joint. Cells
/// with expected count below 5 are lumped into a single remainder term.
pub fn compare_to_analytic(
    res: &SimResult,
    summary: &AttackSummary,
    joint: &TripartiteDistribution,
) -> Result<ComparisonReport> {
    if res.rounds_sifted == 0 {
        return Err(Error::InvalidParameter("no sifted rounds to compare".into()));
    }
    let c = &res.counts;
    if c.a_size != joint.a_size() || c.b_size != joint.b_size() || c.e_size != joint.e_size() {
        return Err(Error::InvalidParameter(format!(
            "counts table {}x{}x{} does not match joint {}x{}x{}",
            c.a_size,
            c.b_size,
            c.e_size,
            joint.a_size(),
            joint.b_size(),
            joint.e_size()
        )));
    }

    let z_sift = z_score(res.p_sift, summary.p_sift, res.rounds_total);
    let z_ab = z_score(res.p_ab, summary.p_ab, res.rounds_sifted);
    let z_ae = z_score(res.p_ae, summary.p_ae, res.rounds_sifted);
    let z_question = z_score(res.p_question, summary.p_question, res.rounds_sifted);
    let z_pass = [z_sift, z_ab, z_ae, z_question].iter().all(|z| z.abs() <= 3.0);

    let sifted = res.rounds_sifted as f64;
    let mut chi_square = 0.0;
    let mut terms = 0usize;
    let mut rest_expected = 0.0;
    let mut rest_observed = 0.0;
    for a in 0..c.a_size {
        for b in 0..c.b_size {
            for e in 0..c.e_size {
                let expected = joint.p(a, b, e) * sifted;
                let observed = c.count(a, b, e) as f64;
                if expected >= 5.0 {
                    chi_square += (observed - expected).powi(2) / expected;
                    terms += 1;
                } else {
                    rest_expected += expected;
                    rest_observed += observed;
                }
            }
        }
    }
    if rest_expected > 0.0 {
        chi_square += (rest_observed - rest_expected).powi(2) / rest_expected;
        terms += 1;
    } else if rest_observed > 0.0 {
        // Events observed where the analytic joint puts zero mass.
        chi_square = f64::INFINITY;
    }
    let df = terms.saturating_sub(1).max(1);
    let critical = ChiSquared::new(df as f64)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?
        .inverse_cdf(0.99);

    Ok(ComparisonReport {
        z_sift,
        z_ab,
        z_ae,
        z_question,
        z_pass,
        chi_square,
        chi_square_df: df,
        chi_square_critical_99: critical,
        chi_square_pass: chi_square <= critical,
    })
}
