//! Exact analytics of the spherical-code protocol under the intercept/resend
//! attack: sift rates, the post-sift tripartite distribution, key-rate
//! bounds, depolarizing-noise conversions, and security thresholds.
//!
//! Conventions: Alice sends one of n signals uniformly; Eve intercepts a
//! fraction q with the ensemble's own measurement and resends her outcome
//! state; Bob measures the same way and announces m outcomes he did not
//! obtain; rounds whose signal is announced are discarded. All mutual
//! informations are computed conditional on a fixed announcement set (the
//! top m labels). Label symmetry makes every announcement equivalent, which
//! the subset-enumerating oracle verifies by averaging over all of them.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{conditional_mutual_information, mutual_information, TripartiteDistribution};

/// Code geometry and exclusion policy: n signals in dimension d, with Bob
/// announcing m outcomes per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EscCode {
    n: usize,
    d: usize,
    m: usize,
}

impl EscCode {
    pub fn new(n: usize, d: usize, m: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {d}")));
        }
        if n <= d || n > d * d {
            return Err(Error::InvalidParameter(format!(
                "signal count {n} outside d+1..=d² = {}..={}",
                d + 1,
                d * d
            )));
        }
        if m > n - 2 {
            return Err(Error::InvalidParameter(format!(
                "exclusion count {m} exceeds n−2 = {}",
                n - 2
            )));
        }
        let code = Self { n, d, m };
        if code.s() <= 0.0 {
            return Err(Error::InvalidParameter("derived constant s must be positive".into()));
        }
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// s = n(n−1) − m(n−d).
    pub fn s(&self) -> f64 {
        (self.n * (self.n - 1) - self.m * (self.n - self.d)) as f64
    }

    /// Probability that the measurement reproduces the signal, d/n.
    fn agree(&self) -> f64 {
        self.d as f64 / self.n as f64
    }

    /// Probability of each specific wrong outcome, (n−d)/(n(n−1)).
    fn miss(&self) -> f64 {
        (self.n - self.d) as f64 / (self.n * (self.n - 1)) as f64
    }
}

/// A full attack scenario: the code plus Eve's interception fraction q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscParams {
    code: EscCode,
    q: f64,
}

impl EscParams {
    pub fn new(n: usize, d: usize, m: usize, q: f64) -> Result<Self> {
        Self::from_code(EscCode::new(n, d, m)?, q)
    }

    pub fn from_code(code: EscCode, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!("interception fraction {q} outside [0,1]")));
        }
        let params = Self { code, q };
        if params.t() <= 0.0 {
            return Err(Error::InvalidParameter("derived constant t must be positive".into()));
        }
        Ok(params)
    }

    pub fn code(&self) -> &EscCode {
        &self.code
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// t = s(n−1) − q·m(n−d)(d−1).
    pub fn t(&self) -> f64 {
        let c = &self.code;
        c.s() * (c.n - 1) as f64 - self.q * (c.m * (c.n - c.d) * (c.d - 1)) as f64
    }
}

/// Probability that a noiseless round survives sifting, s/(n(n−1)).
pub fn sift_rate_noiseless(code: &EscCode) -> f64 {
    code.s() / (code.n * (code.n - 1)) as f64
}

/// Key rate per sifted signal on the noiseless channel:
/// log(n−m) + (d(n−1)/s)·log(d(n−1)) + (1 − d(n−1)/s)·log(n−d) − log s.
/// Equals the mutual information of the post-sift joint of Alice and Bob.
pub fn key_rate_noiseless(code: &EscCode) -> f64 {
    let n = code.n as f64;
    let d = code.d as f64;
    let m = code.m as f64;
    let s = code.s();
    let p = d * (n - 1.0) / s;
    (n - m).log2() + p * (d * (n - 1.0)).log2() + (1.0 - p) * (n - d).log2() - s.log2()
}

/// The four closed-form probabilities that fully describe the post-sift
/// distribution under interception fraction q.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AttackSummary {
    /// Probability a round survives sifting, t/(n(n−1)²).
    pub p_sift: f64,
    /// P(Bob = Alice | sift).
    pub p_ab: f64,
    /// P(Eve = Alice | sift), counting only rounds where Eve keeps a letter.
    pub p_ae: f64,
    /// P(Eve records "?" | sift): no interception, or her outcome announced.
    pub p_question: f64,
}

pub fn attack_summary(p: &EscParams) -> AttackSummary {
    let c = p.code();
    let n = c.n as f64;
    let d = c.d as f64;
    let q = p.q();
    let s = c.s();
    let t = p.t();
    AttackSummary {
        p_sift: t / (n * (n - 1.0) * (n - 1.0)),
        p_ab: (n - 1.0) * (d * (n - 1.0) - q * (n - d) * (d - 1.0)) / t,
        p_ae: q * d * (n - 1.0) * s / (n * t),
        p_question: 1.0 - q * s * s / (n * t),
    }
}

/// How the post-sift joint distribution is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointMethod {
    /// Fill the distribution from the pattern weights implied by label
    /// symmetry, conditioned on the fixed announcement set.
    ClosedSymmetry,
    /// Enumerate every announcement subset explicitly (n ≤ 12) and average;
    /// serves as the independent oracle for the closed form.
    BruteForce,
}

/// Exact post-sift joint over (Alice, Bob, Eve∪{?}) with alphabets
/// (n−m, n−m, n−m+1); the last Eve index is the "?" symbol.
pub fn joint_distribution(p: &EscParams, method: JointMethod) -> Result<TripartiteDistribution> {
    match method {
        JointMethod::ClosedSymmetry => Ok(closed_symmetry_joint(p)),
        JointMethod::BruteForce => Ok(brute_force(p.code())?.joint(p.q())),
    }
}

fn closed_symmetry_joint(p: &EscParams) -> TripartiteDistribution {
    let c = p.code();
    let (alpha, gamma) = (c.agree(), c.miss());
    let q = p.q();
    let n_kept = c.n - c.m;
    let e_size = n_kept + 1;
    let question_diag = (1.0 - q) * alpha + q * c.m as f64 * gamma * gamma;
    let question_off = (1.0 - q) * gamma + q * c.m as f64 * gamma * gamma;

    let mut probs = vec![0.0; n_kept * n_kept * e_size];
    for a in 0..n_kept {
        for b in 0..n_kept {
            for e in 0..n_kept {
                let w = if e == a && e == b {
                    q * alpha * alpha
                } else if e == a {
                    q * alpha * gamma
                } else if e == b {
                    q * gamma * alpha
                } else {
                    q * gamma * gamma
                };
                probs[(a * n_kept + b) * e_size + e] = w;
            }
            let w = if a == b { question_diag } else { question_off };
            probs[(a * n_kept + b) * e_size + n_kept] = w;
        }
    }
    let total = crate::info::kahan_sum(probs.iter().copied());
    for x in probs.iter_mut() {
        *x /= total;
    }
    TripartiteDistribution::new(n_kept, n_kept, e_size, probs)
        .expect("closed-form weights form a distribution")
}

/// Raw enumeration tables split by interception so one subset sweep serves
/// every q: the joint at q is proportional to (1−q)·kept_idle + q·kept_tap.
struct BruteTables {
    n_kept: usize,
    e_size: usize,
    kept_idle: Vec<f64>,
    kept_tap: Vec<f64>,
    mass_idle: f64,
    mass_tap: f64,
    /// n · C(n−1, m), the normalization of (signal, announcement) pairs.
    weight_denominator: f64,
}

impl BruteTables {
    fn joint(&self, q: f64) -> TripartiteDistribution {
        let mut probs: Vec<f64> = self
            .kept_idle
            .iter()
            .zip(&self.kept_tap)
            .map(|(idle, tap)| (1.0 - q) * idle + q * tap)
            .collect();
        let total = crate::info::kahan_sum(probs.iter().copied());
        for x in probs.iter_mut() {
            *x /= total;
        }
        TripartiteDistribution::new(self.n_kept, self.n_kept, self.e_size, probs)
            .expect("enumeration weights form a distribution")
    }

    fn sift_rate(&self, q: f64) -> f64 {
        ((1.0 - q) * self.mass_idle + q * self.mass_tap) / self.weight_denominator
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

fn brute_force(code: &EscCode) -> Result<BruteTables> {
    if code.n > 12 {
        return Err(Error::InvalidParameter(format!(
            "announcement enumeration is limited to n <= 12, got {}",
            code.n
        )));
    }
    let n = code.n;
    let m = code.m;
    let n_kept = n - m;
    let e_size = n_kept + 1;
    let (alpha, gamma) = (code.agree(), code.miss());
    let prob = |outcome: usize, signal: usize| if outcome == signal { alpha } else { gamma };

    let mut kept_idle = vec![0.0; n_kept * n_kept * e_size];
    let mut kept_tap = vec![0.0; n_kept * n_kept * e_size];
    let mut in_set = vec![false; n];
    let mut rank = vec![usize::MAX; n];

    for announced in (0..n).combinations(m) {
        for flag in in_set.iter_mut() {
            *flag = false;
        }
        for &x in &announced {
            in_set[x] = true;
        }
        let mut next = 0;
        for x in 0..n {
            if !in_set[x] {
                rank[x] = next;
                next += 1;
            }
        }

        // Sifting keeps the round only if Alice's signal is unannounced, and
        // Bob can only have announced outcomes he did not obtain.
        for a in 0..n {
            if in_set[a] {
                continue;
            }
            for b in 0..n {
                if in_set[b] {
                    continue;
                }
                let cell = (rank[a] * n_kept + rank[b]) * e_size;
                kept_idle[cell + n_kept] += prob(b, a);
                for e in 0..n {
                    let w = prob(e, a) * prob(b, e);
                    if in_set[e] {
                        kept_tap[cell + n_kept] += w;
                    } else {
                        kept_tap[cell + rank[e]] += w;
                    }
                }
            }
        }
    }

    let mass_idle = kept_idle.iter().sum();
    let mass_tap = kept_tap.iter().sum();
    let weight_denominator = n as f64 * binomial(n - 1, m) as f64;
    Ok(BruteTables { n_kept, e_size, kept_idle, kept_tap, mass_idle, mass_tap, weight_denominator })
}

/// The attack summary recomputed from the subset enumeration instead of the
/// closed forms.
pub fn attack_summary_enumerated(p: &EscParams) -> Result<AttackSummary> {
    let tables = brute_force(p.code())?;
    let joint = tables.joint(p.q());
    let n_kept = joint.a_size();
    let mut p_ab = 0.0;
    let mut p_ae = 0.0;
    let mut p_question = 0.0;
    for a in 0..n_kept {
        for b in 0..n_kept {
            for e in 0..=n_kept {
                let pr = joint.p(a, b, e);
                if a == b {
                    p_ab += pr;
                }
                if e == n_kept {
                    p_question += pr;
                } else if e == a {
                    p_ae += pr;
                }
            }
        }
    }
    Ok(AttackSummary { p_sift: tables.sift_rate(p.q()), p_ab, p_ae, p_question })
}

/// One-way bounds computed from a tripartite distribution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateBounds {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    /// Lower bound I(A:B) − min{I(A:E), I(B:E)}; may be negative.
    pub i_e: f64,
    /// Upper bound I(A:B|E).
    pub i_ab_given_e: f64,
}

pub fn rate_bounds(joint: &TripartiteDistribution) -> RateBounds {
    let i_ab = mutual_information(&joint.ab_marginal());
    let i_ae = mutual_information(&joint.ae_marginal());
    let i_be = mutual_information(&joint.be_marginal());
    RateBounds {
        i_ab,
        i_ae,
        i_be,
        i_e: i_ab - i_ae.min(i_be),
        i_ab_given_e: conditional_mutual_information(joint),
    }
}

/// Post-sift error probability when the channel is depolarizing with rate r
/// (no eavesdropper): Bob's outcome distribution against the mixed signal is
/// enumerated through the fixed-announcement sift.
pub fn error_from_depolarizing(code: &EscCode, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("depolarizing rate {r} outside [0,1]")));
    }
    let n = code.n as f64;
    // Outcome probabilities against (1−r)|φ_a⟩⟨φ_a| + r·I/d keep the same
    // label symmetry, so the sift reduces to the two-value pattern.
    let agree = (1.0 - r) * code.agree() + r / n;
    let miss = (1.0 - r) * code.miss() + r / n;
    let kept = (code.n - code.m) as f64;
    Ok((kept - 1.0) * miss / (agree + (kept - 1.0) * miss))
}

/// Depolarizing rate reproducing a given post-sift error probability:
/// r = s/(m(d−1)) − n(n−1)(n−m−1)/(m(d−1)(n−1+m(p_e−1))) for m ≥ 1, and the
/// closed inverse of the direct channel model for m = 0 (the two-term form is
/// singular there).
pub fn depolarizing_from_error(code: &EscCode, p_e: f64) -> Result<f64> {
    let lo = error_from_depolarizing(code, 0.0)?;
    let hi = error_from_depolarizing(code, 1.0)?;
    if p_e < lo - 1e-9 || p_e > hi + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "error probability {p_e} outside the achievable range [{lo}, {hi}]"
        )));
    }
    let n = code.n as f64;
    let d = code.d as f64;
    let m = code.m as f64;
    let r = if code.m == 0 {
        (n * p_e - (n - d)) / (d - 1.0)
    } else {
        let s = code.s();
        s / (m * (d - 1.0)) - n * (n - 1.0) * (n - m - 1.0) / (m * (d - 1.0) * (n - 1.0 + m * (p_e - 1.0)))
    };
    Ok(r.clamp(0.0, 1.0))
}

/// Critical interception fraction and the noise rates it corresponds to.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdResult {
    /// Interception fraction where the one-way bound crosses zero (1.0 when
    /// saturated).
    pub q_star: f64,
    /// Post-sift error probability at q*.
    pub p_e_star: f64,
    /// Equivalent depolarizing rate at q*.
    pub r_star: f64,
    /// The one-way bound stays positive even at full interception.
    pub saturated: bool,
}

/// Tolerance on |I_E| at the returned threshold.
pub const THRESHOLD_IE_TOL: f64 = 1e-9;
/// Bisection interval width at which the search stops.
pub const THRESHOLD_Q_TOL: f64 = 1e-10;

fn i_e_at(code: &EscCode, q: f64) -> f64 {
    let params = EscParams::from_code(*code, q).expect("q in range");
    rate_bounds(&closed_symmetry_joint(&params)).i_e
}

/// Bisects I_E(q) on (0, 1] to find where the one-way key rate vanishes, and
/// converts the error rate there to a depolarizing rate.
pub fn threshold(code: &EscCode) -> Result<ThresholdResult> {
    let i_e_zero = key_rate_noiseless(code);
    if i_e_zero <= 0.0 {
        return Err(Error::NumericalFailure(format!(
            "noiseless key rate {i_e_zero} is not positive; nothing to bisect"
        )));
    }
    let i_e_full = i_e_at(code, 1.0);

    let (q_star, saturated) = if i_e_full > 0.0 {
        (1.0, true)
    } else {
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut mid = 0.5;
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let v = i_e_at(code, mid);
            if v.abs() <= THRESHOLD_IE_TOL || hi - lo <= THRESHOLD_Q_TOL {
                break;
            }
            if v > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (mid, false)
    };

    let summary = attack_summary(&EscParams::from_code(*code, q_star)?);
    let p_e_star = 1.0 - summary.p_ab;
    let r_star = depolarizing_from_error(code, p_e_star)?;
    Ok(ThresholdResult { q_star, p_e_star, r_star, saturated })
}

/// Large-d key generation rate per signal at n = αd:
/// log(d)/α + ((α−1)/α)·log((α−1)/α).
pub fn asymptotic_rate(d: usize, alpha: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {d}")));
    }
    if alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!("ratio alpha must exceed 1, got {alpha}")));
    }
    let frac = (alpha - 1.0) / alpha;
    Ok((d as f64).log2() / alpha + frac * frac.log2())
}
