//! Closed-form analytics of unbiased-basis protocols under intercept/resend,
//! used as the comparison baseline for the spherical-code curves.
//!
//! The one-way bound for these protocols uses I(A:E) alone: in the
//! basis-matched attack Eve either learns Alice's letter exactly (and then
//! Bob receives the undisturbed state) or learns nothing, so her correlation
//! with Bob is no stronger than with Alice.

use serde::Serialize;

use crate::error::{Error, Result};

/// An unbiased-basis protocol: k bases in dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MubParams {
    d: usize,
    k: usize,
}

impl MubParams {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {d}")));
        }
        if k < 2 || k > d + 1 {
            return Err(Error::InvalidParameter(format!("basis count {k} outside 2..={}", d + 1)));
        }
        Ok(Self { d, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Closed-form quantities at a given post-sift error probability.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MubSummary {
    /// I(A:B) = log d + p_e·log(p_e/(d−1)) + (1−p_e)·log(1−p_e).
    pub i_ab: f64,
    /// I(A:E) = d·p_e·log d / ((d−1)(k−1)).
    pub i_ae: f64,
    /// Basis-match probability 1/k, independent of the attack.
    pub sift: f64,
    /// Equivalent depolarizing rate r = p_e·d/(d−1).
    pub r: f64,
}

/// Error probability at full interception, (k−1)(d−1)/(kd).
pub fn mub_full_intercept_error(p: &MubParams) -> f64 {
    ((p.k - 1) * (p.d - 1)) as f64 / (p.k * p.d) as f64
}

/// Evaluates the closed forms; p_e may not exceed the full-interception
/// maximum. The error term uses the 0·log 0 = 0 convention at p_e = 0.
pub fn mub_summary(p: &MubParams, p_e: f64) -> Result<MubSummary> {
    let max_pe = mub_full_intercept_error(p);
    if !(0.0..=max_pe + 1e-15).contains(&p_e) {
        return Err(Error::InvalidParameter(format!(
            "error probability {p_e} outside [0, {max_pe}] for d={}, k={}",
            p.d, p.k
        )));
    }
    let d = p.d as f64;
    let k = p.k as f64;
    let error_term = if p_e > 0.0 { p_e * (p_e / (d - 1.0)).log2() } else { 0.0 };
    let success_term = if p_e < 1.0 { (1.0 - p_e) * (1.0 - p_e).log2() } else { 0.0 };
    Ok(MubSummary {
        i_ab: d.log2() + error_term + success_term,
        i_ae: d * p_e * d.log2() / ((d - 1.0) * (k - 1.0)),
        sift: 1.0 / k,
        r: p_e * d / (d - 1.0),
    })
}

/// Maximum tolerable noise and sift-weighted peak rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MubThreshold {
    /// Error probability where I(A:B) = I(A:E).
    pub p_e_star: f64,
    /// Equivalent depolarizing rate at the crossing.
    pub r_star: f64,
    /// Sift-weighted noiseless rate log₂(d)/k.
    pub rate_max: f64,
}

/// Bisects the crossing of the decreasing I(A:B) and the increasing I(A:E)
/// on [0, full-interception error]; a unique solution always exists.
pub fn mub_threshold(p: &MubParams) -> MubThreshold {
    let gap = |p_e: f64| {
        let s = mub_summary(p, p_e).expect("p_e stays inside the valid interval");
        s.i_ab - s.i_ae
    };
    let mut lo = 0.0;
    let mut hi = mub_full_intercept_error(p);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-10 {
            break;
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = p.d as f64;
    MubThreshold {
        p_e_star: mid,
        r_star: mid * d / (d - 1.0),
        rate_max: d.log2() / p.k as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn params_validation() {
        assert!(MubParams::new(2, 2).is_ok());
        assert!(MubParams::new(2, 4).is_err());
        assert!(MubParams::new(2, 1).is_err());
        assert!(MubParams::new(1, 2).is_err());
    }

    #[test]
    fn noiseless_qubit_pair_of_bases() {
        let s = mub_summary(&MubParams::new(2, 2).unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(s.i_ab, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.i_ae, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.sift, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.r, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_full_interception_information() {
        // At q = 1 Eve holds log(d)/k bits; for d = k = 2 that is 1/2.
        let p = MubParams::new(2, 2).unwrap();
        let s = mub_summary(&p, 0.25).unwrap();
        assert_abs_diff_eq!(s.i_ae, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn depolarizing_conversion() {
        let s = mub_summary(&MubParams::new(10, 2).unwrap(), 0.1).unwrap();
        assert_abs_diff_eq!(s.r, 0.1 * 10.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn full_intercept_error_values() {
        assert_abs_diff_eq!(mub_full_intercept_error(&MubParams::new(2, 2).unwrap()), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            mub_full_intercept_error(&MubParams::new(2, 3).unwrap()),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        for d in 2..12 {
            if let Ok(p) = MubParams::new(d, 2) {
                assert!(mub_full_intercept_error(&p) < 0.5);
            }
        }
    }

    #[test]
    fn summary_rejects_excessive_error() {
        let p = MubParams::new(2, 2).unwrap();
        assert!(mub_summary(&p, 0.3).is_err());
        assert!(mub_summary(&p, -0.01).is_err());
    }

    #[test]
    fn eve_information_at_full_interception_is_log_d_over_k() {
        for (d, k) in [(2, 2), (2, 3), (5, 2), (7, 4), (11, 12)] {
            let p = MubParams::new(d, k).unwrap();
            let s = mub_summary(&p, mub_full_intercept_error(&p)).unwrap();
            assert_abs_diff_eq!(s.i_ae, (d as f64).log2() / k as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn qubit_threshold_matches_binary_crossing() {
        // 1 − h(p) = 2p has its root near 0.1707.
        let t = mub_threshold(&MubParams::new(2, 2).unwrap());
        assert_abs_diff_eq!(t.p_e_star, 0.1707, epsilon = 5e-4);
        assert_abs_diff_eq!(t.r_star, 2.0 * t.p_e_star, epsilon = 1e-12);
        assert_abs_diff_eq!(t.r_star, 0.3415, epsilon = 1e-3);
    }

    #[test]
    fn rate_max_for_25_dimensional_pair() {
        let t = mub_threshold(&MubParams::new(25, 2).unwrap());
        assert_abs_diff_eq!(t.rate_max, 25f64.log2() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.rate_max, 2.3219, epsilon = 5e-5);
    }

    #[test]
    fn more_bases_tolerate_more_noise() {
        let t2 = mub_threshold(&MubParams::new(2, 2).unwrap());
        let t3 = mub_threshold(&MubParams::new(2, 3).unwrap());
        assert!(t3.p_e_star > t2.p_e_star);

        for d in [3usize, 5, 7] {
            let mut prev = 0.0;
            for k in 2..=d + 1 {
                let t = mub_threshold(&MubParams::new(d, k).unwrap());
                assert!(t.r_star > prev, "r_star not increasing at d={d}, k={k}");
                prev = t.r_star;
            }
        }
    }

    #[test]
    fn information_curves_are_monotone() {
        let p = MubParams::new(5, 3).unwrap();
        let max_pe = mub_full_intercept_error(&p);
        let mut prev_ab = f64::INFINITY;
        let mut prev_ae = -1.0;
        for i in 0..=40 {
            let p_e = max_pe * i as f64 / 40.0;
            let s = mub_summary(&p, p_e).unwrap();
            assert!(s.i_ab < prev_ab + 1e-15);
            assert!(s.i_ae > prev_ae - 1e-15);
            prev_ab = s.i_ab;
            prev_ae = s.i_ae;
        }
    }
}
