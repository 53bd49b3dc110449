//! Sweep datasets comparing spherical-code and unbiased-basis protocols:
//! noise thresholds as a function of ensemble size, and speed/security pairs
//! at matched signal counts n = 2d.
//!
//! "Maximum key generation rate" for a code is the sift-weighted noiseless
//! key rate maximized over the exclusion count m, and "maximum tolerable
//! noise" is the depolarizing threshold maximized over m; the parties are
//! free to pick m, so each protocol is represented by its best setting.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::mub::{mub_threshold, MubParams};
use crate::protocol::{key_rate_noiseless, sift_rate_noiseless, threshold, EscCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EnsembleKind {
    Esc,
    Mub,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleKind::Esc => write!(f, "ESC"),
            EnsembleKind::Mub => write!(f, "MUB"),
        }
    }
}

/// Exclusion policy of a threshold-sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Policy {
    /// m = n − 2, announcing all but two outcomes.
    MaxExclusion,
    /// m = ⌊n/2⌋.
    HalfExclusion,
    /// Unbiased bases with the given basis count.
    Bases(usize),
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::MaxExclusion => write!(f, "m=n-2"),
            Policy::HalfExclusion => write!(f, "m=n/2"),
            Policy::Bases(k) => write!(f, "k={k}"),
        }
    }
}

/// One point of the threshold-versus-size sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Fig1Row {
    pub ensemble_kind: EnsembleKind,
    /// Number of signal states: n for codes, k·d for bases.
    pub count: usize,
    pub policy: Policy,
    pub threshold_r: f64,
}

/// Thresholds at fixed dimension d: codes with m = n−2 and m = ⌊n/2⌋ for
/// every n in `n_range`, and bases for every k from 2 to d+1.
pub fn figure1_data(d: usize, n_range: &[usize]) -> Result<Vec<Fig1Row>> {
    let mut rows = Vec::new();
    for &n in n_range {
        for (policy, m) in [(Policy::MaxExclusion, n - 2), (Policy::HalfExclusion, n / 2)] {
            let code = EscCode::new(n, d, m)?;
            let res = threshold(&code)?;
            rows.push(Fig1Row {
                ensemble_kind: EnsembleKind::Esc,
                count: n,
                policy,
                threshold_r: res.r_star,
            });
        }
    }
    for k in 2..=d + 1 {
        let t = mub_threshold(&MubParams::new(d, k)?);
        rows.push(Fig1Row {
            ensemble_kind: EnsembleKind::Mub,
            count: k * d,
            policy: Policy::Bases(k),
            threshold_r: t.r_star,
        });
    }
    rows.sort_by_key(|r| (r.ensemble_kind, r.count, r.policy));
    Ok(rows)
}

/// One speed/security pair at n = 2d signals.
#[derive(Debug, Clone, Serialize)]
pub struct Fig2Row {
    pub d: usize,
    pub ensemble_kind: EnsembleKind,
    /// Sift-weighted key rate in bits per transmitted signal.
    pub rate_max: f64,
    pub threshold_r: f64,
}

/// Speed/security pairs for codes with n = 2d against two unbiased bases.
pub fn figure2_data(dims: &[usize]) -> Result<Vec<Fig2Row>> {
    let mut rows = Vec::new();
    for &d in dims {
        let n = 2 * d;
        let mut rate_max = f64::NEG_INFINITY;
        let mut threshold_max = f64::NEG_INFINITY;
        for m in 0..=n - 2 {
            let code = EscCode::new(n, d, m)?;
            rate_max = rate_max.max(sift_rate_noiseless(&code) * key_rate_noiseless(&code));
            threshold_max = threshold_max.max(threshold(&code)?.r_star);
        }
        rows.push(Fig2Row {
            d,
            ensemble_kind: EnsembleKind::Esc,
            rate_max,
            threshold_r: threshold_max,
        });

        let t = mub_threshold(&MubParams::new(d, 2)?);
        rows.push(Fig2Row {
            d,
            ensemble_kind: EnsembleKind::Mub,
            rate_max: t.rate_max,
            threshold_r: t.r_star,
        });
    }
    rows.sort_by_key(|r| (r.d, r.ensemble_kind));
    Ok(rows)
}

fn fmt_value(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV with header `ensemble_kind,count,policy,threshold_r`; numbers carry
/// 12 significant digits, so output is byte-stable.
pub fn fig1_csv(rows: &[Fig1Row]) -> String {
    let mut out = String::from("ensemble_kind,count,policy,threshold_r\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.ensemble_kind,
            row.count,
            row.policy,
            fmt_value(row.threshold_r)
        ));
    }
    out
}

/// CSV with header `d,ensemble_kind,rate_max,threshold_r`.
pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut out = String::from("d,ensemble_kind,rate_max,threshold_r\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.d,
            row.ensemble_kind,
            fmt_value(row.rate_max),
            fmt_value(row.threshold_r)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_small_dimension_sweep() {
        let rows = figure1_data(3, &[6, 9]).unwrap();
        // 2 policies × 2 sizes + k ∈ {2, 3, 4}.
        assert_eq!(rows.len(), 7);
        for row in &rows {
            assert!(row.threshold_r > 0.0 && row.threshold_r < 1.0, "{row:?}");
        }
        // Announcing more outcomes never lowers the threshold.
        for &n in &[6, 9] {
            let max = rows
                .iter()
                .find(|r| r.count == n && r.policy == Policy::MaxExclusion)
                .unwrap()
                .threshold_r;
            let half = rows
                .iter()
                .find(|r| r.count == n && r.policy == Policy::HalfExclusion)
                .unwrap()
                .threshold_r;
            assert!(max >= half, "n={n}: {max} < {half}");
        }
    }

    #[test]
    fn figure2_small_dims() {
        let rows = figure2_data(&[2, 3]).unwrap();
        assert_eq!(rows.len(), 4);
        let mub_d2 = rows
            .iter()
            .find(|r| r.d == 2 && r.ensemble_kind == EnsembleKind::Mub)
            .unwrap();
        assert!((mub_d2.rate_max - 0.5).abs() < 1e-12);
        let esc_d3 = rows
            .iter()
            .find(|r| r.d == 3 && r.ensemble_kind == EnsembleKind::Esc)
            .unwrap();
        // m = 0 is in the maximization set, so at least the nominal rate.
        assert!(esc_d3.rate_max >= 0.4239);
        for d in [2, 3] {
            let esc = rows.iter().find(|r| r.d == d && r.ensemble_kind == EnsembleKind::Esc).unwrap();
            let mub = rows.iter().find(|r| r.d == d && r.ensemble_kind == EnsembleKind::Mub).unwrap();
            assert!(esc.threshold_r > mub.threshold_r);
            assert!(esc.rate_max < mub.rate_max);
        }
    }

    #[test]
    fn d10_curves_bracket_the_basis_protocol() {
        let n_range: Vec<usize> = (2..=10).map(|k| 10 * k).collect();
        let rows = figure1_data(10, &n_range).unwrap();
        for k in 2..=10usize {
            let n = 10 * k;
            let find = |kind: EnsembleKind, policy: Policy| {
                rows.iter()
                    .find(|r| r.ensemble_kind == kind && r.count == n && r.policy == policy)
                    .unwrap()
                    .threshold_r
            };
            let max = find(EnsembleKind::Esc, Policy::MaxExclusion);
            let half = find(EnsembleKind::Esc, Policy::HalfExclusion);
            let mub = find(EnsembleKind::Mub, Policy::Bases(k));
            assert!(max > mub && mub > half, "n={n}: {max} / {mub} / {half}");
        }
        // Frozen endpoints of the computed curves, as regression pins.
        let first_max = rows
            .iter()
            .find(|r| r.count == 20 && r.policy == Policy::MaxExclusion)
            .unwrap()
            .threshold_r;
        assert!((first_max - 0.447138465059).abs() < 1e-9, "{first_max}");
        let mub2 = rows
            .iter()
            .find(|r| r.ensemble_kind == EnsembleKind::Mub && r.policy == Policy::Bases(2))
            .unwrap()
            .threshold_r;
        assert!((mub2 - 0.386959419266).abs() < 1e-9, "{mub2}");
    }

    #[test]
    fn csv_output_is_stable() {
        let rows = figure2_data(&[2]).unwrap();
        let a = fig2_csv(&rows);
        let b = fig2_csv(&figure2_data(&[2]).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("d,ensemble_kind,rate_max,threshold_r\n"));
        assert_eq!(a.lines().count(), 3);

        let rows1 = figure1_data(3, &[6]).unwrap();
        let csv1 = fig1_csv(&rows1);
        assert!(csv1.starts_with("ensemble_kind,count,policy,threshold_r\n"));
        assert!(csv1.contains("ESC,6,m=n-2,"));
        assert!(csv1.contains("MUB,6,k=2,"));
    }
}
