//! Shannon entropy and mutual-information measures on finite distributions.
//!
//! All logarithms are base 2; results are in bits.

// Marginalization loops index several tables at once; explicit indices are
// clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Probabilities below this are treated as exactly zero in entropy sums.
pub const PROB_FLOOR: f64 = 1e-15;
/// Tolerance on the total probability at distribution construction.
pub const DIST_SUM_TOL: f64 = 1e-12;
/// Tolerance on the total probability accepted by [`entropy`].
pub const ENTROPY_SUM_TOL: f64 = 1e-9;

/// Compensated summation; plain accumulation drifts past the validation
/// tolerances on the larger probability tables (10⁵ cells and up).
pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

fn check_entries(probs: &[f64], sum_tol: f64) -> Result<()> {
    for (i, &p) in probs.iter().enumerate() {
        if p < 0.0 {
            return Err(Error::InvalidDistribution(format!("entry {i} is negative ({p:e})")));
        }
        if !p.is_finite() {
            return Err(Error::InvalidDistribution(format!("entry {i} is not finite")));
        }
    }
    let sum = kahan_sum(probs.iter().copied());
    if (sum - 1.0).abs() > sum_tol {
        return Err(Error::InvalidDistribution(format!(
            "total probability {sum} deviates from 1 by more than {sum_tol:e}"
        )));
    }
    Ok(())
}

fn entropy_unchecked(probs: impl IntoIterator<Item = f64>) -> f64 {
    let mut h = 0.0;
    for p in probs {
        if p > PROB_FLOOR {
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy −Σ p log₂ p with the 0·log 0 = 0 convention.
pub fn entropy(probs: &[f64]) -> Result<f64> {
    check_entries(probs, ENTROPY_SUM_TOL)?;
    Ok(entropy_unchecked(probs.iter().copied()))
}

/// A joint distribution over two finite alphabets, stored row-major in A.
#[derive(Debug, Clone)]
pub struct JointDistribution2 {
    a_size: usize,
    b_size: usize,
    probs: Vec<f64>,
}

impl JointDistribution2 {
    pub fn new(a_size: usize, b_size: usize, probs: Vec<f64>) -> Result<Self> {
        if a_size == 0 || b_size == 0 || probs.len() != a_size * b_size {
            return Err(Error::InvalidDistribution(format!(
                "expected {a_size}x{b_size} entries, got {}",
                probs.len()
            )));
        }
        check_entries(&probs, DIST_SUM_TOL)?;
        Ok(Self { a_size, b_size, probs })
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn p(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.b_size + b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.a_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                out[a] += self.p(a, b);
            }
        }
        out
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.b_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                out[b] += self.p(a, b);
            }
        }
        out
    }
}

/// I(A:B) = H(A) + H(B) − H(AB), clamped to 0 when within `1e-12` below 0.
pub fn mutual_information(j: &JointDistribution2) -> f64 {
    let ha = entropy_unchecked(j.marginal_a());
    let hb = entropy_unchecked(j.marginal_b());
    let hab = entropy_unchecked(j.probs().iter().copied());
    let mi = ha + hb - hab;
    if (-1e-12..0.0).contains(&mi) {
        0.0
    } else {
        mi
    }
}

/// A joint distribution over three finite alphabets; when produced by the
/// protocol analysis the last E index is the "?" symbol.
#[derive(Debug, Clone)]
pub struct TripartiteDistribution {
    a_size: usize,
    b_size: usize,
    e_size: usize,
    probs: Vec<f64>,
}

impl TripartiteDistribution {
    pub fn new(a_size: usize, b_size: usize, e_size: usize, probs: Vec<f64>) -> Result<Self> {
        if a_size == 0 || b_size == 0 || e_size == 0 || probs.len() != a_size * b_size * e_size {
            return Err(Error::InvalidDistribution(format!(
                "expected {a_size}x{b_size}x{e_size} entries, got {}",
                probs.len()
            )));
        }
        check_entries(&probs, DIST_SUM_TOL)?;
        Ok(Self { a_size, b_size, e_size, probs })
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn e_size(&self) -> usize {
        self.e_size
    }

    pub fn p(&self, a: usize, b: usize, e: usize) -> f64 {
        self.probs[(a * self.b_size + b) * self.e_size + e]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ab_marginal(&self) -> JointDistribution2 {
        let mut probs = vec![0.0; self.a_size * self.b_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                for e in 0..self.e_size {
                    probs[a * self.b_size + b] += self.p(a, b, e);
                }
            }
        }
        JointDistribution2 { a_size: self.a_size, b_size: self.b_size, probs }
    }

    pub fn ae_marginal(&self) -> JointDistribution2 {
        let mut probs = vec![0.0; self.a_size * self.e_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                for e in 0..self.e_size {
                    probs[a * self.e_size + e] += self.p(a, b, e);
                }
            }
        }
        JointDistribution2 { a_size: self.a_size, b_size: self.e_size, probs }
    }

    pub fn be_marginal(&self) -> JointDistribution2 {
        let mut probs = vec![0.0; self.b_size * self.e_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                for e in 0..self.e_size {
                    probs[b * self.e_size + e] += self.p(a, b, e);
                }
            }
        }
        JointDistribution2 { a_size: self.b_size, b_size: self.e_size, probs }
    }

    pub fn e_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.e_size];
        for a in 0..self.a_size {
            for b in 0..self.b_size {
                for e in 0..self.e_size {
                    out[e] += self.p(a, b, e);
                }
            }
        }
        out
    }
}

/// I(A:B|E) = Σ_e p(e)·I(A:B | E=e), clamped to 0 when within `1e-12` below 0.
pub fn conditional_mutual_information(j: &TripartiteDistribution) -> f64 {
    let pe = j.e_marginal();
    let mut cmi = 0.0;
    for e in 0..j.e_size() {
        if pe[e] <= PROB_FLOOR {
            continue;
        }
        let mut slice = vec![0.0; j.a_size() * j.b_size()];
        for a in 0..j.a_size() {
            for b in 0..j.b_size() {
                slice[a * j.b_size() + b] = j.p(a, b, e) / pe[e];
            }
        }
        let ha = entropy_unchecked(slice.chunks(j.b_size()).map(|row| row.iter().sum::<f64>()));
        let hb = entropy_unchecked((0..j.b_size()).map(|b| {
            (0..j.a_size()).map(|a| slice[a * j.b_size() + b]).sum::<f64>()
        }));
        let hab = entropy_unchecked(slice.iter().copied());
        cmi += pe[e] * (ha + hb - hab);
    }
    if (-1e-12..0.0).contains(&cmi) {
        0.0
    } else {
        cmi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_of_deterministic_distribution_is_zero() {
        assert_abs_diff_eq!(entropy(&[1.0]).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn entropy_of_uniform_bit_is_one() {
        assert_abs_diff_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn entropy_quarter_three_quarters() {
        // -0.25·log2(0.25) − 0.75·log2(0.75) evaluated directly.
        let expected = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert_abs_diff_eq!(entropy(&[0.25, 0.75]).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.8113, epsilon = 5e-5);
    }

    #[test]
    fn entropy_rejects_negative_and_unnormalized() {
        assert!(entropy(&[-0.1, 1.1]).is_err());
        assert!(entropy(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn mutual_information_of_independent_bits_is_zero() {
        let j = JointDistribution2::new(2, 2, vec![0.25; 4]).unwrap();
        assert_abs_diff_eq!(mutual_information(&j), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mutual_information_of_identity_channel_is_one() {
        let j = JointDistribution2::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(mutual_information(&j), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mutual_information_binary_symmetric_agreement_075() {
        // 1 − h(0.25) evaluated directly.
        let j = JointDistribution2::new(2, 2, vec![0.375, 0.125, 0.125, 0.375]).unwrap();
        let expected = 1.0 + 0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2();
        assert_abs_diff_eq!(mutual_information(&j), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 0.1887, epsilon = 5e-5);
    }

    #[test]
    fn cmi_with_independent_e() {
        // A = B uniform bits, E an independent uniform bit.
        let mut probs = vec![0.0; 8];
        for a in 0..2 {
            for e in 0..2 {
                probs[(a * 2 + a) * 2 + e] = 0.25;
            }
        }
        let j = TripartiteDistribution::new(2, 2, 2, probs).unwrap();
        assert_abs_diff_eq!(conditional_mutual_information(&j), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cmi_when_e_determines_both() {
        let mut probs = vec![0.0; 8];
        for a in 0..2 {
            probs[(a * 2 + a) * 2 + a] = 0.5;
        }
        let j = TripartiteDistribution::new(2, 2, 2, probs).unwrap();
        assert_abs_diff_eq!(conditional_mutual_information(&j), 0.0, epsilon = 1e-14);
    }

    /// Second route for I(A:B|E): H(AE) + H(BE) − H(E) − H(ABE).
    fn cmi_via_entropy_sums(j: &TripartiteDistribution) -> f64 {
        let hae = entropy(j.ae_marginal().probs()).unwrap();
        let hbe = entropy(j.be_marginal().probs()).unwrap();
        let he = entropy(&j.e_marginal()).unwrap();
        let habe = entropy(j.probs()).unwrap();
        hae + hbe - he - habe
    }

    fn arb_tripartite(a: usize, b: usize, e: usize) -> impl Strategy<Value = TripartiteDistribution> {
        prop::collection::vec(0.0f64..1.0, a * b * e).prop_filter_map("degenerate weights", move |w| {
            let total: f64 = w.iter().sum();
            if total < 1e-6 {
                return None;
            }
            let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
            TripartiteDistribution::new(a, b, e, probs).ok()
        })
    }

    proptest! {
        #[test]
        fn entropy_is_permutation_invariant_and_bounded(mut w in prop::collection::vec(0.01f64..1.0, 2..8)) {
            let total: f64 = w.iter().sum();
            for x in w.iter_mut() {
                *x /= total;
            }
            let h0 = entropy(&w).unwrap();
            prop_assert!(h0 >= 0.0 && h0 <= (w.len() as f64).log2() + 1e-12);
            w.reverse();
            let h1 = entropy(&w).unwrap();
            prop_assert!((h0 - h1).abs() < 1e-12);
        }

        #[test]
        fn mutual_information_is_symmetric(w in prop::collection::vec(0.0f64..1.0, 12)) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-6);
            let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
            let j = JointDistribution2::new(3, 4, probs.clone()).unwrap();
            let mut transposed = vec![0.0; 12];
            for a in 0..3 {
                for b in 0..4 {
                    transposed[b * 3 + a] = probs[a * 4 + b];
                }
            }
            let jt = JointDistribution2::new(4, 3, transposed).unwrap();
            prop_assert!((mutual_information(&j) - mutual_information(&jt)).abs() < 1e-12);
        }

        #[test]
        fn cmi_routes_agree(j in arb_tripartite(3, 3, 4)) {
            let grouped = conditional_mutual_information(&j);
            let summed = cmi_via_entropy_sums(&j);
            prop_assert!((grouped - summed).abs() < 1e-12, "grouped {grouped} vs summed {summed}");
            prop_assert!(grouped >= 0.0);
            // Conditioning can cost at most the log-size of the side record.
            let floor = mutual_information(&j.ab_marginal()) - (j.e_size() as f64).log2();
            prop_assert!(grouped >= floor - 1e-12);
        }
    }
}
