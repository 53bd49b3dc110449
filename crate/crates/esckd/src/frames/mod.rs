//! Construction and verification of signal ensembles: equiangular spherical
//! codes (Grassmann frames), mutually unbiased bases, derived measurements,
//! and the maximally entangled bipartite realization.

use std::f64::consts::TAU;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_inverse_sqrt, C64, CMatrix, CVector, Operator, Povm, StateVector};

mod io;
mod solver;

pub use io::{frame_from_json, frame_to_json};
pub use solver::{solve_grassmann_frame, SolveOutcome, SolverConfig};

/// Frame-operator deviation above which an ensemble is not accepted as a
/// measurement (POVM formation, fidelity, entangled-state construction).
pub const TIGHTNESS_TOL: f64 = 1e-6;

/// n unit vectors spanning a d-dimensional complex space, n ≥ d.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim: usize,
    vectors: Vec<StateVector>,
}

impl Ensemble {
    pub fn new(dim: usize, vectors: Vec<StateVector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if vectors.len() < dim {
            return Err(Error::InvalidParameter(format!(
                "need at least {dim} vectors in dimension {dim}, got {}",
                vectors.len()
            )));
        }
        for (k, v) in vectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::InvalidParameter(format!(
                    "vector {k} has dimension {}, expected {dim}",
                    v.dim()
                )));
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Random ensemble of independent Gaussian vectors, normalized.
    pub fn random<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Result<Self> {
        let vectors = (0..n)
            .map(|_| {
                let amps = CVector::from_iterator(
                    dim,
                    (0..dim).map(|_| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        C64::new(re, im)
                    }),
                );
                StateVector::normalized(amps)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    /// d×n matrix whose columns are the ensemble vectors.
    pub fn as_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.len());
        for (k, v) in self.vectors.iter().enumerate() {
            m.set_column(k, v.amplitudes());
        }
        m
    }

    /// Gram matrix G_jk = ⟨φ_j|φ_k⟩.
    pub fn gram(&self) -> CMatrix {
        let m = self.as_matrix();
        m.adjoint() * m
    }

    /// Frame operator S = Σ_k |φ_k⟩⟨φ_k|.
    pub fn frame_operator(&self) -> Operator {
        let m = self.as_matrix();
        Operator::new(&m * m.adjoint()).expect("square by construction")
    }

    /// Entrywise complex conjugate of every vector; an involution that
    /// preserves all pairwise squared overlaps.
    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            vectors: self.vectors.iter().map(StateVector::conjugate).collect(),
        }
    }
}

/// Diagnostics of how close an ensemble is to a Grassmann frame.
#[derive(Debug, Clone)]
pub struct FrameReport {
    /// Gram matrix G_jk = ⟨φ_j|φ_k⟩.
    pub gram: CMatrix,
    /// Real eigenvalues of the Gram matrix, ascending; they sum to n.
    pub gram_spectrum: Vec<f64>,
    /// First-order frame potential Σ_jk |G_jk|²; at least n²/d, with equality
    /// exactly for tight frames.
    pub v1: f64,
    /// Second-order frame potential Σ_jk |G_jk|⁴. For an exact Grassmann
    /// frame direct summation gives n²(d² + n − 2d)/(d²(n − 1)).
    pub v2: f64,
    /// Common squared overlap target (n − d)/(d(n − 1)).
    pub target_overlap: f64,
    /// max_{j≠k} | |G_jk|² − target |.
    pub max_equiangular_deviation: f64,
    /// Frobenius distance of the frame operator from (n/d)·I.
    pub max_tightness_deviation: f64,
}

/// Exact diagnostics by direct summation over the Gram matrix.
pub fn verify_frame(e: &Ensemble) -> FrameReport {
    let n = e.len();
    let d = e.dim();
    let gram = e.gram();

    let mut spectrum: Vec<f64> = gram.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    spectrum.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let target_overlap = if n > 1 {
        (n - d) as f64 / (d as f64 * (n - 1) as f64)
    } else {
        0.0
    };

    let mut v1 = 0.0;
    let mut v2 = 0.0;
    let mut max_eq: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let lam = gram[(j, k)].norm_sqr();
            v1 += lam;
            v2 += lam * lam;
            if j != k {
                max_eq = max_eq.max((lam - target_overlap).abs());
            }
        }
    }

    let s = e.frame_operator();
    let scaled_id = CMatrix::identity(d, d) * C64::new(n as f64 / d as f64, 0.0);
    let max_tightness_deviation = (s.matrix() - scaled_id).norm();

    FrameReport {
        gram,
        gram_spectrum: spectrum,
        v1,
        v2,
        target_overlap,
        max_equiangular_deviation: max_eq,
        max_tightness_deviation,
    }
}

fn require_tight(e: &Ensemble) -> Result<Operator> {
    let s = e.frame_operator();
    let n = e.len() as f64;
    let d = e.dim();
    let scaled_id = CMatrix::identity(d, d) * C64::new(n / d as f64, 0.0);
    let deviation = (s.matrix() - scaled_id).norm();
    if deviation > TIGHTNESS_TOL {
        return Err(Error::NotTight { deviation, tolerance: TIGHTNESS_TOL });
    }
    Ok(s)
}

/// The regular simplex of n = d + 1 vectors with all pairwise squared
/// overlaps 1/d², built analytically from rows of the discrete Fourier
/// matrix. The frame operator is exactly (n/d)·I.
pub fn build_simplex(d: usize) -> Result<Ensemble> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("simplex needs d >= 2, got {d}")));
    }
    let n = d + 1;
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    let vectors = (0..n)
        .map(|k| {
            let amps = CVector::from_iterator(
                d,
                (1..=d).map(|r| {
                    let phase = TAU * ((r * k) % n) as f64 / n as f64;
                    C64::from_polar(inv_sqrt_d, phase)
                }),
            );
            StateVector::new(amps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(d, vectors)
}

/// The real six-line qutrit code: one unit vector per diameter of the
/// icosahedron, all pairwise squared overlaps 1/5.
///
/// Codes with (d, n) = (3, 6) form a continuous family sharing those
/// overlaps but differing in triple products, and decoder capacities depend
/// on the member; this one is the canonical choice for the capacity
/// studies. [`solve_grassmann_frame`] may land anywhere in the family.
pub fn build_qutrit_icosahedron() -> Ensemble {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw: [[f64; 3]; 6] = [
        [0.0, 1.0, phi],
        [0.0, -1.0, phi],
        [1.0, phi, 0.0],
        [-1.0, phi, 0.0],
        [phi, 0.0, 1.0],
        [phi, 0.0, -1.0],
    ];
    let vectors = raw
        .iter()
        .map(|v| {
            StateVector::normalized(CVector::from_iterator(3, v.iter().map(|&x| C64::new(x, 0.0))))
                .expect("diameters are non-zero")
        })
        .collect();
    Ensemble::new(3, vectors).expect("six vectors in dimension three")
}

/// Average fidelity d·V₂/n² of the classical measure-and-prepare channel
/// built on the ensemble's own measurement.
pub fn measure_prepare_fidelity(e: &Ensemble) -> Result<f64> {
    require_tight(e)?;
    let report = verify_frame(e);
    let n = e.len() as f64;
    Ok(e.dim() as f64 * report.v2 / (n * n))
}

/// Subnormalized measurement vectors S^{-1/2}|φ_k⟩; for an exactly tight
/// ensemble these are √(d/n)|φ_k⟩.
pub(crate) fn polished_columns(e: &Ensemble) -> Result<CMatrix> {
    let s = require_tight(e)?;
    let w = hermitian_inverse_sqrt(&s)?;
    let mut m = CMatrix::zeros(e.dim(), e.len());
    for (k, v) in e.vectors().iter().enumerate() {
        m.set_column(k, &(w.matrix() * v.amplitudes()));
    }
    Ok(m)
}

/// The measurement {(d/n)|φ_k⟩⟨φ_k|}. The ensemble must resolve the identity
/// within [`TIGHTNESS_TOL`]; the residual deviation is absorbed by a final
/// S^{-1/2} normalization so the returned elements sum to the identity at
/// machine precision.
pub fn povm_from_ensemble(e: &Ensemble) -> Result<Povm> {
    let cols = polished_columns(e)?;
    let elements = cols
        .column_iter()
        .map(|col| Operator::new(col * col.adjoint()).expect("square by construction"))
        .collect();
    Povm::new(elements)
}

/// The bipartite pure state (√d/n)·Σ_k |φ_k⟩|φ_k*⟩ (indices ordered as
/// i_A·d + i_B), normalized. Its reduced operator on either factor is I/d.
pub fn entangled_state(e: &Ensemble) -> Result<StateVector> {
    let s = require_tight(e)?;
    let w = hermitian_inverse_sqrt(&s)?;
    let d = e.dim();
    let mut amps = CVector::zeros(d * d);
    for v in e.vectors() {
        // S^{-1/2} absorbs the residual non-tightness exactly as in the POVM.
        let chi = w.matrix() * v.amplitudes();
        for i in 0..d {
            for j in 0..d {
                amps[i * d + j] += chi[i] * chi[j].conj();
            }
        }
    }
    StateVector::normalized(amps)
}

fn is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// k mutually unbiased orthonormal bases in prime dimension d, returned as a
/// single ensemble of n = k·d vectors grouped basis by basis. Basis 0 is the
/// standard basis; the rest come from the quadratic-exponent construction
/// (Pauli eigenbases for d = 2). Cross-basis squared overlaps are all 1/d.
pub fn build_mub(d: usize, k: usize) -> Result<Ensemble> {
    if !is_prime(d) {
        return Err(Error::InvalidParameter(format!(
            "unbiased-basis construction requires prime dimension, got {d}"
        )));
    }
    if k < 2 || k > d + 1 {
        return Err(Error::InvalidParameter(format!(
            "basis count {k} outside 2..={}",
            d + 1
        )));
    }
    let mut vectors = Vec::with_capacity(k * d);
    // Standard basis.
    for t in 0..d {
        let mut amps = CVector::zeros(d);
        amps[t] = C64::new(1.0, 0.0);
        vectors.push(StateVector::new(amps)?);
    }
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    if d == 2 {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let pauli_x = [
            [C64::new(half, 0.0), C64::new(half, 0.0)],
            [C64::new(half, 0.0), C64::new(-half, 0.0)],
        ];
        let pauli_y = [
            [C64::new(half, 0.0), C64::new(0.0, half)],
            [C64::new(half, 0.0), C64::new(0.0, -half)],
        ];
        for basis in [pauli_x, pauli_y].iter().take(k - 1) {
            for row in basis {
                vectors.push(StateVector::new(CVector::from_row_slice(row))?);
            }
        }
    } else {
        // Odd prime: |v^r_t⟩_j = ω^(r·j² + t·j)/√d with ω = exp(2πi/d).
        for r in 0..k - 1 {
            for t in 0..d {
                let amps = CVector::from_iterator(
                    d,
                    (0..d).map(|j| {
                        let exponent = (r * j * j + t * j) % d;
                        C64::from_polar(inv_sqrt_d, TAU * exponent as f64 / d as f64)
                    }),
                );
                vectors.push(StateVector::new(amps)?);
            }
        }
    }
    Ensemble::new(d, vectors)
}

/// A measurement whose outcomes each exclude a subset of the signals.
#[derive(Debug, Clone)]
pub struct RepudiationMeasurement {
    povm: Povm,
    subsets: Vec<Vec<usize>>,
    scale: f64,
    residual_norm: f64,
    failure_outcome: bool,
}

impl RepudiationMeasurement {
    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// Signals excluded by each non-failure outcome, in outcome order.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Common scale applied to the orthogonal projectors.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Frobenius norm of I − c·ΣP before any failure outcome is added.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// Whether an explicit failure outcome had to be appended to resolve the
    /// identity. When true, the failure element is the last POVM element.
    pub fn failure_outcome(&self) -> bool {
        self.failure_outcome
    }
}

/// For every size-b subset S of the signals, the projector orthogonal to
/// span(S), scaled by a single least-squares constant c so that the elements
/// sum as close to the identity as possible. If the residual exceeds 1e-8 it
/// is appended as an explicit failure outcome (shrinking c if needed to keep
/// that element positive).
pub fn repudiation_povm(e: &Ensemble, b: usize) -> Result<RepudiationMeasurement> {
    let n = e.len();
    let d = e.dim();
    if b == 0 || b > d.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "subset size {b} outside 1..={} for dimension {d}",
            d.saturating_sub(1)
        )));
    }
    if n > 16 {
        return Err(Error::InvalidParameter(format!(
            "subset enumeration is limited to n <= 16 signals, got {n}"
        )));
    }

    let identity = CMatrix::identity(d, d);
    let mut projectors = Vec::new();
    let mut subsets = Vec::new();
    let mut sum = CMatrix::zeros(d, d);
    for subset in (0..n).combinations(b) {
        let mut span = CMatrix::zeros(d, b);
        for (col, &idx) in subset.iter().enumerate() {
            span.set_column(col, e.vectors()[idx].amplitudes());
        }
        let svd = span.svd(true, false);
        let u = svd.u.as_ref().expect("u requested");
        let mut p_span = CMatrix::zeros(d, d);
        let mut rank = 0;
        for (i, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma > 1e-10 {
                rank += 1;
                let col = u.column(i);
                p_span += col * col.adjoint();
            }
        }
        if rank >= d {
            return Err(Error::InvalidParameter(format!(
                "subset {subset:?} spans the full space; its orthogonal projector vanishes"
            )));
        }
        let p_perp = &identity - p_span;
        sum += &p_perp;
        projectors.push(p_perp);
        subsets.push(subset);
    }

    // Least-squares fit of c in ‖c·Σ − I‖_F.
    let trace_sum: f64 = sum.trace().re;
    let norm_sq: f64 = sum.norm().powi(2);
    let mut scale = trace_sum / norm_sq;
    let mut residual = &identity - &sum * C64::new(scale, 0.0);
    let residual_norm = residual.norm();

    let failure_outcome = residual_norm > 1e-8;
    if failure_outcome {
        // Keep the appended element positive: c may not exceed 1/λ_max(Σ).
        let lam_max = Operator::new(sum.clone())?
            .hermitian_eigenvalues()
            .last()
            .copied()
            .unwrap_or(0.0);
        if lam_max <= 0.0 {
            return Err(Error::NumericalFailure("projector sum is not positive".into()));
        }
        if scale > 1.0 / lam_max {
            scale = 1.0 / lam_max;
        }
        residual = &identity - &sum * C64::new(scale, 0.0);
    }

    let mut elements: Vec<Operator> = projectors
        .into_iter()
        .map(|p| Operator::new(p * C64::new(scale, 0.0)).expect("square"))
        .collect();
    if failure_outcome {
        elements.push(Operator::new(residual)?);
    }
    let povm = Povm::new(elements)?;
    Ok(RepudiationMeasurement { povm, subsets, scale, residual_norm, failure_outcome })
}

/// Reduced operator of a bipartite pure state on the first factor.
pub fn reduced_first_factor(state: &StateVector, d: usize) -> Result<Operator> {
    let rho = state.projector();
    crate::linalg::partial_trace_second(&rho, d, d)
}

pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(d, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub(crate) fn normalize_columns(m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= C64::new(norm, 0.0);
        }
    }
    out
}

pub(crate) fn ensemble_from_columns(d: usize, m: &CMatrix) -> Result<Ensemble> {
    let vectors = m
        .column_iter()
        .map(|col| StateVector::normalized(DVector::from_column_slice(col.as_slice())))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(d, vectors)
}
