//! Dense complex linear algebra on state vectors, operators, and POVMs.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Dimensions in scope are small (d ≤ ~30), so all storage is dense.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for unit-norm checks on state vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// Default tolerance for Hermiticity checks (max entry of A − A†).
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Default lower bound on eigenvalues in positivity checks.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Default Frobenius tolerance for resolution-of-identity checks.
pub const COMPLETENESS_TOL: f64 = 1e-8;

/// A unit vector in a d-dimensional complex space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Wraps amplitudes that are already unit-norm (within [`UNIT_NORM_TOL`]).
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("state vector must be non-empty".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state vector norm {norm} deviates from 1 by more than {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes and wraps; rejects the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / C64::new(norm, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |⟨self|other⟩|².
    pub fn overlap_squared(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Rank-one projector |ψ⟩⟨ψ|.
    pub fn projector(&self) -> Operator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Operator { matrix: m }
    }

    /// Entrywise complex conjugate in the standard basis.
    pub fn conjugate(&self) -> Self {
        Self { amplitudes: self.amplitudes.map(|z| z.conj()) }
    }
}

/// A square complex matrix acting on a d-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
}

impl Operator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// Max-entry magnitude of A − A†.
    pub fn hermiticity_deviation(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Real eigenvalues of the Hermitian part (A + A†)/2, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }

    /// Frobenius norm of self − other.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// ⟨ψ|A|ψ⟩, real part (callers pass Hermitian operators).
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let v = &self.matrix * psi.amplitudes();
        psi.amplitudes().dotc(&v).re
    }
}

/// A positive-operator-valued measure: positive operators resolving identity.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    elements: Vec<Operator>,
}

impl Povm {
    /// Validates with the default tolerances.
    pub fn new(elements: Vec<Operator>) -> Result<Self> {
        Self::with_tolerances(elements, HERMITICITY_TOL, POSITIVITY_TOL, COMPLETENESS_TOL)
    }

    /// Validates each element as Hermitian (max entry deviation ≤ `herm_tol`)
    /// with minimum eigenvalue ≥ −`pos_tol`, and the element sum as the
    /// identity within Frobenius norm `sum_tol`.
    pub fn with_tolerances(
        elements: Vec<Operator>,
        herm_tol: f64,
        pos_tol: f64,
        sum_tol: f64,
    ) -> Result<Self> {
        let dim = match elements.first() {
            Some(e) => e.dim(),
            None => return Err(Error::InvalidMeasurement("no elements".into())),
        };
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} has dimension {} but element 0 has {dim}",
                    e.dim()
                )));
            }
            let herm = e.hermiticity_deviation();
            if herm > herm_tol {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} deviates from Hermitian by {herm:.3e} (tolerance {herm_tol:.3e})"
                )));
            }
            let min_ev = e.min_eigenvalue();
            if min_ev < -pos_tol {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} has eigenvalue {min_ev:.3e} below -{pos_tol:.3e}"
                )));
            }
            sum += e.matrix();
        }
        let dev = (&sum - CMatrix::identity(dim, dim)).norm();
        if dev > sum_tol {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum to identity only within {dev:.3e} (tolerance {sum_tol:.3e})"
            )));
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    /// Born-rule outcome probabilities for a pure input state.
    pub fn outcome_probabilities(&self, psi: &StateVector) -> Result<Vec<f64>> {
        if psi.dim() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "state dimension {} does not match POVM dimension {}",
                psi.dim(),
                self.dim
            )));
        }
        Ok(self.elements.iter().map(|e| e.expectation(psi).max(0.0)).collect())
    }
}

/// S^{-1/2} for a positive definite Hermitian operator.
pub fn hermitian_inverse_sqrt(op: &Operator) -> Result<Operator> {
    let h = (op.matrix() + op.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 1e-12 {
        return Err(Error::NumericalFailure(format!(
            "operator is not positive definite (min eigenvalue {min:.3e})"
        )));
    }
    let d = eig.eigenvalues.map(|x| C64::new(1.0 / x.sqrt(), 0.0));
    let m = &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint();
    Ok(Operator { matrix: m })
}

/// exp(iH) for Hermitian H; the result is unitary.
pub fn unitary_exp_i_hermitian(h: &Operator) -> Result<Operator> {
    let dev = h.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::InvalidParameter(format!(
            "generator deviates from Hermitian by {dev:.3e}"
        )));
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let phases = eig.eigenvalues.map(|x| C64::new(0.0, x).exp());
    let m = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
    Ok(Operator { matrix: m })
}

/// Partial trace over the second factor of a (d_a·d_b)-dimensional operator,
/// with indices ordered as i = i_a · d_b + i_b.
pub fn partial_trace_second(rho: &Operator, d_a: usize, d_b: usize) -> Result<Operator> {
    if rho.dim() != d_a * d_b {
        return Err(Error::InvalidParameter(format!(
            "operator dimension {} is not {d_a}x{d_b}",
            rho.dim()
        )));
    }
    let mut out = CMatrix::zeros(d_a, d_a);
    let m = rho.matrix();
    for i in 0..d_a {
        for j in 0..d_a {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..d_b {
                acc += m[(i * d_b + b, j * d_b + b)];
            }
            out[(i, j)] = acc;
        }
    }
    Operator::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn state_vector_rejects_bad_norm() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(StateVector::new(v.clone()).is_err());
        let s = StateVector::normalized(v).unwrap();
        assert_abs_diff_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_is_involutive() {
        let v = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let s = StateVector::new(v).unwrap();
        assert_eq!(s.conjugate().conjugate(), s);
    }

    #[test]
    fn projector_expectation_matches_overlap() {
        let a = StateVector::normalized(CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        let b = StateVector::normalized(CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)])).unwrap();
        let p = a.projector();
        assert_abs_diff_eq!(p.expectation(&b), a.overlap_squared(&b), epsilon = 1e-14);
    }

    #[test]
    fn povm_accepts_projective_measurement() {
        let e0 = StateVector::new(CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let e1 = StateVector::new(CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])).unwrap();
        let povm = Povm::new(vec![e0.projector(), e1.projector()]).unwrap();
        assert_eq!(povm.len(), 2);
        let plus = StateVector::normalized(CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        let probs = povm.outcome_probabilities(&plus).unwrap();
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(probs[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn povm_rejects_incomplete_set() {
        let e0 = StateVector::new(CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let err = Povm::new(vec![e0.projector()]).unwrap_err();
        assert!(matches!(err, Error::InvalidMeasurement(_)));
    }

    #[test]
    fn povm_rejects_negative_element() {
        let dim = 2;
        let id = CMatrix::identity(dim, dim);
        let neg = Operator::new(-&id * c(0.5, 0.0)).unwrap();
        let big = Operator::new(&id * c(1.5, 0.0)).unwrap();
        assert!(Povm::new(vec![neg, big]).is_err());
    }

    #[test]
    fn inverse_sqrt_inverts_square() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.3, 0.1), c(0.3, -0.1), c(1.0, 0.0)]);
        let op = Operator::new(m).unwrap();
        let inv_sqrt = hermitian_inverse_sqrt(&op).unwrap();
        let prod = inv_sqrt.matrix() * op.matrix() * inv_sqrt.matrix();
        let dev = (&prod - CMatrix::identity(2, 2)).norm();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn matrix_exponential_is_unitary() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.4, 0.0), c(0.1, 0.2), c(-0.3, 0.05),
                c(0.1, -0.2), c(-0.7, 0.0), c(0.0, 0.9),
                c(-0.3, -0.05), c(0.0, -0.9), c(1.2, 0.0),
            ],
        );
        let u = unitary_exp_i_hermitian(&Operator::new(h).unwrap()).unwrap();
        let dev = (u.matrix().adjoint() * u.matrix() - CMatrix::identity(3, 3)).norm();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn partial_trace_of_product_state() {
        // |0⟩⟨0| ⊗ (I/2) traced over the second factor gives |0⟩⟨0|.
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        let reduced = partial_trace_second(&Operator::new(m).unwrap(), 2, 2).unwrap();
        assert_abs_diff_eq!(reduced.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(reduced.matrix()[(1, 1)].re, 0.0, epsilon = 1e-14);
    }
}
