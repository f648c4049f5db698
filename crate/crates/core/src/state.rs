//! Density operators and pure states on qubit registers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_hermitian, ensure_square, hermitian_eig, psd_sqrt, qubit_count, trace_product, transpose, vectorize,
    CMatrix, CVector, TOL_PSD, TOL_TRACE,
};

/// Positive semidefinite, unit-trace operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace. The matrix is stored
    /// as given.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let d = ensure_square(&matrix, "density operator")?;
        let num_qubits =
            qubit_count(d).ok_or_else(|| Error::Input(format!("density operator side {d} is not a power of two")))?;
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("density operator has non-finite entries".into()));
        }
        ensure_hermitian(&matrix)?;
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::Trace { trace, tolerance: TOL_TRACE });
        }
        let min_eigenvalue = hermitian_eig(&matrix)?.min();
        if min_eigenvalue < -TOL_PSD {
            return Err(Error::NotPsd { min_eigenvalue, tolerance: TOL_PSD });
        }
        Ok(Self { num_qubits, matrix })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self { num_qubits, matrix: CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0) }
    }

    /// `|k><k|` for a computational basis index `k`.
    pub fn basis(num_qubits: usize, k: usize) -> Result<Self> {
        Ok(PureState::basis(num_qubits, k)?.projector())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
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

    /// `tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// `tr[ρω]`.
    pub fn overlap(&self, other: &DensityOperator) -> Result<f64> {
        crate::error::ensure_dim("state dimension", self.dim(), other.dim())?;
        Ok(trace_product(&self.matrix, &other.matrix).re)
    }

    /// `ρᵀ` in the computational basis.
    pub fn transpose(&self) -> CMatrix {
        transpose(&self.matrix)
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        let num_qubits = qubit_count(matrix.nrows()).expect("power-of-two side");
        Self { num_qubits, matrix }
    }
}

/// Unit vector on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    vector: CVector,
}

impl PureState {
    /// Accepts a vector of length `2^n` with norm within `1e-9` of one.
    pub fn new(vector: CVector) -> Result<Self> {
        let num_qubits = qubit_count(vector.len())
            .ok_or_else(|| Error::Input(format!("state vector length {} is not a power of two", vector.len())))?;
        let norm = vector.norm();
        if (norm - 1.0).abs() > TOL_TRACE {
            return Err(Error::Input(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(Self { num_qubits, vector })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(vector: CVector) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Input("cannot normalize a zero or non-finite vector".into()));
        }
        Self::new(vector / Complex64::new(norm, 0.0))
    }

    pub fn basis(num_qubits: usize, k: usize) -> Result<Self> {
        let d = 1usize << num_qubits;
        if k >= d {
            return Err(Error::Input(format!("basis index {k} out of range for {num_qubits} qubits")));
        }
        let mut vector = CVector::zeros(d);
        vector[k] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, vector })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> DensityOperator {
        DensityOperator::from_trusted(&self.vector * self.vector.adjoint())
    }
}

/// `|√ρ>>`, a purification of `ρ` on `H ⊗ H*` whose marginals are `ρ` and `ρᵀ`.
pub fn canonical_purification(rho: &DensityOperator) -> Result<PureState> {
    let root = psd_sqrt(rho.matrix())?;
    PureState::normalized(vectorize(&root)?.into_vector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, partial_trace_first, partial_trace_second};

    #[test]
    fn rejects_invalid_states() {
        let mut bad = identity(2) * Complex64::new(0.5, 0.0);
        bad[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(DensityOperator::new(bad), Err(Error::NotHermitian { .. })));
        let not_unit = identity(2);
        assert!(matches!(DensityOperator::new(not_unit), Err(Error::Trace { .. })));
        let negative =
            CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::new(1.5, 0.0), Complex64::new(-0.5, 0.0)]));
        assert!(matches!(DensityOperator::new(negative), Err(Error::NotPsd { .. })));
        assert!(DensityOperator::new(identity(3) / Complex64::new(3.0, 0.0)).is_err());
    }

    #[test]
    fn purification_of_pure_basis_state_is_product() {
        let rho = DensityOperator::basis(1, 0).unwrap();
        let v = canonical_purification(&rho).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (z, e) in v.vector().iter().zip(expected) {
            assert!((z - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn purification_of_maximally_mixed_qubit_is_bell_vector() {
        let v = canonical_purification(&DensityOperator::maximally_mixed(1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [h, 0.0, 0.0, h];
        for (z, e) in v.vector().iter().zip(expected) {
            assert!((z - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn purification_marginals() {
        let rho = crate::random::random_density(4, 3, 11).unwrap();
        let v = canonical_purification(&rho).unwrap();
        let proj = v.projector();
        let first = partial_trace_second(proj.matrix(), 4).unwrap();
        let second = partial_trace_first(proj.matrix(), 4).unwrap();
        assert!((first - rho.matrix()).norm() < 1e-12);
        assert!((second - rho.transpose()).norm() < 1e-12);
    }

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new(CVector::from_vec(vec![Complex64::new(1.0, 0.0); 2])).is_err());
        assert!(PureState::normalized(CVector::zeros(2)).is_err());
        assert!(PureState::basis(1, 2).is_err());
        let p = PureState::basis(2, 3).unwrap().projector();
        assert!(p.is_pure(1e-12));
        assert_eq!(p.num_qubits(), 2);
    }
}
