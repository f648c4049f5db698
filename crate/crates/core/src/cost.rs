//! Quadratic transport cost operators.
//!
//! For observables `A_1, …, A_K` on `H` the cost operator on `H ⊗ H*` is
//! `C = Σ_k (A_k ⊗ I − I ⊗ A_kᵀ)²`. When every `A_k` squares to `λ_k² I`
//! this collapses to `Σ_k 2(λ_k² I ⊗ I − A_k ⊗ A_kᵀ)`, and for the full set
//! of `4^n` Pauli strings to `2^{2n+1}(I − 2^{-n} |I>><<I|)`.

use serde::Serialize;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{
    ensure_hermitian, ensure_square, hermitian_eig, identity, kron, qubit_count, re, transpose, vectorize, CMatrix,
    TOL_EIG,
};
use crate::pauli::PauliString;

/// Largest register for which dense `4^n × 4^n` costs are built.
pub const MAX_COST_QUBITS: usize = 6;

/// Relative eigenvalue clustering tolerance used by [`verify_spectrum`].
pub const CLUSTER_TOL: f64 = 1e-7;

/// A finite list of Hermitian observables of equal dimension.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    dim: usize,
    observables: Vec<CMatrix>,
    two_level_spectrum: Option<Vec<f64>>,
}

impl ObservableSet {
    pub fn new(observables: Vec<CMatrix>) -> Result<Self> {
        let first = observables.first().ok_or_else(|| Error::Input("observable set is empty".into()))?;
        let dim = ensure_square(first, "observable")?;
        for a in &observables {
            ensure_dim("observable dimension", dim, ensure_square(a, "observable")?)?;
            ensure_hermitian(a)?;
        }
        Ok(Self { dim, observables, two_level_spectrum: None })
    }

    /// Attaches `λ_k` with `spec(A_k) ⊆ {−λ_k, λ_k}`, checked as
    /// `‖A_k² − λ_k² I‖_F ≤ τ`.
    pub fn with_two_level_spectrum(mut self, lambdas: Vec<f64>) -> Result<Self> {
        ensure_dim("two-level spectrum length", self.observables.len(), lambdas.len())?;
        for (k, (a, &lambda)) in self.observables.iter().zip(&lambdas).enumerate() {
            let residual = (a * a - identity(self.dim) * re(lambda * lambda)).norm();
            if residual > TOL_EIG * (lambda * lambda).max(1.0) * (self.dim as f64).sqrt() {
                return Err(Error::Input(format!(
                    "observable {k} is not two-level with spectrum ±{lambda}: ‖A² − λ²I‖ = {residual:.3e}"
                )));
            }
        }
        self.two_level_spectrum = Some(lambdas);
        Ok(self)
    }

    /// Pauli-string observables, each two-level with `λ = 1`.
    pub fn from_pauli_strings(strings: &[PauliString]) -> Result<Self> {
        let n = common_length(strings)?;
        let observables = strings.iter().map(PauliString::matrix).collect();
        debug_assert!(n >= 1);
        Ok(Self { dim: 1 << n, observables, two_level_spectrum: Some(vec![1.0; strings.len()]) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observables(&self) -> &[CMatrix] {
        &self.observables
    }

    pub fn two_level_spectrum(&self) -> Option<&[f64]> {
        self.two_level_spectrum.as_deref()
    }
}

fn common_length(strings: &[PauliString]) -> Result<usize> {
    let n = strings.first().ok_or_else(|| Error::Input("Pauli string list is empty".into()))?.num_qubits();
    for s in strings {
        ensure_dim("Pauli string length", n, s.num_qubits())?;
    }
    Ok(n)
}

/// How a cost operator was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CostProvenance {
    Definitional,
    ClosedFormTwoLevel,
    ClosedFormSymmetric,
}

/// Hermitian PSD operator on `H ⊗ H*`.
#[derive(Clone, Debug)]
pub struct CostOperator {
    dim: usize,
    matrix: CMatrix,
    provenance: CostProvenance,
}

impl CostOperator {
    /// Wraps an externally supplied cost matrix after checking Hermiticity.
    pub fn from_matrix(matrix: CMatrix, provenance: CostProvenance) -> Result<Self> {
        let side = ensure_square(&matrix, "cost operator")?;
        let dim = (side as f64).sqrt().round() as usize;
        if dim * dim != side {
            return Err(Error::Input(format!("cost side {side} is not a perfect square")));
        }
        ensure_hermitian(&matrix)?;
        Ok(Self { dim, matrix, provenance })
    }

    /// Dimension `d` of the single-system space (the matrix is `d² × d²`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> Option<usize> {
        qubit_count(self.dim)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> CostProvenance {
        self.provenance
    }
}

fn guard_qubits(n: usize) -> Result<usize> {
    if n == 0 || n > MAX_COST_QUBITS {
        return Err(Error::Resource(format!(
            "cost operators are built for 1..={MAX_COST_QUBITS} qubits, requested {n}"
        )));
    }
    Ok(1 << n)
}

/// `(A ⊗ I − I ⊗ Aᵀ)²`, expanded with the mixed-product rule. The two
/// summands commute, so the square is `A² ⊗ I + I ⊗ (Aᵀ)² − 2 A ⊗ Aᵀ`.
fn squared_difference(a: &CMatrix, id: &CMatrix) -> CMatrix {
    let at = transpose(a);
    let a2 = a * a;
    let at2 = &at * &at;
    kron(&a2, id) + kron(id, &at2) - kron(a, &at) * re(2.0)
}

/// Definitional cost operator `Σ_k (A_k ⊗ I − I ⊗ A_kᵀ)²`.
pub fn cost_from_observables(obs: &ObservableSet) -> Result<CostOperator> {
    let d = obs.dim;
    if d > (1 << MAX_COST_QUBITS) {
        return Err(Error::Resource(format!("observable dimension {d} too large")));
    }
    let id = identity(d);
    let mut c = CMatrix::zeros(d * d, d * d);
    for a in &obs.observables {
        c += squared_difference(a, &id);
    }
    Ok(CostOperator { dim: d, matrix: c, provenance: CostProvenance::Definitional })
}

/// `Σ_k 2(λ_k² I ⊗ I − A_k ⊗ A_kᵀ)` for two-level observables.
pub fn two_level_cost_closed_form(obs: &ObservableSet) -> Result<CostOperator> {
    let lambdas = obs
        .two_level_spectrum
        .as_ref()
        .ok_or_else(|| Error::Input("observable set carries no verified two-level spectrum".into()))?;
    let d = obs.dim;
    let mut c = CMatrix::zeros(d * d, d * d);
    let mut scalar = 0.0;
    for (a, &lambda) in obs.observables.iter().zip(lambdas) {
        scalar += 2.0 * lambda * lambda;
        c -= kron(a, &transpose(a)) * re(2.0);
    }
    for i in 0..d * d {
        c[(i, i)] += re(scalar);
    }
    Ok(CostOperator { dim: d, matrix: c, provenance: CostProvenance::ClosedFormTwoLevel })
}

/// Symmetric cost on `n` qubits, summed term by term over all `4^n` Pauli
/// strings.
pub fn symmetric_cost(n: usize) -> Result<CostOperator> {
    let d = guard_qubits(n)?;
    let id = identity(d);
    let mut c = CMatrix::zeros(d * d, d * d);
    for p in PauliString::all(n) {
        c += squared_difference(&p.matrix(), &id);
    }
    Ok(CostOperator { dim: d, matrix: c, provenance: CostProvenance::Definitional })
}

/// `2^{2n+1} (I − 2^{-n} |I>><<I|)`.
pub fn symmetric_cost_closed_form(n: usize) -> Result<CostOperator> {
    let d = guard_qubits(n)?;
    let scale = (2 * d * d) as f64;
    let v = vectorize(&identity(d))?.into_vector();
    let mut c = &v * v.adjoint() * re(-scale / d as f64);
    for i in 0..d * d {
        c[(i, i)] += re(scale);
    }
    Ok(CostOperator { dim: d, matrix: c, provenance: CostProvenance::ClosedFormSymmetric })
}

/// `Σ_k 2(I ⊗ I − P_k ⊗ P_kᵀ)`; duplicates contribute once per occurrence.
pub fn pauli_subset_cost(strings: &[PauliString]) -> Result<CostOperator> {
    let n = common_length(strings)?;
    guard_qubits(n)?;
    let obs = ObservableSet::from_pauli_strings(strings)?;
    two_level_cost_closed_form(&obs)
}

/// Eigenvalue of [`pauli_subset_cost`] on `|P>>` for a Pauli string `P`:
/// `Σ_k 2(1 − Π_i j(m_{k,i}, m'_i))`.
pub fn pauli_subset_eigenvalue(strings: &[PauliString], target: &PauliString) -> Result<f64> {
    strings.iter().try_fold(0.0, |acc, s| Ok(acc + 2.0 * (1.0 - s.commutation_sign(target)? as f64)))
}

/// One eigenvalue cluster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCluster {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Outcome of comparing a cost spectrum with an expected multiset.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub clusters: Vec<EigenCluster>,
    pub expected: Vec<EigenCluster>,
    pub matches: bool,
    /// Largest `|λ − λ_expected|` over all eigenvalues, when cluster counts agree.
    pub max_eigenvalue_error: f64,
    /// `‖C − VΛV†‖_F`.
    pub reconstruction_residual: f64,
    /// `‖P₀ |I>>‖² / d` with `P₀` the projector onto the zero eigenspace.
    pub zero_overlap: Option<f64>,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
}

/// Eigendecomposes `cost`, clusters eigenvalues within `1e-7·‖C‖` and compares
/// with `expected` pairs of `(eigenvalue, multiplicity)`.
pub fn verify_spectrum(cost: &CostOperator, expected: &[(f64, usize)]) -> Result<SpectrumReport> {
    let spectrum = hermitian_eig(&cost.matrix)?;
    let norm = spectrum.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tolerance = if norm > 0.0 { CLUSTER_TOL * norm } else { f64::EPSILON };

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let values = &spectrum.eigenvalues;
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tolerance {
            groups.push((start, i));
            start = i;
        }
    }
    let mut clusters = Vec::with_capacity(groups.len());
    for &(lo, hi) in &groups {
        let span = values[hi - 1] - values[lo];
        if span > tolerance {
            return Err(Error::Diagnostic(format!(
                "eigenvalues {:.6e}..{:.6e} chain into one cluster wider than {tolerance:.3e}",
                values[lo],
                values[hi - 1]
            )));
        }
        let mean = values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
        clusters.push(EigenCluster { eigenvalue: mean, multiplicity: hi - lo });
    }

    let mut expected: Vec<EigenCluster> =
        expected.iter().map(|&(eigenvalue, multiplicity)| EigenCluster { eigenvalue, multiplicity }).collect();
    expected.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));

    let mut matches = clusters.len() == expected.len();
    let mut max_eigenvalue_error = f64::NAN;
    if matches {
        max_eigenvalue_error = 0.0;
        for ((got, want), &(lo, hi)) in clusters.iter().zip(&expected).zip(&groups) {
            for &x in &values[lo..hi] {
                max_eigenvalue_error = max_eigenvalue_error.max((x - want.eigenvalue).abs());
            }
            if got.multiplicity != want.multiplicity || (got.eigenvalue - want.eigenvalue).abs() > tolerance {
                matches = false;
            }
        }
    }

    let zero_overlap =
        groups.iter().zip(&clusters).find(|(_, c)| c.eigenvalue.abs() <= tolerance).map(|(&(lo, hi), _)| {
            let d = cost.dim;
            let v = vectorize(&identity(d)).expect("square").into_vector() / re((d as f64).sqrt());
            let block = spectrum.eigenvectors.columns(lo, hi - lo);
            (block.adjoint() * v).norm_squared()
        });

    Ok(SpectrumReport {
        clusters,
        expected,
        matches,
        max_eigenvalue_error,
        reconstruction_residual: (spectrum.reconstruct() - &cost.matrix).norm(),
        zero_overlap,
        min_eigenvalue: spectrum.min(),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_matrix;
    use num_complex::Complex64;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    #[test]
    fn identity_observable_contributes_nothing() {
        let c = cost_from_observables(&ObservableSet::new(vec![identity(4)]).unwrap()).unwrap();
        assert_eq!(c.matrix().norm(), 0.0);
    }

    #[test]
    fn sigma_z_cost_by_hand() {
        // (σz⊗I − I⊗σz)² on |00>,|01>,|10>,|11> has diagonal (0, 4, 4, 0)
        let obs = ObservableSet::new(vec![pauli_matrix(3).unwrap()]).unwrap();
        let c = cost_from_observables(&obs).unwrap();
        assert!((c.matrix() - diag(&[0.0, 4.0, 4.0, 0.0])).norm() < 1e-15);
        let closed = two_level_cost_closed_form(&obs.with_two_level_spectrum(vec![1.0]).unwrap()).unwrap();
        assert!((closed.matrix() - diag(&[0.0, 4.0, 4.0, 0.0])).norm() < 1e-15);
        assert_eq!(closed.provenance(), CostProvenance::ClosedFormTwoLevel);
    }

    #[test]
    fn scaled_sigma_x_two_level() {
        let a = pauli_matrix(1).unwrap() * re(2.0);
        let obs = ObservableSet::new(vec![a.clone()]).unwrap().with_two_level_spectrum(vec![2.0]).unwrap();
        let closed = two_level_cost_closed_form(&obs).unwrap();
        let expected = (identity(4) * re(4.0) - kron(&a, &transpose(&a))) * re(2.0);
        assert!((closed.matrix() - &expected).norm() < 1e-14);
        let definitional = cost_from_observables(&obs).unwrap();
        assert!((definitional.matrix() - &expected).norm() < 1e-13);
    }

    #[test]
    fn two_level_check_rejects_wrong_spectrum() {
        let obs = ObservableSet::new(vec![pauli_matrix(3).unwrap()]).unwrap();
        assert!(obs.clone().with_two_level_spectrum(vec![2.0]).is_err());
        assert!(two_level_cost_closed_form(&obs).is_err());
        let non_two_level = ObservableSet::new(vec![diag(&[1.0, 0.0])]).unwrap();
        assert!(non_two_level.with_two_level_spectrum(vec![1.0]).is_err());
    }

    #[test]
    fn observable_set_validation() {
        assert!(ObservableSet::new(vec![]).is_err());
        assert!(ObservableSet::new(vec![identity(2), identity(4)]).is_err());
        let mut skew = identity(2);
        skew[(0, 1)] = re(1.0);
        assert!(ObservableSet::new(vec![skew]).is_err());
    }

    #[test]
    fn one_qubit_full_pauli_set() {
        let all: Vec<_> = PauliString::all(1).collect();
        let def = cost_from_observables(&ObservableSet::from_pauli_strings(&all).unwrap()).unwrap();
        let closed = symmetric_cost_closed_form(1).unwrap();
        assert!((def.matrix() - closed.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn symmetric_closed_form_trace_and_rank() {
        let c2 = symmetric_cost_closed_form(2).unwrap();
        assert!((c2.matrix().trace().re - 480.0).abs() < 1e-10);
        let report = verify_spectrum(&symmetric_cost_closed_form(1).unwrap(), &[(0.0, 1), (8.0, 3)]).unwrap();
        assert!(report.matches);
    }

    #[test]
    fn symmetric_definitional_spectra() {
        let r1 = verify_spectrum(&symmetric_cost(1).unwrap(), &[(0.0, 1), (8.0, 3)]).unwrap();
        assert!(r1.matches);
        assert!((r1.zero_overlap.unwrap() - 1.0).abs() <= 1e-10);
        let r2 = verify_spectrum(&symmetric_cost(2).unwrap(), &[(0.0, 1), (32.0, 15)]).unwrap();
        assert!(r2.matches);
        let r3 = verify_spectrum(&symmetric_cost(3).unwrap(), &[(0.0, 1), (128.0, 63)]).unwrap();
        assert!(r3.matches);
        let wrong = verify_spectrum(&symmetric_cost(1).unwrap(), &[(0.0, 2), (8.0, 2)]).unwrap();
        assert!(!wrong.matches);
    }

    #[test]
    fn symmetric_guard() {
        assert!(matches!(symmetric_cost(0), Err(Error::Resource(_))));
        assert!(matches!(symmetric_cost(7), Err(Error::Resource(_))));
        assert!(matches!(symmetric_cost_closed_form(7), Err(Error::Resource(_))));
    }

    #[test]
    fn single_z_subset_spectrum() {
        let z: PauliString = "Z".parse().unwrap();
        let c = pauli_subset_cost(&[z]).unwrap();
        let r = verify_spectrum(&c, &[(0.0, 2), (4.0, 2)]).unwrap();
        assert!(r.matches);
        // the zero eigenspace contains |I>>
        assert!((r.zero_overlap.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_string_subset_is_zero() {
        let c = pauli_subset_cost(&[PauliString::identity(2)]).unwrap();
        assert!(c.matrix().norm() < 1e-15);
        assert!(pauli_subset_cost(&[]).is_err());
        let mixed = ["XX".parse().unwrap(), "X".parse().unwrap()];
        assert!(pauli_subset_cost(&mixed).is_err());
    }

    #[test]
    fn subset_costs_commute() {
        let a: Vec<PauliString> = ["ZZ", "XI", "YX"].iter().map(|s| s.parse().unwrap()).collect();
        let b: Vec<PauliString> = ["XX", "IZ"].iter().map(|s| s.parse().unwrap()).collect();
        let (ca, cb) = (pauli_subset_cost(&a).unwrap(), pauli_subset_cost(&b).unwrap());
        let comm = ca.matrix() * cb.matrix() - cb.matrix() * ca.matrix();
        assert!(comm.norm() <= 1e-10);
    }

    #[test]
    fn ambiguous_cluster_is_a_diagnostic() {
        // eigenvalues 0, 0.6e-7, 1.2e-7, 1 chain into a cluster of width 1.2e-7 > 1e-7
        let c = CostOperator::from_matrix(diag(&[0.0, 0.6e-7, 1.2e-7, 1.0]), CostProvenance::Definitional).unwrap();
        assert!(matches!(verify_spectrum(&c, &[]), Err(Error::Diagnostic(_))));
    }
}
