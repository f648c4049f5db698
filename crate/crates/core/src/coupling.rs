//! Quantum couplings and their transport costs.
//!
//! A coupling of `(ρ, ω)` is a state `Π` on `H ⊗ H*` with
//! `tr_{H*}[Π] = ω` and `tr_H[Π] = ρᵀ`.

use serde::Serialize;

use crate::channel::QuantumChannel;
use crate::cost::{CostOperator, ObservableSet};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{
    eigh, kron, partial_trace_first, partial_trace_second, psd_sqrt, trace_product, vectorize, CMatrix, TOL_PSD,
    TOL_TRACE,
};
use crate::state::DensityOperator;

/// Marginal residual accepted for a declared coupling.
pub const TOL_MARGINAL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSource {
    Product,
    Channel,
    SdpOptimal,
    Explicit,
}

/// Marginal residuals `‖tr₂Π − ω‖_F` and `‖tr₁Π − ρᵀ‖_F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginalResiduals {
    pub first: f64,
    pub second: f64,
}

impl MarginalResiduals {
    pub fn max(&self) -> f64 {
        self.first.max(self.second)
    }
}

#[derive(Clone, Debug)]
pub struct Coupling {
    dim: usize,
    matrix: CMatrix,
    source: CouplingSource,
}

impl Coupling {
    /// Validates positivity, unit trace and the marginals against `(ρ, ω)`.
    pub fn explicit(matrix: CMatrix, rho: &DensityOperator, omega: &DensityOperator) -> Result<Self> {
        let coupling = Self::unchecked(matrix, rho.dim(), CouplingSource::Explicit)?;
        coupling.validate(rho, omega)?;
        Ok(coupling)
    }

    pub(crate) fn unchecked(matrix: CMatrix, dim: usize, source: CouplingSource) -> Result<Self> {
        ensure_dim("coupling side", dim * dim, matrix.nrows())?;
        ensure_dim("coupling side", dim * dim, matrix.ncols())?;
        Ok(Self { dim, matrix, source })
    }

    pub fn validate(&self, rho: &DensityOperator, omega: &DensityOperator) -> Result<()> {
        let trace = self.matrix.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE.max(TOL_MARGINAL) {
            return Err(Error::Trace { trace, tolerance: TOL_MARGINAL });
        }
        let min_eigenvalue = eigh(&self.matrix).min();
        if min_eigenvalue < -TOL_PSD {
            return Err(Error::NotPsd { min_eigenvalue, tolerance: TOL_PSD });
        }
        let r = self.marginal_residuals(rho, omega)?;
        if r.max() > TOL_MARGINAL {
            return Err(Error::Input(format!("coupling marginals off by ({:.3e}, {:.3e})", r.first, r.second)));
        }
        Ok(())
    }

    pub fn marginal_residuals(&self, rho: &DensityOperator, omega: &DensityOperator) -> Result<MarginalResiduals> {
        ensure_dim("state dimension", self.dim, rho.dim())?;
        ensure_dim("state dimension", self.dim, omega.dim())?;
        let first = (partial_trace_second(&self.matrix, self.dim)? - omega.matrix()).norm();
        let second = (partial_trace_first(&self.matrix, self.dim)? - rho.transpose()).norm();
        Ok(MarginalResiduals { first, second })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn source(&self) -> CouplingSource {
        self.source
    }
}

/// The independent coupling `ω ⊗ ρᵀ`.
pub fn product_coupling(rho: &DensityOperator, omega: &DensityOperator) -> Result<Coupling> {
    ensure_dim("state dimension", rho.dim(), omega.dim())?;
    Coupling::unchecked(kron(omega.matrix(), &rho.transpose()), rho.dim(), CouplingSource::Product)
}

/// `(Φ ⊗ id)(|√ρ>><<√ρ|) = Σ_j |K_j√ρ>><<K_j√ρ|`, with marginals `(Φ(ρ), ρᵀ)`.
pub fn channel_coupling(phi: &QuantumChannel, rho: &DensityOperator) -> Result<Coupling> {
    let d = rho.dim();
    ensure_dim("channel input dimension", d, phi.in_dim())?;
    ensure_dim("channel output dimension", d, phi.out_dim())?;
    let root = psd_sqrt(rho.matrix())?;
    let mut pi = CMatrix::zeros(d * d, d * d);
    for k in phi.kraus_operators() {
        let v = vectorize(&(k * &root))?.into_vector();
        pi += &v * v.adjoint();
    }
    Coupling::unchecked(pi, d, CouplingSource::Channel)
}

/// `tr[ΠC]`.
pub fn coupling_cost(pi: &Coupling, cost: &CostOperator) -> Result<f64> {
    ensure_dim("cost dimension", pi.dim(), cost.dim())?;
    let value = trace_product(pi.matrix(), cost.matrix());
    let scale = pi.matrix().norm() * cost.matrix().norm();
    if value.im.abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::Diagnostic(format!("coupling cost has imaginary part {:.3e}", value.im)));
    }
    Ok(value.re)
}

/// Cost of the channel-induced coupling computed from the channel itself:
/// `Σ_k tr[Φ(ρ)A_k²] + tr[ρA_k²] − 2 tr[√ρ A_k √ρ Φ†(A_k)]`.
pub fn channel_cost(phi: &QuantumChannel, rho: &DensityOperator, obs: &ObservableSet) -> Result<f64> {
    let d = rho.dim();
    ensure_dim("channel input dimension", d, phi.in_dim())?;
    ensure_dim("channel output dimension", d, phi.out_dim())?;
    ensure_dim("observable dimension", d, obs.dim())?;
    let image = phi.apply(rho.matrix())?;
    let root = psd_sqrt(rho.matrix())?;
    let mut total = 0.0;
    for a in obs.observables() {
        let a2 = a * a;
        let transported = trace_product(&image, &a2).re;
        let local = trace_product(rho.matrix(), &a2).re;
        let cross = trace_product(&(&root * a * &root), &phi.apply_adjoint(a)?).re;
        total += transported + local - 2.0 * cross;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{symmetric_cost_closed_form, ObservableSet};
    use crate::linalg::{identity, re};
    use crate::pauli::PauliString;
    use crate::random::{random_density, seeded};

    fn completely_depolarizing(d: usize) -> QuantumChannel {
        let scale = re(1.0 / (d as f64).sqrt());
        let mut kraus = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut k = CMatrix::zeros(d, d);
                k[(i, j)] = scale;
                kraus.push(k);
            }
        }
        QuantumChannel::new(kraus).unwrap()
    }

    #[test]
    fn product_of_equal_basis_states() {
        let zero = DensityOperator::basis(1, 0).unwrap();
        let pi = product_coupling(&zero, &zero).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = re(1.0);
        assert_eq!(pi.matrix(), &expected);
        assert_eq!(pi.source(), CouplingSource::Product);
    }

    #[test]
    fn product_marginals_and_cost_formula() {
        let rho = random_density(4, 2, 1).unwrap();
        let omega = random_density(4, 4, 2).unwrap();
        let pi = product_coupling(&rho, &omega).unwrap();
        assert!(pi.marginal_residuals(&rho, &omega).unwrap().max() < 1e-14);
        let cost = coupling_cost(&pi, &symmetric_cost_closed_form(2).unwrap()).unwrap();
        let expected = 32.0 - 8.0 * rho.overlap(&omega).unwrap();
        assert!((cost - expected).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_on_pure_state_is_product() {
        let rho = crate::random::random_pure_state(1, 3).projector();
        let pi = channel_coupling(&QuantumChannel::identity(2), &rho).unwrap();
        assert!((pi.matrix() - kron(rho.matrix(), &rho.transpose())).norm() < 1e-12);
    }

    #[test]
    fn identity_channel_on_maximally_mixed_qubit() {
        let pi = channel_coupling(&QuantumChannel::identity(2), &DensityOperator::maximally_mixed(1)).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(i, j)] = re(0.5);
        }
        assert!((pi.matrix() - expected).norm() < 1e-14);
        let c = coupling_cost(&pi, &symmetric_cost_closed_form(1).unwrap()).unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn completely_depolarizing_gives_product_with_mixed_state() {
        let rho = random_density(4, 3, 9).unwrap();
        let pi = channel_coupling(&completely_depolarizing(4), &rho).unwrap();
        let expected = kron(&(identity(4) * re(0.25)), &rho.transpose());
        assert!((pi.matrix() - expected).norm() < 1e-12);
    }

    #[test]
    fn pure_state_costs_under_symmetric_cost() {
        let c1 = symmetric_cost_closed_form(1).unwrap();
        let (zero, one) = (DensityOperator::basis(1, 0).unwrap(), DensityOperator::basis(1, 1).unwrap());
        let orth = coupling_cost(&product_coupling(&zero, &one).unwrap(), &c1).unwrap();
        assert!((orth - 8.0).abs() < 1e-12);
        let same = coupling_cost(&product_coupling(&zero, &zero).unwrap(), &c1).unwrap();
        assert!((same - 4.0).abs() < 1e-12);
    }

    #[test]
    fn channel_cost_examples() {
        let all: Vec<_> = PauliString::all(1).collect();
        let obs = ObservableSet::from_pauli_strings(&all).unwrap();
        let rho = crate::random::random_pure_state(1, 21).projector();
        let id_cost = channel_cost(&QuantumChannel::identity(2), &rho, &obs).unwrap();
        assert!((id_cost - 4.0).abs() < 1e-12);
        let dep_cost = channel_cost(&completely_depolarizing(2), &rho, &obs).unwrap();
        assert!((dep_cost - 6.0).abs() < 1e-12);
    }

    #[test]
    fn channel_cost_matches_coupling_cost() {
        let mut rng = seeded(5);
        let strings: Vec<PauliString> = ["XY", "ZZ", "IX", "YI"].iter().map(|s| s.parse().unwrap()).collect();
        let obs = ObservableSet::from_pauli_strings(&strings).unwrap();
        let cost = crate::cost::cost_from_observables(&obs).unwrap();
        for _ in 0..5 {
            let phi = crate::channel::random_channel_with(4, 2, &mut rng).unwrap();
            let rho = crate::random::random_density_with(4, 4, &mut rng).unwrap();
            let pi = channel_coupling(&phi, &rho).unwrap();
            pi.validate(&rho, &DensityOperator::new(phi.apply(rho.matrix()).unwrap()).unwrap()).unwrap();
            let lhs = coupling_cost(&pi, &cost).unwrap();
            let rhs = channel_cost(&phi, &rho, &obs).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn explicit_coupling_checks_marginals() {
        let zero = DensityOperator::basis(1, 0).unwrap();
        let one = DensityOperator::basis(1, 1).unwrap();
        let pi = kron(zero.matrix(), zero.matrix());
        assert!(Coupling::explicit(pi.clone(), &zero, &zero).is_ok());
        assert!(Coupling::explicit(pi, &zero, &one).is_err());
        assert!(product_coupling(&zero, &DensityOperator::maximally_mixed(2)).is_err());
    }
}
