//! Wigner symmetries and non-isometric control channels.

use rand::Rng;

use crate::channel::QuantumChannel;
use crate::coupling::{Coupling, CouplingSource};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{conj, identity, kron, re, CMatrix, TOL_EIG};
use crate::random::{random_unitary_with, seeded};
use crate::state::{DensityOperator, PureState};

/// `ρ ↦ UρU*` for a unitary `U = V`, or an anti-unitary `U = V∘K` where `K`
/// is complex conjugation in the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerSymmetry {
    unitary_part: CMatrix,
    antiunitary: bool,
}

impl WignerSymmetry {
    pub fn new(unitary_part: CMatrix, antiunitary: bool) -> Result<Self> {
        let d = crate::linalg::ensure_square(&unitary_part, "unitary part")?;
        let residual = (unitary_part.adjoint() * &unitary_part - identity(d)).norm();
        if residual > TOL_EIG * (d as f64).sqrt().max(1.0) {
            return Err(Error::Input(format!("unitary part is not unitary: ‖V†V − I‖ = {residual:.3e}")));
        }
        Ok(Self { unitary_part, antiunitary })
    }

    pub fn identity(d: usize) -> Self {
        Self { unitary_part: identity(d), antiunitary: false }
    }

    pub fn unitary_part(&self) -> &CMatrix {
        &self.unitary_part
    }

    pub fn is_antiunitary(&self) -> bool {
        self.antiunitary
    }

    pub fn dim(&self) -> usize {
        self.unitary_part.nrows()
    }

    /// Action on a vector: `Vψ` or `Vψ̄`.
    pub fn apply_vector(&self, psi: &PureState) -> Result<PureState> {
        ensure_dim("state dimension", self.dim(), psi.vector().len())?;
        let v = if self.antiunitary { psi.vector().map(|z| z.conj()) } else { psi.vector().clone() };
        PureState::normalized(&self.unitary_part * v)
    }

    fn conjugate(&self, m: &CMatrix) -> CMatrix {
        let base = if self.antiunitary { conj(m) } else { m.clone() };
        &self.unitary_part * base * self.unitary_part.adjoint()
    }
}

/// `WρW*`.
pub fn apply_symmetry(w: &WignerSymmetry, rho: &DensityOperator) -> Result<DensityOperator> {
    ensure_dim("state dimension", w.dim(), rho.dim())?;
    DensityOperator::new(w.conjugate(rho.matrix()))
}

/// `(V ⊗ V̄) Π (V ⊗ V̄)†`, with `Π` conjugated entrywise first when `W` is
/// anti-unitary. Maps couplings of `(ρ, ω)` to couplings of `(WρW*, WωW*)`.
pub fn conjugate_coupling(w: &WignerSymmetry, pi: &Coupling) -> Result<Coupling> {
    ensure_dim("coupling dimension", w.dim(), pi.dim())?;
    let doubled = kron(&w.unitary_part, &conj(&w.unitary_part));
    let base = if w.antiunitary { conj(pi.matrix()) } else { pi.matrix().clone() };
    Coupling::unchecked(&doubled * base * doubled.adjoint(), pi.dim(), CouplingSource::Explicit)
}

pub fn random_wigner_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<WignerSymmetry> {
    let unitary_part = random_unitary_with(d, rng)?;
    let antiunitary = rng.random_bool(0.5);
    Ok(WignerSymmetry { unitary_part, antiunitary })
}

/// Haar unitary part with a fair coin for anti-unitarity.
pub fn random_wigner(d: usize, seed: u64) -> Result<WignerSymmetry> {
    random_wigner_with(d, &mut seeded(seed))
}

/// `ρ ↦ (1−p)ρ + p·I/d`.
pub fn depolarizing_channel(d: usize, p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Input(format!("depolarizing probability {p} outside [0, 1]")));
    }
    if d == 0 {
        return Err(Error::Input("channel dimension must be at least 1".into()));
    }
    let mut kraus = Vec::with_capacity(1 + d * d);
    if p < 1.0 {
        kraus.push(identity(d) * re((1.0 - p).sqrt()));
    }
    if p > 0.0 {
        let weight = re((p / d as f64).sqrt());
        for i in 0..d {
            for j in 0..d {
                let mut k = CMatrix::zeros(d, d);
                k[(i, j)] = weight;
                kraus.push(k);
            }
        }
    }
    QuantumChannel::new(kraus)
}

/// Measure in the orthonormal basis given by the columns of `basis` and
/// prepare `prepared[i]` on outcome `i`.
pub fn measure_and_prepare(basis: &CMatrix, prepared: &[PureState]) -> Result<QuantumChannel> {
    let d = crate::linalg::ensure_square(basis, "measurement basis")?;
    ensure_dim("number of prepared states", d, prepared.len())?;
    let kraus = prepared
        .iter()
        .enumerate()
        .map(|(i, psi)| {
            ensure_dim("prepared state dimension", d, psi.vector().len())?;
            Ok(psi.vector() * basis.column(i).adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumChannel::new(kraus)
}

/// Computational-basis measure-and-prepare: `ρ ↦ Σ_i <i|ρ|i> |i><i|`.
pub fn dephasing_channel(d: usize) -> Result<QuantumChannel> {
    let n =
        crate::linalg::qubit_count(d).ok_or_else(|| Error::Input(format!("dimension {d} is not a power of two")))?;
    let states = (0..d).map(|k| PureState::basis(n, k)).collect::<Result<Vec<_>>>()?;
    measure_and_prepare(&identity(d), &states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::product_coupling;
    use crate::pauli::pauli_matrix;
    use crate::random::random_density;
    use num_complex::Complex64;

    #[test]
    fn identity_symmetry_fixes_states_and_couplings() {
        let rho = random_density(4, 2, 1).unwrap();
        let w = WignerSymmetry::identity(4);
        assert_eq!(apply_symmetry(&w, &rho).unwrap(), rho);
        let pi = product_coupling(&rho, &random_density(4, 3, 2).unwrap()).unwrap();
        assert!((conjugate_coupling(&w, &pi).unwrap().matrix() - pi.matrix()).norm() < 1e-15);
    }

    #[test]
    fn complex_conjugation_flips_sigma_y_eigenstates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i =
            PureState::new(nalgebra::DVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)])).unwrap();
        let minus_i =
            PureState::new(nalgebra::DVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(0.0, -h)])).unwrap();
        let k = WignerSymmetry::new(identity(2), true).unwrap();
        let image = apply_symmetry(&k, &plus_i.projector()).unwrap();
        assert!((image.matrix() - minus_i.projector().matrix()).norm() < 1e-15);
        let y = pauli_matrix(2).unwrap();
        let before = crate::linalg::trace_product(plus_i.projector().matrix(), &y).re;
        let after = crate::linalg::trace_product(image.matrix(), &y).re;
        assert!((before + after).abs() < 1e-15);
    }

    #[test]
    fn purity_preserved() {
        for seed in 0..10 {
            let rho = random_density(4, 2, seed).unwrap();
            let w = random_wigner(4, 100 + seed).unwrap();
            let image = apply_symmetry(&w, &rho).unwrap();
            assert!((image.purity() - rho.purity()).abs() < 1e-12);
        }
    }

    #[test]
    fn random_wigner_contracts() {
        let a = random_wigner(4, 3).unwrap();
        assert_eq!(a, random_wigner(4, 3).unwrap());
        assert!((a.unitary_part().adjoint() * a.unitary_part() - identity(4)).norm() <= 1e-12);
        let flags: Vec<bool> = (0..32).map(|s| random_wigner(2, s).unwrap().is_antiunitary()).collect();
        assert!(flags.iter().any(|&f| f) && flags.iter().any(|&f| !f));
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(WignerSymmetry::new(identity(2) * re(2.0), false).is_err());
        assert!(apply_symmetry(&WignerSymmetry::identity(2), &random_density(4, 1, 0).unwrap()).is_err());
    }

    #[test]
    fn depolarizing_endpoints() {
        let rho = random_density(2, 2, 4).unwrap();
        let p0 = depolarizing_channel(2, 0.0).unwrap();
        assert!((p0.apply(rho.matrix()).unwrap() - rho.matrix()).norm() < 1e-15);
        let p1 = depolarizing_channel(2, 1.0).unwrap();
        assert!((p1.apply(rho.matrix()).unwrap() - identity(2) * re(0.5)).norm() < 1e-15);
        for p in [0.0, 0.3, 1.0] {
            assert!(depolarizing_channel(4, p).unwrap().trace_preservation_residual() <= 1e-12);
        }
        assert!(depolarizing_channel(2, 1.5).is_err());
        assert!(depolarizing_channel(2, -0.1).is_err());
    }

    #[test]
    fn depolarizing_adjoint_on_sigma_z() {
        let z = pauli_matrix(3).unwrap();
        let p = 0.37;
        let adj = depolarizing_channel(2, p).unwrap().apply_adjoint(&z).unwrap();
        assert!((adj - &z * re(1.0 - p)).norm() < 1e-14);
    }

    #[test]
    fn dephasing_kills_coherences() {
        let phi = dephasing_channel(2).unwrap();
        let plus = PureState::normalized(nalgebra::DVector::from_vec(vec![re(1.0), re(1.0)])).unwrap();
        let out = phi.apply(plus.projector().matrix()).unwrap();
        assert!((out - identity(2) * re(0.5)).norm() < 1e-15);
        assert!(dephasing_channel(3).is_err());
    }
}
