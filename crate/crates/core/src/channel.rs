//! Quantum channels in Kraus form.

use rand::Rng;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{identity, CMatrix, TOL_EIG};
use crate::random::random_isometry_with;

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    /// Checks that all Kraus operators share a shape and `Σ K†K = I`.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Input("channel needs at least one Kraus operator".into()))?;
        let (out_dim, in_dim) = first.shape();
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::Input(format!(
                    "Kraus operator of shape {:?}, expected {:?}",
                    k.shape(),
                    (out_dim, in_dim)
                )));
            }
            sum += k.adjoint() * k;
        }
        let residual = (sum - identity(in_dim)).norm();
        if residual > TOL_EIG * (in_dim as f64).sqrt().max(1.0) {
            return Err(Error::Input(format!("Kraus operators are not trace preserving: ‖ΣK†K − I‖ = {residual:.3e}")));
        }
        Ok(Self { in_dim, out_dim, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { in_dim: d, out_dim: d, kraus: vec![identity(d)] }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus_operators(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `Φ(X) = Σ K X K†`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        ensure_dim("channel input dimension", self.in_dim, x.nrows())?;
        ensure_dim("channel input dimension", self.in_dim, x.ncols())?;
        Ok(self.kraus.iter().fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, k| acc + k * x * k.adjoint()))
    }

    /// `Φ†(A) = Σ K† A K`.
    pub fn apply_adjoint(&self, a: &CMatrix) -> Result<CMatrix> {
        ensure_dim("channel output dimension", self.out_dim, a.nrows())?;
        ensure_dim("channel output dimension", self.out_dim, a.ncols())?;
        Ok(self.kraus.iter().fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| acc + k.adjoint() * a * k))
    }

    /// `‖Σ K†K − I‖_F`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let sum = self.kraus.iter().fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| acc + k.adjoint() * k);
        (sum - identity(self.in_dim)).norm()
    }
}

/// The Heisenberg-picture adjoint `A ↦ Φ†(A)`.
pub fn channel_adjoint(phi: &QuantumChannel) -> impl Fn(&CMatrix) -> Result<CMatrix> + '_ {
    move |a| phi.apply_adjoint(a)
}

/// Random channel on `C^d` with `num_kraus` Kraus operators cut from a Haar
/// isometry `C^d → C^{num_kraus·d}`.
pub fn random_channel_with<R: Rng + ?Sized>(d: usize, num_kraus: usize, rng: &mut R) -> Result<QuantumChannel> {
    if num_kraus == 0 {
        return Err(Error::Input("channel needs at least one Kraus operator".into()));
    }
    let w = random_isometry_with(num_kraus * d, d, rng)?;
    let kraus = (0..num_kraus).map(|k| w.rows(k * d, d).into_owned()).collect();
    QuantumChannel::new(kraus)
}
