//! Seeded samplers for unitaries, states and channels.
//!
//! Every sampler comes in two forms: one taking a `u64` seed and one taking a
//! caller-owned generator, so that long test sweeps can draw from a single
//! stream.

use nalgebra::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{qubit_count, CMatrix, CVector};
use crate::pauli::PauliString;
use crate::state::{DensityOperator, PureState};

/// Generator used by all seeded entry points.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // row-major fill keeps the stream layout independent of storage order
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// `Q` from the QR factorization of a tall Gaussian matrix, with the phases
/// of `diag(R)` absorbed so the result is Haar distributed.
fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let qr = QR::new(ginibre(rows, cols, rng));
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<CMatrix> {
    if d == 0 {
        return Err(Error::Input("unitary dimension must be at least 1".into()));
    }
    Ok(haar_isometry(d, d, rng))
}

/// Haar-random `d × d` unitary.
pub fn random_unitary(d: usize, seed: u64) -> Result<CMatrix> {
    random_unitary_with(d, &mut seeded(seed))
}

/// Haar-random isometry `C^cols → C^rows`, `rows ≥ cols`.
pub fn random_isometry_with<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<CMatrix> {
    if cols == 0 || rows < cols {
        return Err(Error::Input(format!("no isometry from dimension {cols} into {rows}")));
    }
    Ok(haar_isometry(rows, cols, rng))
}

pub fn random_density_with<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if qubit_count(d).is_none() {
        return Err(Error::Input(format!("state dimension {d} is not a power of two")));
    }
    if rank == 0 || rank > d {
        return Err(Error::Input(format!("rank {rank} outside 1..={d}")));
    }
    let g = ginibre(d, rank, rng);
    let mut gg = &g * g.adjoint();
    gg = (&gg + gg.adjoint()) * Complex64::new(0.5, 0.0);
    let trace = gg.trace();
    Ok(DensityOperator::from_trusted(gg / trace))
}

/// `GG†/tr[GG†]` for a `d × rank` complex Gaussian `G`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(d, rank, &mut seeded(seed))
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure_state_with<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> PureState {
    let d = 1usize << num_qubits;
    let v = CVector::from_fn(d, |_, _| complex_normal(rng));
    PureState::normalized(v).expect("Gaussian vector is nonzero")
}

pub fn random_pure_state(num_qubits: usize, seed: u64) -> PureState {
    random_pure_state_with(num_qubits, &mut seeded(seed))
}

/// Non-empty subset of the `4^n` Pauli strings, each included with
/// probability 1/2 (resampled if empty).
pub fn random_pauli_subset_with<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Vec<PauliString> {
    loop {
        let subset: Vec<PauliString> = PauliString::all(num_qubits).filter(|_| rng.random_bool(0.5)).collect();
        if !subset.is_empty() {
            return subset;
        }
    }
}

/// Orthonormal basis whose first element is `psi` up to a phase: `Q` from
/// the QR factorization of `[psi | G]` with `G` Gaussian.
pub fn orthonormal_completion_with<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Vec<PureState> {
    let d = psi.vector().len();
    let mut m = CMatrix::zeros(d, d);
    m.set_column(0, psi.vector());
    if d > 1 {
        m.columns_mut(1, d - 1).copy_from(&ginibre(d, d - 1, rng));
    }
    let q = QR::new(m).q();
    (0..d).map(|j| PureState::normalized(q.column(j).into_owned()).expect("unit column")).collect()
}
