//! Reference computations written from the definitions with explicit index
//! loops. Nothing here calls the library's linear-algebra helpers, so tests
//! comparing against these oracles are not self-referential.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(A ⊗ B)[(i·p + k), (j·q + l)] = A[i,j]·B[k,l]`.
pub fn kron(a: &M, b: &M) -> M {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    M::from_fn(m * p, n * q, |r, s| a[(r / p, s / q)] * b[(r % p, s % q)])
}

/// Row-major `vec(A)[i·d + j] = A[i, j]`.
pub fn vec_row_major(a: &M) -> Vec<Complex64> {
    let d = a.nrows();
    (0..d * d).map(|k| a[(k / d, k % d)]).collect()
}

pub fn eye(d: usize) -> M {
    M::from_fn(d, d, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn transpose(a: &M) -> M {
    M::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)])
}

pub fn dagger(a: &M) -> M {
    M::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn trace(a: &M) -> Complex64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// `tr₂ X` for `X` on `C^{d1} ⊗ C^{d2}`.
pub fn ptrace_second(x: &M, d1: usize, d2: usize) -> M {
    M::from_fn(d1, d1, |i, j| (0..d2).map(|k| x[(i * d2 + k, j * d2 + k)]).sum())
}

/// `tr₁ X` for `X` on `C^{d1} ⊗ C^{d2}`.
pub fn ptrace_first(x: &M, d1: usize, d2: usize) -> M {
    M::from_fn(d2, d2, |k, l| (0..d1).map(|i| x[(i * d2 + k, i * d2 + l)]).sum())
}

pub fn frob(a: &M) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Single-qubit Pauli matrices, written out.
pub fn sigma(m: u8) -> M {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let entries = match m {
        0 => [l, o, o, l],
        1 => [o, l, l, o],
        2 => [o, -i, i, o],
        3 => [l, o, o, -l],
        _ => panic!("label {m}"),
    };
    M::from_row_slice(2, 2, &entries)
}

pub fn pauli_string(labels: &[u8]) -> M {
    labels.iter().fold(eye(1), |acc, &m| kron(&acc, &sigma(m)))
}

/// All label tuples of length `n`, lexicographic in `0..4`.
pub fn all_labels(n: usize) -> Vec<Vec<u8>> {
    (0..1usize << (2 * n)).map(|k| (0..n).rev().map(|q| ((k >> (2 * q)) & 3) as u8).collect()).collect()
}

/// `Σ_k (A_k ⊗ I − I ⊗ A_kᵀ)²` by explicit squaring.
pub fn definitional_cost(observables: &[M]) -> M {
    let d = observables[0].nrows();
    let id = eye(d);
    let mut total = M::zeros(d * d, d * d);
    for a in observables {
        let diff = kron(a, &id) - kron(&id, &transpose(a));
        total += &diff * &diff;
    }
    total
}

/// `2^{2n+1}(I − 2^{-n} |I>><<I|)` assembled entrywise.
pub fn symmetric_cost_reference(n: usize) -> M {
    let d = 1usize << n;
    let scale = (2 * d * d) as f64;
    let v = vec_row_major(&eye(d));
    M::from_fn(d * d, d * d, |r, s| {
        let delta = if r == s { 1.0 } else { 0.0 };
        c(scale * delta, 0.0) - v[r] * v[s].conj() * (scale / d as f64)
    })
}

/// Principal square root of a PSD matrix through its eigendecomposition.
pub fn sqrt_psd(a: &M) -> M {
    let h = (a + dagger(a)) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let roots =
        M::from_fn(
            a.nrows(),
            a.nrows(),
            |i, j| {
                if i == j {
                    c(eig.eigenvalues[i].max(0.0).sqrt(), 0.0)
                } else {
                    c(0.0, 0.0)
                }
            },
        );
    v * roots * dagger(v)
}

/// `Σ_k tr[Φ(ρ)A²] + tr[ρA²] − 2 Re tr[√ρ A √ρ Φ†(A)]` from Kraus operators.
pub fn channel_cost_reference(kraus: &[M], rho: &M, observables: &[M]) -> f64 {
    let phi = |x: &M| kraus.iter().fold(M::zeros(x.nrows(), x.nrows()), |acc, k| acc + k * x * dagger(k));
    let phi_adj = |x: &M| kraus.iter().fold(M::zeros(x.nrows(), x.nrows()), |acc, k| acc + dagger(k) * x * k);
    let root = sqrt_psd(rho);
    let out = phi(rho);
    observables
        .iter()
        .map(|a| {
            let a2 = a * a;
            trace(&(&out * &a2)).re + trace(&(rho * &a2)).re - 2.0 * trace(&(&root * a * &root * phi_adj(a))).re
        })
        .sum()
}

/// `2^{n+1/2}` for `n = 1, 2, 3`, spelled out.
pub const DIAMETERS: [f64; 3] = [2.828_427_124_746_190_3, 5.656_854_249_492_381, 11.313_708_498_984_761];
