//! Dense complex linear algebra on qubit registers.
//!
//! The dual space `H*` is identified with `H` through the computational dual
//! basis, so the transpose of an operator is the ordinary matrix transpose and
//! the vectorization `|A>>` is the row-major flattening of `A`. With these
//! conventions the product rule `(B ⊗ Cᵀ)|A>> = |BAC>>` holds for the standard
//! Kronecker product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance (relative, Frobenius).
pub const TOL_HERMITIAN: f64 = 1e-9;
/// Unit-trace tolerance.
pub const TOL_TRACE: f64 = 1e-9;
/// Largest negative eigenvalue magnitude still treated as zero.
pub const TOL_PSD: f64 = 1e-9;
/// Eigendecomposition and unitarity tolerance (relative, Frobenius).
pub const TOL_EIG: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Kronecker product, left factor on the outer (slow) index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Ordinary (non-conjugating) transpose.
pub fn transpose(a: &CMatrix) -> CMatrix {
    a.transpose()
}

/// Entrywise complex conjugate in the computational basis.
pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `‖A − A†‖_F`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// `(A + A†)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * re(0.5)
}

pub(crate) fn ensure_square(a: &CMatrix, what: &'static str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Input(format!("{what} must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    Ok(a.nrows())
}

pub(crate) fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    let deviation = hermitian_deviation(a);
    let tolerance = TOL_HERMITIAN * a.norm().max(1.0);
    if deviation > tolerance || !deviation.is_finite() {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    Ok(())
}

/// `log2(d)` when `d` is a positive power of two.
pub fn qubit_count(d: usize) -> Option<usize> {
    (d >= 1 && d.is_power_of_two()).then(|| d.trailing_zeros() as usize)
}

/// Row-major vectorization `|A>>` of a square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorizedOperator {
    dim: usize,
    vector: CVector,
}

impl VectorizedOperator {
    /// Wraps a raw vector of length `dim²`.
    pub fn from_vector(vector: CVector) -> Result<Self> {
        let len = vector.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != len {
            return Err(Error::Input(format!("vector of length {len} is not the vectorization of a square matrix")));
        }
        Ok(Self { dim, vector })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn into_vector(self) -> CVector {
        self.vector
    }
}

/// `|A>>` with entry `(i, j)` of `A` at position `i·d + j`.
pub fn vectorize(a: &CMatrix) -> Result<VectorizedOperator> {
    let d = ensure_square(a, "vectorized operator")?;
    let vector = CVector::from_fn(d * d, |k, _| a[(k / d, k % d)]);
    Ok(VectorizedOperator { dim: d, vector })
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &VectorizedOperator) -> CMatrix {
    let d = v.dim;
    CMatrix::from_fn(d, d, |i, j| v.vector[i * d + j])
}

fn split_dim(m: &CMatrix, d: usize) -> Result<()> {
    let side = ensure_square(m, "bipartite operator")?;
    ensure_dim("bipartite operator side", d * d, side)
}

/// Partial trace over the second factor of a `d·d` bipartite operator.
pub fn partial_trace_second(m: &CMatrix, d: usize) -> Result<CMatrix> {
    split_dim(m, d)?;
    Ok(partial_trace_second_rect(m, d, d))
}

/// Partial trace over the first factor of a `d·d` bipartite operator.
pub fn partial_trace_first(m: &CMatrix, d: usize) -> Result<CMatrix> {
    split_dim(m, d)?;
    Ok(partial_trace_first_rect(m, d, d))
}

/// `tr₂` on `C^{d1} ⊗ C^{d2}`; no shape checks.
pub(crate) fn partial_trace_second_rect(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, c| (0..d2).map(|b| m[(a * d2 + b, c * d2 + b)]).sum())
}

/// `tr₁` on `C^{d1} ⊗ C^{d2}`; no shape checks.
pub(crate) fn partial_trace_first_rect(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |b, c| (0..d1).map(|a| m[(a * d2 + b, a * d2 + c)]).sum())
}

/// Hilbert–Schmidt inner product `tr[A†B]`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::Input(format!(
            "Hilbert-Schmidt inner product of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// `tr[AB]` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = f(lambda);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * self.eigenvectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of the Hermitian part of `a`, without validation.
pub(crate) fn eigh(a: &CMatrix) -> Spectrum {
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = a.nrows();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum { eigenvalues, eigenvectors }
}

/// Eigendecomposition of a Hermitian matrix, ascending eigenvalues.
pub fn hermitian_eig(a: &CMatrix) -> Result<Spectrum> {
    ensure_square(a, "Hermitian matrix")?;
    ensure_hermitian(a)?;
    Ok(eigh(a))
}

/// Positive square root of a PSD matrix. Eigenvalues in `[-TOL_PSD, 0)` are
/// clamped to zero.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let spectrum = hermitian_eig(a)?;
    let min_eigenvalue = spectrum.min();
    if min_eigenvalue < -TOL_PSD {
        return Err(Error::NotPsd { min_eigenvalue, tolerance: TOL_PSD });
    }
    Ok(spectrum.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Projection onto the PSD cone in Frobenius norm (negative eigenvalues
/// clipped to zero).
pub(crate) fn project_psd(a: &CMatrix) -> CMatrix {
    let spectrum = eigh(a);
    if spectrum.min() >= 0.0 {
        return hermitian_part(a);
    }
    // only the positive part of the spectrum is needed
    let n = a.nrows();
    let first = spectrum.eigenvalues.partition_point(|&x| x <= 0.0);
    let mut out = CMatrix::zeros(n, n);
    if first == n {
        return out;
    }
    let kept = n - first;
    let mut v = CMatrix::zeros(n, kept);
    let mut vs = CMatrix::zeros(n, kept);
    for j in 0..kept {
        let lambda = spectrum.eigenvalues[first + j];
        let col = spectrum.eigenvectors.column(first + j);
        v.set_column(j, &col);
        vs.set_column(j, &(col * re(lambda)));
    }
    vs.mul_to(&v.adjoint(), &mut out);
    out
}
