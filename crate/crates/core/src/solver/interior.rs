//! Primal-dual interior-point method on the restricted problem.
//!
//! Infeasible path following with the HKM search direction and Mehrotra's
//! predictor-corrector. Dual variables are `(Y, Z)` with
//! `A*(Y, Z) = Y ⊗ I + I ⊗ Z`; the direction `(I, −I)` lies in the kernel of
//! `A*`, so the `(0, 0)` coordinate of `Z` is dropped.
//!
//! The Schur complement `M_ij = Re tr[G_i X G_j S⁻¹]` is assembled from its
//! matrix-unit blocks by direct index contraction, which avoids forming the
//! `G_i` explicitly.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use super::{real_inner, Marginals, RestrictedOutcome};
use crate::linalg::{hermitian_part, kron, partial_trace_first_rect, partial_trace_second_rect, re, CMatrix};

/// Fraction of the distance to the cone boundary taken per step is
/// `0.9 + 0.09·min(αp, αd)` of the predictor; long predictor steps allow
/// aggressive corrector steps.
const STEP_FRACTION_BASE: f64 = 0.9;
const STEP_FRACTION_SPAN: f64 = 0.09;
/// Iterations without a smaller relative gap before giving up.
const PATIENCE: usize = 5;
/// A step shorter than this counts as a stall.
const MIN_STEP: f64 = 1e-12;
/// Floor, relative to the unit-norm cost, on the scale of the duality gap
/// test that ends iteration. When iteration stalls first, the best iterate
/// counts as converged if `gap ≤ tol·(1 + |p| + |d|)`.
const TIGHT_GAP_FLOOR: f64 = 1e-6;

/// Real coordinates of Hermitian `d × d` matrices: diagonal entries, then
/// `(E_ij + E_ji)` and `i(E_ij − E_ji)` for `i < j`. Each element is a list of
/// `(row, col, coefficient)`.
struct HermitianBasis {
    d: usize,
    elements: Vec<Vec<(usize, usize, Complex64)>>,
}

impl HermitianBasis {
    fn new(d: usize, skip_first_diagonal: bool) -> Self {
        let mut elements = Vec::with_capacity(d * d);
        let start = usize::from(skip_first_diagonal);
        for i in start..d {
            elements.push(vec![(i, i, re(1.0))]);
        }
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..d {
            for j in i + 1..d {
                elements.push(vec![(i, j, re(1.0)), (j, i, re(1.0))]);
                elements.push(vec![(i, j, i_unit), (j, i, -i_unit)]);
            }
        }
        Self { d, elements }
    }

    fn len(&self) -> usize {
        self.elements.len()
    }

    /// `Re tr[H_k R]` for every basis element.
    fn coords(&self, r: &CMatrix, out: &mut [f64]) {
        for (slot, h) in out.iter_mut().zip(&self.elements) {
            *slot = h.iter().map(|&(i, j, c)| (c * r[(j, i)]).re).sum();
        }
    }

    fn matrix(&self, y: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.d, self.d);
        for (&w, h) in y.iter().zip(&self.elements) {
            for &(i, j, c) in h {
                m[(i, j)] += c * w;
            }
        }
        m
    }
}

struct Structure<'a> {
    marg: &'a Marginals,
    ybasis: HermitianBasis,
    zbasis: HermitianBasis,
}

impl Structure<'_> {
    fn dim(&self) -> usize {
        self.ybasis.len() + self.zbasis.len()
    }

    /// `A(V)` in coordinates.
    fn apply(&self, v: &CMatrix) -> DVector<f64> {
        let (d1, d2) = (self.marg.d1, self.marg.d2);
        let mut out = DVector::zeros(self.dim());
        let ny = self.ybasis.len();
        self.ybasis.coords(&partial_trace_second_rect(v, d1, d2), &mut out.as_mut_slice()[..ny]);
        self.zbasis.coords(&partial_trace_first_rect(v, d1, d2), &mut out.as_mut_slice()[ny..]);
        out
    }

    /// `A*(y) = Y ⊗ I + I ⊗ Z`.
    fn adjoint(&self, y: &DVector<f64>) -> CMatrix {
        let ny = self.ybasis.len();
        let big_y = self.ybasis.matrix(&y.as_slice()[..ny]);
        let big_z = self.zbasis.matrix(&y.as_slice()[ny..]);
        let mut out = CMatrix::zeros(self.marg.d1 * self.marg.d2, self.marg.d1 * self.marg.d2);
        self.marg.add_adjoint(&mut out, &big_y, &big_z, 1.0);
        out
    }

    fn target(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        let ny = self.ybasis.len();
        self.ybasis.coords(&self.marg.m1, &mut out.as_mut_slice()[..ny]);
        self.zbasis.coords(&self.marg.m2, &mut out.as_mut_slice()[ny..]);
        out
    }

    /// Schur complement `M_ij = Re tr[G_i X G_j S⁻¹]`.
    fn schur(&self, x: &CMatrix, s_inv: &CMatrix) -> DMatrix<f64> {
        let (d1, d2) = (self.marg.d1, self.marg.d2);
        let xs = x.as_slice();
        let ss = s_inv.as_slice();
        let n = d1 * d2;
        // column-major element (r, c) of an n × n matrix
        let at = |m: &[Complex64], r: usize, c: usize| m[r + c * n];

        // Q11[(a,b),(c,e)] = Σ_{k,m} X[(b,k),(c,m)] S⁻¹[(e,m),(a,k)]
        let mut q11 = CMatrix::zeros(d1 * d1, d1 * d1);
        for a in 0..d1 {
            for b in 0..d1 {
                for c in 0..d1 {
                    for e in 0..d1 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d2 {
                            for m in 0..d2 {
                                acc += at(xs, b * d2 + k, c * d2 + m) * at(ss, e * d2 + m, a * d2 + k);
                            }
                        }
                        q11[(a * d1 + b, c * d1 + e)] = acc;
                    }
                }
            }
        }
        // Q12[(a,b),(k,l)] = Σ_{c,p} X[(b,p),(c,k)] S⁻¹[(c,l),(a,p)]
        let mut q12 = CMatrix::zeros(d1 * d1, d2 * d2);
        for a in 0..d1 {
            for b in 0..d1 {
                for k in 0..d2 {
                    for l in 0..d2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for c in 0..d1 {
                            for p in 0..d2 {
                                acc += at(xs, b * d2 + p, c * d2 + k) * at(ss, c * d2 + l, a * d2 + p);
                            }
                        }
                        q12[(a * d1 + b, k * d2 + l)] = acc;
                    }
                }
            }
        }
        // Q22[(k,l),(p,q)] = Σ_{c,e} X[(c,l),(e,p)] S⁻¹[(e,q),(c,k)]
        let mut q22 = CMatrix::zeros(d2 * d2, d2 * d2);
        for k in 0..d2 {
            for l in 0..d2 {
                for p in 0..d2 {
                    for q in 0..d2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for c in 0..d1 {
                            for e in 0..d1 {
                                acc += at(xs, c * d2 + l, e * d2 + p) * at(ss, e * d2 + q, c * d2 + k);
                            }
                        }
                        q22[(k * d2 + l, p * d2 + q)] = acc;
                    }
                }
            }
        }

        let ny = self.ybasis.len();
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        let contract =
            |q: &CMatrix, hi: &[(usize, usize, Complex64)], hj: &[(usize, usize, Complex64)], di: usize, dj: usize| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(i1, j1, c1) in hi {
                    for &(i2, j2, c2) in hj {
                        acc += c1 * c2 * q[(i1 * di + j1, i2 * dj + j2)];
                    }
                }
                acc.re
            };
        for (r, hr) in self.ybasis.elements.iter().enumerate() {
            for (s, hs) in self.ybasis.elements.iter().enumerate().skip(r) {
                let v = contract(&q11, hr, hs, d1, d1);
                m[(r, s)] = v;
                m[(s, r)] = v;
            }
            for (s, hs) in self.zbasis.elements.iter().enumerate() {
                let v = contract(&q12, hr, hs, d1, d2);
                m[(r, ny + s)] = v;
                m[(ny + s, r)] = v;
            }
        }
        for (r, hr) in self.zbasis.elements.iter().enumerate() {
            for (s, hs) in self.zbasis.elements.iter().enumerate().skip(r) {
                let v = contract(&q22, hr, hs, d2, d2);
                m[(ny + r, ny + s)] = v;
                m[(ny + s, ny + r)] = v;
            }
        }
        m
    }
}

/// Largest `α` with `X + αΔX ⪰ 0`, given the Cholesky factor of `X ≻ 0`.
fn max_step(chol: &Cholesky<Complex64, nalgebra::Dyn>, dx: &CMatrix) -> f64 {
    let l = chol.l();
    let half = l.solve_lower_triangular(dx).expect("nonsingular factor");
    let w = l.solve_lower_triangular(&half.adjoint()).expect("nonsingular factor");
    let lambda_min = hermitian_part(&w).symmetric_eigenvalues().min();
    if lambda_min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lambda_min
    }
}

/// Cholesky factor of `M + δ·max(diag M)·I` for the smallest `δ` in
/// `{0, 1e-14, 1e-13, …, 1e-6}` that factors. Near the optimum rounding can
/// cost `M` its definiteness; the perturbed direction is still a descent
/// direction because residuals are recomputed every iteration.
fn factor_schur(m: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(chol) = Cholesky::new(m.clone()) {
        return Some(chol);
    }
    let top = m.diagonal().max();
    let mut delta = 1e-14;
    while delta <= 1e-6 {
        let mut shifted = m.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += delta * top;
        }
        if let Some(chol) = Cholesky::new(shifted) {
            return Some(chol);
        }
        delta *= 10.0;
    }
    None
}

fn sym(m: CMatrix) -> CMatrix {
    hermitian_part(&m)
}

/// Minimizes `tr[CX]` over the restricted coupling set. `cost` is assumed
/// PSD with unit Frobenius norm.
pub(super) fn interior_point(cost: &CMatrix, marg: &Marginals, tol: f64, max_iterations: usize) -> RestrictedOutcome {
    let n = marg.d1 * marg.d2;
    let st =
        Structure { marg, ybasis: HermitianBasis::new(marg.d1, false), zbasis: HermitianBasis::new(marg.d2, true) };
    let b = st.target();

    // strictly feasible primal start; dual start Y = −I, Z = 0, S = C + I
    let mut x = kron(&marg.m1, &marg.m2);
    let mut y = DVector::zeros(st.dim());
    for k in 0..marg.d1 {
        y[k] = -1.0;
    }
    let mut s = cost + CMatrix::identity(n, n);

    // best feasible iterate by relative gap; the last iterate is kept when
    // none is feasible
    let mut best: Option<(CMatrix, f64, f64, f64)> = None;
    let mut best_feasible = false;
    let mut since_best = 0;
    let mut iterations = 0;
    for iteration in 0..=max_iterations {
        iterations = iteration;
        let rp = &b - st.apply(&x);
        let rd = cost - &s - st.adjoint(&y);
        let primal_value = real_inner(cost, &x);
        let dual_value = b.dot(&y);
        let dual_residual = rd.norm();
        let primal_residual = marg.residual_norm(&x);
        let gap = (primal_value - dual_value).abs();
        let scale = primal_value.abs().max(dual_value.abs());
        let feasible = primal_residual <= tol && dual_residual <= tol;
        if feasible && gap <= tol * scale.max(TIGHT_GAP_FLOOR) {
            return RestrictedOutcome {
                coupling: x,
                dual_residual,
                dual_value,
                iterations: iteration,
                converged: true,
            };
        }
        let relative_gap = gap / (1.0 + primal_value.abs() + dual_value.abs());
        let improved = match &best {
            _ if feasible && !best_feasible => true,
            Some((_, _, _, g)) => feasible && relative_gap < *g,
            None => true,
        };
        if improved || !best_feasible {
            best = Some((x.clone(), dual_value, dual_residual, relative_gap));
            best_feasible = feasible;
        }
        since_best = if improved { 0 } else { since_best + 1 };
        if iteration == max_iterations || since_best >= PATIENCE {
            break;
        }

        let mu = real_inner(&x, &s) / n as f64;
        let (Some(chol_x), Some(chol_s)) = (Cholesky::new(x.clone()), Cholesky::new(s.clone())) else {
            break;
        };
        let s_inv = chol_s.inverse();
        let schur = st.schur(&x, &s_inv);
        let Some(schur_chol) = factor_schur(schur) else { break };

        let x_rd = sym(&x * &rd * &s_inv);
        let direction = |t: &CMatrix| -> (CMatrix, DVector<f64>, CMatrix) {
            let rhs = &rp - st.apply(&(t - &x_rd));
            let dy = schur_chol.solve(&rhs);
            let ds = &rd - st.adjoint(&dy);
            let dx = t - sym(&x * &ds * &s_inv);
            // an inexact Schur solve leaves A(ΔX) ≠ r_p; restore it exactly
            let dx = marg.project_affine(&(&x + &dx)) - &x;
            (dx, dy, ds)
        };

        let (dx_aff, _, ds_aff) = direction(&(-&x));
        let ap = max_step(&chol_x, &dx_aff).min(1.0);
        let ad = max_step(&chol_s, &ds_aff).min(1.0);
        let mu_aff = real_inner(&(&x + &dx_aff * re(ap)), &(&s + &ds_aff * re(ad))) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let target = &s_inv * re(sigma * mu) - &x - sym(&dx_aff * &ds_aff * &s_inv);
        let (dx, dy, ds) = direction(&target);
        let fraction = STEP_FRACTION_BASE + STEP_FRACTION_SPAN * ap.min(ad);
        let ap = (fraction * max_step(&chol_x, &dx)).min(1.0);
        let ad = (fraction * max_step(&chol_s, &ds)).min(1.0);
        if ap < MIN_STEP && ad < MIN_STEP {
            break;
        }
        x = hermitian_part(&(&x + &dx * re(ap)));
        y += &dy * ad;
        s = hermitian_part(&(&s + &ds * re(ad)));
    }
    let (coupling, dual_value, dual_residual, relative_gap) = best.expect("at least one iterate");
    let converged = best_feasible && relative_gap <= tol;
    RestrictedOutcome { coupling, dual_residual, dual_value, iterations, converged }
}
