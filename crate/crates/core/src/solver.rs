//! The coupling semidefinite program
//!
//! ```text
//!   minimize tr[ΠC]  subject to  Π ⪰ 0,  tr₂Π = ω,  tr₁Π = ρᵀ
//! ```
//!
//! solved either by a primal-dual interior-point method (the default) or by
//! Douglas–Rachford splitting between the affine marginal constraints (with
//! the linear objective folded into its proximal step) and the PSD cone.
//!
//! Before iterating, the problem is restricted to `supp(ω) ⊗ supp(ρᵀ)`, which
//! contains the support of every coupling. On that face the product coupling
//! is strictly positive definite, so the restricted problem is strictly
//! feasible, and a pure endpoint collapses it to a single point.

mod interior;

use serde::Serialize;

use crate::cost::{symmetric_cost_closed_form, CostOperator};
use crate::coupling::{coupling_cost, product_coupling, Coupling, CouplingSource};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{
    eigh, hermitian_part, kron, partial_trace_first_rect, partial_trace_second_rect, project_psd, psd_sqrt, re,
    trace_product, CMatrix,
};
use crate::state::DensityOperator;

/// Purity tolerance for [`pure_endpoint_distance`].
pub const TOL_PURE: f64 = 1e-9;

/// Algorithm for the restricted semidefinite program.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Predictor-corrector path following; typically converges in a few
    /// dozen iterations.
    #[default]
    InteriorPoint,
    /// First-order splitting with an adaptive step; cheap iterations but
    /// slow on degenerate instances.
    DouglasRachford,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Stopping tolerance for residuals and the relative duality gap.
    pub tol: f64,
    pub max_iterations: usize,
    /// Eigenvalues of the endpoints at or below `support_tol·λ_max` are
    /// treated as zero when restricting to their supports.
    pub support_tol: f64,
    /// Resource guard on the single-system dimension `d`.
    pub max_dim: usize,
    /// Residuals are evaluated every `check_interval` iterations.
    pub check_interval: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::default(),
            tol: 1e-7,
            max_iterations: 200_000,
            support_tol: 1e-12,
            max_dim: 16,
            check_interval: 10,
        }
    }
}

/// Endpoints and cost of one transport problem.
#[derive(Clone, Debug)]
pub struct TransportProblem {
    pub rho: DensityOperator,
    pub omega: DensityOperator,
    pub cost: CostOperator,
}

impl TransportProblem {
    pub fn new(rho: DensityOperator, omega: DensityOperator, cost: CostOperator) -> Result<Self> {
        ensure_dim("state dimension", rho.dim(), omega.dim())?;
        ensure_dim("cost dimension", rho.dim(), cost.dim())?;
        Ok(Self { rho, omega, cost })
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Minimal transport cost `D²`, clamped at zero.
    pub optimal_value: f64,
    /// `√optimal_value`.
    pub distance: f64,
    pub coupling: Coupling,
    /// Largest marginal residual of the returned coupling.
    pub primal_residual: f64,
    /// Distance of the dual slack from dual feasibility.
    pub dual_residual: f64,
    /// `|primal − dual|` objective gap.
    pub objective_gap: f64,
    /// Certified lower bound on `D²` from the final dual iterate.
    pub lower_bound: f64,
    /// `2^{2n+1} − 2^{n+1}·min((tr√ρ)², (tr√ω)²)` when the cost is the
    /// symmetric Pauli cost.
    pub analytic_lower_bound: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    optimal_value: f64,
    distance: f64,
    primal_residual: f64,
    dual_residual: f64,
    objective_gap: f64,
    lower_bound: f64,
    analytic_lower_bound: Option<f64>,
    iterations: usize,
    converged: bool,
    coupling_source: &'a CouplingSource,
}

impl SolveReport {
    pub(crate) fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(SolveSummary {
            optimal_value: self.optimal_value,
            distance: self.distance,
            primal_residual: self.primal_residual,
            dual_residual: self.dual_residual,
            objective_gap: self.objective_gap,
            lower_bound: self.lower_bound,
            analytic_lower_bound: self.analytic_lower_bound,
            iterations: self.iterations,
            converged: self.converged,
            coupling_source: &self.coupling.source(),
        })
        .expect("plain numeric struct")
    }
}

/// Orthonormal basis of the numerical support and the matching eigenvalues.
fn support(m: &CMatrix, rel_tol: f64) -> (CMatrix, Vec<f64>) {
    let spectrum = eigh(m);
    let cutoff = rel_tol * spectrum.max().max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..spectrum.eigenvalues.len()).filter(|&i| spectrum.eigenvalues[i] > cutoff).collect();
    let basis = CMatrix::from_fn(m.nrows(), keep.len(), |r, c| spectrum.eigenvectors[(r, keep[c])]);
    let weights = keep.iter().map(|&i| spectrum.eigenvalues[i]).collect();
    (basis, weights)
}

fn normalized_diag(weights: &[f64]) -> CMatrix {
    let total: f64 = weights.iter().sum();
    let v = nalgebra::DVector::from_iterator(weights.len(), weights.iter().map(|&w| re(w / total)));
    CMatrix::from_diagonal(&v)
}

/// Marginal constraints `tr₂X = m1`, `tr₁X = m2` on `C^{d1} ⊗ C^{d2}`.
struct Marginals {
    d1: usize,
    d2: usize,
    m1: CMatrix,
    m2: CMatrix,
}

impl Marginals {
    /// Adds `Y ⊗ I + I ⊗ Z` into `x` scaled by `sign`.
    fn add_adjoint(&self, x: &mut CMatrix, y: &CMatrix, z: &CMatrix, sign: f64) {
        let (d1, d2) = (self.d1, self.d2);
        for a in 0..d1 {
            for c in 0..d1 {
                let yac = y[(a, c)] * sign;
                for b in 0..d2 {
                    x[(a * d2 + b, c * d2 + b)] += yac;
                }
            }
        }
        for a in 0..d1 {
            for b in 0..d2 {
                for e in 0..d2 {
                    x[(a * d2 + b, a * d2 + e)] += z[(b, e)] * sign;
                }
            }
        }
    }

    /// `(AA*)⁺` applied to a residual pair of equal trace.
    fn solve_normal(&self, r1: &CMatrix, r2: &CMatrix) -> (CMatrix, CMatrix) {
        let (d1, d2) = (self.d1 as f64, self.d2 as f64);
        let y = r1 / re(d2);
        let shift = r1.trace() / re(d2);
        let mut z = r2.clone();
        for i in 0..self.d2 {
            z[(i, i)] -= shift;
        }
        (y, z / re(d1))
    }

    fn residual(&self, x: &CMatrix) -> (CMatrix, CMatrix) {
        (
            partial_trace_second_rect(x, self.d1, self.d2) - &self.m1,
            partial_trace_first_rect(x, self.d1, self.d2) - &self.m2,
        )
    }

    /// Orthogonal projection onto the affine set of Hermitian matrices with
    /// the prescribed marginals.
    fn project_affine(&self, v: &CMatrix) -> CMatrix {
        let (r1, r2) = self.residual(v);
        let (y, z) = self.solve_normal(&r1, &r2);
        let mut x = v.clone();
        self.add_adjoint(&mut x, &y, &z, -1.0);
        x
    }

    /// Orthogonal projection onto the range of the adjoint marginal map.
    fn project_range(&self, m: &CMatrix) -> CMatrix {
        let r1 = partial_trace_second_rect(m, self.d1, self.d2);
        let r2 = partial_trace_first_rect(m, self.d1, self.d2);
        let (y, z) = self.solve_normal(&r1, &r2);
        let mut x = CMatrix::zeros(m.nrows(), m.ncols());
        self.add_adjoint(&mut x, &y, &z, 1.0);
        x
    }

    fn residual_norm(&self, x: &CMatrix) -> f64 {
        let (r1, r2) = self.residual(x);
        r1.norm().max(r2.norm())
    }
}

fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

struct RestrictedOutcome {
    coupling: CMatrix,
    dual_residual: f64,
    dual_value: f64,
    iterations: usize,
    converged: bool,
}

/// Iteration cap for the interior-point method, which either converges in
/// far fewer steps or stalls.
const MAX_INTERIOR_ITERATIONS: usize = 500;

const INITIAL_STEP: f64 = 10.0;
const BALANCE_RATIO: f64 = 5.0;
const REBALANCE_CHECKS: usize = 5;

/// Douglas–Rachford on the restricted problem. All quantities are in units
/// where the restricted cost has unit Frobenius norm.
fn douglas_rachford(cost: &CMatrix, marg: &Marginals, opts: &SolverOptions) -> RestrictedOutcome {
    let start = kron(&marg.m1, &marg.m2);
    let dim = start.nrows();
    let mut step = INITIAL_STEP / (dim as f64);
    let mut z = start.clone();
    let mut y = start.clone();
    let mut y_prev = start.clone();
    let mut dual_residual = f64::INFINITY;
    let mut dual_value = f64::NEG_INFINITY;
    let check = opts.check_interval.max(1);

    for k in 1..=opts.max_iterations {
        let x = marg.project_affine(&(&z - cost * re(step)));
        let reflected = &x * re(2.0) - &z;
        std::mem::swap(&mut y, &mut y_prev);
        y = project_psd(&reflected);
        z += &y - &x;

        if k % check != 0 && k != opts.max_iterations {
            continue;
        }
        // dual slack S = (z − x)/step ⪰ 0 and C − S ≈ A*(multipliers)
        let slack = (&z - &x) / re(step);
        let remainder = cost - &slack;
        let in_range = marg.project_range(&remainder);
        dual_residual = (&remainder - &in_range).norm();
        dual_value = real_inner(&start, &in_range);
        let primal_value = real_inner(cost, &y);

        let splitting_gap = (&y - &x).norm();
        let primal_residual = marg.residual_norm(&y).max(splitting_gap);
        let gap = (primal_value - dual_value).abs();
        let scale = primal_value.abs().max(dual_value.abs()).max(1e-3);
        if primal_residual <= opts.tol && dual_residual <= opts.tol && gap <= opts.tol * scale {
            return RestrictedOutcome { coupling: y, dual_residual, dual_value, iterations: k, converged: true };
        }

        // balance primal and dual progress by rescaling the step; z is moved
        // so that the current (y, S) pair is preserved
        if k % (check * REBALANCE_CHECKS) == 0 {
            let primal = splitting_gap / y.norm().max(1e-12);
            let dual = (&y - &y_prev).norm() / step / slack.norm().max(1.0);
            let factor = if primal > BALANCE_RATIO * dual {
                0.5
            } else if dual > BALANCE_RATIO * primal {
                2.0
            } else {
                1.0
            };
            if factor != 1.0 {
                z = &y + (&z - &y) * re(factor);
                step *= factor;
            }
        }
    }
    RestrictedOutcome { coupling: y, dual_residual, dual_value, iterations: opts.max_iterations, converged: false }
}

fn symmetric_lower_bound(problem: &TransportProblem) -> Result<Option<f64>> {
    let Some(n) = problem.cost.num_qubits() else { return Ok(None) };
    let reference = symmetric_cost_closed_form(n)?;
    let c = problem.cost.matrix();
    if (c - reference.matrix()).norm() > 1e-10 * c.norm().max(1.0) {
        return Ok(None);
    }
    let root_trace = |s: &DensityOperator| -> Result<f64> { Ok(psd_sqrt(s.matrix())?.trace().re) };
    let overlap = root_trace(&problem.rho)?.powi(2).min(root_trace(&problem.omega)?.powi(2));
    let d = problem.rho.dim() as f64;
    Ok(Some((2.0 * d * d - 2.0 * d * overlap).max(0.0)))
}

/// Squared quantum Wasserstein distance `D²(ρ, ω)` and an optimal coupling.
///
/// Non-convergence is reported through `converged = false`, not as an error.
pub fn solve_distance(problem: &TransportProblem, opts: &SolverOptions) -> Result<SolveReport> {
    let d = problem.rho.dim();
    if d > opts.max_dim {
        return Err(Error::Resource(format!("distance solver limited to dimension {}, requested {d}", opts.max_dim)));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Input(format!("solver tolerance must be positive, got {}", opts.tol)));
    }

    let (qa, wa) = support(problem.omega.matrix(), opts.support_tol);
    let (qb, wb) = support(&problem.rho.transpose(), opts.support_tol);
    let lift = kron(&qa, &qb);
    let full_cost = problem.cost.matrix();
    let reduced = hermitian_part(&(lift.adjoint() * full_cost * &lift));
    let marg = Marginals { d1: wa.len(), d2: wb.len(), m1: normalized_diag(&wa), m2: normalized_diag(&wb) };

    let cost_norm = reduced.norm();
    let outcome = if cost_norm == 0.0 || marg.d1 == 1 || marg.d2 == 1 {
        // a single feasible point, or a constant objective
        let start = kron(&marg.m1, &marg.m2);
        let value = if cost_norm == 0.0 { 0.0 } else { real_inner(&reduced, &start) / cost_norm };
        RestrictedOutcome { coupling: start, dual_residual: 0.0, dual_value: value, iterations: 0, converged: true }
    } else {
        let unit_cost = &reduced / re(cost_norm);
        match opts.method {
            SolverMethod::InteriorPoint => {
                interior::interior_point(&unit_cost, &marg, opts.tol, opts.max_iterations.min(MAX_INTERIOR_ITERATIONS))
            }
            SolverMethod::DouglasRachford => douglas_rachford(&unit_cost, &marg, opts),
        }
    };

    let pi = hermitian_part(&(&lift * &outcome.coupling * lift.adjoint()));
    let coupling = Coupling::unchecked(pi, d, CouplingSource::SdpOptimal)?;
    let primal_residual = coupling.marginal_residuals(&problem.rho, &problem.omega)?.max();
    let value = coupling_cost(&coupling, &problem.cost)?;
    let optimal_value = value.max(0.0);
    let dual_value = outcome.dual_value * cost_norm;
    let dual_residual = outcome.dual_residual * cost_norm;

    Ok(SolveReport {
        optimal_value,
        distance: optimal_value.sqrt(),
        primal_residual,
        dual_residual,
        objective_gap: (value - dual_value).abs(),
        lower_bound: (dual_value - dual_residual).max(0.0),
        analytic_lower_bound: symmetric_lower_bound(problem)?,
        iterations: outcome.iterations,
        converged: outcome.converged && primal_residual <= opts.tol.max(1e-12) * 10.0,
        coupling,
    })
}

/// Squared distance when `ρ` or `ω` is pure: the coupling set is the single
/// point `ω ⊗ ρᵀ`, so `D² = tr[(ω ⊗ ρᵀ) C]`.
pub fn pure_endpoint_distance(rho: &DensityOperator, omega: &DensityOperator, cost: &CostOperator) -> Result<f64> {
    if !rho.is_pure(TOL_PURE) && !omega.is_pure(TOL_PURE) {
        return Err(Error::Precondition(format!(
            "neither endpoint is pure (purities {:.6}, {:.6})",
            rho.purity(),
            omega.purity()
        )));
    }
    let value = coupling_cost(&product_coupling(rho, omega)?, cost)?;
    Ok(value.max(0.0))
}

/// Diameter `2^{n+1/2}` of the `n`-qubit state space under the symmetric cost.
pub fn diameter_value(n: usize) -> f64 {
    2f64.powf(n as f64 + 0.5)
}

/// `tr[A B]` real part, exposed for tests and reports.
pub fn trace_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    trace_product(a, b).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::symmetric_cost_closed_form;
    use crate::random::{random_density, random_pure_state};

    fn solve(rho: &DensityOperator, omega: &DensityOperator, n: usize) -> SolveReport {
        let cost = symmetric_cost_closed_form(n).unwrap();
        let p = TransportProblem::new(rho.clone(), omega.clone(), cost).unwrap();
        solve_distance(&p, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn equal_basis_states() {
        let zero = DensityOperator::basis(1, 0).unwrap();
        let r = solve(&zero, &zero, 1);
        assert!(r.converged);
        assert!((r.distance - 2.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_basis_states_reach_diameter() {
        let r = solve(&DensityOperator::basis(1, 0).unwrap(), &DensityOperator::basis(1, 1).unwrap(), 1);
        assert!((r.distance - 8f64.sqrt()).abs() < 1e-9);
        assert!((diameter_value(1) - 8f64.sqrt()).abs() < 1e-15);
        assert!((diameter_value(2) - 4.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((diameter_value(3) - 8.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_self_distance_vanishes() {
        let mixed = DensityOperator::maximally_mixed(1);
        let r = solve(&mixed, &mixed, 1);
        assert!(r.converged, "{} iterations", r.iterations);
        assert!(r.distance < 1e-5, "{}", r.distance);
    }

    #[test]
    fn mixed_self_distance_matches_purification_bound() {
        for seed in 0..5 {
            let rho = random_density(4, 4, seed).unwrap();
            let r = solve(&rho, &rho, 2);
            assert!(r.converged);
            let root_trace = psd_sqrt(rho.matrix()).unwrap().trace().re;
            let exact = 32.0 - 8.0 * root_trace * root_trace;
            assert!((r.optimal_value - exact).abs() < 1e-5, "{} vs {exact}", r.optimal_value);
        }
    }

    #[test]
    fn pure_endpoint_formula() {
        let psi = random_pure_state(2, 1).projector();
        let phi = random_pure_state(2, 2).projector();
        let c = symmetric_cost_closed_form(2).unwrap();
        let v = pure_endpoint_distance(&psi, &phi, &c).unwrap();
        assert!((v - (32.0 - 8.0 * psi.overlap(&phi).unwrap())).abs() < 1e-12);
        assert!((pure_endpoint_distance(&psi, &psi, &c).unwrap() - 24.0).abs() < 1e-12);
        let mixed = random_density(4, 3, 3).unwrap();
        assert!(matches!(pure_endpoint_distance(&mixed, &mixed, &c), Err(Error::Precondition(_))));
        let sdp = solve(&psi, &mixed, 2);
        let closed = pure_endpoint_distance(&psi, &mixed, &c).unwrap();
        assert!((sdp.optimal_value - closed).abs() < 1e-6);
    }

    #[test]
    fn methods_agree() {
        let c = symmetric_cost_closed_form(2).unwrap();
        for seed in 0..3 {
            let p = TransportProblem::new(
                random_density(4, 3, seed).unwrap(),
                random_density(4, 2, seed + 10).unwrap(),
                c.clone(),
            )
            .unwrap();
            let ipm = solve_distance(&p, &SolverOptions::default()).unwrap();
            let dr = solve_distance(
                &p,
                &SolverOptions { method: SolverMethod::DouglasRachford, ..SolverOptions::default() },
            )
            .unwrap();
            assert!(ipm.converged && dr.converged);
            assert!(ipm.iterations < 100, "{}", ipm.iterations);
            assert!((ipm.distance - dr.distance).abs() < 1e-5, "{} vs {}", ipm.distance, dr.distance);
        }
    }

    #[test]
    fn guards() {
        let c = symmetric_cost_closed_form(5).unwrap();
        let s = DensityOperator::maximally_mixed(5);
        let p = TransportProblem::new(s.clone(), s, c).unwrap();
        assert!(matches!(solve_distance(&p, &SolverOptions::default()), Err(Error::Resource(_))));
        let c1 = symmetric_cost_closed_form(1).unwrap();
        assert!(TransportProblem::new(DensityOperator::maximally_mixed(2), DensityOperator::maximally_mixed(1), c1)
            .is_err());
    }
}
