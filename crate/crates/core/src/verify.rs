//! Self-verification suite behind `qwass verify`.
//!
//! Eight checks run in a fixed order, each on its own seeded stream so that
//! identical options give identical numbers. A solve that fails to converge
//! counts as a failure of the check that requested it.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::channel::random_channel_with;
use crate::cost::{
    cost_from_observables, pauli_subset_cost, symmetric_cost, symmetric_cost_closed_form, verify_spectrum,
    CostOperator, ObservableSet,
};
use crate::coupling::{channel_cost, channel_coupling, coupling_cost, product_coupling};
use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace_first, partial_trace_second, transpose, vectorize, CMatrix};
use crate::random::{
    ginibre, orthonormal_completion_with, random_density_with, random_pauli_subset_with, random_pure_state_with,
    seeded, SeededRng,
};
use crate::solver::{diameter_value, solve_distance, SolverOptions, TransportProblem};
use crate::state::{canonical_purification, DensityOperator, PureState};
use crate::symmetries::{
    apply_symmetry, conjugate_coupling, dephasing_channel, depolarizing_channel, random_wigner_with,
};

/// Largest `n` for checks that call the distance solver.
pub const MAX_SDP_QUBITS: usize = 3;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    /// Solver tolerance. Distance checks allow `100·tol`, algebraic checks
    /// `tol/100`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_max: 2, samples: 20, seed: 0, tol: 1e-7, max_iterations: 20_000 }
    }
}

impl VerifyOptions {
    fn solver(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iterations: self.max_iterations, ..SolverOptions::default() }
    }

    fn distance_tol(&self) -> f64 {
        100.0 * self.tol
    }

    fn algebra_tol(&self) -> f64 {
        self.tol / 100.0
    }
}

/// How `max_residual` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    Exceeds,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub index: usize,
    pub name: String,
    pub n: usize,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    /// Secondary conditions that failed, in plain words.
    pub failures: Vec<String>,
    pub passed: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: String,
    pub seed: u64,
    pub n_max: usize,
    pub samples: usize,
    pub tol: f64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Accumulates the worst residual and any secondary failures of one check.
struct Tally {
    max_residual: f64,
    samples: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self { max_residual: 0.0, samples: 0, failures: Vec::new() }
    }

    fn record(&mut self, residual: f64) {
        // NaN must not hide behind max
        self.max_residual = if residual.is_nan() { f64::NAN } else { self.max_residual.max(residual) };
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 10 {
            self.failures.push(msg);
        }
    }
}

struct Check<'a> {
    opts: &'a VerifyOptions,
    rng: SeededRng,
}

impl Check<'_> {
    fn distance(
        &mut self,
        t: &mut Tally,
        rho: &DensityOperator,
        omega: &DensityOperator,
        cost: &CostOperator,
    ) -> Result<f64> {
        let problem = TransportProblem::new(rho.clone(), omega.clone(), cost.clone())?;
        let report = solve_distance(&problem, &self.opts.solver())?;
        if !report.converged {
            t.fail(format!(
                "solver did not converge in {} iterations (residual {:.3e}, gap {:.3e})",
                report.iterations, report.primal_residual, report.objective_gap
            ));
        }
        Ok(report.distance)
    }

    fn random_mixed(&mut self, n: usize) -> Result<DensityOperator> {
        let d = 1 << n;
        let rank = self.rng.random_range(1..=d);
        random_density_with(d, rank, &mut self.rng)
    }
}

pub fn run_verification(opts: &VerifyOptions) -> Result<VerificationReport> {
    if opts.n_max == 0 || opts.n_max > MAX_SDP_QUBITS {
        return Err(Error::Resource(format!(
            "verification runs for 1..={MAX_SDP_QUBITS} qubits, requested n_max = {}",
            opts.n_max
        )));
    }
    if opts.samples == 0 {
        return Err(Error::Input("samples must be at least 1".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Input(format!("tolerance must be positive, got {}", opts.tol)));
    }

    type Body = fn(&mut Check, &mut Tally) -> Result<()>;
    type Threshold = fn(&VerifyOptions) -> f64;
    let suite: [(&str, Comparison, Threshold, Body); 8] = [
        ("spectral_resolution", Comparison::AtMost, VerifyOptions::algebra_tol, spectral_resolution),
        ("closed_form_cost", Comparison::AtMost, VerifyOptions::algebra_tol, closed_form_cost),
        ("product_rule_and_purification", Comparison::AtMost, VerifyOptions::algebra_tol, product_rule),
        ("channel_cost_identity", Comparison::AtMost, VerifyOptions::algebra_tol, channel_identity),
        ("diameter", Comparison::AtMost, VerifyOptions::distance_tol, diameter),
        ("pure_state_partners", Comparison::AtMost, VerifyOptions::distance_tol, pure_partners),
        ("wigner_invariance", Comparison::AtMost, |o| 2.0 * o.distance_tol(), wigner_invariance),
        ("negative_control", Comparison::Exceeds, |_| NEGATIVE_CONTROL_SHIFT, negative_control),
    ];

    let mut checks = Vec::with_capacity(suite.len());
    for (i, (name, comparison, tolerance, body)) in suite.into_iter().enumerate() {
        let index = i + 1;
        let started = Instant::now();
        let mut check =
            Check { opts, rng: seeded(opts.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64))) };
        let mut tally = Tally::new();
        body(&mut check, &mut tally)?;
        let tolerance = tolerance(opts);
        let within = match comparison {
            Comparison::AtMost => tally.max_residual <= tolerance,
            Comparison::Exceeds => tally.max_residual > tolerance,
        };
        checks.push(CheckResult {
            index,
            name: name.to_string(),
            n: if name == "negative_control" { 1 } else { opts.n_max },
            samples: tally.samples,
            max_residual: tally.max_residual,
            tolerance,
            comparison,
            passed: within && tally.failures.is_empty(),
            failures: tally.failures,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        schema_version: crate::io::SCHEMA_VERSION.into(),
        seed: opts.seed,
        n_max: opts.n_max,
        samples: opts.samples,
        tol: opts.tol,
        checks,
        passed,
    })
}

fn relative(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// `C_sym,n` has spectrum `{0: 1, 2^{2n+1}: 4^n − 1}` with kernel `vec(I)`.
fn spectral_resolution(c: &mut Check, t: &mut Tally) -> Result<()> {
    for n in 1..=c.opts.n_max {
        let cost = symmetric_cost(n)?;
        let top = (2usize << (2 * n)) as f64;
        let report = verify_spectrum(&cost, &[(0.0, 1), (top, (1 << (2 * n)) - 1)])?;
        t.samples += 1;
        if !report.matches {
            t.fail(format!("n={n}: spectrum clusters {:?}", report.clusters));
        }
        t.record(report.max_eigenvalue_error / top);
        t.record(report.reconstruction_residual / top);
        t.record(1.0 - report.zero_overlap.unwrap_or(0.0));
    }
    Ok(())
}

/// Definitional and closed-form costs agree, full set and random subsets.
fn closed_form_cost(c: &mut Check, t: &mut Tally) -> Result<()> {
    for n in 1..=c.opts.n_max {
        let full = symmetric_cost(n)?;
        t.record(relative(full.matrix(), symmetric_cost_closed_form(n)?.matrix()));
        t.samples += 1;
        for _ in 0..c.opts.samples {
            let subset = random_pauli_subset_with(n, &mut c.rng);
            let definitional = cost_from_observables(&ObservableSet::from_pauli_strings(&subset)?)?;
            t.record(relative(definitional.matrix(), pauli_subset_cost(&subset)?.matrix()));
            t.samples += 1;
        }
    }
    Ok(())
}

/// `(B ⊗ Cᵀ) vec(A) = vec(BAC)`, and the canonical purification has
/// marginals `ρ` and `ρᵀ`, as does the product coupling.
fn product_rule(c: &mut Check, t: &mut Tally) -> Result<()> {
    for n in 1..=c.opts.n_max {
        let d = 1 << n;
        for _ in 0..c.opts.samples {
            let a = ginibre(d, d, &mut c.rng);
            let b = ginibre(d, d, &mut c.rng);
            let cm = ginibre(d, d, &mut c.rng);
            let lhs = kron(&b, &transpose(&cm)) * vectorize(&a)?.into_vector();
            let rhs = vectorize(&(&b * &a * &cm))?.into_vector();
            t.record((&lhs - &rhs).norm() / rhs.norm().max(1.0));

            let rho = c.random_mixed(n)?;
            let omega = c.random_mixed(n)?;
            let psi = canonical_purification(&rho)?;
            let pi = psi.projector();
            t.record(relative(&partial_trace_second(pi.matrix(), d)?, rho.matrix()));
            t.record(relative(&partial_trace_first(pi.matrix(), d)?, &rho.transpose()));
            let product = product_coupling(&rho, &omega)?;
            t.record(product.marginal_residuals(&rho, &omega)?.max());
            t.samples += 1;
        }
    }
    Ok(())
}

/// `tr[Π_Φ C_A]` equals the channel-side formula.
fn channel_identity(c: &mut Check, t: &mut Tally) -> Result<()> {
    for n in 1..=c.opts.n_max {
        let d = 1 << n;
        for _ in 0..c.opts.samples {
            let kraus = c.rng.random_range(1..=d);
            let phi = random_channel_with(d, kraus, &mut c.rng)?;
            let rho = c.random_mixed(n)?;
            let obs = ObservableSet::from_pauli_strings(&random_pauli_subset_with(n, &mut c.rng))?;
            let via_coupling = coupling_cost(&channel_coupling(&phi, &rho)?, &cost_from_observables(&obs)?)?;
            let via_channel = channel_cost(&phi, &rho, &obs)?;
            t.record((via_coupling - via_channel).abs() / via_channel.abs().max(1.0));
            t.samples += 1;
        }
    }
    Ok(())
}

/// Orthogonal pure pairs sit at the diameter; random mixed pairs never
/// exceed it, and reach it only when nearly orthogonal.
fn diameter(c: &mut Check, t: &mut Tally) -> Result<()> {
    let tol = c.opts.distance_tol();
    for n in 1..=c.opts.n_max {
        let cost = symmetric_cost_closed_form(n)?;
        let diam = diameter_value(n);
        for _ in 0..c.opts.samples {
            let psi = random_pure_state_with(n, &mut c.rng);
            let basis = orthonormal_completion_with(&psi, &mut c.rng);
            let dist = c.distance(t, &basis[0].projector(), &basis[1].projector(), &cost)?;
            t.record((dist - diam).abs());

            let rho = c.random_mixed(n)?;
            let omega = c.random_mixed(n)?;
            let dist = c.distance(t, &rho, &omega, &cost)?;
            t.record((dist - diam).max(0.0));
            let overlap = rho.overlap(&omega)?;
            if (dist - diam).abs() <= tol && overlap > 1e-4 {
                t.fail(format!("n={n}: distance {dist:.9} at the diameter with tr[ρω] = {overlap:.3e}"));
            }
            t.samples += 2;
        }
    }
    Ok(())
}

/// Every pair from an orthonormal basis is at the diameter; full-rank
/// states stay strictly inside.
fn pure_partners(c: &mut Check, t: &mut Tally) -> Result<()> {
    for n in 1..=c.opts.n_max {
        let cost = symmetric_cost_closed_form(n)?;
        let diam = diameter_value(n);
        let d = 1 << n;
        for _ in 0..c.opts.samples {
            let psi = random_pure_state_with(n, &mut c.rng);
            let family: Vec<DensityOperator> =
                orthonormal_completion_with(&psi, &mut c.rng).iter().map(PureState::projector).collect();
            for i in 0..family.len() {
                for j in i + 1..family.len() {
                    let dist = c.distance(t, &family[i], &family[j], &cost)?;
                    t.record((dist - diam).abs());
                    t.samples += 1;
                }
            }
            let full_rank = random_density_with(d, d, &mut c.rng)?;
            for other in family.iter().chain(std::iter::once(&c.random_mixed(n)?)) {
                let dist = c.distance(t, &full_rank, other, &cost)?;
                if dist >= diam - 1e-3 {
                    t.fail(format!("n={n}: full-rank state at distance {dist:.9} ≥ diameter − 1e-3"));
                }
                t.samples += 1;
            }
        }
    }
    Ok(())
}

/// `D(WρW*, WωW*) = D(ρ, ω)`, with coupling covariance and preserved
/// transition probabilities as side conditions.
fn wigner_invariance(c: &mut Check, t: &mut Tally) -> Result<()> {
    let algebra_tol = c.opts.algebra_tol();
    for n in 1..=c.opts.n_max {
        let d = 1 << n;
        let cost = symmetric_cost_closed_form(n)?;
        for _ in 0..c.opts.samples {
            let rho = c.random_mixed(n)?;
            let omega = c.random_mixed(n)?;
            let w = random_wigner_with(d, &mut c.rng)?;
            let (rho_w, omega_w) = (apply_symmetry(&w, &rho)?, apply_symmetry(&w, &omega)?);
            let before = c.distance(t, &rho, &omega, &cost)?;
            let after = c.distance(t, &rho_w, &omega_w, &cost)?;
            t.record((after - before).abs());

            let pi = product_coupling(&rho, &omega)?;
            let moved = conjugate_coupling(&w, &pi)?;
            let covariance = moved.marginal_residuals(&rho_w, &omega_w)?.max();
            let cost_shift = (coupling_cost(&moved, &cost)? - coupling_cost(&pi, &cost)?).abs() / cost.matrix().norm();
            if covariance > algebra_tol || cost_shift > algebra_tol {
                t.fail(format!("n={n}: coupling covariance residual {covariance:.3e}, cost shift {cost_shift:.3e}"));
            }

            let (a, b) =
                (random_pure_state_with(n, &mut c.rng).projector(), random_pure_state_with(n, &mut c.rng).projector());
            let shift = (apply_symmetry(&w, &a)?.overlap(&apply_symmetry(&w, &b)?)? - a.overlap(&b)?).abs();
            if shift > algebra_tol {
                t.fail(format!("n={n}: transition probability moved by {shift:.3e}"));
            }
            t.samples += 1;
        }
    }
    Ok(())
}

/// Distance change a non-isometric channel must produce on some pair.
pub const NEGATIVE_CONTROL_SHIFT: f64 = 1e-2;

/// Depolarizing at `p = 1/2` moves some orthogonal pure pair at `n = 1`; so
/// does computational-basis dephasing.
fn negative_control(c: &mut Check, t: &mut Tally) -> Result<()> {
    let cost = symmetric_cost_closed_form(1)?;
    let depolarizing = depolarizing_channel(2, 0.5)?;
    let dephasing = dephasing_channel(2)?;
    let mut dephasing_shift = 0.0f64;
    for _ in 0..c.opts.samples {
        let psi = random_pure_state_with(1, &mut c.rng);
        let basis = orthonormal_completion_with(&psi, &mut c.rng);
        let (rho, omega) = (basis[0].projector(), basis[1].projector());
        let before = c.distance(t, &rho, &omega, &cost)?;
        let map = |phi: &crate::channel::QuantumChannel, s: &DensityOperator| -> Result<DensityOperator> {
            DensityOperator::new(phi.apply(s.matrix())?)
        };
        let after = c.distance(t, &map(&depolarizing, &rho)?, &map(&depolarizing, &omega)?, &cost)?;
        t.record((after - before).abs());
        let dephased = c.distance(t, &map(&dephasing, &rho)?, &map(&dephasing, &omega)?, &cost)?;
        dephasing_shift = dephasing_shift.max((dephased - before).abs());
        t.samples += 1;
    }
    if dephasing_shift <= NEGATIVE_CONTROL_SHIFT {
        t.fail(format!("dephasing moved no pair by more than {NEGATIVE_CONTROL_SHIFT} (max {dephasing_shift:.3e})"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let opts = VerifyOptions { n_max: 1, samples: 3, seed: 9, ..VerifyOptions::default() };
        let a = run_verification(&opts).unwrap();
        for c in &a.checks {
            assert!(c.passed, "{c:?}");
        }
        let b = run_verification(&opts).unwrap();
        let numbers = |r: &VerificationReport| r.checks.iter().map(|c| (c.max_residual, c.samples)).collect::<Vec<_>>();
        assert_eq!(numbers(&a), numbers(&b));
        assert_eq!(a.checks.len(), 8);
    }

    #[test]
    fn unreachable_tolerance_fails() {
        let opts =
            VerifyOptions { n_max: 1, samples: 2, tol: 1e-15, max_iterations: 2_000, ..VerifyOptions::default() };
        let report = run_verification(&opts).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn guards() {
        assert!(run_verification(&VerifyOptions { n_max: 4, ..VerifyOptions::default() }).is_err());
        assert!(run_verification(&VerifyOptions { samples: 0, ..VerifyOptions::default() }).is_err());
    }
}
