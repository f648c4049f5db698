//! Timing and iteration counts of the distance solver on random mixed pairs.
//!
//! `cargo run --release --example solver_bench -- [n] [pairs]`

use std::time::Instant;

use qwass::random::{random_density_with, seeded};
use qwass::{solve_distance, symmetric_cost_closed_form, SolverOptions, TransportProblem};
use rand::Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let pairs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let d = 1 << n;
    let cost = symmetric_cost_closed_form(n).unwrap();
    let mut rng = seeded(2024);
    let opts = SolverOptions::default();
    let start = Instant::now();
    let mut worst_iterations = 0;
    let mut total_iterations = 0;
    for _ in 0..pairs {
        let rho = random_density_with(d, rng.random_range(1..=d), &mut rng).unwrap();
        let omega = random_density_with(d, rng.random_range(1..=d), &mut rng).unwrap();
        let problem = TransportProblem::new(rho, omega, cost.clone()).unwrap();
        let report = solve_distance(&problem, &opts).unwrap();
        worst_iterations = worst_iterations.max(report.iterations);
        total_iterations += report.iterations;
        println!(
            "D = {:.9}  iters = {:6}  converged = {}  primal = {:.1e}  gap = {:.1e}  bound = {:.9}",
            report.distance,
            report.iterations,
            report.converged,
            report.primal_residual,
            report.objective_gap,
            report.lower_bound.sqrt()
        );
    }
    println!(
        "n = {n}: {pairs} pairs in {:.2?}, mean {} / worst {} iterations",
        start.elapsed(),
        total_iterations / pairs.max(1),
        worst_iterations
    );
}
