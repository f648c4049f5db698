use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qwass::cost::{
    cost_from_observables, pauli_subset_cost, pauli_subset_eigenvalue, symmetric_cost, symmetric_cost_closed_form,
    verify_spectrum, CostOperator,
};
use qwass::io::{
    read_observables, read_pauli_subset, read_state, solve_report_json, to_json_string, write_text, CostFile,
};
use qwass::verify::{run_verification, Comparison, VerificationReport, VerifyOptions};
use qwass::{solve_distance, Error, PauliString, SolveReport, SolverOptions, TransportProblem};

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

/// Quadratic Wasserstein distances between qubit states.
#[derive(Parser)]
#[command(name = "qwass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two states read from JSON files.
    Distance(DistanceArgs),
    /// Build a Pauli cost operator and summarize its spectrum.
    Cost(CostArgs),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Seed for randomized steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("cost_spec").multiple(false))]
struct DistanceArgs {
    state_a: PathBuf,
    state_b: PathBuf,
    /// Use the symmetric cost over all Pauli strings (default).
    #[arg(long, group = "cost_spec")]
    sym: bool,
    /// Pauli subset file.
    #[arg(long, group = "cost_spec", value_name = "FILE")]
    pauli_subset: Option<PathBuf>,
    /// Observables file.
    #[arg(long, group = "cost_spec", value_name = "FILE")]
    observables: Option<PathBuf>,
    #[arg(long, default_value_t = SolverOptions::default().max_iterations)]
    max_iterations: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CostArgs {
    /// Number of qubits.
    #[arg(long)]
    n: usize,
    /// Comma-separated Pauli strings; all 4^n strings when absent.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<String>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = VerifyOptions::default().n_max)]
    n_max: usize,
    #[arg(long, default_value_t = VerifyOptions::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = VerifyOptions::default().max_iterations)]
    max_iterations: usize,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Input(Error),
    NotConverged,
    VerifyFailed(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Distance(args) => distance(args),
        Command::Cost(args) => cost(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::NotConverged) => {
            eprintln!("error: solver did not converge");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::VerifyFailed(names)) => {
            eprintln!("verification failed: {}", names.join(", "));
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}

fn emit(common: &Common, text: String) -> Result<(), Error> {
    match &common.out {
        Some(path) => write_text(path, &text),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn distance(args: DistanceArgs) -> Result<(), Failure> {
    let rho = read_state(&args.state_a)?;
    let omega = read_state(&args.state_b)?;
    let cost = if let Some(path) = &args.pauli_subset {
        pauli_subset_cost(&read_pauli_subset(path)?)?
    } else if let Some(path) = &args.observables {
        cost_from_observables(&read_observables(path)?)?
    } else {
        symmetric_cost_closed_form(rho.num_qubits())?
    };
    let problem = TransportProblem::new(rho, omega, cost)?;
    let opts = SolverOptions { tol: args.common.tol, max_iterations: args.max_iterations, ..SolverOptions::default() };
    let report = solve_distance(&problem, &opts)?;
    let text = match args.common.format {
        Format::Json => to_json_string(&solve_report_json(&report))?,
        Format::Text => distance_text(&report),
    };
    emit(&args.common, text)?;
    if report.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn distance_text(r: &SolveReport) -> String {
    let mut s = format!("distance         {:.12}\nsquared distance {:.12}\n", r.distance, r.optimal_value);
    s += &format!("converged        {} ({} iterations)\n", r.converged, r.iterations);
    s += &format!("primal residual  {:.3e}\ndual residual    {:.3e}\n", r.primal_residual, r.dual_residual);
    s += &format!("objective gap    {:.3e}\nlower bound      {:.12}\n", r.objective_gap, r.lower_bound);
    if let Some(b) = r.analytic_lower_bound {
        s += &format!("analytic bound   {b:.12}\n");
    }
    s
}

fn cost(args: CostArgs) -> Result<(), Failure> {
    let n = args.n;
    let (op, strings): (CostOperator, Vec<PauliString>) = match &args.subset {
        Some(labels) => {
            let strings = labels.iter().map(|s| s.trim().parse()).collect::<Result<Vec<PauliString>, _>>()?;
            if let Some(bad) = strings.iter().find(|s| s.num_qubits() != n) {
                return Err(Error::Input(format!("Pauli string {bad} does not act on {n} qubits")).into());
            }
            (pauli_subset_cost(&strings)?, strings)
        }
        None => (symmetric_cost(n)?, PauliString::all(n).collect()),
    };

    // Pauli strings diagonalize every Pauli cost; tally their eigenvalues
    let mut expected: Vec<(f64, usize)> = Vec::new();
    for target in PauliString::all(n) {
        let value = pauli_subset_eigenvalue(&strings, &target)?;
        match expected.iter_mut().find(|(v, _)| *v == value) {
            Some((_, m)) => *m += 1,
            None => expected.push((value, 1)),
        }
    }
    let spectrum = verify_spectrum(&op, &expected)?;
    if !spectrum.matches {
        return Err(Error::Diagnostic(format!(
            "cost spectrum {:?} differs from the Pauli prediction {expected:?}",
            spectrum.clusters
        ))
        .into());
    }
    let full = symmetric_cost_closed_form(n)?;
    let commutator = (op.matrix() * full.matrix() - full.matrix() * op.matrix()).norm();
    let file = CostFile::new(&op, &spectrum, commutator)?;

    let text = match args.common.format {
        Format::Json => to_json_string(&file)?,
        Format::Text => {
            let mut s =
                format!("cost operator on {n} qubits ({}), dimension {}\n", file.provenance, op.dim() * op.dim());
            s += "eigenvalue        multiplicity\n";
            for e in &file.spectrum {
                s += &format!("{:<17.10} {}\n", e.eigenvalue, e.multiplicity);
            }
            s += &format!("min eigenvalue    {:.3e}\n", file.min_eigenvalue);
            s += &format!("‖[C, C_sym]‖      {commutator:.3e}\n");
            s
        }
    };
    emit(&args.common, text)?;
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let opts = VerifyOptions {
        n_max: args.n_max,
        samples: args.samples,
        seed: args.common.seed,
        tol: args.common.tol,
        max_iterations: args.max_iterations,
    };
    let report = run_verification(&opts)?;
    let text = match args.common.format {
        Format::Json => to_json_string(&report)?,
        Format::Text => verify_text(&report),
    };
    emit(&args.common, text)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::VerifyFailed(report.failed_checks().map(|c| c.name.clone()).collect()))
    }
}

fn verify_text(r: &VerificationReport) -> String {
    let mut s = format!("seed {} n_max {} samples {} tol {:e}\n", r.seed, r.n_max, r.samples, r.tol);
    for c in &r.checks {
        let op = match c.comparison {
            Comparison::AtMost => "<=",
            Comparison::Exceeds => ">",
        };
        s += &format!(
            "[{}] {} {:<30} residual {:.3e} {op} {:.1e}  samples {:<5} {:.2}s\n",
            c.index,
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_residual,
            c.tolerance,
            c.samples,
            c.wall_time_s
        );
        for f in &c.failures {
            s += &format!("      {f}\n");
        }
    }
    s += if r.passed { "all checks passed\n" } else { "verification FAILED\n" };
    s
}
