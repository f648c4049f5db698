//! Browser bindings for three small experiments on qubit transport
//! distances. The computations live in plain functions returning
//! `qwass::Result` so they run natively; the `#[wasm_bindgen]` wrappers only
//! serialize results and convert errors.

use num_complex::Complex64;
use qwass::cost::pauli_subset_eigenvalue;
use qwass::{
    depolarizing_channel, solve_distance, symmetric_cost_closed_form, CMatrix, DensityOperator, Error, PauliString,
    Result, SolverOptions, TransportProblem,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest qubit count offered by the spectrum view. Tallying is `O(16^n)`.
pub const MAX_SPECTRUM_QUBITS: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct DistanceResult {
    pub distance: f64,
    pub squared: f64,
    pub lower_bound: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLine {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub p: f64,
    pub distance: f64,
}

/// `(I + r·σ)/2`; requires `|r| ≤ 1`.
pub fn bloch_state(r: [f64; 3]) -> Result<DensityOperator> {
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > 1.0 + 1e-12 {
        return Err(Error::Input(format!("Bloch vector length {norm} exceeds 1")));
    }
    let c = Complex64::new;
    let [x, y, z] = r;
    DensityOperator::new(CMatrix::from_row_slice(
        2,
        2,
        &[c((1.0 + z) / 2.0, 0.0), c(x / 2.0, -y / 2.0), c(x / 2.0, y / 2.0), c((1.0 - z) / 2.0, 0.0)],
    ))
}

fn distance_between(rho: DensityOperator, omega: DensityOperator) -> Result<DistanceResult> {
    let cost = symmetric_cost_closed_form(rho.num_qubits())?;
    let r = solve_distance(&TransportProblem::new(rho, omega, cost)?, &SolverOptions::default())?;
    Ok(DistanceResult {
        distance: r.distance,
        squared: r.optimal_value,
        lower_bound: r.lower_bound,
        converged: r.converged,
        iterations: r.iterations,
    })
}

/// Symmetric-cost distance between two single-qubit states.
pub fn qubit_distance(a: [f64; 3], b: [f64; 3]) -> Result<DistanceResult> {
    distance_between(bloch_state(a)?, bloch_state(b)?)
}

/// Eigenvalues of the cost built from `subset` (all strings when empty),
/// with multiplicities, in increasing order.
pub fn cost_spectrum(n: usize, subset: &[PauliString]) -> Result<Vec<SpectrumLine>> {
    if n == 0 || n > MAX_SPECTRUM_QUBITS {
        return Err(Error::Input(format!("qubit count {n} outside 1..={MAX_SPECTRUM_QUBITS}")));
    }
    let all: Vec<PauliString> = PauliString::all(n).collect();
    let strings = if subset.is_empty() { &all[..] } else { subset };
    let mut lines: Vec<SpectrumLine> = Vec::new();
    for target in &all {
        let eigenvalue = pauli_subset_eigenvalue(strings, target)?;
        match lines.iter_mut().find(|l| l.eigenvalue == eigenvalue) {
            Some(l) => l.multiplicity += 1,
            None => lines.push(SpectrumLine { eigenvalue, multiplicity: 1 }),
        }
    }
    lines.sort_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue));
    Ok(lines)
}

/// Distance between `Φ_p(ρ_a)` and `Φ_p(ρ_b)` for `steps + 1` evenly spaced
/// depolarizing strengths `p ∈ [0, 1]`.
pub fn depolarizing_sweep(a: [f64; 3], b: [f64; 3], steps: usize) -> Result<Vec<SweepPoint>> {
    if steps == 0 || steps > 200 {
        return Err(Error::Input(format!("sweep needs 1..=200 steps, got {steps}")));
    }
    let (rho, omega) = (bloch_state(a)?, bloch_state(b)?);
    (0..=steps)
        .map(|k| {
            let p = k as f64 / steps as f64;
            let phi = depolarizing_channel(2, p)?;
            let out_a = DensityOperator::new(phi.apply(rho.matrix())?)?;
            let out_b = DensityOperator::new(phi.apply(omega.matrix())?)?;
            Ok(SweepPoint { p, distance: distance_between(out_a, out_b)?.distance })
        })
        .collect()
}

fn parse_subset(text: &str) -> Result<Vec<PauliString>> {
    text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect()
}

fn to_js<T: Serialize>(value: Result<T>) -> std::result::Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// JSON [`DistanceResult`] for Bloch vectors `(ax, ay, az)` and `(bx, by, bz)`.
#[wasm_bindgen(js_name = qubitDistance)]
pub fn qubit_distance_js(ax: f64, ay: f64, az: f64, bx: f64, by: f64, bz: f64) -> std::result::Result<String, JsError> {
    to_js(qubit_distance([ax, ay, az], [bx, by, bz]))
}

/// JSON list of [`SpectrumLine`]; `subset` holds comma- or space-separated
/// Pauli strings, empty for all of them.
#[wasm_bindgen(js_name = costSpectrum)]
pub fn cost_spectrum_js(n: usize, subset: &str) -> std::result::Result<String, JsError> {
    to_js(parse_subset(subset).and_then(|s| cost_spectrum(n, &s)))
}

/// JSON list of [`SweepPoint`].
#[wasm_bindgen(js_name = depolarizingSweep)]
pub fn depolarizing_sweep_js(
    ax: f64,
    ay: f64,
    az: f64,
    bx: f64,
    by: f64,
    bz: f64,
    steps: usize,
) -> std::result::Result<String, JsError> {
    to_js(depolarizing_sweep([ax, ay, az], [bx, by, bz], steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_parsing() {
        assert_eq!(parse_subset("ZZ, XI").unwrap().len(), 2);
        assert!(parse_subset("").unwrap().is_empty());
        assert!(parse_subset("Q").is_err());
    }
}
