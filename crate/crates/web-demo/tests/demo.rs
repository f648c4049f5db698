use qwass::PauliString;
use qwass_web_demo::{bloch_state, cost_spectrum, depolarizing_sweep, qubit_distance, SpectrumLine};

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

#[test]
fn pure_qubits_follow_the_overlap() {
    // tr[ρω] = (1 + a·b)/2 for unit Bloch vectors, so D² = 6 − 2a·b
    let pairs =
        [([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]), ([1.0, 0.0, 0.0], [0.0, 0.6, 0.8]), ([0.0, 1.0, 0.0], [0.0, 1.0, 0.0])];
    for (a, b) in pairs {
        let r = qubit_distance(a, b).unwrap();
        assert!(r.converged);
        assert!((r.squared - (6.0 - 2.0 * dot(a, b))).abs() < 1e-8, "{a:?} {b:?}: {}", r.squared);
    }
}

#[test]
fn self_distance_of_a_mixed_qubit() {
    // eigenvalues (1 ± r)/2 give (tr√ρ)² = 1 + √(1 − r²)
    for r in [0.0, 0.3, 0.9] {
        let d = qubit_distance([0.0, r, 0.0], [0.0, r, 0.0]).unwrap();
        let expected = 4.0 - 4.0 * (1.0 - r * r).sqrt();
        assert!((d.squared - expected).abs() < 1e-6, "r = {r}: {} vs {expected}", d.squared);
    }
}

#[test]
fn spectra() {
    let full = cost_spectrum(1, &[]).unwrap();
    assert_eq!(
        full,
        vec![SpectrumLine { eigenvalue: 0.0, multiplicity: 1 }, SpectrumLine { eigenvalue: 8.0, multiplicity: 3 }]
    );
    let zz: PauliString = "ZZ".parse().unwrap();
    let lines = cost_spectrum(2, &[zz]).unwrap();
    assert_eq!(lines.iter().map(|l| l.multiplicity).sum::<usize>(), 16);
    assert!(cost_spectrum(6, &[]).is_err());
}

#[test]
fn full_depolarization_merges_the_states() {
    let sweep = depolarizing_sweep([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 4).unwrap();
    assert_eq!(sweep.len(), 5);
    assert!((sweep[0].distance - 6f64.sqrt()).abs() < 1e-8);
    assert!(sweep[4].distance < 1e-5, "{}", sweep[4].distance);
    assert!(depolarizing_sweep([0.0; 3], [0.0; 3], 0).is_err());
}

#[test]
fn bloch_vectors_outside_the_ball_are_rejected() {
    assert!(bloch_state([0.8, 0.8, 0.0]).is_err());
    assert!(bloch_state([f64::NAN, 0.0, 0.0]).is_err());
}
