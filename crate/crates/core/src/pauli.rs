//! Pauli operators and Pauli strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix, ONE, ZERO};

/// `σ_label` for `label ∈ {0, 1, 2, 3}` (identity, X, Y, Z).
pub fn pauli_matrix(label: u8) -> Result<CMatrix> {
    let i = Complex64::new(0.0, 1.0);
    let entries = match label {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -i, i, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => return Err(Error::Input(format!("Pauli label {label} not in 0..=3"))),
    };
    Ok(CMatrix::from_row_slice(2, 2, &entries))
}

/// Sign `s` in `σ_m σ_m' = s · σ_m' σ_m`.
pub fn pauli_commutation_sign(m: u8, m_prime: u8) -> Result<i8> {
    if m > 3 || m_prime > 3 {
        return Err(Error::Input(format!("Pauli labels ({m}, {m_prime}) not in 0..=3")));
    }
    Ok(if m == 0 || m_prime == 0 || m == m_prime { 1 } else { -1 })
}

/// Tensor product of single-qubit Pauli operators; the first label acts on
/// the first (most significant) qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    labels: Vec<u8>,
}

impl PauliString {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Input("Pauli string must act on at least one qubit".into()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 3) {
            return Err(Error::Input(format!("Pauli label {bad} not in 0..=3")));
        }
        Ok(Self { labels })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self { labels: vec![0; num_qubits] }
    }

    /// All `4^n` strings on `n` qubits in lexicographic label order.
    pub fn all(num_qubits: usize) -> impl Iterator<Item = PauliString> {
        let total = 1usize << (2 * num_qubits);
        (0..total).map(move |mut index| {
            let mut labels = vec![0u8; num_qubits];
            for slot in labels.iter_mut().rev() {
                *slot = (index & 3) as u8;
                index >>= 2;
            }
            PauliString { labels }
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    /// Sign picked up when commuting this string past `other`.
    pub fn commutation_sign(&self, other: &PauliString) -> Result<i8> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::DimensionMismatch {
                what: "Pauli string length",
                expected: self.num_qubits(),
                got: other.num_qubits(),
            });
        }
        self.labels.iter().zip(&other.labels).try_fold(1i8, |acc, (&a, &b)| Ok(acc * pauli_commutation_sign(a, b)?))
    }

    /// `2^n × 2^n` matrix of the string.
    pub fn matrix(&self) -> CMatrix {
        self.labels
            .iter()
            .map(|&l| pauli_matrix(l).expect("labels validated on construction"))
            .reduce(|acc, m| kron(&acc, &m))
            .expect("non-empty string")
    }
}

/// Matrix of a Pauli string.
pub fn pauli_string_matrix(p: &PauliString) -> CMatrix {
    p.matrix()
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.labels {
            f.write_str(["I", "X", "Y", "Z"][l as usize])?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts `I X Y Z` (any case) or the digits `0 1 2 3`.
    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' | '0' => Ok(0),
                'X' | '1' => Ok(1),
                'Y' | '2' => Ok(2),
                'Z' | '3' => Ok(3),
                other => Err(Error::Input(format!("unknown Pauli symbol {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        PauliString::new(labels)
    }
}
