//! JSON file formats.
//!
//! Matrices are arrays of rows, each entry an `[re, im]` pair. Every file
//! carries `"schema_version": "1"`. Floating-point numbers are written with
//! 17 significant digits, which round-trips every finite double exactly.

use std::io::Write;
use std::path::Path;

use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::Formatter;

use crate::cost::{CostOperator, CostProvenance, EigenCluster, ObservableSet, SpectrumReport};
use crate::error::{Error, Result};
use crate::linalg::{qubit_count, CMatrix};
use crate::pauli::PauliString;
use crate::solver::SolveReport;
use crate::state::DensityOperator;
use crate::symmetries::WignerSymmetry;

pub const SCHEMA_VERSION: &str = "1";

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Input("matrix is empty".into()));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::Input(format!("matrix row {i} has {} entries, expected {ncols}", row.len())));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        num_complex::Complex64::new(re, im)
    }))
}

fn check_version(found: &str) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Input(format!("unsupported schema_version {found:?}, expected {SCHEMA_VERSION:?}")));
    }
    Ok(())
}

fn check_qubits(declared: usize, side: usize) -> Result<()> {
    if qubit_count(side) != Some(declared) {
        return Err(Error::Input(format!("num_qubits = {declared} does not match matrix side {side}")));
    }
    Ok(())
}

/// Writes `f64` values as `d.dddddddddddddddde±x` (17 significant digits).
#[derive(Clone, Copy, Debug, Default)]
pub struct PreciseFormatter;

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serializes with [`PreciseFormatter`].
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed {what}: {e}")))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

/// On-disk density operator.
#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
pub struct StateFile {
    pub schema_version: String,
    pub num_qubits: usize,
    pub matrix: MatrixJson,
}

impl StateFile {
    pub fn from_state(rho: &DensityOperator) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            num_qubits: rho.num_qubits(),
            matrix: matrix_to_json(rho.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        check_version(&self.schema_version)?;
        let m = matrix_from_json(&self.matrix)?;
        check_qubits(self.num_qubits, m.nrows())?;
        DensityOperator::new(m)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text, "state file")
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

pub fn read_state(path: &Path) -> Result<DensityOperator> {
    StateFile::parse(&read_text(path)?)?.to_state().map_err(|e| annotate(e, path))
}

pub fn write_state(path: &Path, rho: &DensityOperator) -> Result<()> {
    write_text(path, &StateFile::from_state(rho).to_json()?)
}

fn annotate(e: Error, path: &Path) -> Error {
    match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => Error::Input(format!("{}: {other}", path.display())),
    }
}

/// List of Pauli strings, written as `"IXYZ"` or `"0123"`.
#[derive(Clone, Debug, SerializeDerive, Deserialize)]
pub struct PauliSubsetFile {
    pub schema_version: String,
    pub num_qubits: usize,
    pub strings: Vec<String>,
}

impl PauliSubsetFile {
    pub fn to_strings(&self) -> Result<Vec<PauliString>> {
        check_version(&self.schema_version)?;
        let strings = self.strings.iter().map(|s| s.parse()).collect::<Result<Vec<PauliString>>>()?;
        if let Some(bad) = strings.iter().find(|s| s.num_qubits() != self.num_qubits) {
            return Err(Error::Input(format!("Pauli string {bad} does not act on {} qubits", self.num_qubits)));
        }
        Ok(strings)
    }
}

pub fn read_pauli_subset(path: &Path) -> Result<Vec<PauliString>> {
    parse::<PauliSubsetFile>(&read_text(path)?, "Pauli subset file")?.to_strings().map_err(|e| annotate(e, path))
}

/// Explicit observables, optionally with their two-level spectra.
#[derive(Clone, Debug, SerializeDerive, Deserialize)]
pub struct ObservablesFile {
    pub schema_version: String,
    pub num_qubits: usize,
    pub observables: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_level_spectrum: Option<Vec<f64>>,
}

impl ObservablesFile {
    pub fn to_set(&self) -> Result<ObservableSet> {
        check_version(&self.schema_version)?;
        let mats = self.observables.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        let set = ObservableSet::new(mats)?;
        check_qubits(self.num_qubits, set.dim())?;
        match &self.two_level_spectrum {
            Some(lambdas) => set.with_two_level_spectrum(lambdas.clone()),
            None => Ok(set),
        }
    }
}

pub fn read_observables(path: &Path) -> Result<ObservableSet> {
    parse::<ObservablesFile>(&read_text(path)?, "observables file")?.to_set().map_err(|e| annotate(e, path))
}

/// Cost matrix together with its spectrum summary.
#[derive(Clone, Debug, SerializeDerive, Deserialize)]
pub struct CostFile {
    pub schema_version: String,
    pub num_qubits: usize,
    pub provenance: String,
    pub matrix: MatrixJson,
    pub spectrum: Vec<SpectrumEntry>,
    pub min_eigenvalue: f64,
    /// `‖[C, C_sym]‖_F`.
    pub commutator_with_symmetric: f64,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

impl From<&EigenCluster> for SpectrumEntry {
    fn from(c: &EigenCluster) -> Self {
        Self { eigenvalue: c.eigenvalue, multiplicity: c.multiplicity }
    }
}

impl CostFile {
    pub fn new(cost: &CostOperator, spectrum: &SpectrumReport, commutator_with_symmetric: f64) -> Result<Self> {
        let num_qubits =
            cost.num_qubits().ok_or_else(|| Error::Input("cost dimension is not a power of two".into()))?;
        let provenance = match cost.provenance() {
            CostProvenance::Definitional => "definitional",
            CostProvenance::ClosedFormTwoLevel => "closed_form_two_level",
            CostProvenance::ClosedFormSymmetric => "closed_form_symmetric",
        };
        Ok(Self {
            schema_version: SCHEMA_VERSION.into(),
            num_qubits,
            provenance: provenance.into(),
            matrix: matrix_to_json(cost.matrix()),
            spectrum: spectrum.clusters.iter().map(SpectrumEntry::from).collect(),
            min_eigenvalue: spectrum.min_eigenvalue,
            commutator_with_symmetric,
        })
    }

    pub fn to_cost(&self) -> Result<CostOperator> {
        check_version(&self.schema_version)?;
        let provenance = match self.provenance.as_str() {
            "definitional" => CostProvenance::Definitional,
            "closed_form_two_level" => CostProvenance::ClosedFormTwoLevel,
            "closed_form_symmetric" => CostProvenance::ClosedFormSymmetric,
            other => return Err(Error::Input(format!("unknown cost provenance {other:?}"))),
        };
        let cost = CostOperator::from_matrix(matrix_from_json(&self.matrix)?, provenance)?;
        check_qubits(self.num_qubits, cost.dim())?;
        Ok(cost)
    }
}

/// JSON form of a [`SolveReport`], coupling included.
pub fn solve_report_json(report: &SolveReport) -> serde_json::Value {
    let mut value = report.summary_json();
    let obj = value.as_object_mut().expect("summary is an object");
    obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    obj.insert(
        "coupling".into(),
        serde_json::to_value(matrix_to_json(report.coupling.matrix())).expect("finite matrix"),
    );
    value
}

/// On-disk Wigner symmetry.
#[derive(Clone, Debug, SerializeDerive, Deserialize)]
pub struct WignerSymmetryFile {
    pub schema_version: String,
    pub unitary: MatrixJson,
    pub antiunitary: bool,
}

impl From<WignerSymmetry> for WignerSymmetryFile {
    fn from(w: WignerSymmetry) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            unitary: matrix_to_json(w.unitary_part()),
            antiunitary: w.is_antiunitary(),
        }
    }
}

impl TryFrom<WignerSymmetryFile> for WignerSymmetry {
    type Error = Error;

    fn try_from(f: WignerSymmetryFile) -> Result<Self> {
        check_version(&f.schema_version)?;
        WignerSymmetry::new(matrix_from_json(&f.unitary)?, f.antiunitary)
    }
}
