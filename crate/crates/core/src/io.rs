//! File formats.
//!
//! Operators are JSON objects `{"d": 2, "re": [[..],[..]], "im": [[..],[..]]}`;
//! a pure state uses the same keys with flat `re`/`im` arrays. A POVM is
//! `{"d": 2, "effects": [{"re": .., "im": ..}, ..]}` and a SIC fixture is
//! `{"d": 3, "fiducial": {"re": [..], "im": [..]}}` with optional `effects`.
//! Probability vectors are one CSV line; conditional matrices are one CSV line
//! per row. Floats are written in shortest round-trip form.

use serde::{Deserialize, Serialize};

use crate::error::{QplexError, Result};
use crate::linalg::{c, CMat, CVec, RMat};
use crate::operator::{validate_density, validate_povm, DensityMatrix, Povm, PureState};
use crate::reference::{wh_sic_from_fiducial, ReferenceMeasurement, SicPovm};
use crate::rep::{CondProbMatrix, ProbVector};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixParts {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OperatorJson {
    d: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VectorParts {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PureJson {
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PovmJson {
    d: usize,
    effects: Vec<MatrixParts>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SicJson {
    d: usize,
    fiducial: VectorParts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    effects: Option<Vec<MatrixParts>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateJson {
    Pure(PureJson),
    Mixed(OperatorJson),
}

fn parse_err(e: impl std::fmt::Display) -> QplexError {
    QplexError::Parse(e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn matrix_from_parts(d: usize, re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMat> {
    if re.len() != d || im.len() != d {
        return Err(QplexError::Ragged(format!("expected {d} rows, got re {} / im {}", re.len(), im.len())));
    }
    for (k, row) in re.iter().chain(im).enumerate() {
        if row.len() != d {
            return Err(QplexError::Ragged(format!("row {} has {} entries, expected {d}", k % d, row.len())));
        }
    }
    Ok(CMat::from_fn(d, d, |i, j| c(re[i][j], im[i][j])))
}

fn parts_from_matrix(m: &CMat) -> MatrixParts {
    let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    MatrixParts { re: rows(|z| z.re), im: rows(|z| z.im) }
}

fn vector_from_parts(d: usize, re: &[f64], im: &[f64]) -> Result<CVec> {
    if re.len() != d || im.len() != d {
        return Err(QplexError::Ragged(format!("expected {d} amplitudes, got re {} / im {}", re.len(), im.len())));
    }
    Ok(CVec::from_iterator(d, re.iter().zip(im).map(|(&a, &b)| c(a, b))))
}

fn parts_from_vector(v: &CVec) -> VectorParts {
    VectorParts { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
}

pub fn read_operator(text: &str) -> Result<CMat> {
    let j: OperatorJson = serde_json::from_str(text).map_err(parse_err)?;
    matrix_from_parts(j.d, &j.re, &j.im)
}

pub fn write_operator(m: &CMat) -> String {
    let p = parts_from_matrix(m);
    to_json(&OperatorJson { d: m.nrows(), re: p.re, im: p.im })
}

pub fn read_pure_state(text: &str) -> Result<PureState> {
    let j: PureJson = serde_json::from_str(text).map_err(parse_err)?;
    PureState::from_vector(vector_from_parts(j.d, &j.re, &j.im)?)
}

pub fn write_pure_state(psi: &PureState) -> String {
    let p = parts_from_vector(psi.amplitudes());
    to_json(&PureJson { d: psi.dim(), re: p.re, im: p.im })
}

/// Accepts either a density-matrix file or a pure-state file.
pub fn read_density(text: &str) -> Result<DensityMatrix> {
    match serde_json::from_str::<StateJson>(text).map_err(parse_err)? {
        StateJson::Pure(j) => {
            Ok(DensityMatrix::from_pure(&PureState::from_vector(vector_from_parts(j.d, &j.re, &j.im)?)?))
        }
        StateJson::Mixed(j) => validate_density(matrix_from_parts(j.d, &j.re, &j.im)?),
    }
}

pub fn write_density(rho: &DensityMatrix) -> String {
    write_operator(rho.matrix())
}

pub fn read_povm(text: &str) -> Result<Povm> {
    let j: PovmJson = serde_json::from_str(text).map_err(parse_err)?;
    let mats = j.effects.iter().map(|e| matrix_from_parts(j.d, &e.re, &e.im)).collect::<Result<Vec<_>>>()?;
    validate_povm(mats)
}

pub fn write_povm(povm: &Povm) -> String {
    let effects = povm.matrices().into_iter().map(parts_from_matrix).collect();
    to_json(&PovmJson { d: povm.dim(), effects })
}

/// Rebuilds the SIC from its fiducial. When effects are listed they must agree
/// with the rebuilt orbit.
pub fn read_sic(text: &str) -> Result<SicPovm> {
    let j: SicJson = serde_json::from_str(text).map_err(parse_err)?;
    let fid = PureState::from_vector(vector_from_parts(j.d, &j.fiducial.re, &j.fiducial.im)?)?;
    let sic = wh_sic_from_fiducial(&fid, j.d)?;
    if let Some(effects) = &j.effects {
        if effects.len() != j.d * j.d {
            return Err(QplexError::DimensionMismatch { expected: j.d * j.d, found: effects.len() });
        }
        for (k, e) in effects.iter().enumerate() {
            let m = matrix_from_parts(j.d, &e.re, &e.im)?;
            let dev = crate::linalg::max_abs_diff(&m, sic.reference().effect(k));
            if dev > crate::tol::SIC {
                return Err(QplexError::NotSicEffect { index: k, reason: format!("differs from fiducial orbit by {dev:e}") });
            }
        }
    }
    Ok(sic)
}

pub fn write_sic(sic: &SicPovm, include_effects: bool) -> Result<String> {
    let fid = sic
        .fiducial()
        .ok_or_else(|| QplexError::InvalidConfig("SIC has no recorded fiducial".into()))?;
    let effects = include_effects.then(|| sic.reference().povm().matrices().into_iter().map(parts_from_matrix).collect());
    Ok(to_json(&SicJson { d: sic.dim(), fiducial: parts_from_vector(fid.amplitudes()), effects }))
}

/// A reference file is either a SIC fixture or a POVM file. POVM files that
/// happen to be SICs are promoted.
#[derive(Debug, Clone)]
pub enum Reference {
    Sic(SicPovm),
    General(ReferenceMeasurement),
}

impl Reference {
    pub fn measurement(&self) -> &ReferenceMeasurement {
        match self {
            Reference::Sic(s) => s.reference(),
            Reference::General(r) => r,
        }
    }

    pub fn sic(&self) -> Option<&SicPovm> {
        match self {
            Reference::Sic(s) => Some(s),
            Reference::General(_) => None,
        }
    }
}

pub fn read_reference(text: &str) -> Result<Reference> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(parse_err)?;
    if v.get("fiducial").is_some() {
        return read_sic(text).map(Reference::Sic);
    }
    let povm = read_povm(text)?;
    match SicPovm::from_povm(povm.clone()) {
        Ok(s) => Ok(Reference::Sic(s)),
        Err(_) => ReferenceMeasurement::new(povm).map(Reference::General),
    }
}

fn csv_line(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn parse_csv_line(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| QplexError::Parse(format!("{t:?}: {e}"))))
        .collect()
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn read_prob_vector(text: &str) -> Result<ProbVector> {
    let mut lines = data_lines(text);
    let line = lines.next().ok_or_else(|| QplexError::Parse("empty probability file".into()))?;
    if lines.next().is_some() {
        return Err(QplexError::Parse("probability vector must be a single line".into()));
    }
    ProbVector::new(parse_csv_line(line)?)
}

pub fn write_prob_vector(p: &ProbVector) -> String {
    format!("{}\n", csv_line(p.values().iter().copied()))
}

pub fn read_cond_matrix(text: &str) -> Result<CondProbMatrix> {
    let rows = data_lines(text).map(parse_csv_line).collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(QplexError::Parse("empty conditional matrix".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != cols) {
        return Err(QplexError::Ragged(format!("row with {} entries, expected {cols}", r.len())));
    }
    CondProbMatrix::new(RMat::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn write_cond_matrix(m: &CondProbMatrix) -> String {
    let e = m.entries();
    (0..e.nrows()).map(|i| csv_line((0..e.ncols()).map(|j| e[(i, j)])) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{random_density, random_povm, random_pure};
    use crate::reference::qubit_tetrahedron;

    #[test]
    fn operator_round_trip() {
        let rho = random_density(3, 5);
        let back = read_density(&write_density(&rho)).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn pure_round_trip() {
        let psi = random_pure(4, 2);
        let back = read_pure_state(&write_pure_state(&psi)).unwrap();
        assert_eq!(back.amplitudes(), psi.amplitudes());
        let rho = read_density(&write_pure_state(&psi)).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ragged_rejected() {
        let text = r#"{"d": 2, "re": [[0.5, 0.0], [0.0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(read_operator(text), Err(QplexError::Ragged(_))));
    }

    #[test]
    fn povm_round_trip() {
        let povm = random_povm(2, 5, 1);
        let back = read_povm(&write_povm(&povm)).unwrap();
        for (a, b) in back.matrices().iter().zip(povm.matrices()) {
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn sic_round_trip() {
        let sic = crate::fixtures::sic(3).unwrap();
        let text = write_sic(&sic, true).unwrap();
        let back = read_sic(&text).unwrap();
        assert_eq!(back.fiducial().unwrap().amplitudes(), sic.fiducial().unwrap().amplitudes());
        assert!(matches!(read_reference(&text).unwrap(), Reference::Sic(_)));
    }

    #[test]
    fn povm_reference_promoted_to_sic() {
        let text = write_povm(qubit_tetrahedron().reference().povm());
        assert!(read_reference(&text).unwrap().sic().is_some());
    }

    #[test]
    fn csv_round_trip() {
        let p = ProbVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(read_prob_vector(&write_prob_vector(&p)).unwrap(), p);
        assert_eq!(write_prob_vector(&ProbVector::uniform(4)), "0.25,0.25,0.25,0.25\n");
        let m = CondProbMatrix::new(RMat::from_row_slice(2, 2, &[0.3, 1.0 / 3.0, 0.7, 2.0 / 3.0])).unwrap();
        let back = read_cond_matrix(&write_cond_matrix(&m)).unwrap();
        assert_eq!(back.entries(), m.entries());
    }

    #[test]
    fn csv_garbage() {
        assert!(matches!(read_prob_vector("0.5,abc"), Err(QplexError::Parse(_))));
        assert!(matches!(read_cond_matrix("0.5,0.5\n1.0\n"), Err(QplexError::Ragged(_))));
    }
}
