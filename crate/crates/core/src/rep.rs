//! Maps between quantum objects and probability vectors, and the urgleichung.
//!
//! With a SIC reference measurement {H_i = Π_i/d} the Born rule for any other
//! measurement {D_j} becomes
//!
//! ```text
//! Q(D_j) = Σ_i [(d+1)·P(H_i) − 1/d] · P(D_j|H_i),   P(D_j|H_i) = d·tr(D_j H_i)
//! ```
//!
//! a deformation of the Law of Total Probability. [`general_mu`] handles any
//! informationally complete reference through the B-matrix.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{QplexError, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::operator::{born_probability, validate_density, DensityMatrix, Povm};
use crate::reference::{ReferenceMeasurement, SicPovm};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(QplexError::NotProbVector("empty".into()));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < -tol::PROB_ENTRY) {
            return Err(QplexError::NotProbVector(format!("entry {i} is {v}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(QplexError::NotProbVector(format!("entries sum to {sum}")));
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Self {
        Self { values: vec![1.0 / n as f64; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dot(&self, other: &ProbVector) -> f64 {
        dot(&self.values, &other.values)
    }

    /// Euclidean distance from the simplex barycenter.
    pub fn distance_from_barycenter(&self) -> f64 {
        let c = 1.0 / self.len() as f64;
        self.values.iter().map(|v| (v - c) * (v - c)).sum::<f64>().sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conditional table P(D_j|H_i): row j, column i.
#[derive(Debug, Clone, PartialEq)]
pub struct CondProbMatrix {
    entries: RMat,
}

impl CondProbMatrix {
    /// Every column must be a probability distribution over the rows.
    pub fn new(entries: RMat) -> Result<Self> {
        for i in 0..entries.ncols() {
            let col = entries.column(i);
            if let Some(v) = col.iter().find(|v| !v.is_finite() || **v < -tol::PROB_ENTRY) {
                return Err(QplexError::NotColumnStochastic { column: i, reason: format!("entry {v}") });
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > tol::PROB_SUM {
                return Err(QplexError::NotColumnStochastic { column: i, reason: format!("sums to {sum}") });
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &RMat {
        &self.entries
    }

    /// Number of D-outcomes (rows).
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of reference outcomes (columns).
    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }
}

/// (α, β, N) with α − Nβ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrgleichungParams {
    alpha: f64,
    beta: f64,
    n: usize,
}

impl UrgleichungParams {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        let ok = alpha > 0.0 && beta >= 0.0 && n > 0 && (alpha - n as f64 * beta - 1.0).abs() <= tol::URG_NORMALIZATION;
        if !ok {
            return Err(QplexError::InvalidParams { alpha, beta, n });
        }
        Ok(Self { alpha, beta, n })
    }

    /// α = 1, β = 0: the Law of Total Probability.
    pub fn classical(n: usize) -> Self {
        Self { alpha: 1.0, beta: 0.0, n }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_outcomes(&self) -> usize {
        self.n
    }

    /// Lower bound β/α on inner products of valid vectors.
    pub fn lower_bound(&self) -> f64 {
        self.beta / self.alpha
    }
}

/// Uniform (flat Dirichlet) random point of the simplex.
pub fn random_prob_vector_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProbVector {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    ProbVector { values: v }
}

/// Column-stochastic matrix with independent flat-Dirichlet columns.
pub fn random_cond_matrix_with<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CondProbMatrix {
    let columns: Vec<ProbVector> = (0..cols).map(|_| random_prob_vector_with(rows, rng)).collect();
    CondProbMatrix { entries: RMat::from_fn(rows, cols, |j, i| columns[i].values[j]) }
}

/// (d+1, 1/d, d²)
pub fn sic_params(d: usize) -> UrgleichungParams {
    let df = d as f64;
    UrgleichungParams::new(df + 1.0, 1.0 / df, d * d).expect("SIC parameters are normalized")
}

/// P(k) = tr(ρ H_k).
pub fn state_to_prob(rho: &DensityMatrix, reference: &ReferenceMeasurement) -> Result<ProbVector> {
    if rho.dim() != reference.dim() {
        return Err(QplexError::DimensionMismatch { expected: reference.dim(), found: rho.dim() });
    }
    let values = reference
        .povm()
        .effects()
        .iter()
        .map(|e| born_probability(rho, e))
        .collect::<Result<Vec<_>>>()?;
    ProbVector::new(values)
}

fn check_state(m: CMat) -> Result<DensityMatrix> {
    let min_eigenvalue = linalg::min_eigenvalue(&m);
    if min_eigenvalue < -tol::PSD {
        return Err(QplexError::NotAState { min_eigenvalue });
    }
    validate_density(m)
}

/// ρ = Σ_k [(d+1)P(k) − 1/d]·Π_k.
pub fn prob_to_state(p: &ProbVector, sic: &SicPovm) -> Result<DensityMatrix> {
    let d = sic.dim();
    if p.len() != d * d {
        return Err(QplexError::DimensionMismatch { expected: d * d, found: p.len() });
    }
    let df = d as f64;
    let mut m = CMat::zeros(d, d);
    for (k, &pk) in p.values().iter().enumerate() {
        // Π_k = d·H_k
        m += sic.reference().effect(k) * c(((df + 1.0) * pk - 1.0 / df) * df, 0.0);
    }
    check_state(m)
}

/// Operator Σ_k (B·P)_k H_k, the unique operator in the span of the reference
/// effects whose Born probabilities are closest to P.
pub fn reconstruct_operator(p: &ProbVector, reference: &ReferenceMeasurement) -> Result<CMat> {
    if p.len() != reference.len() {
        return Err(QplexError::DimensionMismatch { expected: reference.len(), found: p.len() });
    }
    let coeffs = reference.b_matrix() * DVector::from_column_slice(p.values());
    let d = reference.dim();
    let mut m = CMat::zeros(d, d);
    for (k, &ck) in coeffs.iter().enumerate() {
        m += reference.effect(k) * c(ck, 0.0);
    }
    Ok(linalg::hermitian_part(&m))
}

/// Inverse of [`state_to_prob`] for any IC reference, through the B-matrix.
pub fn prob_to_state_general(p: &ProbVector, reference: &ReferenceMeasurement) -> Result<DensityMatrix> {
    check_state(reconstruct_operator(p, reference)?)
}

/// P(D_j|H_i) = d·tr(D_j H_i) for a SIC reference.
pub fn measurement_to_cond_matrix(d_povm: &Povm, sic: &SicPovm) -> Result<CondProbMatrix> {
    let d = sic.dim();
    if d_povm.dim() != d {
        return Err(QplexError::DimensionMismatch { expected: d, found: d_povm.dim() });
    }
    let reference = sic.reference();
    let entries = RMat::from_fn(d_povm.len(), reference.len(), |j, i| {
        d as f64 * linalg::trace_product(d_povm.effects()[j].matrix(), reference.effect(i)).re
    });
    CondProbMatrix::new(entries)
}

fn finish_output(q: Vec<f64>) -> Result<ProbVector> {
    if let Some((index, &value)) = q.iter().enumerate().find(|(_, v)| **v < -tol::URG_NEGATIVE) {
        return Err(QplexError::InconsistentPair { index, value });
    }
    // round-off negatives inside the tolerance band are reported as zero
    ProbVector::new(q.into_iter().map(|v| v.max(0.0)).collect())
}

/// Q(D_j) = Σ_i [α P(H_i) − β] · P(D_j|H_i).
pub fn urgleichung(p: &ProbVector, cond: &CondProbMatrix, params: &UrgleichungParams) -> Result<ProbVector> {
    let n = params.n_outcomes();
    if p.len() != n {
        return Err(QplexError::DimensionMismatch { expected: n, found: p.len() });
    }
    if cond.cols() != n {
        return Err(QplexError::DimensionMismatch { expected: n, found: cond.cols() });
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let e = cond.entries();
    let q = (0..cond.rows())
        .map(|j| {
            let mut acc = 0.0;
            for (i, &pi) in p.values().iter().enumerate() {
                acc += (alpha * pi - beta) * e[(j, i)];
            }
            acc
        })
        .collect();
    finish_output(q)
}

/// Q(D_j) = Σ_i P(H_i)·P(D_j|H_i), summed in the same order as [`urgleichung`].
pub fn law_of_total_probability(p: &ProbVector, cond: &CondProbMatrix) -> Result<ProbVector> {
    if cond.cols() != p.len() {
        return Err(QplexError::DimensionMismatch { expected: p.len(), found: cond.cols() });
    }
    let e = cond.entries();
    let q = (0..cond.rows())
        .map(|j| {
            let mut acc = 0.0;
            for (i, &pi) in p.values().iter().enumerate() {
                acc += pi * e[(j, i)];
            }
            acc
        })
        .collect();
    finish_output(q)
}

/// Q(D_j) = Σ_k (B·P)_k · tr(D_j H_k) for any informationally complete reference.
pub fn general_mu(p: &ProbVector, d_povm: &Povm, reference: &ReferenceMeasurement) -> Result<ProbVector> {
    if d_povm.dim() != reference.dim() {
        return Err(QplexError::DimensionMismatch { expected: reference.dim(), found: d_povm.dim() });
    }
    if p.len() != reference.len() {
        return Err(QplexError::DimensionMismatch { expected: reference.len(), found: p.len() });
    }
    let coeffs = reference.b_matrix() * DVector::from_column_slice(p.values());
    let q = d_povm
        .effects()
        .iter()
        .map(|dj| {
            let mut acc = 0.0;
            for (k, &ck) in coeffs.iter().enumerate() {
                acc += ck * linalg::trace_product(dj.matrix(), reference.effect(k)).re;
            }
            acc
        })
        .collect();
    finish_output(q)
}
