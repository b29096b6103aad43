//! Validated quantum objects and the direct Born rule.
//!
//! Every type here is immutable once built: construction validates the
//! algebraic invariant and stores the (already Hermitian) matrix.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{QplexError, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    /// Rejects non-square input and asymmetry beyond `tol::HERM`; the stored
    /// matrix is the Hermitian part of `mat`.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(QplexError::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        let deviation = linalg::hermiticity_deviation(&mat);
        if deviation > tol::HERM {
            return Err(QplexError::NotHermitian { deviation });
        }
        Ok(Self { mat: linalg::hermitian_part(&mat) })
    }

    pub(crate) fn new_unchecked(mat: CMat) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.mat)
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.mat).re
    }

    /// Real part of tr(self · other).
    pub fn trace_with(&self, other: &HermitianOperator) -> f64 {
        linalg::trace_product(&self.mat, &other.mat).re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { op: HermitianOperator::new_unchecked(linalg::identity(d) * c(1.0 / d as f64, 0.0)) }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { op: HermitianOperator::new_unchecked(linalg::projector(psi.amplitudes())) }
    }

    /// tr ρ²
    pub fn purity(&self) -> f64 {
        self.op.trace_with(&self.op)
    }

    /// Convex combination `p·self + (1−p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(QplexError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        validate_density(self.matrix() * c(p, 0.0) + other.matrix() * c(1.0 - p, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    op: HermitianOperator,
}

impl Effect {
    pub fn new(mat: CMat) -> Result<Self> {
        validate_effect(mat, 0)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    d: usize,
    effects: Vec<Effect>,
}

impl Povm {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn matrices(&self) -> Vec<&CMat> {
        self.effects.iter().map(Effect::matrix).collect()
    }

    /// The one-outcome measurement {I}.
    pub fn trivial(d: usize) -> Self {
        Self { d, effects: vec![Effect { op: HermitianOperator::new_unchecked(linalg::identity(d)) }] }
    }

    /// Projective measurement onto the computational basis.
    pub fn computational_basis(d: usize) -> Self {
        let effects = (0..d)
            .map(|k| {
                let mut m = CMat::zeros(d, d);
                m[(k, k)] = linalg::ONE;
                Effect { op: HermitianOperator::new_unchecked(m) }
            })
            .collect();
        Self { d, effects }
    }

    /// Projective measurement onto the given orthonormal vectors.
    pub fn from_basis(basis: &[PureState]) -> Result<Self> {
        validate_povm(basis.iter().map(|v| linalg::projector(v.amplitudes())).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVec,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(CVec::from_vec(amps))
    }

    pub fn from_vector(amps: CVec) -> Result<Self> {
        if amps.is_empty() {
            return Err(QplexError::DimensionMismatch { expected: 1, found: 0 });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(QplexError::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amps: CVec) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QplexError::NotNormalized { norm });
        }
        Ok(Self { amps: amps / c(norm, 0.0) })
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = CVec::zeros(d);
        v[k] = linalg::ONE;
        Self { amps: v }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// ⟨self|M|self⟩ (real part).
    pub fn expectation(&self, m: &CMat) -> f64 {
        self.amps.dotc(&(m * &self.amps)).re
    }
}

pub fn validate_density(raw: CMat) -> Result<DensityMatrix> {
    let op = HermitianOperator::new(raw)?;
    let trace = op.trace();
    if (trace - 1.0).abs() > tol::TRACE {
        return Err(QplexError::TraceNotOne { trace });
    }
    let min_eigenvalue = op.eigenvalues()[0];
    if min_eigenvalue < -tol::PSD {
        return Err(QplexError::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix { op })
}

fn validate_effect(raw: CMat, index: usize) -> Result<Effect> {
    let op = HermitianOperator::new(raw)?;
    let eig = op.eigenvalues();
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if lo < -tol::PSD {
        return Err(QplexError::EffectNotPositive { index, eigenvalue: lo });
    }
    if hi > 1.0 + tol::PSD {
        return Err(QplexError::EffectNotPositive { index, eigenvalue: hi });
    }
    Ok(Effect { op })
}

pub fn validate_povm(raws: Vec<CMat>) -> Result<Povm> {
    let d = raws.first().ok_or(QplexError::EmptyPovm)?.nrows();
    let mut effects = Vec::with_capacity(raws.len());
    let mut sum = CMat::zeros(d, d);
    for (index, raw) in raws.into_iter().enumerate() {
        if raw.nrows() != d || raw.ncols() != d {
            return Err(QplexError::DimensionMismatch { expected: d, found: raw.nrows().max(raw.ncols()) });
        }
        let e = validate_effect(raw, index)?;
        sum += e.matrix();
        effects.push(e);
    }
    let deviation = linalg::max_abs_diff(&sum, &linalg::identity(d));
    if deviation > tol::POVM {
        return Err(QplexError::SumNotIdentity { deviation });
    }
    Ok(Povm { d, effects })
}

/// tr(ρE), clamped into [0, 1] only when within `tol::PROB` of the boundary.
pub fn born_probability(rho: &DensityMatrix, e: &Effect) -> Result<f64> {
    if rho.dim() != e.dim() {
        return Err(QplexError::DimensionMismatch { expected: rho.dim(), found: e.dim() });
    }
    let value = linalg::trace_product(rho.matrix(), e.matrix()).re;
    if !(-tol::PROB..=1.0 + tol::PROB).contains(&value) {
        return Err(QplexError::ProbabilityOutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Generator for item `stream` of a sweep seeded with `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(d: usize, cols: usize, rng: &mut R) -> CMat {
    let entries: Vec<Complex64> = (0..d * cols).map(|_| gaussian(rng)).collect();
    CMat::from_row_slice(d, cols, &entries)
}

pub fn random_pure_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    loop {
        let v = CVec::from_iterator(d, (0..d).map(|_| gaussian(rng)));
        if let Ok(p) = PureState::normalized(v) {
            return p;
        }
    }
}

/// Full-rank density from normalizing A·A† for a complex Gaussian A.
pub fn random_density_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let a = ginibre(d, d, rng);
    let m = &a * a.adjoint();
    let t = linalg::trace(&m).re;
    let m = linalg::hermitian_part(&(m / c(t, 0.0)));
    DensityMatrix { op: HermitianOperator::new_unchecked(m) }
}

/// Random `outcomes`-element POVM: E_j = S^{-1/2} A_j S^{-1/2} with A_j Wishart.
pub fn random_povm_with<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Povm {
    let parts: Vec<CMat> = (0..outcomes)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * g.adjoint()
        })
        .collect();
    let total = parts.iter().fold(CMat::zeros(d, d), |acc, p| acc + p);
    let s = linalg::inv_sqrt_hpd(&total);
    let raws = parts.iter().map(|p| linalg::hermitian_part(&(&s * p * &s))).collect();
    validate_povm(raws).expect("normalized Wishart parts form a POVM")
}

/// Pure state orthogonal to `psi`, otherwise Haar-random.
pub fn random_orthogonal_with<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> PureState {
    loop {
        let v = random_pure_with(psi.dim(), rng);
        let w = v.amplitudes() - psi.amplitudes() * psi.inner(&v);
        if w.norm() > 1e-3 {
            return PureState::normalized(w).expect("nonzero");
        }
    }
}

pub fn random_density(d: usize, seed: u64) -> DensityMatrix {
    random_density_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_pure(d: usize, seed: u64) -> PureState {
    random_pure_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Povm {
    random_povm_with(d, outcomes, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&x| c(x, 0.0))))
}
