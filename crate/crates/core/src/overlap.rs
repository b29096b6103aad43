//! Orthogonal quantum states never have disjoint probability vectors under an
//! informationally complete reference measurement.
//!
//! The constructive check: compress every reference effect onto the complex
//! span of two pure states. If the compressed set still spans all 2×2 Hermitian
//! matrices, the two probability vectors cannot have disjoint support.

use serde::Serialize;

use crate::error::{QplexError, Result};
use crate::linalg::{coords_matrix, eigh, numerical_rank, CMat, CVec};
use crate::operator::{DensityMatrix, PureState};
use crate::reference::ReferenceMeasurement;
use crate::rep::{state_to_prob, ProbVector};
use crate::tol;

#[derive(Debug, Clone)]
pub struct EigenMixture {
    weights: Vec<f64>,
    components: Vec<PureState>,
}

impl EigenMixture {
    pub fn new(weights: Vec<f64>, components: Vec<PureState>) -> Result<Self> {
        if weights.len() != components.len() {
            return Err(QplexError::DimensionMismatch { expected: weights.len(), found: components.len() });
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0) {
            return Err(QplexError::InvalidConfig(format!("negative mixture weight {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::MIXTURE_WEIGHTS {
            return Err(QplexError::InvalidConfig(format!("mixture weights sum to {sum}")));
        }
        Ok(Self { weights, components })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[PureState] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Σ c_i |ψ_i⟩⟨ψ_i|
    pub fn reconstruct(&self) -> CMat {
        let d = self.components.first().map_or(0, PureState::dim);
        let mut m = CMat::zeros(d, d);
        for (w, psi) in self.weights.iter().zip(&self.components) {
            let v = psi.amplitudes();
            m += v * v.adjoint() * crate::linalg::c(*w, 0.0);
        }
        m
    }
}

/// Eigen-decomposition with the eigenvalues as weights, largest first.
/// Eigenvalues at or below `tol::MIXTURE_DROP` are dropped and the rest are
/// renormalized.
pub fn decompose(rho: &DensityMatrix) -> EigenMixture {
    let (vals, vecs) = eigh(rho.matrix());
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for k in (0..vals.len()).rev() {
        if vals[k] <= tol::MIXTURE_DROP {
            continue;
        }
        weights.push(vals[k]);
        let v: CVec = vecs.column(k).into_owned();
        components.push(PureState::normalized(v).expect("eigenvector has unit norm"));
    }
    let sum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= sum);
    EigenMixture { weights, components }
}

/// sᵀ B s′. For state images this equals tr(ρρ′).
pub fn b_inner_product(s: &ProbVector, s2: &ProbVector, reference: &ReferenceMeasurement) -> Result<f64> {
    let n = reference.len();
    for v in [s, s2] {
        if v.len() != n {
            return Err(QplexError::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    let b = reference.b_matrix();
    let (a, c) = (s.values(), s2.values());
    let mut total = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| b[(i, j)] * c[j]).sum();
        total += a[i] * row;
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct SubspaceProjection {
    /// d×2 isometry whose columns span {ψ, ψ′}.
    pub isometry: CMat,
    /// V† E_k V for every reference effect.
    pub effects: Vec<CMat>,
    /// Max |⟨φ|E_k|φ⟩ − ⟨c|V†E_kV|c⟩| over φ ∈ {ψ, ψ′, (ψ+ψ′)/‖·‖}.
    pub identity_deviation: f64,
    /// Real dimension of the span of the compressed effects.
    pub rank: usize,
}

pub fn project_effects_to_subspace(
    reference: &ReferenceMeasurement,
    psi: &PureState,
    psi2: &PureState,
) -> Result<SubspaceProjection> {
    let d = reference.dim();
    for s in [psi, psi2] {
        if s.dim() != d {
            return Err(QplexError::DimensionMismatch { expected: d, found: s.dim() });
        }
    }
    let overlap = psi.inner(psi2).norm();
    if overlap > 1.0 - tol::SUBSPACE_DEGENERATE {
        return Err(QplexError::DegenerateSubspace { overlap });
    }
    let a = psi.amplitudes();
    let b = psi2.amplitudes();
    let proj = a.dotc(b);
    let perp = b - a * proj;
    let perp = &perp / crate::linalg::c(perp.norm(), 0.0);
    let mut v = CMat::zeros(d, 2);
    v.set_column(0, a);
    v.set_column(1, &perp);
    let vh = v.adjoint();
    let effects: Vec<CMat> = reference.povm().matrices().iter().map(|e| &vh * *e * &v).collect();

    let sum = a + b;
    let probes = [a.clone(), b.clone(), &sum / crate::linalg::c(sum.norm(), 0.0)];
    let mut identity_deviation: f64 = 0.0;
    for phi in &probes {
        let coeffs = &vh * phi;
        for (full, small) in reference.povm().matrices().iter().zip(&effects) {
            let lhs = phi.dotc(&(*full * phi)).re;
            let rhs = coeffs.dotc(&(small * &coeffs)).re;
            identity_deviation = identity_deviation.max((lhs - rhs).abs());
        }
    }
    let refs: Vec<&CMat> = effects.iter().collect();
    let rank = numerical_rank(&coords_matrix(&refs));
    Ok(SubspaceProjection { isometry: v, effects, identity_deviation, rank })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapReport {
    pub dot: f64,
    pub b_inner: f64,
    /// Present when both inputs are pure and distinct.
    pub ic_rank_on_subspace: Option<usize>,
}

/// Reports s·s′ and sᵀBs′ for the images of ρ and ρ′; s·s′ ≤ 0 is an error.
pub fn verify_overlap(
    rho: &DensityMatrix,
    rho2: &DensityMatrix,
    reference: &ReferenceMeasurement,
) -> Result<OverlapReport> {
    let s = state_to_prob(rho, reference)?;
    let s2 = state_to_prob(rho2, reference)?;
    let dot = s.dot(&s2);
    let b_inner = b_inner_product(&s, &s2, reference)?;
    let ic_rank_on_subspace = match (pure_component(rho), pure_component(rho2)) {
        (Some(a), Some(b)) => match project_effects_to_subspace(reference, &a, &b) {
            Ok(p) => Some(p.rank),
            Err(QplexError::DegenerateSubspace { .. }) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    if dot <= 0.0 {
        return Err(QplexError::OverlapViolation { dot, subspace_rank: ic_rank_on_subspace });
    }
    Ok(OverlapReport { dot, b_inner, ic_rank_on_subspace })
}

fn pure_component(rho: &DensityMatrix) -> Option<PureState> {
    if (rho.purity() - 1.0).abs() > tol::PSD {
        return None;
    }
    decompose(rho).components.into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, trace_product};
    use crate::operator::{diag, random_density, random_pure, validate_density, Povm};
    use crate::reference::{mixed_reference, qubit_tetrahedron};
    use crate::fixtures;

    #[test]
    fn b_inner_examples() {
        let sic = qubit_tetrahedron();
        let r = sic.reference();
        let zero = state_to_prob(&DensityMatrix::from_pure(&PureState::basis(2, 0)), r).unwrap();
        let one = state_to_prob(&DensityMatrix::from_pure(&PureState::basis(2, 1)), r).unwrap();
        let mixed = state_to_prob(&DensityMatrix::maximally_mixed(2), r).unwrap();
        assert!(b_inner_product(&zero, &one, r).unwrap().abs() < 1e-12);
        assert!((b_inner_product(&zero, &zero, r).unwrap() - 1.0).abs() < 1e-12);
        assert!((b_inner_product(&mixed, &mixed, r).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn qubit_projection_is_full_space() {
        let sic = qubit_tetrahedron();
        let p = project_effects_to_subspace(sic.reference(), &PureState::basis(2, 0), &random_pure(2, 4)).unwrap();
        assert_eq!(p.rank, 4);
        assert!(p.identity_deviation < 1e-12);
        for (small, full) in p.effects.iter().zip(sic.reference().povm().matrices()) {
            let back = &p.isometry * small * p.isometry.adjoint();
            assert!(max_abs_diff(&back, full) < 1e-12);
        }
    }

    #[test]
    fn qutrit_projection_preserves_probabilities() {
        let sic = fixtures::sic(3).unwrap();
        let p = project_effects_to_subspace(sic.reference(), &PureState::basis(3, 0), &PureState::basis(3, 1)).unwrap();
        assert_eq!(p.effects.len(), 9);
        assert!(p.identity_deviation < 1e-12);
        assert_eq!(p.rank, 4);
    }

    #[test]
    fn nearly_parallel_is_degenerate() {
        let sic = qubit_tetrahedron();
        let a = PureState::basis(2, 0);
        let b = PureState::normalized(CVec::from_vec(vec![c(1.0, 0.0), c(1e-8, 0.0)])).unwrap();
        assert!(matches!(
            project_effects_to_subspace(sic.reference(), &a, &b),
            Err(QplexError::DegenerateSubspace { .. })
        ));
    }

    #[test]
    fn overlap_examples() {
        let sic = qubit_tetrahedron();
        let r = verify_overlap(
            &DensityMatrix::from_pure(&PureState::basis(2, 0)),
            &DensityMatrix::from_pure(&PureState::basis(2, 1)),
            sic.reference(),
        )
        .unwrap();
        assert!((r.dot - 1.0 / 6.0).abs() < 1e-15);
        assert!(r.b_inner.abs() < 1e-12);
        assert_eq!(r.ic_rank_on_subspace, Some(4));

        let sic3 = fixtures::sic(3).unwrap();
        let r = verify_overlap(
            &DensityMatrix::from_pure(&PureState::basis(3, 0)),
            &DensityMatrix::from_pure(&PureState::basis(3, 2)),
            sic3.reference(),
        )
        .unwrap();
        assert!((r.dot - 1.0 / 12.0).abs() < 1e-10);

        let m = DensityMatrix::maximally_mixed(3);
        let r = verify_overlap(&m, &m, sic3.reference()).unwrap();
        assert!((r.dot - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(r.ic_rank_on_subspace, None);
    }

    #[test]
    fn non_ic_reference_violates() {
        // The computational basis is not IC; orthogonal basis states get disjoint images.
        let r = ReferenceMeasurement::new(Povm::computational_basis(2));
        if let Ok(r) = r {
            let e = verify_overlap(
                &DensityMatrix::from_pure(&PureState::basis(2, 0)),
                &DensityMatrix::from_pure(&PureState::basis(2, 1)),
                &r,
            );
            assert!(matches!(e, Err(QplexError::OverlapViolation { .. })));
        }
    }

    #[test]
    fn non_minimal_reference() {
        let reference = mixed_reference(&qubit_tetrahedron(), 2.0 / 3.0).unwrap();
        let r = verify_overlap(
            &DensityMatrix::from_pure(&PureState::basis(2, 0)),
            &DensityMatrix::from_pure(&PureState::basis(2, 1)),
            &reference,
        )
        .unwrap();
        assert!(r.dot > 0.0);
        assert!(r.b_inner.abs() < 1e-10);
    }

    #[test]
    fn decompose_examples() {
        let rho = validate_density(diag(&[0.7, 0.3])).unwrap();
        let m = decompose(&rho);
        assert_eq!(m.len(), 2);
        assert!((m.weights()[0] - 0.7).abs() < 1e-15);
        assert!((m.components()[0].inner(&PureState::basis(2, 0)).norm() - 1.0).abs() < 1e-12);

        let pure = DensityMatrix::from_pure(&random_pure(3, 1));
        assert_eq!(decompose(&pure).len(), 1);

        let rho = random_density(4, 9);
        assert!(max_abs_diff(&decompose(&rho).reconstruct(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn mixing_identity_small() {
        let sic = fixtures::sic(3).unwrap();
        let r = sic.reference();
        let a = decompose(&random_density(3, 1));
        let b = decompose(&random_density(3, 2));
        let images = |m: &EigenMixture| -> Vec<ProbVector> {
            m.components().iter().map(|p| state_to_prob(&DensityMatrix::from_pure(p), r).unwrap()).collect()
        };
        let (sa, sb) = (images(&a), images(&b));
        let mut total = 0.0;
        for (ci, si) in a.weights().iter().zip(&sa) {
            for (cj, sj) in b.weights().iter().zip(&sb) {
                total += ci * cj * b_inner_product(si, sj, r).unwrap();
            }
        }
        let direct = trace_product(&a.reconstruct(), &b.reconstruct()).re;
        assert!((total - direct).abs() < 1e-10);
    }
}
