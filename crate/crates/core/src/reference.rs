//! Informationally complete reference measurements.
//!
//! A [`ReferenceMeasurement`] is any POVM whose effects span the real space of
//! Hermitian operators. Its Gramian `G[m][n] = tr(H_m H_n)` and
//! `B = G⁻¹` (Moore–Penrose pseudoinverse when N > d²) are computed once, at
//! construction. [`SicPovm`] is the equiangular rank-one special case.

use std::f64::consts::PI;

use crate::error::{QplexError, Result};
use crate::linalg::{self, c, CMat, CVec, RMat};
use crate::operator::{validate_povm, Povm, PureState};
use crate::search::{verify_equiangular, EquiangularReport};
use crate::tol;

#[derive(Debug, Clone)]
pub struct ReferenceMeasurement {
    povm: Povm,
    gram: RMat,
    b: RMat,
}

impl ReferenceMeasurement {
    pub fn new(povm: Povm) -> Result<Self> {
        let (gram, b) = gram_and_b(&povm)?;
        Ok(Self { povm, gram, b })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    /// Number of outcomes N.
    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povm.is_empty()
    }

    pub fn gram(&self) -> &RMat {
        &self.gram
    }

    pub fn b_matrix(&self) -> &RMat {
        &self.b
    }

    pub fn effect(&self, k: usize) -> &CMat {
        self.povm.effects()[k].matrix()
    }

    pub fn is_minimal(&self) -> bool {
        self.len() == self.dim() * self.dim()
    }
}

/// Gramian and its (pseudo)inverse.
pub fn gram_and_b(povm: &Povm) -> Result<(RMat, RMat)> {
    let d = povm.dim();
    let required = d * d;
    let coords = linalg::coords_matrix(&povm.matrices());
    let s = linalg::singular_values(&coords);
    let top = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&x| top > 0.0 && x > tol::RANK_REL * top).count();
    if rank < required {
        return Err(QplexError::NotInformationallyComplete { rank, required });
    }
    let gram = &coords * coords.transpose();
    let n = povm.len();
    let b = if n == required {
        gram.clone().cholesky().map(|ch| ch.inverse()).ok_or(QplexError::NotInformationallyComplete {
            rank,
            required,
        })?
    } else {
        linalg::psd_pinv(&gram, required)
    };
    // B·G must act as the identity on the row space of G
    let check = if n == required {
        linalg::max_abs_diff_real(&(&b * &gram), &RMat::identity(n, n))
    } else {
        linalg::max_abs_diff_real(&(&gram * &b * &gram), &gram)
    };
    // rounding in B·G grows with the Gram condition number
    let kappa = (top / s[required - 1]).powi(2);
    if check > tol::B_GRAM.max(64.0 * f64::EPSILON * kappa) {
        return Err(QplexError::NotInformationallyComplete { rank, required });
    }
    Ok((gram, b))
}

/// Whether the effects span all d² real dimensions, with the measured rank.
pub fn is_informationally_complete(povm: &Povm) -> (bool, usize) {
    let d = povm.dim();
    let rank = linalg::numerical_rank(&linalg::coords_matrix(&povm.matrices()));
    (rank == d * d, rank)
}

#[derive(Debug, Clone)]
pub struct SicPovm {
    reference: ReferenceMeasurement,
    fiducial: Option<PureState>,
    equiangularity: EquiangularReport,
}

impl SicPovm {
    /// Validates d² rank-one effects of trace 1/d with pairwise overlaps
    /// 1/(d+1) within `tol::SIC`.
    pub fn from_povm(povm: Povm) -> Result<Self> {
        let d = povm.dim();
        if povm.len() != d * d {
            return Err(QplexError::DimensionMismatch { expected: d * d, found: povm.len() });
        }
        for (index, e) in povm.effects().iter().enumerate() {
            let t = e.op().trace();
            if (t - 1.0 / d as f64).abs() > tol::TRACE {
                return Err(QplexError::NotSicEffect { index, reason: format!("trace {t}") });
            }
            let eig = e.op().eigenvalues();
            if d > 1 && eig[d - 2].abs() > tol::RANK_ONE {
                return Err(QplexError::NotSicEffect { index, reason: format!("second eigenvalue {:e}", eig[d - 2]) });
            }
        }
        let mats: Vec<CMat> = povm.matrices().into_iter().cloned().collect();
        let equiangularity = verify_equiangular(&mats);
        if equiangularity.deviation > tol::SIC {
            return Err(QplexError::NotEquiangular { deviation: equiangularity.deviation });
        }
        Ok(Self { reference: ReferenceMeasurement::new(povm)?, fiducial: None, equiangularity })
    }

    pub fn reference(&self) -> &ReferenceMeasurement {
        &self.reference
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn fiducial(&self) -> Option<&PureState> {
        self.fiducial.as_ref()
    }

    pub fn equiangularity(&self) -> &EquiangularReport {
        &self.equiangularity
    }

    /// Rank-one projector Π_k = d·H_k.
    pub fn projector(&self, k: usize) -> CMat {
        self.reference.effect(k) * c(self.dim() as f64, 0.0)
    }
}

impl AsRef<ReferenceMeasurement> for SicPovm {
    fn as_ref(&self) -> &ReferenceMeasurement {
        &self.reference
    }
}

impl AsRef<ReferenceMeasurement> for ReferenceMeasurement {
    fn as_ref(&self) -> &ReferenceMeasurement {
        self
    }
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[linalg::ZERO, linalg::ONE, linalg::ONE, linalg::ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[linalg::ZERO, c(0.0, -1.0), c(0.0, 1.0), linalg::ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[linalg::ONE, linalg::ZERO, linalg::ZERO, c(-1.0, 0.0)])
}

/// Tetrahedron effect H_ab = (I + (aσx + bσy + abσz)/√3) / 4.
pub fn tetrahedron_effect(a: f64, b: f64) -> CMat {
    let s = 1.0 / 3f64.sqrt();
    let bloch = pauli_x() * c(a * s, 0.0) + pauli_y() * c(b * s, 0.0) + pauli_z() * c(a * b * s, 0.0);
    (linalg::identity(2) + bloch) * c(0.25, 0.0)
}

/// The four tetrahedron effects in the order (+,+), (+,−), (−,+), (−,−).
pub fn qubit_tetrahedron() -> SicPovm {
    let raws = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(a, b)| tetrahedron_effect(a, b))
        .collect();
    let povm = validate_povm(raws).expect("tetrahedron effects form a POVM");
    SicPovm::from_povm(povm).expect("tetrahedron is a SIC")
}

/// X^p Z^q ψ with (X^p Z^q ψ)_k = ω^{q(k−p)} ψ_{k−p}, ω = e^{2πi/d}.
pub fn displace(psi: &CVec, p: usize, q: usize) -> CVec {
    let d = psi.len();
    CVec::from_fn(d, |k, _| {
        let src = (k + d - p % d) % d;
        let phase = 2.0 * PI * ((q * src) % d) as f64 / d as f64;
        cis(phase) * psi[src]
    })
}

/// (X^p Z^q)† ψ, i.e. ((X^p Z^q)† ψ)_k = ω^{−qk} ψ_{k+p}.
pub fn displace_adjoint(psi: &CVec, p: usize, q: usize) -> CVec {
    let d = psi.len();
    CVec::from_fn(d, |k, _| {
        let phase = -2.0 * PI * ((q * k) % d) as f64 / d as f64;
        cis(phase) * psi[(k + p) % d]
    })
}

pub fn displacement_matrix(d: usize, p: usize, q: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for k in 0..d {
        let col = displace(&PureState::basis(d, k).amplitudes().clone(), p, q);
        m.set_column(k, &col);
    }
    m
}

fn cis(theta: f64) -> num_complex::Complex64 {
    c(theta.cos(), theta.sin())
}

/// The d² orbit vectors, lexicographic in (p, q).
pub fn wh_orbit(fiducial: &PureState) -> Vec<CVec> {
    let d = fiducial.dim();
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            out.push(displace(fiducial.amplitudes(), p, q));
        }
    }
    out
}

/// Effects (1/d)|ψ_pq⟩⟨ψ_pq| of the Weyl–Heisenberg orbit; no validation.
pub fn wh_orbit_effects(fiducial: &PureState) -> Vec<CMat> {
    let s = c(1.0 / fiducial.dim() as f64, 0.0);
    wh_orbit(fiducial).iter().map(|v| linalg::projector(v) * s).collect()
}

pub fn wh_sic_from_fiducial(fiducial: &PureState, d: usize) -> Result<SicPovm> {
    if fiducial.dim() != d {
        return Err(QplexError::DimensionMismatch { expected: d, found: fiducial.dim() });
    }
    let effects = wh_orbit_effects(fiducial);
    let report = verify_equiangular(&effects);
    if report.deviation > tol::SIC {
        return Err(QplexError::NotEquiangular { deviation: report.deviation });
    }
    let mut sic = SicPovm::from_povm(validate_povm(effects)?)?;
    sic.fiducial = Some(fiducial.clone());
    Ok(sic)
}

/// Non-minimal IC reference: `weight`·(SIC effects) ∪ (1 − weight)·(computational
/// basis projectors), d² + d outcomes.
pub fn mixed_reference(sic: &SicPovm, weight: f64) -> Result<ReferenceMeasurement> {
    let d = sic.dim();
    let mut raws: Vec<CMat> =
        sic.reference().povm().matrices().into_iter().map(|m| m * c(weight, 0.0)).collect();
    for e in Povm::computational_basis(d).effects() {
        raws.push(e.matrix() * c(1.0 - weight, 0.0));
    }
    ReferenceMeasurement::new(validate_povm(raws)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::diag;

    #[test]
    fn tetrahedron_first_effect_matches_closed_form() {
        let s = 1.0 / 3f64.sqrt();
        let expected = CMat::from_row_slice(
            2,
            2,
            &[c(1.0 + s, 0.0), c(s, -s), c(s, s), c(1.0 - s, 0.0)],
        ) * c(0.25, 0.0);
        let sic = qubit_tetrahedron();
        assert!(linalg::max_abs_diff(sic.reference().effect(0), &expected) < 1e-15);
    }

    #[test]
    fn tetrahedron_gram_analytic() {
        let sic = qubit_tetrahedron();
        let g = sic.reference().gram();
        for m in 0..4 {
            for n in 0..4 {
                let expected = if m == n { 0.25 } else { 1.0 / 12.0 };
                assert!((g[(m, n)] - expected).abs() < 1e-12);
            }
        }
        let bg = sic.reference().b_matrix() * g;
        assert!(linalg::max_abs_diff_real(&bg, &RMat::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn commuting_effects_not_ic() {
        let povm = validate_povm(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        assert_eq!(
            gram_and_b(&povm).unwrap_err(),
            QplexError::NotInformationallyComplete { rank: 2, required: 4 }
        );
        assert_eq!(is_informationally_complete(&povm), (false, 2));
        assert_eq!(is_informationally_complete(&Povm::computational_basis(3)), (false, 3));
    }

    #[test]
    fn trine_has_rank_three() {
        let raws = (0..3)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 3.0;
                (linalg::identity(2) + pauli_x() * c(t.cos(), 0.0) + pauli_z() * c(t.sin(), 0.0))
                    * c(1.0 / 3.0, 0.0)
            })
            .collect();
        let trine = validate_povm(raws).unwrap();
        assert_eq!(is_informationally_complete(&trine), (false, 3));
    }

    #[test]
    fn tetrahedron_is_ic() {
        assert_eq!(is_informationally_complete(qubit_tetrahedron().reference().povm()), (true, 4));
    }

    #[test]
    fn wh_orbit_of_tetrahedron_eigenvector() {
        let (_, vecs) = linalg::eigh(&tetrahedron_effect(1.0, 1.0));
        let fid = PureState::from_vector(vecs.column(1).into_owned()).unwrap();
        let sic = wh_sic_from_fiducial(&fid, 2).unwrap();
        assert_eq!(sic.reference().len(), 4);
        assert!(sic.equiangularity().deviation < 1e-14);
    }

    #[test]
    fn basis_fiducial_not_equiangular() {
        let err = wh_sic_from_fiducial(&PureState::basis(2, 0), 2).unwrap_err();
        match err {
            QplexError::NotEquiangular { deviation } => assert!((deviation - 2.0 / 3.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(wh_orbit(&PureState::basis(3, 0)).len(), 9);
    }

    #[test]
    fn displacement_adjoint_consistent() {
        let psi = crate::operator::random_pure(4, 3);
        for p in 0..4 {
            for q in 0..4 {
                let m = displacement_matrix(4, p, q);
                let direct = m.adjoint() * psi.amplitudes();
                let fast = displace_adjoint(psi.amplitudes(), p, q);
                assert!((direct - fast).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn mixed_reference_six_outcomes() {
        let r = mixed_reference(&qubit_tetrahedron(), 2.0 / 3.0).unwrap();
        assert_eq!(r.len(), 6);
        assert!(!r.is_minimal());
    }
}
