mod common;

use proptest::prelude::*;
use qplexkit::fixtures;
use qplexkit::linalg::c;
use qplexkit::operator::{validate_povm, PureState};
use qplexkit::reference::{gram_and_b, is_informationally_complete, qubit_tetrahedron, wh_sic_from_fiducial};

fn assert_sic_invariants(sic: &qplexkit::SicPovm) {
    let d = sic.dim();
    let fid = sic.fiducial().unwrap().amplitudes().clone();
    let vecs = common::orbit(&fid);
    for (m, a) in vecs.iter().enumerate() {
        for (n, b) in vecs.iter().enumerate() {
            if m != n {
                assert!((a.dotc(b).norm_sqr() - 1.0 / (d as f64 + 1.0)).abs() <= 1e-8);
            }
        }
    }
    let mats: Vec<_> = sic.reference().povm().matrices().into_iter().cloned().collect();
    assert!(validate_povm(mats).is_ok());
    assert_eq!(is_informationally_complete(sic.reference().povm()), (true, d * d));
}

#[test]
fn bundled_fixtures_are_sics() {
    for d in 2..=5 {
        assert_sic_invariants(&fixtures::sic(d).unwrap());
    }
}

#[test]
fn tetrahedron_gram_is_analytic() {
    // G_ij = (2δ_ij + 1)/12
    let (g, b) = gram_and_b(qubit_tetrahedron().reference().povm()).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 0.25 } else { 1.0 / 12.0 };
            assert!((g[(i, j)] - expected).abs() < 1e-12);
            let b_expected = if i == j { 5.0 } else { -1.0 };
            assert!((b[(i, j)] - b_expected).abs() < 1e-10);
        }
    }
}

proptest! {
    // Phases and displacements of a SIC fiducial are again SIC fiducials.
    #[test]
    fn displaced_fiducials_stay_sic(d in 2usize..=5, k in 0usize..25, phase in 0.0f64..std::f64::consts::TAU) {
        let sic = fixtures::sic(d).unwrap();
        let fid = sic.fiducial().unwrap().amplitudes().clone();
        let moved = &common::orbit(&fid)[k % (d * d)] * c(phase.cos(), phase.sin());
        let sic2 = wh_sic_from_fiducial(&PureState::normalized(moved).unwrap(), d).unwrap();
        assert_sic_invariants(&sic2);
    }
}
