use proptest::prelude::*;
use qplexkit::fixtures;
use qplexkit::operator::{random_orthogonal_with, random_pure, random_pure_with, seeded_rng, DensityMatrix, PureState};
use qplexkit::qplex::{mmd_max_set, pair_bounds_check, radii_and_dimension, PointSet};
use qplexkit::rep::{sic_params, state_to_prob, ProbVector};
use qplexkit::{tol, Exec};

fn images(sic: &qplexkit::SicPovm, states: &[PureState]) -> Vec<ProbVector> {
    states.iter().map(|s| state_to_prob(&DensityMatrix::from_pure(s), sic.reference()).unwrap()).collect()
}

#[test]
fn random_pure_images_satisfy_bounds() {
    for d in 2..=4 {
        let sic = fixtures::sic(d).unwrap();
        let states: Vec<PureState> = (0..10_000).map(|k| random_pure(d, k)).collect();
        let set = PointSet::new(images(&sic, &states), sic_params(d)).unwrap();
        let report = pair_bounds_check(&set, d, Exec::Parallel).unwrap();
        assert!(report.violations.is_empty(), "d={d}: {:?}", &report.violations[..3.min(report.violations.len())]);
    }
}

#[test]
fn basis_images_have_mmd_dimension() {
    for d in 2..=5 {
        let sic = fixtures::sic(d).unwrap();
        let basis: Vec<PureState> = (0..d).map(|k| PureState::basis(d, k)).collect();
        let set = PointSet::new(images(&sic, &basis), sic_params(d)).unwrap();
        assert_eq!(mmd_max_set(&set, tol::MMD_SATURATION, tol::MMD_BUDGET).unwrap().size, d);
    }
}

#[test]
fn dimension_estimate_is_integer() {
    for d in 2..=5 {
        let sic = fixtures::sic(d).unwrap();
        let states: Vec<PureState> = (0..50).map(|k| random_pure(d, 900 + k)).collect();
        let r = radii_and_dimension(&PointSet::new(images(&sic, &states), sic_params(d)).unwrap());
        assert!((r.d_estimate - d as f64).abs() < 1e-6);
        assert!(r.radii.is_ordered());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Saturating pairs are exactly the orthogonal pairs.
    #[test]
    fn saturation_is_orthogonality(d in 2usize..=4, seed in any::<u64>()) {
        let sic = fixtures::sic(d).unwrap();
        let mut rng = seeded_rng(seed, 0);
        let mut states = Vec::new();
        for _ in 0..6 {
            let a = random_pure_with(d, &mut rng);
            let b = random_orthogonal_with(&a, &mut rng);
            states.push(a);
            states.push(b);
        }
        let set = PointSet::new(images(&sic, &states), sic_params(d)).unwrap();
        let report = pair_bounds_check(&set, d, Exec::Sequential).unwrap();
        let orthogonal: Vec<(usize, usize)> = (0..states.len())
            .flat_map(|i| (i + 1..states.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| states[i].inner(&states[j]).norm_sqr() < 1e-9)
            .collect();
        prop_assert_eq!(report.saturating, orthogonal);
    }
}
