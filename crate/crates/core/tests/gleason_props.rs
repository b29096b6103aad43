use proptest::prelude::*;
use qplexkit::gleason::{
    born_values, check_frame_property, fit_regular_operator, hemisphere_effect_values, povm_gleason_feasibility,
    random_direction, BasisSet, BornFrameFunction, FrameFunctionSample, HemisphereFunction,
};
use qplexkit::operator::{random_density, random_povm, random_pure, seeded_rng, Povm};
use qplexkit::reference::qubit_tetrahedron;
use qplexkit::Exec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn born_frame_functions_are_regular(d in 2usize..=4, seed in any::<u64>()) {
        let rho = random_density(d, seed);
        let f = BornFrameFunction(rho.clone());
        let bases = BasisSet::random(d, 20, seed, Exec::Sequential);
        prop_assert!(check_frame_property(&f, &bases, 1.0, Exec::Sequential) < 1e-12);
        let sample = FrameFunctionSample::from_bases(&f, &bases, 1.0).unwrap();
        let (_, residual) = fit_regular_operator(&sample).unwrap();
        prop_assert!(residual < 1e-10);
        let assignments: Vec<(Povm, Vec<f64>)> = (0..6)
            .map(|k| {
                let p = random_povm(d, d + 1, seed.wrapping_add(k));
                let q = born_values(&rho, &p);
                (p, q)
            })
            .collect();
        prop_assert!(povm_gleason_feasibility(&assignments).unwrap().feasible);
    }

    #[test]
    fn hemisphere_is_frame_function_but_not_regular(seed in any::<u64>()) {
        let pole = random_direction(&mut seeded_rng(seed, 0));
        let f = HemisphereFunction::new(pole).unwrap();
        let bases = BasisSet::random(2, 500, seed, Exec::Sequential);
        prop_assert!(check_frame_property(&f, &bases, 1.0, Exec::Sequential) < 1e-12);
        let dirs = (0..500).map(|k| random_pure(2, seed.wrapping_add(k))).collect();
        let (_, residual) = fit_regular_operator(&FrameFunctionSample::from_vectors(&f, dirs, 1.0).unwrap()).unwrap();
        prop_assert!(residual > 0.1);
    }

    // Adding assignments never turns an infeasible list feasible.
    #[test]
    fn feasibility_is_monotone(d in 2usize..=3, n in 1usize..=6, noise in 0.0f64..0.05, seed in any::<u64>()) {
        let rho = random_density(d, seed);
        let mut rng = seeded_rng(seed, 1);
        let mut assignments: Vec<(Povm, Vec<f64>)> = Vec::new();
        for k in 0..n {
            let p = random_povm(d, 2, seed.wrapping_add(k as u64));
            let mut q = born_values(&rho, &p);
            // perturb some lists so both outcomes occur
            if k % 2 == 1 {
                let shift = noise * (rand::Rng::random::<f64>(&mut rng) - 0.5);
                q[0] += shift;
                q[1] -= shift;
            }
            assignments.push((p, q));
        }
        if d == 2 {
            let f = HemisphereFunction::new([0.0, 0.0, 1.0]).unwrap();
            let tetra = qubit_tetrahedron().reference().povm().clone();
            let q = hemisphere_effect_values(&f, &tetra).unwrap();
            assignments.push((tetra, q));
        }
        let mut was_feasible = true;
        for k in 1..=assignments.len() {
            let feasible = povm_gleason_feasibility(&assignments[..k]).unwrap().feasible;
            prop_assert!(was_feasible || !feasible, "prefix {k} became feasible");
            was_feasible = feasible;
        }
    }
}
