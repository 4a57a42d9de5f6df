use nalgebra::{DMatrix, Matrix3};
use proptest::prelude::*;
use wedge_eof::antisym::{
    alignment_error, alignment_residual, antisym_residual, lemma1_unitary, lemma1_unitary_with_branch,
    pure_antisym_entanglement, states_from_columns, theta_map, theta_psi, unitarity_residual3, wedge_action,
    RootBranch,
};
use wedge_eof::sample::{random_antisym_state, rng_for};
use wedge_eof::tensor::haar_unitary;
use wedge_eof::C64;

fn m3(u: &DMatrix<C64>) -> Matrix3<C64> {
    Matrix3::from_fn(|i, j| u[(i, j)])
}

fn haar3(seed: u64, stream: u64) -> Matrix3<C64> {
    m3(&haar_unitary(3, &mut rng_for(seed, stream)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wedge_action_is_a_representation(seed in any::<u64>()) {
        let u = haar3(seed, 0);
        let v = haar3(seed, 1);
        let uv = wedge_action(&(u * v), 1e-10).unwrap();
        let prod = wedge_action(&u, 1e-10).unwrap() * wedge_action(&v, 1e-10).unwrap();
        prop_assert!((uv - prod).norm() < 1e-13);
        prop_assert!(unitarity_residual3(&uv) < 1e-13);
    }

    #[test]
    fn cofactor_map_is_multiplicative(seed in any::<u64>()) {
        let u = haar3(seed, 2);
        let v = haar3(seed, 3);
        prop_assert!((theta_map(&(u * v)) - theta_map(&u) * theta_map(&v)).norm() < 1e-13);
    }

    #[test]
    fn local_unitaries_preserve_antisymmetry_and_entanglement(seed in any::<u64>()) {
        let a = random_antisym_state(&mut rng_for(seed, 4));
        let u = haar_unitary(3, &mut rng_for(seed, 5));
        let moved = a.embed().apply(&u.kronecker(&u)).unwrap();
        prop_assert!(antisym_residual(&moved) < 1e-14);
        prop_assert!((pure_antisym_entanglement(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aligning_unitary_maps_any_basis_to_the_wedge_basis(seed in any::<u64>()) {
        let basis = states_from_columns(&haar3(seed, 6));
        for branch in [RootBranch::Principal, RootBranch::Negated] {
            let u = lemma1_unitary_with_branch(&basis, 1e-10, branch).unwrap();
            prop_assert!(unitarity_residual3(&u) < 1e-12);
            prop_assert!(alignment_error(&u, &basis) < 1e-12);
        }
        let theta = theta_psi(&basis, 1e-10).unwrap();
        let u = lemma1_unitary(&basis, 1e-10).unwrap();
        prop_assert!((wedge_action(&u, 1e-10).unwrap() - theta).norm() < 1e-12);
    }
}

#[test]
fn aligning_unitary_on_many_haar_bases() {
    let mut worst = 0.0f64;
    for i in 0..500 {
        let basis = states_from_columns(&haar3(17, i));
        let u = lemma1_unitary(&basis, 1e-10).unwrap();
        worst = worst.max(unitarity_residual3(&u)).max(alignment_residual(&u, &basis));
    }
    assert!(worst < 1e-12, "worst residual {worst}");
}

#[test]
fn global_phases_on_basis_vectors_are_absorbed_up_to_phase() {
    let c = haar3(3, 0);
    let phases = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        C64::from_polar(1.0, 0.3),
        C64::from_polar(1.0, -1.1),
        C64::from_polar(1.0, 2.0),
    ));
    let basis = states_from_columns(&(c * phases));
    let u = lemma1_unitary(&basis, 1e-10).unwrap();
    assert!(alignment_residual(&u, &basis) < 1e-12);
    assert!(alignment_error(&u, &basis) < 1e-12);
}
