use proptest::prelude::*;
use wedge_eof::bounds::{
    entanglement_of_psi_prime, first3_bound, min_slack_on, scan_simplex, verify_f_table, BoundPiece, CHAIN_SLACK,
};
use wedge_eof::tensor::Cut;
use wedge_eof::xi::{
    analytic_spectrum, build_psi_prime, build_xi, check_spectrum, simplex_grid, simplex_grid_len, xi_by_partial_trace,
    ProbabilityTriple,
};

fn triple_strategy() -> impl Strategy<Value = ProbabilityTriple> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
        .prop_filter("nonzero", |(a, b, c)| a + b + c > 1e-6)
        .prop_map(|(a, b, c)| {
            let s = a + b + c;
            let (p23, p31) = (a / s, b / s);
            ProbabilityTriple::new(p23, p31, (1.0 - p23 - p31).max(0.0)).unwrap()
        })
}

#[test]
fn grid_spectrum_and_symmetric_functions() {
    let n = 60;
    let mut count = 0;
    for (i, j, k) in simplex_grid(n) {
        let p = ProbabilityTriple::from_composition(i, j, k);
        let check = check_spectrum(&p).unwrap();
        assert!(check.max_deviation <= 1e-10, "{p:?}: {}", check.max_deviation);
        assert!(check.max_residual <= 1e-12);
        let roots = check.analytic.cardan.roots;
        assert!((roots.iter().sum::<f64>() - 0.5).abs() <= 1e-12);
        assert!((roots.iter().map(|l| l * l).sum::<f64>() - 0.125).abs() <= 1e-12);
        assert!((check.analytic.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        count += 1;
    }
    assert_eq!(count, simplex_grid_len(n));
}

#[test]
fn bound_chain_on_grid() {
    let scan = scan_simplex(90).unwrap();
    assert!(scan.passed(), "{scan:?}");
    assert!(scan.equality_points.iter().all(ProbabilityTriple::is_vertex));
    assert!((scan.min_total.0 - 2.0).abs() < 1e-12);
}

#[test]
fn pointwise_bounds_and_f_table_on_fine_grids() {
    for piece in [BoundPiece::Linear, BoundPiece::Quadratic] {
        let (min, _, points) = min_slack_on(piece, 1e-4).unwrap();
        assert!(min >= -CHAIN_SLACK, "{piece:?}: {min}");
        assert!(points > 800);
    }
    let table = verify_f_table(1e-4).unwrap();
    assert!(table.passed(), "{:?}", table.violations);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn xi_constructions_agree(p in triple_strategy()) {
        let direct = build_xi(&p);
        let traced = xi_by_partial_trace(&p);
        prop_assert!((direct.entries() - traced.entries()).norm() < 1e-14);
    }

    #[test]
    fn chain_total_is_the_direct_entropy(p in triple_strategy()) {
        let report = entanglement_of_psi_prime(&p).unwrap();
        let psi = build_psi_prime(&p);
        let cut = Cut::new(psi.shape(), &[0, 1]).unwrap();
        let direct = cut.entropy(psi.as_slice(), 1e-14);
        prop_assert!((report.total - direct).abs() < 1e-9);
        prop_assert!(report.total >= 2.0 - CHAIN_SLACK);
        let c = first3_bound(&p).unwrap();
        prop_assert!(c.sum >= c.certificate - CHAIN_SLACK);
        prop_assert!(c.certificate >= 1.0 - CHAIN_SLACK);
    }

    #[test]
    fn spectrum_is_permutation_invariant(p in triple_strategy()) {
        let [a, b, c] = p.as_array();
        let q = ProbabilityTriple::new(b, c, a).unwrap();
        let x = analytic_spectrum(&p).unwrap().sorted();
        let y = analytic_spectrum(&q).unwrap().sorted();
        for (u, v) in x.iter().zip(y.iter()) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }
}
