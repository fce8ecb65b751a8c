use cubic_hodge::loop_solver::{check_closed, check_gradings, euler_defect, LoopSolver};
use cubic_hodge::{JetMono, JetPoly, Rational, SigmaPoly};
use proptest::prelude::*;

fn small_poly() -> impl Strategy<Value = JetPoly> {
    let term = (-3i16..=3, 0i16..=2, 0i16..=2, 0i16..=1, -5i64..=5, 1i64..=4, 0u32..=2);
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        JetPoly::from_terms(terms.into_iter().map(|(e1, e2, e3, e4, n, d, s)| {
            let m = JetMono::from_exponents(&[0, e1, e2, e3, e4]).unwrap();
            (m, SigmaPoly::s1().pow(s).scale(&Rational::new(n, d)))
        }))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivation_obeys_leibniz(a in small_poly(), b in small_poly()) {
        let cutoff = 12;
        let lhs = (&a * &b).derive(cutoff).unwrap();
        let rhs = &(&a.derive(cutoff).unwrap() * &b) + &(&a * &b.derive(cutoff).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn solved_genera_satisfy_structural_identities() {
    let solver = LoopSolver::new(4);
    let all = solver.solve_all().unwrap();
    for g in 2u32..=4 {
        let h = &all[g as usize - 1];
        assert!(solver.residual(g, &all).unwrap().is_zero(), "loop residual at genus {g}");
        check_closed(g, &h.gradient).unwrap();
        assert!(euler_defect(g, h.polynomial()).is_zero(), "Euler identity at genus {g}");
        assert!(h.gradient[0].is_zero(), "z0-derivative at genus {g}");
        assert!(!h.provenance.z0_anomaly);
        check_gradings(g, h.polynomial()).unwrap();
    }
    assert!(solver.residual(1, &all).unwrap().is_zero());
}
