use cubic_hodge::ptensor::PTensorTable;
use cubic_hodge::virasoro::{
    a_coefficient, bridge_check, btilde11_closed_form_check, commutator_grid, integral_identity_check,
    v_asymptotics_check, RationalParams, VTable,
};

const PAIRS: [(i64, i64); 3] = [(1, 2), (2, 3), (3, 4)];

#[test]
fn commutators_on_cubic_basis() {
    for (k1, k2) in PAIRS {
        let p = RationalParams::new(k1, k2).unwrap();
        for cell in commutator_grid(&p, 3, 3).unwrap() {
            assert_eq!(cell.failures, 0, "({k1},{k2}) [L{}, L{}]: {:?}", cell.m, cell.n, cell.first_failing);
        }
    }
}

#[test]
fn direct_sums_match_loop_tensors() {
    let table = PTensorTable::new(4);
    for (k1, k2) in PAIRS {
        let p = RationalParams::new(k1, k2).unwrap();
        let vt = VTable::new(&p, 14);
        for n in 0..=12 {
            assert_eq!(a_coefficient(&vt, 0, n).unwrap(), p.big_k().pow(n as i32));
        }
        bridge_check(&vt, &table, 4, 8).unwrap();
        btilde11_closed_form_check(&vt, 10).unwrap();
        integral_identity_check(&vt, 10).unwrap();
        v_asymptotics_check(&vt, 8).unwrap();
    }
}
