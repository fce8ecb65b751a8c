use cubic_hodge::algebra::format::{jet_to_text, parse_jet, parse_sigma};
use cubic_hodge::hodge::{faber_leading, r_poly};
use cubic_hodge::loop_solver::LoopSolver;
use cubic_hodge::JetPoly;

fn read(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn jet(name: &str) -> JetPoly {
    parse_jet(&read(name)).unwrap()
}

/// The printed genus-three list with `z₂³z₃/z₁⁵` carrying its missing `σ₁`.
fn h3_expected() -> JetPoly {
    let printed = jet("h3_printed.txt");
    let wrong = parse_jet("-(9343/1451520)*z1^-5*z2^3*z3").unwrap();
    let right = parse_jet("-(9343/1451520)*s1*z1^-5*z2^3*z3").unwrap();
    assert_eq!(printed.coeff(wrong.terms().next().unwrap().0), wrong.terms().next().unwrap().1.clone());
    &(&printed - &wrong) + &right
}

#[test]
fn genus_one_and_two() {
    let all = LoopSolver::new(2).solve_all().unwrap();
    let h1 = &all[0];
    assert_eq!(h1.log_z1().unwrap().to_string(), "1/24");
    assert_eq!(jet_to_text(h1.polynomial()), "(1/24)*s1*z0");
    assert_eq!(all[1].polynomial(), &jet("h2.txt"));
}

#[test]
fn genus_three_matches_printed_list() {
    let all = LoopSolver::new(3).solve_all().unwrap();
    let h3 = all[2].polynomial();
    let expected = h3_expected();
    assert_eq!(h3, &expected, "difference: {}", jet_to_text(&(h3 - &expected)));
    assert_eq!(h3.len(), 29);
}

#[test]
fn gap_polynomials_and_faber_term() {
    let all = LoopSolver::new(5).solve_all().unwrap();
    let printed = [parse_sigma(&read("r2_printed.txt")).unwrap(), parse_sigma(&read("r3_printed.txt")).unwrap()];
    for (g, r) in [(2u32, &printed[0]), (3, &printed[1])] {
        let computed = r_poly(&all[g as usize - 1]).unwrap();
        assert_eq!(&computed, r, "R_{g}");
    }
    for g in 2u32..=5 {
        let r = r_poly(&all[g as usize - 1]).unwrap();
        let top = r.weighted_part(3 * g - 3);
        assert_eq!(top, faber_leading(g).unwrap(), "Faber term at genus {g}");
        if g <= 3 {
            assert_eq!(top, printed[g as usize - 2].weighted_part(3 * g - 3));
        }
    }
}
