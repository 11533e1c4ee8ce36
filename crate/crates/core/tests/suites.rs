use decor::exceptions::build_exceptions_theory;
use decor::model::{FiniteModel, Verdict};
use decor::states::build_states_theory;
use decor::suites::{verify_law_suite, LawStatus};

#[test]
fn seven_equations_hold_on_three_by_two() {
    let th = build_states_theory(&["x", "y"]).unwrap();
    let m = FiniteModel::new(&th, &[3, 2]);
    let r = verify_law_suite(&m, &th, "states-seven").unwrap();
    assert_eq!(r.laws.len(), 7);
    for l in &r.laws {
        let LawStatus::Checked(Verdict::Holds { points }) = l.status else {
            panic!("{l:?}")
        };
        assert!(points <= 54, "{}: {points}", l.law);
    }
}

#[test]
fn exceptions_laws_hold_on_two_by_two() {
    let th = build_exceptions_theory(&["i", "j"]).unwrap();
    let m = FiniteModel::new(&th, &[2, 2]);
    let r = verify_law_suite(&m, &th, "exceptions-laws").unwrap();
    assert!(r.passed(), "{r:#?}");
    let ct = r.laws.iter().find(|l| l.law == "catch-throw(i)").unwrap();
    // Out of 0 a strong check only visits the four exceptions.
    assert_eq!(ct.status, LawStatus::Checked(Verdict::Holds { points: 4 }));
    assert!(r.laws.iter().all(|l| matches!(l.status, LawStatus::Checked(_))));
}

#[test]
fn nesting_matrix_matches_the_predicted_divergence() {
    let th = build_exceptions_theory(&["i", "j"]).unwrap();
    let m = FiniteModel::new(&th, &[2, 2]);
    let r = verify_law_suite(&m, &th, "nesting-matrix").unwrap();
    let rows: Vec<(String, Vec<String>)> = r.nesting.iter().map(|n| (n.scenario.clone(), n.observed.clone())).collect();
    // h(b) is b + 1 in Y = {0, 1}.
    assert_eq!(
        rows,
        [
            ("f raises t_i(1), g raises t_j(1)".to_string(), vec!["t_j(1)".to_string(), "0".into(), "0".into()]),
            ("f raises t_j(1)".to_string(), vec!["0".to_string(), "0".into(), "t_j(1)".into()]),
        ]
    );
    assert!(r.passed());
}

#[test]
fn duality_rows_hold_on_both_sides() {
    let th = build_states_theory(&["x", "y"]).unwrap();
    let m = FiniteModel::new(&th, &[3, 2]);
    let r = verify_law_suite(&m, &th, "duality-semantic").unwrap();
    let names: Vec<(&str, &str)> = r.duality.iter().map(|d| (d.states_law.as_str(), d.exceptions_law.as_str())).collect();
    assert_eq!(
        names,
        [
            ("A1_x", "B1_x"),
            ("A1_y", "B1_y"),
            ("A2_x_y", "B2_x_y"),
            ("A2_y_x", "B2_y_x"),
            ("annihilation(x)", "key-annihilation(x)"),
            ("interaction-3(x)", "interaction-3(x)"),
            ("commutation-6(x,y)", "commutation-6(x,y)"),
        ]
    );
    assert!(r.passed(), "{r:#?}");
    let ex = build_exceptions_theory(&["x", "y"]).unwrap();
    let from_ex = verify_law_suite(&FiniteModel::new(&ex, &[3, 2]), &ex, "duality-semantic").unwrap();
    assert_eq!(from_ex.duality, r.duality);
}

#[test]
fn suites_refuse_the_wrong_flavor() {
    let th = build_states_theory(&["x", "y"]).unwrap();
    let m = FiniteModel::new(&th, &[3, 2]);
    assert!(verify_law_suite(&m, &th, "nesting-matrix").is_err());
    assert!(verify_law_suite(&m, &th, "exceptions-laws").is_err());
}
