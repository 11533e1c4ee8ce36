use decor::exceptions::{build_exceptions_theory, derive_lemma, handler_fixture};
use decor::kernel::{check_derivation, Derivation, Judgment};
use decor::model::{all_tables, check_equation, FiniteModel};
use decor::syntax::{Equation, Theory, Type};
use decor::Error;

fn accepted(th: &Theory, lemma: &str, params: &[&str]) -> (Derivation, Equation) {
    let d = derive_lemma(th, lemma, params).unwrap_or_else(|e| panic!("{lemma}: {e}"));
    let report = check_derivation(th, &d);
    assert!(report.is_valid(), "{lemma}{params:?}: {report:?}");
    let Judgment::Holds(eq) = d.conclusion.clone() else {
        panic!("{lemma} concludes no equation")
    };
    (d, eq)
}

#[test]
fn core_lemmas_check_and_hold() {
    let th = build_exceptions_theory(&["i", "j"]).unwrap();
    let m = FiniteModel::new(&th, &[2, 2]);
    let mut cases = vec![];
    for i in ["i", "j"] {
        cases.push(("key-annihilation", vec![i]));
        cases.push(("interaction-3", vec![i]));
        cases.push(("catch-throw", vec![i]));
    }
    cases.push(("commutation-6", vec!["i", "j"]));
    cases.push(("commutation-6", vec!["j", "i"]));
    for (lemma, params) in cases {
        let (_, eq) = accepted(&th, lemma, &params);
        let v = check_equation(&m, &th, &eq).unwrap();
        assert!(v.holds(), "{lemma}{params:?}: {eq}: {v:?}");
    }
}

#[test]
fn catch_throw_into_a_named_type() {
    let th = build_exceptions_theory(&["i", "j"]).unwrap();
    let (_, eq) = accepted(&th, "catch-throw", &["j", "Y"]);
    let m = FiniteModel::new(&th, &[2, 2]).with_carrier("Y", 3);
    assert!(check_equation(&m, &th, &eq).unwrap().holds());
}

/// Checks `eq` under every interpretation of the fixture's `f`, `g`, `h`.
fn holds_for_all_tables(th: &Theory, eq: &Equation) -> usize {
    let base = FiniteModel::new(th, &[2, 2]).with_carrier("X", 1).with_carrier("Y", 2);
    let tables = |name: &str| {
        let g = th.generator(name).unwrap();
        all_tables(&base, &g.dom, &g.cod, g.decoration).unwrap()
    };
    let (fs, gs, hs) = (tables("f"), tables("g"), tables("h"));
    let mut n = 0;
    for f in &fs {
        for g in &gs {
            for h in &hs {
                let mut m = base.clone();
                m.interpret("f", f.clone());
                m.interpret("g", g.clone());
                m.interpret("h", h.clone());
                let v = check_equation(&m, th, eq).unwrap();
                assert!(v.holds(), "{eq}: {v:?}");
                n += 1;
            }
        }
    }
    n
}

#[test]
fn handler_commute_holds_in_every_model() {
    let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
    let (_, eq) = accepted(&th, "handler-commute", &["i", "j"]);
    assert_eq!(holds_for_all_tables(&th, &eq), 6 * 36 * 36);
}

#[test]
fn handler_idempotent_holds_in_every_model() {
    let th = handler_fixture(&["i", "j"], "i", "i").unwrap();
    let (_, eq) = accepted(&th, "handler-idempotent", &["i"]);
    assert!(eq.to_string().starts_with("coerce(case(id[Y] | case(g | h . c_i) . c_i) . f) == "));
    holds_for_all_tables(&th, &eq);
}

#[test]
fn bad_parameters_are_reported() {
    let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
    assert!(matches!(
        derive_lemma(&th, "handler-commute", &["i", "i"]),
        Err(Error::BadParams(_))
    ));
    assert!(matches!(
        derive_lemma(&th, "handler-idempotent", &["i"]),
        Err(Error::BadParams(_))
    ));
    assert!(matches!(derive_lemma(&th, "nope", &[]), Err(Error::UnknownLemma(_))));
    let bare = build_exceptions_theory(&["i"]).unwrap();
    assert!(matches!(
        derive_lemma(&bare, "catch-throw", &["k"]),
        Err(Error::BadParams(_))
    ));
    assert!(derive_lemma(&bare, "catch-throw", &["i", "1"]).is_ok());
    assert_eq!(Type::param("i").to_string(), "P_i");
}
