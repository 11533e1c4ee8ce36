use decor::exceptions::{self, handler_fixture};
use decor::explicit::*;
use decor::kernel::Judgment;
use decor::model::{all_tables, check_equation, eval_exceptions, eval_states, FiniteModel, Outcome};
use decor::states::{self, build_states_theory, seven_equation_goals};
use decor::syntax::{check, Term, Theory};

fn subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    for c in t.children() {
        subterms(c, out);
    }
}

fn states_terms(th: &Theory) -> Vec<Term> {
    let mut out = Vec::new();
    let mut push_eq = |e: &decor::syntax::Equation| {
        subterms(&e.lhs, &mut out);
        subterms(&e.rhs, &mut out);
    };
    for lemma in states::LEMMAS {
        let Some(params) = states::default_params(th, lemma) else { continue };
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        if let Ok(d) = states::derive_lemma(th, lemma, &params) {
            push_eq(d.equation().unwrap());
        }
    }
    for g in seven_equation_goals(th, "x", "y", "x").unwrap() {
        for e in g.direct.iter().chain(g.observational.iter()) {
            push_eq(e);
        }
    }
    for a in &th.axioms {
        push_eq(&a.equation);
    }
    out.sort();
    out.dedup();
    out
}

#[test]
fn states_expansion_agrees_with_the_oracle() {
    let th = build_states_theory(&["x", "y"]).unwrap();
    let m = FiniteModel::new(&th, &[3, 2]);
    let terms = states_terms(&th);
    assert!(terms.len() > 40);
    for t in &terms {
        let s = check(&th, t).unwrap();
        let full = expand_states_full(&th, t).unwrap();
        for x in m.carrier(&s.dom).unwrap() {
            for st in m.states() {
                let want = eval_states(&m, t, &x, &st).unwrap();
                let input = encode_state(&m, &s.dom, &x, &st);
                let got = eval_explicit(&m, &th, &full, &input).unwrap();
                assert_eq!(decode_state(&m, &s.cod, &got).unwrap(), want, "{t} as {full}");
            }
        }
    }
}

#[test]
fn expanded_axioms_and_lemmas_hold_explicitly() {
    let th = build_states_theory(&["x", "y"]).unwrap();
    let m = FiniteModel::new(&th, &[3, 2]);
    let xt = expand_states_theory(&th).unwrap();
    let mut eqs: Vec<_> = th.axioms.iter().map(|a| a.equation.clone()).collect();
    eqs.push(states::derive_lemma(&th, "commutation-6", &["x", "y"]).unwrap().equation().unwrap().clone());
    for e in eqs {
        let x = expand_states_equation(&th, &e).unwrap();
        let (l, r) = (check(&xt, &x.lhs).unwrap(), check(&xt, &x.rhs).unwrap());
        assert_eq!((l.dom.clone(), l.cod.clone()), (r.dom, r.cod), "{x}");
        let sized = m.clone().with_carrier(STATE, m.states().len() as u32);
        for input in sized.carrier(&l.dom).unwrap() {
            assert_eq!(
                eval_explicit(&sized, &th, &x.lhs, &input).unwrap(),
                eval_explicit(&sized, &th, &x.rhs, &input).unwrap(),
                "{x} at {input}"
            );
        }
    }
}

#[test]
fn exceptions_expansion_agrees_with_the_oracle() {
    let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
    let base = FiniteModel::new(&th, &[2, 2]).with_carrier("X", 2).with_carrier("Y", 2);
    let tables = |name: &str| {
        let g = th.generator(name).unwrap();
        all_tables(&base, &g.dom, &g.cod, g.decoration).unwrap()
    };
    let mut terms = Vec::new();
    for (lemma, params) in [
        ("key-annihilation", vec!["i"]),
        ("commutation-6", vec!["i", "j"]),
        ("interaction-3", vec!["j"]),
        ("catch-throw", vec!["i", "Y"]),
        ("handler-commute", vec!["i", "j"]),
    ] {
        let d = exceptions::derive_lemma(&th, lemma, &params).unwrap();
        let Judgment::Holds(e) = d.conclusion else { unreachable!() };
        subterms(&e.lhs, &mut terms);
        subterms(&e.rhs, &mut terms);
    }
    for a in &th.axioms {
        subterms(&a.equation.lhs, &mut terms);
        subterms(&a.equation.rhs, &mut terms);
    }
    terms.sort();
    terms.dedup();
    let (fs, gs, hs) = (tables("f"), tables("g"), tables("h"));
    for k in 0..7 {
        let mut m = base.clone();
        m.interpret("f", fs[k * 11 % fs.len()].clone());
        m.interpret("g", gs[k * 13 % gs.len()].clone());
        m.interpret("h", hs[k * 17 % hs.len()].clone());
        for t in &terms {
            let s = check(&th, t).unwrap();
            let full = expand_exceptions_full(&th, t).unwrap();
            let mut inputs: Vec<Outcome> = m.carrier(&s.dom).unwrap().into_iter().map(Outcome::Value).collect();
            inputs.extend(m.exceptions().into_iter().map(Outcome::Raised));
            for o in inputs {
                let want = eval_exceptions(&m, t, &o).unwrap();
                let got = eval_explicit(&m, &th, &full, &encode_exc(&m, &s.dom, &o)).unwrap();
                assert_eq!(decode_exc(&m, &s.cod, &got).unwrap(), want, "{t} as {full} on {o:?}");
            }
        }
    }
}

#[test]
fn weak_and_strong_expansions_match_the_oracle_verdicts() {
    let th = build_states_theory(&["x", "y"]).unwrap();
    let m = FiniteModel::new(&th, &[3, 2]);
    let sized = m.clone().with_carrier(STATE, 6);
    for a in &th.axioms {
        for e in [a.equation.clone(), decor::syntax::Equation::strong(a.equation.lhs.clone(), a.equation.rhs.clone())] {
            let oracle = check_equation(&m, &th, &e).unwrap().holds();
            let x = expand_states_equation(&th, &e).unwrap();
            let l = check(&expand_states_theory(&th).unwrap(), &x.lhs).unwrap();
            let explicit = sized.carrier(&l.dom).unwrap().iter().all(|i| {
                eval_explicit(&sized, &th, &x.lhs, i).unwrap() == eval_explicit(&sized, &th, &x.rhs, i).unwrap()
            });
            assert_eq!(oracle, explicit, "{e}");
        }
    }
}
