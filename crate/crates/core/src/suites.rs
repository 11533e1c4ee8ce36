//! Named law suites run against finite models.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exceptions::{self, handle_term, handler_fixture, HandlerSpec};
use crate::explicit::holds_explicitly;
use crate::model::{all_tables, check_equation, eval_exceptions, Elem, Exc, FiniteModel, Outcome, Table, Verdict};
use crate::states::{self, seven_equation_goals};
use crate::syntax::{Equation, Flavor, Term, Theory, Type};
use crate::translate::{dual_label, dualize_equation, dualize_theory, same_equation};

pub const SUITES: &[&str] = &["states-seven", "exceptions-laws", "nesting-matrix", "duality-semantic"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LawStatus {
    Checked(Verdict),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub equations: Vec<String>,
    pub status: LawStatus,
}

impl LawCheck {
    /// Skipped laws count as passing.
    pub fn ok(&self) -> bool {
        match &self.status {
            LawStatus::Checked(v) => v.holds(),
            LawStatus::Skipped(_) => true,
        }
    }
}

/// Observed and predicted results of the three nestings on one scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestingRow {
    pub scenario: String,
    pub observed: Vec<String>,
    pub predicted: Vec<String>,
}

/// A states law and its dual exceptions law, each checked decorated and explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualRow {
    pub states_law: String,
    pub exceptions_law: String,
    pub states: Verdict,
    pub exceptions: Verdict,
    pub states_explicit: bool,
    pub exceptions_explicit: bool,
    /// The dual of the states equation is the exceptions equation.
    pub matched: bool,
}

impl DualRow {
    pub fn ok(&self) -> bool {
        self.states.holds() && self.exceptions.holds() && self.states_explicit && self.exceptions_explicit && self.matched
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub laws: Vec<LawCheck>,
    pub nesting: Vec<NestingRow>,
    pub duality: Vec<DualRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(LawCheck::ok)
            && self.nesting.iter().all(|r| r.observed == r.predicted)
            && self.duality.iter().all(DualRow::ok)
    }

    /// Total enumerated points.
    pub fn points(&self) -> u64 {
        let of = |v: &Verdict| match v {
            Verdict::Holds { points } => *points,
            Verdict::Fails { .. } => 0,
        };
        let laws: u64 = self
            .laws
            .iter()
            .map(|l| match &l.status {
                LawStatus::Checked(v) => of(v),
                LawStatus::Skipped(_) => 0,
            })
            .sum();
        laws + self.duality.iter().map(|r| of(&r.states) + of(&r.exceptions)).sum::<u64>()
    }
}

/// Runs the suite named `suite` on `model`, a model of `theory`.
pub fn verify_law_suite(model: &FiniteModel, theory: &Theory, suite: &str) -> Result<SuiteReport, Error> {
    let mut report = SuiteReport {
        suite: suite.to_string(),
        ..SuiteReport::default()
    };
    match suite {
        "states-seven" => report.laws = states_seven(model, theory)?,
        "exceptions-laws" => report.laws = exceptions_laws(model, theory)?,
        "nesting-matrix" => report.nesting = nesting_matrix(model, theory)?,
        "duality-semantic" => report.duality = duality_semantic(model, theory)?,
        _ => return Err(Error::SuiteUnknown(suite.to_string())),
    }
    Ok(report)
}

fn require(theory: &Theory, flavor: Flavor, suite: &str) -> Result<(), Error> {
    if theory.flavor == flavor {
        Ok(())
    } else {
        Err(Error::Flavor(format!("suite {suite} needs a {flavor:?} theory")))
    }
}

/// Checks every equation of a law; the first failure decides.
fn check_all(model: &FiniteModel, theory: &Theory, law: &str, eqs: &[Equation]) -> Result<LawCheck, Error> {
    let mut points = 0;
    let mut status = None;
    for e in eqs {
        match check_equation(model, theory, e)? {
            Verdict::Holds { points: n } => points += n,
            fails => {
                status = Some(LawStatus::Checked(fails));
                break;
            }
        }
    }
    Ok(LawCheck {
        law: law.to_string(),
        equations: eqs.iter().map(ToString::to_string).collect(),
        status: status.unwrap_or(LawStatus::Checked(Verdict::Holds { points })),
    })
}

fn skipped(law: &str, why: &str) -> LawCheck {
    LawCheck {
        law: law.to_string(),
        equations: Vec::new(),
        status: LawStatus::Skipped(why.to_string()),
    }
}

fn states_seven(model: &FiniteModel, theory: &Theory) -> Result<Vec<LawCheck>, Error> {
    require(theory, Flavor::States, "states-seven")?;
    let ix = &theory.indices;
    let Some(i) = ix.first() else {
        return Err(Error::BadParams("states-seven needs a location".into()));
    };
    let Some(j) = ix.get(1) else {
        return Ok(vec![skipped("states-seven", "the seven equations need two locations")]);
    };
    seven_equation_goals(theory, i, j, i)?
        .iter()
        .map(|g| check_all(model, theory, &format!("{} {}", g.number, g.name), &g.direct))
        .collect()
}

fn conclusion(d: crate::kernel::Derivation) -> Equation {
    d.equation().expect("lemmas conclude equations").clone()
}

/// Checks `eq` under every interpretation of the fixture's `f`, `g`, `h`.
fn all_interpretations(base: &FiniteModel, th: &Theory, law: &str, eq: &Equation) -> Result<LawCheck, Error> {
    let tables = |name: &str| -> Result<Vec<Table>, Error> {
        let g = th.generator(name).expect("fixture generator");
        Ok(all_tables(base, &g.dom, &g.cod, g.decoration)?)
    };
    let (fs, gs, hs) = (tables("f")?, tables("g")?, tables("h")?);
    let mut points = 0;
    let mut m = base.clone();
    for f in &fs {
        m.interpret("f", f.clone());
        for g in &gs {
            m.interpret("g", g.clone());
            for h in &hs {
                m.interpret("h", h.clone());
                match check_equation(&m, th, eq)? {
                    Verdict::Holds { points: n } => points += n,
                    fails => {
                        return Ok(LawCheck {
                            law: law.to_string(),
                            equations: vec![eq.to_string()],
                            status: LawStatus::Checked(fails),
                        })
                    }
                }
            }
        }
    }
    Ok(LawCheck {
        law: law.to_string(),
        equations: vec![eq.to_string()],
        status: LawStatus::Checked(Verdict::Holds { points }),
    })
}

/// Fixture model with `X` of one element and `Y` of two.
fn fixture_model(th: &Theory, sizes: &[u32], named: &BTreeMap<String, u32>) -> FiniteModel {
    let mut m = FiniteModel::new(th, sizes).with_carrier("X", 1).with_carrier("Y", 2);
    m.named.extend(named.clone());
    m
}

fn exceptions_laws(model: &FiniteModel, theory: &Theory) -> Result<Vec<LawCheck>, Error> {
    require(theory, Flavor::Exceptions, "exceptions-laws")?;
    let mut out = Vec::new();
    let ix = theory.indices.clone();
    for a in &theory.axioms {
        out.push(check_all(model, theory, &a.label, std::slice::from_ref(&a.equation))?);
    }
    if ix.len() < 2 {
        out.push(skipped("B2", "needs two constructors"));
    }
    let mut with_y = model.clone();
    with_y.named.entry("Y".into()).or_insert(2);
    for i in &ix {
        for lemma in ["key-annihilation", "interaction-3"] {
            let e = conclusion(exceptions::derive_lemma(theory, lemma, &[i])?);
            out.push(check_all(model, theory, &format!("{lemma}({i})"), &[e])?);
        }
        let e = conclusion(exceptions::derive_lemma(theory, "catch-throw", &[i, "Y"])?);
        out.push(check_all(&with_y, theory, &format!("catch-throw({i})"), &[e])?);
    }
    // Every table of `f`, `g`, `h` is enumerated, so parameters stay small.
    let small: Vec<u32> = model.sizes.iter().map(|&k| k.min(2)).collect();
    let pairs: Vec<(&String, &String)> = ix
        .iter()
        .flat_map(|i| ix.iter().filter(move |j| *j != i).map(move |j| (i, j)))
        .collect();
    for &(i, j) in &pairs {
        let e = conclusion(exceptions::derive_lemma(theory, "commutation-6", &[i, j])?);
        out.push(check_all(model, theory, &format!("commutation-6({i},{j})"), &[e])?);
        let th = handler_fixture(&ix.iter().map(String::as_str).collect::<Vec<_>>(), i, j)?;
        let e = conclusion(exceptions::derive_lemma(&th, "handler-commute", &[i, j])?);
        out.push(all_interpretations(&fixture_model(&th, &small, &model.named), &th, &format!("handler-commute({i},{j})"), &e)?);
    }
    if pairs.is_empty() {
        out.push(skipped("commutation-6", "needs two constructors"));
        out.push(skipped("handler-commute", "needs two constructors"));
    }
    for i in &ix {
        let th = handler_fixture(&ix.iter().map(String::as_str).collect::<Vec<_>>(), i, i)?;
        let e = conclusion(exceptions::derive_lemma(&th, "handler-idempotent", &[i])?);
        out.push(all_interpretations(&fixture_model(&th, &small, &model.named), &th, &format!("handler-idempotent({i})"), &e)?);
    }
    Ok(out)
}

/// The three nestings of `f` with handlers `i ⇒ g` and `j ⇒ h`:
/// one handler with two clauses, two handlers in sequence, and a handler
/// whose clause is itself handled.
pub fn nesting_variants(theory: &Theory, i: &str, j: &str) -> Result<[Term; 3], Error> {
    let user = |n: &str| {
        theory
            .generator(n)
            .map(|g| g.term())
            .ok_or_else(|| Error::BadParams(format!("no generator `{n}`")))
    };
    let (f, g, h) = (user("f")?, user("g")?, user("h")?);
    let handle = |body: Term, clauses: Vec<(&str, Term)>| -> Result<Term, Error> {
        let spec = HandlerSpec {
            body,
            clauses: clauses.into_iter().map(|(i, g)| (i.to_string(), g)).collect(),
            catch_all: None,
        };
        Ok(handle_term(theory, &spec)?.term)
    };
    let one = handle(f.clone(), vec![(i, g.clone()), (j, h.clone())])?;
    let two = handle(handle(f.clone(), vec![(i, g.clone())])?, vec![(j, h.clone())])?;
    let three = handle(f, vec![(i, handle(g, vec![(j, h)])?)])?;
    Ok([one, two, three])
}

/// Table of a propagator from a function on values.
fn propagator(model: &FiniteModel, dom: &Type, f: impl Fn(&Elem) -> Outcome) -> Result<Table, Error> {
    let mut t = HashMap::new();
    for x in model.carrier(dom)? {
        t.insert(Outcome::Value(x.clone()), f(&x));
    }
    for e in model.exceptions() {
        t.insert(Outcome::Raised(e), Outcome::Raised(e));
    }
    Ok(Table::Exceptions(t))
}

fn nesting_matrix(model: &FiniteModel, theory: &Theory) -> Result<Vec<NestingRow>, Error> {
    require(theory, Flavor::Exceptions, "nesting-matrix")?;
    let ix: Vec<&str> = theory.indices.iter().map(String::as_str).collect();
    let [i, j] = ix[..] else {
        return Err(Error::BadParams("nesting-matrix needs exactly two constructors".into()));
    };
    let (ci, cj) = (0, 1);
    let th = handler_fixture(&ix, i, j)?;
    let base = fixture_model(&th, &model.sizes, &model.named);
    let variants = nesting_variants(&th, i, j)?;
    let y = base.carrier_size(&Type::named("Y"))? as u32;
    let (a, b) = (model.sizes[ci] - 1, model.sizes[cj] - 1);
    let hv = |b: u32| Outcome::Value(Elem::Atom((b + 1) % y));
    let raise = |ctor: usize, arg: u32| Outcome::Raised(Exc { ctor, arg });
    let scenarios = [
        (
            format!("f raises t_{i}({a}), g raises t_{j}({b})"),
            raise(ci, a),
            raise(cj, b),
            [raise(cj, b), hv(b), hv(b)],
        ),
        (
            format!("f raises t_{j}({b})"),
            raise(cj, b),
            Outcome::Value(Elem::Atom(0)),
            [hv(b), hv(b), raise(cj, b)],
        ),
    ];
    let mut rows = Vec::new();
    for (name, f_out, g_out, predicted) in scenarios {
        let mut m = base.clone();
        m.interpret("f", propagator(&m, &Type::named("X"), |_| f_out.clone())?);
        m.interpret("g", propagator(&m, &Type::param(i), |_| g_out.clone())?);
        m.interpret(
            "h",
            propagator(&m, &Type::param(j), |x| match x {
                Elem::Atom(b) => hv(*b),
                _ => unreachable!(),
            })?,
        );
        let observed = variants
            .iter()
            .map(|t| eval_exceptions(&m, t, &Outcome::Value(Elem::Atom(0))).map(|o| m.render_outcome(&o)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(NestingRow {
            scenario: name,
            observed,
            predicted: predicted.iter().map(|o| m.render_outcome(o)).collect(),
        });
    }
    Ok(rows)
}

/// States lemmas and their exceptions duals.
const DUAL_LEMMAS: &[(&str, &str)] = &[
    ("annihilation", "key-annihilation"),
    ("interaction-3", "interaction-3"),
    ("commutation-6", "commutation-6"),
];

fn duality_semantic(model: &FiniteModel, theory: &Theory) -> Result<Vec<DualRow>, Error> {
    let (st, ex) = match theory.flavor {
        Flavor::States => (theory.clone(), dualize_theory(theory)?),
        Flavor::Exceptions => (dualize_theory(theory)?, theory.clone()),
        Flavor::Plain => return Err(Error::Flavor("duality-semantic needs an effect theory".into())),
    };
    let (sm, em) = (FiniteModel::new(&st, &model.sizes), FiniteModel::new(&ex, &model.sizes));
    let mut pairs: Vec<(String, Equation, String, Equation)> = Vec::new();
    for a in &st.axioms {
        let label = dual_label(&a.label);
        let (_, b) = ex
            .axiom(&label)
            .ok_or_else(|| Error::BadParams(format!("no dual axiom {label}")))?;
        pairs.push((a.label.clone(), a.equation.clone(), label, b.equation.clone()));
    }
    for &(s, e) in DUAL_LEMMAS {
        let Some(params) = states::default_params(&st, s) else { continue };
        if s == "commutation-6" && st.indices.len() < 2 {
            continue;
        }
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let se = conclusion(states::derive_lemma(&st, s, &params)?);
        let ee = conclusion(exceptions::derive_lemma(&ex, e, &params)?);
        let p = params.join(",");
        pairs.push((format!("{s}({p})"), se, format!("{e}({p})"), ee));
    }
    pairs
        .into_iter()
        .map(|(sl, se, el, ee)| {
            Ok(DualRow {
                matched: same_equation(&dualize_equation(&st, &se)?, &ee),
                states: check_equation(&sm, &st, &se)?,
                exceptions: check_equation(&em, &ex, &ee)?,
                states_explicit: holds_explicitly(&sm, &st, &se)?,
                exceptions_explicit: holds_explicitly(&em, &ex, &ee)?,
                states_law: sl,
                exceptions_law: el,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exceptions::build_exceptions_theory;
    use crate::states::build_states_theory;

    #[test]
    fn unknown_suites_are_reported() {
        let th = build_states_theory(&["x"]).unwrap();
        let m = FiniteModel::new(&th, &[2]);
        assert_eq!(verify_law_suite(&m, &th, "nope"), Err(Error::SuiteUnknown("nope".into())));
    }

    #[test]
    fn single_constructor_skips_pairwise_laws() {
        let th = build_exceptions_theory(&["i"]).unwrap();
        let m = FiniteModel::new(&th, &[2]);
        let r = verify_law_suite(&m, &th, "exceptions-laws").unwrap();
        assert!(r.passed());
        let skipped: Vec<&str> = r
            .laws
            .iter()
            .filter(|l| matches!(l.status, LawStatus::Skipped(_)))
            .map(|l| l.law.as_str())
            .collect();
        assert_eq!(skipped, ["B2", "commutation-6", "handler-commute"]);
        assert!(r.laws.iter().any(|l| l.law == "B1_i" && l.ok()));
        assert!(r.laws.iter().any(|l| l.law == "catch-throw(i)" && l.ok()));
    }

    #[test]
    fn nesting_variants_render() {
        let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
        let [one, two, three] = nesting_variants(&th, "i", "j").unwrap();
        assert_eq!(one.to_string(), "coerce(case(id[Y] | case(g | h . c_j) . c_i) . f)");
        assert_eq!(
            two.to_string(),
            "coerce(case(id[Y] | h . c_j) . coerce(case(id[Y] | g . c_i) . f))"
        );
        assert_eq!(
            three.to_string(),
            "coerce(case(id[Y] | coerce(case(id[Y] | h . c_j) . g) . c_i) . f)"
        );
    }
}
