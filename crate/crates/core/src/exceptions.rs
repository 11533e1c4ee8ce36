//! The decorated theory of exceptions, handlers and its lemma catalog.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernel::{inst, Derivation, Prover, RuleId};
use crate::states::{self, semi_laws, SemiPure};
use crate::syntax::{check, Decoration, Equation, Flavor, Generator, Role, Term, Theory, Type};
use crate::translate::{dualize_derivation, dualize_theory};

/// Lemmas provable by [`derive_lemma`] in an exceptions theory.
pub const LEMMAS: &[&str] = &[
    "key-annihilation",
    "commutation-6",
    "interaction-3",
    "catch-throw",
    "handler-commute",
    "handler-idempotent",
];

/// Name of the catch-all catcher added by [`handle_term`].
pub const CATCH_ALL: &str = "c_all";

/// Exceptions theory over `constructors`: key throws, key catches and their weak axioms.
pub fn build_exceptions_theory(constructors: &[&str]) -> Result<Theory, Error> {
    let mut th = Theory {
        flavor: Flavor::Exceptions,
        indices: Vec::new(),
        generators: Vec::new(),
        axioms: Vec::new(),
    };
    for &i in constructors {
        if th.indices.iter().any(|x| x == i) {
            return Err(Error::DuplicateConstructor(i.to_string()));
        }
        th.indices.push(i.to_string());
    }
    for i in constructors {
        th.add_generator(Generator {
            name: format!("t_{i}"),
            dom: Type::param(i),
            cod: Type::Empty,
            decoration: Decoration::Accessor,
            role: Role::Throw(i.to_string()),
        })?;
        th.add_generator(Generator {
            name: format!("c_{i}"),
            dom: Type::Empty,
            cod: Type::param(i),
            decoration: Decoration::Modifier,
            role: Role::Catch(i.to_string()),
        })?;
    }
    for i in constructors {
        let (t, c) = (th.throw(i).unwrap(), th.catch(i).unwrap());
        th.add_axiom(
            &format!("B1_{i}"),
            Equation::weak(Term::comp(c, t), Term::Id(Type::param(i))),
        )?;
    }
    for i in constructors {
        for j in constructors.iter().filter(|j| *j != i) {
            let tj = th.throw(j).unwrap();
            th.add_axiom(
                &format!("B2_{i}_{j}"),
                Equation::weak(
                    Term::comp(th.catch(i).unwrap(), tj.clone()),
                    Term::comp(Term::FromEmpty(Type::param(i)), tj),
                ),
            )?;
        }
    }
    Ok(th)
}

fn constructor<'a>(theory: &Theory, i: &'a str) -> Result<&'a str, Error> {
    if theory.indices.iter().any(|x| x == i) && theory.throw(i).is_some() {
        Ok(i)
    } else {
        Err(Error::UnknownConstructor(i.to_string()))
    }
}

/// `[]_Y ∘ t_i : P_i → Y`
pub fn raise_term(theory: &Theory, i: &str, y: &Type) -> Result<Term, Error> {
    let t = theory
        .throw(constructor(theory, i)?)
        .ok_or_else(|| Error::UnknownConstructor(i.to_string()))?;
    let r = Term::comp(Term::FromEmpty(y.clone()), t);
    check(theory, &r)?;
    Ok(r)
}

/// `try body catch(i₁ ⇒ g₁, …)`, optionally ending with a catch-all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandlerSpec {
    pub body: Term,
    pub clauses: Vec<(String, Term)>,
    /// Handler `1 → Y` for every exception not caught before.
    pub catch_all: Option<Term>,
}

/// A handler with its intermediate stages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handler {
    /// `[g₁ | [g₂ | … ] ∘ c_{i₂}] ∘ c_{i₁} : 0 → Y`
    pub chain: Term,
    /// `[id_Y | chain] ∘ body`
    pub handle: Term,
    /// The coerced handler, a propagator.
    pub term: Term,
    /// The input theory, extended with the catch-all catcher when used.
    pub theory: Theory,
}

/// Adds `c_all : 0 → 1` with `c_all ∘ t_j ~ ⟨⟩_{P_j}` for every constructor.
pub fn with_catch_all(theory: &Theory) -> Result<Theory, Error> {
    if theory.flavor != Flavor::Exceptions {
        return Err(Error::Flavor("a catch-all needs an exceptions theory".into()));
    }
    let mut th = theory.clone();
    if th.catch_all().is_some() {
        return Ok(th);
    }
    th.add_generator(Generator {
        name: CATCH_ALL.to_string(),
        dom: Type::Empty,
        cod: Type::Unit,
        decoration: Decoration::Modifier,
        role: Role::CatchAll,
    })?;
    let call = th.catch_all().unwrap();
    for (j, t) in theory.throw_cocone() {
        th.add_axiom(
            &format!("K_{j}"),
            Equation::weak(Term::comp(call.clone(), t.term()), Term::ToUnit(t.dom.clone())),
        )?;
    }
    Ok(th)
}

/// Builds the catch chain, `HANDLE` and its coercion.
pub fn handle_term(theory: &Theory, spec: &HandlerSpec) -> Result<Handler, Error> {
    if theory.flavor != Flavor::Exceptions {
        return Err(Error::Flavor("handlers need an exceptions theory".into()));
    }
    if spec.clauses.is_empty() && spec.catch_all.is_none() {
        return Err(Error::EmptyHandler);
    }
    let th = if spec.catch_all.is_some() {
        with_catch_all(theory)?
    } else {
        theory.clone()
    };
    let body = check(&th, &spec.body)?;
    let y = body.cod.clone();
    let same_cod = |t: &Term| -> Result<(), Error> {
        let s = check(&th, t)?;
        if s.cod != y {
            return Err(Error::CodomainMismatch {
                expected: y.to_string(),
                found: s.cod.to_string(),
            });
        }
        Ok(())
    };
    let mut catchers = Vec::new();
    for (i, g) in &spec.clauses {
        same_cod(g)?;
        catchers.push((g.clone(), th.catch(constructor(&th, i)?).unwrap()));
    }
    if let Some(g) = &spec.catch_all {
        same_cod(g)?;
        catchers.push((g.clone(), th.catch_all().unwrap()));
    }
    let mut rest = catchers.into_iter().rev();
    let (g, c) = rest.next().unwrap();
    let mut chain = Term::comp(g, c);
    for (g, c) in rest {
        chain = Term::comp(Term::case_sum(g, chain), c);
    }
    let handle = Term::comp(Term::case_sum(Term::Id(y), chain.clone()), spec.body.clone());
    let term = Term::coerce(handle.clone());
    check(&th, &term)?;
    Ok(Handler {
        chain,
        handle,
        term,
        theory: th,
    })
}

/// `f ⊕ g` when `pure_left`, else `g ⊕ f`; `f` is the pure side.
pub fn semi_pure_coproduct(theory: &Theory, pure: &Term, other: &Term, pure_left: bool) -> Result<SemiPure, Error> {
    if check(theory, pure)?.dec != Decoration::Pure {
        return Err(Error::PureSideNotPure(pure.to_string()));
    }
    let term = if pure_left {
        Term::cosemi_left(pure.clone(), other.clone())
    } else {
        Term::cosemi_right(other.clone(), pure.clone())
    };
    semi_laws(theory, term, RuleId::SemicoprodP1, RuleId::SemicoprodP2)
}

fn arity(params: &[&str], n: &[usize], lemma: &str) -> Result<(), Error> {
    if n.contains(&params.len()) {
        Ok(())
    } else {
        Err(Error::BadParams(format!(
            "{lemma} takes {n:?} parameters, got {}",
            params.len()
        )))
    }
}

/// Reads a type written as `0`, `1`, `P_i` or a plain name.
fn parse_type(word: &str) -> Type {
    match word {
        "0" => Type::Empty,
        "1" => Type::Unit,
        _ => match word.strip_prefix("P_") {
            Some(i) => Type::param(i),
            None => Type::named(word),
        },
    }
}

struct Lemmas<'a> {
    th: &'a Theory,
    p: Prover<'a>,
}

impl<'a> Lemmas<'a> {
    fn new(th: &'a Theory) -> Result<Lemmas<'a>, Error> {
        if th.flavor != Flavor::Exceptions {
            return Err(Error::Flavor("exceptions lemmas need an exceptions theory".into()));
        }
        Ok(Lemmas {
            th,
            p: Prover::new(th),
        })
    }

    fn c(&self, i: &str) -> Term {
        self.th.catch(i).expect("checked constructor")
    }

    /// The states lemma on the dual theory, dualized back.
    fn dual(&self, lemma: &str, params: &[&str]) -> Result<Derivation, Error> {
        let dth = dualize_theory(self.th)?;
        let d = states::derive_lemma(&dth, lemma, params)?;
        dualize_derivation(&dth, &d)
    }

    /// `a ≡ b` for two propagators out of 0.
    fn empty_eq(&self, a: &Term, b: &Term) -> Result<Derivation, Error> {
        let p = &self.p;
        let left = p.to_strong(p.initial_weak(a)?)?;
        if let Term::FromEmpty(_) = b {
            return Ok(left);
        }
        let right = p.sym(p.to_strong(p.initial_weak(b)?)?)?;
        Ok(p.trans(vec![left, right])?)
    }

    /// `(catch i ⇒ raise_{i,Y}) ≡ []_Y`
    fn catch_throw(&self, i: &str, y: &Type) -> Result<Derivation, Error> {
        let p = &self.p;
        let raise = raise_term(self.th, i, y)?;
        let empty = Term::FromEmpty(y.clone());
        let case = p.rule(
            RuleId::SumCaseProp,
            vec![],
            inst([("g", raise.into()), ("k", empty.clone().into())]),
        )?;
        let case = p.subs(case, &self.c(i))?;
        let key = p.repl(self.dual("annihilation", &[i])?, &empty)?;
        Ok(p.trans(vec![case, key])?)
    }

    fn propcase(&self, rule: RuleId, a: &Term, b: &Term) -> Result<Derivation, Error> {
        Ok(self
            .p
            .rule(rule, vec![], inst([("f", a.clone().into()), ("g", b.clone().into())]))?)
    }

    fn semi(&self, rule: RuleId, t: &Term) -> Result<Derivation, Error> {
        Ok(self.p.rule(rule, vec![], inst([("t", t.clone().into())]))?)
    }

    /// `[a | b ∘ c_y] ≡ [a | b] ∘ (id_{P_x} ⊕ c_y) ∘ in₁` for `a : P_x → Y`, `b : P_y → Y`.
    fn bridge_left(&self, a: &Term, b: &Term, x: &str, y: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let px = Type::param(x);
        let case = Term::prop_case(a.clone(), b.clone());
        let t = Term::cosemi_left(Term::Id(px.clone()), self.c(y));
        let in1 = Term::Inj1(px.clone(), Type::Empty);
        let weak = p.trans(vec![
            p.repl(self.semi(RuleId::SemicoprodP1, &t)?, &case)?,
            p.to_weak(self.propcase(RuleId::PropcaseInl, a, b)?)?,
        ])?;
        let from_empty = Term::comp(in1, Term::FromEmpty(px.clone()));
        let strong = p.trans(vec![
            p.repl(self.empty_eq(&from_empty, &Term::Inj2(px, Type::Empty))?, &Term::comp(case.clone(), t.clone()))?,
            p.repl(self.semi(RuleId::SemicoprodP2, &t)?, &case)?,
            p.subs(self.propcase(RuleId::PropcaseInr, a, b)?, &self.c(y))?,
        ])?;
        let unique = p.rule(RuleId::SumCaseUnique, vec![weak, strong], Default::default())?;
        Ok(p.sym(unique)?)
    }

    /// `[b | a ∘ c_x] ≡ [a | b] ∘ (c_x ⊕ id_{P_y}) ∘ in₂` for `a : P_x → Y`, `b : P_y → Y`.
    fn bridge_right(&self, a: &Term, b: &Term, x: &str, y: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let py = Type::param(y);
        let case = Term::prop_case(a.clone(), b.clone());
        let t = Term::cosemi_right(self.c(x), Term::Id(py.clone()));
        let in2 = Term::Inj2(Type::Empty, py.clone());
        let weak = p.trans(vec![
            p.repl(self.semi(RuleId::SemicoprodP1, &t)?, &case)?,
            p.to_weak(self.propcase(RuleId::PropcaseInr, a, b)?)?,
        ])?;
        let from_empty = Term::comp(in2, Term::FromEmpty(py.clone()));
        let strong = p.trans(vec![
            p.repl(self.empty_eq(&from_empty, &Term::Inj1(Type::Empty, py))?, &Term::comp(case.clone(), t.clone()))?,
            p.repl(self.semi(RuleId::SemicoprodP2, &t)?, &case)?,
            p.subs(self.propcase(RuleId::PropcaseInl, a, b)?, &self.c(x))?,
        ])?;
        let unique = p.rule(RuleId::SumCaseUnique, vec![weak, strong], Default::default())?;
        Ok(p.sym(unique)?)
    }

    /// From `k₁ ≡ k₂` between chains, `⇓([id | k₁] ∘ f) ≡ ⇓([id | k₂] ∘ f)`.
    fn seal(&self, chains: Derivation, f: &Term) -> Result<Derivation, Error> {
        let p = &self.p;
        let e = chains.equation().expect("an equation").clone();
        let y = check(self.th, f)?.cod;
        let id = Term::Id(y.clone());
        let left = Term::case_sum(id.clone(), e.lhs.clone());
        let gk = |k: &Term| inst([("g", id.clone().into()), ("k", k.clone().into())]);
        let weak = p.rule(RuleId::SumCaseWeak, vec![], gk(&e.lhs))?;
        let strong = p.trans(vec![p.rule(RuleId::SumCaseEmpty, vec![], gk(&e.lhs))?, chains])?;
        let cases = p.rule(RuleId::SumCaseUnique, vec![weak, strong], Default::default())?;
        let handles = p.subs(cases, f)?;
        let handle = Term::comp(left, f.clone());
        let coerced = p.rule(RuleId::CoerceWeak, vec![], inst([("k", handle.into())]))?;
        let w = p.trans(vec![coerced, p.to_weak(handles)?])?;
        Ok(p.rule(RuleId::CoerceUnique, vec![w], Default::default())?)
    }

    fn handler_commute(&self, i: &str, j: &str, f: &Term, g: &Term, h: &Term) -> Result<Derivation, Error> {
        let p = &self.p;
        let case = Term::prop_case(g.clone(), h.clone());
        let to_commuted = p.subs(self.bridge_left(g, h, i, j)?, &self.c(i))?;
        let six = p.repl(p.sym(self.dual("commutation-6", &[i, j])?)?, &case)?;
        let back = p.subs(self.bridge_right(g, h, i, j)?, &self.c(j))?;
        let chains = p.trans(vec![to_commuted, six, p.sym(back)?])?;
        self.seal(chains, f)
    }

    fn handler_idempotent(&self, i: &str, f: &Term, g: &Term, h: &Term) -> Result<Derivation, Error> {
        let p = &self.p;
        let case = Term::prop_case(h.clone(), g.clone());
        let bridged = p.subs(self.bridge_right(h, g, i, i)?, &self.c(i))?;
        let three = p.repl(self.dual("interaction-3", &[i])?, &case)?;
        let tail = p.subs(self.propcase(RuleId::PropcaseInr, h, g)?, &self.c(i))?;
        let chains = p.trans(vec![bridged, three, tail])?;
        self.seal(chains, f)
    }

    /// The user generator `name`, which must have the given codomain.
    fn user(&self, name: &str, dom: Option<&Type>) -> Result<Term, Error> {
        let g = self
            .th
            .generator(name)
            .filter(|g| g.role == Role::User)
            .ok_or_else(|| Error::BadParams(format!("no user generator `{name}`")))?;
        if let Some(d) = dom {
            if &g.dom != d {
                return Err(Error::BadParams(format!("`{name}` must start from {d}")));
            }
        }
        Ok(g.term())
    }
}

/// Adds `f : X → Y`, `g : P_i → Y` and `h : P_j → Y` as propagators.
pub fn handler_fixture(constructors: &[&str], i: &str, j: &str) -> Result<Theory, Error> {
    let mut th = build_exceptions_theory(constructors)?;
    constructor(&th, i)?;
    constructor(&th, j)?;
    let y = Type::named("Y");
    for (name, dom) in [("f", Type::named("X")), ("g", Type::param(i)), ("h", Type::param(j))] {
        th.add_generator(Generator {
            name: name.to_string(),
            dom,
            cod: y.clone(),
            decoration: Decoration::Accessor,
            role: Role::User,
        })?;
    }
    Ok(th)
}

/// `try f catch(i ⇒ g, j ⇒ h) ≡ try f catch(j ⇒ h, i ⇒ g)` for `i ≠ j`.
pub fn derive_handler_commute(
    theory: &Theory,
    i: &str,
    j: &str,
    f: &Term,
    g: &Term,
    h: &Term,
) -> Result<Derivation, Error> {
    let lm = Lemmas::new(theory)?;
    constructor(theory, i)?;
    constructor(theory, j)?;
    if i == j {
        return Err(Error::BadParams("handler-commute needs two distinct constructors".into()));
    }
    lm.handler_commute(i, j, f, g, h)
}

/// `try f catch(i ⇒ g, i ⇒ h) ≡ try f catch(i ⇒ g)`
pub fn derive_handler_idempotent(theory: &Theory, i: &str, f: &Term, g: &Term, h: &Term) -> Result<Derivation, Error> {
    let lm = Lemmas::new(theory)?;
    constructor(theory, i)?;
    lm.handler_idempotent(i, f, g, h)
}

/// Builds the named lemma's derivation. Parameters are constructor names;
/// `catch-throw` takes an optional target type, handler lemmas use the
/// user generators `f`, `g`, `h` of the theory.
pub fn derive_lemma(theory: &Theory, lemma: &str, params: &[&str]) -> Result<Derivation, Error> {
    if !LEMMAS.contains(&lemma) {
        return Err(Error::UnknownLemma(lemma.to_string()));
    }
    let lm = Lemmas::new(theory)?;
    let ctor = |k: usize| -> Result<&str, Error> {
        constructor(theory, params[k]).map_err(|_| Error::BadParams(format!("`{}` is not a constructor", params[k])))
    };
    match lemma {
        "key-annihilation" | "interaction-3" => {
            arity(params, &[1], lemma)?;
            let name = if lemma == "key-annihilation" { "annihilation" } else { lemma };
            lm.dual(name, &[ctor(0)?])
        }
        "commutation-6" => {
            arity(params, &[2], lemma)?;
            let (i, j) = (ctor(0)?, ctor(1)?);
            if i == j {
                return Err(Error::BadParams(format!("{lemma} needs two distinct constructors")));
            }
            lm.dual(lemma, &[i, j])
        }
        "catch-throw" => {
            arity(params, &[1, 2], lemma)?;
            let i = ctor(0)?;
            let y = params.get(1).map_or_else(|| Type::param(i), |w| parse_type(w));
            theory.check_type(&y)?;
            lm.catch_throw(i, &y)
        }
        "handler-commute" => {
            arity(params, &[2], lemma)?;
            let (i, j) = (ctor(0)?, ctor(1)?);
            let f = lm.user("f", None)?;
            let g = lm.user("g", Some(&Type::param(i)))?;
            let h = lm.user("h", Some(&Type::param(j)))?;
            derive_handler_commute(theory, i, j, &f, &g, &h)
        }
        _ => {
            arity(params, &[1], lemma)?;
            let i = ctor(0)?;
            let f = lm.user("f", None)?;
            let g = lm.user("g", Some(&Type::param(i)))?;
            let h = lm.user("h", Some(&Type::param(i)))?;
            lm.handler_idempotent(i, &f, &g, &h)
        }
    }
}

/// Default parameters for a lemma in a theory, if there are enough indices.
pub fn default_params(theory: &Theory, lemma: &str) -> Option<Vec<String>> {
    states::default_params(theory, lemma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_derivation;
    use crate::states::build_states_theory;

    #[test]
    fn axioms_come_in_canonical_order() {
        let th = build_exceptions_theory(&["i", "j"]).unwrap();
        let labels: Vec<&str> = th.axioms.iter().map(|a| a.label.as_str()).collect();
        assert_eq!(labels, ["B1_i", "B1_j", "B2_i_j", "B2_j_i"]);
        assert_eq!(build_exceptions_theory(&["i"]).unwrap().axioms.len(), 1);
    }

    #[test]
    fn dual_of_states_theory() {
        let st = build_states_theory(&["x", "y"]).unwrap();
        assert_eq!(dualize_theory(&st).unwrap(), build_exceptions_theory(&["x", "y"]).unwrap());
    }

    #[test]
    fn raise_is_a_propagator() {
        let th = build_exceptions_theory(&["i"]).unwrap();
        let r = raise_term(&th, "i", &Type::param("i")).unwrap();
        assert_eq!(r.to_string(), "[][P_i] . t_i");
        assert_eq!(check(&th, &r).unwrap().dec, Decoration::Accessor);
        assert_eq!(
            raise_term(&th, "k", &Type::Unit),
            Err(Error::UnknownConstructor("k".into()))
        );
    }

    #[test]
    fn handler_shapes() {
        let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
        let (f, g, h) = (
            th.generator("f").unwrap().term(),
            th.generator("g").unwrap().term(),
            th.generator("h").unwrap().term(),
        );
        let one = handle_term(
            &th,
            &HandlerSpec {
                body: f.clone(),
                clauses: vec![("i".into(), g.clone())],
                catch_all: None,
            },
        )
        .unwrap();
        assert_eq!(one.term.to_string(), "coerce(case(id[Y] | g . c_i) . f)");
        let two = handle_term(
            &th,
            &HandlerSpec {
                body: f.clone(),
                clauses: vec![("i".into(), g.clone()), ("j".into(), h.clone())],
                catch_all: None,
            },
        )
        .unwrap();
        assert_eq!(two.chain.to_string(), "case(g | h . c_j) . c_i");
        assert_eq!(check(&th, &two.handle).unwrap().dec, Decoration::Modifier);
        let empty = HandlerSpec {
            body: f.clone(),
            clauses: vec![],
            catch_all: None,
        };
        assert_eq!(handle_term(&th, &empty), Err(Error::EmptyHandler));
        let bad = HandlerSpec {
            body: f,
            clauses: vec![("i".into(), Term::Id(Type::param("i")))],
            catch_all: None,
        };
        assert!(matches!(handle_term(&th, &bad), Err(Error::CodomainMismatch { .. })));
    }

    #[test]
    fn catch_all_extends_the_theory() {
        let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
        let k = Term::gen("k", Type::Unit, Type::named("Y"), Decoration::Accessor);
        let mut th2 = th.clone();
        th2.add_generator(Generator {
            name: "k".into(),
            dom: Type::Unit,
            cod: Type::named("Y"),
            decoration: Decoration::Accessor,
            role: Role::User,
        })
        .unwrap();
        let hd = handle_term(
            &th2,
            &HandlerSpec {
                body: th.generator("f").unwrap().term(),
                clauses: vec![],
                catch_all: Some(k),
            },
        )
        .unwrap();
        assert_eq!(hd.term.to_string(), "coerce(case(id[Y] | k . c_all) . f)");
        assert!(hd.theory.axiom("K_i").is_some() && hd.theory.axiom("K_j").is_some());
    }

    #[test]
    fn every_lemma_is_accepted() {
        let th = handler_fixture(&["i", "j"], "i", "j").unwrap();
        for (lemma, params) in [
            ("key-annihilation", vec!["i"]),
            ("commutation-6", vec!["i", "j"]),
            ("interaction-3", vec!["j"]),
            ("catch-throw", vec!["i"]),
            ("catch-throw", vec!["j", "Y"]),
            ("handler-commute", vec!["i", "j"]),
        ] {
            let d = derive_lemma(&th, lemma, &params).unwrap();
            let r = check_derivation(&th, &d);
            assert!(r.is_valid(), "{lemma}: {r:?}");
        }
        let th = handler_fixture(&["i", "j"], "i", "i").unwrap();
        let d = derive_lemma(&th, "handler-idempotent", &["i"]).unwrap();
        assert!(check_derivation(&th, &d).is_valid());
    }

    #[test]
    fn key_annihilation_conclusion() {
        let th = build_exceptions_theory(&["i", "j"]).unwrap();
        let d = derive_lemma(&th, "key-annihilation", &["i"]).unwrap();
        assert_eq!(d.equation().unwrap().to_string(), "t_i . c_i == id[0]");
    }

    #[test]
    fn semi_coproduct_laws() {
        let th = build_exceptions_theory(&["i", "j"]).unwrap();
        let s = semi_pure_coproduct(&th, &Term::Id(Type::param("i")), &th.catch("j").unwrap(), true).unwrap();
        assert_eq!(s.p1.to_string(), "lcosemi(id[P_i], c_j) . in1[P_i, 0] ~~ in1[P_i, P_j]");
        assert_eq!(s.p2.to_string(), "lcosemi(id[P_i], c_j) . in2[P_i, 0] == in2[P_i, P_j] . c_j");
        assert!(semi_pure_coproduct(&th, &th.catch("j").unwrap(), &Term::Id(Type::Empty), true).is_err());
    }
}
