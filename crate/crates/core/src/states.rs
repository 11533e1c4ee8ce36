//! The decorated theory of states and its lemma catalog.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernel::{inst, Derivation, Prover, RuleId};
use crate::syntax::{
    check, Decoration, Equation, Flavor, Generator, Role, Term, Theory, Type,
};

/// Lemmas provable by [`derive_lemma`] in a states theory.
pub const LEMMAS: &[&str] = &[
    "annihilation",
    "final-uniqueness",
    "commutation-6",
    "interaction-3",
    "pr1",
    "pr2",
    "pr3",
    "pr4",
    "pr5",
    "pr6",
    "pr7",
    "pr8",
];

/// States theory over `locations`: lookups, updates and their weak axioms.
pub fn build_states_theory(locations: &[&str]) -> Result<Theory, Error> {
    let mut th = Theory {
        flavor: Flavor::States,
        indices: Vec::new(),
        generators: Vec::new(),
        axioms: Vec::new(),
    };
    for &i in locations {
        if th.indices.iter().any(|x| x == i) {
            return Err(Error::DuplicateLocation(i.to_string()));
        }
        th.indices.push(i.to_string());
    }
    for i in locations {
        th.add_generator(Generator {
            name: format!("l_{i}"),
            dom: Type::Unit,
            cod: Type::value(i),
            decoration: Decoration::Accessor,
            role: Role::Lookup(i.to_string()),
        })?;
        th.add_generator(Generator {
            name: format!("u_{i}"),
            dom: Type::value(i),
            cod: Type::Unit,
            decoration: Decoration::Modifier,
            role: Role::Update(i.to_string()),
        })?;
    }
    for i in locations {
        let (l, u) = (th.lookup(i).unwrap(), th.update(i).unwrap());
        th.add_axiom(
            &format!("A1_{i}"),
            Equation::weak(Term::comp(l, u), Term::Id(Type::value(i))),
        )?;
    }
    for i in locations {
        for j in locations.iter().filter(|j| *j != i) {
            let lj = th.lookup(j).unwrap();
            th.add_axiom(
                &format!("A2_{i}_{j}"),
                Equation::weak(
                    Term::comp(lj.clone(), th.update(i).unwrap()),
                    Term::comp(lj, Term::ToUnit(Type::value(i))),
                ),
            )?;
        }
    }
    Ok(th)
}

/// A semi-pure (co)product with its two characteristic laws.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiPure {
    pub term: Term,
    /// Weak law on the pure side.
    pub p1: Equation,
    /// Strong law on the effectful side.
    pub p2: Equation,
}

/// `f ⋉ g` when `pure_left`, else `g ⋊ f`; `f` is the pure side.
pub fn semi_pure_product(theory: &Theory, pure: &Term, other: &Term, pure_left: bool) -> Result<SemiPure, Error> {
    if check(theory, pure)?.dec != Decoration::Pure {
        return Err(Error::PureSideNotPure(pure.to_string()));
    }
    let term = if pure_left {
        Term::semi_left(pure.clone(), other.clone())
    } else {
        Term::semi_right(other.clone(), pure.clone())
    };
    semi_laws(theory, term, RuleId::SemiprodP1, RuleId::SemiprodP2)
}

pub(crate) fn semi_laws(theory: &Theory, term: Term, p1: RuleId, p2: RuleId) -> Result<SemiPure, Error> {
    check(theory, &term)?;
    let p = Prover::new(theory);
    let law = |r| -> Result<Equation, Error> {
        let d = p.rule(r, vec![], inst([("t", term.clone().into())]))?;
        Ok(d.equation().unwrap().clone())
    };
    Ok(SemiPure {
        p1: law(p1)?,
        p2: law(p2)?,
        term,
    })
}

fn loc<'a>(theory: &Theory, i: &'a str) -> Result<&'a str, Error> {
    if theory.indices.iter().any(|x| x == i) {
        Ok(i)
    } else {
        Err(Error::BadParams(format!("`{i}` is not a location")))
    }
}

fn arity(params: &[&str], n: usize, lemma: &str) -> Result<(), Error> {
    if params.len() == n {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{lemma} takes {n} parameters, got {}", params.len())))
    }
}

/// Proof builders shared by the lemmas. Follows one side of the
/// commutation: `u_b ∘ out_b ∘ s`, where `s` updates `a` first.
struct Side {
    a: String,
    b: String,
    s: Term,
    /// Projection from `cod s` onto `V_b`.
    out_b: Term,
    /// Projection from `cod s` onto `1`.
    out_unit: Term,
    /// Projections from `V_i × V_j` onto `V_a` and `V_b`.
    in_a: Term,
    in_b: Term,
}

struct Lemmas<'a> {
    th: &'a Theory,
    p: Prover<'a>,
}

impl<'a> Lemmas<'a> {
    fn new(th: &'a Theory) -> Result<Lemmas<'a>, Error> {
        if th.flavor != Flavor::States {
            return Err(Error::Flavor("states lemmas need a states theory".into()));
        }
        Ok(Lemmas {
            th,
            p: Prover::new(th),
        })
    }

    fn l(&self, i: &str) -> Term {
        self.th.lookup(i).expect("checked location")
    }

    fn u(&self, i: &str) -> Term {
        self.th.update(i).expect("checked location")
    }

    fn a1(&self, i: &str) -> Result<Derivation, Error> {
        Ok(self.p.axiom(&format!("A1_{i}"))?)
    }

    fn a2(&self, i: &str, j: &str) -> Result<Derivation, Error> {
        Ok(self.p.axiom(&format!("A2_{i}_{j}"))?)
    }

    /// `a ≡ b` for two accessors into 1.
    fn unit_eq(&self, a: &Term, b: &Term) -> Result<Derivation, Error> {
        let p = &self.p;
        let left = p.to_strong(p.final_weak(a)?)?;
        if let Term::ToUnit(_) = b {
            return Ok(left);
        }
        let right = p.sym(p.to_strong(p.final_weak(b)?)?)?;
        Ok(p.trans(vec![left, right])?)
    }

    /// `⟨⟩_{V_i} ∘ l_i ≡ id_1`
    fn collapse(&self, i: &str) -> Result<Derivation, Error> {
        let t = Term::comp(Term::ToUnit(Type::value(i)), self.l(i));
        self.unit_eq(&t, &Term::Id(Type::Unit))
    }

    fn annihilation(&self, i: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let g = Term::comp(self.u(i), self.l(i));
        let mut premises = Vec::new();
        for k in &self.th.indices {
            let d = if k == i {
                p.subs(self.a1(i)?, &self.l(i))?
            } else {
                let tail = p.to_weak(p.repl(self.collapse(i)?, &self.l(k))?)?;
                p.trans(vec![p.subs(self.a2(i, k)?, &self.l(i))?, tail])?
            };
            premises.push(d);
        }
        let lhs = p.rule(RuleId::LocTupleUnique, premises, inst([("g", g.into())]))?;
        let mut refl = Vec::new();
        for k in &self.th.indices {
            refl.push(p.wrefl(&self.l(k))?);
        }
        let id = p.rule(
            RuleId::LocTupleUnique,
            refl,
            inst([("g", Term::Id(Type::Unit).into())]),
        )?;
        Ok(p.trans(vec![lhs, p.sym(id)?])?)
    }

    fn pair_type(&self, i: &str, j: &str) -> (Type, Type) {
        (Type::value(i), Type::value(j))
    }

    /// `u_j ∘ π₂ ∘ (u_i ⋊ id_{V_j})`, updating `i` first.
    fn left_side(&self, i: &str, j: &str) -> Side {
        let (vi, vj) = self.pair_type(i, j);
        Side {
            a: i.into(),
            b: j.into(),
            s: Term::semi_right(self.u(i), Term::Id(vj.clone())),
            out_b: Term::Proj2(Type::Unit, vj.clone()),
            out_unit: Term::Proj1(Type::Unit, vj.clone()),
            in_a: Term::Proj1(vi.clone(), vj.clone()),
            in_b: Term::Proj2(vi, vj),
        }
    }

    /// `u_i ∘ π₁ ∘ (id_{V_i} ⋉ u_j)`, updating `j` first.
    fn right_side(&self, i: &str, j: &str) -> Side {
        let (vi, vj) = self.pair_type(i, j);
        Side {
            a: j.into(),
            b: i.into(),
            s: Term::semi_left(Term::Id(vi.clone()), self.u(j)),
            out_b: Term::Proj1(vi.clone(), Type::Unit),
            out_unit: Term::Proj2(vi.clone(), Type::Unit),
            in_a: Term::Proj2(vi.clone(), vj.clone()),
            in_b: Term::Proj1(vi, vj),
        }
    }

    fn semi(&self, rule: RuleId, s: &Side) -> Result<Derivation, Error> {
        Ok(self.p.rule(rule, vec![], inst([("t", s.s.clone().into())]))?)
    }

    fn expr(&self, s: &Side) -> Term {
        Term::seq(vec![self.u(&s.b), s.out_b.clone(), s.s.clone()])
    }

    /// `l_k ∘ u_b ∘ out_b ∘ s ~ l_k ∘ ⟨⟩_{V_b} ∘ out_b ∘ s`
    fn pr1(&self, s: &Side, k: &str) -> Result<Derivation, Error> {
        let f = Term::comp(s.out_b.clone(), s.s.clone());
        Ok(self.p.subs(self.a2(&s.b, k)?, &f)?)
    }

    /// `l_k ∘ ⟨⟩_{V_b} ∘ out_b ∘ s ~ l_k ∘ u_a ∘ in_a`
    fn pr2(&self, s: &Side, k: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let bang = Term::comp(Term::ToUnit(Type::value(&s.b)), s.out_b.clone());
        let e = p.subs(self.unit_eq(&bang, &s.out_unit)?, &s.s)?;
        let e = p.trans(vec![e, self.semi(RuleId::SemiprodP2, s)?])?;
        Ok(p.to_weak(p.repl(e, &self.l(k))?)?)
    }

    /// `l_k ∘ u_a ∘ proj ~ l_k ∘ ⟨⟩` for a projection onto `V_a`.
    fn pr3(&self, a: &str, proj: &Term, k: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let dom = check(self.th, proj)?.dom;
        let bang = Term::comp(Term::ToUnit(Type::value(a)), proj.clone());
        let tail = p.to_weak(p.repl(self.unit_eq(&bang, &Term::ToUnit(dom))?, &self.l(k))?)?;
        Ok(p.trans(vec![p.subs(self.a2(a, k)?, proj)?, tail])?)
    }

    /// `l_k ∘ u_b ∘ out_b ∘ s ~ l_k ∘ ⟨⟩` for `k` apart from both locations.
    fn pr4(&self, s: &Side, k: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let d = p.trans(vec![self.pr1(s, k)?, self.pr2(s, k)?])?;
        Ok(p.trans(vec![d, self.pr3(&s.a, &s.in_a, k)?])?)
    }

    /// `l_a ∘ u_b ∘ out_b ∘ s ~ l_a ∘ ⟨⟩ ∘ s`
    fn pr5(&self, s: &Side) -> Result<Derivation, Error> {
        let p = &self.p;
        let bang = Term::comp(Term::ToUnit(Type::value(&s.b)), s.out_b.clone());
        let cod = check(self.th, &s.out_b)?.dom;
        let e = p.repl(self.unit_eq(&bang, &Term::ToUnit(cod))?, &self.l(&s.a))?;
        let e = p.to_weak(p.subs(e, &s.s)?)?;
        Ok(p.trans(vec![self.pr1(s, &s.a)?, e])?)
    }

    /// `l_a ∘ ⟨⟩ ∘ s ~ l_a ∘ u_a ∘ in_a`
    fn pr6(&self, s: &Side) -> Result<Derivation, Error> {
        let p = &self.p;
        let e = p.to_strong(p.sym(p.final_weak(&s.out_unit)?)?)?;
        let e = p.trans(vec![p.subs(e, &s.s)?, self.semi(RuleId::SemiprodP2, s)?])?;
        Ok(p.to_weak(p.repl(e, &self.l(&s.a))?)?)
    }

    /// `l_a ∘ u_b ∘ out_b ∘ s ~ in_a`
    fn pr7(&self, s: &Side) -> Result<Derivation, Error> {
        let p = &self.p;
        let d = p.trans(vec![self.pr5(s)?, self.pr6(s)?])?;
        Ok(p.trans(vec![d, p.subs(self.a1(&s.a)?, &s.in_a)?])?)
    }

    /// `l_b ∘ u_b ∘ out_b ∘ s ~ in_b`
    fn pr8(&self, s: &Side) -> Result<Derivation, Error> {
        let p = &self.p;
        let f = Term::comp(s.out_b.clone(), s.s.clone());
        Ok(p.trans(vec![
            p.subs(self.a1(&s.b)?, &f)?,
            self.semi(RuleId::SemiprodP1, s)?,
        ])?)
    }

    /// Observation `k` of one side of the commutation.
    fn observe(&self, s: &Side, k: &str) -> Result<Derivation, Error> {
        if k == s.a {
            self.pr7(s)
        } else if k == s.b {
            self.pr8(s)
        } else {
            self.pr4(s, k)
        }
    }

    fn commutation(&self, i: &str, j: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let mut sides = Vec::new();
        for s in [self.left_side(i, j), self.right_side(i, j)] {
            let mut obs = Vec::new();
            for k in &self.th.indices {
                obs.push(self.observe(&s, k)?);
            }
            sides.push(p.rule(
                RuleId::LocTupleUnique,
                obs,
                inst([("g", self.expr(&s).into())]),
            )?);
        }
        let right = sides.pop().unwrap();
        let left = sides.pop().unwrap();
        Ok(p.trans(vec![left, p.sym(right)?])?)
    }

    fn interaction(&self, i: &str) -> Result<Derivation, Error> {
        let p = &self.p;
        let s = self.left_side(i, i);
        let mut obs = Vec::new();
        for k in &self.th.indices {
            obs.push(if k == i { self.pr8(&s)? } else { self.pr4(&s, k)? });
        }
        let left = p.rule(
            RuleId::LocTupleUnique,
            obs,
            inst([("g", self.expr(&s).into())]),
        )?;
        let rhs = Term::comp(self.u(i), s.in_b.clone());
        let mut obs = Vec::new();
        for k in &self.th.indices {
            obs.push(if k == i {
                p.subs(self.a1(i)?, &s.in_b)?
            } else {
                self.pr3(i, &s.in_b, k)?
            });
        }
        let right = p.rule(RuleId::LocTupleUnique, obs, inst([("g", rhs.into())]))?;
        Ok(p.trans(vec![left, p.sym(right)?])?)
    }
}

/// Builds the named lemma's derivation. Parameters are location names.
pub fn derive_lemma(theory: &Theory, lemma: &str, params: &[&str]) -> Result<Derivation, Error> {
    if !LEMMAS.contains(&lemma) {
        return Err(Error::UnknownLemma(lemma.to_string()));
    }
    let lm = Lemmas::new(theory)?;
    let distinct = |params: &[&str]| -> Result<(String, String), Error> {
        let i = loc(theory, params[0])?;
        let j = loc(theory, params[1])?;
        if i == j {
            return Err(Error::BadParams(format!("{lemma} needs two distinct locations")));
        }
        Ok((i.to_string(), j.to_string()))
    };
    match lemma {
        "annihilation" => {
            arity(params, 1, lemma)?;
            lm.annihilation(loc(theory, params[0])?)
        }
        "final-uniqueness" => {
            arity(params, 1, lemma)?;
            let i = loc(theory, params[0])?;
            let f = Term::comp(Term::ToUnit(Type::value(i)), lm.l(i));
            Ok(crate::kernel::derive_final_uniqueness(theory, &f)?)
        }
        "commutation-6" => {
            arity(params, 2, lemma)?;
            let (i, j) = distinct(params)?;
            lm.commutation(&i, &j)
        }
        "interaction-3" => {
            arity(params, 1, lemma)?;
            lm.interaction(loc(theory, params[0])?)
        }
        "pr1" | "pr2" | "pr3" | "pr4" => {
            arity(params, 3, lemma)?;
            let (i, j) = distinct(params)?;
            let k = loc(theory, params[2])?;
            let s = lm.left_side(&i, &j);
            let clash = match lemma {
                "pr1" => k == j,
                "pr2" => false,
                "pr3" => k == i,
                _ => k == i || k == j,
            };
            if clash {
                return Err(Error::BadParams(format!("{lemma} does not apply to k = {k}")));
            }
            match lemma {
                "pr1" => lm.pr1(&s, k),
                "pr2" => lm.pr2(&s, k),
                "pr3" => lm.pr3(&i, &s.in_a, k),
                _ => lm.pr4(&s, k),
            }
        }
        "pr5" | "pr6" | "pr7" => {
            arity(params, 2, lemma)?;
            let (i, j) = distinct(params)?;
            let s = lm.left_side(&i, &j);
            match lemma {
                "pr5" => lm.pr5(&s),
                "pr6" => lm.pr6(&s),
                _ => lm.pr7(&s),
            }
        }
        _ => {
            arity(params, 2, lemma)?;
            let (i, j) = distinct(params)?;
            lm.pr8(&lm.right_side(&i, &j))
        }
    }
}

/// Default parameters for a lemma in a theory, if there are enough indices.
pub fn default_params(theory: &Theory, lemma: &str) -> Option<Vec<String>> {
    let ix = &theory.indices;
    let take = |n: &[usize]| -> Option<Vec<String>> {
        n.iter().map(|&k| ix.get(k).cloned()).collect()
    };
    match lemma {
        "pr1" | "pr2" => take(&[0, 1, 0]),
        "pr3" => take(&[0, 1, 1]),
        "pr4" => take(&[0, 1, 2]),
        "commutation-6" | "pr5" | "pr6" | "pr7" | "pr8" | "handler-commute" => take(&[0, 1]),
        _ => take(&[0]),
    }
}

/// One of the seven state equations, in direct and observational form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SevenGoal {
    pub number: u8,
    pub name: &'static str,
    pub direct: Vec<Equation>,
    /// The direct form observed through `l_k`, for goals landing in 1.
    pub observational: Option<Equation>,
}

/// The seven equations on locations `i`, `j` (distinct) observed at `k`.
pub fn seven_equation_goals(theory: &Theory, i: &str, j: &str, k: &str) -> Result<Vec<SevenGoal>, Error> {
    let lm = Lemmas::new(theory)?;
    loc(theory, i)?;
    loc(theory, j)?;
    loc(theory, k)?;
    if i == j {
        return Err(Error::BadParams("goals 5 to 7 need two distinct locations".into()));
    }
    let (li, lj, lk, ui) = (lm.l(i), lm.l(j), lm.l(k), lm.u(i));
    let bang = |x: &str| Term::ToUnit(Type::value(x));
    let observe = |e: &Equation| {
        Equation::weak(Term::comp(lk.clone(), e.lhs.clone()), Term::comp(lk.clone(), e.rhs.clone()))
    };
    let g1 = Equation::strong(Term::comp(ui.clone(), li.clone()), Term::Id(Type::Unit));
    let g2 = Equation::strong(Term::seq(vec![li.clone(), bang(i), li.clone()]), li.clone());
    let s3 = lm.left_side(i, i);
    let g3 = Equation::strong(lm.expr(&s3), Term::comp(ui.clone(), s3.in_b.clone()));
    let g4 = Equation::weak(Term::comp(li.clone(), ui.clone()), Term::Id(Type::value(i)));
    let g5 = Equation::strong(
        Term::pair(li.clone(), Term::seq(vec![lj.clone(), bang(i), li.clone()])),
        Term::pair(Term::seq(vec![li.clone(), bang(j), lj.clone()]), lj.clone()),
    );
    let g6 = Equation::strong(lm.expr(&lm.left_side(i, j)), lm.expr(&lm.right_side(i, j)));
    let a2 = Equation::weak(Term::comp(lj.clone(), ui.clone()), Term::comp(lj.clone(), bang(i)));
    let g7 = Equation::strong(
        Term::comp(lj.clone(), ui.clone()),
        Term::tuple_prod(Term::comp(lj.clone(), bang(i)), ui.clone()),
    );
    let goals = vec![
        (1, "annihilation lookup-update", vec![g1.clone()], Some(observe(&g1))),
        (2, "interaction lookup-lookup", vec![g2], None),
        (3, "interaction update-update", vec![g3.clone()], Some(observe(&g3))),
        (4, "interaction update-lookup", vec![g4], None),
        (5, "commutation lookup-lookup", vec![g5], None),
        (6, "commutation update-update", vec![g6.clone()], Some(observe(&g6))),
        (7, "commutation update-lookup", vec![g7, a2], None),
    ];
    let out: Vec<SevenGoal> = goals
        .into_iter()
        .map(|(number, name, direct, observational)| SevenGoal {
            number,
            name,
            direct,
            observational,
        })
        .collect();
    for g in &out {
        for e in g.direct.iter().chain(g.observational.iter()) {
            check(theory, &e.lhs)?;
            check(theory, &e.rhs)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_derivation, Judgment};

    #[test]
    fn axioms_come_in_canonical_order() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let labels: Vec<&str> = th.axioms.iter().map(|a| a.label.as_str()).collect();
        assert_eq!(labels, ["A1_x", "A1_y", "A2_x_y", "A2_y_x"]);
        assert_eq!(th.generators.len(), 4);
    }

    #[test]
    fn duplicate_locations_are_refused() {
        assert_eq!(
            build_states_theory(&["x", "x"]),
            Err(Error::DuplicateLocation("x".into()))
        );
    }

    #[test]
    fn annihilation_concludes_the_expected_equation() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let d = derive_lemma(&th, "annihilation", &["x"]).unwrap();
        assert!(check_derivation(&th, &d).is_valid());
        let want = Equation::strong(
            Term::comp(th.update("x").unwrap(), th.lookup("x").unwrap()),
            Term::Id(Type::Unit),
        );
        assert_eq!(d.conclusion, Judgment::Holds(want.normalized()));
    }

    #[test]
    fn commutation_needs_distinct_locations() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        assert!(matches!(
            derive_lemma(&th, "commutation-6", &["x", "x"]),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn semi_product_laws_for_an_update() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let id = Term::Id(Type::value("x"));
        let s = semi_pure_product(&th, &id, &th.update("y").unwrap(), true).unwrap();
        assert_eq!(s.p1.to_string(), "pi1[V_x, 1] . lsemi(id[V_x], u_y) ~~ pi1[V_x, V_y]");
        assert_eq!(s.p2.to_string(), "pi2[V_x, 1] . lsemi(id[V_x], u_y) == u_y . pi2[V_x, V_y]");
        assert!(matches!(
            semi_pure_product(&th, &th.update("y").unwrap(), &id, true),
            Err(Error::PureSideNotPure(_))
        ));
    }
}
