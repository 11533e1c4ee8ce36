//! Decoration erasure and the states/exceptions duality.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::kernel::{Derivation, InstValue, Judgment, RuleId, Step};
use crate::syntax::{
    normalize_assoc, Axiom, Decoration, Equation, Flavor, Generator, Role, Term, Theory,
    Type,
};

/// Drops decorations: every generator becomes a plain arrow.
pub fn erase_theory(theory: &Theory) -> Theory {
    Theory {
        flavor: Flavor::Plain,
        indices: theory.indices.clone(),
        generators: theory
            .generators
            .iter()
            .map(|g| Generator {
                decoration: Decoration::Modifier,
                ..g.clone()
            })
            .collect(),
        axioms: theory
            .axioms
            .iter()
            .map(|a| Axiom {
                label: a.label.clone(),
                equation: erase_equation(&a.equation),
            })
            .collect(),
    }
}

pub fn erase_term(term: &Term) -> Term {
    match term {
        Term::Gen { name, dom, cod, .. } => {
            Term::gen(name, dom.clone(), cod.clone(), Decoration::Modifier)
        }
        other => other.map_children(&mut erase_term),
    }
}

/// Both sides erased; weak equations become strong.
pub fn erase_equation(eq: &Equation) -> Equation {
    Equation::strong(erase_term(&eq.lhs), erase_term(&eq.rhs))
}

fn erase_judgment(j: &Judgment) -> Judgment {
    match j {
        Judgment::IsType(t) => Judgment::IsType(t.clone()),
        Judgment::WellFormed(t, _) => Judgment::WellFormed(erase_term(t), Decoration::Modifier),
        Judgment::Holds(e) => Judgment::Holds(erase_equation(e)),
    }
}

/// The apparent counterpart of a decorated rule, `None` when the step
/// becomes an identity after erasure.
pub fn erase_rule(rule: RuleId) -> Option<RuleId> {
    use RuleId::*;
    Some(match rule {
        WRefl => EqRefl,
        WSym => EqSym,
        WTrans => EqTrans,
        WSubs | WSubsPure => EqSubs,
        WRepl | WReplPure => EqRepl,
        ZeroComp | OneComp => Comp,
        ZeroId => Id,
        SToW | WToS | WToSProp | ZeroToOne | OneToTwo => return None,
        other => other,
    })
}

pub fn erase_derivation(d: &Derivation) -> Derivation {
    let premises: Vec<Derivation> = d.premises.iter().map(erase_derivation).collect();
    match &d.step {
        Step::Rule(r) => match erase_rule(*r) {
            None => premises.into_iter().next().expect("collapsed steps have one premise"),
            Some(r) => Derivation {
                conclusion: erase_judgment(&d.conclusion),
                step: Step::Rule(r),
                premises,
                inst: d
                    .inst
                    .iter()
                    .map(|(k, v)| {
                        let v = match v {
                            InstValue::Term(t) => InstValue::Term(erase_term(t)),
                            other => other.clone(),
                        };
                        (k.clone(), v)
                    })
                    .collect(),
            },
        },
        step => Derivation {
            conclusion: erase_judgment(&d.conclusion),
            step: step.clone(),
            premises,
            inst: d.inst.clone(),
        },
    }
}

/// Correspondence between a theory and its dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityMap {
    pub from: Flavor,
    /// Generator names of the source theory and their duals.
    pub generators: BTreeMap<String, String>,
}

pub fn dual_role(role: &Role) -> Role {
    match role {
        Role::Lookup(i) => Role::Throw(i.clone()),
        Role::Throw(i) => Role::Lookup(i.clone()),
        Role::Update(i) => Role::Catch(i.clone()),
        Role::Catch(i) => Role::Update(i.clone()),
        Role::CatchAll => Role::UpdateAll,
        Role::UpdateAll => Role::CatchAll,
        Role::User => Role::User,
    }
}

/// Conventional generator name for a role, or `None` for user generators.
pub fn role_name(role: &Role) -> Option<String> {
    Some(match role {
        Role::Lookup(i) => format!("l_{i}"),
        Role::Update(i) => format!("u_{i}"),
        Role::Throw(i) => format!("t_{i}"),
        Role::Catch(i) => format!("c_{i}"),
        Role::CatchAll => "c_all".into(),
        Role::UpdateAll => "u_all".into(),
        Role::User => return None,
    })
}

/// `A1_x` and `B1_x` trade places, as do `A2_x_y` and `B2_x_y`.
pub fn dual_label(label: &str) -> String {
    let mut chars = label.chars();
    match (chars.next(), chars.next()) {
        (Some('A'), Some(d)) if d.is_ascii_digit() => format!("B{}", &label[1..]),
        (Some('B'), Some(d)) if d.is_ascii_digit() => format!("A{}", &label[1..]),
        _ => label.to_string(),
    }
}

pub fn dual_flavor(flavor: Flavor) -> Result<Flavor, Error> {
    match flavor {
        Flavor::States => Ok(Flavor::Exceptions),
        Flavor::Exceptions => Ok(Flavor::States),
        Flavor::Plain => Err(Error::Flavor("plain theories have no dual".into())),
    }
}

impl DualityMap {
    pub fn for_theory(theory: &Theory) -> Result<DualityMap, Error> {
        dual_flavor(theory.flavor)?;
        let generators = theory
            .generators
            .iter()
            .map(|g| {
                let name = role_name(&dual_role(&g.role)).unwrap_or_else(|| g.name.clone());
                (g.name.clone(), name)
            })
            .collect();
        Ok(DualityMap {
            from: theory.flavor,
            generators,
        })
    }

    pub fn ty(&self, ty: &Type) -> Type {
        dualize_type(ty)
    }

    pub fn term(&self, t: &Term) -> Term {
        match t {
            Term::Gen {
                name,
                dom,
                cod,
                dec,
            } => Term::gen(
                self.generators.get(name).unwrap_or(name),
                dualize_type(cod),
                dualize_type(dom),
                *dec,
            ),
            Term::Id(x) => Term::Id(dualize_type(x)),
            Term::Comp(g, f) => Term::comp(self.term(f), self.term(g)),
            Term::ToUnit(x) => Term::FromEmpty(dualize_type(x)),
            Term::FromEmpty(x) => Term::ToUnit(dualize_type(x)),
            Term::Proj1(a, b) => Term::Inj1(dualize_type(a), dualize_type(b)),
            Term::Proj2(a, b) => Term::Inj2(dualize_type(a), dualize_type(b)),
            Term::Inj1(a, b) => Term::Proj1(dualize_type(a), dualize_type(b)),
            Term::Inj2(a, b) => Term::Proj2(dualize_type(a), dualize_type(b)),
            Term::Pair(f, g) => Term::prop_case(self.term(f), self.term(g)),
            Term::PropCase(f, g) => Term::pair(self.term(f), self.term(g)),
            Term::SemiProd {
                left,
                right,
                pure_left,
            } => Term::SemiCoprod {
                left: Box::new(self.term(left)),
                right: Box::new(self.term(right)),
                pure_left: *pure_left,
            },
            Term::SemiCoprod {
                left,
                right,
                pure_left,
            } => Term::SemiProd {
                left: Box::new(self.term(left)),
                right: Box::new(self.term(right)),
                pure_left: *pure_left,
            },
            Term::CaseSum { on_value, on_empty } => {
                Term::tuple_prod(self.term(on_value), self.term(on_empty))
            }
            Term::TupleProd { on_value, on_unit } => {
                Term::case_sum(self.term(on_value), self.term(on_unit))
            }
            Term::Coerce(k) => Term::coerce(self.term(k)),
            Term::LocTuple { dom, components } => Term::ConstCotuple {
                cod: dualize_type(dom),
                components: self.components(components),
            },
            Term::ConstCotuple { cod, components } => Term::LocTuple {
                dom: dualize_type(cod),
                components: self.components(components),
            },
        }
    }

    fn components(&self, cs: &[(String, Term)]) -> Vec<(String, Term)> {
        cs.iter().map(|(i, t)| (i.clone(), self.term(t))).collect()
    }

    pub fn equation(&self, e: &Equation) -> Equation {
        Equation {
            lhs: self.term(&e.lhs),
            rhs: self.term(&e.rhs),
            kind: e.kind,
        }
    }

    fn judgment(&self, j: &Judgment) -> Judgment {
        match j {
            Judgment::IsType(t) => Judgment::IsType(dualize_type(t)),
            Judgment::WellFormed(t, d) => Judgment::WellFormed(self.term(t), *d),
            Judgment::Holds(e) => Judgment::Holds(self.equation(e)),
        }
    }

    pub fn derivation(&self, d: &Derivation) -> Derivation {
        let conclusion = self.judgment(&d.conclusion);
        let step = match &d.step {
            Step::Rule(r) => Step::Rule(r.dual()),
            Step::Axiom(n) => Step::Axiom(*n),
            Step::Hypothesis(label) => Step::Hypothesis(match &conclusion {
                Judgment::WellFormed(t, _) => t.to_string(),
                Judgment::IsType(t) => t.to_string(),
                Judgment::Holds(_) => label.clone(),
            }),
        };
        let rename = match &d.step {
            Step::Rule(r) => inst_renaming(*r),
            _ => &[],
        };
        let inst = d
            .inst
            .iter()
            .map(|(k, v)| {
                let key = rename
                    .iter()
                    .find(|(a, _)| a == k)
                    .map(|(_, b)| b.to_string())
                    .unwrap_or_else(|| k.clone());
                let v = match v {
                    InstValue::Term(t) => InstValue::Term(self.term(t)),
                    InstValue::Type(t) => InstValue::Type(dualize_type(t)),
                    InstValue::Index(i) => InstValue::Index(i.clone()),
                };
                (key, v)
            })
            .collect();
        Derivation {
            conclusion,
            step,
            premises: d.premises.iter().map(|p| self.derivation(p)).collect(),
            inst,
        }
    }
}

/// Metavariables that change name along with the rule.
fn inst_renaming(rule: RuleId) -> &'static [(&'static str, &'static str)] {
    use RuleId::*;
    match rule {
        Assoc => &[("f", "h"), ("h", "f")],
        EqSubs | WSubs | WSubsPure => &[("f", "g")],
        EqRepl | WRepl | WReplPure => &[("g", "f")],
        _ => &[],
    }
}

pub fn dualize_type(ty: &Type) -> Type {
    match ty {
        Type::Named(n) => Type::Named(n.clone()),
        Type::Unit => Type::Empty,
        Type::Empty => Type::Unit,
        Type::Prod(a, b) => Type::coprod(dualize_type(a), dualize_type(b)),
        Type::Coprod(a, b) => Type::prod(dualize_type(a), dualize_type(b)),
        Type::Value(i) => Type::Param(i.clone()),
        Type::Param(i) => Type::Value(i.clone()),
    }
}

/// The dual theory: flavor flipped, every arrow reversed.
pub fn dualize_theory(theory: &Theory) -> Result<Theory, Error> {
    let map = DualityMap::for_theory(theory)?;
    Ok(Theory {
        flavor: dual_flavor(theory.flavor)?,
        indices: theory.indices.clone(),
        generators: theory
            .generators
            .iter()
            .map(|g| Generator {
                name: map.generators[&g.name].clone(),
                dom: dualize_type(&g.cod),
                cod: dualize_type(&g.dom),
                decoration: g.decoration,
                role: dual_role(&g.role),
            })
            .collect(),
        axioms: theory
            .axioms
            .iter()
            .map(|a| Axiom {
                label: dual_label(&a.label),
                equation: map.equation(&a.equation),
            })
            .collect(),
    })
}

pub fn dualize_term(theory: &Theory, t: &Term) -> Result<Term, Error> {
    Ok(DualityMap::for_theory(theory)?.term(t))
}

pub fn dualize_equation(theory: &Theory, e: &Equation) -> Result<Equation, Error> {
    Ok(DualityMap::for_theory(theory)?.equation(e))
}

pub fn dualize_derivation(theory: &Theory, d: &Derivation) -> Result<Derivation, Error> {
    Ok(DualityMap::for_theory(theory)?.derivation(d))
}

/// Whether two equations agree up to associativity and identities.
pub fn same_equation(a: &Equation, b: &Equation) -> bool {
    a.kind == b.kind
        && normalize_assoc(&a.lhs) == normalize_assoc(&b.lhs)
        && normalize_assoc(&a.rhs) == normalize_assoc(&b.rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_derivation;
    use crate::states::{build_states_theory, derive_lemma};

    #[test]
    fn lookup_dualizes_to_throw() {
        let th = build_states_theory(&["x"]).unwrap();
        let t = dualize_term(&th, &th.lookup("x").unwrap()).unwrap();
        assert_eq!(
            t,
            Term::gen("t_x", Type::param("x"), Type::Empty, Decoration::Accessor)
        );
    }

    #[test]
    fn axiom_labels_swap() {
        assert_eq!(dual_label("A2_x_y"), "B2_x_y");
        assert_eq!(dual_label("B1_i"), "A1_i");
        assert_eq!(dual_label("K_i"), "K_i");
    }

    #[test]
    fn dual_annihilation_is_accepted() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let d = derive_lemma(&th, "annihilation", &["x"]).unwrap();
        let dth = dualize_theory(&th).unwrap();
        let dd = dualize_derivation(&th, &d).unwrap();
        let r = check_derivation(&dth, &dd);
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(dualize_derivation(&dth, &dd).unwrap(), d);
    }

    #[test]
    fn erased_derivations_are_plain_valid() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let d = derive_lemma(&th, "commutation-6", &["x", "y"]).unwrap();
        let e = erase_derivation(&d);
        let r = check_derivation(&erase_theory(&th), &e);
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(erase_derivation(&e), e);
    }

    #[test]
    fn plain_theories_have_no_dual() {
        assert!(dualize_theory(&Theory::plain()).is_err());
    }
}
