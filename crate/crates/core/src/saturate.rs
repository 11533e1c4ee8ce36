//! Bounded forward saturation over the rule catalog.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernel::{check_derivation, Derivation, Prover};
use crate::syntax::{check, normalize_assoc, Decoration, EqKind, Equation, Flavor, Term, Theory, Type};

/// Result of [`saturate_prove`]. `Unknown` is not a disproof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
pub enum Search {
    Proven { derivation: Derivation, rounds: usize },
    Unknown { rounds: usize, facts: usize },
}

impl Search {
    pub fn proven(&self) -> Option<&Derivation> {
        match self {
            Search::Proven { derivation, .. } => Some(derivation),
            Search::Unknown { .. } => None,
        }
    }
}

type Key = (usize, String);

fn key(e: &Equation) -> Key {
    (e.lhs.size().max(e.rhs.size()), e.to_string())
}

/// Every suffix (or prefix) of the composition spine of `t`.
fn cuts(t: &Term, suffixes: bool) -> Vec<Term> {
    let spine: Vec<Term> = normalize_assoc(t).spine().into_iter().cloned().collect();
    (0..spine.len())
        .map(|k| {
            if suffixes {
                Term::seq(spine[k..].to_vec())
            } else {
                Term::seq(spine[..spine.len() - k].to_vec())
            }
        })
        .collect()
}

struct Saturator<'a> {
    th: &'a Theory,
    p: Prover<'a>,
    goal: Equation,
    limit: usize,
    facts: BTreeMap<Key, Derivation>,
    collapsed: BTreeSet<Term>,
    subs: Vec<Term>,
    repls: Vec<Term>,
}

impl Saturator<'_> {
    fn add(&mut self, d: Derivation) {
        let e = d.equation().expect("facts are equations").clone();
        if e.lhs.size().max(e.rhs.size()) > self.limit {
            return;
        }
        self.facts.entry(key(&e)).or_insert(d);
    }

    fn found(&self) -> Option<Derivation> {
        let g = self.goal.normalized();
        if let Some(d) = self.facts.get(&key(&g)) {
            return Some(d.clone());
        }
        if g.kind == EqKind::Weak {
            let s = Equation::strong(g.lhs.clone(), g.rhs.clone());
            if let Some(d) = self.facts.get(&key(&s)) {
                return self.p.to_weak(d.clone()).ok();
            }
        }
        None
    }

    /// `t ≡ ⟨⟩` for effect-reading terms into 1, dually `t ≡ []` out of 0.
    fn collapse(&mut self) {
        let states = self.th.flavor == Flavor::States;
        let mut sides = Vec::new();
        for d in self.facts.values() {
            let e = d.equation().unwrap();
            for side in [&e.lhs, &e.rhs] {
                sides.extend(cuts(side, states));
            }
        }
        let edge = if states { Type::Unit } else { Type::Empty };
        sides.push(Term::Id(edge.clone()));
        for t in sides {
            if self.collapsed.contains(&t) || matches!(t, Term::ToUnit(_) | Term::FromEmpty(_)) {
                continue;
            }
            self.collapsed.insert(t.clone());
            let Ok(s) = check(self.th, &t) else { continue };
            let lands = if states { s.cod == edge } else { s.dom == edge };
            if !lands || s.dec == Decoration::Modifier {
                continue;
            }
            let w = if states { self.p.final_weak(&t) } else { self.p.initial_weak(&t) };
            if let Ok(d) = w.and_then(|w| self.p.to_strong(w)) {
                self.add(d);
            }
        }
    }

    fn unary(&mut self) {
        let snapshot: Vec<Derivation> = self.facts.values().cloned().collect();
        for d in snapshot {
            let kind = d.equation().unwrap().kind;
            let mut out = vec![self.p.sym(d.clone())];
            if kind == EqKind::Strong {
                out.push(self.p.to_weak(d.clone()));
            } else {
                out.push(self.p.to_strong(d.clone()));
            }
            for f in &self.subs {
                out.push(self.p.subs(d.clone(), f));
            }
            for g in &self.repls {
                out.push(self.p.repl(d.clone(), g));
            }
            for r in out.into_iter().flatten() {
                self.add(r);
            }
        }
    }

    fn binary(&mut self) {
        let snapshot: Vec<Derivation> = self.facts.values().cloned().collect();
        let mut by_lhs: BTreeMap<String, Vec<&Derivation>> = BTreeMap::new();
        for d in &snapshot {
            by_lhs.entry(d.equation().unwrap().lhs.to_string()).or_default().push(d);
        }
        let mut out = Vec::new();
        for a in &snapshot {
            let ea = a.equation().unwrap();
            for b in by_lhs.get(&ea.rhs.to_string()).into_iter().flatten() {
                let eb = b.equation().unwrap();
                if ea.lhs == eb.rhs {
                    continue;
                }
                let (a, b) = match (ea.kind, eb.kind) {
                    (EqKind::Weak, EqKind::Strong) => (Ok(a.clone()), self.p.to_weak((*b).clone())),
                    (EqKind::Strong, EqKind::Weak) => (self.p.to_weak(a.clone()), Ok((*b).clone())),
                    _ => (Ok(a.clone()), Ok((*b).clone())),
                };
                if let (Ok(a), Ok(b)) = (a, b) {
                    out.extend(self.p.trans(vec![a, b]).ok());
                }
            }
        }
        for d in out {
            self.add(d);
        }
    }
}

/// Searches `budget` rounds from the axioms for a derivation of `goal`.
///
/// Each round applies the unary rules (symmetry, kind changes, substitution
/// by suffixes and replacement by prefixes of the goal sides) to every fact,
/// then transitivity to every matching pair. Facts are kept in order of
/// size and rendering, so the search is deterministic.
pub fn saturate_prove(theory: &Theory, goal: &Equation, budget: usize) -> Result<Search, Error> {
    let l = check(theory, &goal.lhs)?;
    let r = check(theory, &goal.rhs)?;
    if (l.dom.clone(), l.cod.clone()) != (r.dom, r.cod) {
        return Err(Error::BadParams(format!("`{goal}` relates terms of different types")));
    }
    let goal = goal.normalized();
    let mut subs = BTreeSet::new();
    let mut repls = BTreeSet::new();
    for side in [&goal.lhs, &goal.rhs] {
        subs.extend(cuts(side, true));
        repls.extend(cuts(side, false));
    }
    let mut s = Saturator {
        th: theory,
        p: Prover::new(theory),
        limit: goal.lhs.size().max(goal.rhs.size()) + 3,
        goal: goal.clone(),
        facts: BTreeMap::new(),
        collapsed: BTreeSet::new(),
        subs: subs.into_iter().collect(),
        repls: repls.into_iter().collect(),
    };
    for a in &theory.axioms {
        if let Ok(d) = s.p.axiom(&a.label) {
            s.add(d);
        }
    }
    for side in [&goal.lhs, &goal.rhs] {
        if let Ok(d) = s.p.refl(side) {
            s.add(d);
        }
    }
    s.collapse();
    let mut rounds = 0;
    loop {
        if let Some(d) = s.found() {
            if check_derivation(theory, &d).is_valid() {
                return Ok(Search::Proven { derivation: d, rounds });
            }
        }
        if rounds == budget {
            return Ok(Search::Unknown {
                rounds,
                facts: s.facts.len(),
            });
        }
        rounds += 1;
        s.unary();
        s.collapse();
        s.binary();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::build_states_theory;

    #[test]
    fn reflexivity_needs_no_round() {
        let th = build_states_theory(&["x"]).unwrap();
        let id = Term::Id(Type::value("x"));
        let r = saturate_prove(&th, &Equation::strong(id.clone(), id), 0).unwrap();
        assert!(matches!(r, Search::Proven { rounds: 0, .. }));
    }

    #[test]
    fn weak_substitution_of_an_axiom() {
        let th = build_states_theory(&["x"]).unwrap();
        let (l, u) = (th.lookup("x").unwrap(), th.update("x").unwrap());
        let goal = Equation::weak(Term::seq(vec![l.clone(), u, l.clone()]), l);
        let r = saturate_prove(&th, &goal, 3).unwrap();
        assert!(r.proven().is_some());
    }

    #[test]
    fn strong_a1_stays_unknown() {
        let th = build_states_theory(&["x"]).unwrap();
        let (l, u) = (th.lookup("x").unwrap(), th.update("x").unwrap());
        let goal = Equation::strong(Term::comp(l, u), Term::Id(Type::value("x")));
        let r = saturate_prove(&th, &goal, 4).unwrap();
        assert!(matches!(r, Search::Unknown { .. }));
    }

    #[test]
    fn lookup_after_update_lookup_on_two_locations() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        for i in ["x", "y"] {
            for j in ["x", "y"] {
                let (li, ui, lj) = (th.lookup(i).unwrap(), th.update(i).unwrap(), th.lookup(j).unwrap());
                let goal = Equation::weak(Term::seq(vec![lj.clone(), ui, li]), lj);
                let r = saturate_prove(&th, &goal, 4).unwrap();
                assert!(r.proven().is_some(), "{goal}: {r:?}");
            }
        }
    }
}
