//! Random theories, terms, models and derivations for property tests.
#![allow(dead_code)]

use std::collections::HashMap;

use decor::exceptions::build_exceptions_theory;
use decor::kernel::{Derivation, Prover};
use decor::model::{FiniteModel, Outcome, Table};
use decor::states::build_states_theory;
use decor::syntax::{check, Decoration, Equation, Flavor, Generator, Role, Signature, Term, Theory, Type};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

pub struct Sample {
    pub theory: Theory,
    pub sizes: Vec<u32>,
}

/// A states or exceptions theory on one or two indices, with a few user
/// generators of every decoration, and carriers of at most three elements.
pub fn random_theory(rng: &mut Rand) -> Sample {
    let ix: &[&str] = if rng.gen_bool(0.5) { &["x"] } else { &["x", "y"] };
    let states = rng.gen_bool(0.5);
    let mut th = if states {
        build_states_theory(ix).unwrap()
    } else {
        build_exceptions_theory(ix).unwrap()
    };
    let base = |i: &str| if states { Type::value(i) } else { Type::param(i) };
    let (first, last) = (ix[0], ix[ix.len() - 1]);
    let mut user = vec![
        ("p", base(first), base(last), Decoration::Pure),
        ("q", base(last), base(first), Decoration::Accessor),
    ];
    if states {
        user.push(("a", Type::Unit, base(first), Decoration::Accessor));
        user.push(("m", base(first), base(last), Decoration::Modifier));
    } else {
        user.push(("k", base(first), Type::Empty, Decoration::Modifier));
        user.push(("r", base(last), Type::Unit, Decoration::Accessor));
    }
    for (name, dom, cod, decoration) in user {
        th.add_generator(Generator {
            name: name.into(),
            dom,
            cod,
            decoration,
            role: Role::User,
        })
        .unwrap();
    }
    let sizes = ix.iter().map(|_| rng.gen_range(1..=3)).collect();
    Sample { theory: th, sizes }
}

/// A table respecting the decoration of `gen`.
pub fn random_table(m: &FiniteModel, gen: &Generator, rng: &mut Rand) -> Table {
    let xs = m.carrier(&gen.dom).unwrap();
    let ys = m.carrier(&gen.cod).unwrap();
    match m.flavor {
        Flavor::Exceptions => {
            let excs: Vec<Outcome> = m.exceptions().into_iter().map(Outcome::Raised).collect();
            let mut outs: Vec<Outcome> = ys.into_iter().map(Outcome::Value).collect();
            let values = outs.clone();
            outs.extend(excs.iter().cloned());
            let mut t = HashMap::new();
            for x in xs {
                let pool = if gen.decoration == Decoration::Pure { &values } else { &outs };
                t.insert(Outcome::Value(x), pool.choose(rng).unwrap().clone());
            }
            for e in excs {
                let y = if gen.decoration == Decoration::Modifier {
                    outs.choose(rng).unwrap().clone()
                } else {
                    e.clone()
                };
                t.insert(e, y);
            }
            Table::Exceptions(t)
        }
        _ => {
            let states = m.states();
            let mut t = HashMap::new();
            let pure: Vec<_> = xs.iter().map(|_| ys.choose(rng).unwrap().clone()).collect();
            for (x, p) in xs.iter().zip(&pure) {
                for s in &states {
                    let out = match gen.decoration {
                        Decoration::Pure => (p.clone(), s.clone()),
                        Decoration::Accessor => (ys.choose(rng).unwrap().clone(), s.clone()),
                        Decoration::Modifier => (ys.choose(rng).unwrap().clone(), states.choose(rng).unwrap().clone()),
                    };
                    t.insert((x.clone(), s.clone()), out);
                }
            }
            Table::States(t)
        }
    }
}

/// A model of `sample` with random tables for every user generator.
pub fn random_model(sample: &Sample, rng: &mut Rand) -> FiniteModel {
    let mut m = FiniteModel::new(&sample.theory, &sample.sizes);
    for g in &sample.theory.generators {
        if g.role == Role::User {
            let t = random_table(&m, g, rng);
            m.interpret(&g.name, t);
        }
    }
    m
}

fn types(th: &Theory) -> Vec<Type> {
    let mut out = vec![Type::Unit, Type::Empty];
    for i in &th.indices {
        out.push(if th.flavor == Flavor::States {
            Type::value(i)
        } else {
            Type::param(i)
        });
    }
    out
}

/// Every factor a random chain may use, with its signature.
pub fn atoms(th: &Theory) -> Vec<(Term, Signature)> {
    let mut ts: Vec<Term> = th.generators.iter().map(Generator::term).collect();
    for x in types(th) {
        ts.push(Term::Id(x.clone()));
        ts.push(Term::ToUnit(x.clone()));
        ts.push(Term::FromEmpty(x));
    }
    ts.into_iter()
        .filter_map(|t| check(th, &t).ok().map(|s| (t, s)))
        .collect()
}

/// A composite of one to four factors starting at `dom`, of size at most 8.
pub fn random_chain(th: &Theory, dom: &Type, rng: &mut Rand) -> Vec<Term> {
    let atoms = atoms(th);
    let len = rng.gen_range(1..=4);
    let mut cur = dom.clone();
    let mut factors: Vec<Term> = Vec::new();
    for _ in 0..len {
        let next: Vec<&(Term, Signature)> = atoms.iter().filter(|(_, s)| s.dom == cur).collect();
        let Some((t, s)) = next.choose(rng) else { break };
        factors.insert(0, t.clone());
        cur = s.cod.clone();
    }
    if factors.is_empty() {
        factors.push(Term::Id(dom.clone()));
    }
    factors
}

pub fn random_term(th: &Theory, rng: &mut Rand) -> Term {
    let dom = types(th).choose(rng).unwrap().clone();
    Term::seq(random_chain(th, &dom, rng))
}

fn term_from(th: &Theory, dom: &Type, rng: &mut Rand) -> Term {
    Term::seq(random_chain(th, dom, rng))
}

/// A term `dom → cod`, falling back to short canonical ones.
pub fn term_between(th: &Theory, dom: &Type, cod: &Type, rng: &mut Rand) -> Option<Term> {
    for _ in 0..20 {
        let t = term_from(th, dom, rng);
        if check(th, &t).map(|s| &s.cod == cod).unwrap_or(false) {
            return Some(t);
        }
    }
    [Term::Id(dom.clone()), Term::ToUnit(dom.clone()), Term::FromEmpty(cod.clone())]
        .into_iter()
        .find(|t| check(th, t).map(|s| &s.dom == dom && &s.cod == cod).unwrap_or(false))
}

fn sig(th: &Theory, eq: &Equation) -> Signature {
    check(th, &eq.lhs).unwrap()
}

/// A derivation grown by random rule applications from axioms,
/// reflexivity and the final or initial rules.
pub fn random_derivation(th: &Theory, depth: usize, rng: &mut Rand) -> Derivation {
    let p = Prover::new(th);
    let leaf = |rng: &mut Rand| -> Derivation {
        loop {
            let d = match rng.gen_range(0..4) {
                0 => p.axiom(&th.axioms.choose(rng).unwrap().label),
                1 => p.refl(&random_term(th, rng)),
                2 => p.wrefl(&random_term(th, rng)),
                _ if th.flavor == Flavor::States => {
                    let t = random_term(th, rng);
                    match check(th, &t) {
                        Ok(s) if s.cod == Type::Unit => p.final_weak(&t),
                        _ => continue,
                    }
                }
                _ => {
                    let t = term_from(th, &Type::Empty, rng);
                    p.initial_weak(&t)
                }
            };
            if let Ok(d) = d {
                return d;
            }
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let d = random_derivation(th, depth - 1, rng);
    let s = sig(th, d.equation().unwrap());
    let next = match rng.gen_range(0..6) {
        0 => p.sym(d.clone()),
        1 => p.to_weak(d.clone()),
        2 => p.to_strong(d.clone()),
        3 => match term_between(th, &types(th).choose(rng).unwrap().clone(), &s.dom, rng) {
            Some(f) => p.subs(d.clone(), &f),
            None => return d,
        },
        4 => {
            let g = term_from(th, &s.cod, rng);
            p.repl(d.clone(), &g)
        }
        _ => p.sym(d.clone()).and_then(|e| p.trans(vec![d.clone(), e])),
    };
    next.unwrap_or(d)
}
