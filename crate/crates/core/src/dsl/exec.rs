use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use super::ast::*;
use super::report::{render_tree, Entry, Report, Status, Translation};
use crate::error::Error;
use crate::exceptions::{self, build_exceptions_theory, handle_term, raise_term, HandlerSpec};
use crate::explicit::{expand_exceptions_theory, expand_states_theory, EXC, STATE};
use crate::kernel::{check_derivation, Derivation, InstValue, Prover, Report as KReport, RuleId};
use crate::model::{check_equation, eval_exceptions, eval_states, Elem, Exc, FiniteModel, Outcome, State, Table, Verdict};
use crate::saturate::{saturate_prove, Search};
use crate::states::{self, build_states_theory};
use crate::suites::{verify_law_suite, LawStatus};
use crate::syntax::{check, Axiom, Decoration, Equation, Flavor, Generator, Role, Term, Theory, Type};
use crate::translate::{dualize_theory, erase_theory};

/// Which commands a run executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every command in the script.
    #[default]
    All,
    /// Lemmas, proofs, equation checks and searches.
    Check,
    /// Suites and equation checks.
    Verify,
    Eval,
    /// Translate every declared theory, ignoring the commands.
    Erase,
    Expand,
    Dualize,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    /// Saturation rounds for `prove` without an explicit budget.
    pub budget: usize,
    pub fail_fast: bool,
    /// Carrier sizes by index or type name, applied to every theory.
    pub overrides: Vec<(String, u32)>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            mode: Mode::All,
            budget: 4,
            fail_fast: false,
            overrides: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
struct Env {
    theory: Theory,
    sizes: Vec<u32>,
    named: BTreeMap<String, u32>,
    tables: Vec<(String, Vec<TableEntry>)>,
}

struct Proof<'a> {
    theory: &'a str,
    steps: &'a [ProofStep],
    proves: Option<&'a EqExpr>,
}

struct Exec<'a> {
    config: &'a Config,
    theories: BTreeMap<String, Env>,
    lets: Vec<(String, &'a Expr)>,
    equations: BTreeMap<String, &'a EqExpr>,
    proofs: BTreeMap<String, Proof<'a>>,
}

/// Runs a parsed script. Failures are recorded in the report, never raised.
pub fn execute(script: &Script, config: &Config) -> Report {
    let mut ex = Exec {
        config,
        theories: BTreeMap::new(),
        lets: Vec::new(),
        equations: BTreeMap::new(),
        proofs: BTreeMap::new(),
    };
    let mut entries = Vec::new();
    let mut order = Vec::new();
    for (decl, &line) in script.decls.iter().zip(&script.lines) {
        let start = Instant::now();
        let entry = match decl {
            Decl::Command(c) => {
                if matches!(config.mode, Mode::Erase | Mode::Expand | Mode::Dualize) || !selected(config.mode, c) {
                    continue;
                }
                ex.command(line, c)
            }
            _ => match ex.declare(decl) {
                Ok(Some(name)) => {
                    order.push((line, name));
                    continue;
                }
                Ok(None) => continue,
                Err(e) => {
                    let mut en = Entry::new(line, decl.to_string(), Status::Error);
                    en.message = Some(e.to_string());
                    en
                }
            },
        };
        let stop = config.fail_fast && entry.status != Status::Ok;
        entries.push(Entry {
            elapsed: start.elapsed(),
            ..entry
        });
        if stop {
            return Report::new(entries);
        }
    }
    let translate = match config.mode {
        Mode::Erase => Command::Erase,
        Mode::Expand => Command::Expand,
        Mode::Dualize => Command::Dualize,
        _ => return Report::new(entries),
    };
    for (line, name) in order {
        let start = Instant::now();
        let entry = ex.command(line, &translate(name));
        let stop = config.fail_fast && entry.status != Status::Ok;
        entries.push(Entry {
            elapsed: start.elapsed(),
            ..entry
        });
        if stop {
            break;
        }
    }
    Report::new(entries)
}

fn selected(mode: Mode, c: &Command) -> bool {
    match mode {
        Mode::All => true,
        Mode::Check => matches!(
            c,
            Command::Lemma { .. } | Command::CheckProof { .. } | Command::Check { .. } | Command::Prove { .. }
        ),
        Mode::Verify => matches!(c, Command::Verify { .. } | Command::Check { .. }),
        Mode::Eval => matches!(c, Command::Eval { .. }),
        Mode::Erase | Mode::Expand | Mode::Dualize => false,
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

impl<'a> Exec<'a> {
    /// Records a declaration; returns the theory name for theory declarations.
    fn declare(&mut self, decl: &'a Decl) -> Result<Option<String>, Error> {
        match decl {
            Decl::Theory { name, base, items } => {
                let mut env = match base {
                    TheoryBase::Builtin(flavor, ix) => {
                        let names: Vec<&str> = ix.iter().map(|(i, _)| i.as_str()).collect();
                        let theory = match flavor {
                            Flavor::States => build_states_theory(&names)?,
                            Flavor::Exceptions => build_exceptions_theory(&names)?,
                            Flavor::Plain => {
                                let mut th = Theory::plain();
                                th.indices = names.iter().map(|s| s.to_string()).collect();
                                th
                            }
                        };
                        Env {
                            theory,
                            sizes: ix.iter().map(|(_, k)| *k).collect(),
                            named: BTreeMap::new(),
                            tables: Vec::new(),
                        }
                    }
                    TheoryBase::Dual(of) => {
                        let src = &self.theories[of];
                        Env {
                            theory: dualize_theory(&src.theory)?,
                            sizes: src.sizes.clone(),
                            named: src.named.clone(),
                            tables: Vec::new(),
                        }
                    }
                };
                for item in items {
                    match item {
                        TheoryItem::Generator { name, dom, cod, dec, .. } => {
                            env.theory.add_generator(Generator {
                                name: name.clone(),
                                dom: dom.clone(),
                                cod: cod.clone(),
                                decoration: *dec,
                                role: Role::User,
                            })?;
                        }
                        TheoryItem::Axiom { label, eq } => {
                            let e = self.resolve_eq(&mut env.theory, eq)?;
                            env.theory.add_axiom(label, e)?;
                        }
                    }
                }
                for (k, v) in &self.config.overrides {
                    match env.theory.indices.iter().position(|i| i == k) {
                        Some(p) => env.sizes[p] = *v,
                        None => {
                            env.named.insert(k.clone(), *v);
                        }
                    }
                }
                self.theories.insert(name.clone(), env);
                Ok(Some(name.clone()))
            }
            Decl::Let { name, expr } => {
                self.lets.push((name.clone(), expr));
                Ok(None)
            }
            Decl::Equation { name, eq } => {
                self.equations.insert(name.clone(), eq);
                Ok(None)
            }
            Decl::Model { theory, items } => {
                let overrides = &self.config.overrides;
                let env = self.theories.get_mut(theory).expect("checked by the parser");
                for item in items {
                    match item {
                        ModelItem::Carrier(n, k) => {
                            if !overrides.iter().any(|(o, _)| o == n) {
                                env.named.insert(n.clone(), *k);
                            }
                        }
                        ModelItem::Table(g, entries) => {
                            if env.theory.generator(g).is_none() {
                                return Err(bad(format!("table for undeclared generator `{g}`")));
                            }
                            env.tables.push((g.clone(), entries.clone()));
                        }
                    }
                }
                Ok(None)
            }
            Decl::Proof {
                name,
                theory,
                steps,
                proves,
            } => {
                self.proofs.insert(
                    name.clone(),
                    Proof {
                        theory,
                        steps,
                        proves: proves.as_ref(),
                    },
                );
                Ok(None)
            }
            Decl::Command(_) => Ok(None),
        }
    }

    fn env(&self, name: &str) -> Result<Env, Error> {
        self.theories
            .get(name)
            .cloned()
            .ok_or_else(|| bad(format!("unknown theory `{name}`")))
    }

    fn resolve_eq(&self, th: &mut Theory, e: &EqExpr) -> Result<Equation, Error> {
        let lhs = self.resolve(th, &e.lhs, self.lets.len())?;
        let rhs = self.resolve(th, &e.rhs, self.lets.len())?;
        Ok(Equation {
            lhs,
            rhs,
            kind: e.kind,
        })
    }

    fn eq_ref(&self, th: &mut Theory, r: &EqRef) -> Result<Equation, Error> {
        match r {
            EqRef::Inline(e) => self.resolve_eq(th, e),
            EqRef::Named(n) => {
                let e = self.equations.get(n).ok_or_else(|| bad(format!("unknown equation `{n}`")))?;
                self.resolve_eq(th, e)
            }
        }
    }

    /// Resolves names against the first `scope` definitions and the theory.
    fn resolve(&self, th: &mut Theory, e: &Expr, scope: usize) -> Result<Term, Error> {
        let go = |x: &Expr, th: &mut Theory| self.resolve(th, x, scope);
        Ok(match e {
            Expr::Name(n) => {
                if let Some(k) = self.lets[..scope].iter().rposition(|(m, _)| m == n) {
                    return self.resolve(th, self.lets[k].1, k);
                }
                th.generator(n)
                    .map(Generator::term)
                    .ok_or_else(|| bad(format!("unknown name `{n}`")))?
            }
            Expr::Id(t) => Term::Id(t.clone()),
            Expr::ToUnit(t) => Term::ToUnit(t.clone()),
            Expr::FromEmpty(t) => Term::FromEmpty(t.clone()),
            Expr::Typed(op, a, b) => {
                let (a, b) = (a.clone(), b.clone());
                match op {
                    TypedOp::Proj1 => Term::Proj1(a, b),
                    TypedOp::Proj2 => Term::Proj2(a, b),
                    TypedOp::Inj1 => Term::Inj1(a, b),
                    TypedOp::Inj2 => Term::Inj2(a, b),
                }
            }
            Expr::Bin(op, a, b) => {
                let (a, b) = (go(a, th)?, go(b, th)?);
                match op {
                    BinOp::Pair => Term::pair(a, b),
                    BinOp::Copair => Term::prop_case(a, b),
                    BinOp::LSemi => Term::semi_left(a, b),
                    BinOp::RSemi => Term::semi_right(a, b),
                    BinOp::LCosemi => Term::cosemi_left(a, b),
                    BinOp::RCosemi => Term::cosemi_right(a, b),
                    BinOp::Case => Term::case_sum(a, b),
                    BinOp::Tuple => Term::tuple_prod(a, b),
                }
            }
            Expr::Coerce(k) => Term::coerce(go(k, th)?),
            Expr::LocTuple(t, cs) | Expr::Cotuple(t, cs) => {
                let mut components = Vec::new();
                for (i, c) in cs {
                    components.push((i.clone(), go(c, th)?));
                }
                if matches!(e, Expr::LocTuple(..)) {
                    Term::LocTuple {
                        dom: t.clone(),
                        components,
                    }
                } else {
                    Term::ConstCotuple {
                        cod: t.clone(),
                        components,
                    }
                }
            }
            Expr::Comp(fs) => {
                let mut ts = Vec::new();
                for f in fs {
                    ts.push(go(f, th)?);
                }
                Term::seq(ts)
            }
            Expr::Raise(i, t) => raise_term(th, i, t.as_ref().unwrap_or(&Type::Empty))?,
            Expr::Try {
                body,
                clauses,
                catch_all,
            } => {
                let mut cs = Vec::new();
                for (i, g) in clauses {
                    cs.push((i.clone(), go(g, th)?));
                }
                let all = match catch_all {
                    Some(k) => Some(go(k, th)?),
                    None => None,
                };
                // A bare `raise(i)` takes the type of the handlers.
                let body = match &**body {
                    Expr::Raise(i, None) => {
                        let first = cs.first().map(|(_, g)| g).or(all.as_ref());
                        let y = match first {
                            Some(g) => check(th, g)?.cod,
                            None => Type::Empty,
                        };
                        raise_term(th, i, &y)?
                    }
                    b => go(b, th)?,
                };
                let h = handle_term(
                    th,
                    &HandlerSpec {
                        body,
                        clauses: cs,
                        catch_all: all,
                    },
                )?;
                *th = h.theory;
                h.term
            }
        })
    }

    fn model(&self, env: &Env, th: &Theory) -> Result<FiniteModel, Error> {
        let mut m = FiniteModel::new(th, &env.sizes);
        m.named = env.named.clone();
        for (g, entries) in &env.tables {
            let gen = th.generator(g).expect("checked on declaration");
            let table = self.table(&m, th, gen, entries)?;
            m.interpret(g, table);
        }
        Ok(m)
    }

    fn table(&self, m: &FiniteModel, th: &Theory, gen: &Generator, entries: &[TableEntry]) -> Result<Table, Error> {
        let (dom, cod) = (m.carrier(&gen.dom)?, m.carrier(&gen.cod)?);
        let within = |x: &Elem, set: &[Elem], ty: &Type| {
            if set.contains(x) {
                Ok(())
            } else {
                Err(bad(format!("table of `{}`: {x} is not in {ty}", gen.name)))
            }
        };
        let excs = m.exceptions();
        let valid = |o: &Outcome, set: &[Elem], ty: &Type| match o {
            Outcome::Value(x) => within(x, set, ty),
            Outcome::Raised(e) if excs.contains(e) => Ok(()),
            Outcome::Raised(e) => Err(bad(format!("table of `{}`: {} is out of range", gen.name, m.render_exc(e)))),
        };
        match th.flavor {
            Flavor::Exceptions => {
                let mut t = HashMap::new();
                for en in entries {
                    let (x, y) = (outcome(th, &en.input)?, outcome(th, &en.output)?);
                    valid(&x, &dom, &gen.dom)?;
                    valid(&y, &cod, &gen.cod)?;
                    t.insert(x, y);
                }
                if gen.decoration != Decoration::Modifier {
                    for e in m.exceptions() {
                        t.entry(Outcome::Raised(e)).or_insert(Outcome::Raised(e));
                    }
                }
                Ok(Table::Exceptions(t))
            }
            _ => {
                let mut t = HashMap::new();
                for en in entries {
                    let (x, y) = (elem(&en.input)?, elem(&en.output)?);
                    within(&x, &dom, &gen.dom)?;
                    within(&y, &cod, &gen.cod)?;
                    match (&en.state, &en.state_out) {
                        (None, None) => {
                            for s in m.states() {
                                t.insert((x.clone(), s.clone()), (y.clone(), s));
                            }
                        }
                        (Some(s), out) => {
                            let s = state(m, s)?;
                            let s2 = match out {
                                Some(o) => state(m, o)?,
                                None => s.clone(),
                            };
                            t.insert((x.clone(), s), (y.clone(), s2));
                        }
                        (None, Some(_)) => return Err(bad("an output state needs an input state")),
                    }
                }
                Ok(Table::States(t))
            }
        }
    }

    fn command(&self, line: usize, c: &Command) -> Entry {
        let mut en = Entry::new(line, c.to_string(), Status::Ok);
        if let Err(e) = self.run(c, &mut en) {
            en.status = Status::Error;
            en.message = Some(e.to_string());
        }
        en
    }

    fn run(&self, c: &Command, en: &mut Entry) -> Result<(), Error> {
        match c {
            Command::Lemma { name, params, theory } => {
                let env = self.env(theory)?;
                let ps: Vec<&str> = params.iter().map(String::as_str).collect();
                let d = derive(&env.theory, name, &ps)?;
                kernel_entry(&env.theory, &d, en);
            }
            Command::CheckProof { name, theory } => {
                if let Some(p) = self.proofs.get(name).filter(|p| theory.as_deref().is_none_or(|t| t == p.theory)) {
                    self.user_proof(p, en)?;
                } else {
                    let t = theory.as_ref().ok_or_else(|| bad(format!("unknown proof `{name}`")))?;
                    let env = self.env(t)?;
                    let ps = lemma_params(&env.theory, name)?;
                    let ps: Vec<&str> = ps.iter().map(String::as_str).collect();
                    let d = derive(&env.theory, name, &ps)?;
                    kernel_entry(&env.theory, &d, en);
                }
            }
            Command::Verify { suite, theory } => {
                let env = self.env(theory)?;
                let m = self.model(&env, &env.theory)?;
                let r = verify_law_suite(&m, &env.theory, suite)?;
                en.points = r.points();
                if !r.passed() {
                    en.status = Status::Failed;
                    en.witness = first_witness(&r);
                }
                en.suite = Some(r);
            }
            Command::Check { eq, theory } => {
                let env = self.env(theory)?;
                let mut th = env.theory.clone();
                let e = self.eq_ref(&mut th, eq)?;
                let m = self.model(&env, &th)?;
                en.conclusion = Some(e.to_string());
                match check_equation(&m, &th, &e)? {
                    Verdict::Holds { points } => en.points = points,
                    Verdict::Fails { witness } => {
                        en.status = Status::Failed;
                        en.witness = Some(witness.to_string());
                    }
                }
            }
            Command::Prove { eq, theory, budget } => {
                let env = self.env(theory)?;
                let mut th = env.theory.clone();
                let e = self.eq_ref(&mut th, eq)?;
                en.conclusion = Some(e.to_string());
                match saturate_prove(&th, &e, budget.unwrap_or(self.config.budget))? {
                    Search::Proven { derivation, rounds } => {
                        en.nodes = derivation.size();
                        en.message = Some(format!("found after {rounds} rounds"));
                        en.tree = render_tree(&th, &derivation);
                    }
                    Search::Unknown { rounds, facts } => {
                        en.status = Status::Failed;
                        en.message = Some(format!("unknown after {rounds} rounds and {facts} facts"));
                    }
                }
            }
            Command::Eval {
                theory,
                term,
                input,
                state: st,
            } => {
                let env = self.env(theory)?;
                let mut th = env.theory.clone();
                let t = self.resolve(&mut th, term, self.lets.len())?;
                let sig = check(&th, &t)?;
                let m = self.model(&env, &th)?;
                en.conclusion = Some(format!("{t} : {} -> {}", sig.dom, sig.cod));
                en.output = Some(match th.flavor {
                    Flavor::Exceptions => {
                        if st.is_some() {
                            return Err(bad("exceptions evaluation takes no state"));
                        }
                        m.render_outcome(&eval_exceptions(&m, &t, &outcome(&th, input)?)?)
                    }
                    _ => {
                        let s = match st {
                            Some(s) => state(&m, s)?,
                            None => State(vec![0; m.sizes.len()]),
                        };
                        let (y, s2) = eval_states(&m, &t, &elem(input)?, &s)?;
                        format!("{y} @ {s2}")
                    }
                });
            }
            Command::Erase(name) | Command::Expand(name) | Command::Dualize(name) => {
                let env = self.env(name)?;
                let (suffix, th, extra) = match c {
                    Command::Erase(_) => ("erased", erase_theory(&env.theory), None),
                    Command::Dualize(_) => ("dual", dualize_theory(&env.theory)?, None),
                    _ => {
                        let m = FiniteModel::new(&env.theory, &env.sizes);
                        match env.theory.flavor {
                            Flavor::States => (
                                "expanded",
                                expand_states_theory(&env.theory)?,
                                Some((STATE, m.states().len() as u32)),
                            ),
                            Flavor::Exceptions => (
                                "expanded",
                                expand_exceptions_theory(&env.theory)?,
                                Some((EXC, m.exceptions().len() as u32)),
                            ),
                            Flavor::Plain => return Err(Error::Flavor("plain theories have no expansion".into())),
                        }
                    }
                };
                let tname = format!("{name}_{suffix}");
                let mut script = Script::default();
                script.decls.push(theory_decl(&tname, &th, &env.sizes));
                let mut carriers: Vec<ModelItem> = env.named.iter().map(|(k, v)| ModelItem::Carrier(k.clone(), *v)).collect();
                if let Some((n, k)) = extra {
                    carriers.push(ModelItem::Carrier(n.into(), k));
                }
                if !carriers.is_empty() {
                    script.decls.push(Decl::Model {
                        theory: tname,
                        items: carriers,
                    });
                }
                en.translation = Some(Translation {
                    script: script.to_string(),
                    theory: th,
                });
            }
        }
        Ok(())
    }

    fn user_proof(&self, p: &Proof, en: &mut Entry) -> Result<(), Error> {
        let env = self.env(p.theory)?;
        let mut th = env.theory.clone();
        let prover_th = th.clone();
        let pr = Prover::new(&prover_th);
        let mut done: BTreeMap<&str, Derivation> = BTreeMap::new();
        let mut last = None;
        for s in p.steps {
            let d = match &s.rule {
                StepRule::Axiom(a) => pr.axiom(a),
                StepRule::Rule(r) => {
                    let Some(rule) = RuleId::parse(r) else {
                        en.status = Status::Failed;
                        en.message = Some(format!("step {}: unknown rule `{r}`", s.label));
                        return Ok(());
                    };
                    let mut inst = BTreeMap::new();
                    for (k, v) in &s.args {
                        let v = match v {
                            Arg::Term(t) => InstValue::Term(self.resolve(&mut th, t, self.lets.len())?),
                            Arg::Type(t) => InstValue::Type(t.clone()),
                            Arg::Index(i) => InstValue::Index(i.clone()),
                        };
                        inst.insert(k.clone(), v);
                    }
                    let premises = s.from.iter().map(|l| done[l.as_str()].clone()).collect();
                    pr.rule(rule, premises, inst)
                }
            };
            match d {
                Ok(d) => {
                    done.insert(&s.label, d.clone());
                    last = Some(d);
                }
                Err(e) => {
                    en.status = Status::Failed;
                    en.message = Some(format!("step {}: {e}", s.label));
                    return Ok(());
                }
            }
        }
        let d = last.expect("proofs have a step");
        kernel_entry(&prover_th, &d, en);
        if let Some(goal) = p.proves {
            let goal = self.resolve_eq(&mut th, goal)?;
            if d.equation().is_none_or(|e| !e.same_as(&goal)) {
                en.status = Status::Failed;
                en.message = Some(format!("the proof does not conclude {goal}"));
            }
        }
        Ok(())
    }
}

fn derive(th: &Theory, name: &str, params: &[&str]) -> Result<Derivation, Error> {
    match th.flavor {
        Flavor::States => states::derive_lemma(th, name, params),
        Flavor::Exceptions => exceptions::derive_lemma(th, name, params),
        Flavor::Plain => Err(Error::Flavor("plain theories have no lemma catalog".into())),
    }
}

fn lemma_params(th: &Theory, name: &str) -> Result<Vec<String>, Error> {
    let p = match th.flavor {
        Flavor::States => states::default_params(th, name),
        _ => exceptions::default_params(th, name),
    };
    p.ok_or_else(|| bad(format!("not enough indices for `{name}`")))
}

fn kernel_entry(th: &Theory, d: &Derivation, en: &mut Entry) {
    en.conclusion = Some(match d.equation() {
        Some(e) => e.to_string(),
        None => d.conclusion.to_string(),
    });
    en.tree = render_tree(th, d);
    match check_derivation(th, d) {
        KReport::Valid { nodes } => en.nodes = nodes,
        KReport::Invalid { path, error } => {
            en.status = Status::Failed;
            en.message = Some(format!("rejected at node {path:?}: {error}"));
        }
    }
}

fn first_witness(r: &crate::suites::SuiteReport) -> Option<String> {
    for l in &r.laws {
        if let LawStatus::Checked(Verdict::Fails { witness }) = &l.status {
            return Some(format!("{}: {witness}", l.law));
        }
    }
    for n in &r.nesting {
        if n.observed != n.predicted {
            return Some(format!("{}: {}", n.scenario, n.observed.join(" | ")));
        }
    }
    r.duality
        .iter()
        .find(|d| !d.ok())
        .map(|d| format!("{} / {}", d.states_law, d.exceptions_law))
}

fn elem(l: &Lit) -> Result<Elem, Error> {
    Ok(match l {
        Lit::Int(n) => Elem::Atom(*n),
        Lit::Unit => Elem::Unit,
        Lit::Pair(a, b) => Elem::pair(elem(a)?, elem(b)?),
        Lit::Inl(a) => Elem::Left(Box::new(elem(a)?)),
        Lit::Inr(b) => Elem::Right(Box::new(elem(b)?)),
        Lit::Exc(..) => return Err(bad(format!("`{l}` is an exception"))),
    })
}

fn outcome(th: &Theory, l: &Lit) -> Result<Outcome, Error> {
    match l {
        Lit::Exc(i, a) => {
            let ctor = th
                .indices
                .iter()
                .position(|x| x == i)
                .ok_or_else(|| Error::UnknownConstructor(i.clone()))?;
            Ok(Outcome::Raised(Exc { ctor, arg: *a }))
        }
        _ => Ok(Outcome::Value(elem(l)?)),
    }
}

fn state(m: &FiniteModel, s: &[u32]) -> Result<State, Error> {
    if s.len() != m.sizes.len() || s.iter().zip(&m.sizes).any(|(v, k)| v >= k) {
        return Err(bad(format!("{s:?} is not a state of this model")));
    }
    Ok(State(s.to_vec()))
}

/// Script syntax for a term.
pub fn term_expr(t: &Term) -> Expr {
    let bin = |op, a: &Term, b: &Term| Expr::Bin(op, Box::new(term_expr(a)), Box::new(term_expr(b)));
    match t {
        Term::Gen { name, .. } => Expr::Name(name.clone()),
        Term::Id(x) => Expr::Id(x.clone()),
        Term::Comp(..) => {
            // Keep the association: only the right spine is flattened.
            let mut fs = Vec::new();
            let mut cur = t;
            while let Term::Comp(a, b) = cur {
                fs.push(term_expr(a));
                cur = b;
            }
            fs.push(term_expr(cur));
            Expr::Comp(fs)
        }
        Term::ToUnit(x) => Expr::ToUnit(x.clone()),
        Term::FromEmpty(x) => Expr::FromEmpty(x.clone()),
        Term::Proj1(a, b) => Expr::Typed(TypedOp::Proj1, a.clone(), b.clone()),
        Term::Proj2(a, b) => Expr::Typed(TypedOp::Proj2, a.clone(), b.clone()),
        Term::Inj1(a, b) => Expr::Typed(TypedOp::Inj1, a.clone(), b.clone()),
        Term::Inj2(a, b) => Expr::Typed(TypedOp::Inj2, a.clone(), b.clone()),
        Term::Pair(a, b) => bin(BinOp::Pair, a, b),
        Term::PropCase(a, b) => bin(BinOp::Copair, a, b),
        Term::SemiProd { left, right, pure_left } => {
            bin(if *pure_left { BinOp::LSemi } else { BinOp::RSemi }, left, right)
        }
        Term::SemiCoprod { left, right, pure_left } => {
            bin(if *pure_left { BinOp::LCosemi } else { BinOp::RCosemi }, left, right)
        }
        Term::CaseSum { on_value, on_empty } => bin(BinOp::Case, on_value, on_empty),
        Term::TupleProd { on_value, on_unit } => bin(BinOp::Tuple, on_value, on_unit),
        Term::Coerce(k) => Expr::Coerce(Box::new(term_expr(k))),
        Term::LocTuple { dom, components } => Expr::LocTuple(
            dom.clone(),
            components.iter().map(|(i, c)| (i.clone(), term_expr(c))).collect(),
        ),
        Term::ConstCotuple { cod, components } => Expr::Cotuple(
            cod.clone(),
            components.iter().map(|(i, c)| (i.clone(), term_expr(c))).collect(),
        ),
    }
}

pub fn equation_expr(e: &Equation) -> EqExpr {
    EqExpr {
        lhs: term_expr(&e.lhs),
        kind: e.kind,
        rhs: term_expr(&e.rhs),
    }
}

/// A declaration rebuilding `th`, using a built-in base when `th` extends one.
pub fn theory_decl(name: &str, th: &Theory, sizes: &[u32]) -> Decl {
    let ix: Vec<(String, u32)> = th.indices.iter().cloned().zip(sizes.iter().copied()).collect();
    let names: Vec<&str> = th.indices.iter().map(String::as_str).collect();
    let built = match th.flavor {
        Flavor::States => build_states_theory(&names).ok(),
        Flavor::Exceptions => build_exceptions_theory(&names).ok(),
        Flavor::Plain => None,
    };
    let (skip_g, skip_a) = match &built {
        Some(b)
            if th.generators.starts_with(&b.generators) && th.axioms.starts_with(&b.axioms) =>
        {
            (b.generators.len(), b.axioms.len())
        }
        _ => (0, 0),
    };
    let flavor = if skip_g == 0 && skip_a == 0 && built.as_ref().is_some_and(|b| !b.generators.is_empty()) {
        // Effect theories that do not extend the built-in one print as plain.
        Flavor::Plain
    } else {
        th.flavor
    };
    let mut items: Vec<TheoryItem> = th.generators[skip_g..]
        .iter()
        .map(|g| TheoryItem::Generator {
            name: g.name.clone(),
            dom: g.dom.clone(),
            cod: g.cod.clone(),
            dec: g.decoration,
            word: g.decoration.name(th.flavor).to_string(),
        })
        .collect();
    items.extend(th.axioms[skip_a..].iter().map(|a: &Axiom| TheoryItem::Axiom {
        label: a.label.clone(),
        eq: equation_expr(&a.equation),
    }));
    Decl::Theory {
        name: name.to_string(),
        base: TheoryBase::Builtin(flavor, ix),
        items,
    }
}
