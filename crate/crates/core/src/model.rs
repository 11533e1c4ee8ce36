//! Finite models: carriers, the two evaluators and exhaustive equation checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{check, Decoration, EqKind, Equation, Flavor, Role, Term, Theory, Type, TypeError};

type Inject = fn(Box<Elem>) -> Elem;

/// Default cap on the number of enumerated points.
pub const DEFAULT_BOUND: u64 = 10_000_000;

/// An element of a finite carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Elem {
    Unit,
    Atom(u32),
    Pair(Box<Elem>, Box<Elem>),
    Left(Box<Elem>),
    Right(Box<Elem>),
}

impl Elem {
    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Unit => f.write_str("()"),
            Elem::Atom(n) => write!(f, "{n}"),
            Elem::Pair(a, b) => write!(f, "({a}, {b})"),
            Elem::Left(a) => write!(f, "inl({a})"),
            Elem::Right(b) => write!(f, "inr({b})"),
        }
    }
}

/// A state: one value per location, in location order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State(pub Vec<u32>);

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// An exception `(i, a)`: constructor position and parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exc {
    pub ctor: usize,
    pub arg: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Value(Elem),
    Raised(Exc),
}

/// Full explicit behavior of an uninterpreted generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table {
    States(HashMap<(Elem, State), (Elem, State)>),
    Exceptions(HashMap<Outcome, Outcome>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ModelError {
    #[error("no carrier assigned to type {0}")]
    CarrierMissing(String),
    #[error("generator `{0}` has no interpretation")]
    Uninterpreted(String),
    #[error("search space of {points} points exceeds the bound {bound}")]
    SearchSpaceTooLarge { points: u64, bound: u64 },
    #[error("evaluation stuck: {0}")]
    Stuck(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Carriers for one effect flavor plus interpretations of user generators.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub flavor: Flavor,
    pub indices: Vec<String>,
    pub sizes: Vec<u32>,
    pub named: BTreeMap<String, u32>,
    pub tables: BTreeMap<String, Table>,
    pub bound: u64,
    roles: BTreeMap<String, Role>,
}

impl FiniteModel {
    /// Model of `theory` with one carrier size per index.
    pub fn new(theory: &Theory, sizes: &[u32]) -> FiniteModel {
        assert_eq!(
            theory.indices.len(),
            sizes.len(),
            "one carrier size per index"
        );
        FiniteModel {
            flavor: theory.flavor,
            indices: theory.indices.clone(),
            sizes: sizes.to_vec(),
            named: BTreeMap::new(),
            tables: BTreeMap::new(),
            bound: DEFAULT_BOUND,
            roles: theory
                .generators
                .iter()
                .map(|g| (g.name.clone(), g.role.clone()))
                .collect(),
        }
    }

    /// Refreshes generator roles after the theory gained generators.
    pub fn sync_roles(&mut self, theory: &Theory) {
        self.roles = theory
            .generators
            .iter()
            .map(|g| (g.name.clone(), g.role.clone()))
            .collect();
    }

    pub fn with_carrier(mut self, name: &str, size: u32) -> FiniteModel {
        self.named.insert(name.to_string(), size);
        self
    }

    pub fn interpret(&mut self, gen: &str, table: Table) {
        self.tables.insert(gen.to_string(), table);
    }

    fn position(&self, index: &str) -> Result<usize, ModelError> {
        self.indices
            .iter()
            .position(|i| i == index)
            .ok_or_else(|| ModelError::Stuck(format!("unknown index `{index}`")))
    }

    fn size_of(&self, index: &str) -> Result<u32, ModelError> {
        Ok(self.sizes[self.position(index)?])
    }

    pub fn carrier_size(&self, ty: &Type) -> Result<u64, ModelError> {
        Ok(match ty {
            Type::Unit => 1,
            Type::Empty => 0,
            Type::Named(n) => *self
                .named
                .get(n)
                .ok_or_else(|| ModelError::CarrierMissing(n.clone()))? as u64,
            Type::Value(i) | Type::Param(i) => self.size_of(i)? as u64,
            Type::Prod(a, b) => self.carrier_size(a)?.saturating_mul(self.carrier_size(b)?),
            Type::Coprod(a, b) => self.carrier_size(a)?.saturating_add(self.carrier_size(b)?),
        })
    }

    /// Elements of the carrier of `ty` in canonical order.
    pub fn carrier(&self, ty: &Type) -> Result<Vec<Elem>, ModelError> {
        Ok(match ty {
            Type::Unit => vec![Elem::Unit],
            Type::Empty => vec![],
            Type::Named(n) => {
                let k = *self
                    .named
                    .get(n)
                    .ok_or_else(|| ModelError::CarrierMissing(n.clone()))?;
                (0..k).map(Elem::Atom).collect()
            }
            Type::Value(i) | Type::Param(i) => (0..self.size_of(i)?).map(Elem::Atom).collect(),
            Type::Prod(a, b) => {
                let xs = self.carrier(a)?;
                let ys = self.carrier(b)?;
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in &xs {
                    for y in &ys {
                        out.push(Elem::pair(x.clone(), y.clone()));
                    }
                }
                out
            }
            Type::Coprod(a, b) => {
                let mut out: Vec<Elem> = self
                    .carrier(a)?
                    .into_iter()
                    .map(|x| Elem::Left(Box::new(x)))
                    .collect();
                out.extend(
                    self.carrier(b)?
                        .into_iter()
                        .map(|y| Elem::Right(Box::new(y))),
                );
                out
            }
        })
    }

    /// All states, lexicographic with the first location most significant.
    pub fn states(&self) -> Vec<State> {
        let mut out = vec![State(Vec::new())];
        for &k in &self.sizes {
            let mut next = Vec::with_capacity(out.len() * k as usize);
            for s in &out {
                for v in 0..k {
                    let mut t = s.0.clone();
                    t.push(v);
                    next.push(State(t));
                }
            }
            out = next;
        }
        out
    }

    /// All exceptions, ordered by constructor then parameter.
    pub fn exceptions(&self) -> Vec<Exc> {
        let mut out = Vec::new();
        for (ctor, &k) in self.sizes.iter().enumerate() {
            for arg in 0..k {
                out.push(Exc { ctor, arg });
            }
        }
        out
    }

    pub fn render_exc(&self, e: &Exc) -> String {
        format!("t_{}({})", self.indices[e.ctor], e.arg)
    }

    pub fn render_outcome(&self, o: &Outcome) -> String {
        match o {
            Outcome::Value(v) => v.to_string(),
            Outcome::Raised(e) => self.render_exc(e),
        }
    }

    fn role(&self, name: &str) -> Role {
        self.roles.get(name).cloned().unwrap_or(Role::User)
    }

    /// Number of points enumerated by a check of `eq` at the given kind.
    fn points(&self, dom: &Type, kind: EqKind) -> Result<u64, ModelError> {
        let base = self.carrier_size(dom)?;
        let n = match self.flavor {
            Flavor::Exceptions => match kind {
                EqKind::Strong => base + self.sizes.iter().map(|&k| k as u64).sum::<u64>(),
                EqKind::Weak => base,
            },
            _ => base.saturating_mul(self.sizes.iter().map(|&k| k as u64).product()),
        };
        if n > self.bound {
            return Err(ModelError::SearchSpaceTooLarge {
                points: n,
                bound: self.bound,
            });
        }
        Ok(n)
    }
}

fn stuck(what: &str, term: &Term) -> ModelError {
    ModelError::Stuck(format!("{what} in `{term}`"))
}

/// Runs `term` on `input` in `state` under the states semantics.
pub fn eval_states(
    model: &FiniteModel,
    term: &Term,
    input: &Elem,
    state: &State,
) -> Result<(Elem, State), ModelError> {
    let pure = |t: &Term, x: &Elem| -> Result<Elem, ModelError> {
        Ok(eval_states(model, t, x, state)?.0)
    };
    match term {
        Term::Gen { name, .. } => match model.role(name) {
            Role::Lookup(i) => {
                let p = model.position(&i)?;
                Ok((Elem::Atom(state.0[p]), state.clone()))
            }
            Role::Update(i) => {
                let p = model.position(&i)?;
                let Elem::Atom(a) = input else {
                    return Err(stuck("update of a non-atomic value", term));
                };
                let mut s = state.clone();
                s.0[p] = *a;
                Ok((Elem::Unit, s))
            }
            Role::User => match model.tables.get(name) {
                Some(Table::States(t)) => t
                    .get(&(input.clone(), state.clone()))
                    .cloned()
                    .ok_or_else(|| stuck("input outside the table", term)),
                _ => Err(ModelError::Uninterpreted(name.clone())),
            },
            _ => Err(stuck("generator without a states meaning", term)),
        },
        Term::Id(_) => Ok((input.clone(), state.clone())),
        Term::Comp(after, before) => {
            let (y, s) = eval_states(model, before, input, state)?;
            eval_states(model, after, &y, &s)
        }
        Term::ToUnit(_) => Ok((Elem::Unit, state.clone())),
        Term::FromEmpty(_) => Err(stuck("no element of the empty type", term)),
        Term::Proj1(..) | Term::Proj2(..) => match input {
            Elem::Pair(a, b) => {
                let v = if matches!(term, Term::Proj1(..)) { a } else { b };
                Ok(((**v).clone(), state.clone()))
            }
            _ => Err(stuck("projection of a non-pair", term)),
        },
        Term::Inj1(..) => Ok((Elem::Left(Box::new(input.clone())), state.clone())),
        Term::Inj2(..) => Ok((Elem::Right(Box::new(input.clone())), state.clone())),
        Term::Pair(f, g) => {
            // Components are accessors, so both read the same state.
            let a = eval_states(model, f, input, state)?.0;
            let b = eval_states(model, g, input, state)?.0;
            Ok((Elem::pair(a, b), state.clone()))
        }
        Term::PropCase(f, g) => match input {
            Elem::Left(a) => eval_states(model, f, a, state),
            Elem::Right(b) => eval_states(model, g, b, state),
            _ => Err(stuck("case on a non-sum", term)),
        },
        Term::SemiProd {
            left,
            right,
            pure_left,
        } => {
            let Elem::Pair(a, b) = input else {
                return Err(stuck("semi-pure product on a non-pair", term));
            };
            if *pure_left {
                let c = pure(left, a)?;
                let (d, s) = eval_states(model, right, b, state)?;
                Ok((Elem::pair(c, d), s))
            } else {
                let d = pure(right, b)?;
                let (c, s) = eval_states(model, left, a, state)?;
                Ok((Elem::pair(c, d), s))
            }
        }
        Term::TupleProd { on_value, on_unit } => {
            let v = eval_states(model, on_value, input, state)?.0;
            let (_, s) = eval_states(model, on_unit, input, state)?;
            Ok((v, s))
        }
        Term::Coerce(k) => Ok((eval_states(model, k, input, state)?.0, state.clone())),
        Term::LocTuple { components, .. } => {
            let mut s = state.clone();
            for (i, c) in components {
                let p = model.position(i)?;
                match eval_states(model, c, input, state)?.0 {
                    Elem::Atom(a) => s.0[p] = a,
                    _ => return Err(stuck("non-atomic location value", term)),
                }
            }
            Ok((Elem::Unit, s))
        }
        Term::SemiCoprod { .. } | Term::CaseSum { .. } | Term::ConstCotuple { .. } => {
            Err(stuck("exceptions construct under the states semantics", term))
        }
    }
}

/// Runs `term` on a value or an exception under the exceptions semantics.
pub fn eval_exceptions(
    model: &FiniteModel,
    term: &Term,
    input: &Outcome,
) -> Result<Outcome, ModelError> {
    use Outcome::*;
    // Constructs below level 2 let exceptions through untouched.
    let propagating = |f: &dyn Fn(&Elem) -> Result<Outcome, ModelError>| match input {
        Raised(e) => Ok(Raised(*e)),
        Value(x) => f(x),
    };
    let map_value = |o: Outcome, wrap: fn(Box<Elem>) -> Elem| match o {
        Value(v) => Value(wrap(Box::new(v))),
        r => r,
    };
    match term {
        Term::Gen { name, .. } => match model.role(name) {
            Role::Throw(i) => {
                let ctor = model.position(&i)?;
                propagating(&|x| match x {
                    Elem::Atom(a) => Ok(Raised(Exc { ctor, arg: *a })),
                    _ => Err(stuck("throw of a non-atomic parameter", term)),
                })
            }
            Role::Catch(i) => {
                let ctor = model.position(&i)?;
                match input {
                    Raised(e) if e.ctor == ctor => Ok(Value(Elem::Atom(e.arg))),
                    Raised(e) => Ok(Raised(*e)),
                    Value(_) => Err(stuck("no element of the empty type", term)),
                }
            }
            Role::CatchAll => match input {
                Raised(_) => Ok(Value(Elem::Unit)),
                Value(_) => Err(stuck("no element of the empty type", term)),
            },
            Role::User => match model.tables.get(name) {
                Some(Table::Exceptions(t)) => t
                    .get(input)
                    .cloned()
                    .ok_or_else(|| stuck("input outside the table", term)),
                _ => Err(ModelError::Uninterpreted(name.clone())),
            },
            _ => Err(stuck("generator without an exceptions meaning", term)),
        },
        Term::Id(_) => Ok(input.clone()),
        Term::Comp(after, before) => {
            let y = eval_exceptions(model, before, input)?;
            eval_exceptions(model, after, &y)
        }
        Term::ToUnit(_) => propagating(&|_| Ok(Value(Elem::Unit))),
        Term::FromEmpty(_) => propagating(&|_| Err(stuck("no element of the empty type", term))),
        Term::Proj1(..) | Term::Proj2(..) => propagating(&|x| match x {
            Elem::Pair(a, b) => Ok(Value(if matches!(term, Term::Proj1(..)) {
                (**a).clone()
            } else {
                (**b).clone()
            })),
            _ => Err(stuck("projection of a non-pair", term)),
        }),
        Term::Inj1(..) => propagating(&|x| Ok(Value(Elem::Left(Box::new(x.clone()))))),
        Term::Inj2(..) => propagating(&|x| Ok(Value(Elem::Right(Box::new(x.clone()))))),
        Term::Pair(f, g) => propagating(&|x| {
            let a = eval_exceptions(model, f, &Value(x.clone()))?;
            let b = eval_exceptions(model, g, &Value(x.clone()))?;
            match (a, b) {
                (Value(a), Value(b)) => Ok(Value(Elem::pair(a, b))),
                _ => Err(stuck("pair component raised", term)),
            }
        }),
        Term::PropCase(f, g) => propagating(&|x| match x {
            Elem::Left(a) => eval_exceptions(model, f, &Value((**a).clone())),
            Elem::Right(b) => eval_exceptions(model, g, &Value((**b).clone())),
            _ => Err(stuck("case on a non-sum", term)),
        }),
        Term::SemiCoprod {
            left,
            right,
            pure_left,
        } => {
            let (pure, other, pure_wrap, other_wrap): (_, _, Inject, Inject) =
                if *pure_left {
                    (left, right, Elem::Left, Elem::Right)
                } else {
                    (right, left, Elem::Right, Elem::Left)
                };
            match input {
                Value(Elem::Left(a)) if *pure_left => {
                    Ok(map_value(eval_exceptions(model, pure, &Value((**a).clone()))?, pure_wrap))
                }
                Value(Elem::Right(b)) if !*pure_left => {
                    Ok(map_value(eval_exceptions(model, pure, &Value((**b).clone()))?, pure_wrap))
                }
                Value(Elem::Left(a)) | Value(Elem::Right(a)) => Ok(map_value(
                    eval_exceptions(model, other, &Value((**a).clone()))?,
                    other_wrap,
                )),
                Raised(e) => Ok(map_value(eval_exceptions(model, other, &Raised(*e))?, other_wrap)),
                Value(_) => Err(stuck("semi-pure coproduct on a non-sum", term)),
            }
        }
        Term::CaseSum { on_value, on_empty } => match input {
            Value(_) => eval_exceptions(model, on_value, input),
            Raised(_) => eval_exceptions(model, on_empty, input),
        },
        Term::Coerce(k) => propagating(&|x| eval_exceptions(model, k, &Value(x.clone()))),
        Term::ConstCotuple { components, .. } => match input {
            Raised(e) => {
                let (_, f) = &components[e.ctor];
                eval_exceptions(model, f, &Value(Elem::Atom(e.arg)))
            }
            Value(_) => Err(stuck("no element of the empty type", term)),
        },
        Term::SemiProd { .. } | Term::TupleProd { .. } | Term::LocTuple { .. } => {
            Err(stuck("states construct under the exceptions semantics", term))
        }
    }
}

/// A point where the two sides of an equation disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    States {
        input: Elem,
        state: State,
        lhs: (Elem, State),
        rhs: (Elem, State),
    },
    Exceptions {
        input: String,
        lhs: String,
        rhs: String,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::States {
                input,
                state,
                lhs,
                rhs,
            } => write!(
                f,
                "(a={input}, s={state}): lhs gives ({}, {}), rhs gives ({}, {})",
                lhs.0, lhs.1, rhs.0, rhs.1
            ),
            Witness::Exceptions { input, lhs, rhs } => {
                write!(f, "(input={input}): lhs gives {lhs}, rhs gives {rhs}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds { points: u64 },
    Fails { witness: Witness },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// Decides `eq` by enumerating every input, and every state for states models.
pub fn check_equation(
    model: &FiniteModel,
    theory: &Theory,
    eq: &Equation,
) -> Result<Verdict, ModelError> {
    let l = check(theory, &eq.lhs)?;
    let r = check(theory, &eq.rhs)?;
    if l.dom != r.dom || l.cod != r.cod {
        return Err(ModelError::Type(TypeError::CompositionMismatch {
            expected: l.dom,
            found: r.dom,
        }));
    }
    let points = model.points(&l.dom, eq.kind)?;
    match model.flavor {
        Flavor::Exceptions => {
            let mut inputs: Vec<Outcome> = model
                .carrier(&l.dom)?
                .into_iter()
                .map(Outcome::Value)
                .collect();
            if eq.kind == EqKind::Strong {
                inputs.extend(model.exceptions().into_iter().map(Outcome::Raised));
            }
            for x in inputs {
                let a = eval_exceptions(model, &eq.lhs, &x)?;
                let b = eval_exceptions(model, &eq.rhs, &x)?;
                if a != b {
                    return Ok(Verdict::Fails {
                        witness: Witness::Exceptions {
                            input: model.render_outcome(&x),
                            lhs: model.render_outcome(&a),
                            rhs: model.render_outcome(&b),
                        },
                    });
                }
            }
        }
        _ => {
            let states = model.states();
            for x in model.carrier(&l.dom)? {
                for s in &states {
                    let a = eval_states(model, &eq.lhs, &x, s)?;
                    let b = eval_states(model, &eq.rhs, &x, s)?;
                    let differ = match eq.kind {
                        EqKind::Strong => a != b,
                        EqKind::Weak => a.0 != b.0,
                    };
                    if differ {
                        return Ok(Verdict::Fails {
                            witness: Witness::States {
                                input: x,
                                state: s.clone(),
                                lhs: a,
                                rhs: b,
                            },
                        });
                    }
                }
            }
        }
    }
    Ok(Verdict::Holds { points })
}

/// Whether every lookup agrees on the two states.
pub fn observational_equiv(model: &FiniteModel, theory: &Theory, s: &State, t: &State) -> bool {
    theory.lookup_cone().iter().all(|(_, l)| {
        let l = l.term();
        eval_states(model, &l, &Elem::Unit, s).map(|r| r.0)
            == eval_states(model, &l, &Elem::Unit, t).map(|r| r.0)
    })
}

/// Every table a generator of the given shape can have in `model`.
///
/// Tables respect the decoration: pure tables ignore the effect, level 1
/// tables never change the state or catch an exception.
pub fn all_tables(
    model: &FiniteModel,
    dom: &Type,
    cod: &Type,
    dec: Decoration,
) -> Result<Vec<Table>, ModelError> {
    let xs = model.carrier(dom)?;
    let ys = model.carrier(cod)?;
    match model.flavor {
        Flavor::Exceptions => {
            let excs: Vec<Outcome> = model.exceptions().into_iter().map(Outcome::Raised).collect();
            let values: Vec<Outcome> = ys.iter().cloned().map(Outcome::Value).collect();
            let (inputs, outputs): (Vec<Outcome>, Vec<Outcome>) = match dec {
                Decoration::Pure => (xs.iter().cloned().map(Outcome::Value).collect(), values),
                Decoration::Accessor => (
                    xs.iter().cloned().map(Outcome::Value).collect(),
                    values.into_iter().chain(excs.iter().cloned()).collect(),
                ),
                Decoration::Modifier => (
                    xs.iter()
                        .cloned()
                        .map(Outcome::Value)
                        .chain(excs.iter().cloned())
                        .collect(),
                    values.into_iter().chain(excs.iter().cloned()).collect(),
                ),
            };
            let mut out = Vec::new();
            for choice in functions(inputs.len(), outputs.len(), model.bound)? {
                let mut t: HashMap<Outcome, Outcome> = HashMap::new();
                for (x, &c) in inputs.iter().zip(&choice) {
                    t.insert(x.clone(), outputs[c].clone());
                }
                if dec != Decoration::Modifier {
                    for e in &excs {
                        t.insert(e.clone(), e.clone());
                    }
                }
                out.push(Table::Exceptions(t));
            }
            Ok(out)
        }
        _ => {
            let states = model.states();
            let mut out = Vec::new();
            match dec {
                Decoration::Pure => {
                    for choice in functions(xs.len(), ys.len(), model.bound)? {
                        let mut t = HashMap::new();
                        for (x, &c) in xs.iter().zip(&choice) {
                            for s in &states {
                                t.insert((x.clone(), s.clone()), (ys[c].clone(), s.clone()));
                            }
                        }
                        out.push(Table::States(t));
                    }
                }
                Decoration::Accessor => {
                    let n = xs.len() * states.len();
                    for choice in functions(n, ys.len(), model.bound)? {
                        let mut t = HashMap::new();
                        let mut k = 0;
                        for x in &xs {
                            for s in &states {
                                t.insert((x.clone(), s.clone()), (ys[choice[k]].clone(), s.clone()));
                                k += 1;
                            }
                        }
                        out.push(Table::States(t));
                    }
                }
                Decoration::Modifier => {
                    let n = xs.len() * states.len();
                    let m = ys.len() * states.len();
                    for choice in functions(n, m, model.bound)? {
                        let mut t = HashMap::new();
                        let mut k = 0;
                        for x in &xs {
                            for s in &states {
                                let c = choice[k];
                                let y = ys[c / states.len()].clone();
                                let s2 = states[c % states.len()].clone();
                                t.insert((x.clone(), s.clone()), (y, s2));
                                k += 1;
                            }
                        }
                        out.push(Table::States(t));
                    }
                }
            }
            Ok(out)
        }
    }
}

/// All maps from `n` inputs to `m` outputs, as output-index vectors.
fn functions(n: usize, m: usize, bound: u64) -> Result<Vec<Vec<usize>>, ModelError> {
    let count = (m as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if count > bound {
        return Err(ModelError::SearchSpaceTooLarge {
            points: count,
            bound,
        });
    }
    if n > 0 && m == 0 {
        return Ok(vec![]);
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < m {
                break;
            }
            cur[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_space_sizes() {
        assert_eq!(functions(2, 3, 100).unwrap().len(), 9);
        assert_eq!(functions(0, 3, 100).unwrap().len(), 1);
        assert_eq!(functions(2, 0, 100).unwrap().len(), 0);
        assert!(functions(10, 10, 1000).is_err());
    }

    #[test]
    fn state_order_is_lexicographic() {
        let th = crate::states::build_states_theory(&["x", "y"]).unwrap();
        let m = FiniteModel::new(&th, &[3, 2]);
        let st: Vec<String> = m.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(st, ["(0,0)", "(0,1)", "(1,0)", "(1,1)", "(2,0)", "(2,1)"]);
    }
}
