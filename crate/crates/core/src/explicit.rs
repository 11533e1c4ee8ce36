//! Explicit expansion: decorated terms as plain terms over an explicit
//! state type `St` or exception type `Exc`, and an evaluator for them.
//!
//! A states term at level 0 becomes `X → Y`, at level 1 `X × St → Y` and at
//! level 2 `X × St → Y × St`, with `1 × St` written `St`. Exceptions use
//! `X → Y`, `X → Y + Exc` and `X + Exc → Y + Exc`, with `0 + Exc` written
//! `Exc`. Generator `g` expands to `~g`; `~st` builds a state from one value
//! per location and `~ex` splits an exception by constructor.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::model::{Elem, Exc, FiniteModel, ModelError, Outcome, State, Table};
use crate::syntax::{
    check, normalize_assoc, Decoration, EqKind, Equation, Flavor, Generator, Role, Term, Theory, Type,
};
use crate::translate::{dualize_theory, dualize_type, DualityMap};

pub const STATE: &str = "St";
pub const EXC: &str = "Exc";
pub const MAKE_STATE: &str = "~st";
pub const SPLIT_EXC: &str = "~ex";

fn state_ty() -> Type {
    Type::named(STATE)
}

/// `X × St`, or `St` when `X` is 1.
pub fn with_state(x: &Type) -> Type {
    match x {
        Type::Unit => state_ty(),
        _ => Type::prod(x.clone(), state_ty()),
    }
}

/// `X + Exc`, or `Exc` when `X` is 0.
pub fn with_exc(x: &Type) -> Type {
    match x {
        Type::Empty => Type::named(EXC),
        _ => Type::coprod(x.clone(), Type::named(EXC)),
    }
}

/// Explicit type of a term at a level, in the states reading.
fn shape(dom: &Type, cod: &Type, d: Decoration) -> (Type, Type) {
    match d {
        Decoration::Pure => (dom.clone(), cod.clone()),
        Decoration::Accessor => (with_state(dom), cod.clone()),
        Decoration::Modifier => (with_state(dom), with_state(cod)),
    }
}

fn xname(name: &str) -> String {
    format!("~{name}")
}

/// Domain of an explicit term.
pub fn xdom(t: &Term) -> Type {
    match t {
        Term::Gen { dom, .. } => dom.clone(),
        Term::Id(x) | Term::ToUnit(x) => x.clone(),
        Term::Comp(_, b) => xdom(b),
        Term::FromEmpty(_) => Type::Empty,
        Term::Proj1(a, b) | Term::Proj2(a, b) => Type::prod(a.clone(), b.clone()),
        Term::Inj1(a, _) => a.clone(),
        Term::Inj2(_, b) => b.clone(),
        Term::Pair(f, _) => xdom(f),
        Term::PropCase(f, g) => Type::coprod(xdom(f), xdom(g)),
        _ => unreachable!("not an explicit term: {t}"),
    }
}

/// Codomain of an explicit term.
pub fn xcod(t: &Term) -> Type {
    match t {
        Term::Gen { cod, .. } => cod.clone(),
        Term::Id(x) | Term::FromEmpty(x) => x.clone(),
        Term::Comp(a, _) => xcod(a),
        Term::ToUnit(_) => Type::Unit,
        Term::Proj1(a, _) => a.clone(),
        Term::Proj2(_, b) => b.clone(),
        Term::Inj1(a, b) | Term::Inj2(a, b) => Type::coprod(a.clone(), b.clone()),
        Term::Pair(f, g) => Type::prod(xcod(f), xcod(g)),
        Term::PropCase(f, _) => xcod(f),
        _ => unreachable!("not an explicit term: {t}"),
    }
}

/// Rewrites projections of pairs, injections into copairs, surjective
/// pairing and the terminal/initial collapses until nothing changes.
pub fn simplify(t: &Term) -> Term {
    let mut cur = normalize_assoc(t);
    loop {
        let next = normalize_assoc(&step(&cur));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn step(t: &Term) -> Term {
    let t = t.map_children(&mut |c| step(c));
    match &t {
        Term::Pair(f, g) => {
            if let (Term::Proj1(a, b), Term::Proj2(c, d)) = (&**f, &**g) {
                if a == c && b == d {
                    return Term::Id(Type::prod(a.clone(), b.clone()));
                }
            }
            t
        }
        Term::PropCase(f, g) => {
            if let (Term::Inj1(a, b), Term::Inj2(c, d)) = (&**f, &**g) {
                if a == c && b == d {
                    return Term::Id(Type::coprod(a.clone(), b.clone()));
                }
            }
            t
        }
        Term::Comp(..) => {
            let fs: Vec<Term> = t.spine().into_iter().cloned().collect();
            for k in 0..fs.len() - 1 {
                let replaced = match (&fs[k], &fs[k + 1]) {
                    (Term::Proj1(..), Term::Pair(f, _)) => Some((**f).clone()),
                    (Term::Proj2(..), Term::Pair(_, g)) => Some((**g).clone()),
                    (Term::PropCase(f, _), Term::Inj1(..)) => Some((**f).clone()),
                    (Term::PropCase(_, g), Term::Inj2(..)) => Some((**g).clone()),
                    (Term::ToUnit(_), _) => {
                        let rest = Term::seq(fs[k + 1..].to_vec());
                        let mut out = fs[..k].to_vec();
                        out.push(Term::ToUnit(xdom(&rest)));
                        return Term::seq(out);
                    }
                    (_, Term::FromEmpty(_)) => {
                        let head = Term::seq(fs[..=k].to_vec());
                        let mut out = vec![Term::FromEmpty(xcod(&head))];
                        out.extend_from_slice(&fs[k + 2..]);
                        return Term::seq(out);
                    }
                    _ => None,
                };
                if let Some(r) = replaced {
                    let mut out = fs[..k].to_vec();
                    out.push(r);
                    out.extend_from_slice(&fs[k + 2..]);
                    return Term::seq(out);
                }
            }
            t
        }
        _ => t,
    }
}

/// States-side expansion; exceptions go through the dual theory.
struct Expander<'a> {
    th: &'a Theory,
}

impl Expander<'_> {
    /// Value part `X × St → X`.
    fn val(x: &Type) -> Term {
        match x {
            Type::Unit => Term::ToUnit(state_ty()),
            _ => Term::Proj1(x.clone(), state_ty()),
        }
    }

    /// State part `X × St → St`.
    fn st(x: &Type) -> Term {
        match x {
            Type::Unit => Term::Id(state_ty()),
            _ => Term::Proj2(x.clone(), state_ty()),
        }
    }

    /// `⟨v, s⟩ : W → Y × St`, or just `s` when `Y` is 1.
    fn mk(y: &Type, v: Term, s: Term) -> Term {
        match y {
            Type::Unit => s,
            _ => Term::pair(v, s),
        }
    }

    /// Expansion of `t` at its own level.
    fn go(&self, t: &Term) -> Result<(Decoration, Term), Error> {
        let s = check(self.th, t)?;
        let d = s.dec;
        let x = match t {
            Term::Gen { name, dom, cod, dec } => {
                let (a, b) = shape(dom, cod, *dec);
                Term::gen(&xname(name), a, b, Decoration::Modifier)
            }
            Term::Id(_)
            | Term::ToUnit(_)
            | Term::FromEmpty(_)
            | Term::Proj1(..)
            | Term::Proj2(..)
            | Term::Inj1(..)
            | Term::Inj2(..) => t.clone(),
            Term::Comp(g, f) => Term::comp(self.at(g, d)?, self.before(f, d)?),
            Term::Pair(f, g) => Term::pair(self.at(f, d)?, self.at(g, d)?),
            Term::PropCase(f, g) => {
                if d != Decoration::Pure {
                    return Err(Error::Flavor("effectful copair under the states reading".into()));
                }
                Term::prop_case(self.at(f, d)?, self.at(g, d)?)
            }
            Term::SemiProd { left, right, pure_left } => {
                let (sl, sr) = (check(self.th, left)?, check(self.th, right)?);
                let ab = Type::prod(sl.dom.clone(), sr.dom.clone());
                let cd = Type::prod(sl.cod.clone(), sr.cod.clone());
                let v = Self::val(&ab);
                let (p1, p2) = (Term::Proj1(sl.dom.clone(), sr.dom.clone()), Term::Proj2(sl.dom.clone(), sr.dom.clone()));
                let (pure, other, p_in, o_in, o) = if *pure_left {
                    (left, right, p1, p2, sr)
                } else {
                    (right, left, p2, p1, sl)
                };
                let into = Self::mk(&o.dom, Term::comp(o_in, v.clone()), Self::st(&ab));
                let r = Term::comp(self.at(other, Decoration::Modifier)?, into);
                let pv = Term::seq(vec![self.at(pure, Decoration::Pure)?, p_in, v]);
                let ov = Term::comp(Self::val(&o.cod), r.clone());
                let pair = if *pure_left { Term::pair(pv, ov) } else { Term::pair(ov, pv) };
                Self::mk(&cd, pair, Term::comp(Self::st(&o.cod), r))
            }
            Term::TupleProd { on_value, on_unit } => {
                let g = self.at(on_value, Decoration::Accessor)?;
                let k = self.at(on_unit, Decoration::Modifier)?;
                self.lower(Self::mk(&s.cod, g, k), &s.cod, d)
            }
            Term::Coerce(k) => {
                Term::comp(Self::val(&s.cod), self.at(k, Decoration::Modifier)?)
            }
            Term::LocTuple { dom, components } => {
                let mut vals = Vec::new();
                for (_, f) in components {
                    vals.push(self.at(f, Decoration::Accessor)?);
                }
                let arg = nest_pair(vals, &with_state(dom));
                let vs = self.values_type();
                Term::comp(Term::gen(MAKE_STATE, vs, state_ty(), Decoration::Modifier), arg)
            }
            Term::SemiCoprod { .. } | Term::CaseSum { .. } | Term::ConstCotuple { .. } => {
                return Err(Error::Flavor(format!("`{t}` has no states expansion")))
            }
        };
        Ok((d, x))
    }

    /// Right-nested product of the value types, 1 with no locations.
    fn values_type(&self) -> Type {
        let mut tys: Vec<Type> = self.th.lookup_cone().iter().map(|(_, g)| g.cod.clone()).collect();
        let mut acc = match tys.pop() {
            Some(t) => t,
            None => return Type::Unit,
        };
        while let Some(t) = tys.pop() {
            acc = Type::prod(t, acc);
        }
        acc
    }

    /// A modifier-shaped construct read at a lower level.
    fn lower(&self, m: Term, cod: &Type, d: Decoration) -> Term {
        match d {
            Decoration::Modifier => m,
            _ => Term::comp(Self::val(cod), m),
        }
    }

    /// The form of `t` lifted to level `to`.
    fn at(&self, t: &Term, to: Decoration) -> Result<Term, Error> {
        let (d, x) = self.go(t)?;
        let s = check(self.th, t)?;
        Ok(match (d, to) {
            (a, b) if a == b => x,
            (Decoration::Pure, Decoration::Accessor) => Term::comp(x, Self::val(&s.dom)),
            (Decoration::Pure, Decoration::Modifier) => {
                Self::mk(&s.cod, Term::comp(x, Self::val(&s.dom)), Self::st(&s.dom))
            }
            (Decoration::Accessor, Decoration::Modifier) => Self::mk(&s.cod, x, Self::st(&s.dom)),
            _ => unreachable!("terms are only lifted upwards"),
        })
    }

    /// The first factor of a composite at level `d`: accessors read a
    /// modifier form, everything else shares the level.
    fn before(&self, f: &Term, d: Decoration) -> Result<Term, Error> {
        match d {
            Decoration::Accessor => self.at(f, Decoration::Modifier),
            _ => self.at(f, d),
        }
    }
}

fn nest_pair(mut ts: Vec<Term>, dom: &Type) -> Term {
    let mut acc = match ts.pop() {
        Some(t) => t,
        None => return Term::ToUnit(dom.clone()),
    };
    while let Some(t) = ts.pop() {
        acc = Term::pair(t, acc);
    }
    acc
}

fn require(theory: &Theory, flavor: Flavor) -> Result<(), Error> {
    if theory.flavor == flavor {
        Ok(())
    } else {
        Err(Error::Flavor(format!(
            "{flavor} expansion of a {} theory",
            theory.flavor
        )))
    }
}

/// An explicit term with the level it was read at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explicit {
    pub level: Decoration,
    pub term: Term,
}

fn states_term(theory: &Theory, t: &Term) -> Result<Explicit, Error> {
    let (level, x) = Expander { th: theory }.go(t)?;
    Ok(Explicit { level, term: simplify(&x) })
}

fn states_term_at(theory: &Theory, t: &Term, to: Decoration) -> Result<Term, Error> {
    Ok(simplify(&Expander { th: theory }.at(t, to)?))
}

fn states_equation(theory: &Theory, e: &Equation) -> Result<Equation, Error> {
    let l = check(theory, &e.lhs)?;
    let r = check(theory, &e.rhs)?;
    let top = l.dec.max(r.dec);
    let (lhs, rhs) = match e.kind {
        EqKind::Strong => (states_term_at(theory, &e.lhs, top)?, states_term_at(theory, &e.rhs, top)?),
        EqKind::Weak if top <= Decoration::Accessor => (
            states_term_at(theory, &e.lhs, Decoration::Accessor)?,
            states_term_at(theory, &e.rhs, Decoration::Accessor)?,
        ),
        EqKind::Weak => {
            let v = Expander::val(&l.cod);
            let m = |t: &Term| states_term_at(theory, t, Decoration::Modifier);
            (simplify(&Term::comp(v.clone(), m(&e.lhs)?)), simplify(&Term::comp(v, m(&e.rhs)?)))
        }
    };
    Ok(Equation::strong(lhs, rhs))
}

/// Generators of the explicit theory of a states theory.
fn states_generators(theory: &Theory) -> Vec<Generator> {
    let mut out: Vec<Generator> = theory
        .generators
        .iter()
        .map(|g| {
            let (dom, cod) = shape(&g.dom, &g.cod, g.decoration);
            Generator {
                name: xname(&g.name),
                dom,
                cod,
                decoration: Decoration::Modifier,
                role: Role::User,
            }
        })
        .collect();
    out.push(Generator {
        name: MAKE_STATE.into(),
        dom: Expander { th: theory }.values_type(),
        cod: state_ty(),
        decoration: Decoration::Modifier,
        role: Role::User,
    });
    out
}

/// Expansion of a states term at its own level.
pub fn expand_states_term(theory: &Theory, t: &Term) -> Result<Explicit, Error> {
    require(theory, Flavor::States)?;
    states_term(theory, t)
}

/// The modifier form `X × St → Y × St` of any states term.
pub fn expand_states_full(theory: &Theory, t: &Term) -> Result<Term, Error> {
    require(theory, Flavor::States)?;
    states_term_at(theory, t, Decoration::Modifier)
}

/// A strong explicit equation: weak ones compare value parts only.
pub fn expand_states_equation(theory: &Theory, e: &Equation) -> Result<Equation, Error> {
    require(theory, Flavor::States)?;
    states_equation(theory, e)
}

/// The explicit plain theory with `St`, the expanded generators and axioms.
pub fn expand_states_theory(theory: &Theory) -> Result<Theory, Error> {
    require(theory, Flavor::States)?;
    let mut out = Theory::plain();
    out.indices = theory.indices.clone();
    out.generators = states_generators(theory);
    for a in &theory.axioms {
        out.axioms.push(crate::syntax::Axiom {
            label: a.label.clone(),
            equation: states_equation(theory, &a.equation)?,
        });
    }
    Ok(out)
}

/// Dual of explicit syntax; `names` maps generator names across.
struct XDual {
    names: BTreeMap<String, String>,
}

impl XDual {
    /// Built from the map of the states theory whose expansion is dualized.
    fn new(states: &Theory) -> Result<XDual, Error> {
        let map = DualityMap::for_theory(states)?;
        let mut names: BTreeMap<String, String> =
            map.generators.iter().map(|(a, b)| (xname(a), xname(b))).collect();
        names.insert(MAKE_STATE.into(), SPLIT_EXC.into());
        Ok(XDual { names })
    }

    fn ty(t: &Type) -> Type {
        match t {
            Type::Named(n) if n == STATE => Type::named(EXC),
            Type::Named(n) if n == EXC => Type::named(STATE),
            Type::Prod(a, b) => Type::coprod(Self::ty(a), Self::ty(b)),
            Type::Coprod(a, b) => Type::prod(Self::ty(a), Self::ty(b)),
            _ => dualize_type(t),
        }
    }

    fn term(&self, t: &Term) -> Term {
        let ty = Self::ty;
        match t {
            Term::Gen { name, dom, cod, dec } => {
                Term::gen(self.names.get(name).unwrap_or(name), ty(cod), ty(dom), *dec)
            }
            Term::Id(x) => Term::Id(ty(x)),
            Term::Comp(g, f) => Term::comp(self.term(f), self.term(g)),
            Term::ToUnit(x) => Term::FromEmpty(ty(x)),
            Term::FromEmpty(x) => Term::ToUnit(ty(x)),
            Term::Proj1(a, b) => Term::Inj1(ty(a), ty(b)),
            Term::Proj2(a, b) => Term::Inj2(ty(a), ty(b)),
            Term::Inj1(a, b) => Term::Proj1(ty(a), ty(b)),
            Term::Inj2(a, b) => Term::Proj2(ty(a), ty(b)),
            Term::Pair(f, g) => Term::prop_case(self.term(f), self.term(g)),
            Term::PropCase(f, g) => Term::pair(self.term(f), self.term(g)),
            _ => unreachable!("not an explicit term: {t}"),
        }
    }

    fn generator(&self, g: &Generator) -> Generator {
        Generator {
            name: self.names.get(&g.name).cloned().unwrap_or_else(|| g.name.clone()),
            dom: Self::ty(&g.cod),
            cod: Self::ty(&g.dom),
            decoration: g.decoration,
            role: g.role.clone(),
        }
    }
}

fn through_dual<T>(theory: &Theory, f: impl FnOnce(&Theory, &XDual, &DualityMap) -> Result<T, Error>) -> Result<T, Error> {
    require(theory, Flavor::Exceptions)?;
    let dth = dualize_theory(theory)?;
    let to_states = DualityMap::for_theory(theory)?;
    f(&dth, &XDual::new(&dth)?, &to_states)
}

/// Expansion of an exceptions term at its own level.
pub fn expand_exceptions_term(theory: &Theory, t: &Term) -> Result<Explicit, Error> {
    through_dual(theory, |dth, xd, map| {
        let e = states_term(dth, &map.term(t))?;
        Ok(Explicit {
            level: e.level,
            term: simplify(&xd.term(&e.term)),
        })
    })
}

/// The catcher form `X + Exc → Y + Exc` of any exceptions term.
pub fn expand_exceptions_full(theory: &Theory, t: &Term) -> Result<Term, Error> {
    through_dual(theory, |dth, xd, map| {
        let x = states_term_at(dth, &map.term(t), Decoration::Modifier)?;
        Ok(simplify(&xd.term(&x)))
    })
}

/// A strong explicit equation: weak ones compare non-exceptional inputs only.
pub fn expand_exceptions_equation(theory: &Theory, e: &Equation) -> Result<Equation, Error> {
    through_dual(theory, |dth, xd, map| {
        let s = states_equation(dth, &map.equation(e))?;
        Ok(Equation::strong(simplify(&xd.term(&s.lhs)), simplify(&xd.term(&s.rhs))))
    })
}

/// The explicit plain theory with `Exc`, the expanded generators and axioms.
pub fn expand_exceptions_theory(theory: &Theory) -> Result<Theory, Error> {
    through_dual(theory, |dth, xd, _| {
        let st = expand_states_theory(dth)?;
        let mut out = Theory::plain();
        out.indices = theory.indices.clone();
        out.generators = st.generators.iter().map(|g| xd.generator(g)).collect();
        for (a, orig) in st.axioms.iter().zip(&theory.axioms) {
            out.axioms.push(crate::syntax::Axiom {
                label: orig.label.clone(),
                equation: Equation::strong(simplify(&xd.term(&a.equation.lhs)), simplify(&xd.term(&a.equation.rhs))),
            });
        }
        Ok(out)
    })
}

/// Decides `eq` on the expansion: the explicit sides must agree everywhere.
pub fn holds_explicitly(model: &FiniteModel, theory: &Theory, eq: &Equation) -> Result<bool, Error> {
    let (x, xt, model) = match theory.flavor {
        Flavor::States => (
            expand_states_equation(theory, eq)?,
            expand_states_theory(theory)?,
            model.clone().with_carrier(STATE, model.states().len() as u32),
        ),
        Flavor::Exceptions => (
            expand_exceptions_equation(theory, eq)?,
            expand_exceptions_theory(theory)?,
            model.clone().with_carrier(EXC, model.exceptions().len() as u32),
        ),
        Flavor::Plain => return Err(Error::Flavor("plain theories have no explicit expansion".into())),
    };
    let dom = check(&xt, &x.lhs)?.dom;
    for input in model.carrier(&dom)? {
        if eval_explicit(&model, theory, &x.lhs, &input)? != eval_explicit(&model, theory, &x.rhs, &input)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Position of a state in [`FiniteModel::states`].
pub fn state_index(model: &FiniteModel, s: &State) -> u32 {
    s.0.iter().zip(&model.sizes).fold(0, |acc, (v, k)| acc * k + v)
}

/// Position of an exception in [`FiniteModel::exceptions`].
pub fn exc_index(model: &FiniteModel, e: &Exc) -> u32 {
    model.sizes[..e.ctor].iter().sum::<u32>() + e.arg
}

/// Explicit input for a decorated states input at `X`.
pub fn encode_state(model: &FiniteModel, x: &Type, a: &Elem, s: &State) -> Elem {
    let s = Elem::Atom(state_index(model, s));
    match x {
        Type::Unit => s,
        _ => Elem::pair(a.clone(), s),
    }
}

/// Decorated result of an explicit modifier output at `Y`.
pub fn decode_state(model: &FiniteModel, y: &Type, out: &Elem) -> Result<(Elem, State), ModelError> {
    let states = model.states();
    let get = |e: &Elem| match e {
        Elem::Atom(k) => states
            .get(*k as usize)
            .cloned()
            .ok_or_else(|| ModelError::Stuck(format!("no state number {k}"))),
        _ => Err(ModelError::Stuck(format!("`{e}` is not a state"))),
    };
    match (y, out) {
        (Type::Unit, s) => Ok((Elem::Unit, get(s)?)),
        (_, Elem::Pair(v, s)) => Ok(((**v).clone(), get(s)?)),
        _ => Err(ModelError::Stuck(format!("`{out}` is not a value and a state"))),
    }
}

/// Explicit input for a decorated exceptions input at `X`.
pub fn encode_exc(model: &FiniteModel, x: &Type, o: &Outcome) -> Elem {
    match (x, o) {
        (Type::Empty, Outcome::Raised(e)) => Elem::Atom(exc_index(model, e)),
        (_, Outcome::Raised(e)) => Elem::Right(Box::new(Elem::Atom(exc_index(model, e)))),
        (Type::Empty, Outcome::Value(v)) => v.clone(),
        (_, Outcome::Value(v)) => Elem::Left(Box::new(v.clone())),
    }
}

/// Decorated outcome of an explicit catcher output at `Y`.
pub fn decode_exc(model: &FiniteModel, y: &Type, out: &Elem) -> Result<Outcome, ModelError> {
    let excs = model.exceptions();
    let get = |e: &Elem| match e {
        Elem::Atom(k) => excs
            .get(*k as usize)
            .map(|e| Outcome::Raised(*e))
            .ok_or_else(|| ModelError::Stuck(format!("no exception number {k}"))),
        _ => Err(ModelError::Stuck(format!("`{e}` is not an exception"))),
    };
    match (y, out) {
        (Type::Empty, e) => get(e),
        (_, Elem::Left(v)) => Ok(Outcome::Value((**v).clone())),
        (_, Elem::Right(e)) => get(e),
        _ => Err(ModelError::Stuck(format!("`{out}` is not a value or an exception"))),
    }
}

/// Evaluates an explicit term of the expansion of `theory` in `model`.
pub fn eval_explicit(model: &FiniteModel, theory: &Theory, t: &Term, x: &Elem) -> Result<Elem, ModelError> {
    let stuck = |what: &str| ModelError::Stuck(format!("{what} in `{t}`"));
    match t {
        Term::Gen { name, .. } => eval_prim(model, theory, name, x),
        Term::Id(_) => Ok(x.clone()),
        Term::Comp(g, f) => {
            let y = eval_explicit(model, theory, f, x)?;
            eval_explicit(model, theory, g, &y)
        }
        Term::ToUnit(_) => Ok(Elem::Unit),
        Term::FromEmpty(_) => Err(stuck("no element of the empty type")),
        Term::Proj1(..) | Term::Proj2(..) => match x {
            Elem::Pair(a, b) => Ok(if matches!(t, Term::Proj1(..)) { (**a).clone() } else { (**b).clone() }),
            _ => Err(stuck("projection of a non-pair")),
        },
        Term::Inj1(..) => Ok(Elem::Left(Box::new(x.clone()))),
        Term::Inj2(..) => Ok(Elem::Right(Box::new(x.clone()))),
        Term::Pair(f, g) => Ok(Elem::pair(
            eval_explicit(model, theory, f, x)?,
            eval_explicit(model, theory, g, x)?,
        )),
        Term::PropCase(f, g) => match x {
            Elem::Left(a) => eval_explicit(model, theory, f, a),
            Elem::Right(b) => eval_explicit(model, theory, g, b),
            _ => Err(stuck("case on a non-sum")),
        },
        _ => Err(stuck("not an explicit term")),
    }
}

fn atom(e: &Elem) -> Result<u32, ModelError> {
    match e {
        Elem::Atom(k) => Ok(*k),
        _ => Err(ModelError::Stuck(format!("`{e}` is not atomic"))),
    }
}

fn eval_prim(model: &FiniteModel, theory: &Theory, name: &str, x: &Elem) -> Result<Elem, ModelError> {
    let states = model.states();
    let excs = model.exceptions();
    let pos = |i: &str| {
        model
            .indices
            .iter()
            .position(|k| k == i)
            .ok_or_else(|| ModelError::Stuck(format!("unknown index `{i}`")))
    };
    let state_of = |e: &Elem| -> Result<State, ModelError> { Ok(states[atom(e)? as usize].clone()) };
    if name == MAKE_STATE {
        let mut vals = Vec::new();
        let mut cur = x.clone();
        for k in 0..model.sizes.len() {
            if k + 1 == model.sizes.len() {
                vals.push(atom(&cur)?);
            } else if let Elem::Pair(a, b) = cur {
                vals.push(atom(&a)?);
                cur = *b;
            }
        }
        return Ok(Elem::Atom(state_index(model, &State(vals))));
    }
    if name == SPLIT_EXC {
        let e = excs[atom(x)? as usize];
        let mut out = Elem::Atom(e.arg);
        if e.ctor + 1 < model.sizes.len() {
            out = Elem::Left(Box::new(out));
        }
        for _ in 0..e.ctor {
            out = Elem::Right(Box::new(out));
        }
        return Ok(out);
    }
    let gname = name.strip_prefix('~').unwrap_or(name);
    let g = theory
        .generator(gname)
        .ok_or_else(|| ModelError::Uninterpreted(name.to_string()))?;
    match &g.role {
        Role::Lookup(i) => Ok(Elem::Atom(state_of(x)?.0[pos(i)?])),
        Role::Update(i) => {
            let (v, s) = match x {
                Elem::Pair(v, s) => (atom(v)?, state_of(s)?),
                _ => return Err(ModelError::Stuck("update of a non-pair".into())),
            };
            let mut s = s;
            s.0[pos(i)?] = v;
            Ok(Elem::Atom(state_index(model, &s)))
        }
        Role::Throw(i) => {
            let ctor = pos(i)?;
            Ok(Elem::Atom(exc_index(model, &Exc { ctor, arg: atom(x)? })))
        }
        Role::Catch(i) => {
            let e = excs[atom(x)? as usize];
            Ok(if e.ctor == pos(i)? {
                Elem::Left(Box::new(Elem::Atom(e.arg)))
            } else {
                Elem::Right(Box::new(x.clone()))
            })
        }
        Role::CatchAll => Ok(Elem::Left(Box::new(Elem::Unit))),
        Role::UpdateAll => Err(ModelError::Stuck("no explicit meaning for u_all".into())),
        Role::User => match model.tables.get(gname) {
            Some(Table::States(tab)) => {
                let (a, s) = match (g.decoration, &g.dom) {
                    (Decoration::Pure, _) => (x.clone(), states[0].clone()),
                    (_, Type::Unit) => (Elem::Unit, state_of(x)?),
                    (_, _) => match x {
                        Elem::Pair(a, s) => ((**a).clone(), state_of(s)?),
                        _ => return Err(ModelError::Stuck("accessor input is not a pair".into())),
                    },
                };
                let (b, s2) = tab
                    .get(&(a, s))
                    .cloned()
                    .ok_or_else(|| ModelError::Stuck(format!("`{gname}` input outside the table")))?;
                Ok(match g.decoration {
                    Decoration::Modifier => encode_state(model, &g.cod, &b, &s2),
                    _ => b,
                })
            }
            Some(Table::Exceptions(tab)) => {
                let input = match g.decoration {
                    Decoration::Modifier => decode_exc(model, &g.dom, x)?,
                    _ => Outcome::Value(x.clone()),
                };
                let out = tab
                    .get(&input)
                    .cloned()
                    .ok_or_else(|| ModelError::Stuck(format!("`{gname}` input outside the table")))?;
                match (g.decoration, out) {
                    (Decoration::Pure, Outcome::Value(v)) => Ok(v),
                    (Decoration::Pure, Outcome::Raised(_)) => {
                        Err(ModelError::Stuck(format!("pure `{gname}` raised")))
                    }
                    (_, o) => Ok(encode_exc(model, &g.cod, &o)),
                }
            }
            _ => Err(ModelError::Uninterpreted(gname.to_string())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exceptions::{build_exceptions_theory, raise_term};
    use crate::states::build_states_theory;

    #[test]
    fn update_and_lookup_shapes() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let u = expand_states_term(&th, &th.update("x").unwrap()).unwrap();
        assert_eq!(u.term.to_string(), "~u_x");
        assert_eq!((xdom(&u.term), xcod(&u.term)), (Type::prod(Type::value("x"), state_ty()), state_ty()));
        let l = expand_states_term(&th, &th.lookup("x").unwrap()).unwrap();
        assert_eq!((xdom(&l.term), xcod(&l.term)), (state_ty(), Type::value("x")));
    }

    #[test]
    fn weak_axiom_compares_values() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let e = expand_states_equation(&th, &th.axioms[0].equation).unwrap();
        assert_eq!(e.to_string(), "~l_x . ~u_x == pi1[V_x, St]");
    }

    #[test]
    fn raise_and_key_catch() {
        let th = build_exceptions_theory(&["i", "j"]).unwrap();
        let r = raise_term(&th, "i", &Type::named("Y")).unwrap();
        assert_eq!(expand_exceptions_term(&th, &r).unwrap().term.to_string(), "in2[Y, Exc] . ~t_i");
        let c = expand_exceptions_term(&th, &th.catch("i").unwrap()).unwrap();
        assert_eq!((xdom(&c.term), xcod(&c.term)), (Type::named(EXC), with_exc(&Type::param("i"))));
        let b1 = expand_exceptions_equation(&th, &th.axioms[0].equation).unwrap();
        assert_eq!(b1.to_string(), "~c_i . ~t_i == in1[P_i, Exc]");
    }

    #[test]
    fn flavors_are_checked() {
        let th = build_states_theory(&["x"]).unwrap();
        assert!(expand_exceptions_theory(&th).is_err());
        let ex = build_exceptions_theory(&["i"]).unwrap();
        assert!(expand_states_theory(&ex).is_err());
        assert_eq!(expand_exceptions_theory(&ex).unwrap().axioms.len(), 1);
    }

    #[test]
    fn indices_round_trip() {
        let th = build_states_theory(&["x", "y"]).unwrap();
        let m = FiniteModel::new(&th, &[3, 2]);
        for (k, s) in m.states().iter().enumerate() {
            assert_eq!(state_index(&m, s), k as u32);
        }
        for (k, e) in m.exceptions().iter().enumerate() {
            assert_eq!(exc_index(&m, e), k as u32);
        }
    }
}
