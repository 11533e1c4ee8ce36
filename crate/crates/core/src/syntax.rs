//! Types, decorated terms, equations and theories.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Decoration level of a term.
///
/// Level 1 reads "accessor" for states and "propagator" for exceptions;
/// level 2 reads "modifier" and "catcher" respectively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Decoration {
    Pure,
    Accessor,
    Modifier,
}

impl Decoration {
    pub fn level(self) -> u8 {
        match self {
            Decoration::Pure => 0,
            Decoration::Accessor => 1,
            Decoration::Modifier => 2,
        }
    }

    pub fn from_level(level: u8) -> Option<Decoration> {
        match level {
            0 => Some(Decoration::Pure),
            1 => Some(Decoration::Accessor),
            2 => Some(Decoration::Modifier),
            _ => None,
        }
    }

    /// Name of the level in the vocabulary of a flavor.
    pub fn name(self, flavor: Flavor) -> &'static str {
        match (self, flavor) {
            (Decoration::Pure, _) => "pure",
            (Decoration::Accessor, Flavor::Exceptions) => "propagator",
            (Decoration::Modifier, Flavor::Exceptions) => "catcher",
            (Decoration::Accessor, _) => "accessor",
            (Decoration::Modifier, _) => "modifier",
        }
    }

    /// Parses any of the level keywords, whatever the flavor.
    pub fn parse(word: &str) -> Option<Decoration> {
        match word {
            "pure" => Some(Decoration::Pure),
            "accessor" | "propagator" => Some(Decoration::Accessor),
            "modifier" | "catcher" => Some(Decoration::Modifier),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    Plain,
    States,
    Exceptions,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Plain => "plain",
            Flavor::States => "states",
            Flavor::Exceptions => "exceptions",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Named(String),
    Unit,
    Empty,
    Prod(Box<Type>, Box<Type>),
    Coprod(Box<Type>, Box<Type>),
    /// Value type `V_i` of a location.
    Value(String),
    /// Parameter type `P_i` of an exception constructor.
    Param(String),
}

impl Type {
    pub fn named(name: &str) -> Type {
        Type::Named(name.to_string())
    }

    pub fn value(index: &str) -> Type {
        Type::Value(index.to_string())
    }

    pub fn param(index: &str) -> Type {
        Type::Param(index.to_string())
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn coprod(a: Type, b: Type) -> Type {
        Type::Coprod(Box::new(a), Box::new(b))
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Type::Named(n) => f.write_str(n),
            Type::Unit => f.write_str("1"),
            Type::Empty => f.write_str("0"),
            Type::Value(i) => write!(f, "V_{i}"),
            Type::Param(i) => write!(f, "P_{i}"),
            Type::Prod(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 2)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Type::Coprod(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A decorated term. `Comp(g, f)` is `g ∘ f`: first `f`, then `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Gen {
        name: String,
        dom: Type,
        cod: Type,
        dec: Decoration,
    },
    Id(Type),
    Comp(Box<Term>, Box<Term>),
    /// `⟨⟩_X : X → 1`
    ToUnit(Type),
    /// `[]_Y : 0 → Y`
    FromEmpty(Type),
    Proj1(Type, Type),
    Proj2(Type, Type),
    Inj1(Type, Type),
    Inj2(Type, Type),
    /// `⟨f, g⟩ : X → A × B`
    Pair(Box<Term>, Box<Term>),
    /// `[g | h] : A + B → Y`
    PropCase(Box<Term>, Box<Term>),
    /// `f ⋉ g` when `pure_left`, `f ⋊ g` otherwise.
    SemiProd {
        left: Box<Term>,
        right: Box<Term>,
        pure_left: bool,
    },
    /// Coproduct counterpart of `SemiProd`.
    SemiCoprod {
        left: Box<Term>,
        right: Box<Term>,
        pure_left: bool,
    },
    /// `[g | k] : X → Y` with `g : X → Y` and `k : 0 → Y`.
    CaseSum {
        on_value: Box<Term>,
        on_empty: Box<Term>,
    },
    /// `⟨g | k⟩ : Y → X` with `g : Y → X` and `k : Y → 1`.
    TupleProd {
        on_value: Box<Term>,
        on_unit: Box<Term>,
    },
    Coerce(Box<Term>),
    /// `⟨f_j⟩ : X → 1` over the lookup cone.
    LocTuple {
        dom: Type,
        components: Vec<(String, Term)>,
    },
    /// `[f_j] : 0 → Y` over the throw cocone.
    ConstCotuple {
        cod: Type,
        components: Vec<(String, Term)>,
    },
}

impl Term {
    pub fn gen(name: &str, dom: Type, cod: Type, dec: Decoration) -> Term {
        Term::Gen {
            name: name.to_string(),
            dom,
            cod,
            dec,
        }
    }

    /// `after ∘ before`
    pub fn comp(after: Term, before: Term) -> Term {
        Term::Comp(Box::new(after), Box::new(before))
    }

    /// Right-nested composite of the factors, outermost first.
    pub fn seq(factors: Vec<Term>) -> Term {
        let mut it = factors.into_iter().rev();
        let mut acc = it.next().expect("seq of no factors");
        for t in it {
            acc = Term::comp(t, acc);
        }
        acc
    }

    pub fn pair(f: Term, g: Term) -> Term {
        Term::Pair(Box::new(f), Box::new(g))
    }

    pub fn prop_case(f: Term, g: Term) -> Term {
        Term::PropCase(Box::new(f), Box::new(g))
    }

    /// `f ⋉ g`, `f` pure.
    pub fn semi_left(f: Term, g: Term) -> Term {
        Term::SemiProd {
            left: Box::new(f),
            right: Box::new(g),
            pure_left: true,
        }
    }

    /// `g ⋊ f`, `f` pure.
    pub fn semi_right(g: Term, f: Term) -> Term {
        Term::SemiProd {
            left: Box::new(g),
            right: Box::new(f),
            pure_left: false,
        }
    }

    pub fn cosemi_left(f: Term, g: Term) -> Term {
        Term::SemiCoprod {
            left: Box::new(f),
            right: Box::new(g),
            pure_left: true,
        }
    }

    pub fn cosemi_right(g: Term, f: Term) -> Term {
        Term::SemiCoprod {
            left: Box::new(g),
            right: Box::new(f),
            pure_left: false,
        }
    }

    pub fn case_sum(g: Term, k: Term) -> Term {
        Term::CaseSum {
            on_value: Box::new(g),
            on_empty: Box::new(k),
        }
    }

    pub fn tuple_prod(g: Term, k: Term) -> Term {
        Term::TupleProd {
            on_value: Box::new(g),
            on_unit: Box::new(k),
        }
    }

    pub fn coerce(k: Term) -> Term {
        Term::Coerce(Box::new(k))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Gen { .. }
            | Term::Id(_)
            | Term::ToUnit(_)
            | Term::FromEmpty(_)
            | Term::Proj1(..)
            | Term::Proj2(..)
            | Term::Inj1(..)
            | Term::Inj2(..) => vec![],
            Term::Comp(a, b) | Term::Pair(a, b) | Term::PropCase(a, b) => vec![a, b],
            Term::SemiProd { left, right, .. } | Term::SemiCoprod { left, right, .. } => {
                vec![left, right]
            }
            Term::CaseSum { on_value, on_empty } => vec![on_value, on_empty],
            Term::TupleProd { on_value, on_unit } => vec![on_value, on_unit],
            Term::Coerce(k) => vec![k],
            Term::LocTuple { components, .. } | Term::ConstCotuple { components, .. } => {
                components.iter().map(|(_, t)| t).collect()
            }
        }
    }

    /// Factors of the composition spine, outermost first.
    pub fn spine(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            if let Term::Comp(a, b) = t {
                walk(a, out);
                walk(b, out);
            } else {
                out.push(t);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Applies `f` to every immediate subterm.
    pub fn map_children(&self, f: &mut impl FnMut(&Term) -> Term) -> Term {
        match self {
            Term::Gen { .. }
            | Term::Id(_)
            | Term::ToUnit(_)
            | Term::FromEmpty(_)
            | Term::Proj1(..)
            | Term::Proj2(..)
            | Term::Inj1(..)
            | Term::Inj2(..) => self.clone(),
            Term::Comp(a, b) => Term::comp(f(a), f(b)),
            Term::Pair(a, b) => Term::pair(f(a), f(b)),
            Term::PropCase(a, b) => Term::prop_case(f(a), f(b)),
            Term::SemiProd {
                left,
                right,
                pure_left,
            } => Term::SemiProd {
                left: Box::new(f(left)),
                right: Box::new(f(right)),
                pure_left: *pure_left,
            },
            Term::SemiCoprod {
                left,
                right,
                pure_left,
            } => Term::SemiCoprod {
                left: Box::new(f(left)),
                right: Box::new(f(right)),
                pure_left: *pure_left,
            },
            Term::CaseSum { on_value, on_empty } => Term::case_sum(f(on_value), f(on_empty)),
            Term::TupleProd { on_value, on_unit } => Term::tuple_prod(f(on_value), f(on_unit)),
            Term::Coerce(k) => Term::coerce(f(k)),
            Term::LocTuple { dom, components } => Term::LocTuple {
                dom: dom.clone(),
                components: components.iter().map(|(i, t)| (i.clone(), f(t))).collect(),
            },
            Term::ConstCotuple { cod, components } => Term::ConstCotuple {
                cod: cod.clone(),
                components: components.iter().map(|(i, t)| (i.clone(), f(t))).collect(),
            },
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Term::Gen { name, .. } => f.write_str(name),
            Term::Id(t) => write!(f, "id[{t}]"),
            Term::Comp(a, b) => {
                if nested {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, true)?;
                f.write_str(" . ")?;
                b.fmt_prec(f, false)?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::ToUnit(t) => write!(f, "<>[{t}]"),
            Term::FromEmpty(t) => write!(f, "[][{t}]"),
            Term::Proj1(a, b) => write!(f, "pi1[{a}, {b}]"),
            Term::Proj2(a, b) => write!(f, "pi2[{a}, {b}]"),
            Term::Inj1(a, b) => write!(f, "in1[{a}, {b}]"),
            Term::Inj2(a, b) => write!(f, "in2[{a}, {b}]"),
            Term::Pair(a, b) => write!(f, "pair({a}, {b})"),
            Term::PropCase(a, b) => write!(f, "copair({a}, {b})"),
            Term::SemiProd {
                left,
                right,
                pure_left,
            } => {
                let name = if *pure_left { "lsemi" } else { "rsemi" };
                write!(f, "{name}({left}, {right})")
            }
            Term::SemiCoprod {
                left,
                right,
                pure_left,
            } => {
                let name = if *pure_left { "lcosemi" } else { "rcosemi" };
                write!(f, "{name}({left}, {right})")
            }
            Term::CaseSum { on_value, on_empty } => write!(f, "case({on_value} | {on_empty})"),
            Term::TupleProd { on_value, on_unit } => write!(f, "tuple({on_value} | {on_unit})"),
            Term::Coerce(k) => write!(f, "coerce({k})"),
            Term::LocTuple { dom, components } => {
                write!(f, "loctuple[{dom}](")?;
                fmt_components(f, components)?;
                f.write_str(")")
            }
            Term::ConstCotuple { cod, components } => {
                write!(f, "cotuple[{cod}](")?;
                fmt_components(f, components)?;
                f.write_str(")")
            }
        }
    }
}

fn fmt_components(f: &mut fmt::Formatter<'_>, components: &[(String, Term)]) -> fmt::Result {
    for (n, (i, t)) in components.iter().enumerate() {
        if n > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{i}: {t}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EqKind {
    Strong,
    Weak,
}

impl EqKind {
    pub fn symbol(self) -> &'static str {
        match self {
            EqKind::Strong => "==",
            EqKind::Weak => "~~",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub kind: EqKind,
}

impl Equation {
    pub fn strong(lhs: Term, rhs: Term) -> Equation {
        Equation {
            lhs,
            rhs,
            kind: EqKind::Strong,
        }
    }

    pub fn weak(lhs: Term, rhs: Term) -> Equation {
        Equation {
            lhs,
            rhs,
            kind: EqKind::Weak,
        }
    }

    /// Both sides in associative normal form.
    pub fn normalized(&self) -> Equation {
        Equation {
            lhs: normalize_assoc(&self.lhs),
            rhs: normalize_assoc(&self.rhs),
            kind: self.kind,
        }
    }

    /// Equality up to associativity and identities.
    pub fn same_as(&self, other: &Equation) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.kind.symbol(), self.rhs)
    }
}

/// What a generator stands for.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Lookup(String),
    Update(String),
    Throw(String),
    Catch(String),
    /// The catcher `c_all : 0 → 1`.
    CatchAll,
    /// Its counterpart in a states theory, `u_all : 0 → 1`.
    UpdateAll,
    User,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub dom: Type,
    pub cod: Type,
    pub decoration: Decoration,
    pub role: Role,
}

impl Generator {
    pub fn term(&self) -> Term {
        Term::gen(&self.name, self.dom.clone(), self.cod.clone(), self.decoration)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Axiom {
    pub label: String,
    pub equation: Equation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub flavor: Flavor,
    /// Locations or exception constructors, in canonical order.
    pub indices: Vec<String>,
    pub generators: Vec<Generator>,
    pub axioms: Vec<Axiom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum TypeError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` used with a signature that differs from its declaration")]
    GeneratorMismatch(String),
    #[error("composition mismatch: expected {expected}, found {found}")]
    CompositionMismatch { expected: Type, found: Type },
    #[error("flavor violation: {0}")]
    FlavorViolation(String),
    #[error("unknown index `{0}`")]
    UnknownIndex(String),
    #[error("decoration violation: {0}")]
    DecorationViolation(String),
    #[error("malformed term: {0}")]
    Malformed(String),
}

/// Signature and inferred decoration of a well-formed term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub dom: Type,
    pub cod: Type,
    pub dec: Decoration,
}

impl Theory {
    pub fn plain() -> Theory {
        Theory {
            flavor: Flavor::Plain,
            indices: Vec::new(),
            generators: Vec::new(),
            axioms: Vec::new(),
        }
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    fn by_role(&self, role: &Role) -> Option<&Generator> {
        self.generators.iter().find(|g| &g.role == role)
    }

    pub fn lookup(&self, i: &str) -> Option<Term> {
        self.by_role(&Role::Lookup(i.to_string())).map(Generator::term)
    }

    pub fn update(&self, i: &str) -> Option<Term> {
        self.by_role(&Role::Update(i.to_string())).map(Generator::term)
    }

    pub fn throw(&self, i: &str) -> Option<Term> {
        self.by_role(&Role::Throw(i.to_string())).map(Generator::term)
    }

    pub fn catch(&self, i: &str) -> Option<Term> {
        self.by_role(&Role::Catch(i.to_string())).map(Generator::term)
    }

    pub fn catch_all(&self) -> Option<Term> {
        self.by_role(&Role::CatchAll).map(Generator::term)
    }

    /// Lookups `l_i : 1 → V_i` in index order.
    pub fn lookup_cone(&self) -> Vec<(String, Generator)> {
        self.generators
            .iter()
            .filter_map(|g| match &g.role {
                Role::Lookup(i) => Some((i.clone(), g.clone())),
                _ => None,
            })
            .collect()
    }

    /// Throws `t_i : P_i → 0` in index order.
    pub fn throw_cocone(&self) -> Vec<(String, Generator)> {
        self.generators
            .iter()
            .filter_map(|g| match &g.role {
                Role::Throw(i) => Some((i.clone(), g.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn axiom(&self, label: &str) -> Option<(usize, &Axiom)> {
        self.axioms.iter().enumerate().find(|(_, a)| a.label == label)
    }

    pub fn check_type(&self, ty: &Type) -> Result<(), TypeError> {
        match ty {
            Type::Named(_) | Type::Unit | Type::Empty => Ok(()),
            Type::Prod(a, b) | Type::Coprod(a, b) => {
                self.check_type(a)?;
                self.check_type(b)
            }
            Type::Value(i) => {
                if self.flavor == Flavor::Exceptions {
                    return Err(TypeError::FlavorViolation(format!(
                        "value type V_{i} in an exceptions theory"
                    )));
                }
                self.known_index(i)
            }
            Type::Param(i) => {
                if self.flavor == Flavor::States {
                    return Err(TypeError::FlavorViolation(format!(
                        "parameter type P_{i} in a states theory"
                    )));
                }
                self.known_index(i)
            }
        }
    }

    fn known_index(&self, i: &str) -> Result<(), TypeError> {
        if self.indices.iter().any(|x| x == i) {
            Ok(())
        } else {
            Err(TypeError::UnknownIndex(i.to_string()))
        }
    }

    pub fn add_generator(&mut self, gen: Generator) -> Result<(), TypeError> {
        if self.generator(&gen.name).is_some() {
            return Err(TypeError::Malformed(format!(
                "generator `{}` declared twice",
                gen.name
            )));
        }
        self.check_type(&gen.dom)?;
        self.check_type(&gen.cod)?;
        self.generators.push(gen);
        Ok(())
    }

    pub fn add_axiom(&mut self, label: &str, equation: Equation) -> Result<(), TypeError> {
        let l = check(self, &equation.lhs)?;
        let r = check(self, &equation.rhs)?;
        if l.dom != r.dom {
            return Err(TypeError::CompositionMismatch {
                expected: l.dom,
                found: r.dom,
            });
        }
        if l.cod != r.cod {
            return Err(TypeError::CompositionMismatch {
                expected: l.cod,
                found: r.cod,
            });
        }
        if self.axiom(label).is_some() {
            return Err(TypeError::Malformed(format!("axiom `{label}` declared twice")));
        }
        self.axioms.push(Axiom {
            label: label.to_string(),
            equation,
        });
        Ok(())
    }

    fn decorated(&self) -> bool {
        self.flavor != Flavor::Plain
    }

    fn require(&self, allowed: &[Flavor], what: &str) -> Result<(), TypeError> {
        if allowed.contains(&self.flavor) {
            Ok(())
        } else {
            Err(TypeError::FlavorViolation(format!(
                "{what} is not available in a {} theory",
                self.flavor
            )))
        }
    }

    fn at_most(&self, sig: &Signature, bound: Decoration, what: &str) -> Result<(), TypeError> {
        if self.decorated() && sig.dec > bound {
            Err(TypeError::DecorationViolation(format!(
                "{what} must be at most {}, found {}",
                bound.name(self.flavor),
                sig.dec.name(self.flavor)
            )))
        } else {
            Ok(())
        }
    }
}

fn same_type(expected: &Type, found: &Type) -> Result<(), TypeError> {
    if expected == found {
        Ok(())
    } else {
        Err(TypeError::CompositionMismatch {
            expected: expected.clone(),
            found: found.clone(),
        })
    }
}

fn sig(dom: Type, cod: Type, dec: Decoration) -> Signature {
    Signature { dom, cod, dec }
}

/// Typechecks `term` against `theory` and infers its decoration.
pub fn check(theory: &Theory, term: &Term) -> Result<Signature, TypeError> {
    use Decoration::*;
    use Flavor::*;
    match term {
        Term::Gen {
            name,
            dom,
            cod,
            dec,
        } => {
            let g = theory
                .generator(name)
                .ok_or_else(|| TypeError::UnknownGenerator(name.clone()))?;
            if &g.dom != dom || &g.cod != cod || &g.decoration != dec {
                return Err(TypeError::GeneratorMismatch(name.clone()));
            }
            Ok(sig(dom.clone(), cod.clone(), *dec))
        }
        Term::Id(t) => {
            theory.check_type(t)?;
            Ok(sig(t.clone(), t.clone(), Pure))
        }
        Term::Comp(after, before) => {
            let b = check(theory, before)?;
            let a = check(theory, after)?;
            same_type(&a.dom, &b.cod)?;
            Ok(sig(b.dom, a.cod, a.dec.max(b.dec)))
        }
        Term::ToUnit(t) => {
            theory.check_type(t)?;
            Ok(sig(t.clone(), Type::Unit, Pure))
        }
        Term::FromEmpty(t) => {
            theory.check_type(t)?;
            Ok(sig(Type::Empty, t.clone(), Pure))
        }
        Term::Proj1(a, b) | Term::Proj2(a, b) => {
            theory.check_type(a)?;
            theory.check_type(b)?;
            let cod = if matches!(term, Term::Proj1(..)) { a } else { b };
            Ok(sig(Type::prod(a.clone(), b.clone()), cod.clone(), Pure))
        }
        Term::Inj1(a, b) | Term::Inj2(a, b) => {
            theory.check_type(a)?;
            theory.check_type(b)?;
            let dom = if matches!(term, Term::Inj1(..)) { a } else { b };
            Ok(sig(dom.clone(), Type::coprod(a.clone(), b.clone()), Pure))
        }
        Term::Pair(f, g) => {
            let sf = check(theory, f)?;
            let sg = check(theory, g)?;
            same_type(&sf.dom, &sg.dom)?;
            let bound = if theory.flavor == Exceptions { Pure } else { Accessor };
            theory.at_most(&sf, bound, "a pair component")?;
            theory.at_most(&sg, bound, "a pair component")?;
            Ok(sig(sf.dom, Type::prod(sf.cod, sg.cod), sf.dec.max(sg.dec)))
        }
        Term::PropCase(f, g) => {
            let sf = check(theory, f)?;
            let sg = check(theory, g)?;
            same_type(&sf.cod, &sg.cod)?;
            let bound = if theory.flavor == States { Pure } else { Accessor };
            theory.at_most(&sf, bound, "a copair component")?;
            theory.at_most(&sg, bound, "a copair component")?;
            Ok(sig(Type::coprod(sf.dom, sg.dom), sf.cod, sf.dec.max(sg.dec)))
        }
        Term::SemiProd {
            left,
            right,
            pure_left,
        } => {
            theory.require(&[Plain, States], "a semi-pure product")?;
            let sl = check(theory, left)?;
            let sr = check(theory, right)?;
            let pure = if *pure_left { &sl } else { &sr };
            theory.at_most(pure, Pure, "the pure side of a semi-pure product")?;
            Ok(sig(
                Type::prod(sl.dom, sr.dom),
                Type::prod(sl.cod, sr.cod),
                Modifier,
            ))
        }
        Term::SemiCoprod {
            left,
            right,
            pure_left,
        } => {
            theory.require(&[Plain, Exceptions], "a semi-pure coproduct")?;
            let sl = check(theory, left)?;
            let sr = check(theory, right)?;
            let pure = if *pure_left { &sl } else { &sr };
            theory.at_most(pure, Pure, "the pure side of a semi-pure coproduct")?;
            Ok(sig(
                Type::coprod(sl.dom, sr.dom),
                Type::coprod(sl.cod, sr.cod),
                Modifier,
            ))
        }
        Term::CaseSum { on_value, on_empty } => {
            theory.require(&[Plain, Exceptions], "a case on X + 0")?;
            let g = check(theory, on_value)?;
            let k = check(theory, on_empty)?;
            same_type(&Type::Empty, &k.dom)?;
            same_type(&g.cod, &k.cod)?;
            theory.at_most(&g, Accessor, "the value branch of a case")?;
            let dec = if k.dec <= Accessor { Accessor } else { Modifier };
            Ok(sig(g.dom, g.cod, dec))
        }
        Term::TupleProd { on_value, on_unit } => {
            theory.require(&[Plain, States], "a tuple into X * 1")?;
            let g = check(theory, on_value)?;
            let k = check(theory, on_unit)?;
            same_type(&Type::Unit, &k.cod)?;
            same_type(&g.dom, &k.dom)?;
            theory.at_most(&g, Accessor, "the value component of a tuple")?;
            let dec = if k.dec <= Accessor { Accessor } else { Modifier };
            Ok(sig(g.dom, g.cod, dec))
        }
        Term::Coerce(k) => {
            let s = check(theory, k)?;
            Ok(sig(s.dom, s.cod, Accessor))
        }
        Term::LocTuple { dom, components } => {
            theory.require(&[Plain, States], "a tuple over the locations")?;
            theory.check_type(dom)?;
            let cone = theory.lookup_cone();
            check_components(theory, components, &cone, "location")?;
            for ((_, l), (_, c)) in cone.iter().zip(components) {
                let s = check(theory, c)?;
                same_type(dom, &s.dom)?;
                same_type(&l.cod, &s.cod)?;
                theory.at_most(&s, Accessor, "a location tuple component")?;
            }
            Ok(sig(dom.clone(), Type::Unit, Modifier))
        }
        Term::ConstCotuple { cod, components } => {
            theory.require(&[Plain, Exceptions], "a cotuple over the constructors")?;
            theory.check_type(cod)?;
            let cocone = theory.throw_cocone();
            check_components(theory, components, &cocone, "constructor")?;
            for ((_, t), (_, c)) in cocone.iter().zip(components) {
                let s = check(theory, c)?;
                same_type(cod, &s.cod)?;
                same_type(&t.dom, &s.dom)?;
                theory.at_most(&s, Accessor, "a constructor cotuple component")?;
            }
            Ok(sig(Type::Empty, cod.clone(), Modifier))
        }
    }
}

fn check_components(
    theory: &Theory,
    components: &[(String, Term)],
    cone: &[(String, Generator)],
    what: &str,
) -> Result<(), TypeError> {
    let want: Vec<&String> = cone.iter().map(|(i, _)| i).collect();
    let got: Vec<&String> = components.iter().map(|(i, _)| i).collect();
    if want != got {
        let _ = theory;
        return Err(TypeError::Malformed(format!(
            "expected one component per {what} in order {want:?}, found {got:?}"
        )));
    }
    Ok(())
}

/// Domain and codomain of a well-formed term.
pub fn typecheck(theory: &Theory, term: &Term) -> Result<(Type, Type), TypeError> {
    check(theory, term).map(|s| (s.dom, s.cod))
}

/// Least decoration of a well-formed term.
pub fn infer_decoration(theory: &Theory, term: &Term) -> Result<Decoration, TypeError> {
    check(theory, term).map(|s| s.dec)
}

/// Right-associates composites and removes identity factors, recursively.
pub fn normalize_assoc(term: &Term) -> Term {
    match term {
        Term::Comp(..) => {
            let mut factors = Vec::new();
            let mut last_id = None;
            for f in term.spine() {
                let n = normalize_assoc(f);
                if let Term::Id(_) = n {
                    last_id = Some(n);
                } else {
                    factors.push(n);
                }
            }
            if factors.is_empty() {
                last_id.expect("a spine has at least one factor")
            } else {
                Term::seq(factors)
            }
        }
        _ => term.map_children(&mut normalize_assoc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Theory {
        let mut th = Theory {
            flavor: Flavor::States,
            indices: vec!["x".into()],
            generators: vec![],
            axioms: vec![],
        };
        th.add_generator(Generator {
            name: "l_x".into(),
            dom: Type::Unit,
            cod: Type::value("x"),
            decoration: Decoration::Accessor,
            role: Role::Lookup("x".into()),
        })
        .unwrap();
        th.add_generator(Generator {
            name: "u_x".into(),
            dom: Type::value("x"),
            cod: Type::Unit,
            decoration: Decoration::Modifier,
            role: Role::Update("x".into()),
        })
        .unwrap();
        th
    }

    #[test]
    fn lookup_after_update_types() {
        let th = tiny();
        let t = Term::comp(th.lookup("x").unwrap(), th.update("x").unwrap());
        assert_eq!(
            typecheck(&th, &t).unwrap(),
            (Type::value("x"), Type::value("x"))
        );
        assert_eq!(infer_decoration(&th, &t).unwrap(), Decoration::Modifier);
    }

    #[test]
    fn update_after_update_is_rejected() {
        let th = tiny();
        let u = th.update("x").unwrap();
        assert!(matches!(
            typecheck(&th, &Term::comp(u.clone(), u)),
            Err(TypeError::CompositionMismatch { .. })
        ));
    }

    #[test]
    fn normalization_drops_identities() {
        let th = tiny();
        let l = th.lookup("x").unwrap();
        let u = th.update("x").unwrap();
        let t = Term::comp(
            Term::comp(l.clone(), Term::Id(Type::value("x"))),
            Term::comp(u.clone(), Term::Id(Type::value("x"))),
        );
        assert_eq!(normalize_assoc(&t), Term::comp(l, u));
        let ids = Term::comp(Term::Id(Type::Unit), Term::Id(Type::Unit));
        assert_eq!(normalize_assoc(&ids), Term::Id(Type::Unit));
    }

    #[test]
    fn semi_product_needs_a_pure_side() {
        let th = tiny();
        let u = th.update("x").unwrap();
        let bad = Term::semi_left(u.clone(), u);
        assert!(matches!(
            check(&th, &bad),
            Err(TypeError::DecorationViolation(_))
        ));
    }

    #[test]
    fn exception_constructs_are_rejected_in_states() {
        let th = tiny();
        let t = Term::case_sum(Term::Id(Type::Unit), Term::FromEmpty(Type::Unit));
        assert!(matches!(check(&th, &t), Err(TypeError::FlavorViolation(_))));
    }
}
