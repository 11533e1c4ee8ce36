//! The proof kernel: rule catalog, single-step rule application and
//! derivation checking.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{
    check, normalize_assoc, Decoration, EqKind, Equation, Flavor, Signature, Term, Theory, Type,
    TypeError,
};

macro_rules! rules {
    ($($variant:ident => $name:literal,)*) => {
        /// Identifier of an inference rule.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub enum RuleId { $($variant,)* }

        impl RuleId {
            pub const ALL: &'static [RuleId] = &[$(RuleId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(RuleId::$variant => $name,)* }
            }

            pub fn parse(name: &str) -> Option<RuleId> {
                match name { $($name => Some(RuleId::$variant),)* _ => None }
            }
        }
    };
}

rules! {
    Comp => "comp",
    Id => "id",
    Assoc => "assoc",
    IdSrc => "id-src",
    IdTgt => "id-tgt",
    EqRefl => "eq-refl",
    EqSym => "eq-sym",
    EqTrans => "eq-trans",
    EqSubs => "eq-subs",
    EqRepl => "eq-repl",
    ZeroToOne => "0-to-1",
    OneToTwo => "1-to-2",
    ZeroComp => "0-comp",
    OneComp => "1-comp",
    ZeroId => "0-id",
    WRefl => "w-refl",
    WSym => "w-sym",
    WTrans => "w-trans",
    SToW => "s-to-w",
    CoerceExists => "coerce-exists",
    CoerceWeak => "coerce-weak",
    CoerceUnique => "coerce-unique",
    WSubs => "w-subs",
    WReplPure => "w-repl-pure",
    WToS => "w-to-s",
    Final => "final",
    UnitArrow => "unit-arrow",
    WFinal => "w-final",
    LocTuple => "loc-tuple",
    LocTupleUnique => "loc-tuple-unique",
    SemiprodP1 => "semiprod-P1",
    SemiprodP2 => "semiprod-P2",
    SemiprodUnique => "semiprod-unique",
    TupleExists => "tuple-exists",
    TupleWeak => "tuple-weak",
    TupleUnit => "tuple-unit",
    TupleAcc => "tuple-acc",
    TupleUnique => "tuple-unique",
    BinprodProj1 => "binprod-proj1",
    BinprodProj2 => "binprod-proj2",
    BinprodUnique => "binprod-unique",
    WSubsPure => "w-subs-pure",
    WRepl => "w-repl",
    WToSProp => "w-to-s-prop",
    Initial => "initial",
    EmptyArrow => "empty-arrow",
    WInitial => "w-initial",
    ConstCotuple => "const-cotuple",
    ConstCotupleUnique => "const-cotuple-unique",
    SemicoprodP1 => "semicoprod-P1",
    SemicoprodP2 => "semicoprod-P2",
    SemicoprodUnique => "semicoprod-unique",
    SumCaseExists => "sum-case-exists",
    SumCaseWeak => "sum-case-weak",
    SumCaseEmpty => "sum-case-empty",
    SumCaseProp => "sum-case-prop",
    SumCaseUnique => "sum-case-unique",
    PropcaseInl => "propcase-inl",
    PropcaseInr => "propcase-inr",
    PropcaseUnique => "propcase-unique",
}

impl From<RuleId> for String {
    fn from(r: RuleId) -> String {
        r.name().to_string()
    }
}

impl TryFrom<String> for RuleId {
    type Error = String;
    fn try_from(s: String) -> Result<RuleId, String> {
        RuleId::parse(&s).ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl RuleId {
    /// Flavors in which the rule may be applied.
    pub fn flavors(self) -> &'static [Flavor] {
        use Flavor::*;
        use RuleId::*;
        match self {
            Comp | Id | Assoc | IdSrc | IdTgt | EqRefl | EqSym | EqTrans | EqSubs | EqRepl => {
                &[Plain, States, Exceptions]
            }
            ZeroToOne | OneToTwo | ZeroComp | OneComp | ZeroId | WRefl | WSym | WTrans | SToW => {
                &[States, Exceptions]
            }
            CoerceExists | CoerceWeak | CoerceUnique => &[Plain, States, Exceptions],
            WSubs | WReplPure | WToS => &[States],
            WSubsPure | WRepl | WToSProp => &[Exceptions],
            Final | UnitArrow | WFinal | LocTuple | LocTupleUnique | SemiprodP1 | SemiprodP2
            | SemiprodUnique | TupleExists | TupleWeak | TupleUnit | TupleAcc | TupleUnique
            | BinprodProj1 | BinprodProj2 | BinprodUnique => &[Plain, States],
            Initial | EmptyArrow | WInitial | ConstCotuple | ConstCotupleUnique | SemicoprodP1
            | SemicoprodP2 | SemicoprodUnique | SumCaseExists | SumCaseWeak | SumCaseEmpty
            | SumCaseProp | SumCaseUnique | PropcaseInl | PropcaseInr | PropcaseUnique => {
                &[Plain, Exceptions]
            }
        }
    }

    /// The rule playing the same part on the other side of the duality.
    pub fn dual(self) -> RuleId {
        use RuleId::*;
        match self {
            IdSrc => IdTgt,
            IdTgt => IdSrc,
            EqSubs => EqRepl,
            EqRepl => EqSubs,
            WSubs => WRepl,
            WRepl => WSubs,
            WReplPure => WSubsPure,
            WSubsPure => WReplPure,
            WToS => WToSProp,
            WToSProp => WToS,
            Final => Initial,
            Initial => Final,
            UnitArrow => EmptyArrow,
            EmptyArrow => UnitArrow,
            WFinal => WInitial,
            WInitial => WFinal,
            LocTuple => ConstCotuple,
            ConstCotuple => LocTuple,
            LocTupleUnique => ConstCotupleUnique,
            ConstCotupleUnique => LocTupleUnique,
            SemiprodP1 => SemicoprodP1,
            SemicoprodP1 => SemiprodP1,
            SemiprodP2 => SemicoprodP2,
            SemicoprodP2 => SemiprodP2,
            SemiprodUnique => SemicoprodUnique,
            SemicoprodUnique => SemiprodUnique,
            TupleExists => SumCaseExists,
            SumCaseExists => TupleExists,
            TupleWeak => SumCaseWeak,
            SumCaseWeak => TupleWeak,
            TupleUnit => SumCaseEmpty,
            SumCaseEmpty => TupleUnit,
            TupleAcc => SumCaseProp,
            SumCaseProp => TupleAcc,
            TupleUnique => SumCaseUnique,
            SumCaseUnique => TupleUnique,
            BinprodProj1 => PropcaseInl,
            PropcaseInl => BinprodProj1,
            BinprodProj2 => PropcaseInr,
            PropcaseInr => BinprodProj2,
            BinprodUnique => PropcaseUnique,
            PropcaseUnique => BinprodUnique,
            other => other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Judgment {
    /// `X` is a type of the theory.
    IsType(Type),
    /// The term is well formed at the given level or below.
    WellFormed(Term, Decoration),
    Holds(Equation),
}

impl Judgment {
    pub fn normalized(&self) -> Judgment {
        match self {
            Judgment::IsType(t) => Judgment::IsType(t.clone()),
            Judgment::WellFormed(t, d) => Judgment::WellFormed(normalize_assoc(t), *d),
            Judgment::Holds(e) => Judgment::Holds(e.normalized()),
        }
    }

    pub fn equation(&self) -> Option<&Equation> {
        match self {
            Judgment::Holds(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::IsType(t) => write!(f, "type {t}"),
            Judgment::WellFormed(t, d) => write!(f, "{t} : level {}", d.level()),
            Judgment::Holds(e) => write!(f, "{e}"),
        }
    }
}

/// Value bound to a rule metavariable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InstValue {
    Term(Term),
    Type(Type),
    Index(String),
}

impl From<Term> for InstValue {
    fn from(t: Term) -> Self {
        InstValue::Term(t)
    }
}

impl From<Type> for InstValue {
    fn from(t: Type) -> Self {
        InstValue::Type(t)
    }
}

impl fmt::Display for InstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstValue::Term(t) => write!(f, "{t}"),
            InstValue::Type(t) => write!(f, "type {t}"),
            InstValue::Index(i) => write!(f, "index {i}"),
        }
    }
}

pub type Inst = BTreeMap<String, InstValue>;

/// Builds an instantiation from key/value pairs.
pub fn inst<const N: usize>(pairs: [(&str, InstValue); N]) -> Inst {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    Rule(RuleId),
    Axiom(usize),
    Hypothesis(String),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Rule(r) => write!(f, "{r}"),
            Step::Axiom(i) => write!(f, "axiom #{i}"),
            Step::Hypothesis(h) => write!(f, "hypothesis {h}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Derivation {
    pub conclusion: Judgment,
    pub step: Step,
    pub premises: Vec<Derivation>,
    pub inst: Inst,
}

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Every node in pre-order, with its path from the root.
    pub fn nodes(&self) -> Vec<(Vec<usize>, &Derivation)> {
        let mut out = Vec::new();
        fn walk<'a>(d: &'a Derivation, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Derivation)>) {
            out.push((path.clone(), d));
            for (k, p) in d.premises.iter().enumerate() {
                path.push(k);
                walk(p, path, out);
                path.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn node_mut(&mut self, path: &[usize]) -> &mut Derivation {
        let mut d = self;
        for &k in path {
            d = &mut d.premises[k];
        }
        d
    }

    /// Whether some node applies `rule`.
    pub fn uses(&self, rule: RuleId) -> bool {
        self.nodes().iter().any(|(_, d)| d.step == Step::Rule(rule))
    }

    pub fn equation(&self) -> Option<&Equation> {
        self.conclusion.equation()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum KernelError {
    #[error("side condition of {rule} violated: {detail}")]
    SideConditionViolated { rule: RuleId, detail: String },
    #[error("premises do not fit {rule}: {detail}")]
    PremiseShapeMismatch { rule: RuleId, detail: String },
    #[error("{rule} is not a rule of the {flavor} logic")]
    FlavorViolation { rule: RuleId, flavor: Flavor },
    #[error("bad instantiation for {rule}: {detail}")]
    BadInstantiation { rule: RuleId, detail: String },
    #[error("node concludes `{found}` but the step yields `{expected}`")]
    ConclusionMismatch { expected: String, found: String },
    #[error("axiom leaf: {0}")]
    BadAxiom(String),
    #[error("hypothesis `{0}` is not discharged")]
    OpenHypothesis(String),
    #[error("`{0}` is a modifier, not an accessor")]
    NotAnAccessor(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Outcome of checking a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Report {
    Valid { nodes: usize },
    Invalid { path: Vec<usize>, error: KernelError },
}

impl Report {
    pub fn is_valid(&self) -> bool {
        matches!(self, Report::Valid { .. })
    }
}

struct Ctx<'a> {
    theory: &'a Theory,
    rule: RuleId,
    premises: Vec<Judgment>,
    inst: &'a Inst,
}

impl Ctx<'_> {
    fn plain(&self) -> bool {
        self.theory.flavor == Flavor::Plain
    }

    /// Kind of the rule's weak judgments: strong in the apparent logic.
    fn weak(&self) -> EqKind {
        if self.plain() {
            EqKind::Strong
        } else {
            EqKind::Weak
        }
    }

    fn side(&self, detail: impl Into<String>) -> KernelError {
        KernelError::SideConditionViolated {
            rule: self.rule,
            detail: detail.into(),
        }
    }

    fn shape(&self, detail: impl Into<String>) -> KernelError {
        KernelError::PremiseShapeMismatch {
            rule: self.rule,
            detail: detail.into(),
        }
    }

    fn bad_inst(&self, detail: impl Into<String>) -> KernelError {
        KernelError::BadInstantiation {
            rule: self.rule,
            detail: detail.into(),
        }
    }

    fn expect(&self, premises: usize, keys: &[&str]) -> Result<(), KernelError> {
        if self.premises.len() != premises {
            return Err(self.shape(format!(
                "expected {premises} premises, got {}",
                self.premises.len()
            )));
        }
        let got: Vec<&str> = self.inst.keys().map(String::as_str).collect();
        let mut want = keys.to_vec();
        want.sort();
        if got != want {
            return Err(self.bad_inst(format!("expected metavariables {want:?}, got {got:?}")));
        }
        Ok(())
    }

    fn term(&self, key: &str) -> Result<(Term, Signature), KernelError> {
        match self.inst.get(key) {
            Some(InstValue::Term(t)) => {
                let s = check(self.theory, t)?;
                Ok((normalize_assoc(t), s))
            }
            _ => Err(self.bad_inst(format!("`{key}` must be a term"))),
        }
    }

    fn ty(&self, key: &str) -> Result<Type, KernelError> {
        match self.inst.get(key) {
            Some(InstValue::Type(t)) => {
                self.theory.check_type(t)?;
                Ok(t.clone())
            }
            _ => Err(self.bad_inst(format!("`{key}` must be a type"))),
        }
    }

    fn index(&self, key: &str) -> Result<String, KernelError> {
        match self.inst.get(key) {
            Some(InstValue::Index(i)) if self.theory.indices.contains(i) => Ok(i.clone()),
            _ => Err(self.bad_inst(format!("`{key}` must be an index of the theory"))),
        }
    }

    fn eq(&self, n: usize, kind: EqKind) -> Result<Equation, KernelError> {
        match &self.premises[n] {
            Judgment::Holds(e) if e.kind == kind => Ok(e.clone()),
            other => Err(self.shape(format!(
                "premise {} must be a {} equation, got `{other}`",
                n + 1,
                if kind == EqKind::Strong { "strong" } else { "weak" }
            ))),
        }
    }

    fn wf(&self, n: usize) -> Result<(Term, Decoration), KernelError> {
        match &self.premises[n] {
            Judgment::WellFormed(t, d) => {
                check(self.theory, t)?;
                Ok((t.clone(), *d))
            }
            other => Err(self.shape(format!(
                "premise {} must be a well-formedness judgment, got `{other}`",
                n + 1
            ))),
        }
    }

    fn sig(&self, t: &Term) -> Result<Signature, KernelError> {
        Ok(check(self.theory, t)?)
    }

    fn at_most(&self, t: &Term, bound: Decoration, what: &str) -> Result<(), KernelError> {
        if self.plain() {
            return Ok(());
        }
        let d = self.sig(t)?.dec;
        if d > bound {
            Err(self.side(format!(
                "{what} `{t}` must be {}, found {}",
                bound.name(self.theory.flavor),
                d.name(self.theory.flavor)
            )))
        } else {
            Ok(())
        }
    }

    /// Level recorded in a well-formedness conclusion.
    fn level(&self, d: Decoration) -> Decoration {
        if self.plain() {
            Decoration::Modifier
        } else {
            d
        }
    }

    fn same(&self, a: &Term, b: &Term, what: &str) -> Result<(), KernelError> {
        if normalize_assoc(a) == normalize_assoc(b) {
            Ok(())
        } else {
            Err(self.shape(format!("{what}: `{a}` differs from `{b}`")))
        }
    }

    /// A well-typed equation between the two terms.
    fn holds(&self, lhs: Term, rhs: Term, kind: EqKind) -> Result<Judgment, KernelError> {
        let l = self.sig(&lhs)?;
        let r = self.sig(&rhs)?;
        if l.dom != r.dom || l.cod != r.cod {
            return Err(self.shape(format!(
                "sides `{lhs}` and `{rhs}` have different signatures"
            )));
        }
        Ok(Judgment::Holds(Equation { lhs, rhs, kind }.normalized()))
    }

    fn prod_parts(&self, t: &Type) -> Result<(Type, Type), KernelError> {
        match t {
            Type::Prod(a, b) => Ok(((**a).clone(), (**b).clone())),
            _ => Err(self.bad_inst(format!("{t} is not a product"))),
        }
    }

    fn coprod_parts(&self, t: &Type) -> Result<(Type, Type), KernelError> {
        match t {
            Type::Coprod(a, b) => Ok(((**a).clone(), (**b).clone())),
            _ => Err(self.bad_inst(format!("{t} is not a coproduct"))),
        }
    }
}

/// Applies one rule and returns its conclusion, in normal form.
pub fn apply_rule(
    theory: &Theory,
    rule: RuleId,
    premises: &[Judgment],
    inst: &Inst,
) -> Result<Judgment, KernelError> {
    use EqKind::{Strong, Weak};
    use RuleId::*;
    if !rule.flavors().contains(&theory.flavor) {
        return Err(KernelError::FlavorViolation {
            rule,
            flavor: theory.flavor,
        });
    }
    let c = Ctx {
        theory,
        rule,
        premises: premises.iter().map(Judgment::normalized).collect(),
        inst,
    };
    let weak = c.weak();
    match rule {
        Comp | ZeroComp | OneComp => {
            c.expect(2, &[])?;
            let (f, df) = c.wf(0)?;
            let (g, dg) = c.wf(1)?;
            let level = match rule {
                ZeroComp => Decoration::Pure,
                OneComp => Decoration::Accessor,
                _ => Decoration::Modifier,
            };
            if rule != Comp && (df != level || dg != level) {
                return Err(c.shape(format!("both premises must be at level {}", level.level())));
            }
            let t = Term::comp(g, f);
            c.sig(&t)?;
            Ok(Judgment::WellFormed(normalize_assoc(&t), c.level(level)))
        }
        Id | ZeroId => {
            c.expect(0, &["X"])?;
            let x = c.ty("X")?;
            let level = if rule == ZeroId {
                Decoration::Pure
            } else {
                Decoration::Modifier
            };
            Ok(Judgment::WellFormed(Term::Id(x), c.level(level)))
        }
        Assoc => {
            c.expect(0, &["f", "g", "h"])?;
            let (f, _) = c.term("f")?;
            let (g, _) = c.term("g")?;
            let (h, _) = c.term("h")?;
            let lhs = Term::comp(h.clone(), Term::comp(g.clone(), f.clone()));
            let rhs = Term::comp(Term::comp(h, g), f);
            c.holds(lhs, rhs, Strong)
        }
        IdSrc | IdTgt => {
            c.expect(0, &["f"])?;
            let (f, s) = c.term("f")?;
            let lhs = if rule == IdSrc {
                Term::comp(f.clone(), Term::Id(s.dom))
            } else {
                Term::comp(Term::Id(s.cod), f.clone())
            };
            c.holds(lhs, f, Strong)
        }
        EqRefl | WRefl => {
            c.expect(0, &["f"])?;
            let (f, _) = c.term("f")?;
            c.holds(f.clone(), f, if rule == EqRefl { Strong } else { weak })
        }
        EqSym | WSym => {
            c.expect(1, &[])?;
            let e = c.eq(0, if rule == EqSym { Strong } else { weak })?;
            c.holds(e.rhs, e.lhs, e.kind)
        }
        EqTrans | WTrans => {
            c.expect(2, &[])?;
            let kind = if rule == EqTrans { Strong } else { weak };
            let a = c.eq(0, kind)?;
            let b = c.eq(1, kind)?;
            c.same(&a.rhs, &b.lhs, "middle terms")?;
            c.holds(a.lhs, b.rhs, kind)
        }
        EqSubs | WSubs | WSubsPure => {
            c.expect(1, &["f"])?;
            let kind = if rule == EqSubs { Strong } else { weak };
            let e = c.eq(0, kind)?;
            let (f, _) = c.term("f")?;
            if rule == WSubsPure {
                c.at_most(&f, Decoration::Pure, "the substituted term")?;
            }
            c.holds(Term::comp(e.lhs, f.clone()), Term::comp(e.rhs, f), kind)
        }
        EqRepl | WRepl | WReplPure => {
            c.expect(1, &["g"])?;
            let kind = if rule == EqRepl { Strong } else { weak };
            let e = c.eq(0, kind)?;
            let (g, _) = c.term("g")?;
            if rule == WReplPure {
                c.at_most(&g, Decoration::Pure, "the replacing term")?;
            }
            c.holds(Term::comp(g.clone(), e.lhs), Term::comp(g, e.rhs), kind)
        }
        ZeroToOne | OneToTwo => {
            c.expect(1, &[])?;
            let (t, d) = c.wf(0)?;
            let (from, to) = if rule == ZeroToOne {
                (Decoration::Pure, Decoration::Accessor)
            } else {
                (Decoration::Accessor, Decoration::Modifier)
            };
            if d != from {
                return Err(c.shape(format!("premise must be at level {}", from.level())));
            }
            Ok(Judgment::WellFormed(normalize_assoc(&t), to))
        }
        SToW => {
            c.expect(1, &[])?;
            let e = c.eq(0, Strong)?;
            c.holds(e.lhs, e.rhs, Weak)
        }
        WToS | WToSProp => {
            c.expect(1, &[])?;
            let e = c.eq(0, Weak)?;
            c.at_most(&e.lhs, Decoration::Accessor, "the left side")?;
            c.at_most(&e.rhs, Decoration::Accessor, "the right side")?;
            c.holds(e.lhs, e.rhs, Strong)
        }
        Final | Initial => {
            c.expect(0, &[])?;
            Ok(Judgment::IsType(if rule == Final {
                Type::Unit
            } else {
                Type::Empty
            }))
        }
        UnitArrow | EmptyArrow => {
            c.expect(0, &["X"])?;
            let x = c.ty("X")?;
            let t = if rule == UnitArrow {
                Term::ToUnit(x)
            } else {
                Term::FromEmpty(x)
            };
            Ok(Judgment::WellFormed(t, c.level(Decoration::Pure)))
        }
        WFinal => {
            c.expect(1, &[])?;
            let (f, _) = c.wf(0)?;
            let s = c.sig(&f)?;
            if s.cod != Type::Unit {
                return Err(c.side(format!("`{f}` does not land in 1")));
            }
            c.holds(f, Term::ToUnit(s.dom), weak)
        }
        WInitial => {
            c.expect(1, &[])?;
            let (f, _) = c.wf(0)?;
            let s = c.sig(&f)?;
            if s.dom != Type::Empty {
                return Err(c.side(format!("`{f}` does not start from 0")));
            }
            c.holds(f, Term::FromEmpty(s.cod), weak)
        }
        LocTuple | ConstCotuple => {
            c.expect(0, &["i", "t"])?;
            let i = c.index("i")?;
            let (t, _) = c.term("t")?;
            let (components, leg) = match (&t, rule) {
                (Term::LocTuple { components, .. }, LocTuple) => (
                    components,
                    theory.lookup(&i).ok_or_else(|| c.bad_inst("no lookup for the index"))?,
                ),
                (Term::ConstCotuple { components, .. }, ConstCotuple) => (
                    components,
                    theory.throw(&i).ok_or_else(|| c.bad_inst("no throw for the index"))?,
                ),
                _ => return Err(c.bad_inst("`t` must be a tuple of the matching kind")),
            };
            let fi = components
                .iter()
                .find(|(j, _)| *j == i)
                .map(|(_, f)| f.clone())
                .ok_or_else(|| c.bad_inst("index missing from the tuple"))?;
            let lhs = if rule == LocTuple {
                Term::comp(leg, t.clone())
            } else {
                Term::comp(t.clone(), leg)
            };
            c.holds(lhs, fi, weak)
        }
        LocTupleUnique | ConstCotupleUnique => {
            let legs = if rule == LocTupleUnique {
                theory.lookup_cone()
            } else {
                theory.throw_cocone()
            };
            c.expect(legs.len(), &["g"])?;
            let (g, gs) = c.term("g")?;
            let mut components = Vec::new();
            for (n, (i, leg)) in legs.iter().enumerate() {
                let e = c.eq(n, weak)?;
                let expected = if rule == LocTupleUnique {
                    Term::comp(leg.term(), g.clone())
                } else {
                    Term::comp(g.clone(), leg.term())
                };
                c.same(&e.lhs, &expected, &format!("premise {}", n + 1))?;
                components.push((i.clone(), e.rhs));
            }
            let tuple = if rule == LocTupleUnique {
                if gs.cod != Type::Unit {
                    return Err(c.bad_inst("`g` must land in 1"));
                }
                Term::LocTuple {
                    dom: gs.dom,
                    components,
                }
            } else {
                if gs.dom != Type::Empty {
                    return Err(c.bad_inst("`g` must start from 0"));
                }
                Term::ConstCotuple {
                    cod: gs.cod,
                    components,
                }
            };
            c.holds(g, tuple, Strong)
        }
        SemiprodP1 | SemiprodP2 | SemicoprodP1 | SemicoprodP2 => {
            c.expect(0, &["t"])?;
            let (t, s) = c.term("t")?;
            let product = matches!(rule, SemiprodP1 | SemiprodP2);
            let (left, right, pure_left) = match (&t, product) {
                (
                    Term::SemiProd {
                        left,
                        right,
                        pure_left,
                    },
                    true,
                )
                | (
                    Term::SemiCoprod {
                        left,
                        right,
                        pure_left,
                    },
                    false,
                ) => ((**left).clone(), (**right).clone(), *pure_left),
                _ => return Err(c.bad_inst("`t` must be a semi-pure (co)product")),
            };
            // P1 is the weak law on the pure side, P2 the strong one on the other.
            let on_pure = matches!(rule, SemiprodP1 | SemicoprodP1);
            let first = on_pure == pure_left;
            let f = if first { left } else { right };
            let kind = if on_pure { weak } else { Strong };
            if product {
                let (a, b) = c.prod_parts(&s.dom)?;
                let (cc, d) = c.prod_parts(&s.cod)?;
                let (p_out, p_in) = if first {
                    (Term::Proj1(cc, d), Term::Proj1(a, b))
                } else {
                    (Term::Proj2(cc, d), Term::Proj2(a, b))
                };
                c.holds(Term::comp(p_out, t), Term::comp(f, p_in), kind)
            } else {
                let (a, b) = c.coprod_parts(&s.dom)?;
                let (cc, d) = c.coprod_parts(&s.cod)?;
                let (i_in, i_out) = if first {
                    (Term::Inj1(a, b), Term::Inj1(cc, d))
                } else {
                    (Term::Inj2(a, b), Term::Inj2(cc, d))
                };
                c.holds(Term::comp(t, i_in), Term::comp(i_out, f), kind)
            }
        }
        SemiprodUnique | SemicoprodUnique => {
            c.expect(2, &["h", "t"])?;
            let (h, _) = c.term("h")?;
            let (t, _) = c.term("t")?;
            let p1 = apply_rule(
                theory,
                if rule == SemiprodUnique { SemiprodP1 } else { SemicoprodP1 },
                &[],
                &self::inst([("t", t.clone().into())]),
            )
            .map_err(|e| c.bad_inst(e.to_string()))?;
            let p2 = apply_rule(
                theory,
                if rule == SemiprodUnique { SemiprodP2 } else { SemicoprodP2 },
                &[],
                &self::inst([("t", t.clone().into())]),
            )
            .map_err(|e| c.bad_inst(e.to_string()))?;
            for (n, law) in [p1, p2].iter().enumerate() {
                let law = law.equation().expect("laws are equations");
                let want = Equation {
                    lhs: replace_subterm(&law.lhs, &t, &h),
                    rhs: law.rhs.clone(),
                    kind: law.kind,
                }
                .normalized();
                let got = c.eq(n, law.kind)?;
                if got != want {
                    return Err(c.shape(format!("premise {} must be `{want}`", n + 1)));
                }
            }
            c.holds(h, t, Strong)
        }
        TupleExists | SumCaseExists => {
            c.expect(0, &["g", "k"])?;
            let (g, _) = c.term("g")?;
            let (k, _) = c.term("k")?;
            let t = if rule == TupleExists {
                Term::tuple_prod(g, k)
            } else {
                Term::case_sum(g, k)
            };
            c.sig(&t)?;
            Ok(Judgment::WellFormed(t, Decoration::Modifier))
        }
        TupleWeak | SumCaseWeak | TupleUnit | SumCaseEmpty | TupleAcc | SumCaseProp => {
            c.expect(0, &["g", "k"])?;
            let (g, gs) = c.term("g")?;
            let (k, _) = c.term("k")?;
            let states_side = matches!(rule, TupleWeak | TupleUnit | TupleAcc);
            let t = if states_side {
                Term::tuple_prod(g.clone(), k.clone())
            } else {
                Term::case_sum(g.clone(), k.clone())
            };
            c.sig(&t)?;
            match rule {
                TupleWeak | SumCaseWeak => c.holds(t, g, weak),
                TupleUnit => c.holds(Term::comp(Term::ToUnit(gs.cod), t), k, Strong),
                SumCaseEmpty => c.holds(Term::comp(t, Term::FromEmpty(gs.dom)), k, Strong),
                _ => {
                    c.at_most(&k, Decoration::Accessor, "the effect part")?;
                    c.holds(t, g, Strong)
                }
            }
        }
        TupleUnique | SumCaseUnique => {
            c.expect(2, &[])?;
            let w = c.eq(0, weak)?;
            let s = c.eq(1, Strong)?;
            let h = w.lhs.clone();
            let hs = c.sig(&h)?;
            let expected = if rule == TupleUnique {
                Term::comp(Term::ToUnit(hs.cod), h.clone())
            } else {
                Term::comp(h.clone(), Term::FromEmpty(hs.dom))
            };
            c.same(&s.lhs, &expected, "premise 2")?;
            let t = if rule == TupleUnique {
                Term::tuple_prod(w.rhs, s.rhs)
            } else {
                Term::case_sum(w.rhs, s.rhs)
            };
            c.holds(h, t, Strong)
        }
        CoerceExists => {
            c.expect(0, &["k"])?;
            let (k, _) = c.term("k")?;
            Ok(Judgment::WellFormed(
                Term::coerce(k),
                c.level(Decoration::Accessor),
            ))
        }
        CoerceWeak => {
            c.expect(0, &["k"])?;
            let (k, _) = c.term("k")?;
            c.holds(Term::coerce(k.clone()), k, weak)
        }
        CoerceUnique => {
            c.expect(1, &[])?;
            let e = c.eq(0, weak)?;
            c.at_most(&e.lhs, Decoration::Accessor, "the coerced candidate")?;
            c.holds(e.lhs, Term::coerce(e.rhs), Strong)
        }
        BinprodProj1 | BinprodProj2 => {
            c.expect(0, &["f", "g"])?;
            let (f, fs) = c.term("f")?;
            let (g, gs) = c.term("g")?;
            let t = Term::pair(f.clone(), g.clone());
            c.sig(&t)?;
            if rule == BinprodProj1 {
                c.holds(Term::comp(Term::Proj1(fs.cod, gs.cod), t), f, Strong)
            } else {
                c.holds(Term::comp(Term::Proj2(fs.cod, gs.cod), t), g, Strong)
            }
        }
        PropcaseInl | PropcaseInr => {
            c.expect(0, &["f", "g"])?;
            let (f, fs) = c.term("f")?;
            let (g, gs) = c.term("g")?;
            let t = Term::prop_case(f.clone(), g.clone());
            c.sig(&t)?;
            if rule == PropcaseInl {
                c.holds(Term::comp(t, Term::Inj1(fs.dom, gs.dom)), f, Strong)
            } else {
                c.holds(Term::comp(t, Term::Inj2(fs.dom, gs.dom)), g, Strong)
            }
        }
        BinprodUnique | PropcaseUnique => {
            c.expect(2, &["h"])?;
            let (h, hs) = c.term("h")?;
            let a = c.eq(0, Strong)?;
            let b = c.eq(1, Strong)?;
            if rule == BinprodUnique {
                let (x, y) = c.prod_parts(&hs.cod)?;
                c.same(&a.lhs, &Term::comp(Term::Proj1(x.clone(), y.clone()), h.clone()), "premise 1")?;
                c.same(&b.lhs, &Term::comp(Term::Proj2(x, y), h.clone()), "premise 2")?;
                c.holds(h, Term::pair(a.rhs, b.rhs), Strong)
            } else {
                let (x, y) = c.coprod_parts(&hs.dom)?;
                c.same(&a.lhs, &Term::comp(h.clone(), Term::Inj1(x.clone(), y.clone())), "premise 1")?;
                c.same(&b.lhs, &Term::comp(h.clone(), Term::Inj2(x, y)), "premise 2")?;
                c.holds(h, Term::prop_case(a.rhs, b.rhs), Strong)
            }
        }
    }
}

/// Replaces every occurrence of `from` in `term` by `to`.
fn replace_subterm(term: &Term, from: &Term, to: &Term) -> Term {
    if term == from {
        return to.clone();
    }
    term.map_children(&mut |t| replace_subterm(t, from, to))
}

fn check_node(theory: &Theory, d: &Derivation) -> Result<(), KernelError> {
    let premises: Vec<Judgment> = d.premises.iter().map(|p| p.conclusion.clone()).collect();
    let got = match &d.step {
        Step::Rule(r) => apply_rule(theory, *r, &premises, &d.inst)?,
        Step::Axiom(n) => {
            if !d.premises.is_empty() || !d.inst.is_empty() {
                return Err(KernelError::BadAxiom("axiom leaves take no premises".into()));
            }
            let ax = theory
                .axioms
                .get(*n)
                .ok_or_else(|| KernelError::BadAxiom(format!("no axiom #{n}")))?;
            Judgment::Holds(ax.equation.normalized())
        }
        Step::Hypothesis(label) => {
            if !d.premises.is_empty() || !d.inst.is_empty() {
                return Err(KernelError::OpenHypothesis(label.clone()));
            }
            match &d.conclusion {
                Judgment::IsType(t) => theory.check_type(t)?,
                Judgment::WellFormed(t, level) => {
                    let s = check(theory, t)?;
                    if s.dec > *level {
                        return Err(KernelError::OpenHypothesis(label.clone()));
                    }
                }
                Judgment::Holds(_) => return Err(KernelError::OpenHypothesis(label.clone())),
            }
            d.conclusion.clone()
        }
    };
    let want = d.conclusion.normalized();
    if got.normalized() != want {
        return Err(KernelError::ConclusionMismatch {
            expected: got.to_string(),
            found: want.to_string(),
        });
    }
    Ok(())
}

/// Checks every node, premises before conclusions, left to right.
pub fn check_derivation(theory: &Theory, d: &Derivation) -> Report {
    fn go(theory: &Theory, d: &Derivation, path: &mut Vec<usize>) -> Result<usize, (Vec<usize>, KernelError)> {
        let mut n = 1;
        for (k, p) in d.premises.iter().enumerate() {
            path.push(k);
            n += go(theory, p, path)?;
            path.pop();
        }
        check_node(theory, d).map_err(|e| (path.clone(), e))?;
        Ok(n)
    }
    match go(theory, d, &mut Vec::new()) {
        Ok(nodes) => Report::Valid { nodes },
        Err((path, error)) => Report::Invalid { path, error },
    }
}

/// Convenience constructors that compute conclusions with [`apply_rule`].
#[derive(Clone, Copy)]
pub struct Prover<'a> {
    pub theory: &'a Theory,
}

impl<'a> Prover<'a> {
    pub fn new(theory: &'a Theory) -> Prover<'a> {
        Prover { theory }
    }

    pub fn rule(&self, rule: RuleId, premises: Vec<Derivation>, inst: Inst) -> Result<Derivation, KernelError> {
        let js: Vec<Judgment> = premises.iter().map(|p| p.conclusion.clone()).collect();
        let conclusion = apply_rule(self.theory, rule, &js, &inst)?;
        Ok(Derivation {
            conclusion,
            step: Step::Rule(rule),
            premises,
            inst,
        })
    }

    pub fn axiom(&self, label: &str) -> Result<Derivation, KernelError> {
        let (n, ax) = self
            .theory
            .axiom(label)
            .ok_or_else(|| KernelError::BadAxiom(format!("no axiom `{label}`")))?;
        Ok(Derivation {
            conclusion: Judgment::Holds(ax.equation.normalized()),
            step: Step::Axiom(n),
            premises: vec![],
            inst: Inst::new(),
        })
    }

    /// A typing leaf `t` at its inferred level.
    pub fn typed(&self, t: &Term) -> Result<Derivation, KernelError> {
        let s = check(self.theory, t)?;
        let level = if self.theory.flavor == Flavor::Plain {
            Decoration::Modifier
        } else {
            s.dec
        };
        let t = normalize_assoc(t);
        Ok(Derivation {
            step: Step::Hypothesis(t.to_string()),
            conclusion: Judgment::WellFormed(t, level),
            premises: vec![],
            inst: Inst::new(),
        })
    }

    pub fn refl(&self, t: &Term) -> Result<Derivation, KernelError> {
        self.rule(RuleId::EqRefl, vec![], inst([("f", t.clone().into())]))
    }

    pub fn wrefl(&self, t: &Term) -> Result<Derivation, KernelError> {
        self.rule(RuleId::WRefl, vec![], inst([("f", t.clone().into())]))
    }

    pub fn sym(&self, d: Derivation) -> Result<Derivation, KernelError> {
        let r = match d.equation().map(|e| e.kind) {
            Some(EqKind::Weak) => RuleId::WSym,
            _ => RuleId::EqSym,
        };
        self.rule(r, vec![d], Inst::new())
    }

    /// Chains equations of one kind with transitivity, left to right.
    pub fn trans(&self, ds: Vec<Derivation>) -> Result<Derivation, KernelError> {
        let mut it = ds.into_iter();
        let mut acc = it.next().expect("trans of nothing");
        for d in it {
            let r = match acc.equation().map(|e| e.kind) {
                Some(EqKind::Weak) => RuleId::WTrans,
                _ => RuleId::EqTrans,
            };
            acc = self.rule(r, vec![acc, d], Inst::new())?;
        }
        Ok(acc)
    }

    /// `g1 ∘ f ~ g2 ∘ f` with the substitution rule fitting kind and flavor.
    pub fn subs(&self, d: Derivation, f: &Term) -> Result<Derivation, KernelError> {
        let r = match (d.equation().map(|e| e.kind), self.theory.flavor) {
            (Some(EqKind::Weak), Flavor::Exceptions) => RuleId::WSubsPure,
            (Some(EqKind::Weak), _) => RuleId::WSubs,
            _ => RuleId::EqSubs,
        };
        self.rule(r, vec![d], inst([("f", f.clone().into())]))
    }

    /// `g ∘ f1 ~ g ∘ f2` with the replacement rule fitting kind and flavor.
    pub fn repl(&self, d: Derivation, g: &Term) -> Result<Derivation, KernelError> {
        let r = match (d.equation().map(|e| e.kind), self.theory.flavor) {
            (Some(EqKind::Weak), Flavor::Exceptions) => RuleId::WRepl,
            (Some(EqKind::Weak), _) => RuleId::WReplPure,
            _ => RuleId::EqRepl,
        };
        self.rule(r, vec![d], inst([("g", g.clone().into())]))
    }

    pub fn to_weak(&self, d: Derivation) -> Result<Derivation, KernelError> {
        self.rule(RuleId::SToW, vec![d], Inst::new())
    }

    pub fn to_strong(&self, d: Derivation) -> Result<Derivation, KernelError> {
        let r = if self.theory.flavor == Flavor::Exceptions {
            RuleId::WToSProp
        } else {
            RuleId::WToS
        };
        self.rule(r, vec![d], Inst::new())
    }

    /// `f ~ ⟨⟩` for `f` into 1.
    pub fn final_weak(&self, f: &Term) -> Result<Derivation, KernelError> {
        self.rule(RuleId::WFinal, vec![self.typed(f)?], Inst::new())
    }

    /// `f ~ []` for `f` out of 0.
    pub fn initial_weak(&self, f: &Term) -> Result<Derivation, KernelError> {
        self.rule(RuleId::WInitial, vec![self.typed(f)?], Inst::new())
    }
}

/// The three-node derivation of `f ≡ ⟨⟩_X` for an accessor `f : X → 1`.
pub fn derive_final_uniqueness(theory: &Theory, f: &Term) -> Result<Derivation, KernelError> {
    if theory.flavor != Flavor::States {
        return Err(KernelError::FlavorViolation {
            rule: RuleId::WFinal,
            flavor: theory.flavor,
        });
    }
    let s = check(theory, f)?;
    if s.dec == Decoration::Modifier {
        return Err(KernelError::NotAnAccessor(f.to_string()));
    }
    let p = Prover::new(theory);
    p.to_strong(p.final_weak(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::build_states_theory;

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(RuleId::parse(r.name()), Some(*r));
            assert_eq!(r.dual().dual(), *r);
        }
    }

    #[test]
    fn dual_rules_live_in_the_dual_flavor() {
        for r in RuleId::ALL {
            let f = r.flavors();
            let d = r.dual().flavors();
            assert_eq!(f.contains(&Flavor::States), d.contains(&Flavor::Exceptions), "{r}");
            assert_eq!(f.contains(&Flavor::Plain), d.contains(&Flavor::Plain), "{r}");
        }
    }

    #[test]
    fn weak_substitution_appends_on_the_right() {
        let th = build_states_theory(&["x"]).unwrap();
        let p = Prover::new(&th);
        let d = p.subs(p.axiom("A1_x").unwrap(), &th.lookup("x").unwrap()).unwrap();
        let l = th.lookup("x").unwrap();
        let u = th.update("x").unwrap();
        assert_eq!(
            d.conclusion,
            Judgment::Holds(Equation::weak(Term::seq(vec![l.clone(), u, l.clone()]), l))
        );
    }

    #[test]
    fn pure_replacement_rejects_a_modifier() {
        let th = build_states_theory(&["x"]).unwrap();
        let p = Prover::new(&th);
        let u = th.update("x").unwrap();
        let ax = p.axiom("A1_x").unwrap();
        let err = p.rule(RuleId::WReplPure, vec![ax], inst([("g", u.into())]));
        assert!(matches!(err, Err(KernelError::SideConditionViolated { .. })));
    }

    #[test]
    fn rules_of_the_other_flavor_are_refused() {
        let th = build_states_theory(&["x"]).unwrap();
        let p = Prover::new(&th);
        let ax = p.axiom("A1_x").unwrap();
        let err = p.rule(RuleId::WRepl, vec![ax], inst([("g", Term::Id(Type::Unit).into())]));
        assert!(matches!(err, Err(KernelError::FlavorViolation { .. })));
    }

    #[test]
    fn final_uniqueness_of_a_modifier_is_refused() {
        let th = build_states_theory(&["x"]).unwrap();
        let u = th.update("x").unwrap();
        assert!(matches!(
            derive_final_uniqueness(&th, &u),
            Err(KernelError::NotAnAccessor(_))
        ));
    }

    #[test]
    fn open_equational_hypotheses_are_invalid() {
        let th = build_states_theory(&["x"]).unwrap();
        let l = th.lookup("x").unwrap();
        let d = Derivation {
            conclusion: Judgment::Holds(Equation::strong(l.clone(), l)),
            step: Step::Hypothesis("h".into()),
            premises: vec![],
            inst: Inst::new(),
        };
        assert!(!check_derivation(&th, &d).is_valid());
    }
}
