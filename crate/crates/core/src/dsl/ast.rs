//! Script syntax. `Display` prints the concrete syntax back.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Decoration, EqKind, Flavor, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Pair,
    Copair,
    LSemi,
    RSemi,
    LCosemi,
    RCosemi,
    Case,
    Tuple,
}

impl BinOp {
    pub const ALL: [BinOp; 8] = [
        BinOp::Pair,
        BinOp::Copair,
        BinOp::LSemi,
        BinOp::RSemi,
        BinOp::LCosemi,
        BinOp::RCosemi,
        BinOp::Case,
        BinOp::Tuple,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            BinOp::Pair => "pair",
            BinOp::Copair => "copair",
            BinOp::LSemi => "lsemi",
            BinOp::RSemi => "rsemi",
            BinOp::LCosemi => "lcosemi",
            BinOp::RCosemi => "rcosemi",
            BinOp::Case => "case",
            BinOp::Tuple => "tuple",
        }
    }

    fn separator(self) -> &'static str {
        match self {
            BinOp::Case | BinOp::Tuple => " | ",
            _ => ", ",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypedOp {
    Proj1,
    Proj2,
    Inj1,
    Inj2,
}

impl TypedOp {
    pub const ALL: [TypedOp; 4] = [TypedOp::Proj1, TypedOp::Proj2, TypedOp::Inj1, TypedOp::Inj2];

    pub fn keyword(self) -> &'static str {
        match self {
            TypedOp::Proj1 => "pi1",
            TypedOp::Proj2 => "pi2",
            TypedOp::Inj1 => "in1",
            TypedOp::Inj2 => "in2",
        }
    }
}

/// A term as written, before name resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Name(String),
    Id(Type),
    ToUnit(Type),
    FromEmpty(Type),
    Typed(TypedOp, Type, Type),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Coerce(Box<Expr>),
    LocTuple(Type, Vec<(String, Expr)>),
    Cotuple(Type, Vec<(String, Expr)>),
    /// `a . b . c`, at least two factors.
    Comp(Vec<Expr>),
    /// `raise(i)` or `raise(i, Y)`
    Raise(String, Option<Type>),
    /// `try body catch(i => g, _ => k)`
    Try {
        body: Box<Expr>,
        clauses: Vec<(String, Expr)>,
        catch_all: Option<Box<Expr>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqExpr {
    pub lhs: Expr,
    pub kind: EqKind,
    pub rhs: Expr,
}

/// Literal element, possibly an exception `t_i(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lit {
    Int(u32),
    Unit,
    Pair(Box<Lit>, Box<Lit>),
    Inl(Box<Lit>),
    Inr(Box<Lit>),
    Exc(String, u32),
}

/// `input [@ state] -> output [@ state]`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub input: Lit,
    pub state: Option<Vec<u32>>,
    pub output: Lit,
    pub state_out: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoryBase {
    Builtin(Flavor, Vec<(String, u32)>),
    Dual(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoryItem {
    Generator {
        name: String,
        dom: Type,
        cod: Type,
        dec: Decoration,
        /// Spelling of the decoration keyword.
        word: String,
    },
    Axiom {
        label: String,
        eq: EqExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelItem {
    Carrier(String, u32),
    Table(String, Vec<TableEntry>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepRule {
    Axiom(String),
    Rule(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arg {
    Term(Expr),
    Type(Type),
    Index(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub label: String,
    pub rule: StepRule,
    pub args: Vec<(String, Arg)>,
    pub from: Vec<String>,
}

/// An equation given inline or by the name of an `equation` declaration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqRef {
    Named(String),
    Inline(EqExpr),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    Lemma {
        name: String,
        params: Vec<String>,
        theory: String,
    },
    CheckProof {
        name: String,
        theory: Option<String>,
    },
    Verify {
        suite: String,
        theory: String,
    },
    Check {
        eq: EqRef,
        theory: String,
    },
    Prove {
        eq: EqRef,
        theory: String,
        budget: Option<usize>,
    },
    Eval {
        theory: String,
        term: Expr,
        input: Lit,
        state: Option<Vec<u32>>,
    },
    Erase(String),
    Expand(String),
    Dualize(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decl {
    Theory {
        name: String,
        base: TheoryBase,
        items: Vec<TheoryItem>,
    },
    Let {
        name: String,
        expr: Expr,
    },
    Equation {
        name: String,
        eq: EqExpr,
    },
    Model {
        theory: String,
        items: Vec<ModelItem>,
    },
    Proof {
        name: String,
        theory: String,
        steps: Vec<ProofStep>,
        proves: Option<EqExpr>,
    },
    Command(Command),
}

/// A parsed script; `lines` holds the source line of each declaration.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Script {
    pub decls: Vec<Decl>,
    pub lines: Vec<usize>,
}

/// Scripts compare by their declarations only.
impl PartialEq for Script {
    fn eq(&self, other: &Script) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Script {}

impl Expr {
    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Expr::Name(n) => f.write_str(n),
            Expr::Id(t) => write!(f, "id[{t}]"),
            Expr::ToUnit(t) => write!(f, "<>[{t}]"),
            Expr::FromEmpty(t) => write!(f, "[][{t}]"),
            Expr::Typed(op, a, b) => write!(f, "{}[{a}, {b}]", op.keyword()),
            Expr::Bin(op, a, b) => write!(f, "{}({a}{}{b})", op.keyword(), op.separator()),
            Expr::Coerce(k) => write!(f, "coerce({k})"),
            Expr::LocTuple(t, cs) => {
                write!(f, "loctuple[{t}](")?;
                components(f, cs)?;
                f.write_str(")")
            }
            Expr::Cotuple(t, cs) => {
                write!(f, "cotuple[{t}](")?;
                components(f, cs)?;
                f.write_str(")")
            }
            Expr::Comp(fs) => {
                if nested {
                    f.write_str("(")?;
                }
                for (n, x) in fs.iter().enumerate() {
                    if n > 0 {
                        f.write_str(" . ")?;
                    }
                    x.fmt_in(f, true)?;
                }
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Raise(i, None) => write!(f, "raise({i})"),
            Expr::Raise(i, Some(t)) => write!(f, "raise({i}, {t})"),
            Expr::Try {
                body,
                clauses,
                catch_all,
            } => {
                // The body is delimited by `catch`, but a try inside a
                // composition must not swallow the factors after it.
                if nested {
                    f.write_str("(")?;
                }
                write!(f, "try {body} catch(")?;
                for (n, (i, g)) in clauses.iter().enumerate() {
                    if n > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{i} => {g}")?;
                }
                if let Some(k) = catch_all {
                    if !clauses.is_empty() {
                        f.write_str(", ")?;
                    }
                    write!(f, "_ => {k}")?;
                }
                f.write_str(")")?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn components(f: &mut fmt::Formatter<'_>, cs: &[(String, Expr)]) -> fmt::Result {
    for (n, (i, t)) in cs.iter().enumerate() {
        if n > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{i}: {t}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, false)
    }
}

impl fmt::Display for EqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.kind.symbol(), self.rhs)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Int(n) => write!(f, "{n}"),
            Lit::Unit => f.write_str("()"),
            Lit::Pair(a, b) => write!(f, "({a}, {b})"),
            Lit::Inl(a) => write!(f, "inl({a})"),
            Lit::Inr(b) => write!(f, "inr({b})"),
            Lit::Exc(i, a) => write!(f, "t_{i}({a})"),
        }
    }
}

fn state(f: &mut fmt::Formatter<'_>, s: &[u32]) -> fmt::Result {
    f.write_str(" @ (")?;
    for (n, v) in s.iter().enumerate() {
        if n > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    f.write_str(")")
}

impl fmt::Display for TableEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.input)?;
        if let Some(s) = &self.state {
            state(f, s)?;
        }
        write!(f, " -> {}", self.output)?;
        if let Some(s) = &self.state_out {
            state(f, s)?;
        }
        Ok(())
    }
}

fn flavor_word(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::States => "states",
        Flavor::Exceptions => "exceptions",
        Flavor::Plain => "plain",
    }
}

impl fmt::Display for TheoryBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryBase::Dual(n) => write!(f, "dual({n})"),
            TheoryBase::Builtin(flavor, ix) => {
                write!(f, "{}(", flavor_word(*flavor))?;
                for (n, (i, k)) in ix.iter().enumerate() {
                    if n > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{i}: {k}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for TheoryItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryItem::Generator {
                name, dom, cod, word, ..
            } => write!(f, "{word} {name} : {dom} -> {cod}"),
            TheoryItem::Axiom { label, eq } => write!(f, "axiom {label} : {eq}"),
        }
    }
}

impl fmt::Display for ModelItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelItem::Carrier(n, k) => write!(f, "carrier {n} = {k}"),
            ModelItem::Table(g, entries) => {
                writeln!(f, "table {g} {{")?;
                for e in entries {
                    writeln!(f, "    {e}")?;
                }
                f.write_str("  }")
            }
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Term(t) => write!(f, "{t}"),
            Arg::Type(t) => write!(f, "type {t}"),
            Arg::Index(i) => write!(f, "index {i}"),
        }
    }
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        match &self.rule {
            StepRule::Axiom(a) => write!(f, "axiom {a}")?,
            StepRule::Rule(r) => {
                write!(f, "{r}(")?;
                for (n, (k, v)) in self.args.iter().enumerate() {
                    if n > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k} = {v}")?;
                }
                f.write_str(")")?;
            }
        }
        if !self.from.is_empty() {
            write!(f, " from {}", self.from.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Display for EqRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqRef::Named(n) => f.write_str(n),
            EqRef::Inline(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Lemma { name, params, theory } => {
                write!(f, "lemma {name}({}) in {theory}", params.join(", "))
            }
            Command::CheckProof { name, theory: None } => write!(f, "check proof {name}"),
            Command::CheckProof {
                name,
                theory: Some(t),
            } => write!(f, "check proof {name} in {t}"),
            Command::Verify { suite, theory } => write!(f, "verify {suite} in {theory}"),
            Command::Check { eq, theory } => write!(f, "check {eq} in {theory}"),
            Command::Prove { eq, theory, budget } => {
                write!(f, "prove {eq} in {theory}")?;
                if let Some(b) = budget {
                    write!(f, " budget {b}")?;
                }
                Ok(())
            }
            Command::Eval {
                theory,
                term,
                input,
                state: s,
            } => {
                write!(f, "eval in {theory}: {term} on {input}")?;
                if let Some(s) = s {
                    state(f, s)?;
                }
                Ok(())
            }
            Command::Erase(t) => write!(f, "erase {t}"),
            Command::Expand(t) => write!(f, "expand {t}"),
            Command::Dualize(t) => write!(f, "dualize {t}"),
        }
    }
}

fn block<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    if items.is_empty() {
        return Ok(());
    }
    f.write_str(" {\n")?;
    for it in items {
        writeln!(f, "  {it}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Theory { name, base, items } => {
                write!(f, "theory {name} = {base}")?;
                block(f, items)
            }
            Decl::Let { name, expr } => write!(f, "let {name} = {expr}"),
            Decl::Equation { name, eq } => write!(f, "equation {name} : {eq}"),
            Decl::Model { theory, items } => {
                writeln!(f, "model {theory} {{")?;
                for it in items {
                    writeln!(f, "  {it}")?;
                }
                f.write_str("}")
            }
            Decl::Proof {
                name,
                theory,
                steps,
                proves,
            } => {
                write!(f, "proof {name} in {theory}")?;
                if let Some(e) = proves {
                    write!(f, " proves {e}")?;
                }
                f.write_str(" {\n")?;
                for s in steps {
                    writeln!(f, "  {s}")?;
                }
                f.write_str("}")
            }
            Decl::Command(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
