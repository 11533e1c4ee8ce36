use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{lex, Spanned, Tok};
use super::DslError;
use crate::syntax::{Decoration, EqKind, Flavor, Type};

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    theories: BTreeSet<String>,
    equations: BTreeSet<String>,
    proofs: BTreeSet<String>,
}

type P<T> = Result<T, DslError>;
type Clauses = (Vec<(String, Expr)>, Option<Box<Expr>>);

/// Parses a whole script.
pub fn parse_script(src: &str) -> P<Script> {
    let toks = lex(src).map_err(|(line, col)| DslError::Syntax {
        line,
        col,
        expected: "a token".into(),
        found: "an unexpected character".into(),
    })?;
    let mut p = Parser {
        toks,
        pos: 0,
        theories: BTreeSet::new(),
        equations: BTreeSet::new(),
        proofs: BTreeSet::new(),
    };
    let mut script = Script::default();
    while p.pos < p.toks.len() {
        let line = p.toks[p.pos].line;
        script.decls.push(p.decl()?);
        script.lines.push(line);
    }
    Ok(script)
}

/// Parses a single term.
pub fn parse_term(src: &str) -> P<Expr> {
    let mut p = Parser::bare(src)?;
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

/// Parses a single type.
pub fn parse_type(src: &str) -> P<Type> {
    let mut p = Parser::bare(src)?;
    let t = p.ty()?;
    p.end()?;
    Ok(t)
}

const DECORATIONS: &[&str] = &["pure", "accessor", "modifier", "propagator", "catcher"];

impl Parser {
    fn bare(src: &str) -> P<Parser> {
        let toks = lex(src).map_err(|(line, col)| DslError::Syntax {
            line,
            col,
            expected: "a token".into(),
            found: "an unexpected character".into(),
        })?;
        Ok(Parser {
            toks,
            pos: 0,
            theories: BTreeSet::new(),
            equations: BTreeSet::new(),
            proofs: BTreeSet::new(),
        })
    }

    fn end(&self) -> P<()> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some(_) => Err(self.error("end of input")),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn position(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn error(&self, expected: &str) -> DslError {
        let (line, col) = self.position();
        DslError::Syntax {
            line,
            col,
            expected: expected.to_string(),
            found: self
                .peek()
                .map_or_else(|| "end of input".to_string(), Tok::describe),
        }
    }

    fn name_error(&self, kind: &str, name: &str) -> DslError {
        let (line, col) = self.position();
        DslError::Name {
            line,
            col,
            kind: kind.to_string(),
            name: name.to_string(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> P<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(&t.describe()))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, w: &str) -> P<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.error(&format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> P<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("a name")),
        }
    }

    fn int(&mut self) -> P<u32> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("a number")),
        }
    }

    fn theory_ref(&mut self) -> P<String> {
        let n = self.ident()?;
        if !self.theories.contains(&n) {
            self.pos -= 1;
            return Err(self.name_error("theory", &n));
        }
        Ok(n)
    }

    fn decl(&mut self) -> P<Decl> {
        let Some(Tok::Ident(kw)) = self.peek().cloned() else {
            return Err(self.error("a declaration"));
        };
        self.pos += 1;
        match kw.as_str() {
            "theory" => self.theory(),
            "let" => {
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                Ok(Decl::Let {
                    name,
                    expr: self.term()?,
                })
            }
            "equation" => {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let eq = self.equation()?;
                self.equations.insert(name.clone());
                Ok(Decl::Equation { name, eq })
            }
            "model" => self.model(),
            "proof" => self.proof(),
            "lemma" | "check" | "verify" | "prove" | "eval" | "erase" | "expand" | "dualize" => {
                Ok(Decl::Command(self.command(&kw)?))
            }
            _ => {
                self.pos -= 1;
                Err(self.error("a declaration"))
            }
        }
    }

    fn theory(&mut self) -> P<Decl> {
        let name = self.ident()?;
        if self.theories.contains(&name) {
            self.pos -= 1;
            return Err(self.name_error("duplicate theory", &name));
        }
        self.expect(Tok::Eq)?;
        let kind = self.ident()?;
        let base = match kind.as_str() {
            "dual" => {
                self.expect(Tok::LParen)?;
                let n = self.theory_ref()?;
                self.expect(Tok::RParen)?;
                TheoryBase::Dual(n)
            }
            "states" | "exceptions" | "plain" => {
                let flavor = match kind.as_str() {
                    "states" => Flavor::States,
                    "exceptions" => Flavor::Exceptions,
                    _ => Flavor::Plain,
                };
                self.expect(Tok::LParen)?;
                let mut ix = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        let i = self.ident()?;
                        self.expect(Tok::Colon)?;
                        ix.push((i, self.int()?));
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                TheoryBase::Builtin(flavor, ix)
            }
            _ => {
                self.pos -= 1;
                return Err(self.error("`states`, `exceptions`, `plain` or `dual`"));
            }
        };
        let mut items = Vec::new();
        if self.eat(&Tok::LBrace) {
            while !self.eat(&Tok::RBrace) {
                items.push(self.theory_item()?);
            }
        }
        self.theories.insert(name.clone());
        Ok(Decl::Theory { name, base, items })
    }

    fn theory_item(&mut self) -> P<TheoryItem> {
        let w = self.ident()?;
        if w == "axiom" {
            let label = self.ident()?;
            self.expect(Tok::Colon)?;
            return Ok(TheoryItem::Axiom {
                label,
                eq: self.equation()?,
            });
        }
        let Some(dec) = DECORATIONS.contains(&w.as_str()).then(|| Decoration::parse(&w)).flatten() else {
            self.pos -= 1;
            return Err(self.error("a decoration or `axiom`"));
        };
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let dom = self.ty()?;
        self.expect(Tok::Arrow)?;
        let cod = self.ty()?;
        Ok(TheoryItem::Generator {
            name,
            dom,
            cod,
            dec,
            word: w,
        })
    }

    fn model(&mut self) -> P<Decl> {
        let theory = self.theory_ref()?;
        self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if self.eat_word("carrier") {
                let n = self.ident()?;
                self.expect(Tok::Eq)?;
                items.push(ModelItem::Carrier(n, self.int()?));
            } else if self.eat_word("table") {
                let g = self.ident()?;
                self.expect(Tok::LBrace)?;
                let mut entries = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    entries.push(self.entry()?);
                    self.eat(&Tok::Comma);
                }
                items.push(ModelItem::Table(g, entries));
            } else {
                return Err(self.error("`carrier` or `table`"));
            }
        }
        Ok(Decl::Model { theory, items })
    }

    fn entry(&mut self) -> P<TableEntry> {
        let input = self.lit()?;
        let state = if self.eat(&Tok::At) { Some(self.state()?) } else { None };
        self.expect(Tok::Arrow)?;
        let output = self.lit()?;
        let state_out = if self.eat(&Tok::At) { Some(self.state()?) } else { None };
        Ok(TableEntry {
            input,
            state,
            output,
            state_out,
        })
    }

    fn state(&mut self) -> P<Vec<u32>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.int()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn lit(&mut self) -> P<Lit> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Lit::Int(n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                if self.eat(&Tok::RParen) {
                    return Ok(Lit::Unit);
                }
                let a = self.lit()?;
                self.expect(Tok::Comma)?;
                let b = self.lit()?;
                self.expect(Tok::RParen)?;
                Ok(Lit::Pair(Box::new(a), Box::new(b)))
            }
            Some(Tok::Ident(w)) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let out = match w.as_str() {
                    "inl" => Lit::Inl(Box::new(self.lit()?)),
                    "inr" => Lit::Inr(Box::new(self.lit()?)),
                    _ => match w.strip_prefix("t_") {
                        Some(i) => Lit::Exc(i.to_string(), self.int()?),
                        None => {
                            self.pos -= 2;
                            return Err(self.error("an element"));
                        }
                    },
                };
                self.expect(Tok::RParen)?;
                Ok(out)
            }
            _ => Err(self.error("an element")),
        }
    }

    fn proof(&mut self) -> P<Decl> {
        let name = self.ident()?;
        self.word("in")?;
        let theory = self.theory_ref()?;
        let proves = if self.eat_word("proves") { Some(self.equation()?) } else { None };
        self.expect(Tok::LBrace)?;
        let mut steps = Vec::new();
        let mut labels = BTreeSet::new();
        while !self.eat(&Tok::RBrace) {
            let label = self.ident()?;
            self.expect(Tok::Colon)?;
            let rule = if self.eat_word("axiom") {
                StepRule::Axiom(self.ident()?)
            } else {
                StepRule::Rule(self.ident()?)
            };
            let mut args = Vec::new();
            if matches!(rule, StepRule::Rule(_)) && self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                loop {
                    let k = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let v = if self.eat_word("type") {
                        Arg::Type(self.ty()?)
                    } else if self.eat_word("index") {
                        Arg::Index(self.ident()?)
                    } else {
                        Arg::Term(self.term()?)
                    };
                    args.push((k, v));
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            let mut from = Vec::new();
            if self.eat_word("from") {
                while matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) != Some(&Tok::Colon) {
                    let l = self.ident()?;
                    if !labels.contains(&l) {
                        self.pos -= 1;
                        return Err(self.name_error("step", &l));
                    }
                    from.push(l);
                }
            }
            labels.insert(label.clone());
            steps.push(ProofStep {
                label,
                rule,
                args,
                from,
            });
        }
        if steps.is_empty() {
            return Err(self.error("a proof step"));
        }
        self.proofs.insert(name.clone());
        Ok(Decl::Proof {
            name,
            theory,
            steps,
            proves,
        })
    }

    fn eq_ref(&mut self) -> P<EqRef> {
        if let (Some(Tok::Ident(n)), Some(Tok::Ident(w))) = (self.peek(), self.peek_at(1)) {
            if w == "in" {
                let n = n.clone();
                if !self.equations.contains(&n) {
                    return Err(self.name_error("equation", &n));
                }
                self.pos += 1;
                return Ok(EqRef::Named(n));
            }
        }
        Ok(EqRef::Inline(self.equation()?))
    }

    fn command(&mut self, kw: &str) -> P<Command> {
        Ok(match kw {
            "lemma" => {
                let name = self.ident()?;
                let mut params = Vec::new();
                if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                    loop {
                        params.push(match self.peek() {
                            Some(Tok::Int(n)) => {
                                let n = n.to_string();
                                self.pos += 1;
                                n
                            }
                            _ => self.ident()?,
                        });
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                self.word("in")?;
                Command::Lemma {
                    name,
                    params,
                    theory: self.theory_ref()?,
                }
            }
            "check" => {
                if self.eat_word("proof") {
                    let name = self.ident()?;
                    let theory = if self.eat_word("in") { Some(self.theory_ref()?) } else { None };
                    if theory.is_none() && !self.proofs.contains(&name) {
                        self.pos -= 1;
                        return Err(self.name_error("proof", &name));
                    }
                    Command::CheckProof { name, theory }
                } else {
                    let eq = self.eq_ref()?;
                    self.word("in")?;
                    Command::Check {
                        eq,
                        theory: self.theory_ref()?,
                    }
                }
            }
            "verify" => {
                let suite = self.ident()?;
                self.word("in")?;
                Command::Verify {
                    suite,
                    theory: self.theory_ref()?,
                }
            }
            "prove" => {
                let eq = self.eq_ref()?;
                self.word("in")?;
                let theory = self.theory_ref()?;
                let budget = if self.eat_word("budget") { Some(self.int()? as usize) } else { None };
                Command::Prove { eq, theory, budget }
            }
            "eval" => {
                self.word("in")?;
                let theory = self.theory_ref()?;
                self.expect(Tok::Colon)?;
                let term = self.term()?;
                self.word("on")?;
                let input = self.lit()?;
                let state = if self.eat(&Tok::At) { Some(self.state()?) } else { None };
                Command::Eval {
                    theory,
                    term,
                    input,
                    state,
                }
            }
            "erase" => Command::Erase(self.theory_ref()?),
            "expand" => Command::Expand(self.theory_ref()?),
            _ => Command::Dualize(self.theory_ref()?),
        })
    }

    fn equation(&mut self) -> P<EqExpr> {
        let lhs = self.term()?;
        let kind = if self.eat(&Tok::Strong) {
            EqKind::Strong
        } else if self.eat(&Tok::Weak) {
            EqKind::Weak
        } else {
            return Err(self.error("`==` or `~~`"));
        };
        Ok(EqExpr {
            lhs,
            kind,
            rhs: self.term()?,
        })
    }

    fn ty(&mut self) -> P<Type> {
        let mut t = self.ty_prod()?;
        while self.eat(&Tok::Plus) {
            t = Type::coprod(t, self.ty_prod()?);
        }
        Ok(t)
    }

    fn ty_prod(&mut self) -> P<Type> {
        let mut t = self.ty_atom()?;
        while self.eat(&Tok::Star) {
            t = Type::prod(t, self.ty_atom()?);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> P<Type> {
        match self.peek().cloned() {
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(Type::Unit)
            }
            Some(Tok::Int(0)) => {
                self.pos += 1;
                Ok(Type::Empty)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(n)) => {
                self.pos += 1;
                Ok(if let Some(i) = n.strip_prefix("V_") {
                    Type::value(i)
                } else if let Some(i) = n.strip_prefix("P_") {
                    Type::param(i)
                } else {
                    Type::named(&n)
                })
            }
            _ => Err(self.error("a type")),
        }
    }

    fn bracket_type(&mut self) -> P<Type> {
        self.expect(Tok::LBracket)?;
        let t = self.ty()?;
        self.expect(Tok::RBracket)?;
        Ok(t)
    }

    fn term(&mut self) -> P<Expr> {
        let first = self.factor()?;
        if self.peek() != Some(&Tok::Dot) {
            return Ok(first);
        }
        let mut fs = vec![first];
        while self.eat(&Tok::Dot) {
            fs.push(self.factor()?);
        }
        Ok(Expr::Comp(fs))
    }

    fn components(&mut self) -> P<Vec<(String, Expr)>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            let i = self.ident()?;
            self.expect(Tok::Colon)?;
            out.push((i, self.term()?));
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    /// Handler clauses up to and including the closing parenthesis.
    fn clauses(&mut self) -> P<Clauses> {
        let mut clauses = Vec::new();
        let mut catch_all = None;
        loop {
            let i = self.ident()?;
            self.expect(Tok::FatArrow)?;
            let g = self.term()?;
            if i == "_" {
                catch_all = Some(Box::new(g));
                self.expect(Tok::RParen)?;
                return Ok((clauses, catch_all));
            }
            clauses.push((i, g));
            if self.eat(&Tok::RParen) {
                return Ok((clauses, catch_all));
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn factor(&mut self) -> P<Expr> {
        let next = self.peek_at(1).cloned();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Angles) => {
                self.pos += 1;
                Ok(Expr::ToUnit(self.bracket_type()?))
            }
            Some(Tok::Brackets) => {
                self.pos += 1;
                Ok(Expr::FromEmpty(self.bracket_type()?))
            }
            Some(Tok::Ident(w)) => {
                self.pos += 1;
                let paren = next == Some(Tok::LParen);
                let bracket = next == Some(Tok::LBracket);
                if w == "id" && bracket {
                    return Ok(Expr::Id(self.bracket_type()?));
                }
                if let Some(op) = TypedOp::ALL.into_iter().find(|o| o.keyword() == w).filter(|_| bracket) {
                    self.expect(Tok::LBracket)?;
                    let a = self.ty()?;
                    self.expect(Tok::Comma)?;
                    let b = self.ty()?;
                    self.expect(Tok::RBracket)?;
                    return Ok(Expr::Typed(op, a, b));
                }
                if let Some(op) = BinOp::ALL.into_iter().find(|o| o.keyword() == w).filter(|_| paren) {
                    self.expect(Tok::LParen)?;
                    let a = self.term()?;
                    if matches!(op, BinOp::Case | BinOp::Tuple) {
                        self.expect(Tok::Bar)?;
                    } else {
                        self.expect(Tok::Comma)?;
                    }
                    let b = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Bin(op, Box::new(a), Box::new(b)));
                }
                match w.as_str() {
                    "coerce" if paren => {
                        self.expect(Tok::LParen)?;
                        let k = self.term()?;
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Coerce(Box::new(k)))
                    }
                    "loctuple" | "cotuple" if bracket => {
                        let t = self.bracket_type()?;
                        let cs = self.components()?;
                        Ok(if w == "loctuple" {
                            Expr::LocTuple(t, cs)
                        } else {
                            Expr::Cotuple(t, cs)
                        })
                    }
                    "raise" if paren => {
                        self.expect(Tok::LParen)?;
                        let i = self.ident()?;
                        let t = if self.eat(&Tok::Comma) { Some(self.ty()?) } else { None };
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Raise(i, t))
                    }
                    "try" => {
                        let body = self.term()?;
                        self.word("catch")?;
                        self.expect(Tok::LParen)?;
                        let (clauses, catch_all) = self.clauses()?;
                        Ok(Expr::Try {
                            body: Box::new(body),
                            clauses,
                            catch_all,
                        })
                    }
                    "handle" if paren => {
                        self.expect(Tok::LParen)?;
                        let body = self.term()?;
                        self.expect(Tok::Comma)?;
                        let (clauses, catch_all) = self.clauses()?;
                        Ok(Expr::Try {
                            body: Box::new(body),
                            clauses,
                            catch_all,
                        })
                    }
                    _ => Ok(Expr::Name(w)),
                }
            }
            _ => Err(self.error("a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_print_as_parsed() {
        for src in [
            "l_x . u_x . l_x",
            "case(id[Y] | case(g | h . c_j) . c_i) . f",
            "pair(l_x, l_y . <>[V_x] . l_x)",
            "a . (b . c)",
            "try f catch(i => g, j => h)",
            "(try f catch(i => g)) . k",
            "try try f catch(i => g) catch(j => h, _ => k)",
            "pi1[V_x * St, 1 + P_i]",
            "loctuple[1](x: l_x, y: l_y)",
            "raise(i, Y) . [][P_i]",
        ] {
            let t = parse_term(src).unwrap();
            assert_eq!(t.to_string(), src);
            assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn handle_is_try() {
        assert_eq!(
            parse_term("handle(raise(i), i => g)").unwrap(),
            parse_term("try raise(i) catch(i => g)").unwrap()
        );
    }

    #[test]
    fn types_associate_like_the_printer() {
        let t = parse_type("V_x * St + 0").unwrap();
        assert_eq!(t, Type::coprod(Type::prod(Type::value("x"), Type::named("St")), Type::Empty));
        assert_eq!(t.to_string(), "V_x * St + 0");
        let u = parse_type("(1 + P_i) * X").unwrap();
        assert_eq!(parse_type(&u.to_string()).unwrap(), u);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_script("theory S = states(x:3)\nlemma annihilation(x) in T").unwrap_err();
        assert!(matches!(e, DslError::Name { line: 2, col: 26, .. }), "{e}");
        let e = parse_script("theory S = states(x 3)").unwrap_err();
        assert!(matches!(e, DslError::Syntax { line: 1, col: 21, .. }), "{e}");
    }
}
