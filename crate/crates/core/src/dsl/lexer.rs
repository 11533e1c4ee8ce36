use logos::Logos;

#[derive(Logos, Clone, Debug, PartialEq, Eq)]
#[logos(skip r"[ \t\r\n\f]+")]
#[logos(skip r"#[^\n]*")]
pub enum Tok {
    // Rule names such as `0-to-1` start with a digit.
    #[regex(r"[A-Za-z_~][A-Za-z0-9_']*(-[A-Za-z0-9_']+)*", |l| l.slice().to_string())]
    #[regex(r"[0-9]+(-[A-Za-z0-9_']+)+", |l| l.slice().to_string())]
    Ident(String),
    #[regex(r"[0-9]+", |l| l.slice().parse::<u32>().ok())]
    Int(u32),
    #[token("==")]
    Strong,
    #[token("~~")]
    Weak,
    #[token("->")]
    Arrow,
    #[token("=>")]
    FatArrow,
    #[token("=")]
    Eq,
    #[token(":")]
    Colon,
    #[token(",")]
    Comma,
    #[token(".")]
    Dot,
    #[token("(")]
    LParen,
    #[token(")")]
    RParen,
    #[token("[]")]
    Brackets,
    #[token("<>")]
    Angles,
    #[token("[")]
    LBracket,
    #[token("]")]
    RBracket,
    #[token("{")]
    LBrace,
    #[token("}")]
    RBrace,
    #[token("|")]
    Bar,
    #[token("*")]
    Star,
    #[token("+")]
    Plus,
    #[token("@")]
    At,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Strong => "==",
            Tok::Weak => "~~",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Eq => "=",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Brackets => "[]",
            Tok::Angles => "<>",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Bar => "|",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::At => "@",
            Tok::Ident(_) | Tok::Int(_) => "",
        }
    }
}

/// A token with its 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits `src` into tokens, or reports the position of the first bad character.
pub fn lex(src: &str) -> Result<Vec<Spanned>, (usize, usize)> {
    let starts: Vec<usize> = std::iter::once(0)
        .chain(src.match_indices('\n').map(|(i, _)| i + 1))
        .collect();
    let pos = |offset: usize| {
        let line = starts.partition_point(|&s| s <= offset);
        let col = src[starts[line - 1]..offset].chars().count() + 1;
        (line, col)
    };
    let mut out = Vec::new();
    let mut lexer = Tok::lexer(src);
    while let Some(t) = lexer.next() {
        let (line, col) = pos(lexer.span().start);
        match t {
            Ok(tok) => out.push(Spanned { tok, line, col }),
            Err(()) => return Err((line, col)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn rule_names_and_arrows() {
        assert_eq!(
            toks("0-to-1 w-subs X->Y 12"),
            [
                Tok::Ident("0-to-1".into()),
                Tok::Ident("w-subs".into()),
                Tok::Ident("X".into()),
                Tok::Arrow,
                Tok::Ident("Y".into()),
                Tok::Int(12)
            ]
        );
        assert_eq!(toks("[][Y] <>[1]")[..2], [Tok::Brackets, Tok::LBracket]);
    }

    #[test]
    fn positions_skip_comments() {
        let t = lex("# note\n  theory").unwrap();
        assert_eq!((t[0].line, t[0].col), (2, 3));
        assert_eq!(lex("a\n  $"), Err((2, 3)));
    }
}
