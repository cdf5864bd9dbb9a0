use crate::error::{Error, Pos, Result};

pub const RESERVED: [&str; 18] = [
    "forall", "forAll", "exists", "sum", "such", "that", "letting", "given", "where", "find",
    "language", "int", "bool", "union", "intersect", "in", "false", "true",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Keyword(String),
    Ident(String),
    Int(i64),
    /// Operators and punctuation, stored as their source text.
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub pos: Pos,
}

impl Token {
    pub fn text(&self) -> String {
        match &self.kind {
            TokKind::Keyword(s) | TokKind::Ident(s) => s.clone(),
            TokKind::Int(v) => v.to_string(),
            TokKind::Sym(s) => (*s).to_string(),
            TokKind::Eof => "end of input".to_string(),
        }
    }
}

// Longest first so that the first match is the maximal munch.
const SYMBOLS: [&str; 32] = [
    "<=lex", ">=lex", "<lex", ">lex", "<->", "->", "**", "!=", "<=", ">=", "/\\", "\\/", "..",
    "=", "<", ">", "+", "-", "*", "/", "%", "!", "|", "(", ")", "[", "]", ",", ":", ";", ".",
    "'",
];

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '$' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let kind = if is_reserved(&word) { TokKind::Keyword(word) } else { TokKind::Ident(word) };
            toks.push(Token { kind, pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let v: i64 = digits.parse().map_err(|_| Error::Lex {
                pos,
                msg: format!("integer literal {digits} does not fit in 64 bits"),
            })?;
            toks.push(Token { kind: TokKind::Int(v), pos });
            continue;
        }
        let rest = &chars[i..];
        let sym = SYMBOLS.iter().find(|s| {
            let n = s.chars().count();
            if rest.len() < n || !s.chars().zip(rest.iter()).all(|(a, &b)| a == b) {
                return false;
            }
            // `<lexicon` is `<` followed by an identifier
            !(s.ends_with("lex") && rest.get(n).is_some_and(|&c| ident_char(c)))
        });
        match sym {
            Some(s) => {
                let n = s.chars().count();
                i += n;
                col += n as u32;
                toks.push(Token { kind: TokKind::Sym(s), pos });
            }
            _ => {
                return Err(Error::Lex { pos, msg: format!("illegal character '{c}'") });
            }
        }
    }
    toks.push(Token { kind: TokKind::Eof, pos: Pos::new(line, col) });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokKind> {
        let mut v: Vec<TokKind> = tokenize(s).unwrap().into_iter().map(|t| t.kind).collect();
        v.pop();
        v
    }

    #[test]
    fn comment_and_letting() {
        assert_eq!(
            kinds("letting c=5 $note"),
            vec![
                TokKind::Keyword("letting".into()),
                TokKind::Ident("c".into()),
                TokKind::Sym("="),
                TokKind::Int(5)
            ]
        );
    }

    #[test]
    fn maximal_munch() {
        assert_eq!(
            kinds("x<=lex y"),
            vec![TokKind::Ident("x".into()), TokKind::Sym("<=lex"), TokKind::Ident("y".into())]
        );
        assert_eq!(kinds("a<->b")[1], TokKind::Sym("<->"));
        assert_eq!(kinds("x<-1")[1..3], [TokKind::Sym("<"), TokKind::Sym("-")]);
        assert_eq!(kinds("x<lexicon")[1..], [TokKind::Sym("<"), TokKind::Ident("lexicon".into())]);
        assert_eq!(kinds("1..5"), vec![TokKind::Int(1), TokKind::Sym(".."), TokKind::Int(5)]);
    }

    #[test]
    fn forall_alias_is_keyword() {
        assert_eq!(kinds("forall"), vec![TokKind::Keyword("forall".into())]);
    }

    #[test]
    fn positions_and_errors() {
        let t = tokenize("a\n  b").unwrap();
        assert_eq!(t[1].pos, Pos::new(2, 3));
        assert!(matches!(tokenize("a # b"), Err(Error::Lex { .. })));
        assert!(matches!(tokenize("99999999999999999999"), Err(Error::Lex { .. })));
    }
}
