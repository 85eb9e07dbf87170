use super::ast::Pos;
use super::error::{ExprError, ExprErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Number(f64),
    Ident(String),
    Ket(String),
    Plus,
    Minus,
    Star,
    Slash,
    Kron,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Number(x) => format!("number {x}"),
            Tok::Ident(s) => format!("name '{s}'"),
            Tok::Ket(s) => format!("ket |{s}>"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Kron => "'kron'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.chars.next()?;
        if ch == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(ch)
    }

    fn take_while(&mut self, out: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(ch) = self.peek().filter(|&c| pred(c)) {
            out.push(ch);
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let mut cur = Cursor {
        chars: src.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(ch) = cur.peek() {
        let pos = cur.pos;
        if ch.is_whitespace() {
            cur.bump();
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{00b7}' => Tok::Star,
            '/' => Tok::Slash,
            '\u{2297}' => Tok::Kron,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '|' => {
                cur.bump();
                let mut label = String::new();
                cur.take_while(&mut label, is_ident_char);
                if label.is_empty() {
                    return Err(ExprError::new(ExprErrorKind::Lex, cur.pos, "empty ket label")
                        .expected(&["ket label"]));
                }
                if cur.peek() != Some('>') {
                    return Err(ExprError::new(ExprErrorKind::Lex, cur.pos, "unterminated ket")
                        .expected(&["'>'"]));
                }
                cur.bump();
                out.push(Token { tok: Tok::Ket(label), pos });
                continue;
            }
            c if c.is_ascii_digit() || c == '.' => {
                out.push(Token { tok: lex_number(&mut cur)?, pos });
                continue;
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                cur.take_while(&mut name, is_ident_char);
                let tok = if name == "kron" { Tok::Kron } else { Tok::Ident(name) };
                out.push(Token { tok, pos });
                continue;
            }
            other => {
                return Err(ExprError::new(
                    ExprErrorKind::Lex,
                    pos,
                    format!("unexpected character {other:?}"),
                ));
            }
        };
        cur.bump();
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: cur.pos,
    });
    Ok(out)
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<Tok, ExprError> {
    let start = cur.pos;
    let mut text = String::new();
    cur.take_while(&mut text, |c| c.is_ascii_digit());
    if cur.peek() == Some('.') {
        text.push('.');
        cur.bump();
        cur.take_while(&mut text, |c| c.is_ascii_digit());
    }
    if text == "." {
        return Err(ExprError::new(ExprErrorKind::Lex, start, "lone '.'").expected(&["digit"]));
    }
    // An exponent needs at least one digit; "2e" lexes as 2 followed by the name e.
    let mut look = cur.chars.clone();
    if matches!(look.next(), Some('e' | 'E')) {
        let mut exp = String::from("e");
        let mut n_extra = 1;
        if let Some(sign @ ('+' | '-')) = look.peek().copied() {
            exp.push(sign);
            look.next();
            n_extra += 1;
        }
        if look.peek().is_some_and(|c| c.is_ascii_digit()) {
            for _ in 0..n_extra {
                cur.bump();
            }
            text.push_str(&exp);
            cur.take_while(&mut text, |c| c.is_ascii_digit());
        }
    }
    let value: f64 = text
        .parse()
        .map_err(|_| ExprError::new(ExprErrorKind::Lex, start, format!("bad number {text:?}")))?;
    if !value.is_finite() {
        return Err(ExprError::new(ExprErrorKind::Lex, start, format!("number {text} is not finite")));
    }
    Ok(Tok::Number(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_kets_numbers_and_operators() {
        assert_eq!(
            toks("(|0> + |NO>)/sqrt(2.5e-1) ⊗ sx·2"),
            vec![
                Tok::LParen,
                Tok::Ket("0".into()),
                Tok::Plus,
                Tok::Ket("NO".into()),
                Tok::RParen,
                Tok::Slash,
                Tok::Ident("sqrt".into()),
                Tok::LParen,
                Tok::Number(0.25),
                Tok::RParen,
                Tok::Kron,
                Tok::Ident("sx".into()),
                Tok::Star,
                Tok::Number(2.0),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn exponent_without_digits_is_a_name() {
        assert_eq!(toks("2e"), vec![Tok::Number(2.0), Tok::Ident("e".into()), Tok::Eof]);
        assert_eq!(toks("3E+2"), vec![Tok::Number(300.0), Tok::Eof]);
    }

    #[test]
    fn positions_track_lines() {
        let t = tokenize("1 +\n  |H>").unwrap();
        assert_eq!(t[2].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn lex_errors() {
        let e = tokenize("|0").unwrap_err();
        assert_eq!((e.kind, e.col), (ExprErrorKind::Lex, 3));
        assert_eq!(tokenize("1e999").unwrap_err().kind, ExprErrorKind::Lex);
        assert_eq!(tokenize("2 $").unwrap_err().col, 3);
        assert_eq!(tokenize("|>").unwrap_err().kind, ExprErrorKind::Lex);
    }
}
