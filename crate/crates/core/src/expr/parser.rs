use super::ast::{BinOp, Expr, ExprKind, Pos};
use super::error::{ExprError, ExprErrorKind};
use super::lexer::{tokenize, Tok, Token};

/// Maximum syntax-tree depth, bounding recursion in every later pass.
pub const MAX_DEPTH: usize = 256;

const OPERATOR_NAMES: [&str; 5] = ["I", "sx", "sy", "sz", "S"];
const PRIMARY_START: [&str; 5] = ["number", "ket", "name", "'('", "'-'"];

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

type Parsed = (Expr, usize);

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if t.tok != Tok::Eof {
            self.i += 1;
        }
        t
    }

    fn check_depth(depth: usize, pos: Pos) -> Result<usize, ExprError> {
        if depth > MAX_DEPTH {
            Err(ExprError::new(
                ExprErrorKind::Parse,
                pos,
                format!("expression nests deeper than {MAX_DEPTH}"),
            ))
        } else {
            Ok(depth)
        }
    }

    fn binary(op: BinOp, pos: Pos, (l, dl): Parsed, (r, dr): Parsed) -> Result<Parsed, ExprError> {
        let depth = Self::check_depth(dl.max(dr) + 1, pos)?;
        Ok((
            Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), pos),
            depth,
        ))
    }

    fn expr(&mut self, nest: usize) -> Result<Parsed, ExprError> {
        let mut lhs = self.term(nest)?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.next().pos;
            let rhs = self.term(nest)?;
            lhs = Self::binary(op, pos, lhs, rhs)?;
        }
    }

    fn term(&mut self, nest: usize) -> Result<Parsed, ExprError> {
        let mut lhs = self.unary(nest)?;
        loop {
            let t = self.peek();
            let (op, pos, explicit) = match t.tok {
                Tok::Star => (BinOp::Mul, t.pos, true),
                Tok::Slash => (BinOp::Div, t.pos, true),
                Tok::Kron => (BinOp::Kron, t.pos, true),
                Tok::Number(_) | Tok::Ident(_) | Tok::Ket(_) | Tok::LParen => (BinOp::Mul, t.pos, false),
                _ => return Ok(lhs),
            };
            if explicit {
                self.next();
            }
            let rhs = self.unary(nest)?;
            lhs = Self::binary(op, pos, lhs, rhs)?;
        }
    }

    fn unary(&mut self, nest: usize) -> Result<Parsed, ExprError> {
        let pos = self.peek().pos;
        Self::check_depth(nest + 1, pos)?;
        if self.peek().tok == Tok::Minus {
            self.next();
            let (inner, d) = self.unary(nest + 1)?;
            let depth = Self::check_depth(d + 1, pos)?;
            return Ok((Expr::new(ExprKind::Neg(Box::new(inner)), pos), depth));
        }
        self.primary(nest)
    }

    fn expect(&mut self, want: Tok, label: &str) -> Result<(), ExprError> {
        let t = self.next();
        if t.tok == want {
            Ok(())
        } else {
            Err(ExprError::new(
                ExprErrorKind::Parse,
                t.pos,
                format!("unexpected {}", t.tok.describe()),
            )
            .expected(&[label]))
        }
    }

    fn parenthesized(&mut self, nest: usize) -> Result<Parsed, ExprError> {
        self.expect(Tok::LParen, "'('")?;
        let inner = self.expr(nest + 1)?;
        self.expect(Tok::RParen, "')'")?;
        Ok(inner)
    }

    fn primary(&mut self, nest: usize) -> Result<Parsed, ExprError> {
        let t = self.next();
        let leaf = |kind| Ok((Expr::new(kind, t.pos), 1));
        match &t.tok {
            Tok::Number(x) => leaf(ExprKind::Number(*x)),
            Tok::Ket(label) => leaf(ExprKind::Ket(label.clone())),
            Tok::LParen => {
                let inner = self.expr(nest + 1)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => leaf(ExprKind::Imag),
                "pi" => leaf(ExprKind::Pi),
                n if OPERATOR_NAMES.contains(&n) => leaf(ExprKind::Op(n.to_string())),
                "sqrt" | "proj" => {
                    let (arg, d) = self.parenthesized(nest)?;
                    let depth = Self::check_depth(d + 1, t.pos)?;
                    let arg = Box::new(arg);
                    let kind = if name == "sqrt" {
                        ExprKind::Sqrt(arg)
                    } else {
                        ExprKind::Proj(arg)
                    };
                    Ok((Expr::new(kind, t.pos), depth))
                }
                _ => Err(ExprError::new(
                    ExprErrorKind::Parse,
                    t.pos,
                    format!("unknown name '{name}'"),
                )
                .expected(&["i", "pi", "I", "sx", "sy", "sz", "S", "sqrt", "proj"])),
            },
            other => Err(ExprError::new(
                ExprErrorKind::Parse,
                t.pos,
                format!("unexpected {}", other.describe()),
            )
            .expected(&PRIMARY_START)),
        }
    }
}

/// Parse `src` into a syntax tree, or a positioned diagnostic.
pub fn parse_expression(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        i: 0,
    };
    let (e, _) = p.expr(0)?;
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(ExprError::new(
            ExprErrorKind::Parse,
            t.pos,
            format!("unexpected {}", t.tok.describe()),
        )
        .expected(&["'+'", "'-'", "'*'", "'/'", "'kron'", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(src: &str) -> String {
        parse_expression(src).unwrap().to_string()
    }

    #[test]
    fn precedence_and_normal_form() {
        assert_eq!(norm("(|0> + |1>)/sqrt(2)"), "(|0> + |1>) / sqrt(2)");
        assert_eq!(norm("sx ⊗ I"), "sx kron I");
        assert_eq!(norm("i|1>"), "i * |1>");
        assert_eq!(norm("1 - (2 - 3)"), "1 - (2 - 3)");
        assert_eq!(norm("(1 - 2) - 3"), "1 - 2 - 3");
        assert_eq!(norm("-(|0> - |1>)"), "-(|0> - |1>)");
        assert_eq!(norm("--2"), "--2");
        assert_eq!(norm("2·sz + -sx"), "2 * sz + -sx");
    }

    #[test]
    fn kron_and_multiplication_share_a_level() {
        let e = parse_expression("2 sx kron sz").unwrap();
        let ExprKind::Binary(BinOp::Kron, l, _) = &e.kind else {
            panic!("{e:?}")
        };
        assert!(matches!(l.kind, ExprKind::Binary(BinOp::Mul, ..)));
    }

    #[test]
    fn diagnostics_carry_position_and_expectations() {
        let e = parse_expression("|0> +").unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (ExprErrorKind::Parse, 1, 6));
        assert!(e.expected.contains(&"ket".to_string()));
        let e = parse_expression("sqrt 2").unwrap_err();
        assert_eq!(e.expected, vec!["'('"]);
        let e = parse_expression("(1").unwrap_err();
        assert_eq!(e.expected, vec!["')'"]);
        let e = parse_expression("foo").unwrap_err();
        assert!(e.message.contains("foo"));
        let e = parse_expression("1 )").unwrap_err();
        assert_eq!(e.col, 3);
    }

    #[test]
    fn depth_is_capped() {
        let deep = format!("{}1{}", "(".repeat(400), ")".repeat(400));
        assert!(parse_expression(&deep).unwrap_err().message.contains("deeper"));
        let long = vec!["1"; 1000].join(" + ");
        assert!(parse_expression(&long).is_err());
        let neg = format!("{}1", "-".repeat(1000));
        assert!(parse_expression(&neg).is_err());
        let ok = vec!["1"; 100].join(" + ");
        assert!(parse_expression(&ok).is_ok());
    }
}
