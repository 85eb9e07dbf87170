use std::fmt;

/// 1-based line and column (columns count Unicode scalar values).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Kron,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div | BinOp::Kron => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Kron => "kron",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// Non-negative finite real literal.
    Number(f64),
    Imag,
    Pi,
    Ket(String),
    /// Named single-factor operator: `I`, `sx`, `sy`, `sz`, `S`.
    Op(String),
    Sqrt(Box<Expr>),
    Proj(Box<Expr>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// Syntax tree node; `pos` is the operator token for binary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Self { kind, pos }
    }

    /// Structural equality ignoring positions.
    pub fn same_shape(&self, other: &Expr) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Number(a), Number(b)) => a == b,
            (Imag, Imag) | (Pi, Pi) => true,
            (Ket(a), Ket(b)) | (Op(a), Op(b)) => a == b,
            (Sqrt(a), Sqrt(b)) | (Proj(a), Proj(b)) | (Neg(a), Neg(b)) => a.same_shape(b),
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => {
                o1 == o2 && l1.same_shape(l2) && r1.same_shape(r2)
            }
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Neg(_) => 3,
            _ => 4,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Normal form: minimal parentheses, spaced binary operators, `kron` for the
/// tensor product and `*` for every multiplication.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(x) => write!(f, "{x}"),
            ExprKind::Imag => f.write_str("i"),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::Ket(label) => write!(f, "|{label}>"),
            ExprKind::Op(name) => f.write_str(name),
            ExprKind::Sqrt(e) => write!(f, "sqrt({e})"),
            ExprKind::Proj(e) => write!(f, "proj({e})"),
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                write_child(f, e, e.precedence() < 3)
            }
            ExprKind::Binary(op, l, r) => {
                let p = op.precedence();
                write_child(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, r, r.precedence() <= p)
            }
        }
    }
}
