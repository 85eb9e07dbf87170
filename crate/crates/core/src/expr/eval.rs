use num_complex::Complex64 as C64;

use super::ast::{BinOp, Expr, ExprKind, Pos};
use super::error::{ExprError, ExprErrorKind};
use crate::error::Error;
use crate::gates;
use crate::tensor::{tensor_kets, tensor_ops, Ket, Operator};

/// Largest operator dimension the evaluator will build.
pub const MAX_OPERATOR_DIM: usize = 1024;

/// Built-in two-level label pairs `(index 0, index 1)`.
pub const DEFAULT_ALIASES: [(&str, &str); 5] =
    [("0", "1"), ("up", "dn"), ("H", "V"), ("L", "R"), ("O", "NO")];

/// Ket label resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalContext {
    aliases: Vec<(String, String)>,
}

impl Default for EvalContext {
    fn default() -> Self {
        Self {
            aliases: DEFAULT_ALIASES
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }
}

impl EvalContext {
    /// Declare an extra label pair; declared pairs win over the defaults.
    pub fn with_basis(mut self, zero: &str, one: &str) -> Self {
        self.aliases.insert(0, (zero.to_string(), one.to_string()));
        self
    }

    /// Parse a `"a,b"` declaration.
    pub fn with_basis_spec(self, spec: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let valid = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        match parts.as_slice() {
            [a, b] if valid(a) && valid(b) && a != b => Ok(self.with_basis(a, b)),
            _ => Err(Error::UnknownBasis(spec.to_string())),
        }
    }

    pub fn resolve(&self, label: &str) -> Option<usize> {
        self.aliases.iter().find_map(|(a, b)| {
            if a == label {
                Some(0)
            } else if b == label {
                Some(1)
            } else {
                None
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(C64),
    Ket(Ket),
    Operator(Operator),
}

impl Value {
    fn kind_name(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Ket(_) => "ket",
            Value::Operator(_) => "operator",
        }
    }

    fn type_error(&self, want: &str) -> ExprError {
        ExprError::new(
            ExprErrorKind::Type,
            Pos { line: 1, col: 1 },
            format!("expected {want}, found {}", self.kind_name()),
        )
    }

    pub fn into_ket(self) -> Result<Ket, ExprError> {
        match self {
            Value::Ket(k) => Ok(k),
            other => Err(other.type_error("a ket")),
        }
    }

    pub fn into_operator(self) -> Result<Operator, ExprError> {
        match self {
            Value::Operator(o) => Ok(o),
            other => Err(other.type_error("an operator")),
        }
    }

    fn scale(self, z: C64) -> Value {
        match self {
            Value::Scalar(s) => Value::Scalar(s * z),
            Value::Ket(k) => Value::Ket(k.scale(z)),
            Value::Operator(o) => Value::Operator(o.scale(z)),
        }
    }
}

fn dim_err(pos: Pos) -> impl Fn(Error) -> ExprError {
    move |e| ExprError::new(ExprErrorKind::Dimension, pos, e.to_string())
}

fn named_operator(name: &str) -> Operator {
    match name {
        "I" => gates::identity2(),
        "sx" => gates::sigma_x(),
        "sy" => gates::sigma_y(),
        "sz" => gates::sigma_z(),
        "S" => gates::stokes(),
        _ => unreachable!("parser admits only known operator names"),
    }
}

fn binary(op: BinOp, pos: Pos, l: Value, r: Value) -> Result<Value, ExprError> {
    use Value::*;
    let mismatch = |l: &Value, r: &Value, verb: &str| {
        ExprError::new(
            ExprErrorKind::Type,
            pos,
            format!("cannot {verb} {} and {}", l.kind_name(), r.kind_name()),
        )
    };
    let de = dim_err(pos);
    match op {
        BinOp::Add | BinOp::Sub => {
            let sign = if op == BinOp::Add { 1.0 } else { -1.0 };
            match (l, r) {
                (Scalar(a), Scalar(b)) => Ok(Scalar(a + sign * b)),
                (Ket(a), Ket(b)) => Ok(Ket(a.add(&b.scale(sign.into())).map_err(de)?)),
                (Operator(a), Operator(b)) => Ok(Operator(a.add(&b.scale(sign.into())).map_err(de)?)),
                (l, r) => Err(mismatch(&l, &r, if sign > 0.0 { "add" } else { "subtract" })),
            }
        }
        BinOp::Mul => match (l, r) {
            (Scalar(z), v) | (v, Scalar(z)) => Ok(v.scale(z)),
            (Operator(a), Operator(b)) => Ok(Operator(a.matmul(&b).map_err(de)?)),
            (Operator(a), Ket(k)) => Ok(Ket(a.apply(&k).map_err(de)?)),
            (Ket(a), Ket(b)) => Ok(Ket(tensor_kets(&[a, b]).map_err(de)?)),
            (l, r) => Err(mismatch(&l, &r, "multiply")),
        },
        BinOp::Div => match r {
            Scalar(z) if z.norm() == 0.0 => {
                Err(ExprError::new(ExprErrorKind::Domain, pos, "division by zero"))
            }
            Scalar(z) => Ok(l.scale(z.inv())),
            r => Err(mismatch(&l, &r, "divide")),
        },
        BinOp::Kron => match (l, r) {
            (Ket(a), Ket(b)) => Ok(Ket(tensor_kets(&[a, b]).map_err(de)?)),
            (Operator(a), Operator(b)) => {
                let total = a.dim().saturating_mul(b.dim());
                if total > MAX_OPERATOR_DIM {
                    return Err(ExprError::new(
                        ExprErrorKind::Dimension,
                        pos,
                        format!("operator dimension {total} exceeds {MAX_OPERATOR_DIM}"),
                    ));
                }
                Ok(Operator(tensor_ops(&[a, b]).map_err(de)?))
            }
            (l, r) => Err(mismatch(&l, &r, "take the tensor product of")),
        },
    }
}

/// Evaluate a syntax tree to a scalar, ket or operator.
pub fn evaluate(e: &Expr, ctx: &EvalContext) -> Result<Value, ExprError> {
    let pos = e.pos;
    match &e.kind {
        ExprKind::Number(x) => Ok(Value::Scalar(C64::new(*x, 0.0))),
        ExprKind::Imag => Ok(Value::Scalar(C64::i())),
        ExprKind::Pi => Ok(Value::Scalar(C64::new(std::f64::consts::PI, 0.0))),
        ExprKind::Ket(label) => match ctx.resolve(label) {
            Some(0) => Ok(Value::Ket(gates::ket0())),
            Some(_) => Ok(Value::Ket(gates::ket1())),
            None => Err(ExprError::new(
                ExprErrorKind::Domain,
                pos,
                format!("unknown ket label |{label}>"),
            )),
        },
        ExprKind::Op(name) => Ok(Value::Operator(named_operator(name))),
        ExprKind::Sqrt(arg) => match evaluate(arg, ctx)? {
            Value::Scalar(z) => Ok(Value::Scalar(z.sqrt())),
            other => Err(ExprError::new(
                ExprErrorKind::Type,
                pos,
                format!("sqrt needs a scalar, found {}", other.kind_name()),
            )),
        },
        ExprKind::Proj(arg) => match evaluate(arg, ctx)? {
            Value::Ket(k) => {
                if k.shape().total_dim() > MAX_OPERATOR_DIM {
                    return Err(ExprError::new(
                        ExprErrorKind::Dimension,
                        pos,
                        format!("projector dimension {} exceeds {MAX_OPERATOR_DIM}", k.shape().total_dim()),
                    ));
                }
                let p = Operator::projector(&k)
                    .map_err(|err| ExprError::new(ExprErrorKind::Domain, pos, err.to_string()))?;
                Ok(Value::Operator(p))
            }
            other => Err(ExprError::new(
                ExprErrorKind::Type,
                pos,
                format!("proj needs a ket, found {}", other.kind_name()),
            )),
        },
        ExprKind::Neg(arg) => Ok(evaluate(arg, ctx)?.scale(C64::new(-1.0, 0.0))),
        ExprKind::Binary(op, l, r) => {
            let (lv, rv) = (evaluate(l, ctx)?, evaluate(r, ctx)?);
            binary(*op, pos, lv, rv)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::expr::{parse_expression, parse_ket, parse_operator};
    use crate::gates::c;
    use crate::scenario;

    fn ket(src: &str) -> Ket {
        parse_ket(src, &EvalContext::default()).unwrap()
    }

    fn op(src: &str) -> Operator {
        parse_operator(src, &EvalContext::default()).unwrap()
    }

    fn eval_err(src: &str) -> ExprError {
        evaluate(&parse_expression(src).unwrap(), &EvalContext::default()).unwrap_err()
    }

    #[test]
    fn normalized_plus_state() {
        let k = ket("(|0> + |1>)/sqrt(2)");
        assert!(k.max_abs_diff(&Ket::qubit(c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.))) < 1e-15);
    }

    #[test]
    fn kron_matches_tensor_ops() {
        let expected = tensor_ops(&[gates::sigma_x(), gates::identity2()]).unwrap();
        assert_eq!(op("sx kron I").max_abs_diff(&expected), 0.0);
        assert_eq!(op("sx ⊗ I").max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn ket_plus_operator_is_a_type_error_at_the_plus() {
        let e = eval_err("|0> + sx");
        assert_eq!((e.kind, e.line, e.col), (ExprErrorKind::Type, 1, 5));
    }

    #[test]
    fn scenario_states_from_text() {
        let cases: [(&str, &str, (Ket, Ket)); 4] = [
            ("(|up>|dn> - |dn>|up>)/sqrt(2)", "(|up> + i|dn>) kron (|up> + |dn>) / 2", scenario::epr_states()),
            (
                "(|O>|NO> + |NO>|O> + |NO>|NO>)/sqrt(3)",
                "(|O> - |NO>) kron (|O> - |NO>) / 2",
                scenario::hardy_states(),
            ),
            ("|H> kron (i|L> + |R>)/sqrt(2)", "-i(|H>|L> + |V>|R>)/sqrt(2)", scenario::cheshire_states()),
            (
                "(|0> + |1>)/sqrt(2)",
                "(sqrt(2 + sqrt(2))|0> - sqrt(2 - sqrt(2))|1>)/2",
                scenario::crz_states(),
            ),
        ];
        for (psi, phi, (epsi, ephi)) in cases {
            assert!(ket(psi).max_abs_diff(&epsi) < 1e-15, "{psi}");
            assert!(ket(phi).max_abs_diff(&ephi) < 1e-15, "{phi}");
        }
    }

    #[test]
    fn operator_algebra() {
        assert!(op("sx sy").max_abs_diff(&op("i sz")) < 1e-15);
        assert!(op("proj(|H>) - proj(|V>)").max_abs_diff(&gates::stokes()) < 1e-15);
        assert!(op("(I + sz)/2").max_abs_diff(&gates::proj0()) < 1e-15);
        assert!(op("proj(|0> + |1>)").max_abs_diff(&op("(I + sx)/2")) < 1e-15);
        assert!(ket("sx |0>").max_abs_diff(&gates::ket1()) < 1e-15);
        assert!(op("S").is_hermitian());
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(eval_err("|0> + |0>|1>").kind, ExprErrorKind::Dimension);
        assert_eq!(eval_err("sx kron I + sx").kind, ExprErrorKind::Dimension);
        assert_eq!(eval_err("|0> / 0").kind, ExprErrorKind::Domain);
        assert_eq!(eval_err("proj(0|0>)").kind, ExprErrorKind::Domain);
        assert_eq!(eval_err("|cat>").kind, ExprErrorKind::Domain);
        assert_eq!(eval_err("|0> sx").kind, ExprErrorKind::Type);
        assert_eq!(eval_err("sqrt(|0>)").kind, ExprErrorKind::Type);
        assert_eq!(eval_err("proj(sx)").kind, ExprErrorKind::Type);
        assert_eq!(eval_err("2 kron 3").kind, ExprErrorKind::Type);
        let big = ["sx"; 11].join(" kron ");
        assert_eq!(eval_err(&big).kind, ExprErrorKind::Dimension);
        let e = parse_ket("sx", &EvalContext::default()).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::Type);
    }

    #[test]
    fn custom_basis_labels() {
        let ctx = EvalContext::default().with_basis_spec("a, b").unwrap();
        assert!(parse_ket("|b>", &ctx).unwrap().max_abs_diff(&gates::ket1()) < 1e-15);
        let swapped = EvalContext::default().with_basis("1", "0");
        assert!(parse_ket("|1>", &swapped).unwrap().max_abs_diff(&gates::ket0()) < 1e-15);
        assert!(EvalContext::default().with_basis_spec("a").is_err());
        assert!(EvalContext::default().with_basis_spec("a,a").is_err());
        assert!(EvalContext::default().with_basis_spec("a,|b").is_err());
    }
}
