//! A small bra-ket expression language for kets and operators.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '·' | '/' | 'kron' | '⊗' | <juxtaposition>) unary)*
//! unary   := '-' unary | primary
//! primary := number | 'i' | 'pi' | ket | name | func '(' expr ')' | '(' expr ')'
//! ket     := '|' label '>'
//! name    := 'I' | 'sx' | 'sy' | 'sz' | 'S'
//! func    := 'sqrt' | 'proj'
//! ```
//!
//! Juxtaposition multiplies, so `i|1>` and `sx sz` both parse; two kets side
//! by side form their tensor product.

mod ast;
mod error;
mod eval;
mod lexer;
mod parser;

pub use ast::{BinOp, Expr, ExprKind, Pos};
pub use error::{ExprError, ExprErrorKind};
pub use eval::{evaluate, EvalContext, Value, DEFAULT_ALIASES, MAX_OPERATOR_DIM};
pub use parser::{parse_expression, MAX_DEPTH};

/// Parse and evaluate `src`, requiring a ket.
pub fn parse_ket(src: &str, ctx: &EvalContext) -> Result<crate::tensor::Ket, ExprError> {
    let e = parse_expression(src)?;
    evaluate(&e, ctx)?.into_ket().map_err(|err| err.at(e.pos))
}

/// Parse and evaluate `src`, requiring an operator.
pub fn parse_operator(src: &str, ctx: &EvalContext) -> Result<crate::tensor::Operator, ExprError> {
    let e = parse_expression(src)?;
    evaluate(&e, ctx)?.into_operator().map_err(|err| err.at(e.pos))
}

/// Canonical text of `src`: parse then pretty-print.
pub fn normalize(src: &str) -> Result<String, ExprError> {
    Ok(parse_expression(src)?.to_string())
}

/// Example expressions from `docs/expressions.md`, one per line.
pub fn documented_corpus() -> Vec<&'static str> {
    const DOC: &str = include_str!("../../docs/expressions.md");
    let body = DOC.split("```corpus\n").nth(1).unwrap_or("");
    let body = body.split("```").next().unwrap_or("");
    body.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_round_trips() {
        let corpus = documented_corpus();
        assert!(corpus.len() >= 30, "{}", corpus.len());
        let ctx = EvalContext::default();
        for src in corpus {
            let e = parse_expression(src).unwrap();
            let printed = e.to_string();
            let again = parse_expression(&printed).unwrap();
            assert!(e.same_shape(&again), "{src} -> {printed}");
            assert_eq!(again.to_string(), printed);
            let (a, b) = (evaluate(&e, &ctx).unwrap(), evaluate(&again, &ctx).unwrap());
            assert_eq!(a, b, "{src}");
        }
    }
}
