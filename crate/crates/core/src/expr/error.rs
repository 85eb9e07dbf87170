use std::fmt;

use super::ast::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprErrorKind {
    Lex,
    Parse,
    Type,
    Dimension,
    Domain,
}

impl fmt::Display for ExprErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExprErrorKind::Lex => "lex error",
            ExprErrorKind::Parse => "parse error",
            ExprErrorKind::Type => "type error",
            ExprErrorKind::Dimension => "dimension mismatch",
            ExprErrorKind::Domain => "domain error",
        })
    }
}

/// Diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ExprError {
    pub kind: ExprErrorKind,
    pub message: String,
    pub line: usize,
    pub col: usize,
    /// Tokens that would have been accepted (parse errors only).
    pub expected: Vec<String>,
}

impl ExprError {
    pub(crate) fn new(kind: ExprErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            line: pos.line,
            col: pos.col,
            expected: Vec::new(),
        }
    }

    pub(crate) fn expected(mut self, tokens: &[&str]) -> Self {
        self.expected = tokens.iter().map(|s| s.to_string()).collect();
        self
    }

    pub(crate) fn at(mut self, pos: Pos) -> Self {
        self.line = pos.line;
        self.col = pos.col;
        self
    }

    pub fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.col, self.kind, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}
