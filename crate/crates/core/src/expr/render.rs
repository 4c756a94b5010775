//! Text form of expressions.
//!
//! Grammar: `expr := name '(' expr (',' expr)* ')' | feature`, with operator
//! names `and_gd|and_pr|and_lk`, `or_*`, `implies_*`, `not` and feature
//! names matching `[A-Za-z0-9_]+`. Whitespace is allowed between tokens.

use std::fmt;

use super::{ExprError, ExprTree, Library, TokenKind};

/// Nesting limit for [`parse`]; deeper input is rejected, not recursed into.
pub const MAX_PARSE_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Frame {
    arity: usize,
    emitted: usize,
}

fn write_preorder(tree: &ExprTree, mut name: impl FnMut(TokenKind) -> String) -> String {
    let mut out = String::new();
    let mut stack: Vec<Frame> = Vec::new();
    for &kind in tree.preorder() {
        if let Some(top) = stack.last_mut() {
            if top.emitted > 0 {
                out.push_str(", ");
            }
            top.emitted += 1;
        }
        out.push_str(&name(kind));
        if kind.arity() > 0 {
            out.push('(');
            stack.push(Frame { arity: kind.arity(), emitted: 0 });
        } else {
            while stack.last().is_some_and(|f| f.emitted == f.arity) {
                out.push(')');
                stack.pop();
            }
        }
    }
    out
}

/// Prefix notation with ASCII operator names, e.g. `and_lk(NBD, not(OBD))`.
pub fn render(tree: &ExprTree, lib: &Library) -> String {
    write_preorder(tree, |k| lib.name(k))
}

/// Same layout as [`render`] with `⊗ ⊕ → ¬` symbols. Display only; there
/// is no parser for this form.
pub fn pretty(tree: &ExprTree, lib: &Library) -> String {
    write_preorder(tree, |k| match k {
        TokenKind::TNorm(s) => format!("⊗_{}", s.suffix()),
        TokenKind::TConorm(s) => format!("⊕_{}", s.suffix()),
        TokenKind::SImpl(s) => format!("→_{}", s.suffix()),
        TokenKind::Neg => "¬".to_string(),
        TokenKind::Terminal(_) => lib.name(k),
    })
}

impl fmt::Display for ExprTree {
    /// Operator names plus `x<i>` placeholders for features.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_preorder(self, |k| k.to_string()))
    }
}

/// Parses the [`render`] form back into a tree. Operators must belong to
/// `lib` and features must be among its feature names.
pub fn parse(text: &str, lib: &Library) -> Result<ExprTree, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, lib, nodes: Vec::new() };
    p.expr(0)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input").into());
    }
    ExprTree::from_preorder(p.nodes)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    lib: &'a Library,
    nodes: Vec<TokenKind>,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", byte as char)))
        }
    }

    fn ident(&mut self) -> Result<&str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        // Only ASCII bytes were consumed.
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn expr(&mut self, depth: usize) -> Result<(), ParseError> {
        if depth >= MAX_PARSE_DEPTH {
            return Err(self.error(format!("nesting deeper than {MAX_PARSE_DEPTH}")));
        }
        let start = self.pos;
        let name = self.ident()?.to_string();
        self.skip_ws();
        let is_call = self.src.get(self.pos) == Some(&b'(');

        let Some(kind) = TokenKind::from_operator_name(&name) else {
            if is_call {
                return Err(ParseError { position: start, message: format!("unknown operator {name:?}") });
            }
            let idx = self
                .lib
                .feature_names()
                .iter()
                .position(|f| *f == name)
                .ok_or_else(|| ParseError { position: start, message: format!("unknown feature {name:?}") })?;
            self.nodes.push(TokenKind::Terminal(idx));
            return Ok(());
        };
        if self.lib.id_of(kind).is_none() {
            return Err(ParseError { position: start, message: format!("operator {name} not in library") });
        }
        if !is_call {
            return Err(self.error(format!("operator {name} needs arguments")));
        }
        self.pos += 1;
        self.nodes.push(kind);
        for i in 0..kind.arity() {
            if i > 0 {
                self.expect(b',')?;
            }
            self.expr(depth + 1)?;
        }
        self.expect(b')')
    }
}
