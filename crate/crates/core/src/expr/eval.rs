use super::{ExprError, ExprTree, TokenKind};
use crate::data::FuzzyDataset;
use crate::fuzzy::{FuzzyValue, Semantics};

/// Evaluates `tree` on a single row; `Terminal(i)` reads `row[i]`.
pub fn evaluate(tree: &ExprTree, row: &[FuzzyValue]) -> Result<FuzzyValue, ExprError> {
    let mut stack: Vec<f64> = Vec::with_capacity(tree.len());
    for &kind in tree.preorder().iter().rev() {
        let v = match kind {
            TokenKind::Terminal(i) => {
                row.get(i).ok_or(ExprError::FeatureOutOfBounds { index: i, len: row.len() })?.get()
            }
            TokenKind::Neg => 1.0 - pop(&mut stack),
            TokenKind::TNorm(s) => {
                let (a, b) = pop2(&mut stack);
                s.tnorm(a, b)
            }
            TokenKind::TConorm(s) => {
                let (a, b) = pop2(&mut stack);
                s.tconorm(a, b)
            }
            TokenKind::SImpl(s) => {
                let (a, b) = pop2(&mut stack);
                s.s_implication(a, b)
            }
        };
        stack.push(v);
    }
    Ok(FuzzyValue::saturating(pop(&mut stack)))
}

fn pop(stack: &mut Vec<f64>) -> f64 {
    stack.pop().expect("validated tree")
}

// In reverse pre-order the first child sits on top of the stack.
fn pop2(stack: &mut Vec<f64>) -> (f64, f64) {
    let a = pop(stack);
    let b = pop(stack);
    (a, b)
}

/// Row-wise [`evaluate`] over a whole dataset, computed column by column.
pub fn evaluate_batch(tree: &ExprTree, data: &FuzzyDataset) -> Result<Vec<FuzzyValue>, ExprError> {
    let out = evaluate_columns(tree.preorder(), data.columns(), data.n_rows())?;
    Ok(out.into_iter().map(FuzzyValue::saturating).collect())
}

enum Operand<'a> {
    Column(&'a [f64]),
    Owned(Vec<f64>),
}

impl Operand<'_> {
    fn as_slice(&self) -> &[f64] {
        match self {
            Operand::Column(c) => c,
            Operand::Owned(v) => v,
        }
    }
}

/// Columnar evaluation of a pre-order node list. Each entry of `columns`
/// must have `n_rows` values in `[0, 1]`.
pub fn evaluate_columns(nodes: &[TokenKind], columns: &[Vec<f64>], n_rows: usize) -> Result<Vec<f64>, ExprError> {
    if nodes.is_empty() {
        return Err(ExprError::IncompleteTraversal { open: 1 });
    }
    let mut stack: Vec<Operand<'_>> = Vec::new();
    for &kind in nodes.iter().rev() {
        let next = match kind {
            TokenKind::Terminal(i) => {
                let col = columns.get(i).ok_or(ExprError::FeatureOutOfBounds { index: i, len: columns.len() })?;
                debug_assert_eq!(col.len(), n_rows);
                Operand::Column(col)
            }
            TokenKind::Neg => {
                let x = stack.pop().ok_or(ExprError::IncompleteTraversal { open: 1 })?;
                let mut buf = match x {
                    Operand::Owned(v) => v,
                    Operand::Column(c) => c.to_vec(),
                };
                buf.iter_mut().for_each(|v| *v = 1.0 - *v);
                Operand::Owned(buf)
            }
            TokenKind::TNorm(s) | TokenKind::TConorm(s) | TokenKind::SImpl(s) => {
                let a = stack.pop().ok_or(ExprError::IncompleteTraversal { open: 2 })?;
                let b = stack.pop().ok_or(ExprError::IncompleteTraversal { open: 1 })?;
                Operand::Owned(apply_binary(kind, s, a, b))
            }
        };
        stack.push(next);
    }
    match (stack.pop(), stack.is_empty()) {
        (Some(Operand::Owned(v)), true) => Ok(v),
        (Some(Operand::Column(c)), true) => Ok(c.to_vec()),
        _ => Err(ExprError::DanglingTokens { at: 0, len: nodes.len() }),
    }
}

fn apply_binary(kind: TokenKind, s: Semantics, a: Operand<'_>, b: Operand<'_>) -> Vec<f64> {
    let f: fn(Semantics, f64, f64) -> f64 = match kind {
        TokenKind::TNorm(_) => Semantics::tnorm,
        TokenKind::TConorm(_) => Semantics::tconorm,
        _ => Semantics::s_implication,
    };
    // Reuse whichever operand already owns a buffer.
    match (a, b) {
        (Operand::Owned(mut lhs), rhs) => {
            for (x, &y) in lhs.iter_mut().zip(rhs.as_slice()) {
                *x = f(s, *x, y);
            }
            lhs
        }
        (lhs, Operand::Owned(mut rhs)) => {
            for (y, &x) in rhs.iter_mut().zip(lhs.as_slice()) {
                *y = f(s, x, *y);
            }
            rhs
        }
        (lhs, rhs) => lhs.as_slice().iter().zip(rhs.as_slice()).map(|(&x, &y)| f(s, x, y)).collect(),
    }
}
