//! Token libraries, pre-order traversals and fuzzy expression trees.
//!
//! An expression is always held in pre-order. [`Traversal`] is the policy's
//! view (token ids into a [`Library`]), [`ExprTree`] the library-independent
//! view (token kinds), and both convert losslessly into each other.

mod eval;
mod library;
mod mask;
mod render;
mod repair;

pub use eval::{evaluate, evaluate_batch, evaluate_columns};
pub use library::{Library, LibraryMode, TokenId, TokenKind};
pub use mask::{valid_token_mask, ConstraintConfig, SlotState};
pub use render::{parse, pretty, render, ParseError, MAX_PARSE_DEPTH};
pub use repair::enforce_root_implication;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("library needs at least one feature")]
    EmptyFeatures,
    #[error("invalid feature name {0:?}: expected [A-Za-z0-9_]+ and not an operator name")]
    InvalidFeatureName(String),
    #[error("duplicate feature name {0:?}")]
    DuplicateFeature(String),
    #[error("library must contain {0}")]
    IncompleteLibrary(&'static str),
    #[error("traversal is incomplete: {open} open slot(s) after the last token")]
    IncompleteTraversal { open: usize },
    #[error("traversal closes at index {at} but has {len} tokens")]
    DanglingTokens { at: usize, len: usize },
    #[error("token id {id} is not in a library of {size} tokens")]
    UnknownToken { id: TokenId, size: usize },
    #[error("operator {0} is not part of this library")]
    TokenNotInLibrary(String),
    #[error("feature index {index} out of bounds for {len} features")]
    FeatureOutOfBounds { index: usize, len: usize },
    #[error("{kind} takes {expected} children, got {got}")]
    ArityMismatch { kind: String, expected: usize, got: usize },
    #[error("library has no S-implication token")]
    MissingImplication,
    #[error("invalid constraint configuration: {0}")]
    InvalidConstraints(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Pre-order sequence of token ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Traversal(Vec<TokenId>);

/// Where a token sequence stands with respect to the arity counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    Complete,
    /// Every prefix is still open; this many slots remain to fill.
    Open(usize),
    /// The counter hit zero at `at`, before the last token.
    Dangling {
        at: usize,
    },
}

impl Traversal {
    pub fn new(tokens: Vec<TokenId>) -> Self {
        Traversal(tokens)
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, id: TokenId) {
        self.0.push(id);
    }

    pub fn into_inner(self) -> Vec<TokenId> {
        self.0
    }

    /// Runs the `1 + Σ(arity − 1)` counter over the tokens.
    pub fn completion(&self, lib: &Library) -> Result<Completion, ExprError> {
        completion_of(self.0.iter().map(|&id| lib.kind(id)), self.0.len())
    }

    pub fn is_complete(&self, lib: &Library) -> bool {
        matches!(self.completion(lib), Ok(Completion::Complete))
    }
}

fn completion_of<I>(kinds: I, len: usize) -> Result<Completion, ExprError>
where
    I: IntoIterator<Item = Result<TokenKind, ExprError>>,
{
    let mut open = 1usize;
    for (i, kind) in kinds.into_iter().enumerate() {
        let kind = kind?;
        open = open - 1 + kind.arity();
        if open == 0 {
            return Ok(if i + 1 == len { Completion::Complete } else { Completion::Dangling { at: i } });
        }
    }
    Ok(Completion::Open(open))
}

/// A complete fuzzy expression, stored as its pre-order node list.
///
/// Child counts always equal token arity and leaves are exactly the
/// terminals; every constructor checks this.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExprTree {
    nodes: Vec<TokenKind>,
}

impl ExprTree {
    /// Builds a tree from a pre-order kind list, checking completeness.
    pub fn from_preorder(nodes: Vec<TokenKind>) -> Result<Self, ExprError> {
        let len = nodes.len();
        match completion_of(nodes.iter().copied().map(Ok), len)? {
            Completion::Complete => Ok(ExprTree { nodes }),
            Completion::Open(open) => Err(ExprError::IncompleteTraversal { open }),
            Completion::Dangling { at } => Err(ExprError::DanglingTokens { at, len }),
        }
    }

    pub fn terminal(feature: usize) -> Self {
        ExprTree { nodes: vec![TokenKind::Terminal(feature)] }
    }

    /// Generic node constructor; `children.len()` must equal the arity.
    pub fn node(kind: TokenKind, children: Vec<ExprTree>) -> Result<Self, ExprError> {
        if children.len() != kind.arity() {
            return Err(ExprError::ArityMismatch {
                kind: kind.to_string(),
                expected: kind.arity(),
                got: children.len(),
            });
        }
        let mut nodes = Vec::with_capacity(1 + children.iter().map(|c| c.nodes.len()).sum::<usize>());
        nodes.push(kind);
        for child in children {
            nodes.extend(child.nodes);
        }
        Ok(ExprTree { nodes })
    }

    pub fn negation(child: ExprTree) -> Self {
        Self::node(TokenKind::Neg, vec![child]).expect("negation is unary")
    }

    pub fn and(s: crate::fuzzy::Semantics, lhs: ExprTree, rhs: ExprTree) -> Self {
        Self::node(TokenKind::TNorm(s), vec![lhs, rhs]).expect("t-norm is binary")
    }

    pub fn or(s: crate::fuzzy::Semantics, lhs: ExprTree, rhs: ExprTree) -> Self {
        Self::node(TokenKind::TConorm(s), vec![lhs, rhs]).expect("t-conorm is binary")
    }

    pub fn implies(s: crate::fuzzy::Semantics, lhs: ExprTree, rhs: ExprTree) -> Self {
        Self::node(TokenKind::SImpl(s), vec![lhs, rhs]).expect("implication is binary")
    }

    /// Pre-order node kinds.
    pub fn preorder(&self) -> &[TokenKind] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> Node<'_> {
        Node { tree: self, index: 0 }
    }

    /// Sum of per-token complexity weights.
    pub fn complexity(&self) -> u32 {
        self.nodes.iter().map(|k| k.complexity_weight()).sum()
    }

    /// Largest terminal index used, if any.
    pub fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|k| match k {
                TokenKind::Terminal(i) => Some(*i),
                _ => None,
            })
            .max()
    }

    /// Exclusive end index of the subtree rooted at `start`.
    fn subtree_end(&self, start: usize) -> usize {
        let mut open = 1usize;
        let mut i = start;
        while open > 0 {
            open = open - 1 + self.nodes[i].arity();
            i += 1;
        }
        i
    }
}

/// Borrowed view of one node of an [`ExprTree`].
#[derive(Debug, Clone, Copy)]
pub struct Node<'a> {
    tree: &'a ExprTree,
    index: usize,
}

impl<'a> Node<'a> {
    pub fn kind(&self) -> TokenKind {
        self.tree.nodes[self.index]
    }

    pub fn children(&self) -> Vec<Node<'a>> {
        let mut out = Vec::with_capacity(self.kind().arity());
        let mut next = self.index + 1;
        for _ in 0..self.kind().arity() {
            out.push(Node { tree: self.tree, index: next });
            next = self.tree.subtree_end(next);
        }
        out
    }

    /// Copies this subtree out as a standalone tree.
    pub fn to_tree(&self) -> ExprTree {
        let end = self.tree.subtree_end(self.index);
        ExprTree { nodes: self.tree.nodes[self.index..end].to_vec() }
    }
}

pub fn tree_from_traversal(t: &Traversal, lib: &Library) -> Result<ExprTree, ExprError> {
    let nodes = t.tokens().iter().map(|&id| lib.kind(id)).collect::<Result<Vec<_>, _>>()?;
    ExprTree::from_preorder(nodes)
}

pub fn traversal_from_tree(tree: &ExprTree, lib: &Library) -> Result<Traversal, ExprError> {
    tree.preorder()
        .iter()
        .map(|&k| lib.id_of(k).ok_or_else(|| ExprError::TokenNotInLibrary(k.to_string())))
        .collect::<Result<Vec<_>, _>>()
        .map(Traversal)
}

/// Sum of complexity weights over all nodes.
pub fn complexity(tree: &ExprTree) -> u32 {
    tree.complexity()
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::{Rng, RngCore};

    /// Draws a uniformly random complete traversal of at most `max_len` tokens.
    pub fn random_traversal(lib: &Library, max_len: usize, rng: &mut impl RngCore) -> Traversal {
        let cfg = ConstraintConfig { max_length: max_len, min_length: 1, root_implication: false };
        let mut t = Traversal::default();
        let mut state = SlotState::start();
        let mut mask = vec![false; lib.len()];
        while !state.is_complete() {
            state.fill_mask(lib, &cfg, &mut mask);
            let valid: Vec<usize> = (0..lib.len()).filter(|&i| mask[i]).collect();
            let id = valid[rng.random_range(0..valid.len())];
            state.advance(lib.kind(id).unwrap());
            t.push(id);
        }
        t
    }
}
