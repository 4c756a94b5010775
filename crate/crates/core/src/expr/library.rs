use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ExprError;
use crate::fuzzy::Semantics;

pub type TokenId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenKind {
    TNorm(Semantics),
    TConorm(Semantics),
    SImpl(Semantics),
    Neg,
    /// Index into the library's feature names.
    Terminal(usize),
}

impl TokenKind {
    pub fn arity(self) -> usize {
        match self {
            TokenKind::TNorm(_) | TokenKind::TConorm(_) | TokenKind::SImpl(_) => 2,
            TokenKind::Neg => 1,
            TokenKind::Terminal(_) => 0,
        }
    }

    /// Implications weigh 2, everything else 1.
    pub fn complexity_weight(self) -> u32 {
        match self {
            TokenKind::SImpl(_) => 2,
            _ => 1,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, TokenKind::Terminal(_))
    }

    pub fn is_implication(self) -> bool {
        matches!(self, TokenKind::SImpl(_))
    }

    /// Rendered name for operators; `None` for terminals.
    pub fn operator_name(self) -> Option<String> {
        match self {
            TokenKind::TNorm(s) => Some(format!("and_{}", s.suffix())),
            TokenKind::TConorm(s) => Some(format!("or_{}", s.suffix())),
            TokenKind::SImpl(s) => Some(format!("implies_{}", s.suffix())),
            TokenKind::Neg => Some("not".to_string()),
            TokenKind::Terminal(_) => None,
        }
    }

    /// Inverse of [`TokenKind::operator_name`].
    pub fn from_operator_name(name: &str) -> Option<Self> {
        if name == "not" {
            return Some(TokenKind::Neg);
        }
        let (family, suffix) = name.rsplit_once('_')?;
        let s = Semantics::from_suffix(suffix)?;
        match family {
            "and" => Some(TokenKind::TNorm(s)),
            "or" => Some(TokenKind::TConorm(s)),
            "implies" => Some(TokenKind::SImpl(s)),
            _ => None,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.operator_name() {
            Some(name) => f.write_str(&name),
            None => match self {
                TokenKind::Terminal(i) => write!(f, "x{i}"),
                _ => unreachable!(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LibraryMode {
    Single(Semantics),
    Combined,
    /// Hand-picked operator set, see [`Library::custom`].
    Custom,
}

/// The ordered token alphabet the policy samples from.
#[derive(Debug, Clone, PartialEq)]
pub struct Library {
    tokens: Vec<TokenKind>,
    mode: LibraryMode,
    feature_names: Vec<String>,
}

fn valid_feature_name(name: &str) -> bool {
    !name.is_empty()
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && TokenKind::from_operator_name(name).is_none()
}

impl Library {
    /// Standard library: binary operators grouped by semantics (t-norm,
    /// t-conorm, implication), then negation, then one terminal per feature.
    pub fn build<S: AsRef<str>>(mode: LibraryMode, feature_names: &[S]) -> Result<Self, ExprError> {
        let semantics: &[Semantics] = match mode {
            LibraryMode::Single(ref s) => std::slice::from_ref(s),
            LibraryMode::Combined => &Semantics::ALL,
            LibraryMode::Custom => return Err(ExprError::IncompleteLibrary("a standard mode; use Library::custom")),
        };
        let mut ops = Vec::with_capacity(semantics.len() * 3 + 1);
        for &s in semantics {
            ops.extend([TokenKind::TNorm(s), TokenKind::TConorm(s), TokenKind::SImpl(s)]);
        }
        ops.push(TokenKind::Neg);
        Self::assemble(ops, mode, feature_names)
    }

    /// Arbitrary operator subset, mainly for experiments and tests. Only a
    /// terminal and at least one operator are required.
    pub fn custom<S: AsRef<str>>(operators: Vec<TokenKind>, feature_names: &[S]) -> Result<Self, ExprError> {
        if operators.is_empty() {
            return Err(ExprError::IncompleteLibrary("at least one operator"));
        }
        if operators.iter().any(|k| k.is_terminal()) {
            return Err(ExprError::IncompleteLibrary("operators only (terminals come from feature names)"));
        }
        let mut seen = HashSet::new();
        for k in &operators {
            if !seen.insert(*k) {
                return Err(ExprError::IncompleteLibrary("distinct operators"));
            }
        }
        Self::assemble(operators, LibraryMode::Custom, feature_names)
    }

    fn assemble<S: AsRef<str>>(
        mut tokens: Vec<TokenKind>,
        mode: LibraryMode,
        feature_names: &[S],
    ) -> Result<Self, ExprError> {
        if feature_names.is_empty() {
            return Err(ExprError::EmptyFeatures);
        }
        let mut seen = HashSet::new();
        let mut names = Vec::with_capacity(feature_names.len());
        for name in feature_names {
            let name = name.as_ref();
            if !valid_feature_name(name) {
                return Err(ExprError::InvalidFeatureName(name.to_string()));
            }
            if !seen.insert(name) {
                return Err(ExprError::DuplicateFeature(name.to_string()));
            }
            names.push(name.to_string());
        }
        tokens.extend((0..names.len()).map(TokenKind::Terminal));
        Ok(Library { tokens, mode, feature_names: names })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn mode(&self) -> LibraryMode {
        self.mode
    }

    pub fn tokens(&self) -> &[TokenKind] {
        &self.tokens
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn kind(&self, id: TokenId) -> Result<TokenKind, ExprError> {
        self.tokens.get(id).copied().ok_or(ExprError::UnknownToken { id, size: self.tokens.len() })
    }

    pub fn id_of(&self, kind: TokenKind) -> Option<TokenId> {
        self.tokens.iter().position(|&k| k == kind)
    }

    /// Looks a token up by its rendered name (operator or feature).
    pub fn id_by_name(&self, name: &str) -> Option<TokenId> {
        match TokenKind::from_operator_name(name) {
            Some(kind) => self.id_of(kind),
            None => {
                let idx = self.feature_names.iter().position(|n| n == name)?;
                self.id_of(TokenKind::Terminal(idx))
            }
        }
    }

    pub fn name(&self, kind: TokenKind) -> String {
        match kind {
            TokenKind::Terminal(i) => self.feature_names.get(i).cloned().unwrap_or_else(|| format!("x{i}")),
            op => op.operator_name().expect("operators have names"),
        }
    }

    pub fn implication_ids(&self) -> Vec<TokenId> {
        (0..self.tokens.len()).filter(|&i| self.tokens[i].is_implication()).collect()
    }

    pub fn terminal_ids(&self) -> Vec<TokenId> {
        (0..self.tokens.len()).filter(|&i| self.tokens[i].is_terminal()).collect()
    }
}
