//! Fuzzy-logic rule discovery for imbalanced binary classification.
//!
//! A recurrent policy samples prefix traversals of fuzzy expressions
//! (T-norms, T-conorms, S-implications and negation over fuzzified
//! features). Expressions are scored by F1 or F2 on a training split and
//! the policy is trained with a risk-seeking policy gradient.

pub mod controller;
pub mod data;
pub mod eval;
pub mod expr;
pub mod fuzzy;
pub mod trainer;
