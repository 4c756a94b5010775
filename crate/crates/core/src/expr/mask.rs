use serde::{Deserialize, Serialize};

use super::{Completion, ExprError, Library, TokenKind, Traversal};

/// Length bounds and structural constraints applied while sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstraintConfig {
    pub max_length: usize,
    /// Completing tokens are masked below this length whenever a longer
    /// completion is still reachable.
    pub min_length: usize,
    /// Root must be an S-implication, and S-implications may appear nowhere
    /// else.
    pub root_implication: bool,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig { max_length: 32, min_length: 4, root_implication: false }
    }
}

impl ConstraintConfig {
    pub fn validate(&self, lib: &Library) -> Result<(), ExprError> {
        let bad = |msg: String| Err(ExprError::InvalidConstraints(msg));
        if self.max_length == 0 {
            return bad("max_length must be positive".into());
        }
        if self.min_length > self.max_length {
            return bad(format!("min_length {} exceeds max_length {}", self.min_length, self.max_length));
        }
        if lib.terminal_ids().is_empty() {
            return bad("library has no terminals".into());
        }
        if self.root_implication {
            if lib.implication_ids().is_empty() {
                return Err(ExprError::MissingImplication);
            }
            if self.max_length < 3 {
                return bad("an implication root needs max_length >= 3".into());
            }
        }
        Ok(())
    }
}

/// Length and open-slot count of a partial traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotState {
    pub len: usize,
    pub open: usize,
}

impl SlotState {
    pub fn start() -> Self {
        SlotState { len: 0, open: 1 }
    }

    pub fn of(partial: &Traversal, lib: &Library) -> Result<Self, ExprError> {
        match partial.completion(lib)? {
            Completion::Open(open) => Ok(SlotState { len: partial.len(), open }),
            Completion::Complete => Ok(SlotState { len: partial.len(), open: 0 }),
            Completion::Dangling { at } => Err(ExprError::DanglingTokens { at, len: partial.len() }),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.open == 0
    }

    pub fn advance(&mut self, kind: TokenKind) {
        debug_assert!(self.open > 0, "advance past a complete traversal");
        self.len += 1;
        self.open = self.open - 1 + kind.arity();
    }

    /// Writes the validity of every library token into `mask`. Allows
    /// nothing once the traversal is complete.
    pub fn fill_mask(&self, lib: &Library, cfg: &ConstraintConfig, mask: &mut [bool]) {
        debug_assert_eq!(mask.len(), lib.len());
        if self.is_complete() {
            mask.fill(false);
            return;
        }
        let mut can_grow = false;
        for (slot, &kind) in mask.iter_mut().zip(lib.tokens()) {
            let new_len = self.len + 1;
            let new_open = self.open - 1 + kind.arity();
            // Each open slot needs at least one more token.
            let mut ok = new_len + new_open <= cfg.max_length;
            if cfg.root_implication {
                ok &= (self.len == 0) == kind.is_implication();
            }
            can_grow |= ok && new_open > 0;
            *slot = ok;
        }
        if can_grow && self.len + 1 < cfg.min_length {
            for (slot, &kind) in mask.iter_mut().zip(lib.tokens()) {
                if self.open - 1 + kind.arity() == 0 {
                    *slot = false;
                }
            }
        }
    }
}

/// `mask[i]` is true iff appending token `i` to `partial` keeps it
/// completable under `cfg`.
pub fn valid_token_mask(partial: &Traversal, lib: &Library, cfg: &ConstraintConfig) -> Result<Vec<bool>, ExprError> {
    let state = SlotState::of(partial, lib)?;
    let mut mask = vec![false; lib.len()];
    state.fill_mask(lib, cfg, &mut mask);
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::LibraryMode;
    use crate::fuzzy::Semantics;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lib() -> Library {
        Library::build(LibraryMode::Single(Semantics::Lukasiewicz), &["A", "B"]).unwrap()
    }

    fn names(lib: &Library, mask: &[bool]) -> Vec<String> {
        lib.tokens().iter().zip(mask).filter(|(_, &m)| m).map(|(&k, _)| lib.name(k)).collect()
    }

    #[test]
    fn tiny_budget_rules_out_binary_root() {
        let lib = lib();
        let cfg = ConstraintConfig { max_length: 2, min_length: 1, root_implication: false };
        let mask = valid_token_mask(&Traversal::default(), &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["not", "A", "B"]);
    }

    #[test]
    fn exhausted_budget_forces_terminals() {
        let lib = lib();
        let cfg = ConstraintConfig { max_length: 5, min_length: 1, root_implication: false };
        // and(not(?), ?) with 3 tokens used and 2 open slots: 5 = budget.
        let and = lib.id_by_name("and_lk").unwrap();
        let not = lib.id_by_name("not").unwrap();
        let partial = Traversal::new(vec![and, not]);
        assert_eq!(SlotState::of(&partial, &lib).unwrap(), SlotState { len: 2, open: 2 });
        let partial = Traversal::new(vec![and, lib.id_by_name("A").unwrap(), not]);
        let mask = valid_token_mask(&partial, &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["not", "A", "B"]);
        let partial = Traversal::new(vec![and, not, not]);
        let mask = valid_token_mask(&partial, &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["A", "B"]);
    }

    #[test]
    fn open_start_allows_everything() {
        let lib = lib();
        let cfg = ConstraintConfig { max_length: 32, min_length: 1, root_implication: false };
        let mask = valid_token_mask(&Traversal::default(), &lib, &cfg).unwrap();
        assert!(mask.iter().all(|&m| m));
    }

    #[test]
    fn min_length_masks_early_completion() {
        let lib = lib();
        let cfg = ConstraintConfig::default();
        let mask = valid_token_mask(&Traversal::default(), &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["and_lk", "or_lk", "implies_lk", "not"]);
        // [and, A] -> terminal would finish at length 3 < 4
        let partial = Traversal::new(vec![0, lib.id_by_name("A").unwrap()]);
        let mask = valid_token_mask(&partial, &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["and_lk", "or_lk", "implies_lk", "not"]);
    }

    #[test]
    fn min_length_yields_when_no_longer_completion_exists() {
        let lib = lib();
        let cfg = ConstraintConfig { max_length: 2, min_length: 4, root_implication: false };
        let not = lib.id_by_name("not").unwrap();
        let mask = valid_token_mask(&Traversal::new(vec![not]), &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["A", "B"]);
    }

    #[test]
    fn root_implication_masks() {
        let lib = lib();
        let cfg = ConstraintConfig { root_implication: true, ..Default::default() };
        let mask = valid_token_mask(&Traversal::default(), &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["implies_lk"]);
        let imp = lib.id_by_name("implies_lk").unwrap();
        let mask = valid_token_mask(&Traversal::new(vec![imp]), &lib, &cfg).unwrap();
        assert_eq!(names(&lib, &mask), ["and_lk", "or_lk", "not", "A", "B"]);
    }

    #[test]
    fn complete_traversal_allows_nothing() {
        let lib = lib();
        let a = lib.id_by_name("A").unwrap();
        let mask = valid_token_mask(&Traversal::new(vec![a]), &lib, &ConstraintConfig::default()).unwrap();
        assert!(mask.iter().all(|&m| !m));
    }

    #[test]
    fn validation() {
        let lib = lib();
        let bad = ConstraintConfig { max_length: 3, min_length: 4, root_implication: false };
        assert!(bad.validate(&lib).is_err());
        let bad = ConstraintConfig { max_length: 2, min_length: 1, root_implication: true };
        assert!(bad.validate(&lib).is_err());
        let no_impl = Library::custom(vec![TokenKind::Neg], &["f"]).unwrap();
        let cfg = ConstraintConfig { root_implication: true, ..Default::default() };
        assert_eq!(cfg.validate(&no_impl), Err(ExprError::MissingImplication));
        assert!(ConstraintConfig::default().validate(&lib).is_ok());
    }

    proptest! {
        #[test]
        fn masked_walks_terminate_within_bounds(
            seed in any::<u64>(),
            max_length in 1usize..40,
            min_length in 1usize..40,
            root in any::<bool>(),
        ) {
            let lib = Library::build(LibraryMode::Combined, &["a", "b"]).unwrap();
            let cfg = ConstraintConfig { max_length, min_length: min_length.min(max_length), root_implication: root };
            prop_assume!(cfg.validate(&lib).is_ok());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut state = SlotState::start();
            let mut t = Traversal::default();
            let mut mask = vec![false; lib.len()];
            while !state.is_complete() {
                state.fill_mask(&lib, &cfg, &mut mask);
                let valid: Vec<usize> = (0..lib.len()).filter(|&i| mask[i]).collect();
                prop_assert!(!valid.is_empty());
                let id = valid[rng.random_range(0..valid.len())];
                state.advance(lib.kind(id).unwrap());
                t.push(id);
            }
            prop_assert!(t.is_complete(&lib));
            prop_assert!(t.len() <= max_length);
            prop_assert!(t.len() >= cfg.min_length);
            if root {
                let kinds: Vec<TokenKind> = t.tokens().iter().map(|&i| lib.kind(i).unwrap()).collect();
                prop_assert!(kinds[0].is_implication());
                prop_assert!(kinds[1..].iter().all(|k| !k.is_implication()));
            }
        }
    }
}
