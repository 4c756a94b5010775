use rand::{Rng, RngCore};

use super::{Completion, ExprError, Library, Traversal};

/// Makes an S-implication the root of a complete traversal.
///
/// The first implication token is swapped into index 0; if there is none,
/// one is inserted there (drawn uniformly when the library has several).
/// The result is then re-completed: a dangling suffix is truncated, and
/// missing slots are filled with uniformly drawn terminals.
pub fn enforce_root_implication<R: RngCore + ?Sized>(
    t: &Traversal,
    lib: &Library,
    rng: &mut R,
) -> Result<Traversal, ExprError> {
    let implications = lib.implication_ids();
    if implications.is_empty() {
        return Err(ExprError::MissingImplication);
    }
    match t.completion(lib)? {
        Completion::Complete => {}
        Completion::Open(open) => return Err(ExprError::IncompleteTraversal { open }),
        Completion::Dangling { at } => return Err(ExprError::DanglingTokens { at, len: t.len() }),
    }

    let mut tokens = t.tokens().to_vec();
    let first_impl = tokens.iter().position(|&id| lib.kind(id).is_ok_and(|k| k.is_implication()));
    match first_impl {
        Some(0) => return Ok(t.clone()),
        Some(j) => tokens.swap(0, j),
        None => {
            let pick = implications[rng.random_range(0..implications.len())];
            tokens.insert(0, pick);
        }
    }

    let mut open = 1usize;
    let mut keep = tokens.len();
    for (i, &id) in tokens.iter().enumerate() {
        open = open - 1 + lib.kind(id)?.arity();
        if open == 0 {
            keep = i + 1;
            break;
        }
    }
    tokens.truncate(keep);
    if open > 0 {
        let terminals = lib.terminal_ids();
        for _ in 0..open {
            tokens.push(terminals[rng.random_range(0..terminals.len())]);
        }
    }
    Ok(Traversal::new(tokens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::testutil::random_traversal;
    use crate::expr::{LibraryMode, TokenKind};
    use crate::fuzzy::Semantics;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lib() -> Library {
        Library::build(LibraryMode::Single(Semantics::Lukasiewicz), &["A", "B"]).unwrap()
    }

    fn ids(lib: &Library, names: &[&str]) -> Traversal {
        Traversal::new(names.iter().map(|n| lib.id_by_name(n).unwrap()).collect())
    }

    #[test]
    fn rooted_input_unchanged() {
        let lib = lib();
        let t = ids(&lib, &["implies_lk", "A", "B"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(enforce_root_implication(&t, &lib, &mut rng).unwrap(), t);
    }

    #[test]
    fn insertion_opens_one_slot() {
        let lib = lib();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = enforce_root_implication(&ids(&lib, &["not", "A"]), &lib, &mut rng).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(&out.tokens()[..3], ids(&lib, &["implies_lk", "not", "A"]).tokens());
        assert!(lib.kind(out.tokens()[3]).unwrap().is_terminal());
        assert!(out.is_complete(&lib));
    }

    #[test]
    fn swap_keeps_completeness() {
        let lib = lib();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = ids(&lib, &["and_lk", "A", "implies_lk", "A", "B"]);
        let out = enforce_root_implication(&t, &lib, &mut rng).unwrap();
        assert_eq!(out, ids(&lib, &["implies_lk", "A", "and_lk", "A", "B"]));
    }

    #[test]
    fn swap_under_unary_root() {
        let lib = lib();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = ids(&lib, &["not", "implies_lk", "A", "B"]);
        let out = enforce_root_implication(&t, &lib, &mut rng).unwrap();
        assert_eq!(out, ids(&lib, &["implies_lk", "not", "A", "B"]));
        let t = ids(&lib, &["or_lk", "A", "not", "implies_lk", "B", "A"]);
        let out = enforce_root_implication(&t, &lib, &mut rng).unwrap();
        assert_eq!(out, ids(&lib, &["implies_lk", "A", "not", "or_lk", "B", "A"]));
    }

    #[test]
    fn errors() {
        let lib = lib();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = enforce_root_implication(&ids(&lib, &["and_lk", "A"]), &lib, &mut rng).unwrap_err();
        assert!(matches!(err, ExprError::IncompleteTraversal { .. }));
        let no_impl = Library::custom(vec![TokenKind::Neg], &["A"]).unwrap();
        let err = enforce_root_implication(&Traversal::new(vec![1]), &no_impl, &mut rng).unwrap_err();
        assert_eq!(err, ExprError::MissingImplication);
    }

    proptest! {
        #[test]
        fn output_is_complete_and_rooted(seed in any::<u64>(), max_len in 1usize..30) {
            let lib = Library::build(LibraryMode::Combined, &["a", "b", "c"]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_traversal(&lib, max_len, &mut rng);
            let out = enforce_root_implication(&t, &lib, &mut rng).unwrap();
            prop_assert!(out.is_complete(&lib));
            prop_assert!(lib.kind(out.tokens()[0]).unwrap().is_implication());
        }
    }
}
