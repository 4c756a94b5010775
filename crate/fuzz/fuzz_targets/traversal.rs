#![no_main]

use fuzzy_dsr::expr::{traversal_from_tree, tree_from_traversal, Library, LibraryMode, Traversal};
use libfuzzer_sys::fuzz_target;

// Arbitrary token ids, including out-of-range ones.
fuzz_target!(|data: &[u8]| {
    let lib = Library::build(LibraryMode::Combined, &["a", "b", "c"]).unwrap();
    let t = Traversal::new(data.iter().map(|&b| usize::from(b % 16)).collect());
    if let Ok(tree) = tree_from_traversal(&t, &lib) {
        assert_eq!(traversal_from_tree(&tree, &lib).unwrap(), t);
        assert!(tree.complexity() as usize >= tree.len());
    }
});
