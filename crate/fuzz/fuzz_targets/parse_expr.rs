#![no_main]

use fuzzy_dsr::data::FEATURE_COLUMNS;
use fuzzy_dsr::expr::{parse, render, Library, LibraryMode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let lib = Library::build(LibraryMode::Combined, &FEATURE_COLUMNS).unwrap();
    if let Ok(tree) = parse(text, &lib) {
        let again = parse(&render(&tree, &lib), &lib).expect("rendered text parses");
        assert_eq!(again, tree);
    }
});
