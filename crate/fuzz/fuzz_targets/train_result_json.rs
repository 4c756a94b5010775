#![no_main]

use fuzzy_dsr::expr::tree_from_traversal;
use fuzzy_dsr::trainer::TrainResult;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(result) = TrainResult::from_json(text) else { return };
    let Ok(lib) = result.library() else { return };
    for entry in &result.hall_of_fame {
        let _ = tree_from_traversal(&entry.traversal, &lib);
    }
});
