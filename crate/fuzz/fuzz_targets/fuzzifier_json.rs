#![no_main]

use fuzzy_dsr::data::FuzzifierModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = FuzzifierModel::from_json(text) {
        assert_eq!(FuzzifierModel::from_json(&model.to_json()).unwrap(), model);
        for (_, column) in &model.columns {
            let _ = column.transform(f64::MAX);
        }
    }
});
