#![no_main]

use fuzzy_dsr::data::FuzzyDataset;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = FuzzyDataset::read_csv(data) {
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        assert_eq!(FuzzyDataset::read_csv(buf.as_slice()).unwrap(), ds);
    }
});
