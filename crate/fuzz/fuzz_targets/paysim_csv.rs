#![no_main]

use fuzzy_dsr::data::{engineer_features, read_paysim_csv, write_paysim_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_paysim_csv(data) {
        let mut buf = Vec::new();
        write_paysim_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_paysim_csv(buf.as_slice()).unwrap(), rows);
        let _ = engineer_features(&rows);
    }
});
