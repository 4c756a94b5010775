#![no_main]

use fuzzy_dsr::controller::Controller;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ctrl) = Controller::from_checkpoint_json(text) {
        let json = ctrl.to_checkpoint_json();
        assert_eq!(Controller::from_checkpoint_json(&json).unwrap().to_checkpoint_json(), json);
    }
});
