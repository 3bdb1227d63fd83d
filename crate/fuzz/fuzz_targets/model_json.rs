#![no_main]

use libfuzzer_sys::fuzz_target;
use magneflow::magnetic_model::MagneticModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = serde_json::from_slice::<MagneticModel>(data) {
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<MagneticModel>(&text).unwrap(), m);
    }
});
