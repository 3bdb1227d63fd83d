#![no_main]

use libfuzzer_sys::fuzz_target;
use magneflow::integral_family::IntegralFamily;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = IntegralFamily::from_json_str(s) {
        let text = f.to_json_value().to_string();
        assert_eq!(IntegralFamily::from_json_str(&text).unwrap(), f);
    }
});
