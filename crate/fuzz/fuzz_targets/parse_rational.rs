#![no_main]

use libfuzzer_sys::fuzz_target;
use magneflow::exactpoly::{format_rational, parse_rational, parse_rational_list};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(s) {
        let text = format_rational(&r);
        assert_eq!(parse_rational(&text).unwrap(), r);
    }
    let _ = parse_rational_list(s);
});
