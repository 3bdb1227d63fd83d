#![no_main]

use libfuzzer_sys::fuzz_target;
use magneflow::magnetic_model::{omega_from_rows, skew_normal_form, OmegaJson};

fuzz_target!(|data: &[u8]| {
    let Ok(parsed) = serde_json::from_slice::<OmegaJson>(data) else { return };
    if parsed.omega.len() > 16 {
        return;
    }
    let Ok(omega) = omega_from_rows(&parsed.omega) else { return };
    if let Ok(nf) = skew_normal_form(&omega) {
        assert!(nf.alphas.iter().all(|a| !a.is_nan()));
    }
});
