#![no_main]

use libfuzzer_sys::fuzz_target;
use magneflow::flow::{prepare_initial, State};
use magneflow::magnetic_model::MagneticModel;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(init) = State::from_json_str(s) else { return };
    let n = init.x.len().saturating_sub(1);
    let Ok(model) = MagneticModel::new(n, vec![Default::default(); (n + 1) / 2]) else { return };
    if let Ok(st) = prepare_initial(&model, &init, true) {
        let (c1, c2) = st.constraint_residuals();
        assert!(c1.abs() < 1e-9 && c2.abs() < 1e-9);
    }
});
