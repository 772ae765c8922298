#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pr) = canard_scope::io::parse_physical_json(text) {
        if let Ok(nd) = pr.nondimensionalize() {
            assert!(nd.scales.t0 > 0.0);
        }
    }
});
