#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = canard_scope::io::parse_sweep_spec_json(text) {
        for r in [spec.a, spec.p, spec.m] {
            assert!(r.count >= 1 && r.min <= r.max);
        }
    }
});
