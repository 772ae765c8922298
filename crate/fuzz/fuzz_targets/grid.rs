#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(counts) = canard_scope::sweep::parse_grid(text) {
        assert!(counts.iter().all(|&c| c >= 1));
    }
});
