#![no_main]

use canard_scope::gsp::{check_conditions, Mode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pr) = canard_scope::io::parse_dimensionless_json(text) {
        // accepted sets must survive the cheap analysis path
        let _ = check_conditions(&pr, Mode::Strict);
        let _ = check_conditions(&pr, Mode::Sharp);
    }
});
