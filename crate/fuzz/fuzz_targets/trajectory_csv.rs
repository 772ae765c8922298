#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = canard_scope::io::parse_trajectory_csv(data) {
        assert!(table.t.windows(2).all(|w| w[0] < w[1]));
        let _ = canard_scope::signature::signature_from_series(&table.t, &table.x, 0.5);
    }
});
