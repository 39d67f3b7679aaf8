#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(d) = g2mut_cli::parse_config(s) {
            if let Some([a0, a1, b0, b1]) = d.probe_box {
                assert!(a0 <= a1 && b0 <= b1);
            }
        }
    }
});
