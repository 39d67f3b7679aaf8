#![no_main]

use g2mut::sheaf::parse_expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Err(e) = parse_expr(s) {
            assert!(e.position <= s.len());
        }
    }
});
