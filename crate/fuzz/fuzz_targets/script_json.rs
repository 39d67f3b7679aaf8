#![no_main]

use g2mut::proof::ProofScript;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(script) = serde_json::from_slice::<ProofScript>(data) {
        let text = serde_json::to_string(&script).unwrap();
        let back: ProofScript = serde_json::from_str(&text).unwrap();
        assert_eq!(back, script);
    }
});
