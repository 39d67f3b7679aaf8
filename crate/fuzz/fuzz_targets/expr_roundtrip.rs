#![no_main]

use g2mut::sheaf::FilteredBundle;
use libfuzzer_sys::fuzz_target;

// Whatever parses must print to something that parses back to the same model.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(v) = FilteredBundle::parse(s) else { return };
    let printed = v.name();
    let again = FilteredBundle::parse(&printed).expect("printed expression reparses");
    assert!(v.same_model(&again), "{s:?} printed as {printed:?}");
    assert_eq!(again.name(), printed);
});
