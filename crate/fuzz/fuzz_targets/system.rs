#![no_main]
use libfuzzer_sys::fuzz_target;
use qnth::format::{parse_system, system_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sys) = parse_system(text) {
        let back = parse_system(&system_to_json(&sys)).expect("reparse");
        assert_eq!(back, sys);
    }
});
