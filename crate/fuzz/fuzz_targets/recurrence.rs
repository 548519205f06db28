#![no_main]
use libfuzzer_sys::fuzz_target;
use qnth::format::{parse_recurrence, recurrence_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = parse_recurrence(text) {
        // Anything accepted must survive a round trip.
        let back = parse_recurrence(&recurrence_to_json(&rec)).expect("reparse");
        assert_eq!(back, rec);
    }
});
