#![no_main]
use libfuzzer_sys::fuzz_target;
use qnth::format::parse_indices;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(idx) = parse_indices(text) {
        let joined = idx.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_indices(&joined).unwrap(), idx);
    }
});
