#![no_main]
use libfuzzer_sys::fuzz_target;
use nlac_harness::{format_field, parse_field};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(dump) = parse_field(&text) {
        let back = parse_field(&format_field(&dump.field, dump.t)).unwrap();
        assert_eq!(back, dump);
    }
});
