#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::scenario::Manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = Manifest::parse_csv(text) {
        let _ = Manifest::parse_csv(&m.to_csv()).unwrap();
    }
});
