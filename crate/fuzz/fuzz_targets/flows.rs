#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::reference;
use tierlab::scenario::parse_flows;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_flows(text, &reference::italy_areas());
    }
});
