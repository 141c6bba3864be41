#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::reference::{italy_areas, parse_region_table};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_region_table(text, &italy_areas());
    }
});
