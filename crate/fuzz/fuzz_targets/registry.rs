#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::geo::{AreaLevel, GeoHierarchy};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = GeoHierarchy::parse(text) {
        for level in AreaLevel::ALL {
            for area in h.areas_at(level) {
                assert_eq!(h.lift(area, AreaLevel::Country).unwrap(), *h.country());
            }
        }
    }
});
