#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::indicators::IndicatorSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = IndicatorSet::parse_csv(text) {
        let _ = IndicatorSet::parse_csv(&set.to_csv()).unwrap();
    }
});
