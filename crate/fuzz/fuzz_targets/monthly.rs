#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::nowcast::{parse_monthly, write_monthly};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(series) = parse_monthly(text) {
        let again = parse_monthly(&write_monthly(series.values())).unwrap();
        assert_eq!(again, series);
    }
});
