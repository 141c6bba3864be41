#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::nowcast::GdpWeights;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = GdpWeights::parse(text) {
        assert!((w.sum() - 1.0).abs() <= 0.005);
    }
});
