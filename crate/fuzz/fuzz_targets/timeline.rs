#![no_main]

use chrono::Duration;
use libfuzzer_sys::fuzz_target;
use tierlab::timeline::TierTimeline;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = TierTimeline::parse(text) else { return };
    for tr in t.all_transitions() {
        assert_eq!(t.tier_at(&tr.region, tr.date - Duration::days(1)).unwrap(), tr.from);
        assert_eq!(t.tier_at(&tr.region, tr.date).unwrap(), tr.to);
    }
});
