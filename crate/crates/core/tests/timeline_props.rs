use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use tierlab::geo::{AreaId, AreaLevel};
use tierlab::reference;
use tierlab::timeline::{Tier, TierTimeline, TimelineEntry};

fn assert_replays(t: &TierTimeline) {
    let (start, end) = t.coverage();
    for region in t.regions() {
        let mut d = start;
        while d <= end {
            let hits = t.entries(region).unwrap().iter().filter(|e| e.start <= d && d <= e.end).count();
            assert_eq!(hits, 1, "{region} {d}");
            assert!(t.tier_at(region, d).is_ok());
            d += Duration::days(1);
        }
        for tr in t.detect_transitions(region).unwrap() {
            assert_eq!(t.tier_at(region, tr.date - Duration::days(1)).unwrap(), tr.from);
            assert_eq!(t.tier_at(region, tr.date).unwrap(), tr.to);
            assert_ne!(tr.from, tr.to);
        }
        let mut d = start + Duration::days(1);
        let changes = t.detect_transitions(region).unwrap();
        while d <= end {
            let changed = t.tier_at(region, d).unwrap() != t.tier_at(region, d - Duration::days(1)).unwrap();
            assert_eq!(changed, changes.iter().any(|c| c.date == d), "{region} {d}");
            d += Duration::days(1);
        }
    }
}

#[test]
fn bundled_timeline_is_total_and_replays() {
    assert_replays(&reference::italy_timeline());
    assert_replays(&reference::scenario().timeline);
}

fn tiers() -> impl Strategy<Value = Tier> {
    prop::sample::select(vec![Tier::Yellow, Tier::Orange, Tier::Red, Tier::White])
}

proptest! {
    #[test]
    fn random_timelines_replay(
        regions in prop::collection::vec(prop::collection::vec((1i64..20, tiers()), 1..8), 1..4),
    ) {
        let start = NaiveDate::from_ymd_opt(2020, 11, 6).unwrap();
        let span: i64 = regions.iter().map(|r| r.iter().map(|s| s.0).sum::<i64>()).max().unwrap();
        let codes = ["ITC1", "ITC4", "ITF3"];
        let mut entries = Vec::new();
        for (code, segments) in codes.iter().zip(&regions) {
            let region = AreaId::new(*code, AreaLevel::Region).unwrap();
            let mut s = start;
            for (i, (len, tier)) in segments.iter().enumerate() {
                let last = i + 1 == segments.len();
                let e = if last { start + Duration::days(span - 1) } else { s + Duration::days(len - 1) };
                entries.push(TimelineEntry { region: region.clone(), start: s, end: e, tier: *tier, note: None });
                s = e + Duration::days(1);
            }
        }
        let t = TierTimeline::new(entries).unwrap();
        assert_replays(&t);
    }
}
