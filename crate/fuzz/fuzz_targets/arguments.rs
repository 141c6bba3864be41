#![no_main]

use libfuzzer_sys::fuzz_target;
use tierlab::impact::{Baseline, DayRange};
use tierlab::indicators::HourWindow;
use tierlab::nowcast::{parse_month_range, YearMonth};
use tierlab::odm::{Bucket, Direction};
use tierlab::timeline::{Tier, TransitionKind};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = s.parse::<DayRange>() {
        assert_eq!(r.to_string().parse::<DayRange>().unwrap(), r);
    }
    if let Ok(k) = s.parse::<TransitionKind>() {
        assert_eq!(k.to_string().parse::<TransitionKind>().unwrap(), k);
    }
    if let Ok(m) = s.parse::<YearMonth>() {
        assert_eq!(m.to_string().parse::<YearMonth>().unwrap(), m);
    }
    let _ = s.parse::<HourWindow>();
    let _ = s.parse::<Baseline>();
    let _ = s.parse::<Bucket>();
    let _ = s.parse::<Direction>();
    let _ = s.parse::<Tier>();
    let _ = parse_month_range(s);
});
