use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use tierlab::geo::{AreaId, AreaLevel, GeoHierarchy};
use tierlab::impact::{period_variation, transition_impact_overall, week_over_week, Baseline, DayRange};
use tierlab::indicators::{aggregate_counts, aggregate_indicators, IndicatorSet};
use tierlab::odm::{classify_direction, Bucket, Direction, OdmRecord};
use tierlab::reference;

fn provinces(h: &GeoHierarchy) -> Vec<AreaId> {
    h.areas_at(AreaLevel::Province).cloned().collect()
}

fn areas() -> GeoHierarchy {
    reference::scenario().areas
}

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 10, 30).unwrap()
}

/// `(day offset, origin index, destination index or None for EXT, count)`.
fn raw_records(n: usize, days: i64) -> impl Strategy<Value = Vec<(i64, usize, Option<usize>, u64)>> {
    prop::collection::vec((0..days, 0usize..500, prop::option::weighted(0.9, 0usize..500), 0u64..5000), 1..n)
}

fn build(h: &GeoHierarchy, raw: &[(i64, usize, Option<usize>, u64)]) -> Vec<OdmRecord> {
    let ps = provinces(h);
    raw.iter()
        .map(|&(d, o, dest, c)| OdmRecord {
            period_start: (start() + Duration::days(d)).and_hms_opt(0, 0, 0).unwrap().and_utc(),
            bucket: Bucket::Day,
            origin: ps[o % ps.len()].clone(),
            destination: dest.map_or_else(AreaId::external, |i| ps[i % ps.len()].clone()),
            count: c,
        })
        .collect()
}

fn raw_at(set: &IndicatorSet, area: &AreaId, dir: Direction) -> Vec<f64> {
    set.get(area, dir).unwrap().raw_points().map(|(_, v)| v).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregation_ignores_partition_and_order(
        raw in raw_records(300, 10),
        cuts in prop::collection::vec(0usize..300, 0..5),
        level in prop::sample::select(vec![AreaLevel::Province, AreaLevel::Region, AreaLevel::Country]),
    ) {
        let h = areas();
        let records = build(&h, &raw);
        let whole = aggregate_indicators(&records, &h, level, Bucket::Day, None).unwrap();

        let mut bounds: Vec<usize> = cuts.iter().map(|c| c % (records.len() + 1)).collect();
        bounds.extend([0, records.len()]);
        bounds.sort_unstable();
        let mut parts = bounds.windows(2).rev().map(|w| &records[w[0]..w[1]]);
        let mut merged = aggregate_counts(parts.next().unwrap(), &h, level, Bucket::Day, None).unwrap();
        for p in parts {
            merged.merge(aggregate_counts(p, &h, level, Bucket::Day, None).unwrap());
        }
        prop_assert_eq!(merged.into_set(), whole.clone());

        let mut reversed = records.clone();
        reversed.reverse();
        prop_assert_eq!(aggregate_indicators(&reversed, &h, level, Bucket::Day, None).unwrap(), whole);
    }

    #[test]
    fn domestic_flows_are_conserved(raw in raw_records(300, 7)) {
        let h = areas();
        let raw: Vec<_> = raw.into_iter().map(|(d, o, dest, c)| (d, o, Some(dest.unwrap_or(o)), c)).collect();
        let records = build(&h, &raw);
        for level in [AreaLevel::Province, AreaLevel::Region] {
            let set = aggregate_indicators(&records, &h, level, Bucket::Day, None).unwrap();
            let national: Vec<f64> = set.national().raw_points().map(|(_, v)| v).collect();
            let mut acc = vec![0.0; national.len()];
            for area in h.areas_at(level) {
                let i = raw_at(&set, area, Direction::Internal);
                let a = raw_at(&set, area, Direction::Inward);
                let b = raw_at(&set, area, Direction::Outward);
                for k in 0..acc.len() {
                    acc[k] += i[k] + 0.5 * (a[k] + b[k]);
                }
            }
            prop_assert_eq!(acc, national);
        }
    }

    #[test]
    fn every_record_has_one_direction(raw in raw_records(50, 3), focal_ix in 0usize..1000) {
        let h = areas();
        let records = build(&h, &raw);
        let all: Vec<AreaId> = AreaLevel::ALL.iter().flat_map(|l| h.areas_at(*l).cloned()).collect();
        let focal = &all[focal_ix % all.len()];
        for r in &records {
            let dir = classify_direction(r, focal, &h).unwrap();
            let o = h.lift(&r.origin, focal.level()).unwrap() == *focal;
            let d = h.lift(&r.destination, focal.level()).unwrap() == *focal;
            let expected = match (o, d) {
                (true, true) => Some(Direction::Internal),
                (true, false) => Some(Direction::Outward),
                (false, true) => Some(Direction::Inward),
                (false, false) => None,
            };
            prop_assert_eq!(dir, expected);
            if focal.level() == AreaLevel::Country && !r.destination.is_external() {
                prop_assert_eq!(dir, Some(Direction::Internal));
            }
        }
    }

    #[test]
    fn percent_outputs_are_scale_invariant(
        counts in prop::collection::vec(1u64..10_000, 21 * 40),
        reference in prop::sample::select(vec![1e-6, 0.37, 3.0, 12_345.678, 9.9e8]),
    ) {
        let h = areas();
        let timeline = reference::italy_timeline();
        let first = NaiveDate::from_ymd_opt(2020, 11, 1).unwrap();
        let regions: Vec<AreaId> = h.areas_at(AreaLevel::Region).cloned().collect();
        let records: Vec<OdmRecord> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let p = regions[i % 21].clone();
                OdmRecord {
                    period_start: (first + Duration::days((i / 21) as i64)).and_hms_opt(0, 0, 0).unwrap().and_utc(),
                    bucket: Bucket::Day,
                    origin: p.clone(),
                    destination: p,
                    count: c,
                }
            })
            .collect();
        let raw = aggregate_indicators(&records, &h, AreaLevel::Region, Bucket::Day, None).unwrap();
        let scaled = raw.clone().normalize(reference).unwrap();
        let transitions = timeline.all_transitions();
        for kind in tierlab::impact::observed_kinds(&transitions) {
            for baseline in [Baseline::PreBaseline, Baseline::PostBaseline] {
                let a = transition_impact_overall(&raw, &transitions, kind, Direction::Total, 7, baseline);
                let b = transition_impact_overall(&scaled, &transitions, kind, Direction::Total, 7, baseline);
                match (a, b) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a.percent.to_bits(), b.percent.to_bits()),
                    (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
                }
            }
        }
        let day = first + Duration::days(20);
        let r0 = DayRange::new(first, first + Duration::days(6)).unwrap();
        let r1 = DayRange::new(day, day + Duration::days(6)).unwrap();
        for (a, b) in raw.series().zip(scaled.series()).filter(|(a, _)| a.direction() != Direction::Inward && a.direction() != Direction::Outward) {
            prop_assert_eq!(week_over_week(a, day).unwrap().to_bits(), week_over_week(b, day).unwrap().to_bits());
            prop_assert_eq!(period_variation(a, r0, r1).unwrap().to_bits(), period_variation(b, r0, r1).unwrap().to_bits());
        }
    }
}
