use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use tierlab::geo::{AreaId, AreaLevel};
use tierlab::nowcast::{
    default_targets, fit_energy_mobility, fit_gdp_energy, nowcast_gdp, transition_gdp_impact, GdpWeights,
    MonthlySeries, NowcastError, SeriesKind, YearMonth, ENERGY, ENERGY_SQ, MOBILITY,
};
use tierlab::reference;
use tierlab::regress::Interval;
use tierlab::timeline::{Tier, Transition};

const ENERGY_2019: [f64; 12] = [102.1, 101.6, 101.9, 101.2, 101.0, 101.4, 101.8, 101.1, 100.9, 100.6, 100.8, 100.4];
const ENERGY_2020: [f64; 12] = [100.0, 97.2, 85.3, 75.1, 80.4, 88.2, 95.0, 93.1, 97.8, 96.9, 94.2, 95.1];
const MOBILITY_2020: [f64; 12] = [100.0, 95.4, 45.2, 25.3, 50.1, 75.6, 85.2, 82.3, 88.1, 84.7, 64.9, 60.2];

fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).unwrap()
}

fn energy() -> MonthlySeries {
    let pts = ENERGY_2019.iter().enumerate().map(|(i, v)| (ym(2019, i as u32 + 1), *v));
    MonthlySeries::new(
        SeriesKind::Energy,
        pts.chain(ENERGY_2020.iter().enumerate().map(|(i, v)| (ym(2020, i as u32 + 1), *v))),
    )
}

fn mobility() -> MonthlySeries {
    let pts = MOBILITY_2020.iter().enumerate().map(|(i, v)| (ym(2020, i as u32 + 1), *v));
    MonthlySeries::new(SeriesKind::Mobility, pts.chain([(ym(2021, 1), 62.4)]))
}

type Window = Option<(YearMonth, YearMonth)>;

fn windows() -> (Window, Window) {
    (Some((ym(2019, 1), ym(2020, 8))), Some((ym(2020, 1), ym(2020, 12))))
}

#[test]
fn forecast_rows_have_nested_positive_intervals_and_repeat_exactly() {
    let (gdp, e, m) = (reference::observed_gdp(), energy(), mobility());
    let (w1, w2) = windows();
    let fit1 = fit_gdp_energy(&gdp, &e, w1).unwrap();
    let fit2 = fit_energy_mobility(&e, &m, w2).unwrap();
    let targets = default_targets(&gdp, &e, &m);
    assert_eq!(targets.first(), Some(&ym(2020, 9)));
    assert_eq!(targets.last(), Some(&ym(2021, 1)));
    let table = nowcast_gdp(&fit1, &fit2, &e, &m, &targets).unwrap();
    assert_eq!(table, nowcast_gdp(&fit1, &fit2, &e, &m, &targets).unwrap());
    for r in &table.rows {
        assert!(r.half_width.unwrap() > 0.0);
    }
    for month in 9..=12 {
        let x = e.get(ym(2020, month)).unwrap();
        let row = [(ENERGY, x), (ENERGY_SQ, x * x)];
        let c = fit1.predict(&row, Interval::Confidence95).unwrap().half_width.unwrap();
        let p = fit1.predict(&row, Interval::Prediction95).unwrap().half_width.unwrap();
        assert!(c <= p);
    }
    let c = fit2.predict(&[(MOBILITY, 62.4)], Interval::Confidence95).unwrap().half_width.unwrap();
    let p = fit2.predict(&[(MOBILITY, 62.4)], Interval::Prediction95).unwrap().half_width.unwrap();
    assert!(c <= p);
}

#[test]
fn unnormalised_inputs_are_rejected() {
    let scaled = MonthlySeries::new(SeriesKind::Energy, energy().points.iter().map(|(k, v)| (*k, v * 24_000.0)));
    let (w1, _) = windows();
    let err = fit_gdp_energy(&reference::observed_gdp(), &scaled, w1).unwrap_err();
    assert!(matches!(err, NowcastError::MissingBasePeriod { .. }));
    let rebased = scaled.rebased(ym(2020, 1)).unwrap();
    assert!(fit_gdp_energy(&reference::observed_gdp(), &rebased, w1).is_ok());
}

fn region(code: &str) -> AreaId {
    AreaId::new(code, AreaLevel::Region).unwrap()
}

fn weights(pairs: &[(&str, f64)]) -> GdpWeights {
    GdpWeights::new(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()).unwrap()
}

proptest! {
    #[test]
    fn idle_regions_do_not_move_the_weighted_average(
        levels in prop::collection::vec((50.0f64..150.0, 50.0f64..150.0), 3),
        share in 0.05f64..0.9,
    ) {
        let start = NaiveDate::from_ymd_opt(2020, 11, 1).unwrap();
        let date = start + Duration::days(7);
        let codes = ["ITC1", "ITC4", "ITF3"];
        let daily: BTreeMap<AreaId, BTreeMap<NaiveDate, f64>> = codes
            .iter()
            .zip(&levels)
            .map(|(c, (pre, post))| {
                let s = (0..14).map(|i| (start + Duration::days(i), if i < 7 { *pre } else { *post })).collect();
                (region(c), s)
            })
            .collect();
        let transitions: Vec<Transition> = codes[..2]
            .iter()
            .map(|c| Transition { region: region(c), date, from: Tier::Yellow, to: Tier::Red })
            .collect();
        let a = share * 0.5;
        let with_idle = weights(&[("ITC1", a), ("ITC4", share - a), ("ITF3", 1.0 - share)]);
        let without = weights(&[("ITC1", 0.5), ("ITC4", 0.5)]);
        let r1 = transition_gdp_impact(&daily, &transitions, &with_idle, 7).unwrap();
        let r2 = transition_gdp_impact(&daily, &transitions, &without, 7).unwrap();
        prop_assert_eq!(r1.len(), 1);
        prop_assert!((r1[0].percent - r2[0].percent).abs() < 1e-12);

        let uniform: BTreeMap<AreaId, BTreeMap<NaiveDate, f64>> =
            daily.keys().map(|k| (k.clone(), daily[&region("ITC1")].clone())).collect();
        let one = transition_gdp_impact(&uniform, &transitions, &with_idle, 7).unwrap()[0].percent;
        let expected = 100.0 * (levels[0].1 - levels[0].0) / levels[0].0 / 7.0;
        prop_assert!((one - expected).abs() < 1e-9 * expected.abs().max(1.0));
    }
}
