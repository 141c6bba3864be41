use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use thiserror::Error;

use super::ols::{DesignMatrix, RegressError};
use crate::calendar::{is_weekend_or_holiday, HolidayCalendar};
use crate::geo::{AreaId, AreaLevel, GeoError, GeoHierarchy};
use crate::impact::DayRange;
use crate::indicators::{DayValues, IndicatorSet};
use crate::odm::Direction;
use crate::timeline::{TierTimeline, TimelineError, TransitionKind};

pub const WEEKEND_COLUMN: &str = "weekend/bank holiday";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxationError {
    #[error("no tier coverage for {area} on {day}: {source}")]
    InsufficientCoverage { area: String, day: NaiveDate, source: TimelineError },
    #[error("indicator set is at {0} level, expected province")]
    WrongLevel(AreaLevel),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// One province-day of the relaxation regression.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationObservation {
    pub province: AreaId,
    pub day: NaiveDate,
    /// `v(day)/v(day−7) − 1`.
    pub wow_change: f64,
    /// Tier a week earlier and today, when they differ.
    pub kind: Option<TransitionKind>,
    pub weekend: bool,
}

#[derive(Clone, Debug)]
pub struct RelaxationDesign {
    pub observations: Vec<RelaxationObservation>,
    pub design: DesignMatrix,
}

/// Week-over-week design over province Total series. Province-days lacking
/// either endpoint, or with a zero value a week earlier, are skipped. With
/// `region` set only that region's provinces enter.
pub fn build_relaxation_design(
    set: &IndicatorSet,
    timeline: &TierTimeline,
    cal: &HolidayCalendar,
    h: &GeoHierarchy,
    range: DayRange,
    region: Option<&AreaId>,
) -> Result<RelaxationDesign, RelaxationError> {
    if set.level() != AreaLevel::Province {
        return Err(RelaxationError::WrongLevel(set.level()));
    }
    let mut observations = Vec::new();
    for province in set.areas() {
        let parent = h.lift(province, AreaLevel::Region)?;
        if region.is_some_and(|r| *r != parent) {
            continue;
        }
        let series = set.get(province, Direction::Total).expect("every area has a total series");
        for day in range.days() {
            let prev_day = day - Duration::days(7);
            let (Some(cur), Some(prev)) = (series.day_value(day), series.day_value(prev_day)) else {
                continue;
            };
            if prev == 0.0 {
                continue;
            }
            let tier = |d: NaiveDate| {
                timeline.tier_at(&parent, d).map_err(|source| RelaxationError::InsufficientCoverage {
                    area: province.code().to_string(),
                    day: d,
                    source,
                })
            };
            let (from, to) = (tier(prev_day)?, tier(day)?);
            observations.push(RelaxationObservation {
                province: province.clone(),
                day,
                wow_change: cur / prev - 1.0,
                kind: (from != to).then(|| TransitionKind::new(from, to)),
                weekend: is_weekend_or_holiday(day, cal),
            });
        }
    }

    let mut dummies: BTreeMap<String, TransitionKind> = BTreeMap::new();
    for o in &observations {
        if let Some(k) = o.kind {
            dummies.insert(k.label(), k);
        }
    }
    let mut columns: Vec<(String, Vec<f64>)> = dummies
        .into_iter()
        .map(|(name, k)| {
            let col = observations.iter().map(|o| if o.kind == Some(k) { 1.0 } else { 0.0 }).collect();
            (name, col)
        })
        .collect();
    let weekend: Vec<f64> = observations.iter().map(|o| f64::from(u8::from(o.weekend))).collect();
    if weekend.contains(&0.0) && weekend.contains(&1.0) {
        columns.push((WEEKEND_COLUMN.to_string(), weekend));
    }
    let response = observations.iter().map(|o| o.wow_change).collect();
    let design = DesignMatrix::new(columns, response, true)?;
    Ok(RelaxationDesign { observations, design })
}
