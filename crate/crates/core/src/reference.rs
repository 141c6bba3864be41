//! Bundled reference data: the Italian area registry, tier timeline and
//! holiday calendar, January 2021 regional figures, regional GDP shares,
//! observed monthly GDP, and a 21-region synthetic scenario.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::calendar::HolidayCalendar;
use crate::geo::{AreaId, GeoHierarchy};
use crate::nowcast::{parse_monthly, GdpWeights, MonthlySeries, SeriesKind};
use crate::scenario::{ScenarioConfig, ScenarioError};
use crate::text::{header_matches, numbered_lines, split_fields};
use crate::timeline::TierTimeline;

const FILES: &[(&str, &str)] = &[
    ("italy_areas.csv", include_str!("../data/italy_areas.csv")),
    ("italy_timeline.csv", include_str!("../data/italy_timeline.csv")),
    ("italy_holidays.txt", include_str!("../data/italy_holidays.txt")),
    ("jan2021_regions.csv", include_str!("../data/jan2021_regions.csv")),
    ("gdp_weights.csv", include_str!("../data/gdp_weights.csv")),
    ("gdp_observed.csv", include_str!("../data/gdp_observed.csv")),
    ("scenario/scenario.toml", include_str!("../data/scenario/scenario.toml")),
    ("scenario/areas.csv", include_str!("../data/scenario/areas.csv")),
    ("scenario/timeline.csv", include_str!("../data/scenario/timeline.csv")),
    ("scenario/flows.csv", include_str!("../data/scenario/flows.csv")),
];

/// Names of the bundled files, relative to the data directory.
pub fn embedded_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// Contents of a bundled file by its data-directory relative name.
pub fn embedded(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn file(name: &str) -> &'static str {
    embedded(name).expect("bundled file list")
}

pub fn italy_areas() -> GeoHierarchy {
    GeoHierarchy::parse(file("italy_areas.csv")).expect("bundled registry is valid")
}

pub fn italy_timeline() -> TierTimeline {
    TierTimeline::parse(file("italy_timeline.csv")).expect("bundled timeline is valid")
}

pub fn italy_holidays() -> HolidayCalendar {
    HolidayCalendar::parse(file("italy_holidays.txt")).expect("bundled calendar is valid")
}

pub fn gdp_weights() -> GdpWeights {
    GdpWeights::parse(file("gdp_weights.csv")).expect("bundled weights are valid")
}

/// Observed monthly GDP index, January 2020 = 100.
pub fn observed_gdp() -> MonthlySeries {
    parse_monthly(file("gdp_observed.csv"))
        .expect("bundled GDP is valid")
        .remove(&SeriesKind::Gdp)
        .expect("bundled file holds GDP")
}

/// The bundled 21-region synthetic scenario.
pub fn scenario() -> ScenarioConfig {
    ScenarioConfig::from_toml(file("scenario/scenario.toml"), |name| {
        let key = name.strip_prefix("../").map_or_else(|| format!("scenario/{name}"), str::to_string);
        embedded(&key)
            .map(str::to_string)
            .ok_or_else(|| ScenarioError::InvalidConfig(format!("no bundled file `{name}`")))
    })
    .expect("bundled scenario is valid")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionTableError {
    #[error("regional table header mismatch")]
    HeaderMismatch,
    #[error("regional table line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

/// One row of the January 2021 regional table.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionJanuary {
    pub region: AreaId,
    pub name: String,
    /// Mobility variation versus January 2020, percent.
    pub variation_pct: f64,
    pub red_days: u32,
    pub orange_days: u32,
    pub yellow_days: u32,
    pub cases_per_100k: f64,
}

const REGION_HEADER: [&str; 7] =
    ["region", "name", "variation_pct", "red_days", "orange_days", "yellow_days", "cases_per_100k"];

pub fn parse_region_table(text: &str, h: &GeoHierarchy) -> Result<Vec<RegionJanuary>, RegionTableError> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, hd)) if header_matches(hd, &REGION_HEADER, &[]) => {}
        _ => return Err(RegionTableError::HeaderMismatch),
    }
    let mut rows = Vec::new();
    for (line, raw) in lines {
        let bad = |reason: String| RegionTableError::BadLine { line, reason };
        let f = split_fields(raw);
        if f.len() != 7 {
            return Err(bad(format!("expected 7 fields, found {}", f.len())));
        }
        let num = |i: usize| {
            f[i].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(format!("bad number `{}`", f[i])))
        };
        let days = |i: usize| f[i].parse::<u32>().map_err(|_| bad(format!("bad day count `{}`", f[i])));
        rows.push(RegionJanuary {
            region: h.require(f[0]).map_err(|e| bad(e.to_string()))?.clone(),
            name: f[1].to_string(),
            variation_pct: num(2)?,
            red_days: days(3)?,
            orange_days: days(4)?,
            yellow_days: days(5)?,
            cases_per_100k: num(6)?,
        });
    }
    Ok(rows)
}

pub fn jan2021_regions() -> Vec<RegionJanuary> {
    parse_region_table(file("jan2021_regions.csv"), &italy_areas()).expect("bundled table is valid")
}

/// `(variation, cases)` maps keyed by region, as used for rank correlation.
pub fn jan2021_maps() -> (BTreeMap<AreaId, f64>, BTreeMap<AreaId, f64>) {
    let rows = jan2021_regions();
    (
        rows.iter().map(|r| (r.region.clone(), r.variation_pct)).collect(),
        rows.iter().map(|r| (r.region.clone(), r.cases_per_100k)).collect(),
    )
}
