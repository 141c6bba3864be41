//! Input resolution. A source written `@name` refers to a bundled data file,
//! read from `$TIERLAB_DATA_DIR/name` when that variable is set.

use std::path::{Path, PathBuf};

use tierlab::calendar::HolidayCalendar;
use tierlab::geo::GeoHierarchy;
use tierlab::indicators::IndicatorSet;
use tierlab::nowcast::{parse_monthly, GdpWeights, MonthlySeries, SeriesKind};
use tierlab::reference;
use tierlab::scenario::{ScenarioConfig, ScenarioError};
use tierlab::timeline::TierTimeline;

use crate::error::{input, CliError};

pub const DATA_DIR_VAR: &str = "TIERLAB_DATA_DIR";
pub const AREAS: &str = "@italy_areas.csv";
pub const TIMELINE: &str = "@italy_timeline.csv";
pub const HOLIDAYS: &str = "@italy_holidays.txt";
pub const WEIGHTS: &str = "@gdp_weights.csv";
pub const GDP: &str = "@gdp_observed.csv";
pub const SCENARIO: &str = "@scenario/scenario.toml";

pub fn read_path(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

pub fn read_source(source: &str) -> Result<String, CliError> {
    let Some(name) = source.strip_prefix('@') else {
        return read_path(Path::new(source));
    };
    if let Some(dir) = std::env::var_os(DATA_DIR_VAR) {
        return read_path(&PathBuf::from(dir).join(name));
    }
    reference::embedded(name).map(str::to_string).ok_or_else(|| input(format!("no bundled data file `{name}`")))
}

/// Resolves `rel` against the directory part of a bundled name.
fn join_name(base: &str, rel: &str) -> String {
    let mut parts: Vec<&str> = base.split('/').collect();
    parts.pop();
    for c in rel.split('/') {
        match c {
            "." | "" => {}
            ".." => {
                parts.pop();
            }
            other => parts.push(other),
        }
    }
    parts.join("/")
}

fn parsed<T, E: std::fmt::Display>(source: &str, parse: impl FnOnce(&str) -> Result<T, E>) -> Result<T, CliError> {
    parse(&read_source(source)?).map_err(|e| input(format!("{source}: {e}")))
}

pub fn areas(source: Option<&str>) -> Result<GeoHierarchy, CliError> {
    let source = source.unwrap_or(AREAS);
    parsed(source, GeoHierarchy::parse)
}

pub fn timeline(source: Option<&str>) -> Result<TierTimeline, CliError> {
    let source = source.unwrap_or(TIMELINE);
    parsed(source, TierTimeline::parse)
}

pub fn holidays(source: Option<&str>) -> Result<HolidayCalendar, CliError> {
    let source = source.unwrap_or(HOLIDAYS);
    parsed(source, HolidayCalendar::parse)
}

pub fn weights(source: Option<&str>) -> Result<GdpWeights, CliError> {
    let source = source.unwrap_or(WEIGHTS);
    parsed(source, GdpWeights::parse)
}

pub fn indicators(path: Option<&Path>) -> Result<IndicatorSet, CliError> {
    let path = path.ok_or_else(|| input("--indicators is required"))?;
    IndicatorSet::parse_csv(&read_path(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Energy and mobility from `--series`, GDP from `--gdp` (bundled by
/// default) unless the series file carries its own.
pub fn monthly(
    series: Option<&Path>,
    gdp: Option<&str>,
) -> Result<(MonthlySeries, MonthlySeries, MonthlySeries), CliError> {
    let path = series.ok_or_else(|| input("--series is required"))?;
    let mut all = parse_monthly(&read_path(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let gdp_series = match (all.remove(&SeriesKind::Gdp), gdp) {
        (Some(g), None) => g,
        (_, source) => {
            let source = source.unwrap_or(GDP);
            parsed(source, parse_monthly)?
                .remove(&SeriesKind::Gdp)
                .ok_or_else(|| input(format!("{source}: no gdp rows")))?
        }
    };
    let take = |all: &mut std::collections::BTreeMap<SeriesKind, MonthlySeries>, k: SeriesKind| {
        all.remove(&k).ok_or_else(|| input(format!("{}: no {k} rows", path.display())))
    };
    let energy = take(&mut all, SeriesKind::Energy)?;
    let mobility = take(&mut all, SeriesKind::Mobility)?;
    Ok((gdp_series, energy, mobility))
}

pub fn scenario(source: Option<&str>) -> Result<ScenarioConfig, CliError> {
    let source = source.unwrap_or(SCENARIO);
    let text = read_source(source)?;
    let resolve = |name: &str| -> Result<String, ScenarioError> {
        let target = match source.strip_prefix('@') {
            Some(base) => format!("@{}", join_name(base, name)),
            None => Path::new(source).parent().unwrap_or(Path::new(".")).join(name).display().to_string(),
        };
        read_source(&target).map_err(|e| ScenarioError::InvalidConfig(e.to_string()))
    };
    ScenarioConfig::from_toml(&text, resolve).map_err(|e| input(format!("{source}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_names_resolve() {
        assert_eq!(join_name("scenario/scenario.toml", "../italy_holidays.txt"), "italy_holidays.txt");
        assert_eq!(join_name("scenario/scenario.toml", "flows.csv"), "scenario/flows.csv");
    }
}
