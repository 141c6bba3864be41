//! Seeded synthetic ODM generator with a per-region, per-day ground-truth
//! manifest.
//!
//! Expected daily count of flow `f` on day `d`:
//!
//! ```text
//! base_f · weekly[weekday(d)] · tier_multiplier[tier(region(origin_f), d)]
//!        · (1 + relaxation_per_day)^(days since the region's last tier change)
//!        · (holiday_multiplier if d is a holiday else 1)
//! ```
//!
//! Hourly output multiplies this by `curfew_hour_profile[hour]`. The realised
//! count is `round(expected · (1 + noise_cv · z))` clamped at zero, where `z`
//! is a standard normal draw.
//!
//! Randomness comes from xoshiro256** seeded through SplitMix64 with the
//! configured 64-bit seed. Each normal draw consumes two outputs `a`, `b`:
//! `u1 = ((a >> 11) + 1) · 2⁻⁵³`, `u2 = (b >> 11) · 2⁻⁵³`,
//! `z = sqrt(−2 ln u1) · cos(2π u2)`. Draws happen for days in ascending
//! order, then flows in file order, then hours; none are made when
//! `noise_cv` is zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, TimeDelta};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::Deserialize;
use thiserror::Error;

use crate::calendar::HolidayCalendar;
use crate::geo::{AreaId, AreaLevel, GeoHierarchy};
use crate::indicators::day_start;
use crate::odm::{Bucket, OdmRecord, ODM_HEADER};
use crate::text::{header_matches, numbered_lines, split_fields};
use crate::timeline::{parse_day, Tier, TierTimeline};

pub const FLOWS_HEADER: &str = "origin,destination,mean_daily";
pub const MANIFEST_HEADER: &str = "region,date,tier,tier_multiplier,relaxation_factor,holiday_factor,weekly_factor,effective_multiplier,expected_mean,expected_count";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: io::Error },
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::InvalidConfig(msg.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub origin: AreaId,
    pub destination: AreaId,
    pub mean_daily: f64,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub areas: GeoHierarchy,
    pub timeline: TierTimeline,
    pub holidays: HolidayCalendar,
    pub flows: Vec<Flow>,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub bucket: Bucket,
    pub tier_multipliers: BTreeMap<Tier, f64>,
    pub relaxation_per_day: f64,
    pub weekly_profile: [f64; 7],
    pub holiday_multiplier: f64,
    pub curfew_hour_profile: [f64; 24],
    pub noise_cv: f64,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenario: RawScenario,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    areas: String,
    timeline: String,
    flows: String,
    holidays: Option<String>,
    start_date: String,
    end_date: String,
    #[serde(default = "default_bucket")]
    bucket: String,
    tier_multipliers: BTreeMap<String, f64>,
    #[serde(default)]
    relaxation_per_day: f64,
    #[serde(default = "flat_week")]
    weekly_profile: Vec<f64>,
    #[serde(default = "one")]
    holiday_multiplier: f64,
    curfew_hour_profile: Option<Vec<f64>>,
    #[serde(default)]
    noise_cv: f64,
    #[serde(default)]
    seed: u64,
}

fn default_bucket() -> String {
    "day".into()
}

fn flat_week() -> Vec<f64> {
    vec![1.0; 7]
}

fn one() -> f64 {
    1.0
}

/// Parses a `origin,destination,mean_daily` flow table.
pub fn parse_flows(text: &str, h: &GeoHierarchy) -> Result<Vec<Flow>, ScenarioError> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, hd)) if header_matches(hd, &split_fields(FLOWS_HEADER), &[]) => {}
        _ => return Err(invalid(format!("flow header must be `{FLOWS_HEADER}`"))),
    }
    let mut flows = Vec::new();
    for (line, raw) in lines {
        let f = split_fields(raw);
        if f.len() != 3 {
            return Err(invalid(format!("flow line {line}: expected 3 fields")));
        }
        let area = |c: &str| h.get(c).cloned().ok_or_else(|| invalid(format!("flow line {line}: unknown area `{c}`")));
        let mean_daily: f64 = f[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| invalid(format!("flow line {line}: bad mean `{}`", f[2])))?;
        flows.push(Flow { origin: area(f[0])?, destination: area(f[1])?, mean_daily });
    }
    Ok(flows)
}

impl ScenarioConfig {
    /// Parses the TOML scenario description; `read` resolves the file names
    /// it references.
    pub fn from_toml(
        text: &str,
        mut read: impl FnMut(&str) -> Result<String, ScenarioError>,
    ) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| invalid(e.message().to_string()))?;
        let raw = file.scenario;
        let areas = GeoHierarchy::parse(&read(&raw.areas)?).map_err(|e| invalid(format!("areas: {e}")))?;
        let timeline = TierTimeline::parse(&read(&raw.timeline)?).map_err(|e| invalid(format!("timeline: {e}")))?;
        timeline.validate_regions(&areas).map_err(|e| invalid(format!("timeline: {e}")))?;
        let holidays = match &raw.holidays {
            Some(p) => HolidayCalendar::parse(&read(p)?).map_err(|e| invalid(e.to_string()))?,
            None => HolidayCalendar::default(),
        };
        let flows = parse_flows(&read(&raw.flows)?, &areas)?;
        let day = |s: &str| parse_day(s).ok_or_else(|| invalid(format!("bad date `{s}`")));
        let mut tier_multipliers = BTreeMap::new();
        for (k, v) in &raw.tier_multipliers {
            let tier: Tier = k.parse().map_err(|_| invalid(format!("unknown tier `{k}`")))?;
            tier_multipliers.insert(tier, *v);
        }
        let weekly_profile: [f64; 7] = raw
            .weekly_profile
            .try_into()
            .map_err(|v: Vec<f64>| invalid(format!("weekly_profile needs 7 entries, got {}", v.len())))?;
        let curfew_hour_profile: [f64; 24] = match raw.curfew_hour_profile {
            Some(v) => v
                .try_into()
                .map_err(|v: Vec<f64>| invalid(format!("curfew_hour_profile needs 24 entries, got {}", v.len())))?,
            None => [1.0 / 24.0; 24],
        };
        let cfg = ScenarioConfig {
            areas,
            timeline,
            holidays,
            flows,
            start: day(&raw.start_date)?,
            end: day(&raw.end_date)?,
            bucket: raw.bucket.parse().map_err(invalid)?,
            tier_multipliers,
            relaxation_per_day: raw.relaxation_per_day,
            weekly_profile,
            holiday_multiplier: raw.holiday_multiplier,
            curfew_hour_profile,
            noise_cv: raw.noise_cv,
            seed: raw.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a scenario file, resolving referenced files relative to it.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let read_path = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| ScenarioError::Io { path: p.display().to_string(), source })
        };
        let text = read_path(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        ScenarioConfig::from_toml(&text, |name| read_path(&dir.join(name)))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (t, m) in &self.tier_multipliers {
            if !(m.is_finite() && *m > 0.0) {
                return Err(invalid(format!("multiplier for {t} must be positive")));
            }
        }
        for region in self.timeline.regions() {
            for e in self.timeline.entries(region).expect("region listed by timeline") {
                if !self.tier_multipliers.contains_key(&e.tier) {
                    return Err(invalid(format!("no multiplier for tier {}", e.tier)));
                }
            }
        }
        if self.weekly_profile.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("weekly_profile entries must be positive"));
        }
        if !(self.holiday_multiplier.is_finite() && self.holiday_multiplier > 0.0) {
            return Err(invalid("holiday_multiplier must be positive"));
        }
        if self.curfew_hour_profile.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("curfew_hour_profile entries must be non-negative"));
        }
        if !(self.noise_cv.is_finite() && (0.0..1.0).contains(&self.noise_cv)) {
            return Err(invalid("noise_cv must lie in [0, 1)"));
        }
        if !(self.relaxation_per_day.is_finite() && self.relaxation_per_day > -1.0) {
            return Err(invalid("relaxation_per_day must exceed -1"));
        }
        let (cov_start, cov_end) = self.timeline.coverage();
        if self.start > self.end || self.start < cov_start || self.end > cov_end {
            return Err(invalid(format!(
                "date range {}..{} must lie inside timeline coverage {cov_start}..{cov_end}",
                self.start, self.end
            )));
        }
        for f in &self.flows {
            let region =
                self.areas.lift(&f.origin, AreaLevel::Region).map_err(|e| invalid(format!("flow origin: {e}")))?;
            self.areas
                .lift(&f.destination, AreaLevel::Region)
                .map_err(|e| invalid(format!("flow destination: {e}")))?;
            self.timeline.entries(&region).map_err(|e| invalid(format!("flow origin: {e}")))?;
        }
        Ok(())
    }
}

/// Ground truth for one region and day.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRow {
    pub region: String,
    pub date: NaiveDate,
    pub tier: Tier,
    pub tier_multiplier: f64,
    pub relaxation_factor: f64,
    pub holiday_factor: f64,
    pub weekly_factor: f64,
    pub effective_multiplier: f64,
    /// Sum of unrounded expected counts of flows leaving the region.
    pub expected_mean: f64,
    /// Sum of the rounded noise-free counts of flows leaving the region.
    pub expected_count: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{MANIFEST_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.region,
                r.date,
                r.tier,
                r.tier_multiplier,
                r.relaxation_factor,
                r.holiday_factor,
                r.weekly_factor,
                r.effective_multiplier,
                r.expected_mean,
                r.expected_count
            );
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Manifest, ScenarioError> {
        let mut lines = numbered_lines(text);
        match lines.next() {
            Some((_, hd)) if header_matches(hd, &split_fields(MANIFEST_HEADER), &[]) => {}
            _ => return Err(invalid(format!("manifest header must be `{MANIFEST_HEADER}`"))),
        }
        let mut rows = Vec::new();
        for (line, raw) in lines {
            let bad = |what: &str| invalid(format!("manifest line {line}: bad {what}"));
            let f = split_fields(raw);
            if f.len() != 10 {
                return Err(bad("field count"));
            }
            let num =
                |i: usize, what: &str| f[i].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(what));
            rows.push(ManifestRow {
                region: f[0].to_string(),
                date: parse_day(f[1]).ok_or_else(|| bad("date"))?,
                tier: f[2].parse().map_err(|_| bad("tier"))?,
                tier_multiplier: num(3, "tier_multiplier")?,
                relaxation_factor: num(4, "relaxation_factor")?,
                holiday_factor: num(5, "holiday_factor")?,
                weekly_factor: num(6, "weekly_factor")?,
                effective_multiplier: num(7, "effective_multiplier")?,
                expected_mean: num(8, "expected_mean")?,
                expected_count: f[9].parse().map_err(|_| bad("expected_count"))?,
            });
        }
        Ok(Manifest { rows })
    }

    pub fn get(&self, region: &str, date: NaiveDate) -> Option<&ManifestRow> {
        self.rows.iter().find(|r| r.region == region && r.date == date)
    }
}

struct Normal {
    rng: Xoshiro256StarStar,
}

impl Normal {
    fn new(seed: u64) -> Self {
        Normal { rng: Xoshiro256StarStar::seed_from_u64(seed) }
    }

    fn draw(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.rng.next_u64() >> 11) as f64 * SCALE;
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

struct RegionDay {
    tier: Tier,
    tier_multiplier: f64,
    relaxation_factor: f64,
}

fn region_day(cfg: &ScenarioConfig, region: &AreaId, day: NaiveDate, last_change: NaiveDate) -> RegionDay {
    let tier = cfg.timeline.tier_at(region, day).expect("validated coverage");
    let since = (day - last_change).num_days();
    RegionDay {
        tier,
        tier_multiplier: cfg.tier_multipliers[&tier],
        relaxation_factor: (1.0 + cfg.relaxation_per_day).powi(since as i32),
    }
}

/// Generates every record in order, handing each to `emit`, and returns the
/// manifest.
pub fn generate_with<E>(cfg: &ScenarioConfig, mut emit: impl FnMut(OdmRecord) -> Result<(), E>) -> Result<Manifest, E> {
    let mut normal = Normal::new(cfg.seed);
    let origin_regions: Vec<AreaId> =
        cfg.flows.iter().map(|f| cfg.areas.lift(&f.origin, AreaLevel::Region).expect("validated flow")).collect();
    let mut changes: BTreeMap<&AreaId, Vec<NaiveDate>> = BTreeMap::new();
    for region in cfg.timeline.regions() {
        let mut dates = vec![cfg.timeline.coverage().0];
        dates.extend(cfg.timeline.detect_transitions(region).expect("own region").iter().map(|t| t.date));
        changes.insert(region, dates);
    }
    let hours: Vec<u32> = match cfg.bucket {
        Bucket::Day => vec![],
        Bucket::Hour => (0..24).collect(),
    };

    let mut manifest = Manifest::default();
    let mut day = cfg.start;
    while day <= cfg.end {
        let weekly = cfg.weekly_profile[day.weekday().num_days_from_monday() as usize];
        let holiday = if cfg.holidays.contains(day) { cfg.holiday_multiplier } else { 1.0 };
        let mut per_region: BTreeMap<&AreaId, (RegionDay, f64, u64)> = BTreeMap::new();
        for region in cfg.timeline.regions() {
            let dates = &changes[region];
            let last = dates[dates.partition_point(|d| *d <= day) - 1];
            per_region.insert(region, (region_day(cfg, region, day, last), 0.0, 0));
        }
        let start = day_start(day);
        for (f, region) in cfg.flows.iter().zip(&origin_regions) {
            let entry = per_region.get_mut(region).expect("validated flow region");
            let rd = &entry.0;
            let expected = f.mean_daily * weekly * rd.tier_multiplier * rd.relaxation_factor * holiday;
            entry.1 += expected;
            let mut realise = |mean: f64| {
                let noisy = if cfg.noise_cv > 0.0 { mean * (1.0 + cfg.noise_cv * normal.draw()) } else { mean };
                noisy.round().max(0.0) as u64
            };
            if hours.is_empty() {
                entry.2 += expected.round() as u64;
                emit(OdmRecord {
                    period_start: start,
                    bucket: Bucket::Day,
                    origin: f.origin.clone(),
                    destination: f.destination.clone(),
                    count: realise(expected),
                })?;
            } else {
                for &h in &hours {
                    let mean = expected * cfg.curfew_hour_profile[h as usize];
                    entry.2 += mean.round() as u64;
                    emit(OdmRecord {
                        period_start: start + TimeDelta::hours(i64::from(h)),
                        bucket: Bucket::Hour,
                        origin: f.origin.clone(),
                        destination: f.destination.clone(),
                        count: realise(mean),
                    })?;
                }
            }
        }
        for (region, (rd, mean, count)) in per_region {
            manifest.rows.push(ManifestRow {
                region: region.code().to_string(),
                date: day,
                tier: rd.tier,
                tier_multiplier: rd.tier_multiplier,
                relaxation_factor: rd.relaxation_factor,
                holiday_factor: holiday,
                weekly_factor: weekly,
                effective_multiplier: weekly * rd.tier_multiplier * rd.relaxation_factor * holiday,
                expected_mean: mean,
                expected_count: count,
            });
        }
        day += Duration::days(1);
    }
    Ok(manifest)
}

/// Writes the ODM file to `out` and returns the manifest.
pub fn generate<W: Write>(cfg: &ScenarioConfig, out: &mut W) -> io::Result<Manifest> {
    writeln!(out, "{ODM_HEADER}")?;
    generate_with(cfg, |r| r.write_line(out))
}

/// In-memory records and manifest.
pub fn generate_records(cfg: &ScenarioConfig) -> (Vec<OdmRecord>, Manifest) {
    let mut records = Vec::new();
    let manifest = generate_with::<std::convert::Infallible>(cfg, |r| {
        records.push(r);
        Ok(())
    })
    .unwrap_or_else(|e| match e {});
    (records, manifest)
}

/// ODM text and manifest.
pub fn gen_synthetic(cfg: &ScenarioConfig) -> (String, Manifest) {
    let mut buf = Vec::new();
    let manifest = generate(cfg, &mut buf).expect("writing to memory");
    (String::from_utf8(buf).expect("ASCII output"), manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odm::parse_odm;

    const AREAS: &str = "code,level,parent\nC,country,\nR,region,C\nS,region,C\n";
    const TIMELINE: &str = "region,start_date,end_date,tier\nR,2020-11-02,2020-11-15,yellow\nR,2020-11-16,2020-11-29,red\nS,2020-11-02,2020-11-29,yellow\n";
    const FLOWS: &str = "origin,destination,mean_daily\nR,R,1000\nR,S,200\nS,S,500\n";

    fn config(extra: &str) -> Result<ScenarioConfig, ScenarioError> {
        let toml = format!(
            "[scenario]\nareas = \"a\"\ntimeline = \"t\"\nflows = \"f\"\nstart_date = \"2020-11-02\"\nend_date = \"2020-11-29\"\n{extra}\n[scenario.tier_multipliers]\nyellow = 1.0\nred = 0.63\n"
        );
        ScenarioConfig::from_toml(&toml, |name| {
            Ok(match name {
                "a" => AREAS,
                "t" => TIMELINE,
                "f" => FLOWS,
                _ => return Err(invalid(format!("no file {name}"))),
            }
            .to_string())
        })
    }

    #[test]
    fn identity_scenario_reproduces_base_flows() {
        let cfg = config("").unwrap();
        let (records, manifest) = generate_records(&cfg);
        let first_day: Vec<u64> = records.iter().take(3).map(|r| r.count).collect();
        assert_eq!(first_day, vec![1000, 200, 500]);
        assert_eq!(manifest.get("R", cfg.start).unwrap().expected_count, 1200);
    }

    #[test]
    fn red_step_and_relaxation() {
        let cfg = config("relaxation_per_day = 0.01").unwrap();
        let (_, manifest) = generate_records(&cfg);
        let d: NaiveDate = "2020-11-16".parse().unwrap();
        let red = manifest.get("R", d).unwrap();
        assert_eq!(red.tier, Tier::Red);
        assert_eq!(red.relaxation_factor, 1.0);
        assert!((red.expected_mean - 1200.0 * 0.63).abs() < 1e-9);
        let week_later = manifest.get("R", d + Duration::days(7)).unwrap();
        assert!((week_later.relaxation_factor - 1.01f64.powi(7)).abs() < 1e-12);
    }

    #[test]
    fn seeded_output_is_byte_identical() {
        let cfg = config("noise_cv = 0.05\nseed = 7").unwrap();
        let (a, ma) = gen_synthetic(&cfg);
        let (b, mb) = gen_synthetic(&cfg);
        assert_eq!(a, b);
        assert_eq!(ma.to_csv(), mb.to_csv());
        let other = config("noise_cv = 0.05\nseed = 8").unwrap();
        assert_ne!(gen_synthetic(&other).0, a);
        let h = GeoHierarchy::parse(AREAS).unwrap();
        let parsed = parse_odm(&a, &h).unwrap();
        assert!(parsed.rejects.is_empty());
        assert_eq!(parsed.records.len(), 28 * 3);
    }

    #[test]
    fn hourly_bucket_uses_curfew_profile() {
        let mut profile = vec![0.0; 24];
        profile[23] = 1.0;
        let cfg = config(&format!("bucket = \"hour\"\ncurfew_hour_profile = {profile:?}")).unwrap();
        let (records, _) = generate_records(&cfg);
        assert_eq!(records.len(), 28 * 3 * 24);
        assert!(records.iter().filter(|r| r.count > 0).all(|r| chrono::Timelike::hour(&r.period_start) == 23));
    }

    #[test]
    fn invalid_configs() {
        assert!(config("weekly_profile = [1.0, 1.0]").is_err());
        assert!(config("noise_cv = 1.5").is_err());
        assert!(config("bogus = 1").is_err());
        assert!(config("end_date_x = 1").is_err());
        let manifest_round = {
            let cfg = config("").unwrap();
            let m = generate_records(&cfg).1;
            Manifest::parse_csv(&m.to_csv()).unwrap() == m
        };
        assert!(manifest_round);
    }
}
