//! Aggregation of ODM records into per-area, per-direction indicator series.
//!
//! Counts are summed as integers so that aggregation is independent of record
//! order and of how the input is partitioned. Each series keeps its raw sums
//! next to the common normalisation reference; normalised values are
//! `raw / reference`. Ratio-based statistics read the raw sums, which makes
//! them exactly invariant to the choice of reference.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use chrono::{DateTime, NaiveDate, NaiveTime, Timelike, Utc};
use thiserror::Error;

use crate::geo::{AreaId, AreaLevel, GeoError, GeoHierarchy};
use crate::odm::{Bucket, Direction, OdmRecord};
use crate::text::{header_matches, numbered_lines, split_fields};

pub const INDICATOR_HEADER: &str = "area,level,direction,bucket,period_start,raw,value,reference";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregateError {
    #[error("records mix hourly and daily buckets")]
    MixedBucketInput,
    #[error("an hour-of-day window needs hourly records")]
    WindowOnDailyData,
    #[error("daily records cannot be aggregated to hourly buckets")]
    BucketTooFine,
    #[error("hour window {start}..{end} is invalid")]
    BadWindow { start: u32, end: u32 },
    #[error(transparent)]
    Geo(#[from] GeoError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalizeError {
    #[error("normalisation reference must be positive and finite, got {0}")]
    NonPositiveReference(f64),
    #[error("not enough national data to derive a default reference")]
    NoData,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndicatorFileError {
    #[error("indicator header must be `{INDICATOR_HEADER}`")]
    HeaderMismatch,
    #[error("indicator line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("indicator file holds no rows")]
    Empty,
    #[error("indicator file mixes buckets or references")]
    Inconsistent,
}

/// Half-open hour-of-day filter `[start, end)`, e.g. `23..24`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HourWindow {
    pub start: u32,
    pub end: u32,
}

impl HourWindow {
    pub fn new(start: u32, end: u32) -> Result<Self, AggregateError> {
        if start >= end || end > 24 {
            return Err(AggregateError::BadWindow { start, end });
        }
        Ok(HourWindow { start, end })
    }

    pub fn contains(&self, hour: u32) -> bool {
        (self.start..self.end).contains(&hour)
    }
}

/// Accepts `23-24` or `23:00-24:00`.
impl std::str::FromStr for HourWindow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("`{s}` is not an hour window such as 23-24");
        let hour = |t: &str| t.trim().strip_suffix(":00").unwrap_or(t.trim()).parse::<u32>().map_err(|_| bad());
        let (a, b) = s.split_once('-').ok_or_else(bad)?;
        HourWindow::new(hour(a)?, hour(b)?).map_err(|e| e.to_string())
    }
}

/// Daily lookup shared by impact statistics.
pub trait DayValues {
    fn day_value(&self, day: NaiveDate) -> Option<f64>;
}

impl DayValues for BTreeMap<NaiveDate, f64> {
    fn day_value(&self, day: NaiveDate) -> Option<f64> {
        self.get(&day).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorSeries {
    area: AreaId,
    direction: Direction,
    bucket: Bucket,
    raw: BTreeMap<DateTime<Utc>, f64>,
    reference: f64,
}

impl IndicatorSeries {
    /// Builds an unnormalised series (reference 1) from raw values.
    pub fn from_raw(area: AreaId, direction: Direction, bucket: Bucket, raw: BTreeMap<DateTime<Utc>, f64>) -> Self {
        IndicatorSeries { area, direction, bucket, raw, reference: 1.0 }
    }

    /// Convenience constructor for daily series.
    pub fn daily(area: AreaId, direction: Direction, values: impl IntoIterator<Item = (NaiveDate, f64)>) -> Self {
        let raw = values.into_iter().map(|(d, v)| (day_start(d), v)).collect();
        Self::from_raw(area, direction, Bucket::Day, raw)
    }

    pub fn area(&self) -> &AreaId {
        &self.area
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn bucket(&self) -> Bucket {
        self.bucket
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Normalised value at a bucket start.
    pub fn value_at(&self, ts: &DateTime<Utc>) -> Option<f64> {
        self.raw.get(ts).map(|v| v / self.reference)
    }

    /// Normalised points in time order.
    pub fn points(&self) -> impl Iterator<Item = (DateTime<Utc>, f64)> + '_ {
        self.raw.iter().map(|(t, v)| (*t, v / self.reference))
    }

    /// Unnormalised points in time order.
    pub fn raw_points(&self) -> impl Iterator<Item = (DateTime<Utc>, f64)> + '_ {
        self.raw.iter().map(|(t, v)| (*t, *v))
    }

    /// Distinct calendar days with at least one point.
    pub fn days(&self) -> BTreeSet<NaiveDate> {
        self.raw.keys().map(|t| t.date_naive()).collect()
    }

    /// Normalised day value; see [`DayValues`] for the raw variant.
    pub fn day_normalized(&self, day: NaiveDate) -> Option<f64> {
        self.day_value(day).map(|v| v / self.reference)
    }
}

impl DayValues for IndicatorSeries {
    /// Raw value of a day: the daily point, or for hourly series the sum of
    /// the hours present that day.
    fn day_value(&self, day: NaiveDate) -> Option<f64> {
        let start = day_start(day);
        match self.bucket {
            Bucket::Day => self.raw.get(&start).copied(),
            Bucket::Hour => {
                let end = day_start(day.succ_opt()?);
                let mut hours = self.raw.range(start..end).peekable();
                hours.peek()?;
                Some(hours.map(|(_, v)| v).sum())
            }
        }
    }
}

pub(crate) fn day_start(day: NaiveDate) -> DateTime<Utc> {
    day.and_time(NaiveTime::MIN).and_utc()
}

/// Integer movement sums, mergeable across input partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorCounts {
    level: AreaLevel,
    bucket: Bucket,
    areas: Vec<AreaId>,
    country: AreaId,
    grid: BTreeSet<DateTime<Utc>>,
    counts: BTreeMap<(AreaId, Direction), BTreeMap<DateTime<Utc>, u64>>,
    national: BTreeMap<DateTime<Utc>, u64>,
}

impl IndicatorCounts {
    fn empty(h: &GeoHierarchy, level: AreaLevel, bucket: Bucket) -> Self {
        IndicatorCounts {
            level,
            bucket,
            areas: h.areas_at(level).cloned().collect(),
            country: h.country().clone(),
            grid: BTreeSet::new(),
            counts: BTreeMap::new(),
            national: BTreeMap::new(),
        }
    }

    fn add(&mut self, area: &AreaId, dir: Direction, ts: DateTime<Utc>, count: u64) {
        *self.counts.entry((area.clone(), dir)).or_default().entry(ts).or_insert(0) += count;
    }

    /// Adds another partial aggregate built with the same level and bucket.
    pub fn merge(&mut self, other: IndicatorCounts) {
        assert_eq!(self.level, other.level, "merging counts at different levels");
        assert_eq!(self.bucket, other.bucket, "merging counts with different buckets");
        self.grid.extend(other.grid);
        for (key, points) in other.counts {
            let mine = self.counts.entry(key).or_default();
            for (ts, c) in points {
                *mine.entry(ts).or_insert(0) += c;
            }
        }
        for (ts, c) in other.national {
            *self.national.entry(ts).or_insert(0) += c;
        }
    }

    /// Materialises zero-filled series over every bucket seen in the input.
    /// Buckets absent from the whole input stay missing.
    pub fn into_set(self) -> IndicatorSet {
        let zero_fill = |points: Option<&BTreeMap<DateTime<Utc>, u64>>| -> BTreeMap<DateTime<Utc>, f64> {
            self.grid.iter().map(|ts| (*ts, points.and_then(|p| p.get(ts)).copied().unwrap_or(0) as f64)).collect()
        };
        let mut series = BTreeMap::new();
        for area in &self.areas {
            let mut total: BTreeMap<DateTime<Utc>, f64> = self.grid.iter().map(|ts| (*ts, 0.0)).collect();
            for dir in [Direction::Internal, Direction::Inward, Direction::Outward] {
                let raw = zero_fill(self.counts.get(&(area.clone(), dir)));
                for (ts, v) in &raw {
                    *total.get_mut(ts).expect("same grid") += v;
                }
                series.insert((area.clone(), dir), IndicatorSeries::from_raw(area.clone(), dir, self.bucket, raw));
            }
            series.insert(
                (area.clone(), Direction::Total),
                IndicatorSeries::from_raw(area.clone(), Direction::Total, self.bucket, total),
            );
        }
        let national = IndicatorSeries::from_raw(
            self.country.clone(),
            Direction::Total,
            self.bucket,
            zero_fill(Some(&self.national)),
        );
        IndicatorSet { level: self.level, bucket: self.bucket, reference: 1.0, series, national }
    }
}

fn bucket_of(ts: DateTime<Utc>, bucket: Bucket) -> DateTime<Utc> {
    match bucket {
        Bucket::Hour => ts,
        Bucket::Day => day_start(ts.date_naive()),
    }
}

/// Sums counts per area at `level` and per direction.
pub fn aggregate_counts(
    records: &[OdmRecord],
    h: &GeoHierarchy,
    level: AreaLevel,
    bucket: Bucket,
    window: Option<HourWindow>,
) -> Result<IndicatorCounts, AggregateError> {
    let mut out = IndicatorCounts::empty(h, level, bucket);
    let Some(first) = records.first() else {
        return Ok(out);
    };
    let input_bucket = first.bucket;
    if records.iter().any(|r| r.bucket != input_bucket) {
        return Err(AggregateError::MixedBucketInput);
    }
    if window.is_some() && input_bucket == Bucket::Day {
        return Err(AggregateError::WindowOnDailyData);
    }
    if input_bucket == Bucket::Day && bucket == Bucket::Hour {
        return Err(AggregateError::BucketTooFine);
    }

    for r in records {
        if let Some(w) = window {
            if !w.contains(r.period_start.hour()) {
                continue;
            }
        }
        let ts = bucket_of(r.period_start, bucket);
        out.grid.insert(ts);
        let o = h.lift(&r.origin, level)?;
        let d = h.lift(&r.destination, level)?;
        if o == d {
            out.add(&o, Direction::Internal, ts, r.count);
        } else {
            if !o.is_external() {
                out.add(&o, Direction::Outward, ts, r.count);
            }
            if !d.is_external() {
                out.add(&d, Direction::Inward, ts, r.count);
            }
        }
        *out.national.entry(ts).or_insert(0) += r.count;
    }
    Ok(out)
}

/// Aggregates records into unnormalised (reference 1) series for every area
/// at `level`, plus the national total where every record counts once.
pub fn aggregate_indicators(
    records: &[OdmRecord],
    h: &GeoHierarchy,
    level: AreaLevel,
    bucket: Bucket,
    window: Option<HourWindow>,
) -> Result<IndicatorSet, AggregateError> {
    Ok(aggregate_counts(records, h, level, bucket, window)?.into_set())
}

/// Every series produced by one aggregation, sharing one reference.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorSet {
    level: AreaLevel,
    bucket: Bucket,
    reference: f64,
    series: BTreeMap<(AreaId, Direction), IndicatorSeries>,
    national: IndicatorSeries,
}

impl IndicatorSet {
    pub fn level(&self) -> AreaLevel {
        self.level
    }

    pub fn bucket(&self) -> Bucket {
        self.bucket
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn get(&self, area: &AreaId, direction: Direction) -> Option<&IndicatorSeries> {
        self.series.get(&(area.clone(), direction))
    }

    pub fn get_code(&self, code: &str, direction: Direction) -> Option<&IndicatorSeries> {
        self.series.iter().find(|((a, d), _)| a.code() == code && *d == direction).map(|(_, s)| s)
    }

    pub fn national(&self) -> &IndicatorSeries {
        &self.national
    }

    pub fn areas(&self) -> impl Iterator<Item = &AreaId> {
        self.series.keys().filter(|(_, d)| *d == Direction::Total).map(|(a, _)| a)
    }

    pub fn series(&self) -> impl Iterator<Item = &IndicatorSeries> {
        self.series.values()
    }

    pub fn by_direction(&self, direction: Direction) -> impl Iterator<Item = &IndicatorSeries> {
        self.series.values().filter(move |s| s.direction == direction)
    }

    /// Mean daily national total over the first seven days with data.
    pub fn default_reference(&self) -> Result<f64, NormalizeError> {
        let days: Vec<NaiveDate> = self.national.days().into_iter().take(7).collect();
        if days.is_empty() {
            return Err(NormalizeError::NoData);
        }
        let sum: f64 = days.iter().map(|d| self.national.day_value(*d).unwrap_or(0.0)).sum();
        let mean = sum / days.len() as f64;
        if mean > 0.0 && mean.is_finite() {
            Ok(mean)
        } else {
            Err(NormalizeError::NoData)
        }
    }

    /// Sets the common reference on every series.
    pub fn normalize(mut self, reference: f64) -> Result<IndicatorSet, NormalizeError> {
        if !(reference > 0.0 && reference.is_finite()) {
            return Err(NormalizeError::NonPositiveReference(reference));
        }
        self.reference = reference;
        for s in self.series.values_mut() {
            s.reference = reference;
        }
        self.national.reference = reference;
        Ok(self)
    }

    /// Renders the delimiter-separated indicator file.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.series.len() * (self.national.len() + 1));
        out.push_str(INDICATOR_HEADER);
        out.push('\n');
        let mut write = |s: &IndicatorSeries| {
            for (ts, raw) in s.raw_points() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    s.area,
                    s.area.level(),
                    s.direction,
                    s.bucket,
                    ts.format("%Y-%m-%dT%H:%M:%SZ"),
                    raw,
                    raw / s.reference,
                    s.reference
                );
            }
        };
        for s in self.series.values() {
            write(s);
        }
        if self.level != AreaLevel::Country {
            write(&self.national);
        }
        out
    }

    /// Reads a file written by [`IndicatorSet::to_csv`]. Rows at country
    /// level carry the national total unless the whole file is at country
    /// level.
    pub fn parse_csv(text: &str) -> Result<IndicatorSet, IndicatorFileError> {
        let mut lines = numbered_lines(text);
        match lines.next() {
            Some((_, h)) if header_matches(h, &split_fields(INDICATOR_HEADER), &[]) => {}
            _ => return Err(IndicatorFileError::HeaderMismatch),
        }
        type Points = BTreeMap<DateTime<Utc>, f64>;
        let mut rows: BTreeMap<(AreaId, Direction), Points> = BTreeMap::new();
        let mut bucket = None;
        let mut reference = None;
        for (line, raw_line) in lines {
            let bad = |reason: String| IndicatorFileError::BadLine { line, reason };
            let f = split_fields(raw_line);
            if f.len() != 8 {
                return Err(bad(format!("expected 8 fields, found {}", f.len())));
            }
            let level = AreaLevel::parse(f[1]).ok_or_else(|| bad(format!("bad level `{}`", f[1])))?;
            let area = AreaId::new(f[0], level).map_err(|e| bad(e.to_string()))?;
            let dir: Direction = f[2].parse().map_err(bad)?;
            let b: Bucket = f[3].parse().map_err(bad)?;
            let ts = DateTime::parse_from_rfc3339(f[4])
                .map_err(|_| bad(format!("bad timestamp `{}`", f[4])))?
                .with_timezone(&Utc);
            if !b.is_aligned(&ts) {
                return Err(bad(format!("timestamp `{}` not aligned", f[4])));
            }
            let raw: f64 = f[5].parse().map_err(|_| bad(format!("bad raw value `{}`", f[5])))?;
            let r: f64 = f[7].parse().map_err(|_| bad(format!("bad reference `{}`", f[7])))?;
            if !(raw.is_finite() && raw >= 0.0) {
                return Err(bad(format!("raw value `{}` must be finite and non-negative", f[5])));
            }
            if !(r.is_finite() && r > 0.0) {
                return Err(bad(format!("reference `{}` must be positive", f[7])));
            }
            if *bucket.get_or_insert(b) != b || *reference.get_or_insert(r) != r {
                return Err(IndicatorFileError::Inconsistent);
            }
            rows.entry((area, dir)).or_default().insert(ts, raw);
        }
        let (Some(bucket), Some(reference)) = (bucket, reference) else {
            return Err(IndicatorFileError::Empty);
        };
        let level = rows.keys().map(|(a, _)| a.level()).min().expect("non-empty");
        let national_key =
            rows.keys().find(|(a, d)| a.level() == AreaLevel::Country && *d == Direction::Total).cloned();
        let national_raw = match &national_key {
            Some(k) if level == AreaLevel::Country => rows[k].clone(),
            Some(k) => rows.remove(k).expect("key present"),
            None => BTreeMap::new(),
        };
        let national_area = national_key
            .map(|(a, _)| a)
            .unwrap_or_else(|| AreaId::new("national", AreaLevel::Country).expect("non-empty code"));
        let series = rows
            .into_iter()
            .map(|((a, d), raw)| {
                let mut s = IndicatorSeries::from_raw(a.clone(), d, bucket, raw);
                s.reference = reference;
                ((a, d), s)
            })
            .collect();
        let mut national = IndicatorSeries::from_raw(national_area, Direction::Total, bucket, national_raw);
        national.reference = reference;
        Ok(IndicatorSet { level, bucket, reference, series, national })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hierarchy() -> GeoHierarchy {
        GeoHierarchy::parse("code,level,parent\nC,country,\nA,region,C\nB,region,C\n").unwrap()
    }

    fn rec(o: &str, d: &str, count: u64, ts: &str, bucket: Bucket, h: &GeoHierarchy) -> OdmRecord {
        let area = |c: &str| h.get(c).cloned().unwrap_or_else(AreaId::external);
        OdmRecord { period_start: ts.parse().unwrap(), bucket, origin: area(o), destination: area(d), count }
    }

    fn day_value(set: &IndicatorSet, code: &str, dir: Direction) -> f64 {
        let s = set.get_code(code, dir).unwrap();
        s.points().next().unwrap().1
    }

    #[test]
    fn single_internal_record() {
        let h = hierarchy();
        let recs = [rec("A", "A", 10, "2020-11-10T00:00:00Z", Bucket::Day, &h)];
        let set = aggregate_indicators(&recs, &h, AreaLevel::Region, Bucket::Day, None).unwrap();
        assert_eq!(day_value(&set, "A", Direction::Internal), 10.0);
        assert_eq!(day_value(&set, "A", Direction::Inward), 0.0);
        assert_eq!(day_value(&set, "A", Direction::Outward), 0.0);
        assert_eq!(day_value(&set, "A", Direction::Total), 10.0);
        assert_eq!(set.reference(), 1.0);
    }

    #[test]
    fn symmetric_flows_count_once_nationally() {
        let h = hierarchy();
        let ts = "2020-11-10T00:00:00Z";
        let recs = [rec("A", "B", 4, ts, Bucket::Day, &h), rec("B", "A", 6, ts, Bucket::Day, &h)];
        let set = aggregate_indicators(&recs, &h, AreaLevel::Region, Bucket::Day, None).unwrap();
        assert_eq!(day_value(&set, "A", Direction::Inward), 6.0);
        assert_eq!(day_value(&set, "A", Direction::Outward), 4.0);
        assert_eq!(day_value(&set, "A", Direction::Total), 10.0);
        assert_eq!(day_value(&set, "B", Direction::Inward), 4.0);
        assert_eq!(day_value(&set, "B", Direction::Outward), 6.0);
        assert_eq!(day_value(&set, "B", Direction::Total), 10.0);
        assert_eq!(set.national().points().next().unwrap().1, 10.0);
    }

    #[test]
    fn curfew_window_keeps_hour_23_only() {
        let h = hierarchy();
        let recs = [
            rec("A", "A", 5, "2020-10-22T22:00:00Z", Bucket::Hour, &h),
            rec("A", "B", 3, "2020-10-22T23:00:00Z", Bucket::Hour, &h),
            rec("A", "A", 7, "2020-10-23T00:00:00Z", Bucket::Hour, &h),
        ];
        let window = Some(HourWindow::new(23, 24).unwrap());
        let set = aggregate_indicators(&recs, &h, AreaLevel::Region, Bucket::Hour, window).unwrap();
        let a = set.get_code("A", Direction::Total).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.points().next().unwrap().0.hour(), 23);
        assert_eq!(a.day_value("2020-10-22".parse().unwrap()), Some(3.0));
        let daily = aggregate_indicators(&recs, &h, AreaLevel::Region, Bucket::Day, window).unwrap();
        assert_eq!(day_value(&daily, "A", Direction::Outward), 3.0);
    }

    #[test]
    fn bucket_errors() {
        let h = hierarchy();
        let mixed = [
            rec("A", "A", 5, "2020-10-22T00:00:00Z", Bucket::Day, &h),
            rec("A", "A", 5, "2020-10-22T01:00:00Z", Bucket::Hour, &h),
        ];
        assert_eq!(
            aggregate_indicators(&mixed, &h, AreaLevel::Region, Bucket::Day, None).unwrap_err(),
            AggregateError::MixedBucketInput
        );
        let daily = [rec("A", "A", 5, "2020-10-22T00:00:00Z", Bucket::Day, &h)];
        assert_eq!(
            aggregate_indicators(&daily, &h, AreaLevel::Region, Bucket::Day, Some(HourWindow::new(23, 24).unwrap()))
                .unwrap_err(),
            AggregateError::WindowOnDailyData
        );
        assert!(HourWindow::new(23, 23).is_err());
        assert_eq!("23:00-24:00".parse::<HourWindow>().unwrap(), HourWindow::new(23, 24).unwrap());
        assert!("24-23".parse::<HourWindow>().is_err());
    }

    #[test]
    fn external_side_counts_only_domestically() {
        let h = hierarchy();
        let ts = "2020-11-10T00:00:00Z";
        let recs = [rec("EXT", "A", 2, ts, Bucket::Day, &h), rec("A", "EXT", 3, ts, Bucket::Day, &h)];
        let set = aggregate_indicators(&recs, &h, AreaLevel::Region, Bucket::Day, None).unwrap();
        assert_eq!(day_value(&set, "A", Direction::Inward), 2.0);
        assert_eq!(day_value(&set, "A", Direction::Outward), 3.0);
        assert_eq!(set.national().points().next().unwrap().1, 5.0);
    }

    #[test]
    fn normalize_divides_and_checks_reference() {
        let a = AreaId::new("A", AreaLevel::Region).unwrap();
        let d0: NaiveDate = "2020-11-01".parse().unwrap();
        let s = IndicatorSeries::daily(a.clone(), Direction::Total, [(d0, 10.0), (d0.succ_opt().unwrap(), 20.0)]);
        let mut series = BTreeMap::new();
        series.insert((a.clone(), Direction::Total), s.clone());
        let set = IndicatorSet { level: AreaLevel::Region, bucket: Bucket::Day, reference: 1.0, series, national: s };
        let id = set.clone().normalize(1.0).unwrap();
        assert_eq!(id, set);
        let n = set.clone().normalize(10.0).unwrap();
        let vals: Vec<f64> = n.get(&a, Direction::Total).unwrap().points().map(|p| p.1).collect();
        assert_eq!(vals, vec![1.0, 2.0]);
        assert_eq!(set.clone().normalize(0.0).unwrap_err(), NormalizeError::NonPositiveReference(0.0));
        assert!(set.normalize(f64::NAN).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let h = hierarchy();
        let recs = [
            rec("A", "B", 4, "2020-11-10T00:00:00Z", Bucket::Day, &h),
            rec("B", "A", 6, "2020-11-11T00:00:00Z", Bucket::Day, &h),
        ];
        let set =
            aggregate_indicators(&recs, &h, AreaLevel::Region, Bucket::Day, None).unwrap().normalize(2.5).unwrap();
        let back = IndicatorSet::parse_csv(&set.to_csv()).unwrap();
        assert_eq!(back, set);
    }
}
