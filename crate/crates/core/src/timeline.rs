//! Colour-coded restriction tiers per region and the transitions between them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geo::{AreaId, AreaLevel, GeoHierarchy};
use crate::text::{header_matches, numbered_lines, split_fields};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimelineError {
    #[error("region `{0}` is not in the timeline")]
    UnknownRegion(String),
    #[error("{day} is outside the timeline coverage {start}..={end}")]
    DayOutOfCoverage { day: NaiveDate, start: NaiveDate, end: NaiveDate },
    #[error("timeline header must be `region,start_date,end_date,tier`")]
    HeaderMismatch,
    #[error("timeline line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("timeline is empty")]
    Empty,
    #[error("region `{region}`: interval starting {start} ends before it starts")]
    EmptyInterval { region: String, start: NaiveDate },
    #[error("region `{region}`: intervals are not contiguous at {at}")]
    NotContiguous { region: String, at: NaiveDate },
    #[error("region `{region}` covers {start}..={end}, timeline covers {cov_start}..={cov_end}")]
    CoverageMismatch { region: String, start: NaiveDate, end: NaiveDate, cov_start: NaiveDate, cov_end: NaiveDate },
    #[error("region `{region}`: pre_decree interval at {start} reaches past the decree start {decree}")]
    PreDecreeAfterDecree { region: String, start: NaiveDate, decree: NaiveDate },
    #[error("`{0}` is not a region of the hierarchy")]
    NotARegion(String),
}

/// Restriction regime in force in a region on a given day.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    PreDecree,
    Yellow,
    Orange,
    Red,
    White,
}

impl Tier {
    pub const ALL: [Tier; 5] = [Tier::PreDecree, Tier::Yellow, Tier::Orange, Tier::Red, Tier::White];

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::PreDecree => "pre_decree",
            Tier::Yellow => "yellow",
            Tier::Orange => "orange",
            Tier::Red => "red",
            Tier::White => "white",
        }
    }

    /// Capitalised name used in regression term labels.
    pub fn label(self) -> &'static str {
        match self {
            Tier::PreDecree => "PreDecree",
            Tier::Yellow => "Yellow",
            Tier::Orange => "Orange",
            Tier::Red => "Red",
            Tier::White => "White",
        }
    }

    /// Position on the yellow < orange < red scale. `PreDecree` and `White`
    /// are off the scale.
    pub fn severity(self) -> Option<u8> {
        match self {
            Tier::Yellow => Some(0),
            Tier::Orange => Some(1),
            Tier::Red => Some(2),
            Tier::PreDecree | Tier::White => None,
        }
    }

    pub fn is_stricter_than(self, other: Tier) -> Option<bool> {
        Some(self.severity()? > other.severity()?)
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tier::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| format!("unknown tier `{s}`"))
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// An ordered `(from, to)` tier pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionKind {
    pub from: Tier,
    pub to: Tier,
}

impl TransitionKind {
    pub fn new(from: Tier, to: Tier) -> Self {
        TransitionKind { from, to }
    }

    /// `Orange→Red` style label.
    pub fn label(&self) -> String {
        format!("{}→{}", self.from.label(), self.to.label())
    }

    /// Whether the destination tier is stricter; `None` off the severity scale.
    pub fn tightens(&self) -> Option<bool> {
        self.to.is_stricter_than(self.from)
    }
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.from, self.to)
    }
}

impl FromStr for TransitionKind {
    type Err = String;

    /// Accepts `from:to`, e.g. `yellow:red`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("transition kind `{s}` must look like `yellow:red`"))?;
        Ok(TransitionKind::new(a.parse()?, b.parse()?))
    }
}

impl Serialize for TransitionKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TransitionKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// First day of a new tier in a region.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub region: AreaId,
    pub date: NaiveDate,
    pub from: Tier,
    pub to: Tier,
}

impl Transition {
    pub fn kind(&self) -> TransitionKind {
        TransitionKind::new(self.from, self.to)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimelineEntry {
    pub region: AreaId,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub tier: Tier,
    pub note: Option<String>,
}

/// Per-region contiguous tier intervals over a common coverage window.
#[derive(Clone, Debug)]
pub struct TierTimeline {
    by_region: BTreeMap<String, Vec<TimelineEntry>>,
    coverage: (NaiveDate, NaiveDate),
    decree_start: Option<NaiveDate>,
}

impl TierTimeline {
    pub fn new(entries: Vec<TimelineEntry>) -> Result<Self, TimelineError> {
        if entries.is_empty() {
            return Err(TimelineError::Empty);
        }
        let mut by_region: BTreeMap<String, Vec<TimelineEntry>> = BTreeMap::new();
        for e in entries {
            if e.end < e.start {
                return Err(TimelineError::EmptyInterval { region: e.region.code().to_string(), start: e.start });
            }
            by_region.entry(e.region.code().to_string()).or_default().push(e);
        }
        for (region, list) in by_region.iter_mut() {
            list.sort_by_key(|e| e.start);
            for pair in list.windows(2) {
                if pair[1].start != pair[0].end + Duration::days(1) {
                    return Err(TimelineError::NotContiguous { region: region.clone(), at: pair[1].start });
                }
            }
        }

        let cov_start = by_region.values().map(|l| l[0].start).min().expect("non-empty");
        let cov_end = by_region.values().map(|l| l.last().expect("non-empty").end).max().expect("non-empty");
        for (region, list) in &by_region {
            let (s, e) = (list[0].start, list.last().expect("non-empty").end);
            if s != cov_start || e != cov_end {
                return Err(TimelineError::CoverageMismatch {
                    region: region.clone(),
                    start: s,
                    end: e,
                    cov_start,
                    cov_end,
                });
            }
        }

        let decree_start = by_region.values().flatten().filter(|e| e.tier != Tier::PreDecree).map(|e| e.start).min();
        if let Some(decree) = decree_start {
            if let Some(bad) = by_region.values().flatten().find(|e| e.tier == Tier::PreDecree && e.end >= decree) {
                return Err(TimelineError::PreDecreeAfterDecree {
                    region: bad.region.code().to_string(),
                    start: bad.start,
                    decree,
                });
            }
        }

        Ok(TierTimeline { by_region, coverage: (cov_start, cov_end), decree_start })
    }

    /// Parses `region,start_date,end_date,tier` rows (optional trailing
    /// `note` column).
    pub fn parse(text: &str) -> Result<Self, TimelineError> {
        let mut lines = numbered_lines(text);
        match lines.next() {
            Some((_, h)) if header_matches(h, &["region", "start_date", "end_date", "tier"], &["note"]) => {}
            _ => return Err(TimelineError::HeaderMismatch),
        }
        let mut entries = Vec::new();
        for (line, raw) in lines {
            let bad = |reason: String| TimelineError::BadLine { line, reason };
            let f = split_fields(raw);
            if f.len() < 4 {
                return Err(bad(format!("expected at least 4 fields, found {}", f.len())));
            }
            let region = AreaId::new(f[0], AreaLevel::Region).map_err(|e| bad(e.to_string()))?;
            let start = parse_day(f[1]).ok_or_else(|| bad(format!("bad start_date `{}`", f[1])))?;
            let end = parse_day(f[2]).ok_or_else(|| bad(format!("bad end_date `{}`", f[2])))?;
            let tier: Tier = f[3].parse().map_err(bad)?;
            // notes may themselves contain commas
            let note = (f.len() > 4).then(|| f[4..].join(","));
            entries.push(TimelineEntry { region, start, end, tier, note });
        }
        Self::new(entries)
    }

    /// Checks that every timeline region is a region-level node of `h`.
    pub fn validate_regions(&self, h: &GeoHierarchy) -> Result<(), TimelineError> {
        for code in self.by_region.keys() {
            match h.get(code) {
                Some(id) if id.level() == AreaLevel::Region => {}
                _ => return Err(TimelineError::NotARegion(code.clone())),
            }
        }
        Ok(())
    }

    pub fn coverage(&self) -> (NaiveDate, NaiveDate) {
        self.coverage
    }

    pub fn decree_start(&self) -> Option<NaiveDate> {
        self.decree_start
    }

    pub fn regions(&self) -> impl Iterator<Item = &AreaId> {
        self.by_region.values().map(|l| &l[0].region)
    }

    pub fn entries(&self, region: &AreaId) -> Result<&[TimelineEntry], TimelineError> {
        self.by_region
            .get(region.code())
            .map(Vec::as_slice)
            .ok_or_else(|| TimelineError::UnknownRegion(region.code().to_string()))
    }

    pub fn tier_at(&self, region: &AreaId, day: NaiveDate) -> Result<Tier, TimelineError> {
        let list = self.entries(region)?;
        let (start, end) = self.coverage;
        if day < start || day > end {
            return Err(TimelineError::DayOutOfCoverage { day, start, end });
        }
        let idx = list.partition_point(|e| e.start <= day) - 1;
        Ok(list[idx].tier)
    }

    /// One transition per adjacent pair of intervals whose tiers differ.
    pub fn detect_transitions(&self, region: &AreaId) -> Result<Vec<Transition>, TimelineError> {
        let list = self.entries(region)?;
        Ok(list
            .windows(2)
            .filter(|p| p[0].tier != p[1].tier)
            .map(|p| Transition { region: p[1].region.clone(), date: p[1].start, from: p[0].tier, to: p[1].tier })
            .collect())
    }

    /// Transitions of every region, ordered by region then date.
    pub fn all_transitions(&self) -> Vec<Transition> {
        self.regions().flat_map(|r| self.detect_transitions(r).expect("region from this timeline")).collect()
    }

    /// Day counts per tier for `region` over `from..=to`, clipped to coverage.
    pub fn tier_day_counts(
        &self,
        region: &AreaId,
        from: NaiveDate,
        to: NaiveDate,
    ) -> Result<BTreeMap<Tier, u32>, TimelineError> {
        let mut counts = BTreeMap::new();
        for e in self.entries(region)? {
            let s = e.start.max(from);
            let t = e.end.min(to);
            if s <= t {
                *counts.entry(e.tier).or_insert(0) += (t - s).num_days() as u32 + 1;
            }
        }
        Ok(counts)
    }
}

pub(crate) fn parse_day(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}
