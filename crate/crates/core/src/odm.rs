//! Origin-destination movement records: parsing, validation and direction
//! classification relative to a focal area.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{AreaId, GeoError, GeoHierarchy, EXTERNAL_CODE};
use crate::text::{header_matches, split_fields};

pub const ODM_HEADER: &str = "period_start,bucket,origin,destination,count";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Hour,
    Day,
}

impl Bucket {
    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Hour => "hour",
            Bucket::Day => "day",
        }
    }

    pub fn is_aligned(self, ts: &DateTime<Utc>) -> bool {
        let sub_hour = ts.minute() == 0 && ts.second() == 0 && ts.nanosecond() == 0;
        match self {
            Bucket::Hour => sub_hour,
            Bucket::Day => sub_hour && ts.hour() == 0,
        }
    }
}

impl FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hour" => Ok(Bucket::Hour),
            "day" => Ok(Bucket::Day),
            _ => Err(format!("unknown bucket `{s}`")),
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Movement direction relative to a focal area. `Total` is derived and never
/// attached to a raw record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Internal,
    Inward,
    Outward,
    Total,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Internal, Direction::Inward, Direction::Outward, Direction::Total];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Internal => "internal",
            Direction::Inward => "inward",
            Direction::Outward => "outward",
            Direction::Total => "total",
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Direction::ALL.into_iter().find(|d| d.as_str() == s).ok_or_else(|| format!("unknown direction `{s}`"))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// One timestamped origin → destination movement count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdmRecord {
    pub period_start: DateTime<Utc>,
    pub bucket: Bucket,
    pub origin: AreaId,
    pub destination: AreaId,
    pub count: u64,
}

impl OdmRecord {
    pub fn write_line<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{}",
            self.period_start.format("%Y-%m-%dT%H:%M:%SZ"),
            self.bucket,
            self.origin,
            self.destination,
            self.count
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    FieldCount(usize),
    BadTimestamp(String),
    Misaligned(String),
    BadBucket(String),
    NegativeCount(String),
    BadCount(String),
    UnknownArea(String),
    ExternalBothEnds,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::FieldCount(n) => write!(f, "expected 5 fields, found {n}"),
            RejectReason::BadTimestamp(s) => write!(f, "bad timestamp `{s}`"),
            RejectReason::Misaligned(s) => write!(f, "timestamp `{s}` not aligned to its bucket"),
            RejectReason::BadBucket(s) => write!(f, "unknown bucket `{s}`"),
            RejectReason::NegativeCount(s) => write!(f, "negative count `{s}`"),
            RejectReason::BadCount(s) => write!(f, "count `{s}` is not a decimal integer"),
            RejectReason::UnknownArea(s) => write!(f, "unknown area `{s}`"),
            RejectReason::ExternalBothEnds => write!(f, "both endpoints are external"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectedLine {
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Clone, Debug, Default)]
pub struct OdmParse {
    pub records: Vec<OdmRecord>,
    pub rejects: Vec<RejectedLine>,
}

#[derive(Debug, Error)]
pub enum OdmError {
    #[error("ODM header must be `{ODM_HEADER}`")]
    HeaderMismatch,
    #[error("reading ODM input: {0}")]
    Io(#[from] io::Error),
}

/// Parses an ODM file held in memory. Malformed rows come back as
/// rejections; only a wrong header is fatal.
pub fn parse_odm(text: &str, h: &GeoHierarchy) -> Result<OdmParse, OdmError> {
    let mut parser = OdmParser::new(h);
    for (i, line) in text.lines().enumerate() {
        parser.feed(i + 1, line)?;
    }
    parser.finish()
}

/// Streaming variant of [`parse_odm`].
pub fn parse_odm_reader<R: BufRead>(reader: R, h: &GeoHierarchy) -> Result<OdmParse, OdmError> {
    let mut parser = OdmParser::new(h);
    for (i, line) in reader.lines().enumerate() {
        parser.feed(i + 1, &line?)?;
    }
    parser.finish()
}

struct OdmParser<'a> {
    h: &'a GeoHierarchy,
    seen_header: bool,
    out: OdmParse,
}

impl<'a> OdmParser<'a> {
    fn new(h: &'a GeoHierarchy) -> Self {
        OdmParser { h, seen_header: false, out: OdmParse::default() }
    }

    fn feed(&mut self, line_no: usize, line: &str) -> Result<(), OdmError> {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            return Ok(());
        }
        if !self.seen_header {
            if !header_matches(line, &split_fields(ODM_HEADER), &[]) {
                return Err(OdmError::HeaderMismatch);
            }
            self.seen_header = true;
            return Ok(());
        }
        match parse_record(line, self.h) {
            Ok(r) => self.out.records.push(r),
            Err(reason) => self.out.rejects.push(RejectedLine { line: line_no, reason }),
        }
        Ok(())
    }

    fn finish(self) -> Result<OdmParse, OdmError> {
        if !self.seen_header {
            return Err(OdmError::HeaderMismatch);
        }
        Ok(self.out)
    }
}

fn parse_record(line: &str, h: &GeoHierarchy) -> Result<OdmRecord, RejectReason> {
    let f = split_fields(line);
    if f.len() != 5 {
        return Err(RejectReason::FieldCount(f.len()));
    }
    let period_start = DateTime::parse_from_rfc3339(f[0])
        .map_err(|_| RejectReason::BadTimestamp(f[0].to_string()))?
        .with_timezone(&Utc);
    let bucket: Bucket = f[1].parse().map_err(|_| RejectReason::BadBucket(f[1].to_string()))?;
    if !bucket.is_aligned(&period_start) {
        return Err(RejectReason::Misaligned(f[0].to_string()));
    }
    let area = |code: &str| -> Result<AreaId, RejectReason> {
        if code == EXTERNAL_CODE {
            return Ok(AreaId::external());
        }
        h.get(code).cloned().ok_or_else(|| RejectReason::UnknownArea(code.to_string()))
    };
    let origin = area(f[2])?;
    let destination = area(f[3])?;
    if origin.is_external() && destination.is_external() {
        return Err(RejectReason::ExternalBothEnds);
    }
    let count = parse_count(f[4])?;
    Ok(OdmRecord { period_start, bucket, origin, destination, count })
}

fn parse_count(s: &str) -> Result<u64, RejectReason> {
    if let Some(rest) = s.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RejectReason::NegativeCount(s.to_string()));
        }
        return Err(RejectReason::BadCount(s.to_string()));
    }
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RejectReason::BadCount(s.to_string()));
    }
    s.parse().map_err(|_| RejectReason::BadCount(s.to_string()))
}

/// Where a record sits relative to `focal`: `None` when neither endpoint
/// lifts to it.
pub fn classify_direction(record: &OdmRecord, focal: &AreaId, h: &GeoHierarchy) -> Result<Option<Direction>, GeoError> {
    if !h.contains(focal) {
        return Err(GeoError::UnknownArea(focal.code().to_string()));
    }
    let level = focal.level();
    let o = h.lift(&record.origin, level)?;
    let d = h.lift(&record.destination, level)?;
    Ok(match (o == *focal, d == *focal) {
        (true, true) => Some(Direction::Internal),
        (false, true) => Some(Direction::Inward),
        (true, false) => Some(Direction::Outward),
        (false, false) => None,
    })
}
