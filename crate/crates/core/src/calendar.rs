use std::collections::BTreeSet;

use chrono::{Datelike, NaiveDate, Weekday};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("holiday file line {line}: `{text}` is not an ISO-8601 date")]
pub struct HolidayParseError {
    pub line: usize,
    pub text: String,
}

/// A set of bank holidays.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HolidayCalendar {
    holidays: BTreeSet<NaiveDate>,
}

impl HolidayCalendar {
    pub fn new(days: impl IntoIterator<Item = NaiveDate>) -> Self {
        HolidayCalendar { holidays: days.into_iter().collect() }
    }

    /// One `YYYY-MM-DD` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, HolidayParseError> {
        let mut holidays = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let day = NaiveDate::parse_from_str(body, "%Y-%m-%d")
                .map_err(|_| HolidayParseError { line: i + 1, text: body.to_string() })?;
            holidays.insert(day);
        }
        Ok(HolidayCalendar { holidays })
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.holidays.contains(&day)
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.holidays.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.holidays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holidays.is_empty()
    }
}

pub fn is_weekend(day: NaiveDate) -> bool {
    matches!(day.weekday(), Weekday::Sat | Weekday::Sun)
}

pub fn is_weekend_or_holiday(day: NaiveDate, cal: &HolidayCalendar) -> bool {
    is_weekend(day) || cal.contains(day)
}
