//! Descriptive impact statistics: transition window means, percentage
//! variations, week-over-week deltas, period comparisons and rank
//! correlation.
//!
//! Every percentage is computed from raw (unnormalised) day values, so the
//! results do not depend on the normalisation reference at all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geo::AreaId;
use crate::indicators::{DayValues, IndicatorSet};
use crate::odm::Direction;
use crate::timeline::{Transition, TransitionKind};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_WINDOW_DAYS: u32 = 7;
const MIN_WINDOW_DAYS: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImpactError {
    #[error("{area} around {date}: {side} window has {available} of the {required} required days (missing {})", fmt_days(.missing))]
    InsufficientCoverage {
        area: String,
        date: NaiveDate,
        side: &'static str,
        available: usize,
        required: usize,
        missing: Vec<NaiveDate>,
    },
    #[error("no {kind} transition has usable data")]
    NoMatchingTransitions { kind: TransitionKind },
    #[error("no {direction} series for area {area}")]
    MissingSeries { area: String, direction: Direction },
    #[error("no value on {0}")]
    MissingValue(NaiveDate),
    #[error("baseline value is zero")]
    ZeroBaseline,
    #[error("window length must be positive")]
    ZeroWindow,
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("rank correlation is undefined for a constant input")]
    DegenerateInput,
    #[error("area sets differ: {0}")]
    KeyMismatch(String),
    #[error("bad day range `{0}`")]
    BadRange(String),
}

fn fmt_days(days: &[NaiveDate]) -> String {
    if days.is_empty() {
        return "none".into();
    }
    days.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

/// Which mean a transition impact is expressed against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// `100·(post − pre)/pre`.
    #[default]
    PreBaseline,
    /// `100·(post − pre)/post`.
    PostBaseline,
}

impl Baseline {
    pub fn as_str(self) -> &'static str {
        match self {
            Baseline::PreBaseline => "pre_baseline",
            Baseline::PostBaseline => "post_baseline",
        }
    }

    pub fn percent(self, pre: f64, post: f64) -> Result<f64, ImpactError> {
        let base = match self {
            Baseline::PreBaseline => pre,
            Baseline::PostBaseline => post,
        };
        if base == 0.0 {
            return Err(ImpactError::ZeroBaseline);
        }
        Ok(100.0 * (post - pre) / base)
    }
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pre" | "pre_baseline" => Ok(Baseline::PreBaseline),
            "post" | "post_baseline" => Ok(Baseline::PostBaseline),
            other => Err(format!("unknown baseline `{other}` (expected pre or post)")),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Inclusive range of calendar days.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DayRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DayRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, ImpactError> {
        if end < start {
            return Err(ImpactError::BadRange(format!("{start}..{end}")));
        }
        Ok(DayRange { start, end })
    }

    pub fn single(day: NaiveDate) -> Self {
        DayRange { start: day, end: day }
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end;
        self.start.iter_days().take_while(move |d| *d <= end)
    }

    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Parses `YYYY-MM-DD` or `YYYY-MM-DD..YYYY-MM-DD`.
impl FromStr for DayRange {
    type Err = ImpactError;

    fn from_str(s: &str) -> Result<Self, ImpactError> {
        let bad = || ImpactError::BadRange(s.to_string());
        let parse = |t: &str| NaiveDate::parse_from_str(t.trim(), "%Y-%m-%d").map_err(|_| bad());
        match s.split_once("..") {
            Some((a, b)) => DayRange::new(parse(a)?, parse(b)?),
            None => Ok(DayRange::single(parse(s)?)),
        }
    }
}

impl fmt::Display for DayRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

/// Pre/post means around one transition, in raw movement units.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowMeans {
    pub region: AreaId,
    pub direction: Direction,
    pub transition: Transition,
    pub pre_mean: f64,
    pub post_mean: f64,
    pub window_days: u32,
    pub pre_days: usize,
    pub post_days: usize,
}

impl WindowMeans {
    pub fn percent(&self, baseline: Baseline) -> Result<f64, ImpactError> {
        baseline.percent(self.pre_mean, self.post_mean)
    }
}

/// Optional clipping of the windows: days before `not_before` and days on or
/// after `before` are excluded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WindowBounds {
    pub not_before: Option<NaiveDate>,
    pub before: Option<NaiveDate>,
}

fn side_mean<S: DayValues + ?Sized>(
    series: &S,
    days: impl Iterator<Item = NaiveDate>,
    required: usize,
    area: &AreaId,
    date: NaiveDate,
    side: &'static str,
) -> Result<(f64, usize), ImpactError> {
    let mut sum = 0.0;
    let mut n = 0;
    let mut missing = Vec::new();
    for day in days {
        match series.day_value(day) {
            Some(v) => {
                sum += v;
                n += 1;
            }
            None => missing.push(day),
        }
    }
    if n < required {
        return Err(ImpactError::InsufficientCoverage {
            area: area.code().to_string(),
            date,
            side,
            available: n,
            required,
            missing,
        });
    }
    Ok((sum / n as f64, n))
}

/// Means over `date−w … date−1` and `date … date+w−1`, clipped to `bounds`.
/// Missing days are skipped; each side needs at least `min(3, w)` days.
pub fn window_means_bounded<S: DayValues + ?Sized>(
    series: &S,
    region: &AreaId,
    direction: Direction,
    t: &Transition,
    window_days: u32,
    bounds: WindowBounds,
) -> Result<WindowMeans, ImpactError> {
    if window_days == 0 {
        return Err(ImpactError::ZeroWindow);
    }
    let w = i64::from(window_days);
    let required = window_days.min(MIN_WINDOW_DAYS) as usize;
    let pre = (1..=w).rev().map(|k| t.date - Duration::days(k)).filter(|d| bounds.not_before.is_none_or(|b| *d >= b));
    let post = (0..w).map(|k| t.date + Duration::days(k)).filter(|d| bounds.before.is_none_or(|b| *d < b));
    let (pre_mean, pre_days) = side_mean(series, pre, required, region, t.date, "pre")?;
    let (post_mean, post_days) = side_mean(series, post, required, region, t.date, "post")?;
    Ok(WindowMeans {
        region: region.clone(),
        direction,
        transition: t.clone(),
        pre_mean,
        post_mean,
        window_days,
        pre_days,
        post_days,
    })
}

pub fn window_means<S: DayValues + ?Sized>(
    series: &S,
    direction: Direction,
    t: &Transition,
    window_days: u32,
) -> Result<WindowMeans, ImpactError> {
    window_means_bounded(series, &t.region, direction, t, window_days, WindowBounds::default())
}

/// Clipping bounds for `t` given the other transitions of its region.
pub fn neighbour_bounds(t: &Transition, transitions: &[Transition]) -> WindowBounds {
    let same = transitions.iter().filter(|o| o.region == t.region);
    WindowBounds {
        not_before: same.clone().map(|o| o.date).filter(|d| *d < t.date).max(),
        before: same.map(|o| o.date).filter(|d| *d > t.date).min(),
    }
}

/// Where an impact figure was pooled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    Overall,
    PerRegion(AreaId),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Overall => f.write_str("overall"),
            Scope::PerRegion(a) => f.write_str(a.code()),
        }
    }
}

impl Serialize for Scope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionImpact {
    pub transition_kind: TransitionKind,
    pub direction: Direction,
    pub scope: Scope,
    pub percent: f64,
    pub baseline: Baseline,
    pub window_days: u32,
    pub n_replicates: usize,
}

/// Window means for every usable replicate of `kind`. Replicates whose
/// windows lack coverage are left out.
pub fn collect_window_means(
    set: &IndicatorSet,
    transitions: &[Transition],
    kind: TransitionKind,
    direction: Direction,
    window_days: u32,
) -> Result<Vec<WindowMeans>, ImpactError> {
    let mut out = Vec::new();
    for t in transitions.iter().filter(|t| t.kind() == kind) {
        let series = set
            .get(&t.region, direction)
            .ok_or_else(|| ImpactError::MissingSeries { area: t.region.code().to_string(), direction })?;
        let bounds = neighbour_bounds(t, transitions);
        match window_means_bounded(series, &t.region, direction, t, window_days, bounds) {
            Ok(m) => out.push(m),
            Err(ImpactError::InsufficientCoverage { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn pooled(means: &[&WindowMeans], baseline: Baseline) -> Result<f64, ImpactError> {
    let n = means.len() as f64;
    let pre = means.iter().map(|m| m.pre_mean).sum::<f64>() / n;
    let post = means.iter().map(|m| m.post_mean).sum::<f64>() / n;
    baseline.percent(pre, post)
}

/// Average variation over every (region, replicate) of `kind`, each weighted
/// equally.
pub fn transition_impact_overall(
    set: &IndicatorSet,
    transitions: &[Transition],
    kind: TransitionKind,
    direction: Direction,
    window_days: u32,
    baseline: Baseline,
) -> Result<TransitionImpact, ImpactError> {
    let means = collect_window_means(set, transitions, kind, direction, window_days)?;
    if means.is_empty() {
        return Err(ImpactError::NoMatchingTransitions { kind });
    }
    let refs: Vec<&WindowMeans> = means.iter().collect();
    Ok(TransitionImpact {
        transition_kind: kind,
        direction,
        scope: Scope::Overall,
        percent: pooled(&refs, baseline)?,
        baseline,
        window_days,
        n_replicates: means.len(),
    })
}

/// One result per region having at least one usable replicate of `kind`.
pub fn transition_impact_regional(
    set: &IndicatorSet,
    transitions: &[Transition],
    kind: TransitionKind,
    direction: Direction,
    window_days: u32,
    baseline: Baseline,
) -> Result<Vec<TransitionImpact>, ImpactError> {
    let means = collect_window_means(set, transitions, kind, direction, window_days)?;
    if means.is_empty() {
        return Err(ImpactError::NoMatchingTransitions { kind });
    }
    let mut by_region: BTreeMap<&AreaId, Vec<&WindowMeans>> = BTreeMap::new();
    for m in &means {
        by_region.entry(&m.region).or_default().push(m);
    }
    by_region
        .into_iter()
        .map(|(region, ms)| {
            Ok(TransitionImpact {
                transition_kind: kind,
                direction,
                scope: Scope::PerRegion(region.clone()),
                percent: pooled(&ms, baseline)?,
                baseline,
                window_days,
                n_replicates: ms.len(),
            })
        })
        .collect()
}

/// Distinct kinds in `transitions`, ordered by their label.
pub fn observed_kinds(transitions: &[Transition]) -> Vec<TransitionKind> {
    let kinds: BTreeSet<(String, TransitionKind)> = transitions.iter().map(|t| (t.kind().label(), t.kind())).collect();
    kinds.into_iter().map(|(_, k)| k).collect()
}

/// `100·(v(day) − v(day−7))/v(day−7)`.
pub fn week_over_week<S: DayValues + ?Sized>(series: &S, day: NaiveDate) -> Result<f64, ImpactError> {
    let prev_day = day - Duration::days(7);
    let prev = series.day_value(prev_day).ok_or(ImpactError::MissingValue(prev_day))?;
    let cur = series.day_value(day).ok_or(ImpactError::MissingValue(day))?;
    Baseline::PreBaseline.percent(prev, cur)
}

fn period_mean<S: DayValues + ?Sized>(
    series: &S,
    r: DayRange,
    area: &str,
    side: &'static str,
) -> Result<f64, ImpactError> {
    let mut sum = 0.0;
    let mut missing = Vec::new();
    for d in r.days() {
        match series.day_value(d) {
            Some(v) => sum += v,
            None => missing.push(d),
        }
    }
    if !missing.is_empty() {
        return Err(ImpactError::InsufficientCoverage {
            area: area.to_string(),
            date: r.start,
            side,
            available: r.len() - missing.len(),
            required: r.len(),
            missing,
        });
    }
    Ok(sum / r.len() as f64)
}

/// `100·(mean_b − mean_a)/mean_a`, with `a` the baseline period. Every day
/// of both periods must be present.
pub fn period_variation<S: DayValues + ?Sized>(
    series: &S,
    period_a: DayRange,
    period_b: DayRange,
) -> Result<f64, ImpactError> {
    let a = period_mean(series, period_a, "", "baseline")?;
    let b = period_mean(series, period_b, "", "comparison")?;
    Baseline::PreBaseline.percent(a, b)
}

/// Ranks starting at 1, ties receiving the average of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, ImpactError> {
    if xs.len() != ys.len() {
        return Err(ImpactError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(ImpactError::TooFewPoints { needed: 2, got: xs.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(ImpactError::DegenerateInput);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, ImpactError> {
    if xs.len() != ys.len() {
        return Err(ImpactError::LengthMismatch(xs.len(), ys.len()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CasePair {
    pub region: String,
    pub variation: f64,
    pub cases: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankCorrelation {
    pub rho: f64,
    pub pairs: Vec<CasePair>,
}

/// Spearman correlation between regional variations and case rates.
pub fn variation_vs_cases(
    variations: &BTreeMap<AreaId, f64>,
    cases_per_100k: &BTreeMap<AreaId, f64>,
) -> Result<RankCorrelation, ImpactError> {
    let a: BTreeSet<&AreaId> = variations.keys().collect();
    let b: BTreeSet<&AreaId> = cases_per_100k.keys().collect();
    if a != b {
        let diff: Vec<&str> = a.symmetric_difference(&b).map(|x| x.code()).collect();
        return Err(ImpactError::KeyMismatch(diff.join(" ")));
    }
    if a.len() < 3 {
        return Err(ImpactError::TooFewPoints { needed: 3, got: a.len() });
    }
    let pairs: Vec<CasePair> = variations
        .iter()
        .map(|(k, v)| CasePair { region: k.code().to_string(), variation: *v, cases: cases_per_100k[k] })
        .collect();
    let xs: Vec<f64> = pairs.iter().map(|p| p.variation).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.cases).collect();
    Ok(RankCorrelation { rho: spearman(&xs, &ys)?, pairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImpactReport {
    pub schema_version: u32,
    pub results: Vec<TransitionImpact>,
}

impl ImpactReport {
    pub fn new(results: Vec<TransitionImpact>) -> Self {
        ImpactReport { schema_version: SCHEMA_VERSION, results }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("schema_version,transition_kind,direction,scope,percent,baseline,window_days,n_replicates\n");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.schema_version,
                r.transition_kind,
                r.direction,
                r.scope,
                r.percent,
                r.baseline,
                r.window_days,
                r.n_replicates
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<18} {:<9} {:<10} {:>9} {:>5}\n", "transition", "direction", "scope", "percent", "n");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<18} {:<9} {:<10} {:>8.1}% {:>5}",
                r.transition_kind.label(),
                r.direction.as_str(),
                r.scope.to_string(),
                r.percent,
                r.n_replicates
            );
        }
        let _ = writeln!(out, "baseline: {}", self.results.first().map_or("pre_baseline", |r| r.baseline.as_str()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::AreaLevel;
    use crate::indicators::IndicatorSeries;
    use crate::timeline::Tier;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn region(code: &str) -> AreaId {
        AreaId::new(code, AreaLevel::Region).unwrap()
    }

    fn step(code: &str, at: NaiveDate, before: f64, after: f64) -> IndicatorSeries {
        let start = at - Duration::days(14);
        IndicatorSeries::daily(
            region(code),
            Direction::Total,
            (0..28).map(|k| {
                let day = start + Duration::days(k);
                (day, if day < at { before } else { after })
            }),
        )
    }

    fn transition(code: &str, date: NaiveDate, from: Tier, to: Tier) -> Transition {
        Transition { region: region(code), date, from, to }
    }

    #[test]
    fn constant_and_step_windows() {
        let at = d("2020-11-15");
        let t = transition("A", at, Tier::Yellow, Tier::Red);
        let flat = step("A", at, 5.0, 5.0);
        let m = window_means(&flat, Direction::Total, &t, 7).unwrap();
        assert_eq!((m.pre_mean, m.post_mean), (5.0, 5.0));
        let s = step("A", at, 10.0, 6.0);
        let m = window_means(&s, Direction::Total, &t, 3).unwrap();
        assert_eq!((m.pre_mean, m.post_mean), (10.0, 6.0));
    }

    #[test]
    fn missing_days_skipped_then_rejected() {
        let at = d("2020-11-15");
        let t = transition("A", at, Tier::Yellow, Tier::Red);
        let mut days: BTreeMap<NaiveDate, f64> = (1..=7).map(|k| (at - Duration::days(k), 10.0)).collect();
        days.extend((0..7).map(|k| (at + Duration::days(k), 6.0)));
        days.remove(&(at - Duration::days(2)));
        let m = window_means(&days, Direction::Total, &t, 7).unwrap();
        assert_eq!(m.pre_days, 6);
        for k in 0..5 {
            days.remove(&(at + Duration::days(k)));
        }
        match window_means(&days, Direction::Total, &t, 7).unwrap_err() {
            ImpactError::InsufficientCoverage { side, available, missing, .. } => {
                assert_eq!(side, "post");
                assert_eq!(available, 2);
                assert_eq!(missing.len(), 5);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bounds_truncate_windows() {
        let at = d("2020-11-15");
        let t = transition("A", at, Tier::Yellow, Tier::Red);
        let s = step("A", at, 10.0, 6.0);
        let b = WindowBounds { not_before: Some(at - Duration::days(4)), before: Some(at + Duration::days(5)) };
        let m = window_means_bounded(&s, &t.region, Direction::Total, &t, 7, b).unwrap();
        assert_eq!((m.pre_days, m.post_days), (4, 5));
    }

    fn three_region_set(post: f64) -> (IndicatorSet, Vec<Transition>) {
        let at = d("2020-11-15");
        let codes = ["A", "B", "C"];
        let mut csv = String::from(crate::indicators::INDICATOR_HEADER);
        csv.push('\n');
        let mut ts = Vec::new();
        for c in codes {
            for (day, v) in step(c, at, 100.0, post).raw_points() {
                csv.push_str(&format!("{c},region,total,day,{},{v},{v},1\n", day.format("%Y-%m-%dT%H:%M:%SZ")));
            }
            ts.push(transition(c, at, Tier::Yellow, Tier::Red));
        }
        (IndicatorSet::parse_csv(&csv).unwrap(), ts)
    }

    #[test]
    fn overall_under_both_baselines() {
        let (set, ts) = three_region_set(80.0);
        let kind = TransitionKind::new(Tier::Yellow, Tier::Red);
        let pre = transition_impact_overall(&set, &ts, kind, Direction::Total, 7, Baseline::PreBaseline).unwrap();
        assert_eq!(pre.percent, -20.0);
        assert_eq!(pre.n_replicates, 3);
        let post = transition_impact_overall(&set, &ts, kind, Direction::Total, 7, Baseline::PostBaseline).unwrap();
        assert_eq!(post.percent, -25.0);
        let other = TransitionKind::new(Tier::Orange, Tier::Red);
        assert!(matches!(
            transition_impact_overall(&set, &ts, other, Direction::Total, 7, Baseline::PreBaseline),
            Err(ImpactError::NoMatchingTransitions { .. })
        ));
    }

    #[test]
    fn regional_single_replicate_matches_overall() {
        let (set, ts) = three_region_set(80.0);
        let kind = TransitionKind::new(Tier::Yellow, Tier::Red);
        let only_a = &ts[..1];
        let overall =
            transition_impact_overall(&set, only_a, kind, Direction::Total, 7, Baseline::PreBaseline).unwrap();
        let regional =
            transition_impact_regional(&set, only_a, kind, Direction::Total, 7, Baseline::PreBaseline).unwrap();
        assert_eq!(regional.len(), 1);
        assert_eq!(regional[0].percent, overall.percent);
        assert_eq!(regional[0].scope, Scope::PerRegion(region("A")));
    }

    #[test]
    fn week_over_week_examples() {
        let day = d("2020-12-25");
        let prev = day - Duration::days(7);
        let m = |a: f64, b: f64| BTreeMap::from([(prev, a), (day, b)]);
        assert_eq!(week_over_week(&m(100.0, 100.0), day).unwrap(), 0.0);
        assert!((week_over_week(&m(100.0, 44.0), day).unwrap() + 56.0).abs() < 1e-12);
        assert!((week_over_week(&m(100.0, 234.0), day).unwrap() - 134.0).abs() < 1e-12);
        assert_eq!(week_over_week(&m(0.0, 5.0), day).unwrap_err(), ImpactError::ZeroBaseline);
        assert_eq!(week_over_week(&BTreeMap::from([(day, 1.0)]), day).unwrap_err(), ImpactError::MissingValue(prev));
    }

    #[test]
    fn period_variation_examples() {
        let a = d("2020-10-27");
        let b = d("2020-11-10");
        let m = BTreeMap::from([(a, 100.0), (b, 76.5)]);
        assert_eq!(period_variation(&m, DayRange::single(a), DayRange::single(a)).unwrap(), 0.0);
        let v = period_variation(&m, DayRange::single(a), DayRange::single(b)).unwrap();
        assert!((v + 23.5).abs() < 1e-12);
        assert!(matches!(
            period_variation(&m, DayRange::new(a, b).unwrap(), DayRange::single(b)),
            Err(ImpactError::InsufficientCoverage { .. })
        ));
    }

    #[test]
    fn day_range_parsing() {
        let r: DayRange = "2021-01-01..2021-01-31".parse().unwrap();
        assert_eq!(r.len(), 31);
        assert_eq!(r.to_string(), "2021-01-01..2021-01-31");
        assert_eq!("2021-01-05".parse::<DayRange>().unwrap().len(), 1);
        assert!("2021-02-01..2021-01-01".parse::<DayRange>().is_err());
    }

    #[test]
    fn spearman_examples() {
        let up = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&up, &[10.0, 20.0, 30.0, 40.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&up, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman(&up, &[2.0, 1.0, 4.0, 3.0]).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(spearman(&up, &[1.0, 1.0, 1.0, 1.0]).unwrap_err(), ImpactError::DegenerateInput);
        assert_eq!(spearman(&up, &[1.0]).unwrap_err(), ImpactError::LengthMismatch(4, 1));
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn variation_vs_cases_errors() {
        let two = BTreeMap::from([(region("A"), 1.0), (region("B"), 2.0)]);
        assert!(matches!(variation_vs_cases(&two, &two), Err(ImpactError::TooFewPoints { .. })));
        let flat = BTreeMap::from([(region("A"), 1.0), (region("B"), 1.0), (region("C"), 1.0)]);
        let cases = BTreeMap::from([(region("A"), 1.0), (region("B"), 2.0), (region("C"), 3.0)]);
        assert_eq!(variation_vs_cases(&flat, &cases).unwrap_err(), ImpactError::DegenerateInput);
        let other = BTreeMap::from([(region("A"), 1.0), (region("B"), 2.0), (region("D"), 3.0)]);
        assert!(matches!(variation_vs_cases(&cases, &other), Err(ImpactError::KeyMismatch(_))));
    }

    #[test]
    fn report_formats() {
        let (set, ts) = three_region_set(80.0);
        let kind = TransitionKind::new(Tier::Yellow, Tier::Red);
        let r = transition_impact_overall(&set, &ts, kind, Direction::Total, 7, Baseline::PreBaseline).unwrap();
        let rep = ImpactReport::new(vec![r]);
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["results"][0]["transition_kind"], "yellow:red");
        assert_eq!(json["results"][0]["scope"], "overall");
        assert_eq!(json["results"][0]["baseline"], "pre_baseline");
        assert!(rep.to_csv().lines().nth(1).unwrap().starts_with("1,yellow:red,total,overall,-20,"));
        assert!(rep.to_table().contains("Yellow→Red"));
    }
}
