//! Energy-based GDP nowcasting: a quadratic GDP–energy fit, a linear
//! energy–mobility fit, their composition with first-order interval
//! propagation, and GDP-weighted regional transition effects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geo::AreaId;
use crate::impact::{neighbour_bounds, spearman, window_means_bounded, DayRange, ImpactError};
use crate::indicators::{DayValues, IndicatorSet};
use crate::odm::Direction;
use crate::regress::{ols_fit, student_t, DesignMatrix, Interval, OlsFit, RegressError};
use crate::text::{header_matches, numbered_lines, split_fields};
use crate::timeline::{Transition, TransitionKind};

pub const MONTHLY_HEADER: &str = "series,year,month,value";
pub const WEIGHTS_HEADER: &str = "region,weight";
pub const ENERGY: &str = "energy";
pub const ENERGY_SQ: &str = "energy^2";
pub const MOBILITY: &str = "mobility";
pub const BASE_MONTH: YearMonth = YearMonth { year: 2020, month: 1 };
const WEIGHT_SUM_TOL: f64 = 0.005;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NowcastError {
    #[error("{needed} overlapping months are required, found {got}")]
    InsufficientOverlap { needed: usize, got: usize },
    #[error("{series} series lacks base period {base} at 100")]
    MissingBasePeriod { series: String, base: String },
    #[error("no energy or mobility value for {0}")]
    NoInputForMonth(YearMonth),
    #[error("no GDP weight for region {0}")]
    MissingWeight(String),
    #[error("weight for {region} must lie in (0, 1), got {weight}")]
    BadWeight { region: String, weight: f64 },
    #[error("weights sum to {0}, expected 1 within {WEIGHT_SUM_TOL}")]
    WeightSum(f64),
    #[error("header must be `{0}`")]
    HeaderMismatch(&'static str),
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error(transparent)]
    Regress(#[from] RegressError),
    #[error(transparent)]
    Impact(#[from] ImpactError),
}

/// A calendar month.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            YearMonth { year: self.year + 1, month: 1 }
        } else {
            YearMonth { year: self.year, month: self.month + 1 }
        }
    }

    pub fn month_name(self) -> &'static str {
        const NAMES: [&str; 12] = [
            "January",
            "February",
            "March",
            "April",
            "May",
            "June",
            "July",
            "August",
            "September",
            "October",
            "November",
            "December",
        ];
        NAMES[self.month as usize - 1]
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("`{s}` is not a YYYY-MM month");
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        YearMonth::new(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?).ok_or_else(bad)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `YYYY-MM..YYYY-MM`.
pub fn parse_month_range(s: &str) -> Result<(YearMonth, YearMonth), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("`{s}` is not a YYYY-MM..YYYY-MM range"))?;
    let (a, b): (YearMonth, YearMonth) = (a.parse()?, b.parse()?);
    if b < a {
        return Err(format!("range `{s}` ends before it starts"));
    }
    Ok((a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeriesKind {
    Gdp,
    Energy,
    Mobility,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Gdp => "gdp",
            SeriesKind::Energy => "energy",
            SeriesKind::Mobility => "mobility",
        }
    }
}

impl FromStr for SeriesKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gdp" => Ok(SeriesKind::Gdp),
            "energy" => Ok(SeriesKind::Energy),
            "mobility" => Ok(SeriesKind::Mobility),
            other => Err(format!("unknown series `{other}`")),
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Monthly index values, base period 100.
#[derive(Clone, Debug, PartialEq)]
pub struct MonthlySeries {
    pub kind: SeriesKind,
    pub points: BTreeMap<YearMonth, f64>,
}

impl MonthlySeries {
    pub fn new(kind: SeriesKind, points: impl IntoIterator<Item = (YearMonth, f64)>) -> Self {
        MonthlySeries { kind, points: points.into_iter().collect() }
    }

    pub fn get(&self, m: YearMonth) -> Option<f64> {
        self.points.get(&m).copied()
    }

    fn missing_base(&self, base: YearMonth) -> NowcastError {
        NowcastError::MissingBasePeriod { series: self.kind.to_string(), base: base.to_string() }
    }

    /// Rescales so that `base` equals 100.
    pub fn rebased(&self, base: YearMonth) -> Result<MonthlySeries, NowcastError> {
        let b = self.get(base).filter(|v| *v != 0.0).ok_or_else(|| self.missing_base(base))?;
        Ok(MonthlySeries { kind: self.kind, points: self.points.iter().map(|(m, v)| (*m, 100.0 * v / b)).collect() })
    }

    /// Checks that the base month is present and equal to 100.
    pub fn check_base(&self, base: YearMonth) -> Result<(), NowcastError> {
        match self.get(base) {
            Some(v) if (v - 100.0).abs() <= 1e-9 => Ok(()),
            _ => Err(self.missing_base(base)),
        }
    }
}

/// Reads a `series,year,month,value` file into one series per name.
pub fn parse_monthly(text: &str) -> Result<BTreeMap<SeriesKind, MonthlySeries>, NowcastError> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, h)) if header_matches(h, &split_fields(MONTHLY_HEADER), &[]) => {}
        _ => return Err(NowcastError::HeaderMismatch(MONTHLY_HEADER)),
    }
    let mut out: BTreeMap<SeriesKind, MonthlySeries> = BTreeMap::new();
    for (line, raw) in lines {
        let bad = |reason: String| NowcastError::BadLine { line, reason };
        let f = split_fields(raw);
        if f.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", f.len())));
        }
        let kind: SeriesKind = f[0].parse().map_err(bad)?;
        let year: i32 = f[1].parse().map_err(|_| bad(format!("bad year `{}`", f[1])))?;
        let month = f[2]
            .parse()
            .ok()
            .and_then(|m| YearMonth::new(year, m))
            .ok_or_else(|| bad(format!("bad month `{}`", f[2])))?;
        let value: f64 =
            f[3].parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| bad(format!("bad value `{}`", f[3])))?;
        let series = out.entry(kind).or_insert_with(|| MonthlySeries::new(kind, []));
        if series.points.insert(month, value).is_some() {
            return Err(bad(format!("duplicate {kind} value for {month}")));
        }
    }
    Ok(out)
}

pub fn write_monthly<'a>(series: impl IntoIterator<Item = &'a MonthlySeries>) -> String {
    let mut out = format!("{MONTHLY_HEADER}\n");
    for s in series {
        for (m, v) in &s.points {
            let _ = writeln!(out, "{},{},{},{}", s.kind, m.year, m.month, v);
        }
    }
    out
}

fn overlap(a: &MonthlySeries, b: &MonthlySeries, window: Option<(YearMonth, YearMonth)>) -> Vec<(f64, f64)> {
    a.points
        .iter()
        .filter(|(m, _)| window.is_none_or(|(lo, hi)| **m >= lo && **m <= hi))
        .filter_map(|(m, x)| b.get(*m).map(|y| (*x, y)))
        .collect()
}

/// `gdp = α0 + α1·energy + α2·energy²` over the overlapping months inside
/// `window`.
pub fn fit_gdp_energy(
    gdp: &MonthlySeries,
    energy: &MonthlySeries,
    window: Option<(YearMonth, YearMonth)>,
) -> Result<OlsFit, NowcastError> {
    gdp.check_base(BASE_MONTH)?;
    energy.check_base(BASE_MONTH)?;
    let pairs = overlap(energy, gdp, window);
    if pairs.len() < 6 {
        return Err(NowcastError::InsufficientOverlap { needed: 6, got: pairs.len() });
    }
    let e: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    let y = pairs.iter().map(|p| p.1).collect();
    let d = DesignMatrix::new(vec![(ENERGY.into(), e), (ENERGY_SQ.into(), e2)], y, true)?;
    Ok(ols_fit(&d)?)
}

/// `energy = β0 + β1·mobility`.
pub fn fit_energy_mobility(
    energy: &MonthlySeries,
    mobility: &MonthlySeries,
    window: Option<(YearMonth, YearMonth)>,
) -> Result<OlsFit, NowcastError> {
    energy.check_base(BASE_MONTH)?;
    mobility.check_base(BASE_MONTH)?;
    let pairs = overlap(mobility, energy, window);
    if pairs.len() < 3 {
        return Err(NowcastError::InsufficientOverlap { needed: 3, got: pairs.len() });
    }
    let m = pairs.iter().map(|p| p.0).collect();
    let y = pairs.iter().map(|p| p.1).collect();
    let d = DesignMatrix::new(vec![(MOBILITY.into(), m)], y, true)?;
    Ok(ols_fit(&d)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Observed,
    ForecastEq1,
    ForecastChain,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NowcastRow {
    pub year: i32,
    pub month: u32,
    pub value: f64,
    pub half_width: Option<f64>,
    pub kind: RowKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NowcastTable {
    pub schema_version: u32,
    pub rows: Vec<NowcastRow>,
}

fn gdp_at(fit1: &OlsFit, e: f64, interval: Interval) -> Result<crate::regress::Prediction, RegressError> {
    fit1.predict(&[(ENERGY, e), (ENERGY_SQ, e * e)], interval)
}

/// Chain forecast from mobility `m`: point through both fits, 95% half-width
/// from first-order propagation of the energy prediction error through the
/// local slope of the GDP curve.
pub fn chain_forecast(fit1: &OlsFit, fit2: &OlsFit, m: f64) -> Result<(f64, f64), NowcastError> {
    let e_hat = fit2.predict(&[(MOBILITY, m)], Interval::None)?.point;
    let x1 = fit1.design_row(&[(ENERGY, e_hat), (ENERGY_SQ, e_hat * e_hat)])?;
    let x2 = fit2.design_row(&[(MOBILITY, m)])?;
    let point = gdp_at(fit1, e_hat, Interval::None)?.point;
    let a1 = fit1.coef(ENERGY).ok_or_else(|| RegressError::MissingRegressor(ENERGY.into()))?;
    let a2 = fit1.coef(ENERGY_SQ).ok_or_else(|| RegressError::MissingRegressor(ENERGY_SQ.into()))?;
    let slope = a1 + 2.0 * a2 * e_hat;
    let energy_var = fit2.mean_variance(&x2) + fit2.residual_se * fit2.residual_se;
    let var = fit1.mean_variance(&x1) + slope * slope * energy_var;
    let df = fit1.df_residual.min(fit2.df_residual) as f64;
    Ok((point, student_t::quantile(0.975, df) * var.sqrt()))
}

/// Forecast rows for `targets`: through the GDP–energy fit where energy is
/// observed, else through the chain from mobility.
pub fn nowcast_gdp(
    fit1: &OlsFit,
    fit2: &OlsFit,
    energy: &MonthlySeries,
    mobility: &MonthlySeries,
    targets: &[YearMonth],
) -> Result<NowcastTable, NowcastError> {
    let mut rows = Vec::with_capacity(targets.len());
    for &m in targets {
        let (value, half_width, kind) = if let Some(e) = energy.get(m) {
            let p = gdp_at(fit1, e, Interval::Confidence95)?;
            (p.point, p.half_width.expect("interval requested"), RowKind::ForecastEq1)
        } else if let Some(mob) = mobility.get(m) {
            let (point, hw) = chain_forecast(fit1, fit2, mob)?;
            (point, hw, RowKind::ForecastChain)
        } else {
            return Err(NowcastError::NoInputForMonth(m));
        };
        rows.push(NowcastRow { year: m.year, month: m.month, value, half_width: Some(half_width), kind });
    }
    Ok(NowcastTable { schema_version: 1, rows })
}

/// Months with mobility or energy after the last observed GDP month.
pub fn default_targets(gdp: &MonthlySeries, energy: &MonthlySeries, mobility: &MonthlySeries) -> Vec<YearMonth> {
    let last = gdp.points.keys().next_back().copied();
    let months: BTreeSet<YearMonth> = energy.points.keys().chain(mobility.points.keys()).copied().collect();
    months.into_iter().filter(|m| last.is_none_or(|l| *m > l)).collect()
}

impl NowcastTable {
    /// Adds observed GDP rows for months without a forecast.
    pub fn with_observed(mut self, gdp: &MonthlySeries) -> Self {
        let have: BTreeSet<(i32, u32)> = self.rows.iter().map(|r| (r.year, r.month)).collect();
        for (m, v) in &gdp.points {
            if !have.contains(&(m.year, m.month)) {
                self.rows.push(NowcastRow {
                    year: m.year,
                    month: m.month,
                    value: *v,
                    half_width: None,
                    kind: RowKind::Observed,
                });
            }
        }
        self.rows.sort_by_key(|r| (r.year, r.month));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,month,value,half_width,kind\n");
        for r in &self.rows {
            let hw = r.half_width.map(|h| h.to_string()).unwrap_or_default();
            let kind = serde_json::to_value(r.kind).expect("kind serialises");
            let _ = writeln!(out, "{},{},{},{},{}", r.year, r.month, r.value, hw, kind.as_str().unwrap_or(""));
        }
        out
    }

    /// Month-by-year layout; forecast cells are starred and carry their
    /// interval half-width.
    pub fn to_table(&self) -> String {
        let years: BTreeSet<i32> = self.rows.iter().map(|r| r.year).collect();
        let cell = |r: &NowcastRow| match r.half_width {
            Some(h) => format!("*{:.1} (±{:.1})", r.value, h),
            None => format!("{:.1}", r.value),
        };
        let mut out = format!("{:<10}", "Month");
        for y in &years {
            let _ = write!(out, " {:>16}", y);
        }
        out.push('\n');
        for month in 1..=12 {
            let ym = YearMonth { year: 0, month };
            let _ = write!(out, "{:<10}", ym.month_name());
            for y in &years {
                let c = self.rows.iter().find(|r| r.year == *y && r.month == month).map(cell).unwrap_or_default();
                let _ = write!(out, " {:>16}", c);
            }
            out.push('\n');
        }
        out.push_str("* forecast; chain intervals propagate the energy prediction error to first order\n");
        out
    }
}

/// Per-region daily GDP index derived from daily Total mobility. Each
/// region's mobility is rescaled so that its mean over `base` is 100.
pub fn regional_daily_gdp(
    fit1: &OlsFit,
    fit2: &OlsFit,
    set: &IndicatorSet,
    base: DayRange,
) -> Result<BTreeMap<AreaId, BTreeMap<NaiveDate, f64>>, NowcastError> {
    let mut out = BTreeMap::new();
    for series in set.by_direction(Direction::Total) {
        let area = series.area();
        let base_vals: Vec<f64> = base.days().filter_map(|d| series.day_value(d)).collect();
        let base_mean = base_vals.iter().sum::<f64>() / base_vals.len() as f64;
        if base_vals.is_empty() || base_mean.is_nan() || base_mean <= 0.0 {
            return Err(NowcastError::MissingBasePeriod { series: area.code().to_string(), base: base.to_string() });
        }
        let mut daily = BTreeMap::new();
        for day in series.days() {
            let v = series.day_value(day).expect("day from this series");
            let mob = 100.0 * v / base_mean;
            let e = fit2.predict(&[(MOBILITY, mob)], Interval::None)?.point;
            daily.insert(day, gdp_at(fit1, e, Interval::None)?.point);
        }
        out.insert(area.clone(), daily);
    }
    Ok(out)
}

/// Regional shares of national GDP.
#[derive(Clone, Debug, PartialEq)]
pub struct GdpWeights {
    weights: BTreeMap<String, f64>,
}

impl GdpWeights {
    pub fn new(weights: BTreeMap<String, f64>) -> Result<Self, NowcastError> {
        for (region, w) in &weights {
            if !(*w > 0.0 && *w < 1.0) {
                return Err(NowcastError::BadWeight { region: region.clone(), weight: *w });
            }
        }
        let sum: f64 = weights.values().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(NowcastError::WeightSum(sum));
        }
        Ok(GdpWeights { weights })
    }

    pub fn parse(text: &str) -> Result<Self, NowcastError> {
        let mut lines = numbered_lines(text);
        match lines.next() {
            Some((_, h)) if header_matches(h, &split_fields(WEIGHTS_HEADER), &[]) => {}
            _ => return Err(NowcastError::HeaderMismatch(WEIGHTS_HEADER)),
        }
        let mut weights = BTreeMap::new();
        for (line, raw) in lines {
            let bad = |reason: String| NowcastError::BadLine { line, reason };
            let f = split_fields(raw);
            if f.len() != 2 || f[0].is_empty() {
                return Err(bad("expected `region,weight`".into()));
            }
            let w: f64 = f[1].parse().map_err(|_| bad(format!("bad weight `{}`", f[1])))?;
            if weights.insert(f[0].to_string(), w).is_some() {
                return Err(bad(format!("duplicate region `{}`", f[0])));
            }
        }
        GdpWeights::new(weights)
    }

    pub fn get(&self, region: &str) -> Option<f64> {
        self.weights.get(region).copied()
    }

    pub fn sum(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GdpImpact {
    pub transition_kind: TransitionKind,
    /// Average daily percent variation.
    pub percent: f64,
    pub regions: usize,
    pub replicates: usize,
}

/// Weighted average daily GDP variation per transition kind. Each
/// replicate's window-mean change is divided by `window_days`, replicates
/// are averaged within a region, and regions are combined with weights
/// renormalised over the regions having that kind.
pub fn transition_gdp_impact(
    daily: &BTreeMap<AreaId, BTreeMap<NaiveDate, f64>>,
    transitions: &[Transition],
    weights: &GdpWeights,
    window_days: u32,
) -> Result<Vec<GdpImpact>, NowcastError> {
    for t in transitions {
        if weights.get(t.region.code()).is_none() {
            return Err(NowcastError::MissingWeight(t.region.code().to_string()));
        }
    }
    let mut per_region: BTreeMap<TransitionKind, BTreeMap<&AreaId, Vec<f64>>> = BTreeMap::new();
    for t in transitions {
        let Some(series) = daily.get(&t.region) else {
            continue;
        };
        let bounds = neighbour_bounds(t, transitions);
        let m = match window_means_bounded(series, &t.region, Direction::Total, t, window_days, bounds) {
            Ok(m) => m,
            Err(ImpactError::InsufficientCoverage { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let pct = m.percent(crate::impact::Baseline::PreBaseline)? / f64::from(window_days);
        per_region.entry(t.kind()).or_default().entry(&t.region).or_default().push(pct);
    }
    let mut out: Vec<GdpImpact> = per_region
        .into_iter()
        .map(|(kind, regions)| {
            let mut wsum = 0.0;
            let mut acc = 0.0;
            let mut replicates = 0;
            for (region, reps) in &regions {
                let w = weights.get(region.code()).expect("checked above");
                acc += w * reps.iter().sum::<f64>() / reps.len() as f64;
                wsum += w;
                replicates += reps.len();
            }
            GdpImpact { transition_kind: kind, percent: acc / wsum, regions: regions.len(), replicates }
        })
        .collect();
    out.sort_by_key(|g| g.transition_kind.label());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: [SeriesKind; 3],
    pub rho: [[f64; 3]; 3],
    pub n: [[usize; 3]; 3],
}

impl Serialize for SeriesKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Pairwise-complete Spearman matrix of GDP, energy and mobility.
pub fn correlation_matrix(
    gdp: &MonthlySeries,
    energy: &MonthlySeries,
    mobility: &MonthlySeries,
) -> Result<CorrelationMatrix, NowcastError> {
    let series = [gdp, energy, mobility];
    let mut rho = [[1.0; 3]; 3];
    let mut n = [[0; 3]; 3];
    for i in 0..3 {
        n[i][i] = series[i].points.len();
        for j in i + 1..3 {
            let pairs = overlap(series[i], series[j], None);
            if pairs.len() < 3 {
                return Err(NowcastError::InsufficientOverlap { needed: 3, got: pairs.len() });
            }
            let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let r = spearman(&xs, &ys)?;
            rho[i][j] = r;
            rho[j][i] = r;
            n[i][j] = pairs.len();
            n[j][i] = pairs.len();
        }
    }
    Ok(CorrelationMatrix { names: [SeriesKind::Gdp, SeriesKind::Energy, SeriesKind::Mobility], rho, n })
}

impl CorrelationMatrix {
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<10}", "");
        for k in &self.names {
            let _ = write!(out, " {:>9}", k.as_str());
        }
        out.push('\n');
        for (i, k) in self.names.iter().enumerate() {
            let _ = write!(out, "{:<10}", k.as_str());
            for j in 0..3 {
                let _ = write!(out, " {:>9.2}", self.rho[i][j]);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("series,gdp,energy,mobility\n");
        for (i, k) in self.names.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", k.as_str(), self.rho[i][0], self.rho[i][1], self.rho[i][2]);
        }
        out
    }
}
