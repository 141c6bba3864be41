use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use chrono::Duration;
use serde_json::{json, Value};
use tierlab::geo::AreaLevel;
use tierlab::impact::{
    observed_kinds, period_variation, transition_impact_overall, transition_impact_regional, week_over_week, Baseline,
    DayRange, ImpactError, ImpactReport, DEFAULT_WINDOW_DAYS,
};
use tierlab::indicators::{aggregate_indicators, HourWindow, IndicatorSeries, IndicatorSet};
use tierlab::nowcast::{
    correlation_matrix, default_targets, fit_energy_mobility, fit_gdp_energy, nowcast_gdp, parse_month_range,
    regional_daily_gdp, transition_gdp_impact, MonthlySeries, YearMonth, BASE_MONTH,
};
use tierlab::odm::{parse_odm_reader, Bucket, Direction};
use tierlab::regress::{build_relaxation_design, ols_fit, OlsFit};
use tierlab::timeline::{TierTimeline, Transition, TransitionKind};

use crate::error::{input, CliError};
use crate::output::{emit, write_atomic, Format, Rows};
use crate::{config, data, Cli, Command};

const GDP_FIT: &str = "2019-01..2020-08";
const ENERGY_FIT: &str = "2020-01..2020-12";

struct Ctx<'a> {
    format: Option<Format>,
    out: Option<&'a Path>,
}

impl Ctx<'_> {
    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    fn emit(&self, content: &str) -> Result<(), CliError> {
        emit(self.out, content)
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config::load(cli.config.as_deref())?;
    let ctx = Ctx { format: cli.format, out: cli.out.as_deref() };
    match &cli.command {
        Command::Indicators(a) => indicators(&ctx, config::merged(a, &cfg, "indicators")?),
        Command::Transitions(a) => transitions(&ctx, config::merged(a, &cfg, "transitions")?),
        Command::Impact(a) => impact(&ctx, config::merged(a, &cfg, "impact")?),
        Command::Wow(a) => wow(&ctx, config::merged(a, &cfg, "wow")?),
        Command::Compare(a) => compare(&ctx, config::merged(a, &cfg, "compare")?),
        Command::Relax(a) => relax(&ctx, config::merged(a, &cfg, "relax")?),
        Command::Nowcast(a) => nowcast(&ctx, config::merged(a, &cfg, "nowcast")?),
        Command::GdpImpact(a) => gdp_impact(&ctx, config::merged(a, &cfg, "gdp-impact")?),
        Command::Corr(a) => corr(&ctx, config::merged(a, &cfg, "corr")?),
        Command::Synth(a) => synth(&ctx, config::merged(a, &cfg, "synth")?),
    }
}

fn parse_opt<T: std::str::FromStr>(v: Option<&str>, default: T, what: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match v {
        None => Ok(default),
        Some(s) => s.parse().map_err(|e| input(format!("--{what}: {e}"))),
    }
}

fn required<'a, T: ?Sized>(v: Option<&'a T>, flag: &str) -> Result<&'a T, CliError> {
    v.ok_or_else(|| input(format!("--{flag} is required")))
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn indicators(ctx: &Ctx, a: crate::IndicatorsArgs) -> Result<(), CliError> {
    let path = required(a.odm.as_deref(), "odm")?;
    let h = data::areas(a.areas.as_deref())?;
    let level = match a.level.as_deref() {
        None => AreaLevel::Region,
        Some(s) => AreaLevel::parse(s).ok_or_else(|| input(format!("--level: unknown level `{s}`")))?,
    };
    let bucket: Bucket = parse_opt(a.bucket.as_deref(), Bucket::Day, "bucket")?;
    let window = a
        .window
        .as_deref()
        .map(|s| s.parse::<HourWindow>().map_err(|e| input(format!("--window: {e}"))))
        .transpose()?;
    let file = File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let parsed = parse_odm_reader(BufReader::new(file), &h).map_err(|e| input(format!("{}: {e}", path.display())))?;
    for r in &parsed.rejects {
        eprintln!("{}:{}: rejected: {}", path.display(), r.line, r.reason);
    }
    if a.strict && !parsed.rejects.is_empty() {
        return Err(input(format!("{} rejected line(s) in strict mode", parsed.rejects.len())));
    }
    let set = aggregate_indicators(&parsed.records, &h, level, bucket, window).map_err(input)?;
    let reference = match a.reference.as_deref() {
        None | Some("auto") => set.default_reference().map_err(input)?,
        Some(s) => s.parse::<f64>().map_err(|_| input(format!("--reference: `{s}` is not a number")))?,
    };
    let set = set.normalize(reference).map_err(input)?;
    let csv = set.to_csv();
    match ctx.format.unwrap_or(Format::Csv) {
        Format::Csv => ctx.emit(&csv),
        f => {
            let mut rows =
                Rows::new(vec!["area", "level", "direction", "bucket", "period_start", "raw", "value", "reference"]);
            for line in csv.lines().skip(1) {
                rows.push(
                    line.split(',')
                        .enumerate()
                        .map(|(i, x)| match (i, x.parse::<f64>()) {
                            (5..=7, Ok(v)) => num(v),
                            _ => Value::String(x.to_string()),
                        })
                        .collect(),
                );
            }
            ctx.emit(&rows.render(f))
        }
    }
}

fn load_timeline(source: Option<&str>, areas: Option<&str>) -> Result<TierTimeline, CliError> {
    let t = data::timeline(source)?;
    t.validate_regions(&data::areas(areas)?).map_err(input)?;
    Ok(t)
}

fn transitions(ctx: &Ctx, a: crate::TransitionsArgs) -> Result<(), CliError> {
    let t = load_timeline(a.timeline.as_deref(), a.areas.as_deref())?;
    let list = t.all_transitions();
    let mut rows = Rows::new(vec!["region", "date", "from", "to", "kind"]);
    for tr in list.iter().filter(|tr| a.region.as_deref().is_none_or(|r| tr.region.code() == r)) {
        rows.push(vec![
            json!(tr.region.code()),
            json!(tr.date.to_string()),
            json!(tr.from.as_str()),
            json!(tr.to.as_str()),
            json!(tr.kind().to_string()),
        ]);
    }
    if let Some(r) = a.region.as_deref() {
        if !t.regions().any(|x| x.code() == r) {
            return Err(input(format!("--region: `{r}` is not in the timeline")));
        }
    }
    ctx.emit(&rows.render(ctx.format()))
}

fn directions(v: Option<&str>) -> Result<Vec<Direction>, CliError> {
    match v {
        Some("all") => Ok(Direction::ALL.to_vec()),
        other => Ok(vec![parse_opt(other, Direction::Total, "direction")?]),
    }
}

fn impact(ctx: &Ctx, a: crate::ImpactArgs) -> Result<(), CliError> {
    let set = data::indicators(a.indicators.as_deref())?;
    let timeline = data::timeline(a.timeline.as_deref())?;
    let transitions = timeline.all_transitions();
    let explicit = a.kind.is_some();
    let kinds: Vec<TransitionKind> = match a.kind.as_deref() {
        Some(s) => s
            .split(',')
            .map(|k| k.trim().parse().map_err(|e| input(format!("--kind: {e}"))))
            .collect::<Result<_, _>>()?,
        None => observed_kinds(&transitions),
    };
    let dirs = directions(a.direction.as_deref())?;
    let window = a.window.unwrap_or(DEFAULT_WINDOW_DAYS);
    let baseline: Baseline = parse_opt(a.baseline.as_deref(), Baseline::PreBaseline, "baseline")?;
    let (overall, regional) = match a.scope.as_deref().unwrap_or("overall") {
        "overall" => (true, false),
        "regional" => (false, true),
        "both" => (true, true),
        s => return Err(input(format!("--scope: expected overall, regional or both, found `{s}`"))),
    };
    let mut results = Vec::new();
    for &kind in &kinds {
        for &d in &dirs {
            let mut step = || -> Result<(), ImpactError> {
                if overall {
                    results.push(transition_impact_overall(&set, &transitions, kind, d, window, baseline)?);
                }
                if regional {
                    results.extend(transition_impact_regional(&set, &transitions, kind, d, window, baseline)?);
                }
                Ok(())
            };
            match step() {
                Ok(()) => {}
                Err(ImpactError::NoMatchingTransitions { .. }) if !explicit => {}
                Err(e) => return Err(input(e)),
            }
        }
    }
    let report = ImpactReport::new(results);
    ctx.emit(&match ctx.format() {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    })
}

fn selected_series<'a>(
    set: &'a IndicatorSet,
    area: Option<&str>,
    direction: Direction,
) -> Result<Vec<&'a IndicatorSeries>, CliError> {
    match area {
        Some("national") => Ok(vec![set.national()]),
        Some(code) => Ok(vec![set
            .get_code(code, direction)
            .ok_or_else(|| input(format!("no {direction} series for area `{code}`")))?]),
        None => {
            let mut all: Vec<&IndicatorSeries> = set.by_direction(direction).collect();
            if direction == Direction::Total {
                all.push(set.national());
            }
            Ok(all)
        }
    }
}

fn wow(ctx: &Ctx, a: crate::WowArgs) -> Result<(), CliError> {
    let set = data::indicators(a.indicators.as_deref())?;
    let direction = parse_opt(a.direction.as_deref(), Direction::Total, "direction")?;
    let mut rows = Rows::new(vec!["area", "direction", "date", "percent"]);
    for s in selected_series(&set, a.area.as_deref(), direction)? {
        for day in s.days() {
            match week_over_week(s, day) {
                Ok(p) => rows.push(vec![
                    json!(s.area().code()),
                    json!(s.direction().as_str()),
                    json!(day.to_string()),
                    num(p),
                ]),
                Err(ImpactError::MissingValue(_) | ImpactError::ZeroBaseline) => {}
                Err(e) => return Err(input(e)),
            }
        }
    }
    ctx.emit(&rows.render(ctx.format()))
}

fn compare(ctx: &Ctx, a: crate::CompareArgs) -> Result<(), CliError> {
    let set = data::indicators(a.indicators.as_deref())?;
    let base: DayRange = required(a.baseline_period.as_deref(), "baseline-period")?
        .parse()
        .map_err(|e| input(format!("--baseline-period: {e}")))?;
    let period: DayRange =
        required(a.period.as_deref(), "period")?.parse().map_err(|e| input(format!("--period: {e}")))?;
    let direction = parse_opt(a.direction.as_deref(), Direction::Total, "direction")?;
    let mut rows = Rows::new(vec!["area", "direction", "baseline_period", "period", "percent"]);
    for s in selected_series(&set, None, direction)? {
        let p = period_variation(s, base, period).map_err(|e| input(format!("{}: {e}", s.area())))?;
        rows.push(vec![
            json!(s.area().code()),
            json!(direction.as_str()),
            json!(base.to_string()),
            json!(period.to_string()),
            num(p),
        ]);
    }
    ctx.emit(&rows.render(ctx.format()))
}

fn render_fit(ctx: &Ctx, fit: &OlsFit, response: &str) -> Result<(), CliError> {
    ctx.emit(&match ctx.format() {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&fit.report()).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Table => fit.to_table(response),
        Format::Csv => {
            let mut rows = Rows::new(vec!["term", "coef", "se", "t", "p"]);
            for t in fit.report().terms {
                rows.push(vec![json!(t.name), num(t.coef), num(t.se), t.t.map_or(Value::Null, num), num(t.p)]);
            }
            rows.render(Format::Csv)
        }
    })
}

fn relax(ctx: &Ctx, a: crate::RelaxArgs) -> Result<(), CliError> {
    let set = data::indicators(a.indicators.as_deref())?;
    let h = data::areas(a.areas.as_deref())?;
    let timeline = data::timeline(a.timeline.as_deref())?;
    timeline.validate_regions(&h).map_err(input)?;
    let cal = data::holidays(a.holidays.as_deref())?;
    let region = a.region.as_deref().map(|r| h.require(r).map_err(input)).transpose()?;
    let range = match a.range.as_deref() {
        Some(s) => s.parse().map_err(|e| input(format!("--range: {e}")))?,
        None => {
            let days = set.national().days();
            let (Some(&first), Some(&last)) = (days.first(), days.last()) else {
                return Err(input("indicator file holds no days"));
            };
            let start = first.max(timeline.coverage().0) + Duration::days(7);
            DayRange::new(start, last).map_err(|e| input(format!("data too short for a week-over-week fit: {e}")))?
        }
    };
    let design = build_relaxation_design(&set, &timeline, &cal, &h, range, region).map_err(input)?;
    let fit = ols_fit(&design.design).map_err(input)?;
    render_fit(ctx, &fit, "week-over-week change")
}

fn month_window(v: Option<&str>, default: &str, flag: &str) -> Result<(YearMonth, YearMonth), CliError> {
    parse_month_range(v.unwrap_or(default)).map_err(|e| input(format!("--{flag}: {e}")))
}

struct Fits {
    gdp: MonthlySeries,
    energy: MonthlySeries,
    mobility: MonthlySeries,
    gdp_energy: OlsFit,
    energy_mobility: OlsFit,
}

fn fits(
    series: Option<&Path>,
    gdp: Option<&str>,
    gdp_fit: Option<&str>,
    energy_fit: Option<&str>,
    rebase: bool,
) -> Result<Fits, CliError> {
    let (mut g, mut e, mut m) = data::monthly(series, gdp)?;
    if rebase {
        g = g.rebased(BASE_MONTH).map_err(input)?;
        e = e.rebased(BASE_MONTH).map_err(input)?;
        m = m.rebased(BASE_MONTH).map_err(input)?;
    }
    let w1 = month_window(gdp_fit, GDP_FIT, "gdp-fit")?;
    let w2 = month_window(energy_fit, ENERGY_FIT, "energy-fit")?;
    let gdp_energy = fit_gdp_energy(&g, &e, Some(w1)).map_err(|err| input(format!("GDP–energy fit: {err}")))?;
    let energy_mobility =
        fit_energy_mobility(&e, &m, Some(w2)).map_err(|err| input(format!("energy–mobility fit: {err}")))?;
    Ok(Fits { gdp: g, energy: e, mobility: m, gdp_energy, energy_mobility })
}

fn nowcast(ctx: &Ctx, a: crate::NowcastArgs) -> Result<(), CliError> {
    let f = fits(a.series.as_deref(), a.gdp.as_deref(), a.gdp_fit.as_deref(), a.energy_fit.as_deref(), a.rebase)?;
    let targets: Vec<YearMonth> = match a.targets.as_deref() {
        Some(s) => s
            .split(',')
            .map(|m| m.trim().parse().map_err(|e| input(format!("--targets: {e}"))))
            .collect::<Result<_, _>>()?,
        None => default_targets(&f.gdp, &f.energy, &f.mobility),
    };
    let table = nowcast_gdp(&f.gdp_energy, &f.energy_mobility, &f.energy, &f.mobility, &targets)
        .map_err(input)?
        .with_observed(&f.gdp);
    ctx.emit(&match ctx.format() {
        Format::Json => table.to_json(),
        Format::Csv => table.to_csv(),
        Format::Table => table.to_table(),
    })
}

fn gdp_impact(ctx: &Ctx, a: crate::GdpImpactArgs) -> Result<(), CliError> {
    let set = data::indicators(a.indicators.as_deref())?;
    let f = fits(a.series.as_deref(), a.gdp.as_deref(), a.gdp_fit.as_deref(), a.energy_fit.as_deref(), a.rebase)?;
    let weights = data::weights(a.weights.as_deref())?;
    let timeline = data::timeline(a.timeline.as_deref())?;
    let window = a.window.unwrap_or(DEFAULT_WINDOW_DAYS);
    let base = match a.base_period.as_deref() {
        Some(s) => s.parse().map_err(|e| input(format!("--base-period: {e}")))?,
        None => {
            let first = *set.national().days().first().ok_or_else(|| input("indicator file holds no days"))?;
            DayRange::new(first, first + Duration::days(6)).map_err(input)?
        }
    };
    let daily = regional_daily_gdp(&f.gdp_energy, &f.energy_mobility, &set, base).map_err(input)?;
    let transitions: Vec<Transition> = timeline.all_transitions();
    let impacts = transition_gdp_impact(&daily, &transitions, &weights, window).map_err(input)?;
    let mut rows = Rows::new(vec!["transition_kind", "percent", "regions", "replicates"]);
    for g in impacts {
        rows.push(vec![json!(g.transition_kind.to_string()), num(g.percent), json!(g.regions), json!(g.replicates)]);
    }
    ctx.emit(&rows.render(ctx.format()))
}

fn corr(ctx: &Ctx, a: crate::CorrArgs) -> Result<(), CliError> {
    let (g, e, m) = data::monthly(a.series.as_deref(), a.gdp.as_deref())?;
    let c = correlation_matrix(&g, &e, &m).map_err(input)?;
    ctx.emit(&match ctx.format() {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&c).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => c.to_csv(),
        Format::Table => c.to_table(),
    })
}

fn synth(ctx: &Ctx, a: crate::SynthArgs) -> Result<(), CliError> {
    let mut cfg = data::scenario(a.scenario.as_deref())?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(cv) = a.noise_cv {
        cfg.noise_cv = cv;
    }
    cfg.validate().map_err(input)?;
    let write_odm = |w: &mut dyn Write| {
        writeln!(w, "{}", tierlab::odm::ODM_HEADER).map_err(input)?;
        tierlab::scenario::generate_with(&cfg, |r| r.write_line(&mut &mut *w)).map_err(input)
    };
    let manifest = match ctx.out {
        Some(path) => {
            let mut manifest = None;
            write_atomic(path, |w| {
                manifest = Some(write_odm(w)?);
                Ok(())
            })?;
            manifest.expect("written")
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = std::io::BufWriter::new(stdout.lock());
            let m = write_odm(&mut lock)?;
            lock.flush().map_err(input)?;
            m
        }
    };
    if let Some(path) = a.manifest.as_deref() {
        let csv = manifest.to_csv();
        write_atomic(path, |w| w.write_all(csv.as_bytes()).map_err(input))?;
    }
    Ok(())
}
