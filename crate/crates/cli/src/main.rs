mod commands;
mod config;
mod data;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::output::Format;

#[derive(Parser)]
#[command(name = "tierlab", version, about = "Mobility impact of restriction tiers and energy-based GDP nowcasting")]
struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML file with one section per subcommand; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (written atomically); standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate an ODM file into indicator series.
    Indicators(IndicatorsArgs),
    /// List tier transitions of a timeline.
    Transitions(TransitionsArgs),
    /// Average variation of mobility around tier transitions.
    Impact(ImpactArgs),
    /// Week-over-week percent change per day.
    Wow(WowArgs),
    /// Percent variation between two periods per area.
    Compare(CompareArgs),
    /// Week-over-week relaxation regression on province series.
    Relax(RelaxArgs),
    /// GDP nowcast from energy and mobility.
    Nowcast(NowcastArgs),
    /// GDP-weighted daily GDP variation per transition kind.
    GdpImpact(GdpImpactArgs),
    /// Spearman matrix of GDP, energy and mobility.
    Corr(CorrArgs),
    /// Generate a synthetic ODM file and its ground-truth manifest.
    Synth(SynthArgs),
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct IndicatorsArgs {
    /// ODM input file.
    #[arg(long)]
    pub odm: Option<PathBuf>,
    /// Area registry; `@name` refers to bundled data.
    #[arg(long)]
    pub areas: Option<String>,
    /// tract, province, region or country.
    #[arg(long)]
    pub level: Option<String>,
    /// hour or day.
    #[arg(long)]
    pub bucket: Option<String>,
    /// Hour-of-day filter such as 23-24 (hourly input only).
    #[arg(long)]
    pub window: Option<String>,
    /// Normalisation reference, or `auto` for the mean national daily total
    /// over the first seven days.
    #[arg(long)]
    pub reference: Option<String>,
    /// Fail on any rejected ODM line.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct TransitionsArgs {
    #[arg(long)]
    pub timeline: Option<String>,
    #[arg(long)]
    pub areas: Option<String>,
    /// Restrict to one region code.
    #[arg(long)]
    pub region: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ImpactArgs {
    /// Region-level indicator file.
    #[arg(long)]
    pub indicators: Option<PathBuf>,
    #[arg(long)]
    pub timeline: Option<String>,
    /// Transition kinds such as yellow:red, comma separated; all observed
    /// kinds when absent.
    #[arg(long)]
    pub kind: Option<String>,
    /// internal, inward, outward, total or all.
    #[arg(long)]
    pub direction: Option<String>,
    /// Days on each side of the transition.
    #[arg(long)]
    pub window: Option<u32>,
    /// pre or post.
    #[arg(long)]
    pub baseline: Option<String>,
    /// overall, regional or both.
    #[arg(long)]
    pub scope: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct WowArgs {
    #[arg(long)]
    pub indicators: Option<PathBuf>,
    /// Area code, or `national`; every area when absent.
    #[arg(long)]
    pub area: Option<String>,
    #[arg(long)]
    pub direction: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CompareArgs {
    #[arg(long)]
    pub indicators: Option<PathBuf>,
    /// Baseline day or range, e.g. 2020-10-27 or 2021-01-01..2021-01-31.
    #[arg(long)]
    pub baseline_period: Option<String>,
    /// Comparison day or range.
    #[arg(long)]
    pub period: Option<String>,
    #[arg(long)]
    pub direction: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxArgs {
    /// Province-level indicator file.
    #[arg(long)]
    pub indicators: Option<PathBuf>,
    #[arg(long)]
    pub timeline: Option<String>,
    #[arg(long)]
    pub areas: Option<String>,
    #[arg(long)]
    pub holidays: Option<String>,
    /// Only provinces of this region.
    #[arg(long)]
    pub region: Option<String>,
    /// Day range of the response; defaults to the data span less its first
    /// week.
    #[arg(long)]
    pub range: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct NowcastArgs {
    /// Monthly `series,year,month,value` file with energy and mobility.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Observed GDP file; the bundled series when absent.
    #[arg(long)]
    pub gdp: Option<String>,
    /// Months of the GDP–energy fit, e.g. 2019-01..2020-08.
    #[arg(long)]
    pub gdp_fit: Option<String>,
    /// Months of the energy–mobility fit, e.g. 2020-01..2020-12.
    #[arg(long)]
    pub energy_fit: Option<String>,
    /// Comma-separated YYYY-MM targets; months after the last GDP value
    /// when absent.
    #[arg(long)]
    pub targets: Option<String>,
    /// Rescale every series so January 2020 equals 100.
    #[arg(long)]
    pub rebase: bool,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GdpImpactArgs {
    /// Region-level indicator file.
    #[arg(long)]
    pub indicators: Option<PathBuf>,
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long)]
    pub gdp: Option<String>,
    #[arg(long)]
    pub gdp_fit: Option<String>,
    #[arg(long)]
    pub energy_fit: Option<String>,
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub timeline: Option<String>,
    #[arg(long)]
    pub window: Option<u32>,
    /// Days whose mean mobility is rescaled to 100; the first seven days of
    /// data when absent.
    #[arg(long)]
    pub base_period: Option<String>,
    #[arg(long)]
    pub rebase: bool,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CorrArgs {
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long)]
    pub gdp: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SynthArgs {
    /// Scenario TOML; the bundled 21-region scenario when absent.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise_cv: Option<f64>,
    /// Where to write the manifest; it is not written when absent.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| commands::run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("tierlab: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => {
            eprintln!("tierlab: internal invariant failure");
            ExitCode::from(2)
        }
    }
}
