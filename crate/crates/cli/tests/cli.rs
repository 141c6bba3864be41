use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tierlab-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tierlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("TIERLAB_DATA_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

const ODM: &str = "period_start,bucket,origin,destination,count
2020-11-02T00:00:00Z,day,ITC4,ITC4,100
2020-11-02T00:00:00Z,day,ITC4,ITC1,20
2020-11-03T00:00:00Z,day,ITC4,ITC4,90
2020-11-03T00:00:00Z,day,ITC4,NOWHERE,5
";

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let d = tmp("usage");
    let o = run(&d, &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&d, &["--help"]).status.code(), Some(0));
    let o = run(&d, &["impact", "--indicators", "missing.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("tierlab: "));
}

#[test]
fn rejected_lines_are_reported_and_strict_mode_fails() {
    let d = tmp("rejects");
    std::fs::write(d.join("odm.csv"), ODM).unwrap();
    let o = run(&d, &["indicators", "--odm", "odm.csv"]);
    let csv = stdout(&o);
    assert!(String::from_utf8_lossy(&o.stderr).contains(":5: rejected: unknown area `NOWHERE`"));
    assert!(csv.contains("ITC4,region,internal,day,2020-11-02T00:00:00Z,100,"));

    let o = run(&d, &["indicators", "--odm", "odm.csv", "--strict", "--out", "ind.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!d.join("ind.csv").exists());
    assert_eq!(std::fs::read_dir(&d).unwrap().count(), 1, "no temporary files left behind");
}

#[test]
fn config_sections_fill_unset_flags() {
    let d = tmp("config");
    std::fs::write(d.join("odm.csv"), ODM).unwrap();
    std::fs::write(d.join("run.toml"), "[indicators]\nodm = \"odm.csv\"\nreference = \"10\"\nlevel = \"country\"\n")
        .unwrap();
    let csv = stdout(&run(&d, &["--config", "run.toml", "indicators"]));
    assert!(csv.contains("IT,country,internal,day,2020-11-02T00:00:00Z,120,12,10"), "{csv}");
    let csv = stdout(&run(&d, &["--config", "run.toml", "indicators", "--reference", "100"]));
    assert!(csv.contains("IT,country,internal,day,2020-11-02T00:00:00Z,120,1.2,100"), "{csv}");

    std::fs::write(d.join("bad.toml"), "[indicators]\nodm = \"odm.csv\"\nrefrence = 1\n").unwrap();
    let o = run(&d, &["--config", "bad.toml", "indicators"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refrence"));
}

#[test]
fn data_dir_variable_replaces_bundled_files() {
    let d = tmp("datadir");
    std::fs::write(
        d.join("italy_timeline.csv"),
        "region,start_date,end_date,tier\nITC4,2020-11-06,2020-11-20,red\nITC4,2020-11-21,2020-12-31,orange\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tierlab"))
        .args(["transitions", "--format", "csv"])
        .current_dir(&d)
        .env("TIERLAB_DATA_DIR", &d)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "registry is missing from the directory");
    std::fs::write(d.join("italy_areas.csv"), "code,level,parent,name\nIT,country,,Italy\nITC4,region,IT,Lombardy\n")
        .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tierlab"))
        .args(["transitions", "--format", "csv"])
        .current_dir(&d)
        .env("TIERLAB_DATA_DIR", &d)
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "region,date,from,to,kind\nITC4,2020-11-21,red,orange,red:orange\n");
}

#[test]
fn bundled_transitions_render_in_every_format() {
    let d = tmp("formats");
    let json = stdout(&run(&d, &["transitions", "--region", "ITG1"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(!v["rows"].as_array().unwrap().is_empty());
    let csv = stdout(&run(&d, &["transitions", "--region", "ITG1", "--format", "csv"]));
    assert_eq!(csv.lines().count(), v["rows"].as_array().unwrap().len() + 1);
    let table = stdout(&run(&d, &["transitions", "--region", "ITG1", "--format", "table"]));
    assert!(table.starts_with("region  date"));
    assert_eq!(run(&d, &["transitions", "--region", "XX"]).status.code(), Some(1));
}

#[test]
fn nowcast_marks_forecast_rows() {
    let d = tmp("nowcast");
    let monthly = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/monthly.csv");
    let csv = stdout(&run(&d, &["nowcast", "--series", monthly.to_str().unwrap(), "--format", "csv"]));
    let kinds: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "forecast_eq1").count(), 4);
    assert_eq!(kinds.iter().filter(|k| **k == "forecast_chain").count(), 1);
    assert_eq!(kinds.iter().filter(|k| **k == "observed").count(), 20);
    let o = run(&d, &["nowcast", "--series", monthly.to_str().unwrap(), "--gdp-fit", "2019-01..2019-03"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synthetic_impact_is_negative_for_yellow_to_red() {
    let d = tmp("impact");
    stdout(&run(&d, &["synth", "--noise-cv", "0", "--out", "odm.csv"]));
    stdout(&run(&d, &["indicators", "--odm", "odm.csv", "--areas", "@scenario/areas.csv", "--out", "ind.csv"]));
    let json = stdout(&run(
        &d,
        &[
            "impact",
            "--indicators",
            "ind.csv",
            "--timeline",
            "@scenario/timeline.csv",
            "--kind",
            "yellow:red",
            "--direction",
            "total",
        ],
    ));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["results"][0]["percent"].as_f64().unwrap() < 0.0);
    let o =
        run(&d, &["impact", "--indicators", "ind.csv", "--timeline", "@scenario/timeline.csv", "--kind", "white:red"]);
    assert_eq!(o.status.code(), Some(1));
}
