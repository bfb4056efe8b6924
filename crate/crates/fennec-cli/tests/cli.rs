use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn fennec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fennec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    fennec(&args)
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn gyrator_example_splits_by_inductance() {
    let out = TempDir::new().unwrap();
    let o = run(
        "gyrator-sweep",
        &configs().join("gyrator_sweep.json"),
        out.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<_> = sorted_files(out.path())
        .into_iter()
        .map(|(n, _)| n)
        .collect();
    assert_eq!(
        names,
        [
            "gyrator-sweep_lc_0.05.csv",
            "gyrator-sweep_lc_0.5.csv",
            "gyrator-sweep_lc_5.csv"
        ]
    );
    let text = fs::read_to_string(out.path().join("gyrator-sweep_lc_0.5.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# fennec gyrator-sweep"));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "omega_norm");
    assert!(header.contains(&"|S12|_dB"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 401);
    for r in &rows {
        for cell in r.split(',') {
            let (mantissa, _) = cell.split_once('e').expect("scientific notation");
            assert_eq!(mantissa.trim_start_matches('-').len(), 18, "{cell}");
            cell.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn gyrator_is_transparent_at_resonance_with_matched_conductance() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"params":{"lc":0,"z0":10,"omega_norm":1}}"#,
    );
    let o = run("gyrator-sweep", &cfg, dir.path(), &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("gyrator-sweep.json")).unwrap()).unwrap();
    assert_eq!(v["failures"], 0);
    let r = &v["points"][0]["result"];
    assert!(r["s11_db"].as_f64().unwrap() < -200.0, "{r}");
    assert!(r["s12_db"].as_f64().unwrap().abs() < 1e-9, "{r}");
    assert!(r["s"][1][0][0].as_f64().unwrap() < -0.999, "{r}");
}

#[test]
fn output_is_deterministic_across_runs_and_jobs() {
    for (sub, cfg) in [
        ("gyrator-sweep", "gyrator_sweep.json"),
        ("compression", "compression.json"),
        ("estimate-coupling", "estimate_coupling.json"),
    ] {
        for format in ["csv", "json"] {
            let a = TempDir::new().unwrap();
            let b = TempDir::new().unwrap();
            let c = TempDir::new().unwrap();
            let cfg = configs().join(cfg);
            for (dir, jobs) in [(&a, "1"), (&b, "3"), (&c, "3")] {
                let o = run(sub, &cfg, dir.path(), &["--format", format, "--jobs", jobs]);
                assert_eq!(o.status.code(), Some(0), "{sub}: {}", stderr(&o));
            }
            let fa = sorted_files(a.path());
            assert!(!fa.is_empty());
            assert_eq!(fa, sorted_files(b.path()), "{sub} {format}");
            assert_eq!(fa, sorted_files(c.path()), "{sub} {format}");
        }
    }
}

#[test]
fn every_file_echoes_its_config() {
    let out = TempDir::new().unwrap();
    let o = run(
        "circulator",
        &configs().join("circulator.json"),
        out.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(out.path().join("circulator.csv")).unwrap();
    let echo = text
        .lines()
        .nth(1)
        .unwrap()
        .strip_prefix("# config: ")
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(echo).unwrap();
    assert_eq!(v["params"]["z_tl"], 50.0);

    let o = run(
        "circulator",
        &configs().join("circulator.json"),
        out.path(),
        &["--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(out.path().join("circulator.json")).unwrap()).unwrap();
    assert_eq!(v["subcommand"], "circulator");
    assert_eq!(v["config"]["sweep"][0]["count"], 201);
    assert_eq!(v["points"].as_array().unwrap().len(), 201);
}

fn expect_schema(o: &Output, field: &str) {
    assert_eq!(o.status.code(), Some(2), "{}", stderr(o));
    let last = stderr(o).lines().last().unwrap().to_string();
    let rec: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert_eq!(rec["error"], "schema");
    assert_eq!(rec["field"], field, "{last}");
}

#[test]
fn degenerate_sweeps_are_schema_errors() {
    let dir = TempDir::new().unwrap();
    let same = write(
        dir.path(),
        "same.json",
        r#"{"params":{},"sweep":[{"parameter":"omega_norm","start":1,"stop":1,"count":5}]}"#,
    );
    expect_schema(
        &run("gyrator-sweep", &same, dir.path(), &[]),
        "sweep[0].stop",
    );
    let single = write(
        dir.path(),
        "single.json",
        r#"{"params":{},"sweep":[{"parameter":"omega_norm","start":0.5,"stop":1.5,"count":1}]}"#,
    );
    expect_schema(
        &run("gyrator-sweep", &single, dir.path(), &[]),
        "sweep[0].count",
    );
    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"params":{},"sweep":[{"parameter":"temperature","start":0.5,"stop":1.5,"count":3}]}"#,
    );
    expect_schema(
        &run("gyrator-sweep", &unknown, dir.path(), &[]),
        "sweep[0].parameter",
    );
    assert!(fs::read_dir(dir.path())
        .unwrap()
        .all(|e| e.unwrap().path().extension().unwrap() == "json"));
}

#[test]
fn unknown_and_mistyped_parameters_name_the_field() {
    let dir = TempDir::new().unwrap();
    let extra = write(
        dir.path(),
        "extra.json",
        r#"{"params":{"lc":0.5,"wobble":1}}"#,
    );
    let o = run("gyrator-sweep", &extra, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wobble"), "{}", stderr(&o));
    let typed = write(dir.path(), "typed.json", r#"{"params":{"z0":"ten"}}"#);
    expect_schema(&run("gyrator-sweep", &typed, dir.path(), &[]), "params.z0");
    let top = write(dir.path(), "top.json", r#"{"params":{},"sweeps":[]}"#);
    assert_eq!(
        run("gyrator-sweep", &top, dir.path(), &[]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_config_is_a_schema_error() {
    let o = fennec(&["bandwidth"]);
    expect_schema(&o, "--config");
}

#[test]
fn empty_data_file_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "empty.csv",
        "# nothing measured\nvoltage,value\n",
    );
    write(
        dir.path(),
        "empty.json",
        r#"{"kind":"direct_ej","unit":"ghz","smoothing":0}"#,
    );
    let cfg = write(dir.path(), "c.json", r#"{"params":{"data":"empty.csv"}}"#);
    let o = run("estimate-coupling", &cfg, dir.path(), &[]);
    expect_schema(&o, "params.data");
}

#[test]
fn all_points_failing_exits_three() {
    let dir = TempDir::new().unwrap();
    let data = configs().join("spectroscopy.csv");
    let cfg = write(
        dir.path(),
        "c.json",
        &serde_json::json!({
            "params": { "data": data },
            "sweep": [{ "parameter": "v", "start": 2.0, "stop": 3.0, "count": 3 }]
        })
        .to_string(),
    );
    let o = run("estimate-coupling", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let rec: serde_json::Value = serde_json::from_str(stderr(&o).lines().last().unwrap()).unwrap();
    assert_eq!(rec["error"], "all_points_failed");
    assert_eq!(rec["points"].as_array().unwrap().len(), 3);
}

#[test]
fn partial_failures_still_succeed() {
    let dir = TempDir::new().unwrap();
    let data = configs().join("spectroscopy.csv");
    let cfg = write(
        dir.path(),
        "c.json",
        &serde_json::json!({
            "params": { "data": data },
            "sweep": [{ "parameter": "v", "start": 0.0, "stop": 2.0, "count": 3 }]
        })
        .to_string(),
    );
    let o = run("estimate-coupling", &cfg, dir.path(), &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("estimate-coupling.json")).unwrap())
            .unwrap();
    // v = 1 sits on the data edge and still evaluates
    assert_eq!(v["failures"], 1);
    assert_eq!(v["points"][0]["status"], "ok");
    assert_eq!(v["points"][2]["status"], "error");
}

#[test]
fn linear_josephson_energy_gives_flat_coupling() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("voltage,value\n");
    for i in 0..=20 {
        let v = -1.0 + 0.1 * i as f64;
        csv.push_str(&format!("{v},{}\n", 20.0 + 4.0 * v));
    }
    write(dir.path(), "lin.csv", &csv);
    write(
        dir.path(),
        "lin.json",
        r#"{"kind":"direct_ej","unit":"ghz","smoothing":0}"#,
    );
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"params":{"data":"lin.csv"},"sweep":[{"parameter":"v","start":-0.8,"stop":0.8,"count":9}]}"#,
    );
    let o = run("estimate-coupling", &cfg, dir.path(), &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("estimate-coupling.json")).unwrap())
            .unwrap();
    let text = fs::read_to_string(dir.path().join("estimate-coupling.json")).unwrap();
    let g: Vec<f64> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| find_number(&p["result"], "g_max_s").unwrap_or_else(|| panic!("{text}")))
        .collect();
    for x in &g {
        assert!((x / g[0] - 1.0).abs() < 1e-9, "{g:?}");
    }
    assert!(g[0] > 0.0);
}

fn find_number(v: &serde_json::Value, key: &str) -> Option<f64> {
    match v {
        serde_json::Value::Object(m) => m
            .get(key)
            .and_then(|x| x.as_f64())
            .or_else(|| m.values().find_map(|x| find_number(x, key))),
        serde_json::Value::Array(a) => a.iter().find_map(|x| find_number(x, key)),
        _ => None,
    }
}

#[test]
fn every_sample_config_runs() {
    for (sub, cfg) in [
        ("junction-energy", "junction_energy.json"),
        ("bandwidth", "bandwidth.json"),
        ("disorder-tolerance", "disorder_tolerance.json"),
        ("mixing", "mixing.json"),
        ("nonlinear-report", "nonlinear_report.json"),
    ] {
        let out = TempDir::new().unwrap();
        let o = run(sub, &configs().join(cfg), out.path(), &["--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{sub}: {}", stderr(&o));
        let name = out.path().join(format!("{sub}.json"));
        let v: serde_json::Value = serde_json::from_slice(&fs::read(name).unwrap()).unwrap();
        assert_eq!(v["subcommand"], sub);
        assert_eq!(v["failures"], 0, "{sub}");
    }
}
