use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curveprop::config::parse_config;
use curveprop::report::{emit_report, CsvTable, ReportError, Summary};
use serde_json::Value;

const RATE_FIT: &str = r#"{
  "schema_version": 1,
  "symbol": { "kind": "elliptic", "dim": 1 },
  "curve": { "kind": "vertical" },
  "data": { "kind": "gaussian", "width": 1.0 },
  "params": { "samples": 32, "dyadic": [3, 12] }
}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn curveprop(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_curveprop"));
    c.args(args).env_remove("CURVEPROP_THREADS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn run_into(cmd: &str, config: &Path, out: &Path, threads: &str) -> Output {
    curveprop(
        &[cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads],
        &[],
    )
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn rate_fit_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", RATE_FIT);
    let out = dir.path().join("out");
    let o = run_into("rate-fit", &cfg, &out, "2");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    let r = &s["results"][0];
    for k in ["theta", "residual", "predicted"] {
        assert!(r[k].is_f64(), "missing {k}: {s}");
    }
    // vertical curve: α = 1
    assert!(r["theta"].as_f64().unwrap() <= 1.0 + 0.1);
    assert_eq!(s["csv"], serde_json::json!(["rate_fit.csv"]));
    assert_eq!(s["input_hash"].as_str().unwrap().len(), 64);
    let csv = fs::read_to_string(out.join("rate_fit.csv")).unwrap();
    assert!(csv.starts_with("t,E\n"));
    assert!(csv.contains("\n# theta=") && csv.contains("\n# residual=") && csv.contains("\n# predicted="));
    let names: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "stray files: {names:?}");
}

#[test]
fn outputs_are_deterministic_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", RATE_FIT);
    let outs: Vec<PathBuf> = ["1", "1", "4"]
        .iter()
        .enumerate()
        .map(|(i, th)| {
            let out = dir.path().join(format!("o{i}"));
            assert!(run_into("rate-fit", &cfg, &out, th).status.success());
            out
        })
        .collect();
    for f in ["rate_fit.csv", "summary.json"] {
        let a = fs::read(outs[0].join(f)).unwrap();
        for o in &outs[1..] {
            assert_eq!(a, fs::read(o.join(f)).unwrap(), "{f} differs");
        }
    }
}

#[test]
fn echoed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", RATE_FIT);
    let out = dir.path().join("out");
    assert!(run_into("rate-fit", &cfg, &out, "1").status.success());
    let echoed = summary(&out)["config"].to_string();
    assert_eq!(parse_config(&echoed).unwrap(), parse_config(RATE_FIT).unwrap());
}

#[test]
fn missing_symbol_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"schema_version": 1, "curve": {"kind": "vertical"}}"#);
    let out = dir.path().join("out");
    let o = run_into("rate-fit", &cfg, &out, "1");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("symbol"));
    assert!(!out.exists());
}

#[test]
fn pairing_rule_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "symbol": {"kind": "polynomial2d", "m1": 3, "m2": 3, "sigma": 1},
            "curve": {"kind": "shift", "alpha": 0.3}}"#,
    );
    let o = run_into("maximal", &cfg, &dir.path().join("out"), "1");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("curve.alpha"));
}

#[test]
fn experiment_kind_must_match_command() {
    let dir = tempfile::tempdir().unwrap();
    let text = RATE_FIT.replacen("{", r#"{ "experiment": "decompose","#, 1);
    let cfg = write_config(dir.path(), "c.json", &text);
    let o = run_into("rate-fit", &cfg, &dir.path().join("out"), "1");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment"));
}

#[test]
fn numerical_errors_carry_module_name() {
    let dir = tempfile::tempdir().unwrap();
    // separations inside the near zone 100λ^{1−m₁} = 6.25
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "symbol": {"kind": "polynomial2d", "m1": 2, "m2": 3, "sigma": 1},
            "params": {"lambda": 16, "separations": [1, 2, 4, 8, 16]}}"#,
    );
    let o = run_into("kernel-decay", &cfg, &dir.path().join("out"), "1");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition-violation"));
}

#[test]
fn unwritable_output_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", RATE_FIT);
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, b"x").unwrap();
    let o = run_into("rate-fit", &cfg, &blocker.join("sub"), "1");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blocker"));
}

#[test]
fn threads_fall_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", RATE_FIT);
    let out = dir.path().join("out");
    let o = curveprop(
        &["rate-fit", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[("CURVEPROP_THREADS", "3")],
    );
    assert!(o.status.success());
    let bad = curveprop(
        &["rate-fit", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[("CURVEPROP_THREADS", "many")],
    );
    assert!(!bad.status.success());
}

#[test]
fn every_command_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("propagate", r#"{"schema_version":1,"symbol":{"kind":"nonelliptic","dim":2},"curve":{"kind":"shift","alpha":0.5},"params":{"samples":4,"times":[0,0.5]}}"#, "propagate.csv", "x1,x2,t,re,im"),
        ("lower-bound", r#"{"schema_version":1,"symbol":{"kind":"elliptic","dim":1},"curve":{"kind":"shift","alpha":0.5},"params":{"samples":8}}"#, "lower_bound.csv", "t,ratio,floor"),
        ("decompose", r#"{"schema_version":1,"symbol":{"kind":"elliptic","dim":1},"data":{"kind":"sobolev-profile","s":1,"seed":2}}"#, "decompose.csv", "k,l2_energy,hs_energy"),
        ("maximal", r#"{"schema_version":1,"symbol":{"kind":"elliptic","dim":1},"grid":{"half_width":64,"points":512},"params":{"per_axis":16,"t_count":8}}"#, "maximal.csv", "lambda,seed,ratio"),
        ("kernel-decay", r#"{"schema_version":1,"symbol":{"kind":"polynomial2d","m1":2,"m2":2,"sigma":1},"params":{"lambda":4}}"#, "kernel_decay.csv", "separation,abs_K"),
    ];
    for (cmd, text, csv, header) in cases {
        let cfg = write_config(dir.path(), &format!("{cmd}.json"), text);
        let out = dir.path().join(cmd);
        let o = run_into(cmd, &cfg, &out, "2");
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let body = fs::read_to_string(out.join(csv)).unwrap();
        assert_eq!(body.lines().next(), Some(header), "{cmd}");
        assert_eq!(summary(&out)["command"], cmd);
    }
}

#[test]
fn field_file_data() {
    let dir = tempfile::tempdir().unwrap();
    let g = curveprop_core::FrequencyGrid::new(1, 32.0, 512).unwrap();
    let f = curveprop_core::SpectralField::gaussian(g, 2.0).unwrap();
    curveprop::io::save_field(&dir.path().join("f.bin"), &f).unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"symbol":{"kind":"elliptic","dim":1},"data":{"kind":"file","path":"f.bin"},"params":{"samples":3,"times":[0]}}"#,
    );
    let out = dir.path().join("out");
    assert!(run_into("propagate", &cfg, &out, "1").status.success());
    let csv = fs::read_to_string(out.join("propagate.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let exact = f.point_eval(&[row[0]]);
    assert!((row[2] - exact.re).abs() < 1e-12 && (row[3] - exact.im).abs() < 1e-12);
    // the data file is part of the input hash
    let h1 = summary(&out)["input_hash"].clone();
    let f2 = curveprop_core::SpectralField::gaussian(curveprop_core::FrequencyGrid::new(1, 32.0, 512).unwrap(), 3.0).unwrap();
    curveprop::io::save_field(&dir.path().join("f.bin"), &f2).unwrap();
    assert!(run_into("propagate", &cfg, &out, "1").status.success());
    assert_ne!(summary(&out)["input_hash"], h1);
}

fn empty_summary() -> Summary {
    Summary {
        schema_version: 1,
        command: "rate-fit".into(),
        input_hash: "0".repeat(64),
        config: Value::Null,
        results: vec![],
        csv: vec![],
    }
}

#[test]
fn empty_result_set() {
    let dir = tempfile::tempdir().unwrap();
    emit_report(dir.path(), &empty_summary(), &[]).unwrap();
    let s = summary(dir.path());
    assert_eq!(s["results"], serde_json::json!([]));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn nan_is_refused_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = CsvTable::new(&["t", "E"]);
    t.push(vec![0.5.into(), f64::NAN.into()]);
    let e = emit_report(dir.path(), &empty_summary(), &[("rate_fit.csv".into(), t)]).unwrap_err();
    assert!(matches!(e, ReportError::DataIntegrity(_)));
    assert_eq!(e.name(), "data-integrity");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
