use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qhahn_cli::{PanelConfig, Suite};
use serde_json::Value;

const ONE_INSTANCE: &str = r#"
suites = ["gevp"]

[[instance]]
q = "1/2"
A = "32"
B = "1/512"
N = 3
"#;

fn qhahn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhahn")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("panel.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn verify(config: &str, extra: &[&str]) -> (i32, Option<Value>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), config);
    let out = dir.path().join("report.json");
    let mut args = vec!["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = qhahn(&args);
    let report = std::fs::read_to_string(&out).ok().map(|s| serde_json::from_str(&s).unwrap());
    (o.status.code().unwrap(), report)
}

#[test]
fn single_valid_instance_passes() {
    let (code, report) = verify(ONE_INSTANCE, &[]);
    assert_eq!(code, 0);
    let r = report.unwrap();
    assert_eq!(r["status"], "pass");
    assert_eq!(r["suites"], serde_json::json!(["gevp"]));
    let checks = r["instances"][0]["checks"].as_array().unwrap();
    assert!(checks.len() >= 5);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert_eq!(r["instances"][0]["params"]["A"], "32/1");
}

#[test]
fn pole_instance_is_skipped_with_reason() {
    let cfg = format!("{ONE_INSTANCE}\n[[instance]]\nq = \"1/2\"\nA = \"1\"\nB = \"1/3\"\nN = 2\n");
    let (code, report) = verify(&cfg, &[]);
    assert_eq!(code, 0);
    let inst = &report.unwrap()["instances"][1];
    assert_eq!(inst["status"], "skip");
    assert!(inst["skip_reasons"][0].as_str().unwrap().contains("pole"));
    assert!(inst["checks"].as_array().unwrap().is_empty());
}

#[test]
fn config_errors_exit_with_two() {
    let no_suites = ONE_INSTANCE.replace("suites = [\"gevp\"]", "");
    assert_eq!(verify(&no_suites, &[]).0, 2);
    assert_eq!(verify(ONE_INSTANCE, &["--suite", "spectral"]).0, 2);
    assert_eq!(verify(&ONE_INSTANCE.replace("\"1/512\"", "\"1/0\""), &[]).0, 2);
    assert_eq!(verify(&ONE_INSTANCE.replace("N = 3", "N = \"three\""), &[]).0, 2);
    assert_eq!(verify("suites = [\"wilson\"]\n", &[]).0, 2);
    assert_eq!(verify(&format!("{ONE_INSTANCE}\nunknown_key = 1\n"), &[]).0, 2);
    let o = qhahn(&["verify", "--config", "/nonexistent/panel.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_one() {
    // pre-asymptotic for the q -> 1 sweep: the measured orders fall below 1/2
    let cfg = "suites = [\"hahn\"]\n[[hahn]]\nalpha = \"-5\"\nbeta = \"9\"\nN = 3\nconvergence = true\n";
    let (code, report) = verify(cfg, &[]);
    assert_eq!(code, 1);
    let r = report.unwrap();
    assert_eq!(r["status"], "fail");
    let checks = r["instances"][0]["checks"].as_array().unwrap();
    assert_eq!(checks[0]["status"], "pass");
    assert_eq!(checks[1]["status"], "fail");
    assert!(!checks[1]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn suite_flag_overrides_file() {
    let (code, report) = verify(ONE_INSTANCE, &["--suite", "casimir", "--suite", "biortho"]);
    assert_eq!(code, 0);
    let r = report.unwrap();
    assert_eq!(r["suites"], serde_json::json!(["biortho", "casimir"]));
    let suites: Vec<&str> =
        r["instances"][0]["checks"].as_array().unwrap().iter().map(|c| c["suite"].as_str().unwrap()).collect();
    assert!(suites.iter().all(|s| *s == "biortho" || *s == "casimir"));
}

fn without_timing(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn reports_are_deterministic() {
    let cfg = format!(
        "{}\n[[instance]]\nq = \"2/3\"\nA = \"3\"\nB = \"5/7\"\nN = 4\n",
        ONE_INSTANCE.replace("[\"gevp\"]", "[\"gevp\", \"algebra\", \"limits\"]")
    );
    let parsed = PanelConfig::parse(&cfg).unwrap();
    let suites = parsed.select(&[]).unwrap();
    assert_eq!(suites, vec![Suite::Gevp, Suite::Algebra, Suite::Limits]);
    let a = qhahn_cli::run(&parsed, &suites).to_json_string();
    let b = qhahn_cli::run(&parsed, &suites).to_json_string();
    assert_eq!(without_timing(&a), without_timing(&b));
    // the raw text differs only inside the timing object
    let strip = |s: &str| s.split("\"timing\"").next().unwrap().to_string();
    assert_eq!(strip(&a), strip(&b));
    let v: Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(v["config_hash"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn config_hash_tracks_content() {
    let a = PanelConfig::parse(ONE_INSTANCE).unwrap();
    let b = PanelConfig::parse(&ONE_INSTANCE.replace("N = 3", "N = 2")).unwrap();
    assert_eq!(a.hash, PanelConfig::parse(ONE_INSTANCE).unwrap().hash);
    assert_ne!(a.hash, b.hash);
}

#[test]
fn default_panel_passes() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/panels/default.toml");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qhahn(&["verify", "--config", cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["summary"]["checks"]["fail"], 0);
    assert_eq!(r["suites"].as_array().unwrap().len(), 8);
}

fn export(args: &[&str]) -> (i32, String) {
    let mut full = vec!["export"];
    full.extend_from_slice(args);
    let o = qhahn(&full);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

#[test]
fn exported_z_is_lower_bidiagonal() {
    let (code, out) = export(&["--what", "matrix", "--which", "Z", "--params", "1/2,32,1/512,3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["basis"], "point");
    assert_eq!(v["operator"], "Z");
    assert_eq!(v["shape"], serde_json::json!([4, 4]));
    let rows = v["rows"].as_array().unwrap();
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.as_array().unwrap().iter().enumerate() {
            let cell = cell.as_str().unwrap();
            if i == j {
                assert_eq!(cell, "-1/1");
            } else if j + 1 == i {
                assert_ne!(cell, "0/1");
            } else {
                assert_eq!(cell, "0/1");
            }
        }
    }
}

#[test]
fn exported_weight_sums_to_one() {
    let (code, out) = export(&["--what", "weight", "--params", "2/3,3,5/7,1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let vals: Vec<_> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| qhahn_core::parse_scalar(s.as_str().unwrap()).unwrap())
        .collect();
    assert_eq!(vals.len(), 2);
    let total = vals[0].clone() + vals[1].clone();
    assert_eq!(qhahn_core::format_scalar(&total), "1/1");
}

#[test]
fn csv_export_quotes_exact_values() {
    let (code, out) = export(&["--what", "brf", "--which", "2", "--params", "1/2,32,1/512,3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "\"x\",\"value\"");
    assert_eq!(lines.len(), 5);
    for (x, line) in lines[1..].iter().enumerate() {
        let (idx, value) = line.split_once(',').unwrap();
        assert_eq!(idx, x.to_string());
        assert!(value.starts_with('"') && value.ends_with('"') && value.contains('/'), "{line}");
    }
}

#[test]
fn export_rejects_bad_requests() {
    assert_eq!(export(&["--what", "brf", "--which", "9", "--params", "1/2,32,1/512,3"]).0, 2);
    assert_eq!(export(&["--what", "matrix", "--which", "W", "--params", "1/2,32,1/512,3"]).0, 2);
    assert_eq!(export(&["--what", "matrix", "--which", "X", "--params", "1/2,1,1/3,2"]).0, 2);
    assert_eq!(export(&["--what", "weight", "--params", "1/2,32"]).0, 2);
    assert_eq!(export(&["--what", "matrix", "--params", "1/2,32,1/512,3"]).0, 2);
}

#[test]
fn phi_basis_export_is_tagged() {
    let (code, out) = export(&["--what", "matrix", "--which", "V", "--basis", "phi", "--params", "3/2,7/5,2/9,5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["basis"], "phi");
}
