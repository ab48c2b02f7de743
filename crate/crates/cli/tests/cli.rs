use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn config(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    root.to_string_lossy().into_owned()
}

fn princheb() -> Command {
    let mut cmd = Command::cargo_bin("princheb").unwrap();
    cmd.env_remove("PRINCHEB_CACHE");
    cmd
}

fn run_json(args: &[&str]) -> Value {
    let out = princheb().arg("--json").args(args).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn field_info_biquadratic() {
    let v = run_json(&["field", "info", &config("biquadratic_minus3_13.json")]);
    assert_eq!(v["abs_discriminant"], "1521");
    assert_eq!(v["class_number"]["h"], 2);
    assert_eq!(v["bach_sorenson_bound"]["value"], 6992);
    assert_eq!(v["bach_sorenson_bound"]["grh_conditional"], true);
    assert_eq!(v["field"]["degree"], 4);
}

#[test]
fn field_info_minus_five() {
    let v = run_json(&["field", "info", &config("quadratic_minus5.json")]);
    assert_eq!(v["field"]["discriminant"], "-20");
    assert_eq!(v["lenstra_class_bound"], 5);
    assert_eq!(v["class_number"]["h"], 2);
}

#[test]
fn classgroup_minus_five() {
    let v = run_json(&["field", "classgroup", &config("quadratic_minus5.json")]);
    assert_eq!(v["invariant_factors"], serde_json::json!([2]));
    assert_eq!(v["certification"], "certified-by-bound");
}

#[test]
fn not_squarefree_is_a_config_error() {
    let out = princheb().args(["field", "info", &config("bad_not_squarefree.json")]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not squarefree"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "bad.json", r#"{"type":"quadratic","d":-5,"extra":1}"#);
    let out = princheb().args(["field", "info", &path]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
}

#[test]
fn missing_file_is_a_config_error() {
    princheb().args(["field", "info", "/nonexistent/field.json"]).assert().code(2);
}

fn scan_densities(args: &[&str]) -> Vec<Value> {
    let v = run_json(args);
    v["summary"].as_array().expect("summary array").clone()
}

#[test]
fn scan_minus_five_densities() {
    let d = scan_densities(&["scan", &config("quadratic_minus5.json"), "--max-norm", "10000"]);
    let value = |label: &str| d.iter().find(|c| c["label"] == label).unwrap()["density"]["decimal"].as_f64().unwrap();
    assert!((value("(+)") - 0.25).abs() < 0.01);
    assert!((value("(-)") - 0.5).abs() < 0.01);
    // m = h makes every prime principal in its class
    let d = scan_densities(&["scan", &config("quadratic_minus5.json"), "--max-norm", "10000", "--m", "2"]);
    let value = |label: &str| d.iter().find(|c| c["label"] == label).unwrap()["density"]["decimal"].as_f64().unwrap();
    assert!((value("(+)") - 0.5).abs() < 0.01);
}

#[test]
fn scan_smallest_bound_has_one_record() {
    let out = princheb().args(["scan", &config("quadratic_minus5.json"), "--max-norm", "2", "--csv"]).output().unwrap();
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["p", "status", "frob_rep", "f", "principal_order"]);
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "2");
    assert_eq!(&rows[0][1], "ramified");
}

#[test]
fn scan_csv_rows() {
    let out = princheb().args(["scan", &config("quadratic_minus5.json"), "--max-norm", "30", "--csv"]).output().unwrap();
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    let row29 = rows.iter().find(|r| &r[0] == "29").unwrap();
    assert_eq!((&row29[2], &row29[3], &row29[4]), ("(+)", "1", "1"));
    let row3 = rows.iter().find(|r| &r[0] == "3").unwrap();
    assert_eq!(&row3[4], "2");
}

#[test]
fn scan_is_deterministic_across_threads() {
    let base = ["scan", &config("biquadratic_minus3_13.json"), "--max-norm", "3000"];
    let one = princheb().arg("--json").args(base).args(["--threads", "1"]).output().unwrap();
    let three = princheb().arg("--json").args(base).args(["--threads", "3"]).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn density_of_extension_classes() {
    let v = run_json(&["density", &config("z4_over_z2.json"), "--class", "1", "--m", "1"]);
    assert_eq!(v["density"]["value"], "0/1");
    assert_eq!(v["positivity"], false);
    let v = run_json(&["density", &config("z4_over_z2.json"), "--class", "1", "--m", "2"]);
    assert_eq!(v["density"]["value"], "1/2");
    assert_eq!(v["positivity"], true);
    // identity class at the kernel exponent is 1/|G|
    let v = run_json(&["density", &config("z4_over_z2.json"), "--class", "0", "--m", "2"]);
    assert_eq!(v["density"]["value"], "1/2");
}

#[test]
fn density_rejects_unknown_class() {
    princheb().args(["density", &config("z4_over_z2.json"), "--class", "5"]).assert().code(2);
}

#[test]
fn recover_kernel() {
    let out = princheb().args(["recover", &config("z2xz4_trivial.json")]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2,4");
    let v = run_json(&["recover", &config("z4_over_z2.json")]);
    assert_eq!(v["invariant_factors"], serde_json::json!([2]));
}

#[test]
fn verify_biquadratic_is_nonsplit() {
    let v = run_json(&["hes", "verify", &config("biquadratic_minus3_13.json")]);
    let verdict = &v["verdict"];
    assert_eq!(verdict["conclusion"], "NONSPLIT");
    assert_eq!(verdict["bound_used"], 6992);
    assert_eq!(verdict["grh_conditional"], true);
    let unwitnessed: Vec<_> =
        verdict["per_class"].as_array().unwrap().iter().filter(|c| c["witness"].is_null()).map(|c| c["label"].clone()).collect();
    assert_eq!(unwitnessed, ["(-,-)"]);
}

#[test]
fn verify_minus_five_has_gold_certificate() {
    let v = run_json(&["hes", "verify", &config("quadratic_minus5.json")]);
    assert_eq!(v["verdict"]["conclusion"], "INCONCLUSIVE");
    let conditions = v["verdict"]["gold"]["conditions"].as_array().unwrap();
    assert!(conditions.iter().any(|c| c["condition"] == "cyclic-over-q"));
    let text = princheb().args(["hes", "verify", &config("quadratic_minus5.json")]).output().unwrap();
    assert!(String::from_utf8_lossy(&text.stdout).contains("cyclic over Q"));
}

#[test]
fn verify_reports_excluded_primes() {
    let v = run_json(&["hes", "verify", &config("cubic7_index8.json")]);
    assert_eq!(v["verdict"]["excluded_primes"], serde_json::json!([2]));
    assert_eq!(v["verdict"]["conclusion"], "INCONCLUSIVE");
}

#[test]
fn verify_refuses_uncertified_class_group() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "q23.json", r#"{"type":"quadratic","d":-23}"#);
    let out = princheb().args(["hes", "verify", &path, "--doublings", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("not certified"));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::cargo_bin("princheb")
            .unwrap()
            .env("PRINCHEB_CACHE", dir.path())
            .args(["--json", "field", "classgroup", &config("quadratic_minus5.json")])
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert!(second.stderr.is_empty());

    // a tampered entry is ignored with a warning
    let path = entries.into_iter().next().unwrap().unwrap().path();
    let mut cached: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    cached["invariants"] = serde_json::json!([4]);
    std::fs::write(&path, cached.to_string()).unwrap();
    let third = run();
    assert!(third.status.success());
    assert_eq!(first.stdout, third.stdout);
    assert!(String::from_utf8_lossy(&third.stderr).contains("warning"));
}
