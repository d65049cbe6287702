use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn alrep() -> Command {
    let mut c = Command::cargo_bin("alrep").unwrap();
    c.env_remove("ALREP_CACHE_DIR").env_remove("ALREP_PRECISION_CAP");
    c
}

fn json(args: &[&str]) -> Value {
    let out = alrep().args(args).arg("--format").arg("json").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn seq_prints_terms() {
    alrep()
        .args(["seq", "--k", "2", "--n-max", "12"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("1 1\n2 3\n3 4\n"))
        .stdout(predicate::str::ends_with("11 199\n12 322\n"));
    alrep().args(["seq", "--k", "3", "--n-max", "1"]).assert().success().stdout("1 1\n");
}

#[test]
fn seq_formats() {
    let v = json(&["seq", "--k", "9", "--n-max", "10"]);
    assert_eq!(v["terms"][9]["value"], "766");
    alrep()
        .args(["--format", "csv", "seq", "--k", "7", "--n-max", "10"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("n,value\n"))
        .stdout(predicate::str::ends_with("10,755\n"));
}

#[test]
fn bad_order_is_a_usage_error() {
    alrep().args(["seq", "--k", "1", "--n-max", "5"]).assert().code(2);
    alrep().args(["seq", "--k", "2"]).assert().code(2);
    alrep().args(["frobnicate"]).assert().code(2);
}

#[test]
fn digits_classification() {
    alrep()
        .args(["digits", "766"])
        .assert()
        .success()
        .stdout(predicate::str::contains("almost repdigit (3 digits)"))
        .stdout(predicate::str::contains("a=6 b=7 d1=3 d2=2"));
    alrep()
        .args(["digits", "999"])
        .assert()
        .success()
        .stdout(predicate::str::contains("999: repdigit"));
    alrep()
        .args(["digits", "1234"])
        .assert()
        .success()
        .stdout(predicate::str::contains("not an almost repdigit"));
    let v = json(&["digits", "199"]);
    assert_eq!(v["almost_repdigit"], true);
    assert_eq!(v["forms"].as_array().unwrap().len(), 1);
}

#[test]
fn reduce_round_one() {
    let v = json(&[
        "reduce",
        "--gamma",
        "log(2)/log(10)",
        "--mu",
        "(log(9) - log(27))/log(10)",
        "--m",
        "1.8e291",
        "--a",
        "2/log(10)",
        "--b",
        "2",
    ]);
    assert_eq!(v["kind"], "Reduced");
    assert_eq!(v["convergent_index"], 589);
    let w: u64 = v["w_bound"].as_str().unwrap().parse().unwrap();
    assert!(w <= 975, "{w}");
}

#[test]
fn reduce_detects_relation() {
    alrep()
        .args(["reduce", "--gamma", "sqrt(2)", "--mu", "1 - sqrt(2)", "--m", "1000", "--a", "1", "--b", "10"])
        .assert()
        .success()
        .stdout(predicate::str::contains("Degenerate"))
        .stdout(predicate::str::contains("1*gamma + mu = 1"));
}

#[test]
fn bad_expression_is_a_usage_error() {
    alrep()
        .args(["reduce", "--gamma", "sqrt(2", "--mu", "0", "--m", "10", "--a", "1", "--b", "2"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("bad expression"));
    alrep()
        .args(["reduce", "--gamma", "sqrt(2)", "--mu", "0", "--m", "0", "--a", "1", "--b", "2"])
        .assert()
        .code(2);
}

#[test]
fn cf_of_golden_ratio() {
    let v = json(&["cf", "--value", "(1 + sqrt(5))/2", "--terms", "10"]);
    let qs: Vec<&str> = v["quotients"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(qs, vec!["1"; 10]);
    assert_eq!(v["convergents"][9]["q"], "55");
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    alrep()
        .env("ALREP_CACHE_DIR", dir.path())
        .args(["cf", "--value", "sqrt(7)", "--terms", "30"])
        .assert()
        .success();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    // a second run reads the entry back
    alrep()
        .env("ALREP_CACHE_DIR", dir.path())
        .args(["cf", "--value", "sqrt(7)", "--terms", "30"])
        .assert()
        .success()
        .stdout(predicate::str::contains("28 4 "));
}

#[test]
fn precision_cap_from_environment() {
    alrep()
        .env("ALREP_PRECISION_CAP", "256")
        .args(["cf", "--value", "sqrt(2)", "--terms", "5000"])
        .assert()
        .code(3);
    alrep()
        .args(["--precision-start", "4096", "--precision-cap", "1024", "cf", "--value", "2"])
        .assert()
        .code(2);
}

#[test]
fn bounds_chain() {
    let v = json(&["bounds", "--k", "10"]);
    let steps = v["provenance"].as_array().unwrap();
    assert!(steps.iter().all(|s| s["certified"] == true));
    assert!(steps.iter().any(|s| s["step"] == "n_a0"));
}

#[test]
fn verify_small_orders() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    alrep()
        .args(["verify", "--k-min", "2", "--k-max", "9", "--quiet", "--report"])
        .arg(&report)
        .assert()
        .code(0)
        .stdout(predicate::str::contains("overall: Verified"))
        .stdout(predicate::str::contains("L_10^(9) = 766"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["overall"], "Verified");
    let sols: Vec<u64> = v["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["value"].as_str().unwrap().parse().unwrap())
        .collect();
    assert_eq!(sols, vec![199, 322, 118, 399, 755, 766]);
}

#[test]
fn verify_exit_codes() {
    alrep()
        .args(["verify", "--k-min", "2", "--k-max", "2", "--budget", "10", "--quiet"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("BoundOnly"));
    alrep().args(["verify", "--k-min", "5", "--k-max", "3"]).assert().code(2);
}
