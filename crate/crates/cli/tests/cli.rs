use std::process::{Command, Output};

use serde_json::Value;

fn chamber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chamber")).args(args).output().expect("binary runs")
}

fn chamber_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chamber"))
        .args(args)
        .env("CHAMBER_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("valid JSON line")).collect()
}

const LOCK_STEP: [&str; 8] = ["--kind", "diagonal", "--k", "1", "--weights", "0,1", "--u", "1"];

fn lock_step(extra: &[&str]) -> Vec<String> {
    LOCK_STEP.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(sub: &str, args: &[String]) -> Output {
    let mut all = vec![sub];
    all.extend(args.iter().map(String::as_str));
    chamber(&all)
}

#[test]
fn count_both_methods_match() {
    let out = run("count", &lock_step(&["--v", "1", "--n", "6", "--method", "both"]));
    assert_eq!(out.status.code(), Some(0));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["dp"], "5");
    assert_eq!(rows[0]["reflection"], "5");
    assert_eq!(rows[0]["match"], true);
}

#[test]
fn count_examples() {
    let out = chamber(&["count", "--kind", "axis", "--k", "1", "--weights", "1,1,1", "--u", "1", "--v", "1", "--n", "2"]);
    assert_eq!(json_lines(&out)[0]["count"], "6");
    let out = run("count", &lock_step(&["--v", "1", "--n", "0"]));
    assert_eq!(json_lines(&out)[0]["count"], "1");
}

#[test]
fn catalan_range_and_free_endpoint() {
    let out = run("count", &lock_step(&["--v", "1", "--n", "2:16:2"]));
    let counts: Vec<String> = json_lines(&out).iter().map(|r| r["count"].as_str().unwrap().to_string()).collect();
    assert_eq!(counts, ["1", "2", "5", "14", "42", "132", "429", "1430"]);
    let out = run("count", &lock_step(&["--n", "1..12", "--method", "reflection"]));
    let counts: Vec<String> = json_lines(&out).iter().map(|r| r["count"].as_str().unwrap().to_string()).collect();
    assert_eq!(counts, ["1", "2", "3", "6", "10", "20", "35", "70", "126", "252", "462", "924"]);
    assert!(json_lines(&out)[0]["v"].is_null());
}

#[test]
fn rational_weights_round_trip() {
    let out = chamber(&["count", "--kind", "diagonal", "--k", "1", "--weights", "1/2,0,1/2", "--u", "1", "--v", "1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json_lines(&out)[0];
    assert_eq!(row["weights"], serde_json::json!(["1/2", "0", "1/2"]));
    // Stay or two atomic steps, weight 1/2 each: SS, S(UD), (UD)S, (UD)(UD), (UU)(DD).
    assert_eq!(row["count"], "5/4");
}

#[test]
fn csv_has_header_and_quoted_counts() {
    let out = run("count", &lock_step(&["--v", "1", "--n", "2:6:2", "--format", "csv"]));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], r#""n","method","count""#);
    assert_eq!(lines[3], r#""6","dp","5""#);
}

#[test]
fn asym_supported_and_parity() {
    let out = run("asym", &lock_step(&["--v", "1", "--n", "15..16"]));
    let rows = json_lines(&out);
    assert_eq!(rows[0]["supported"], false);
    assert!(rows[0]["value"].is_null());
    assert_eq!(rows[1]["supported"], true);
    let value = rows[1]["value"].as_f64().unwrap();
    assert!((value - 1634.0676).abs() < 1e-3, "{value}");
    assert_eq!(rows[1]["correction_applied"], false);
    let on = run("asym", &lock_step(&["--v", "1", "--n", "16", "--correction", "on"]));
    assert_eq!(json_lines(&on)[0]["correction_applied"], true);
}

#[test]
fn asym_random_turns_matches_closed_form() {
    let out = chamber(&["asym", "--kind", "axis", "--k", "2", "--weights", "0,1", "--u", "1,2", "--v", "1,2", "--n", "100"]);
    let got = json_lines(&out)[0]["log10_value"].as_f64().unwrap();
    // 2 (2k)^n (2/π)^{k/2} (k/n)^{k² + k/2} ∏(v_m² - v_j²)(u_m² - u_j²) ∏v_j u_j / ∏(2j-1)!
    // at k = 2, n = 100, u = v = (1, 2); the endpoint factor is 3·3·4/6 = 6.
    let (k, n) = (2.0f64, 100.0f64);
    let expected = (2.0f64).log10() + n * (2.0 * k).log10() + k / 2.0 * (2.0 / std::f64::consts::PI).log10()
        + (k * k + k / 2.0) * (k / n).log10()
        + 6f64.log10();
    assert!(((got - expected) / expected).abs() < 1e-10, "{got} vs {expected}");
}

#[test]
fn compare_slopes() {
    for (args, lo, hi) in [
        (vec!["--preset", "watermelon", "--k", "1", "--grid", "16:128:16"], -1.3, -0.7),
        (vec!["--preset", "watermelon", "--k", "2", "--grid", "20:200:20"], -1.6, -0.6),
        (vec!["--preset", "lock-step-free", "--k", "1", "--u", "1", "--grid", "16:256:16"], -1.3, -0.7),
    ] {
        let mut all = vec!["compare"];
        all.extend(args);
        let out = chamber(&all);
        assert_eq!(out.status.code(), Some(0));
        let doc = &json_lines(&out)[0];
        let slope = doc["fitted_slope"].as_f64().unwrap();
        assert!((lo..=hi).contains(&slope), "{slope}");
        assert!(doc["rows"][0]["exact"].is_string());
    }
}

#[test]
fn compare_csv() {
    let out = chamber(&["compare", "--preset", "watermelon", "--k", "1", "--grid", "16:64:16", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(r#""n","exact","exact_log","asym_log","ratio","delta""#));
    assert!(text.lines().nth(1).unwrap().starts_with(r#""16","1430","#));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fitted_slope="));
}

#[test]
fn preset_bundle() {
    let out = chamber(&["preset", "watermelon", "--k", "2", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json_lines(&out)[0];
    assert_eq!(row["length"], 20);
    assert_eq!(row["formula"], "preset");
    assert!(row["count"].is_string());
    assert!(row["ratio"].as_f64().unwrap() > 0.0);
    let out = chamber(&["preset", "watermelon", "--k", "2", "--n", "1"]);
    assert_eq!(json_lines(&out)[0]["count"], "1");
}

#[test]
fn verify_suites_pass() {
    let out = chamber(&["verify", "--suite", "det,schur,signs", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["suites"].as_array().unwrap().len(), 3);
    let out = chamber(&["verify", "--suite", "selberg", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    assert_eq!(chamber(&["count", "--kind", "hex", "--k", "1", "--weights", "0,1", "--u", "1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(chamber(&["preset", "nope", "--k", "1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(chamber(&["verify", "--suite", "nope"]).status.code(), Some(2));
    // Not a chamber point.
    assert_eq!(run("count", &lock_step(&["--v", "0", "--n", "2"])).status.code(), Some(2));
    // Off the diagonal lattice.
    assert_eq!(chamber(&["count", "--kind", "diagonal", "--k", "2", "--weights", "0,1", "--u", "1,2", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run("asym", &lock_step(&["--v", "1", "--n", "0"])).status.code(), Some(2));
    let out = chamber(&[
        "count", "--kind", "axis", "--k", "5", "--weights", "0,1", "--u", "1,2,3,4,5", "--v", "1,2,3,4,5", "--n", "200", "--state-budget", "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(chamber_with_threads(&["verify", "--suite", "det"], "many").status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let args = ["verify", "--suite", "oracle,det,selberg", "--seed", "11", "--full"];
    let a = chamber_with_threads(&args, "1");
    let b = chamber_with_threads(&args, "4");
    let c = chamber_with_threads(&args, "0");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let count = ["count", "--kind", "axis", "--k", "3", "--weights", "1,1,1", "--u", "1,2,3", "--v", "2,3,5", "--n", "0..8", "--method", "both"];
    assert_eq!(chamber_with_threads(&count, "1").stdout, chamber_with_threads(&count, "3").stdout);
}
