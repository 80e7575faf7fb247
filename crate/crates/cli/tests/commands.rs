use std::path::Path;
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::{header, Request};
use http_body_util::BodyExt;
use nashroyalty_core::schema::SolveResponse;
use serde_json::Value;
use tower::ServiceExt;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nashroyalty"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_prints_share_and_rate() {
    let out = run(&["solve", "--d1", "0.2", "--d2", "0.3", "--alpha", "0.4", "--operating-margin", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("royalty share r/O_M  0.400000"), "{text}");
    assert!(text.contains("royalty rate r/O_R   0.100000"), "{text}");
}

#[test]
fn precision_flag_changes_digits() {
    let out = run(&["solve", "--d1", "0.2", "--d2", "0.3", "--alpha", "0.4", "--precision", "2"]);
    assert!(stdout(&out).contains("r/O_M  0.40\n"));
}

#[test]
fn infeasible_point_exits_with_no_deal() {
    let out = run(&["solve", "--d1", "0.7", "--d2", "0.4", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no deal: d1+d2 > 1"));
    assert!(out.stdout.is_empty());
}

#[test]
fn argument_errors_exit_3_and_help_exits_0() {
    assert_eq!(run(&["solve", "--d1", "abc"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--d1", "0.2", "--d2", "0.3"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--d1", "0.2", "--d2", "0.3", "--model", "case9"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--d1", "0.2", "--d2", "0.3", "--alpha", "1.5"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn strict_origin_is_an_internal_model_error() {
    let out = run(&["solve", "--d1", "0", "--d2", "0", "--model", "case2", "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["solve", "--d1", "0", "--d2", "0", "--model", "case2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("note:"));
}

#[test]
fn case3_alpha_carries_a_note() {
    let out = run(&["alpha", "--model", "case3", "--d1", "0.2", "--d2", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("alpha  0.433333\n"), "{text}");
    assert!(text.contains("note: case3"));
}

#[test]
fn closed_form_flag_switches_case3_value() {
    let pipeline = run(&["solve", "--model", "case3", "--d1", "0.2", "--d2", "0.3", "--json"]);
    let printed = run(&["solve", "--model", "case3", "--d1", "0.2", "--d2", "0.3", "--closed-form", "--json"]);
    let a: Value = serde_json::from_slice(&pipeline.stdout).unwrap();
    let b: Value = serde_json::from_slice(&printed.stdout).unwrap();
    assert!((a["royalty_share"].as_f64().unwrap() - 5.0 / 12.0).abs() < 1e-12);
    assert!((b["royalty_share"].as_f64().unwrap() - 13.0 / 30.0).abs() < 1e-12);
}

#[test]
fn perception_flags_build_the_model() {
    let out = run(&[
        "alpha", "--model", "perceptions", "--d1", "0.2", "--d2", "0.3", "--p11", "0.75", "--p12", "0.75", "--p21",
        "0.5", "--p22", "0.5", "--json",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - 0.625).abs() < 1e-15);
    assert_eq!(run(&["alpha", "--d1", "0.2", "--d2", "0.3", "--p11", "0.5"]).status.code(), Some(3));
}

#[test]
fn raw_payoffs_need_financials() {
    let out = run(&[
        "solve", "--raw", "--d1", "20", "--d2", "30", "--operating-revenue", "400", "--operating-cost", "300",
        "--alpha", "0.4", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["d1"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    assert!((v["royalty_rate"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(run(&["solve", "--raw", "--d1", "20", "--d2", "30", "--alpha", "0.4"]).status.code(), Some(3));
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let args = ["solve", "--d1", "0.1", "--d2", "0.35", "--model", "case3", "--json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let parsed: SolveResponse = serde_json::from_slice(&first.stdout).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(again.as_bytes(), first.stdout.as_slice());
}

#[test]
fn cli_and_service_agree_field_for_field() {
    let cli = run(&["solve", "--d1", "0.15", "--d2", "0.4", "--model", "case2", "--operating-margin", "0.3", "--json"]);
    let cli: Value = serde_json::from_slice(&cli.stdout).unwrap();
    let body = r#"{"d1":0.15,"d2":0.4,"model":{"kind":"case2"},"operating_margin":0.3}"#;
    let service: Value = tokio::runtime::Runtime::new().unwrap().block_on(async {
        let req = Request::post("/api/solve")
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(body))
            .unwrap();
        let res = nashroyalty_service::router(Default::default()).oneshot(req).await.unwrap();
        serde_json::from_slice(&res.into_body().collect().await.unwrap().to_bytes()).unwrap()
    });
    assert_eq!(cli, service);
}

#[test]
fn scenarios_feed_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "deals.json",
        r#"[
          {"name": "money",
           "financials": {"operating_revenue": 400, "operating_cost": 300},
           "disagreement": {"d1": 20, "d2": 30, "normalized": false},
           "model": {"kind": "constant", "alpha": 0.4}},
          {"name": "even",
           "disagreement": {"d1": 0.1, "d2": 0.1},
           "model": {"kind": "case1"}}
        ]"#,
    );
    let out = run(&["solve", "--scenarios", &file, "--scenario", "money", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["royalty_share"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((v["royalty_rate"].as_f64().unwrap() - 0.1).abs() < 1e-12);

    let out = run(&["alpha", "--scenarios", &file, "--scenario", "even", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["alpha"].as_f64().unwrap(), 0.5);

    let out = run(&["solve", "--scenarios", &file, "--scenario", "even", "--alpha", "0.25", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["royalty_share"].as_f64().unwrap() - 0.3).abs() < 1e-12);

    let out = run(&["scan", "--scenarios", &file, "--scenario", "even", "--grid-step", "0.1", "--fd-step", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("d1,d2,r_share,dr_dd1,dr_dd2,class\n"));

    let out = run(&["nomograph", "--scenarios", &file, "--scenario", "money"]);
    assert!(stdout(&out).contains("r/O_M = 0.40"));

    let out = run(&["solve", "--scenarios", &file, "--scenario", "missing"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("money, even"));
}

#[test]
fn invalid_scenario_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad_model = write(
        dir.path(),
        "bad.json",
        r#"{"name": "x", "disagreement": {"d1": 0.2, "d2": 0.3}, "model": {"kind": "case9"}}"#,
    );
    let out = run(&["solve", "--scenarios", &bad_model, "--scenario", "x"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("case9"));

    let broken = write(dir.path(), "broken.json", "{\n  \"name\": \"x\",\n  \"disagreement\": {\"d1\": true}\n}");
    let out = run(&["solve", "--scenarios", &broken, "--scenario", "x"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("disagreement.d1"), "{err}");
}

#[test]
fn scan_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let out = run(&[
        "scan", "--model", "violating-demo", "--grid-step", "0.05", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["model"], "violating-demo");
}

#[test]
fn oversized_scan_is_refused() {
    let out = run(&["scan", "--alpha", "0.5", "--grid-step", "0.0001", "--fd-step", "0.00001"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("exceeds the limit"));
}

#[test]
fn family_csv_has_fixed_columns() {
    let out = run(&["family", "--alpha", "0.5", "--levels", "0,0.5", "--d1-step", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "d1,d2,r_share\n0,0,0.5\n0.25,0,0.625\n0.5,0,0.75\n0.75,0,0.875\n1,0,1\n0,0.5,0.25\n0.25,0.5,0.375\n0.5,0.5,0.5\n"
    );
}

#[test]
fn nomograph_file_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for path in [&a, &b] {
        let out = run(&["nomograph", "--overlay", "0.4,0.2,0.3", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert!(String::from_utf8(first).unwrap().contains("r/O_M = 0.40"));

    assert_eq!(run(&["nomograph", "--overlay", "0.4,0.2"]).status.code(), Some(3));
    assert_eq!(run(&["nomograph", "--overlay", "0.4,0.8,0.3"]).status.code(), Some(2));
    assert_eq!(run(&["nomograph", "--tick", "0.3"]).status.code(), Some(3));
}

#[test]
fn verify_emits_a_passing_report() {
    let out = run(&["verify", "--instances", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn serve_rejects_a_bad_port() {
    assert_eq!(run(&["serve", "--port", "99999"]).status.code(), Some(3));
}
