//! End-to-end tests against the compiled binary: exit codes, JSON shape,
//! and the round-trip re-validation of emitted tables.

use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klein-theta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is valid JSON")
}

#[test]
fn types_lists_the_five_small_types() {
    let out = run(&["types", "--g-max", "1"]);
    assert!(out.status.success());
    let value = stdout_json(&out);
    assert_eq!(value["count"], 5);
    let types = value["types"].as_array().unwrap();
    let triples: Vec<(u64, u64, u64)> = types
        .iter()
        .map(|t| {
            (
                t["g"].as_u64().unwrap(),
                t["n"].as_u64().unwrap(),
                t["a"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        triples,
        vec![(0, 1, 0), (0, 0, 1), (1, 2, 0), (1, 0, 1), (1, 1, 1)]
    );
}

#[test]
fn sw_worked_example() {
    let out = run(&["sw", "--type", "1,2,0", "--q", "0,0"]);
    assert!(out.status.success());
    let value = stdout_json(&out);
    assert_eq!(value["spinData"], serde_json::json!([1, 1]));
    let comps = value["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0]["mu"], serde_json::json!(["0", "0"]));
    assert_eq!(comps[0]["row"], serde_json::json!([0]));
    assert_eq!(comps[0]["circleValues"], serde_json::json!([0, 0]));
    assert_eq!(comps[1]["mu"], serde_json::json!(["1/2", "0"]));
    assert_eq!(comps[1]["row"], serde_json::json!([1]));
    assert_eq!(comps[1]["circleValues"], serde_json::json!([1, 1]));
}

#[test]
fn sw_json_revalidates_against_the_library() {
    // round trip: parse the emitted table and rebuild it from (type, q)
    let out = run(&["sw", "--type", "2,3,0", "--q", "1,0,1,1"]);
    assert!(out.status.success());
    let value = stdout_json(&out);

    let tt = klein_theta::TopologicalType::new(
        value["type"]["g"].as_u64().unwrap() as u32,
        value["type"]["n"].as_u64().unwrap() as u32,
        value["type"]["a"].as_u64().unwrap() as u8,
    );
    let bits: Vec<u8> = value["q"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_u64().unwrap() as u8)
        .collect();
    let model = klein_theta::klein::standard_model(tt).unwrap();
    let q = klein_theta::QuadraticFormZ2::from_bits(model.genus(), &bits).unwrap();
    let table = klein_theta::stiefel_whitney::sw_table(&model, &q).unwrap();

    let comps = value["components"].as_array().unwrap();
    assert_eq!(comps.len(), table.components.len());
    assert_eq!(comps.len(), 1 << (tt.circles - 1));
    for (emitted, built) in comps.iter().zip(&table.components) {
        let row: Vec<u8> = emitted["row"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| b.as_u64().unwrap() as u8)
            .collect();
        assert_eq!(row, built.row);
        let circles: Vec<u8> = emitted["circleValues"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| b.as_u64().unwrap() as u8)
            .collect();
        assert_eq!(circles, built.circle_values);
    }
    let spin: Vec<u8> = value["spinData"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_u64().unwrap() as u8)
        .collect();
    assert_eq!(spin, table.spin_data);
    // spin bits are the identity-row circle values plus one
    for (s, c) in spin.iter().zip(&table.components[0].circle_values) {
        assert_eq!(*s, (c + 1) % 2);
    }
}

#[test]
fn invalid_type_exits_two_and_names_the_condition() {
    let out = run(&["model", "--type", "3,1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("parity"), "stderr was: {stderr}");

    let out = run(&["model", "--type", "2,3,1"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("n <= g"), "stderr was: {stderr}");
}

#[test]
fn non_real_form_exits_two_citing_the_criterion() {
    let out = run(&["sw", "--type", "1,1,1", "--q", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("not fixed by the involution"),
        "stderr was: {stderr}"
    );
}

#[test]
fn theta_real_filter() {
    let out = run(&["theta", "--g", "1", "--real", "--type", "1,1,1"]);
    assert!(out.status.success());
    let value = stdout_json(&out);
    assert_eq!(value["count"], 2);
    for form in value["forms"].as_array().unwrap() {
        assert_eq!(form["bits"][0], 1); // realness forces q(e) = 1
    }

    let out = run(&["theta", "--g", "1", "--real"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_output_is_tabular() {
    let out = run(&["sw", "--type", "1,2,0", "--q", "0,0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mu,b0,c0,c1");
    assert_eq!(lines[1], "0 0,0,0,0");
    assert_eq!(lines[2], "1/2 0,1,1,1");
    assert_eq!(lines[3], "spin,,1,1");
}

#[test]
fn verify_lattice_suite_exits_zero() {
    let out = run(&["verify", "--suite", "lattice"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value = stdout_json(&out);
    assert_eq!(value["failed"], 0);

    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_suites_within_budget() {
    let start = Instant::now();
    let out = run(&["verify", "--suite", "all"]);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value = stdout_json(&out);
    assert_eq!(value["failed"], 0);
    let checks = value["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["id"] == "full-suite"));
    assert!(elapsed <= 300.0, "verify --suite all took {elapsed:.1}s");
}
