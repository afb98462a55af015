use std::process::{Command, Output};

fn heatwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatwalk"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env("HEATWALK_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = heatwalk(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn s_table_csv_has_the_worked_row() {
    let out = heatwalk(&[
        "s-table", "--n", "3", "--class", "1,1,1", "--kmax", "4", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# manifest: "));
    assert!(text.lines().any(|l| l == "k,d,S"));
    assert!(text.lines().any(|l| l == "2,1,3"), "{text}");
}

#[test]
fn cnp_tree_count() {
    let v = json(&["cnp", "--n", "4", "--p", "3"]);
    assert_eq!(v["result"]["c"], 16);
}

#[test]
fn eval_scalar_case() {
    let v = json(&["eval", "--cycle-type", "2", "--N", "1", "--t", "1"]);
    let x = v["result"]["value"].as_f64().unwrap();
    assert!((x - (-2.0f64).exp()).abs() < 1e-10);
    // Seventeen significant digits.
    let raw = v["result"]["value"].to_string();
    assert_eq!(
        raw.split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .replace('.', "")
            .len(),
        17,
        "{raw}"
    );
}

#[test]
fn manifest_records_the_run() {
    let v = json(&[
        "cover",
        "--cycle-type",
        "2,1",
        "--N",
        "2",
        "--t",
        "0.5",
        "--samples",
        "2000",
        "--seed",
        "9",
    ]);
    let m = &v["manifest"];
    assert_eq!(m["subcommand"], "cover");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["timestamp"], 1700000000u64);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["flags"]["command"]["cover"]["samples"], 2000);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "simulate",
        "--cycle-type",
        "2",
        "--N",
        "3",
        "--t",
        "1",
        "--steps",
        "10",
        "--samples",
        "200",
        "--seed",
        "4",
    ];
    let a = heatwalk(&args);
    let b = heatwalk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nc.json");
    let out = heatwalk(&["nc", "--n", "4", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["count"], 14);
}

#[test]
fn engines_answer() {
    let v = json(&[
        "kreweras",
        "--partition",
        "{1,3,12}{2}{4,8,9}{5,6,7}{10,11}",
    ]);
    assert_eq!(
        v["result"]["kreweras"],
        "{1,2}{3,9,11}{4,7}{5}{6}{8}{10}{12}"
    );
    assert_eq!(v["result"]["search_agrees"], true);

    let v = json(&["s-closed", "--n", "4", "--k", "3", "--d", "1"]);
    assert_eq!(v["result"]["rows"][0]["S"], 200);

    let v = json(&["expand", "--cycle-type", "1,1,1,1", "--dmax", "1"]);
    assert_eq!(
        v["result"]["slices"][1]["exact"],
        serde_json::json!(["0", "-6", "3"])
    );

    let v = json(&["fourier", "--cycle-type", "2", "--N", "1", "--t", "1"]);
    assert!((v["result"]["value"].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-10);

    let v = json(&["moments", "--n-max", "3", "--t", "0"]);
    assert_eq!(v["result"]["moments"].as_array().unwrap().len(), 3);

    let v = json(&["cumulants", "--n-max", "4", "--t", "1"]);
    assert_eq!(v["result"]["cumulants"].as_array().unwrap().len(), 4);

    let v = json(&["word", "--word", "a(0.5) b(1) a b"]);
    assert!(v["result"]["mixed_cumulant"].as_f64().unwrap().abs() < 1e-10);

    let v = json(&["verify-casimir", "--group", "sp", "--n", "2", "--N", "1"]);
    assert_eq!(v["result"]["holds"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    // Class does not partition n.
    assert_eq!(
        heatwalk(&["s-table", "--n", "4", "--class", "2,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(heatwalk(&["cnp", "--n", "4"]).status.code(), Some(2));
    assert_eq!(
        heatwalk(&["cnp", "--n", "4", "--p", "3", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        heatwalk(&[
            "s-table",
            "--n",
            "3",
            "--class",
            "3",
            "--kmax",
            "50",
            "--kmax-budget",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(heatwalk(&["nc", "--n", "40"]).status.code(), Some(2));
    assert_eq!(
        heatwalk(&["kreweras", "--partition", "{1,3}{2,4}"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_all_quick_subset() {
    let out = heatwalk(&["verify-all", "--only", "3,11", "--format", "csv"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines()
            .any(|l| l.starts_with("11,non-crossing partitions,true")),
        "{text}"
    );
    assert_eq!(
        heatwalk(&["verify-all", "--only", "12"]).status.code(),
        Some(2)
    );
}
