use std::process::{Command, Output};

use serde_json::Value;

const WORKED: [&str; 4] = ["--pstar", "0.5,0.3,0.2", "--p", "uniform:3"];

fn inacc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inacc"))
        .args(args)
        .env_remove("INACC_SEED")
        .output()
        .expect("spawn inacc")
}

fn schema() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Run, require exit 0 and a report that validates against the schema.
fn report(args: &[&str]) -> Value {
    let out = inacc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}\n{v}");
    v
}

fn with(base: &[&'static str], extra: &[&'static str]) -> Vec<&'static str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn every_subcommand_validates() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["partitions", "--n", "4"],
        vec!["partitions", "--n", "5", "--count"],
        with(&["posterior"], &[&WORKED[..], &["--partition", "{1,2}|{3}"]].concat()),
        with(&["blindspot"], &WORKED),
        with(&["blindspot", "--pstar", "0.4,0.4,0.2", "--p", "uniform:3"], &[]),
        with(&["construct"], &WORKED),
        with(&["construct", "--detail"], &WORKED),
        with(&["verify", "--d=1,-2,0.5", "--detail"], &WORKED),
        with(&["degree", "--d=1,-2,0.5", "--detail"], &WORKED),
        with(&["degree", "--f1", "1,0,0", "--f2", "0,1,0"], &WORKED),
        with(&["spectrum", "--seed", "3"], &WORKED),
        with(&["realize", "--k", "2"], &WORKED),
        with(&["monotonicity", "--d=-1,2,3"], &WORKED),
        with(&["certificate"], &WORKED),
        vec!["sweep", "--n", "4", "--samples", "20", "--seed", "5"],
    ];
    for args in cases {
        let v = report(&args);
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn documented_examples() {
    let v = report(&[
        "blindspot",
        "--pstar",
        "0.5,0.3,0.2",
        "--p",
        "0.333333,0.333333,0.333334",
    ]);
    assert_eq!(v["member"], true);
    assert_eq!(report(&["partitions", "--n", "4", "--count"])["count"], 13);
    let v = report(&with(&["construct", "--eps-frac", "0.5"], &WORKED));
    assert!((v["M"].as_f64().unwrap() - 0.048686).abs() <= 1e-5);
    assert!((v["delta"].as_f64().unwrap() - 0.020274).abs() <= 1e-5);
    assert!((v["e_pstar_g"].as_f64().unwrap() - 0.068959).abs() <= 1e-5);
    assert!((v["e_p"].as_f64().unwrap() + 0.129064).abs() <= 1e-5);
    assert_eq!(v["degree"], 3);
    assert_eq!(v["strong"], true);
}

#[test]
fn sweep_is_byte_identical_per_seed() {
    let args = ["sweep", "--n", "4", "--samples", "200", "--seed", "17"];
    let a = inacc(&args);
    let b = inacc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = inacc(&["sweep", "--n", "4", "--samples", "200", "--seed", "18"]);
    assert_ne!(a.stdout, other.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["theorem_violations"], 0);
    let total: u64 = v["degree_histogram"]
        .as_object()
        .unwrap()
        .values()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(total, 200);
}

#[test]
fn seed_comes_from_environment_unless_flag_given() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_inacc"));
        cmd.args(["sweep", "--n", "3", "--samples", "5"])
            .env_remove("INACC_SEED");
        if let Some(s) = env {
            cmd.env("INACC_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("99"), None), 99);
    assert_eq!(run(Some("99"), Some("7")), 7);
}

#[test]
fn exit_codes_and_offending_flag() {
    let code = |args: &[&str]| inacc(args).status.code().unwrap();
    assert_eq!(code(&with(&["blindspot"], &WORKED)), 0);
    // Not in the blind spot: domain error.
    assert_eq!(code(&["construct", "--pstar", "0.4,0.4,0.2", "--p", "uniform:3"]), 1);
    assert_eq!(code(&["construct", "--pstar", "0.5,0.3", "--p", "uniform:3"]), 1);
    assert_eq!(code(&["sweep", "--n", "11", "--samples", "1"]), 1);
    assert_eq!(code(&["frobnicate"]), 2);

    let out = inacc(&["blindspot", "--pstar", "0.5,abc,0.2", "--p", "uniform:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--pstar"));

    let out = inacc(&with(&["verify", "--d", "1,2,3", "--f1", "1,2,3"], &WORKED));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--d"));

    let out = inacc(&["partitions", "--n", "4", "--max-n", "15"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--max-n"));
    assert_eq!(
        code(&[
            "partitions",
            "--n",
            "4",
            "--count",
            "--max-n",
            "15",
            "--accept-long-runtime"
        ]),
        0
    );

    let out = inacc(&with(&["blindspot", "--format", "csv"], &WORKED));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--format"));
}

#[test]
fn csv_export_has_documented_columns() {
    let out = inacc(&with(&["construct", "--format", "csv"], &WORKED));
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["rgs", "block_count", "expectation", "in_inaccessible_set"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows
        .iter()
        .all(|r| &r[3] == "true" && r[2].parse::<f64>().unwrap() < 0.0));
    assert_eq!(&rows[0][0], "0,0,1");
}

#[test]
fn context_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ctx.json");
    std::fs::write(
        &path,
        r#"{"n": 3, "p_star": [0.5, 0.3, 0.2], "p": [0.25, 0.25, 0.5], "f1": [1, 0, 0], "f2": [0, 0.5, 1]}"#,
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let from_file = report(&["verify", "--context", path]);
    let from_flags = report(&[
        "verify",
        "--pstar",
        "0.5,0.3,0.2",
        "--p",
        "0.25,0.25,0.5",
        "--d=1,-0.5,-1",
    ]);
    assert_eq!(from_file, from_flags);

    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"n": 4, "p_star": [0.5, 0.3, 0.2], "p": [0.3, 0.3, 0.4], "d": [1, 0, -1]}"#,
    )
    .unwrap();
    let bad = dir.path().join("bad.json");
    assert_eq!(
        inacc(&["verify", "--context", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        inacc(&["verify", "--context", "/nonexistent.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn parallel_scan_agrees_and_is_flagged() {
    let base = [
        "verify",
        "--pstar",
        "0.3,0.1,0.25,0.05,0.2,0.1",
        "--p",
        "uniform:6",
        "--d=1,-0.5,0.2,-1,0.3,0",
    ];
    let single = report(&base);
    let par = report(&with(&base, &["--parallel", "4"]));
    assert_eq!(single["tolerance_deterministic"], false);
    assert_eq!(par["tolerance_deterministic"], true);
    for key in ["degree", "partition_count", "strong", "inaccessible"] {
        assert_eq!(single[key], par[key]);
    }
    let gap =
        single["max_posterior_expectation"].as_f64().unwrap() - par["max_posterior_expectation"].as_f64().unwrap();
    assert!(gap.abs() <= 1e-9);
}

#[test]
fn table_format_is_readable() {
    let out = inacc(&with(&["construct", "--format", "table", "--detail"], &WORKED));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("degree") && l.trim_end().ends_with('3')));
    assert!(text.contains("{1,2}|{3}"));
}

#[test]
fn schema_rejects_drifted_reports() {
    let validator = schema();
    let good = report(&with(&["construct"], &WORKED));
    assert!(validator.is_valid(&good));
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("degree");
    assert!(!validator.is_valid(&missing));
    let mut extra = good.clone();
    extra["surprise"] = Value::Bool(true);
    assert!(!validator.is_valid(&extra));
    let mut unknown = good;
    unknown["command"] = Value::from("teleport");
    assert!(!validator.is_valid(&unknown));
}
