use std::process::{Command, Output};

use serde_json::Value;

fn qdecay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdecay"))
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

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

/// JSON scalar as it would appear in a CSV cell.
fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                i.to_string()
            } else {
                format!("{:.16e}", n.as_f64().unwrap())
            }
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn extract_geometric_csv() {
    let out = qdecay(&[
        "extract",
        "--function",
        "geometric:2",
        "--radius",
        "0.5",
        "--max-n",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        [
            "n",
            "re",
            "im",
            "abs",
            "aliasing_bound",
            "rounding_slack",
            "log_n",
            "log_abs"
        ]
    );
    assert_eq!(rows.len(), 9);
    let abs3: f64 = rows[3][3].parse().unwrap();
    assert!((abs3 - 0.125).abs() < 1e-12);
    assert_eq!(rows[0][6], "-inf");
    let log_abs: f64 = rows[3][7].parse().unwrap();
    assert!((log_abs - 0.125f64.ln()).abs() < 1e-10);
}

#[test]
fn tau_rows_are_exact_strings() {
    let out = qdecay(&["tau", "--max-n", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["n", "tau"]);
    let expected = [
        ("1", "1"),
        ("2", "-24"),
        ("3", "252"),
        ("4", "-1472"),
        ("5", "4830"),
    ];
    for (row, (n, t)) in rows.iter().zip(expected) {
        assert_eq!((row[0].as_str(), row[1].as_str()), (n, t));
    }
    let json: Value = serde_json::from_str(&stdout(&qdecay(&["tau", "--max-n", "40"]))).unwrap();
    // Independent product expansion.
    assert_eq!(json["rows"][39]["tau"], "408038400");
}

#[test]
fn guard_exit_codes() {
    let ok = qdecay(&[
        "extract",
        "--function",
        "geometric:2",
        "--radius",
        "1.0",
        "--max-n",
        "8",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let delta = qdecay(&[
        "extract",
        "--function",
        "eta24-delta",
        "--radius",
        "1.0",
        "--max-n",
        "8",
    ]);
    assert_eq!(delta.status.code(), Some(2));
    assert!(stderr(&delta).contains("analytic"), "{}", stderr(&delta));
    let amp = qdecay(&[
        "extract",
        "--function",
        "monomial:1",
        "--radius",
        "0.1",
        "--max-n",
        "13",
    ]);
    assert_eq!(amp.status.code(), Some(2));
    let low = qdecay(&[
        "extract",
        "--function",
        "delta",
        "--height",
        "0.005",
        "--max-n",
        "2",
    ]);
    assert_eq!(low.status.code(), Some(2));
    let outside = qdecay(&[
        "extract",
        "--function",
        "geometric:2",
        "--radius",
        "2.5",
        "--max-n",
        "2",
    ]);
    assert_eq!(outside.status.code(), Some(1));
}

#[test]
fn validation_exit_codes() {
    for args in [
        &[
            "extract",
            "--function",
            "bessel:1",
            "--radius",
            "0.5",
            "--max-n",
            "4",
        ][..],
        &[
            "extract",
            "--function",
            "geometric:2",
            "--radius",
            "0.5",
            "--height",
            "0.1",
            "--max-n",
            "4",
        ],
        &["extract", "--function", "geometric:2", "--max-n", "4"],
        &[
            "extract",
            "--function",
            "geometric:2",
            "--radius",
            "0.5",
            "--max-n",
            "8",
            "--samples",
            "8",
        ],
        &[
            "extract",
            "--function",
            "geometric:2",
            "--height",
            "0.1",
            "--max-n",
            "4",
        ],
        &[
            "extract",
            "--function",
            "geometric:2",
            "--radius",
            "0.5",
            "--max-n",
            "4",
            "--samples",
            "12",
            "--precision",
            "extended",
        ],
        &["rp-compare", "--max-n", "50"],
        &["decay", "--function", "monomial:1", "--max-n", "20"],
        &["frobnicate"],
    ] {
        let out = qdecay(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
    assert!(stderr(&qdecay(&[
        "extract",
        "--function",
        "bessel:1",
        "--radius",
        "0.5",
        "--max-n",
        "4"
    ]))
    .contains("unknown function selector"));
    assert_eq!(qdecay(&["--help"]).status.code(), Some(0));
    assert_eq!(qdecay(&["--version"]).status.code(), Some(0));
}

#[test]
fn json_and_csv_encode_identical_numbers() {
    let base = [
        "extract",
        "--function",
        "q-geometric:2",
        "--height",
        "0.1",
        "--max-n",
        "12",
    ];
    let json: Value = serde_json::from_str(&stdout(&qdecay(&base))).unwrap();
    let csv_out = qdecay(&[&base[..], &["--format", "csv"]].concat());
    let (header, rows) = csv_rows(&stdout(&csv_out));
    let json_rows = json["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), rows.len());
    for (j, c) in json_rows.iter().zip(&rows) {
        for (k, name) in header.iter().enumerate() {
            assert_eq!(cell(&j[name]), c[k], "{name}");
        }
    }

    let json: Value =
        serde_json::from_str(&stdout(&qdecay(&["rp-compare", "--max-n", "120"]))).unwrap();
    let (header, rows) = csv_rows(&stdout(&qdecay(&[
        "rp-compare",
        "--max-n",
        "120",
        "--format",
        "csv",
    ])));
    for (j, c) in json["rows"].as_array().unwrap().iter().zip(&rows) {
        for (k, name) in header.iter().enumerate() {
            assert_eq!(cell(&j[name]), c[k], "{name}");
        }
    }
}

#[test]
fn decay_report_fields() {
    let out = qdecay(&[
        "decay",
        "--function",
        "q-geometric:2",
        "--min-n",
        "5",
        "--max-n",
        "200",
        "--m",
        "1,2,4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["model"]["kind"], "exponential");
    let rate = json["model"]["rate"].as_f64().unwrap();
    assert!((rate - 2f64.ln()).abs() < 1e-9);
    assert_eq!(json["fit_range"], serde_json::json!([5, 200]));
    assert_eq!(json["constants"].as_array().unwrap().len(), 3);

    let tau = qdecay(&[
        "decay",
        "--function",
        "delta",
        "--max-n",
        "2000",
        "--envelope",
        "--format",
        "csv",
        "--m",
        "1",
    ]);
    let (header, rows) = csv_rows(&stdout(&tau));
    assert_eq!(header, ["field", "value"]);
    let get = |k: &str| {
        rows.iter()
            .find(|r| r[0] == k)
            .map(|r| r[1].clone())
            .unwrap()
    };
    assert_eq!(get("model.kind"), "polynomial");
    assert_eq!(get("model.trend"), "growth");
    let exponent: f64 = get("model.exponent").parse().unwrap();
    assert!((5.0..=6.0).contains(&-exponent));
    assert_eq!(get("target"), "running-max");
    assert!(rows.iter().any(|r| r[0] == "raw_polynomial_fit.slope"));
}

#[test]
fn delta_sweep_and_rp_compare() {
    let out = qdecay(&[
        "delta-sweep",
        "--function",
        "q-monomial:1",
        "--max-n",
        "6",
        "--m",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["deltas"].as_array().unwrap().len(), 9);
    let first = json["min_implied"][0].as_f64().unwrap();
    assert!((first - 1.0).abs() < 1e-12);
    let csv_out = qdecay(&[
        "delta-sweep",
        "--function",
        "geometric:2",
        "--max-n",
        "5",
        "--deltas",
        "0.2,0.5",
        "--format",
        "csv",
    ]);
    let (header, rows) = csv_rows(&stdout(&csv_out));
    assert_eq!(
        header,
        [
            "n",
            "delta",
            "a_m",
            "rescaled",
            "implied",
            "min_implied",
            "best_delta"
        ]
    );
    assert_eq!(rows.len(), 10);

    let rp: Value =
        serde_json::from_str(&stdout(&qdecay(&["rp-compare", "--max-n", "2000"]))).unwrap();
    assert_eq!(rp["deligne_violations"].as_array().unwrap().len(), 0);
    assert!(rp["max_deligne_ratio"].as_f64().unwrap() <= 1.0);
    let ratio2 = rp["rows"][1]["ratio"].as_f64().unwrap();
    assert!((ratio2 - 0.5303).abs() < 1e-4);
}

#[test]
fn verify_passes_and_fault_injection_flips_it() {
    let out = qdecay(&["verify", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["suites"].as_array().unwrap().len(), 6);

    let faulty = qdecay(&["verify", "--seed", "7", "--inject-fault"]);
    assert_eq!(faulty.status.code(), Some(3));
    let json: Value = serde_json::from_str(&stdout(&faulty)).unwrap();
    assert_eq!(json["passed"], false);
    assert!(stderr(&faulty).contains("verification failed"));
    assert!(!stdout(&qdecay(&["verify", "--help"])).contains("inject-fault"));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let a = stdout(&qdecay(&["verify", "--seed", "3", "--format", "csv"]));
    let b = stdout(&qdecay(&["verify", "--seed", "3", "--format", "csv"]));
    assert_eq!(a, b);

    let dir = std::env::temp_dir().join(format!("qdecay-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tau.json");
    let out = qdecay(&["tau", "--max-n", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["rows"][2]["tau"], "252");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qdecay"))
            .args([
                "delta-sweep",
                "--function",
                "eta24-delta",
                "--max-n",
                "20",
                "--format",
                "csv",
            ])
            .env("QDECAY_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let two = run("2");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn extended_precision_extraction() {
    let out = qdecay(&[
        "extract",
        "--function",
        "polynomial:1,2,3",
        "--radius",
        "0.1",
        "--max-n",
        "20",
        "--samples",
        "64",
        "--precision",
        "extended",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["precision"], "extended");
    assert_eq!(json["rows"][2]["re"].as_f64(), Some(3.0));
    assert!(json["rows"][20]["abs"].as_f64().unwrap() < 1e-250);
    let strip = qdecay(&[
        "extract",
        "--function",
        "delta",
        "--height",
        "0.5",
        "--max-n",
        "4",
        "--samples",
        "64",
        "--precision",
        "extended",
    ]);
    let json: Value = serde_json::from_str(&stdout(&strip)).unwrap();
    assert_eq!(json["rows"][0]["n"], 1);
    assert!((json["rows"][1]["re"].as_f64().unwrap() + 24.0).abs() < 1e-9);
}
