use std::path::Path;
use std::process::{Command, Output};

fn trirec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trirec"))
        .args(args)
        .output()
        .expect("run trirec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn scan_writes_fixed_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = trirec(&[
        "scan",
        "--model",
        "dho",
        "--kappa",
        "0.7",
        "--x-min",
        "-1",
        "--x-max",
        "6",
        "--points",
        "4000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,F,status,branch_id"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 4000);
    // F changes sign near each x_l = l - 0.49
    for l in 0..7 {
        let xl = l as f64 - 0.49;
        let crossing = rows.windows(2).any(|w| {
            let (x0, x1): (f64, f64) = (w[0][0].parse().unwrap(), w[1][0].parse().unwrap());
            let (f0, f1): (f64, f64) = (w[0][1].parse().unwrap(), w[1][1].parse().unwrap());
            x0 <= xl && xl <= x1 && f0 > 0.0 && f1 < 0.0
        });
        assert!(crossing, "no crossing at {xl}");
    }
    // 17 significant digits
    let mantissa = rows[1][0].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = trirec(&[
            "flow",
            "--model",
            "rabi-parity",
            "--kappa",
            "0.7",
            "--sweep",
            "delta:0:0.4:5",
            "--x-min",
            "-1",
            "--x-max",
            "2",
            "--points",
            "1000",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(&p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn roots_json_has_quoted_levels() {
    let o = trirec(&[
        "roots",
        "--model",
        "rabi-parity",
        "--parity",
        "both",
        "--kappa",
        "0.7",
        "--delta",
        "0.4",
        "--x-min",
        "-1",
        "--x-max",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["model"], "rabi-parity");
    assert_eq!(v["params"]["kappa"], 0.7);
    let roots = v["roots"].as_array().unwrap();
    let has = |e: f64, parity: i64| {
        roots.iter().any(|r| {
            (r["energy"].as_f64().unwrap() - e).abs() < 1e-5 && r["parity"].as_i64() == Some(parity)
        })
    };
    assert!(has(-0.707805, -1));
    assert!(has(-0.4270437, 1));
    for r in roots {
        let b = r["bracket"].as_array().unwrap();
        let x = r["x"].as_f64().unwrap();
        assert!(b[0].as_f64().unwrap() <= x && x <= b[1].as_f64().unwrap());
        assert!(r["classification"] == "Zero" || r["classification"] == "PoleCrossing");
    }
}

#[test]
fn displaced_rabi_roots_carry_no_parity() {
    let o = trirec(&[
        "roots", "--model", "rabi", "--kappa", "0.7", "--delta", "0.4", "--x-min", "-1", "--x-max",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x,energy,parity,residual,bracket_lo,bracket_hi,classification\n"));
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(2) == Some("none")));
}

#[test]
fn flow_csv_schema() {
    let o = trirec(&[
        "flow",
        "--model",
        "rabi-parity",
        "--kappa",
        "0.7",
        "--sweep",
        "delta:0:1:6",
        "--x-min",
        "-1",
        "--x-max",
        "4",
        "--points",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("sweep_value,track_id,x_root,energy,parity,residual")
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 6);
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert!(first[4] == "+1" || first[4] == "-1");
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        vec!["roots", "--model", "spin-glass", "--kappa", "0.7"],
        vec!["roots", "--model", "dho"],
        vec!["roots", "--model", "dho", "--kappa", "0.7", "--points", "8"],
        vec![
            "roots", "--model", "dho", "--kappa", "0.7", "--x-min", "2", "--x-max", "1",
        ],
        vec!["roots", "--model", "dho", "--kappa", "0"],
        vec![
            "roots",
            "--model",
            "rabi-parity",
            "--kappa",
            "0.7",
            "--parity",
            "up",
        ],
        vec![
            "flow",
            "--model",
            "rabi-parity",
            "--kappa",
            "0.7",
            "--sweep",
            "omega:0:1:3",
        ],
        vec![
            "flow",
            "--model",
            "dho",
            "--kappa",
            "0.7",
            "--sweep",
            "delta:0:1:3",
        ],
        vec!["roots", "--model", "gen-rabi", "--kappa", "0.7"],
        vec!["scan", "--model", "rabi-modified", "--kappa", "0.7"],
        vec!["roots", "--model", "jc", "--kappa", "0.7"],
        vec!["frobnicate"],
    ] {
        let o = trirec(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn validate_reports_and_exits_zero() {
    for args in [
        vec!["validate", "--model", "dho", "--kappa", "0.7"],
        vec![
            "validate",
            "--model",
            "rabi-parity",
            "--kappa",
            "0.7",
            "--delta",
            "0.4",
            "--x-max",
            "3",
        ],
        vec![
            "validate", "--model", "jc", "--kappa", "0.25", "--delta", "0.65",
        ],
        vec![
            "validate", "--model", "gen-rabi", "--kappa", "0.7", "--delta", "0.4",
        ],
        vec![
            "validate",
            "--model",
            "rabi-modified",
            "--kappa",
            "0.3",
            "--delta",
            "1.0",
        ],
    ] {
        let o = trirec(&args);
        let text = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{text}");
        assert!(
            text.lines()
                .all(|l| l.starts_with("PASS ") || l.ends_with("0 failed")),
            "{text}"
        );
    }
}

#[test]
fn validate_exit_4_on_failure() {
    // too few terms for the series to converge
    let o = trirec(&[
        "validate",
        "--model",
        "dho",
        "--kappa",
        "0.7",
        "--max-terms",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL "));
}

#[test]
fn writes_to_missing_directory_fail_numerically() {
    let o = trirec(&[
        "roots",
        "--model",
        "dho",
        "--kappa",
        "0.7",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert!(!Path::new("/nonexistent-dir/x.csv").exists());
    assert_eq!(o.status.code(), Some(3));
}
