use std::process::{Command, Output};

fn qorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qorder"))
        .args(args)
        .env_remove("QORDER_MAX_SUBDIV")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn commutator_in_coordinate_convention() {
    let o = qorder(&["normal-order", "p * x", "--rep", "coordinate"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x * p - i * hbar\n");
}

#[test]
fn two_sided_sum_halved() {
    let o = qorder(&[
        "normal-order",
        "x^a * p * x^(1-a-g) * p * x^g + x^g * p * x^(1-a-g) * p * x^a",
        "--rep",
        "coordinate",
        "--hermitize-scale",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "x * p^2 - i * hbar * p + a * g * hbar^2 * x^-1\n"
    );
}

#[test]
fn symbolic_moving_power_exits_3() {
    let o = qorder(&["normal-order", "x^q * p", "--rep", "momentum"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cannot normal-order symbolic power of the moving operator"));
}

#[test]
fn parse_error_exits_2_with_caret() {
    let o = qorder(&["normal-order", "x p"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("implicit multiplication"), "{err}");
    assert!(err.contains('^'));
    assert!(stdout(&o).is_empty());
}

#[test]
fn normal_order_json_reports_ambiguity() {
    let o = qorder(&[
        "normal-order",
        "x^a * p * x^(1-a-g) * p * x^g",
        "--hermitize",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ambiguous"], true);
    assert_eq!(v["surviving_terms"].as_array().unwrap().len(), 1);
    assert_eq!(v["surviving_terms"][0]["word"], "x^-1");
}

#[test]
fn verify_weyl_passes() {
    let o = qorder(&["verify", "--identity", "eq19"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("eq19: PASS"));
}

#[test]
fn verify_integral_prints_residual() {
    let o = qorder(&["verify", "--identity", "eq11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max residual"));
}

#[test]
fn verify_all_json() {
    let o = qorder(&["verify", "--identity", "all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 6);
    assert!(items
        .iter()
        .all(|i| i["pass"] == true && i["id"].is_string() && i["detail"].is_string()));
}

#[test]
fn verify_unknown_identity_exits_2() {
    assert_eq!(
        qorder(&["verify", "--identity", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn solve_grid_ratio_is_constant_away_from_origin() {
    let o = qorder(&[
        "solve", "--E", "1", "--hbar", "1", "--x-grid", "0:4:17", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        [
            "x",
            "re",
            "im",
            "j0_target",
            "ratio_re",
            "ratio_im",
            "abs_error",
            "converged"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 17);
    let ratio = |r: &csv::StringRecord| r[5].parse::<f64>().unwrap();
    let reference = ratio(&rows[1]);
    // x = 0 sits on the jump of the transform and carries half the ratio
    for r in &rows[1..] {
        let j0: f64 = r[3].parse().unwrap();
        if j0.abs() > 1e-3 {
            assert!(
                (ratio(r) - reference).abs() <= 1e-4 * reference.abs(),
                "{r:?}"
            );
        }
    }
    assert!((ratio(&rows[0]) - reference / 2.0).abs() <= 1e-4 * reference.abs());
}

#[test]
fn solve_single_point_at_origin() {
    let o = qorder(&["solve", "--E", "1", "--hbar", "1", "--x-grid", "0:0:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].split(',').nth(3), Some("1"));
}

#[test]
fn solve_rejects_nonpositive_energy() {
    let o = qorder(&["solve", "--E", "-1", "--hbar", "1", "--x-grid", "0:1:2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("E must be positive"));
}

#[test]
fn solve_flags_non_convergence_and_keeps_rows() {
    let path = std::env::temp_dir().join(format!("qorder-partial-{}.csv", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_qorder"))
        .args([
            "solve",
            "--E",
            "1",
            "--x-grid",
            "0:1:3",
            "--out",
            path.to_str().unwrap(),
        ])
        .env("QORDER_MAX_SUBDIV", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",false")));
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "solve", "--E", "2", "--hbar", "0.5", "--x-grid", "0.1:3:7", "--format", "json",
    ];
    assert_eq!(qorder(&args).stdout, qorder(&args).stdout);
    let args = ["order-scan", "--alpha-gamma", "0.0625", "--format", "csv"];
    assert_eq!(qorder(&args).stdout, qorder(&args).stdout);
}

#[test]
fn order_scan_fits_derived_index() {
    let o = qorder(&[
        "order-scan",
        "--alpha-gamma",
        "0,0.0625,0.25",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let fitted: Vec<f64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["fitted_order"].as_f64().unwrap())
        .collect();
    for (got, want) in fitted.iter().zip([0.0, 0.5, 1.0]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    assert!(v[1]["printed_residual"].as_f64().unwrap() > 1e-2);
}

#[test]
fn order_scan_out_of_range_exits_2() {
    assert_eq!(
        qorder(&["order-scan", "--alpha-gamma", "1.5"])
            .status
            .code(),
        Some(2)
    );
}
