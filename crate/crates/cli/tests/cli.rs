use std::f64::consts::PI;
use std::process::{Command, Output};

fn nleig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nleig"))
        .args(args)
        .env_remove("NE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn number(v: &serde_json::Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn lambda_examples() {
    let out = nleig(&["lambda", "--alpha", "0", "--q", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((number(&v, "lambda") - 2.4674).abs() < 1e-4);

    let v = json(&nleig(&["lambda", "--alpha", "10", "--q", "2"]));
    assert!((number(&v, "lambda") - PI * PI).abs() < 1e-3);
    assert_eq!(v["sign_class"], "sign_changing");

    let v = json(&nleig(&["lambda", "--alpha", "2", "--q", "2"]));
    assert!((number(&v, "lambda") - (0.25 * PI * PI + 2.0)).abs() < 1e-3);
}

#[test]
fn negative_coupling_is_accepted() {
    let out = nleig(&["lambda", "--alpha", "-3", "--q", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(number(&json(&out), "lambda") < 0.25 * PI * PI);
}

#[test]
fn hfun_on_the_q1_line() {
    let out = nleig(&["hfun", "--m", "0.5", "--q", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((number(&json(&out), "h") - PI).abs() < 1e-9);
}

#[test]
fn alpha_crit_at_q_two() {
    let out = nleig(&["alpha-crit", "--q", "2", "--tol", "1e-2"]);
    assert_eq!(out.status.code(), Some(0));
    let a = number(&json(&out), "alpha_q");
    assert!((a - 7.402).abs() < 1e-2 * 7.402, "{a}");
}

#[test]
fn invalid_arguments_exit_with_one() {
    assert_eq!(
        nleig(&["lambda", "--alpha", "1", "--q", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(nleig(&["lambda", "--q", "1.5"]).status.code(), Some(1));
    assert_eq!(
        nleig(&["hfun", "--m", "2", "--q", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        nleig(&["lambda", "--alpha", "1", "--q", "1.5", "--n", "10"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(nleig(&["frobnicate"]).status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_nleig"))
        .args(["lambda", "--alpha", "1", "--q", "1.5"])
        .env("NE_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn divergent_h_is_a_numerical_failure() {
    assert_eq!(
        nleig(&["hfun", "--m", "0", "--q", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("scan.csv");
    let out = nleig(&[
        "scan",
        "--alpha-count",
        "2",
        "--q-count",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn profile_writes_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = nleig(&[
        "profile",
        "--alpha",
        "10",
        "--q",
        "1.5",
        "--n",
        "500",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sign_class"], "sign_changing");
    assert_eq!(v["zeros"].as_array().unwrap().len(), 1);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,u"));
    assert_eq!(lines.count(), 500);
}

fn scan_rows(extra: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let mut args = vec!["scan", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = nleig(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::read_to_string(&path).unwrap()
}

#[test]
fn default_scan_has_63_monotone_rows() {
    let text = scan_rows(&[]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("alpha,q,lambda,sign_class,q_average,m_bar,odd_defect,residual,iterations")
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 63);
    for block in rows.chunks(21) {
        let q = &block[0][1];
        assert!(block.iter().all(|r| &r[1] == q));
        let lambdas: Vec<f64> = block.iter().map(|r| r[2].parse().unwrap()).collect();
        for w in lambdas.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "q = {q}: {} after {}", w[1], w[0]);
        }
    }
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[20][0], "10");
    assert_eq!(
        rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>()[42],
        "2"
    );
}

#[test]
fn scan_is_byte_identical_across_runs_and_jobs() {
    let a = scan_rows(&["--jobs", "1"]);
    let b = scan_rows(&["--jobs", "4"]);
    let c = scan_rows(&["--jobs", "4"]);
    assert_eq!(a, b);
    assert_eq!(b, c);
}

#[test]
fn scan_writes_to_stdout_without_path() {
    let out = nleig(&["scan", "--alpha-count", "2", "--q-count", "1", "--n", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}

#[test]
fn verify_subset_prints_table() {
    let out = nleig(&["verify", "--criterion", "2", "--criterion", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.lines().filter(|l| l.starts_with("PASS")).count() == 2,
        "{text}"
    );
    assert!(text.contains("2 of 2 criteria passed"));
}

#[test]
fn verify_failure_exits_with_three() {
    // on a coarse grid the discretization error exceeds the 1e-6 tolerance
    let out = nleig(&["verify", "--criterion", "7", "--n", "100"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL"));
}
