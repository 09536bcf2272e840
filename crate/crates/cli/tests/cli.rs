use std::path::Path;
use std::process::{Command, Output};

fn qasym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qasym"))
        .args(args)
        .env_remove("QASYM_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn partition_exact_one_by_one() {
    let o = qasym(&["partition", "exact", "--q", "0.5", "--N", "1", "--L", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5.656854249492380e0\n");
}

#[test]
fn partition_methods_agree_on_display() {
    let w = qasym(&["partition", "exact", "--N", "5", "--L", "1"]);
    let d = qasym(&["partition", "exact", "--N", "5", "--L", "1", "--method", "detS"]);
    let s = qasym(&["partition", "exact", "--N", "5", "--L", "1", "--method", "sumL1"]);
    assert_eq!(stdout(&w), stdout(&d));
    assert_eq!(stdout(&w), stdout(&s));
}

#[test]
fn sum_method_needs_single_row() {
    let o = qasym(&["partition", "exact", "--N", "3", "--L", "2", "--method", "sumL1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn theta_at_zero_prints_zero() {
    let o = qasym(&["theta", "--q", "0.5", "--z", "-0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0e0\n");
}

#[test]
fn theta_value() {
    // Θ(1) = Σ q^{k²} at q = 1/2, summed in f64
    let expect: f64 = (-30i32..=30).map(|k| 0.5f64.powi(k * k)).sum();
    let o = qasym(&["theta", "--q", "0.5", "--z", "1"]);
    let got: f64 = stdout(&o).trim().parse().unwrap();
    assert!((got - expect).abs() < 1e-14);
}

#[test]
fn rounded_product_tables() {
    let o = qasym(&["poly", "zeros", "--family", "qlaguerre", "--n", "20", "--alpha", "0.4", "--q", "0.6", "--paper-table"]);
    assert_eq!(stdout(&o), "0.45,0.725,0.852,0.917,0.952,0.972,0.983,0.989,0.993,0.994\n");
    let o = qasym(&["poly", "zeros", "--family", "qlaguerre", "--n", "25", "--alpha", "0.7", "--q", "0.5", "--paper-table"]);
    assert_eq!(stdout(&o), "0.658,0.861,0.937,0.97,0.985,0.993,0.996,0.998,0.999,1.,1.,1.\n");
}

#[test]
fn sw_product_table_is_all_ones() {
    let o = qasym(&["poly", "zeros", "--family", "sw", "--n", "7", "--paper-table"]);
    assert_eq!(stdout(&o), "1.,1.,1.\n");
}

#[test]
fn zeros_csv_schema() {
    let o = qasym(&["poly", "zeros", "--family", "sw", "--n", "4"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# qasym "));
    assert_eq!(lines[1], "k,x_k,x_{n+1-k},normalized_product");
    assert_eq!(lines.len(), 4);
}

#[test]
fn poly_eval_examples() {
    // S_1(x) = x − q^{−3/2}
    let o = qasym(&["poly", "eval", "--family", "sw", "--n", "1", "--x", "0", "--q", "0.5"]);
    assert_eq!(stdout(&o), "-2.828427124746190e0\n");
    // L_1^{(0)}(x; 1/2) = 1 − x
    let o = qasym(&["poly", "eval", "--family", "qlaguerre", "--n", "1", "--x", "3"]);
    assert_eq!(stdout(&o), "-2.000000000000000e0\n");
    // h_2(x) = 4x² + 2 − (1+q)/q
    let o = qasym(&["poly", "eval", "--family", "qhermite", "--n", "2", "--x", "0.3"]);
    assert_eq!(stdout(&o), "-6.400000000000000e-1\n");
    let o = qasym(&["poly", "eval", "--family", "qhermite", "--n", "2", "--x", "0.3", "--j", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn asym_check_reports_bound() {
    let o = qasym(&["asym", "check", "--family", "sw", "--n", "20", "--j", "1", "--regime", "osc", "--l", "0.5", "--y", "-1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("within    true"));
    let o = qasym(&["asym", "check", "--family", "sw", "--n", "20", "--regime", "left", "--t", "-1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qasym(&["asym", "check", "--family", "sw", "--n", "20", "--regime", "osc", "--y", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_with_single_line() {
    for args in [
        vec!["theta", "--q", "1.5", "--z", "1"],
        vec!["theta", "--q", "0.5x", "--z", "1"],
        vec!["theta", "--z", "0"],
        vec!["frobnicate"],
        vec!["partition", "exact", "--N", "2"],
        vec!["partition", "converge", "--L", "1", "--N-from", "5", "--N-to", "2"],
        vec!["selftest", "--instances", "5"],
        vec!["theta", "--z", "1", "--precision-bits", "32"],
    ] {
        let o = qasym(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn numerical_failure_exits_two() {
    let o = qasym(&["theta", "--q", "0.99999", "--z", "1e300"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let o = qasym(&[
            "partition", "converge", "--L", "2", "--N-from", "2", "--N-to", "9", "--jobs", jobs, "--output",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.dat")).unwrap(),
        std::fs::read(dir.path().join("b.dat")).unwrap()
    );
    let head = first_line(&a);
    assert!(head.starts_with("# qasym "));
    for field in ["partition converge", "q=0.5", "precision_bits=256", "tail_tol=1e-40", "L=2"] {
        assert!(head.contains(field), "{head}");
    }
    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "N,parity,scaled_exact,predicted,ratio,abs_err");
    assert_eq!(csv.lines().count(), 2 + 8);
    let dat = std::fs::read_to_string(dir.path().join("a.dat")).unwrap();
    assert!(dat.starts_with("# qasym "));
    assert!(dat.contains("# parity=even") && dat.contains("# parity=odd"));
}

#[test]
fn text_file_gets_config_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.txt");
    let o = qasym(&["partition", "exact", "--N", "1", "--L", "1", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# qasym "));
    assert_eq!(lines[1], "5.656854249492380e0");
}

#[test]
fn json_mirrors_rows() {
    let o = qasym(&["partition", "converge", "--L", "1", "--N-from", "3", "--N-to", "6", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["config"]["subcommand"], "partition converge");
    assert_eq!(doc["config"]["q"], "0.5");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["N"], "3");
    assert_eq!(rows[0]["parity"], "odd");
}

#[test]
fn precision_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qasym"));
        c.args(["theta", "--z", "2", "--format", "csv"]).args(extra);
        match env {
            Some(v) => c.env("QASYM_PRECISION_BITS", v),
            None => c.env_remove("QASYM_PRECISION_BITS"),
        };
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert!(run(None, &[]).contains("precision_bits=256"));
    assert!(run(Some("128"), &[]).contains("precision_bits=128"));
    assert!(run(Some("128"), &["--precision-bits", "192"]).contains("precision_bits=192"));
}

#[test]
fn selftest_passes() {
    let o = qasym(&["selftest", "--instances", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 6);
    assert!(text.contains("selftest: 6/6 identities passed"));
}
