use std::process::{Command, Output};

use compact_fem::{convergence_order, parse_csv, CSV_HEADER};

fn cfem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfem")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TABLE_1: [&str; 9] =
    ["study", "--problem", "poisson", "--k1-pi", "5", "--method", "compact", "--levels", "8,16,32,64,128,256,512,1024"];

#[test]
fn study_table_one_is_third_order() {
    let o = cfem(&TABLE_1);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows[0].l2_order.is_none());
    for r in rows.iter().filter(|r| r.n >= 64) {
        assert!((r.l2_order.unwrap() - 3.0).abs() < 0.1, "{r:?}");
        assert!((r.h1_order.unwrap() - 2.0).abs() < 0.1, "{r:?}");
    }
}

#[test]
fn study_output_is_byte_identical_across_runs() {
    let a = cfem(&TABLE_1);
    let b = cfem(&TABLE_1);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_round_trip_reproduces_orders() {
    let rows = parse_csv(&stdout(&cfem(&TABLE_1))).unwrap();
    for p in rows.windows(2) {
        let l2 = convergence_order(p[0].l2_error, p[1].l2_error, p[0].n, p[1].n).unwrap();
        let h1 = convergence_order(p[0].h1_error, p[1].h1_error, p[0].n, p[1].n).unwrap();
        assert!((l2 - p[1].l2_order.unwrap()).abs() <= 0.006);
        assert!((h1 - p[1].h1_order.unwrap()).abs() <= 0.006);
    }
}

#[test]
fn markdown_and_out_file() {
    let path = std::env::temp_dir().join(format!("cfem-md-{}.md", std::process::id()));
    let o = cfem(&[
        "study", "--problem", "variable", "--k1-pi", "5", "--k2-pi", "5", "--levels", "8,16", "--format", "md", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let file = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(file, stdout(&o));
    assert!(file.contains("| N |"));
    assert!(file.lines().any(|l| l.starts_with("| 16 |")));
}

#[test]
fn posterior_on_variable_problem_is_numerical_failure() {
    let o = cfem(&["study", "--problem", "variable", "--k1-pi", "5", "--method", "posterior", "--levels", "8,16"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ConstantCoefficientRequired"));
}

#[test]
fn solve_writes_sample_rows() {
    let o = cfem(&["solve", "--problem", "poisson", "--k1-pi", "5", "--n", "32", "--samples", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,uh,duh,u,du");
    assert_eq!(lines.len(), 102);
    for l in &lines[1..] {
        let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(v.len(), 5);
        assert!((v[1] - v[3]).abs() < 1e-2);
    }
}

#[test]
fn solve_minimal_mesh_and_raw_wave_number() {
    let o = cfem(&["solve", "--problem", "variable", "--k1", "3.0", "--n", "2", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cfem(&["solve", "--problem", "helmholtz"]).status.code(), Some(1));
    assert_eq!(cfem(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cfem(&[]).status.code(), Some(1));
    assert_eq!(cfem(&["study", "--problem", "poisson", "--levels", "16,8"]).status.code(), Some(1));
    assert_eq!(cfem(&["study", "--problem", "poisson", "--levels", "8,16", "--k1", "1", "--k1-pi", "2"]).status.code(), Some(1));
    assert_eq!(cfem(&["solve", "--problem", "poisson", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = cfem(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("study"));
}

#[test]
fn list_names_catalog() {
    let o = cfem(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("poisson") && text.contains("Tables 1-2"));
    assert!(text.contains("variable") && text.contains("Tables 3-6"));
}
