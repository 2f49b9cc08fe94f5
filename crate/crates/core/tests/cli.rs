use std::path::Path;
use std::process::{Command, Output};

fn symscheme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symscheme"))
        .args(args)
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
fn run_prints_csv_with_header() {
    let o = symscheme(&["run", "--example", "1", "--intervals", "10,100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scheme,h,N,max_error,endpoint_error,order"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("invariant,2.00000e-1,11,"), "{}", rows[0]);
    // Six significant digits in scientific notation.
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields.len(), 6);
    for f in [fields[1], fields[3], fields[4], fields[5]] {
        let (mantissa, _) = f.split_once('e').unwrap();
        assert_eq!(mantissa.trim_start_matches('-').len(), 7, "{f}");
    }
}

#[test]
fn json_report_has_the_documented_fields() {
    let o = symscheme(&["--json", "run", "--example", "5", "--h", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["example", "scheme", "rows", "flags", "meta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["example"], "example5");
    let row = &v["rows"][0];
    for key in ["scheme", "h", "N", "max_error", "endpoint_error", "order"] {
        assert!(row.get(key).is_some(), "row missing {key}");
    }
    assert!(v["meta"].get("reference_tol").is_some());
}

#[test]
fn convergence_reports_orders() {
    let o = symscheme(&["convergence", "--example", "1", "--scheme", "invariant", "--intervals", "10,100,1000"]);
    assert_eq!(o.status.code(), Some(0));
    let err = stderr(&o);
    let line = err.lines().find(|l| l.starts_with("invariant orders")).expect("orders line");
    let orders: Vec<f64> = line
        .split(':')
        .nth(1)
        .unwrap()
        .split(',')
        .map(|p| p.trim().parse().unwrap())
        .collect();
    assert_eq!(orders.len(), 2);
    assert!(orders.iter().all(|p| (p - 2.0).abs() < 0.3), "{orders:?}");
}

#[test]
fn out_dir_gets_tables_and_one_plot_file_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = symscheme(&["run", "--example", "5", "--h", "0.1,0.05", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.ends_with(".xy")).count(), 4, "{names:?}");
    assert!(names.iter().any(|n| n.ends_with(".csv")));
    assert!(names.iter().any(|n| n.ends_with(".json")));
    let xy = names.iter().find(|n| n.ends_with(".xy")).unwrap();
    let body = std::fs::read_to_string(dir.path().join(xy)).unwrap();
    let first_data = body.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(first_data.split_whitespace().count(), 2);
}

#[test]
fn singularity_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = symscheme(&["singularity", "--h", "0.1,0.01", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(Path::new(out).join("singularity.json").exists());
    let xy = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "xy"))
        .count();
    assert_eq!(xy, 4);
    assert!(stdout(&o).contains("reference stops at"));
}

#[test]
fn unwritable_output_names_the_path_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("occupied");
    std::fs::write(&blocker, "not a directory").unwrap();
    let target = blocker.join("sub");
    let o = symscheme(&["run", "--example", "1", "--intervals", "10", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("occupied"), "{}", stderr(&o));
}

#[test]
fn spec_errors_exit_2() {
    let bad_h = symscheme(&["run", "--example", "1", "--h", "-0.1"]);
    assert_eq!(bad_h.status.code(), Some(2), "{}", stderr(&bad_h));
    let bad_interval = symscheme(&["run", "--example", "2", "--interval", "1,2,3"]);
    assert_eq!(bad_interval.status.code(), Some(2));
    let one_row = symscheme(&["convergence", "--example", "1", "--intervals", "10"]);
    assert_eq!(one_row.status.code(), Some(2));
    let unknown_example = symscheme(&["run", "--example", "9"]);
    assert_eq!(unknown_example.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // The arctan chart runs out before x = 30, so the mesh stops advancing.
    let o = symscheme(&["run", "--example", "3", "--h", "0.1", "--interval", "0,30"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("h = 0.1"));
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "run", "--example", "2", "--h", "1,0.1"];
    let a = symscheme(&args);
    let b = symscheme(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
