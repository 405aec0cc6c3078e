use std::fs;
use std::process::{Command, Output};

use wg_helmholtz::experiment::read_dump_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wg-helmholtz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn convergence_table_on_stdout() {
    let o = run(&["convergence", "--k", "1", "--mesh-seq", "2,4,8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h,errH1,ordH1,errL2,ordL2,nDof,solveSeconds"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "");
    // 6N² triangles plus 9N² + 3N edges at N = 2
    assert_eq!(rows[0][5], "66");
    let ord: f64 = rows[2][4].parse().unwrap();
    assert!((ord - 2.0).abs() < 0.1, "L2 order {ord}");
}

#[test]
fn config_file_with_overrides_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("table.csv");
    fs::write(&cfg, "[convergence]\ndomain = \"slit-disk\"\nkappa = 4.0\nxi = 1.5\nmesh_seq = [2, 4]\n").unwrap();
    let o = run(&["convergence", "--config", cfg.to_str().unwrap(), "--mesh-seq", "2,4,8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn pollution_and_trace() {
    let o = run(&["pollution", "--kh", "0.5", "--k-list", "2,4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("k,N,h,errH1\n"));
    assert!(text.contains("\n2,4,") && text.contains("\n4,8,"), "{text}");

    let o = run(&["trace", "--k", "3", "--mesh-seq", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("x,re_u0,re_exact\n"), "{text}");
    let xs: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(!xs.is_empty());
    assert!(xs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn solve_dumps_solution_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump.csv");
    let mat = dir.path().join("a.mtx");
    let o = run(&[
        "solve",
        "--k",
        "2",
        "--degree",
        "1",
        "--mesh-seq",
        "3",
        "--out",
        dump.to_str().unwrap(),
        "--dump-matrix",
        mat.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("relative residual"));
    let rows = read_dump_csv(fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(rows.len(), 6 * 9);
    assert!(rows.iter().all(|r| r.coefficients.len() == 3));
    assert!(fs::metadata(&mat).unwrap().len() > 0);
}

#[test]
fn bad_input_fails_with_message() {
    for args in [
        vec!["convergence", "--degree", "3"],
        vec!["convergence", "--k", "-1"],
        vec!["convergence", "--domain", "square"],
        vec!["pollution", "--domain", "disk"],
        vec!["convergence", "--config", "/nonexistent/run.toml"],
    ] {
        let o = run(&args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
}

#[test]
fn oversized_sweep_is_refused_before_solving() {
    let o = run(&["pollution", "--kh", "0.25", "--k-list", "5,240", "--max-dofs", "100000"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("exceed"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[convergence]\nkapa = 2.0\n").unwrap();
    let o = run(&["convergence", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("kapa"), "{}", stderr(&o));
}
