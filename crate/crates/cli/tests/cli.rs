use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gcale_core::io::{HISTORY_HEADER, MatrixFile, ProblemFile, RunReport};
use gcale_core::{ComplexMatrix, HermitianMatrix, ProblemInstance};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_str().unwrap().to_string()
}

fn gcale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcale")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_problem(dir: &Path, name: &str, a: &[&[f64]], b: &[&[f64]], q: &[&[f64]]) -> String {
    let p = ProblemInstance::new(
        ComplexMatrix::from_real_rows(a).unwrap(),
        ComplexMatrix::from_real_rows(b).unwrap(),
        HermitianMatrix::from_real_rows(q).unwrap(),
    )
    .unwrap();
    let path = dir.join(name);
    fs::write(&path, ProblemFile::from_instance(&p).to_text()).unwrap();
    path.to_str().unwrap().to_string()
}

fn path_in(dir: &Path, name: &str) -> (PathBuf, String) {
    let p = dir.join(name);
    let s = p.to_str().unwrap().to_string();
    (p, s)
}

#[test]
fn check_reports_margins_and_succeeds() {
    let out = gcale(&["check", &data("example1.json"), "--preset", "cr1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("margin_a        3.3458"));
    assert!(text.contains("all_satisfied   true"));
}

#[test]
fn check_writes_condition_report() {
    let dir = tempfile::tempdir().unwrap();
    let (path, s) = path_in(dir.path(), "r.json");
    let out = gcale(&["check", &data("example2.json"), "--preset", "cr2", "--report", &s]);
    assert_eq!(code(&out), 0);
    let r = RunReport::parse(&fs::read_to_string(path).unwrap()).unwrap();
    let c = r.condition_report.unwrap();
    assert!((c.margin_b - 0.0094).abs() < 1e-3);
    assert!(r.solve_report.is_none());
}

#[test]
fn failing_conditions_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "p.json",
        &[&[1.0, 0.0], &[0.0, 1.0]],
        &[&[-0.5, 0.0], &[0.0, -0.5]],
        &[&[1.0, 0.0], &[0.0, 1.0]],
    );
    assert_eq!(code(&gcale(&["check", &p, "--preset", "cr2"])), 2);
    let out = gcale(&["solve", &p, "--preset", "cr2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("conditions"));
}

#[test]
fn forced_divergent_solve_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "p.json",
        &[&[1.0, 0.0], &[0.0, 1.0]],
        &[&[-0.5, 0.0], &[0.0, -0.5]],
        &[&[1.0, 0.0], &[0.0, 1.0]],
    );
    let out = gcale(&["solve", &p, "--preset", "cr2", "--force"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("Diverged"));
}

#[test]
fn max_iterations_exit_3() {
    let out = gcale(&["solve", &data("example1.json"), "--preset", "cr1", "--max-iter", "3"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("MaxIterations"));
}

#[test]
fn singular_oracle_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "p.json",
        &[&[1.0, 0.0], &[0.0, 1.0]],
        &[&[1.0, 0.0], &[0.0, -1.0]],
        &[&[1.0, 0.0], &[0.0, 1.0]],
    );
    let out = gcale(&["oracle", &p]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("singular"));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let (bad, s) = path_in(dir.path(), "bad.json");
    fs::write(&bad, "{\n  \"format_version\": \"gcale-problem/1\",\n  \"n\": 2,\n  oops\n}").unwrap();
    let out = gcale(&["check", &s, "--preset", "cr1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    assert_eq!(code(&gcale(&["check", "/nonexistent.json", "--preset", "cr1"])), 1);
    assert_eq!(code(&gcale(&["solve", &data("example1.json")])), 1);
    assert_eq!(code(&gcale(&["solve", &data("example1.json"), "--preset", "cr3"])), 1);
    assert_eq!(code(&gcale(&["frobnicate"])), 1);
    assert_eq!(code(&gcale(&["--version"])), 0);
}

#[test]
fn non_hermitian_preset_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "p.json",
        &[&[-0.95, 0.1], &[0.0, -0.95]],
        &[&[0.5, 0.0], &[0.0, 0.5]],
        &[&[1.0, 0.0], &[0.0, 1.0]],
    );
    let out = gcale(&["check", &p, "--preset", "cr1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn custom_certificate_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "p.json",
        &[&[-0.95, 0.02], &[0.0, -0.95]],
        &[&[0.5, 0.0], &[0.01, 0.5]],
        &[&[1.0, 0.0], &[0.0, 1.0]],
    );
    let (qt, qt_s) = path_in(dir.path(), "qt.json");
    let (m, m_s) = path_in(dir.path(), "m.json");
    fs::write(&qt, MatrixFile::from_matrix(&HermitianMatrix::identity(2)).to_text()).unwrap();
    fs::write(&m, MatrixFile::from_matrix(&HermitianMatrix::identity(2).scale(2.0)).to_text()).unwrap();
    let out = gcale(&["solve", &p, "--qtilde", &qt_s, "--m", &m_s]);
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("preset          Custom"));

    // --qtilde without --m is rejected by the parser.
    assert_eq!(code(&gcale(&["check", &p, "--qtilde", &qt_s])), 1);

    let (wrong, wrong_s) = path_in(dir.path(), "wrong.json");
    fs::write(&wrong, MatrixFile::from_matrix(&HermitianMatrix::identity(3)).to_text()).unwrap();
    assert_eq!(code(&gcale(&["check", &p, "--qtilde", &wrong_s, "--m", &m_s])), 1);
}

#[test]
fn solve_writes_history_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (h, h_s) = path_in(dir.path(), "h.csv");
    let (r, r_s) = path_in(dir.path(), "r.json");
    let out = gcale(&[
        "solve",
        &data("example1.json"),
        "--preset",
        "cr1",
        "--fixed-iters",
        "100",
        "--history",
        &h_s,
        "--report",
        &r_s,
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(h).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(HISTORY_HEADER));
    assert_eq!(lines.count(), 101);

    let report = RunReport::parse(&fs::read_to_string(r).unwrap()).unwrap();
    let s = report.solve_report.unwrap();
    assert_eq!(s.iterations, 100);
    assert!(s.e <= 1e-12);
    assert!(s.enclosure_ok);
    assert!(report.timings.is_some());
}

#[test]
fn reports_without_timings_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let (p, s) = path_in(dir.path(), name);
        let out = gcale(&["compare", &data("example2.json"), "--preset", "cr2", "--report", &s, "--no-timings"]);
        assert_eq!(code(&out), 0);
        (fs::read(p).unwrap(), out.stdout)
    };
    let (r1, o1) = run("a.json");
    let (r2, o2) = run("b.json");
    assert_eq!(r1, r2);
    assert_eq!(o1, o2);
    let report = RunReport::parse(std::str::from_utf8(&r1).unwrap()).unwrap();
    assert!(report.timings.is_none());
}

#[test]
fn compare_checks_bound() {
    let dir = tempfile::tempdir().unwrap();
    let (h, h_s) = path_in(dir.path(), "h.csv");
    let (r, r_s) = path_in(dir.path(), "r.json");
    let out = gcale(&[
        "compare",
        &data("example1.json"),
        "--preset",
        "cr1",
        "--sweep",
        "simultaneous",
        "--history",
        &h_s,
        "--report",
        &r_s,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("bound_holds     true"));
    assert!(fs::read_to_string(h).unwrap().starts_with(&format!("{HISTORY_HEADER},err_x_weighted")));
    let report = RunReport::parse(&fs::read_to_string(r).unwrap()).unwrap();
    let cmp = report.oracle_comparison.unwrap();
    assert!(cmp.bound_checked && cmp.bound_holds);
    assert!(cmp.true_error_spectral < 1e-10);
    assert!(report.oracle.unwrap().definite);
}

#[test]
fn oracle_matches_example_solution() {
    let dir = tempfile::tempdir().unwrap();
    let (r, r_s) = path_in(dir.path(), "r.json");
    let out = gcale(&["oracle", &data("example1.json"), "--report", &r_s]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("definite        true"));
    let o = RunReport::parse(&fs::read_to_string(r).unwrap()).unwrap().oracle.unwrap();
    assert!((o.x[0][0].value().re - 1.9495).abs() < 1e-4);
    assert!((o.x[0][2].value().re - 0.0142).abs() < 1e-4);
    assert!(o.residual <= 1e-12);
}

#[test]
fn scalar_oracle_reports_indefinite_solution() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "p.json", &[&[2.0]], &[&[3.0]], &[&[12.0]]);
    let (r, r_s) = path_in(dir.path(), "r.json");
    assert_eq!(code(&gcale(&["oracle", &p, "--report", &r_s])), 0);
    let o = RunReport::parse(&fs::read_to_string(r).unwrap()).unwrap().oracle.unwrap();
    assert!((o.x[0][0].value().re + 1.0).abs() < 1e-12);
    assert!(!o.definite);
}

#[test]
fn zero_operator_is_singular() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "p.json", &[&[0.0]], &[&[0.0]], &[&[1.0]]);
    assert_eq!(code(&gcale(&["oracle", &p])), 4);
}

#[test]
fn residual_tolerance_stops_early() {
    let dir = tempfile::tempdir().unwrap();
    let (r, r_s) = path_in(dir.path(), "r.json");
    let out = gcale(&["solve", &data("example1.json"), "--preset", "cr1", "--tol", "1e-10", "--report", &r_s]);
    assert_eq!(code(&out), 0);
    let s = RunReport::parse(&fs::read_to_string(r).unwrap()).unwrap().solve_report.unwrap();
    assert!(s.converged && s.iterations < 100);
    assert!(s.e <= 1e-10);
}

#[test]
fn forced_compare_skips_undefined_bound() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "p.json",
        &[&[1.0, 0.0], &[0.0, 1.0]],
        &[&[-0.5, 0.0], &[0.0, -0.5]],
        &[&[1.0, 0.0], &[0.0, 1.0]],
    );
    let (r, r_s) = path_in(dir.path(), "r.json");
    let out = gcale(&["compare", &p, "--preset", "cr2", "--force", "--report", &r_s]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("bound_holds     skipped"));
    let cmp = RunReport::parse(&fs::read_to_string(r).unwrap()).unwrap().oracle_comparison.unwrap();
    assert!(!cmp.bound_checked);
}

#[test]
fn compare_example_1_default_sweep() {
    let out = gcale(&["compare", &data("example1.json"), "--preset", "cr1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bound_holds     true"));
}
