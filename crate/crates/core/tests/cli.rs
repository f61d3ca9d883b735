mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;
use tensor_tprod::io::read_tensor;
use tensor_tprod::ResidualReport;

fn tprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tprod")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_report(path: &Path) -> ResidualReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pinv_on_svd_fixture_writes_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("X.tns");
    let r = dir.path().join("r.json");
    let out = tprod(&["pinv", p(&fixture("svd_example.tns")), "-o", p(&x), "--report", p(&r)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_report(&r);
    assert!(report.pass);
    assert_eq!(report.checks.len(), 4);
    assert_eq!(read_tensor(&x).unwrap().dims(), (2, 2, 4));
}

#[test]
fn factor_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture("jordan_example.tns");
    let prefix = format!("{}/f_", p(dir.path()));
    let cases: [(&str, &[&str]); 4] = [
        ("tsvd", &["U", "S", "V"]),
        ("tschur", &["U", "T"]),
        ("tjordan", &["P", "J", "Pinv"]),
        ("idem", &["U", "E", "V"]),
    ];
    for (cmd, names) in cases {
        let out = tprod(&[cmd, p(&a), "--out-prefix", &prefix, "--quiet"]);
        assert_eq!(code(&out), 0, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        let files: Vec<String> = names.iter().map(|n| format!("{prefix}{n}.tns")).collect();
        let mut args = vec!["verify", "--kind", cmd];
        args.extend(files.iter().map(String::as_str));
        args.extend(["--input", p(&a)]);
        let out = tprod(&args);
        assert_eq!(code(&out), 0, "verify {cmd}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn verify_detects_a_wrong_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture("svd_example.tns");
    // the input itself is not its own pseudoinverse
    let out = tprod(&["verify", "--kind", "pinv", p(&a), "--input", p(&a)]);
    assert_eq!(code(&out), 1);
    let x = dir.path().join("X.tns");
    assert_eq!(code(&tprod(&["drazin", p(&a), "-o", p(&x)])), 0);
    assert_eq!(code(&tprod(&["verify", "--kind", "drazin", p(&x), "--input", p(&a)])), 0);
}

#[test]
fn uniform_tolerance_override() {
    let a = fixture("jordan_example.tns");
    assert_eq!(code(&tprod(&["tinv", p(&a), "--tol", "1e-30"])), 1);
    assert_eq!(code(&tprod(&["tinv", p(&a), "--tol", "1e-8"])), 0);
}

#[test]
fn exit_codes_for_errors() {
    let out = tprod(&["group", p(&fixture("nilpotent.tns"))]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Fourier block 1"));
    assert_eq!(code(&tprod(&["pinv", p(&fixture("malformed.tns"))])), 2);
    assert_eq!(code(&tprod(&["pinv", "/nonexistent/a.tns"])), 2);
    assert_eq!(code(&tprod(&["frobnicate"])), 2);
    assert_eq!(code(&tprod(&["pinv", p(&fixture("nilpotent.tns")), "--route", "qr"])), 2);
    assert_eq!(code(&tprod(&["tinv", p(&fixture("nilpotent.tns"))])), 3);
    assert_eq!(code(&tprod(&["--help"])), 0);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tns");
    let b = dir.path().join("b.tns");
    for path in [&a, &b] {
        let out = tprod(&["gen", "--seed", "7", "--dims", "2", "3", "4", "--kind", "t_symmetric", "-o", p(path)]);
        // t_symmetric needs square slices
        assert_eq!(code(&out), 2);
        let out = tprod(&["gen", "--seed", "7", "--dims", "3", "3", "4", "--kind", "t_symmetric", "-o", p(path)]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn tprod_of_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("C.tns");
    let a = fixture("svd_example.tns");
    let out = tprod(&["tprod", p(&a), p(&fixture("jordan_example.tns")), "-o", p(&c)]);
    assert_eq!(code(&out), 0);
    let want = read_tensor(&a).unwrap().tprod(&read_tensor(fixture("jordan_example.tns")).unwrap()).unwrap();
    assert_eq!(read_tensor(&c).unwrap(), want);
    assert_eq!(code(&tprod(&["tprod", p(&a), p(&fixture("nilpotent.tns"))])), 2);
}
