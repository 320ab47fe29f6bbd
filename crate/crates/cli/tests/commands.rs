use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpsd_cli::format;
use tempfile::TempDir;

fn cpsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpsd"))
        .args(args)
        .env_remove("CPSD_TOL")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mk_entries() {
    let out = cpsd(&["construct", "mk", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let m = format::parse_matrix(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(m.dims(), (4, 4));
    for z in m.entries() {
        assert!([0.0, 0.5, 1.0].contains(&z.re) && z.im == 0.0, "{z}");
    }
    assert_eq!(m.re(0, 0), 1.0);
    assert_eq!(m.re(0, 1), 0.0);
    assert_eq!(m.re(0, 2), 0.5);
}

#[test]
fn main_theorem_pipeline() {
    let dir = TempDir::new().unwrap();
    let (m, f, c) = (path(&dir, "m.cmat"), path(&dir, "f.cfac"), path(&dir, "c.cert"));
    let out = cpsd(&[
        "construct", "main-theorem", "--k", "1", "--out", s(&m), "--factors", s(&f), "--certificate", s(&c),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&cpsd(&["verify", "gram", "--matrix", s(&m), "--factors", s(&f)])), 0);
    assert_eq!(code(&cpsd(&["verify", "psd", "--factors", s(&f)])), 0);
    assert_eq!(code(&cpsd(&["verify", "certificate", "--cert", s(&c)])), 0);
    let q = cpsd(&["verify", "quantum", "--matrix", s(&m), "--sizes", "2,2,2,2"]);
    assert_eq!(code(&q), 0, "{}", String::from_utf8_lossy(&q.stdout));
    let b = cpsd(&["bound", "--matrix", s(&m)]);
    assert_eq!(code(&b), 0);
    let text = String::from_utf8(b.stdout).unwrap();
    assert!(text.contains("real_bound") && text.contains("complex_bound"));
}

#[test]
fn tampered_certificate_fails() {
    let dir = TempDir::new().unwrap();
    let c = path(&dir, "c.cert");
    assert_eq!(code(&cpsd(&["construct", "c1", "--r", "3", "--out", s(&c)])), 0);
    let mut cert = format::parse_certificate(&std::fs::read_to_string(&c).unwrap()).unwrap();
    let v = cert.e.re(0, 3);
    cert.e.set_re(0, 3, v + 0.1);
    cert.e.set_re(3, 0, v + 0.1);
    std::fs::write(&c, format::render_certificate(&cert)).unwrap();
    let out = cpsd(&["verify", "certificate", "--cert", s(&c)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn tolerance_from_environment() {
    let dir = TempDir::new().unwrap();
    let (m, f) = (path(&dir, "m.cmat"), path(&dir, "f.cfac"));
    cpsd(&["construct", "mk", "--k", "3", "--out", s(&m), "--factors", s(&f)]);
    let args = ["verify", "gram", "--matrix", s(&m), "--factors", s(&f)];
    assert_eq!(code(&cpsd(&args)), 0);
    let strict = Command::new(env!("CARGO_BIN_EXE_cpsd"))
        .args(args)
        .env("CPSD_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(code(&strict), 3);
    let bad = Command::new(env!("CARGO_BIN_EXE_cpsd"))
        .args(args)
        .env("CPSD_TOL", "tiny")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn clifford_bundles() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "g.cfac");
    for irr in [false, true] {
        let mut args = vec!["construct", "clifford", "--r", "5", "--out", s(&f)];
        if irr {
            args.push("--irreducible");
        }
        assert_eq!(code(&cpsd(&args)), 0);
        let b = format::parse_factors(&std::fs::read_to_string(&f).unwrap()).unwrap();
        assert_eq!(b.d, if irr { 4 } else { 8 });
        assert_eq!(b.len(), 5);
        assert_eq!(code(&cpsd(&["verify", "clifford", "--factors", s(&f)])), 0);
    }
    // Clifford generators are not PSD.
    assert_eq!(code(&cpsd(&["verify", "psd", "--factors", s(&f)])), 3);
}

#[test]
fn elliptope_commands() {
    let dir = TempDir::new().unwrap();
    let e = path(&dir, "e.cmat");
    assert_eq!(code(&cpsd(&["construct", "elliptope-extreme", "--r", "3", "--out", s(&e)])), 0);
    assert_eq!(code(&cpsd(&["verify", "elliptope-extreme", "--matrix", s(&e)])), 0);
    std::fs::write(&e, "CMAT v1 real 2 2\n1 2\n2 1\n").unwrap();
    assert_eq!(code(&cpsd(&["verify", "elliptope-extreme", "--matrix", s(&e)])), 3);

    let w = path(&dir, "w.cmat");
    let x = path(&dir, "x.cmat");
    std::fs::write(&w, "CMAT v1 real 3 3\n-1 -1 -1\n-1 -1 -1\n-1 -1 -1\n").unwrap();
    let out = cpsd(&["solve-elliptope", "--omega", s(&w), "--out", s(&x)]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().strip_prefix("value ").unwrap().parse().unwrap();
    assert!((value + 9.0).abs() < 1e-6, "{value}");
    let sol = format::parse_matrix(&std::fs::read_to_string(&x).unwrap()).unwrap();
    assert!(sol.entries().iter().all(|z| (z.re - 1.0).abs() < 1e-4));
}

#[test]
fn tsirelson_weights_of_c1() {
    let dir = TempDir::new().unwrap();
    let (c, sys) = (path(&dir, "c.cert"), path(&dir, "c.csys"));
    cpsd(&["construct", "c1", "--r", "4", "--out", s(&c), "--csystem", s(&sys)]);
    let out = cpsd(&["tsirelson-weights", "--csystem", s(&sys)]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let field = |name: &str| -> Vec<f64> {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line.split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect()
    };
    assert_eq!(field("lambdas ").len(), 4);
    assert_eq!(field("mus ").len(), 7);
    assert!(field("residual")[0] < 1e-8);
    assert!(field("min_weight")[0] > 0.0);
}

#[test]
fn compress_keeps_gram() {
    let dir = TempDir::new().unwrap();
    let (m, f, g) = (path(&dir, "m.cmat"), path(&dir, "f.cfac"), path(&dir, "g.cfac"));
    cpsd(&["construct", "mk", "--k", "2", "--field", "real", "--out", s(&m), "--factors", s(&f)]);
    assert_eq!(code(&cpsd(&["compress", "--factors", s(&f), "--out", s(&g)])), 0);
    assert_eq!(code(&cpsd(&["verify", "gram", "--matrix", s(&m), "--factors", s(&g)])), 0);
}

#[test]
fn factorize_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (m, f, t) = (path(&dir, "m.cmat"), path(&dir, "f.cfac"), path(&dir, "trace.txt"));
    cpsd(&["construct", "mk", "--k", "2", "--out", s(&m)]);
    let out = cpsd(&["factorize", "--matrix", s(&m), "--dim", "2", "--out", s(&f), "--trace", s(&t)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&cpsd(&["verify", "gram", "--matrix", s(&m), "--factors", s(&f), "--tol", "1e-6"])), 0);
    let trace: Vec<f64> = std::fs::read_to_string(&t)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));

    let out = cpsd(&[
        "factorize", "--matrix", s(&m), "--dim", "1", "--restarts", "1", "--max-iter", "3", "--out", s(&f),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(code(&cpsd(&[])), 2);
    assert_eq!(code(&cpsd(&["construct", "mk"])), 2);
    assert_eq!(code(&cpsd(&["verify", "quantum", "--matrix", "x", "--sizes", "1,2"])), 2);
    assert_eq!(code(&cpsd(&["--help"])), 0);
    assert_eq!(code(&cpsd(&["construct", "mk", "--k", "0"])), 2);

    let dir = TempDir::new().unwrap();
    let m = path(&dir, "bad.cmat");
    std::fs::write(&m, "CMAT v1 real 2 2\n1 0\n0 oops\n").unwrap();
    let out = cpsd(&["bound", "--matrix", s(&m)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
    assert_eq!(code(&cpsd(&["bound", "--matrix", s(&path(&dir, "missing"))])), 2);
}

#[test]
fn construct_output_is_reproducible() {
    for args in [
        vec!["construct", "c2", "--r", "4"],
        vec!["construct", "hadamard", "--order", "6"],
        vec!["construct", "main-theorem", "--k", "2"],
    ] {
        let a = cpsd(&args);
        let b = cpsd(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn verify_leaves_inputs_untouched() {
    let dir = TempDir::new().unwrap();
    let c = path(&dir, "c.cert");
    cpsd(&["construct", "c2", "--r", "3", "--out", s(&c)]);
    let before = std::fs::read(&c).unwrap();
    assert_eq!(code(&cpsd(&["verify", "certificate", "--cert", s(&c)])), 0);
    assert_eq!(std::fs::read(&c).unwrap(), before);
}
