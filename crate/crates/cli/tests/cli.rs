use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dstrans::{read_matrix_market, write_matrix_market, DiagnosticsReport};
use dstrans_core::SymMatrix;
use dstrans_testkit::{random_symmetric, rng};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn dstrans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dstrans")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn rows(csv_path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(csv_path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn solve(dir: &Path, a: &str, b: &str, extra: &[&str]) -> (Output, PathBuf, PathBuf) {
    let out = dir.join("out.csv");
    let diag = dir.join("diag.json");
    let (fa, fb) = (fixture(a), fixture(b));
    let mut args = vec!["solve", "--matrix-a", p(&fa), "--matrix-b", p(&fb), "--out", p(&out)];
    args.extend(["--diagnostics", p(&diag)]);
    args.extend(extra);
    (dstrans(&args), out, diag)
}

#[test]
fn rank_one_pencil_at_unit_shift() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out, diag) =
        solve(dir.path(), "rank_one_a.mtx", "rank_one_b.mtx", &["--shift", "1", "--best-residuals", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rs = rows(&out);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rs[0][2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rs[0][3], "inf");
    assert!(rs[0][4].parse::<f64>().unwrap() <= 1e-14);
    assert_eq!(rs[0][6], "0");
    let d: DiagnosticsReport = serde_json::from_str(&fs::read_to_string(&diag).unwrap()).unwrap();
    assert_eq!(d.rank_r, 1);
    assert_eq!(d.n, 2);
    assert!(d.mu.is_none());
    assert!((d.etax - 1.0).abs() < 1e-10);
}

#[test]
fn guard_trip_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _, _) = solve(
        dir.path(),
        "rank_one_a.mtx",
        "rank_one_b.mtx",
        &["--shift", "1", "--etax-max", "0.5"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eta*||X||_2"));
}

#[test]
fn scaled_shift_and_sorting() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out, diag) =
        solve(dir.path(), "diag_a.mtx", "diag_b.mtx", &["--scaled-shift", "-0.5", "--best-residuals", "sample:1"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = rows(&out);
    let l: Vec<f64> = rs.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!((l[0] - 2.0).abs() < 1e-14 && (l[1] - 3.0).abs() < 1e-14);
    assert_eq!(rs[0][0], "1");
    assert_eq!(rs[1][0], "2");
    assert!(!rs[0][5].is_empty() && rs[1][5].is_empty());
    let d: DiagnosticsReport = serde_json::from_str(&fs::read_to_string(&diag).unwrap()).unwrap();
    assert_eq!(rs.len(), d.rank_r);
    assert!((d.sigma0 + 0.5).abs() < 1e-12);
    assert!((d.sigma + 1.5).abs() < 1.5e-5);
}

#[test]
fn diagnostics_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, diag) = solve(dir.path(), "diag_a.mtx", "diag_b.mtx", &["--shift", "-0.7"]);
    let text = fs::read_to_string(&diag).unwrap();
    let d: DiagnosticsReport = serde_json::from_str(&text).unwrap();
    let again: DiagnosticsReport = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(d, again);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["sigma", "sigma0", "eta", "etaX", "gamma", "mu", "rank_r", "n", "norm_a", "norm_tol"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn output_is_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let args = ["--shift", "-0.3", "--best-residuals", "all"];
    let (_, o1, _) = solve(d1.path(), "diag_a.mtx", "diag_b.mtx", &args);
    let (_, o2, _) = solve(d2.path(), "diag_a.mtx", "diag_b.mtx", &args);
    assert_eq!(fs::read(o1).unwrap(), fs::read(o2).unwrap());
}

#[test]
fn standard_method() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("std.csv");
    let (fa, fb) = (fixture("diag_a.mtx"), fixture("diag_b.mtx"));
    let o = dstrans(&["standard", "--matrix-a", p(&fa), "--matrix-b", p(&fb), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let rs = rows(&out);
    assert!((rs[0][3].parse::<f64>().unwrap() - 2.0).abs() < 1e-14);
    assert!((rs[1][3].parse::<f64>().unwrap() - 3.0).abs() < 1e-14);
    assert!(rs.iter().all(|r| r[4].parse::<f64>().unwrap() <= 1e-13));
    assert!(rs.iter().all(|r| r[7].is_empty()));

    let fb = fixture("indefinite_b.mtx");
    let o = dstrans(&["standard", "--matrix-a", p(&fa), "--matrix-b", p(&fb), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    let o = dstrans(&["standard", "--matrix-a", p(&fa), "--matrix-b", p(&fixture("rank_one_b.mtx"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compare_joins_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp.csv");
    let (fa, fb) = (fixture("diag_a.mtx"), fixture("diag_b.mtx"));
    let o = dstrans(&[
        "compare", "--matrix-a", p(&fa), "--matrix-b", p(&fb), "--shift", "-1", "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap().get(0), Some("method"));
    let methods: Vec<String> = r.records().map(|x| x.unwrap()[0].to_string()).collect();
    assert_eq!(methods, ["spectral", "spectral", "standard", "standard"]);
}

#[test]
fn io_and_usage_errors_exit_1() {
    let fa = fixture("diag_a.mtx");
    let missing = dstrans(&["solve", "--matrix-a", p(&fa), "--matrix-b", "/nonexistent.mtx", "--shift", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    let no_shift = dstrans(&["solve", "--matrix-a", p(&fa), "--matrix-b", p(&fa)]);
    assert_eq!(no_shift.status.code(), Some(1));
    let both = dstrans(&[
        "solve", "--matrix-a", p(&fa), "--matrix-b", p(&fa), "--shift", "1", "--scaled-shift", "1",
    ]);
    assert_eq!(both.status.code(), Some(1));
    let bad_mode = dstrans(&[
        "solve", "--matrix-a", p(&fa), "--matrix-b", p(&fa), "--shift", "1", "--best-residuals", "x",
    ]);
    assert_eq!(bad_mode.status.code(), Some(1));
    assert_eq!(dstrans(&["--help"]).status.code(), Some(0));
}

#[test]
fn modify_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.mtx");
    let o = dstrans(&["modify", "--in", p(&fixture("diag_b.mtx")), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let b = read_matrix_market(&out).unwrap();
    let norm = 2.0;
    assert!((b.get(0, 0) - (1.0 + (-0.04f64).exp() * norm)).abs() < 1e-6);
    assert!((b.get(1, 1) - (2.0 + (-0.02f64).exp() * norm)).abs() < 1e-6);
}

#[test]
fn matrix_market_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mtx");
    let mut r = rng(71);
    let m: SymMatrix = random_symmetric(&mut r, 6);
    write_matrix_market(&path, &m).unwrap();
    let back = read_matrix_market(&path).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(back.get(i, j).to_bits(), m.get(i, j).to_bits());
        }
    }
}
