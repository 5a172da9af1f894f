use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wfrechet_core::io::{Mode, ResultDocument};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn wfrechet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfrechet")).args(args).env_remove("WFRECHET_LOG").output().unwrap()
}

fn strip_args<'a>(cmd: &'a str, mesh: &'a str, p: &'a str, q: &'a str) -> Vec<&'a str> {
    vec![cmd, "-s", mesh, "-p", p, "-q", q]
}

struct Strip {
    mesh: String,
    left: String,
    right: String,
}

fn strip() -> Strip {
    let s = |n: &str| data(n).to_str().unwrap().to_string();
    Strip { mesh: s("strip.json"), left: s("left.json"), right: s("right.json") }
}

#[test]
fn segment_leash_writes_a_result() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let steiner = dir.path().join("steiner.json");
    let arr = dir.path().join("arr.json");
    let f = strip();
    let mut args = strip_args("segment-leash", &f.mesh, &f.left, &f.right);
    let (o, s, a) = (out.to_str().unwrap(), steiner.to_str().unwrap(), arr.to_str().unwrap());
    args.extend(["-e", "0.1", "-o", o, "--dump-steiner", s, "--dump-arrangement", a]);
    let run = wfrechet(&args);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = ResultDocument::from_json(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc.mode, Mode::SegmentLeash);
    assert_eq!(doc.epsilon, Some(0.1));
    assert!((2.4..=5.6).contains(&doc.value), "{}", doc.value);
    assert_eq!(doc.path.first(), Some(&(0.0, 0.0)));
    assert_eq!(doc.path.last(), Some(&(1.0, 1.0)));
    let steiner: serde_json::Value = serde_json::from_slice(&std::fs::read(&steiner).unwrap()).unwrap();
    assert_eq!(steiner["edges"].as_array().unwrap().len(), 13);
    let arr: serde_json::Value = serde_json::from_slice(&std::fs::read(&arr).unwrap()).unwrap();
    assert_eq!(arr["cells"].as_array().unwrap().len(), 1);
}

#[test]
fn geodesic_writes_result_table_and_picture() {
    let dir = tempfile::tempdir().unwrap();
    let (out, table, svg) = (dir.path().join("g.json"), dir.path().join("t.json"), dir.path().join("g.svg"));
    let f = strip();
    let mut args = strip_args("geodesic", &f.mesh, &f.left, &f.right);
    args.extend(["-e", "0.2", "-o", out.to_str().unwrap(), "--dump-table", table.to_str().unwrap()]);
    args.extend(["--svg", svg.to_str().unwrap(), "--threads", "2"]);
    let run = wfrechet(&args);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = ResultDocument::from_json(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc.mode, Mode::Geodesic);
    assert!((4.0 * 0.4..=4.0 * 1.6).contains(&doc.value), "{}", doc.value);
    let table: serde_json::Value = serde_json::from_slice(&std::fs::read(&table).unwrap()).unwrap();
    let (rows, cols) = (table["rows"].as_u64().unwrap(), table["cols"].as_u64().unwrap());
    assert_eq!(table["values"].as_array().unwrap().len() as u64, rows * cols);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn exact_modes_print_to_stdout() {
    let f = strip();
    for (cmd, mode) in [("discrete", Mode::Discrete), ("euclidean", Mode::Euclidean)] {
        let run = wfrechet(&[cmd, "-p", &f.left, "-q", &f.right]);
        assert!(run.status.success());
        let doc = ResultDocument::from_json(&run.stdout).unwrap();
        assert_eq!(doc.mode, mode);
        assert_eq!(doc.epsilon, None);
        assert!((doc.value - 1.0).abs() < 1e-6, "{}", doc.value);
    }
}

#[test]
fn output_is_deterministic_apart_from_timing() {
    let f = strip();
    let mut args = strip_args("geodesic", &f.mesh, &f.left, &f.right);
    args.extend(["-e", "0.3"]);
    let mut a = ResultDocument::from_json(&wfrechet(&args).stdout).unwrap();
    let mut b = ResultDocument::from_json(&wfrechet(&args).stdout).unwrap();
    a.stats.wall_time_ms = 0.0;
    b.stats.wall_time_ms = 0.0;
    assert_eq!(a, b);
}

#[test]
fn render_is_byte_stable() {
    let f = strip();
    let args = strip_args("render", &f.mesh, &f.left, &f.right);
    let a = wfrechet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, wfrechet(&args).stdout);
    assert!(String::from_utf8(a.stdout).unwrap().contains("<polygon"));
}

#[test]
fn validate_reports_violations() {
    let ok = wfrechet(&["validate", "-s", data("strip.json").to_str().unwrap(), "--seed", "7"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("ok"));

    let bad = wfrechet(&["validate", "-s", data("overlapping.json").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let listed = String::from_utf8_lossy(&bad.stdout);
    assert!(listed.contains("duplicate triangle 2"), "{listed}");
    assert!(listed.contains("non-positive weight 1"), "{listed}");
}

#[test]
fn input_errors_exit_with_one() {
    let f = strip();
    let missing = data("missing.json");
    let off = data("off_mesh.json");
    let bad_index = data("bad_index.json");
    let cases: Vec<Vec<&str>> = vec![
        strip_args("segment-leash", missing.to_str().unwrap(), &f.left, &f.right),
        strip_args("geodesic", &f.mesh, off.to_str().unwrap(), &f.right),
        {
            let mut a = strip_args("segment-leash", &f.mesh, &f.left, &f.right);
            a.extend(["-e", "0.5"]);
            a
        },
        vec!["validate", "-s", bad_index.to_str().unwrap()],
        vec!["no-such-command"],
        vec!["euclidean", "-p", &f.left],
    ];
    for args in cases {
        let run = wfrechet(&args);
        assert_eq!(run.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&run.stderr));
        assert!(!run.stderr.is_empty());
    }
}

#[test]
fn log_variable_enables_diagnostics() {
    let f = strip();
    let mut args = strip_args("segment-leash", &f.mesh, &f.left, &f.right);
    args.extend(["-e", "0.3"]);
    let run = Command::new(env!("CARGO_BIN_EXE_wfrechet")).args(&args).env("WFRECHET_LOG", "info").output().unwrap();
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("segment leash"));
}
