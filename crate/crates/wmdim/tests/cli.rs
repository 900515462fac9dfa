use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use wmdim::config::parse_rational;
use wmdim::report::rational;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wmdim"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], config_path: &Path) -> Output {
    bin().args(args).arg("--config").arg(config_path).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn windows_of_the_half_weight_tower() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "t.json",
        r#"{"tower": {"levels": [{"kind": "full", "alphabet": 2}, {"kind": "full", "alphabet": 2},
            {"kind": "full", "alphabet": 2}],
            "factors": [{"kind": "merge", "map": [0, 1]}, {"kind": "merge", "map": [0, 1]}],
            "weights": ["1", "1/2", "3/2"]}}"#,
    );
    let out = run(&["windows", "--n", "3"], &path);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().nth(1), Some("3,3,5,9"));
}

#[test]
fn full_shift_entropy_is_ln_8() {
    let out = run(&["entropy"], &config("full_shift.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.contains("ln(8)")), "{text}");
}

#[test]
fn example51_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.txt");
    let out = bin()
        .args(["example51", "--threads", "2", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.lines().any(|l| l == "n=2,eps=1/4,exponent=26"));
    assert!(text.contains("paper_value=4"));
    assert!(text.contains("separated_family=refuted at n=3,eps=1/4"));
}

#[test]
fn ocap_of_the_golden_mean_graph() {
    let out = run(&["ocap"], &config("golden_graph.json"));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1/2"));
}

#[test]
fn same_output_for_any_thread_count() {
    let one = run(&["mmdim", "--threads", "1"], &config("cube_tower.json"));
    let many = run(&["mmdim", "--threads", "8"], &config("cube_tower.json"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(64));

    let bad_json = write_config(&dir, "bad.json", "{\"tower\": {\"levels\": 3}}");
    let out = run(&["validate"], &bad_json);
    assert_eq!(out.status.code(), Some(65));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("bad.json:1:"), "{err}");
    assert!(err.contains("tower.levels"), "{err}");

    let bad_map = write_config(
        &dir,
        "map.json",
        r#"{"tower": {"levels": [{"kind": "full", "alphabet": 2}, {"kind": "full", "alphabet": 2}],
            "factors": [{"kind": "merge", "map": [0, 0]}], "weights": ["1", "1"]}}"#,
    );
    assert_eq!(run(&["validate"], &bad_map).status.code(), Some(2));

    let unknown_tails = write_config(
        &dir,
        "tails.json",
        r#"{"tower": {"levels": [{"kind": "cube", "components": 1}], "weights": ["1"]},
            "n": [1], "eps": ["1/2"],
            "points": [{"radius": 0, "values": [["0"]], "tail": "unknown"},
                       {"radius": 0, "values": [["1/4"]], "tail": "unknown"}]}"#,
    );
    assert_eq!(run(&["count"], &unknown_tails).status.code(), Some(3));
    assert_eq!(run(&["distance"], &unknown_tails).status.code(), Some(0));

    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["validate"], &missing).status.code(), Some(74));
}

proptest! {
    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = wmdim_core::Rational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&rational(&r), "x").unwrap(), r);
    }
}
