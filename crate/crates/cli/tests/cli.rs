use std::path::PathBuf;
use std::process::{Command, Output};

fn qmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmlab")).args(args).output().expect("binary runs")
}

fn bundled() -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/inclusions.json");
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qmlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn eval_prints_exact_values() {
    let majority = r#"{"fn":"maj3","p1":["1/3","1/3"],"p2":["7/3","1/3"],"p3":["1/3","7/3"]}"#;
    let o = qmlab(&["eval", "--fn", majority, "--region-text", "X"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "1/1"));
    let o = qmlab(&["eval", "--fn", r#"{"fn":"delta","p":["1/3","1/3"]}"#, "--region-text", "empty"]);
    assert_eq!(stdout(&o), "0/1");
    let o = qmlab(&["eval", "--fn", r#"{"fn":"unbounded_area"}"#, "--region-text", "X"]);
    assert_eq!(stdout(&o), "inf");
}

#[test]
fn eval_reads_named_functions_and_region_files() {
    let regions = scratch("regions.txt", "# two cells\nlevel=0 kind=closed cofinite=0 cells=(0,0)\nlevel=0 kind=closed cofinite=0 cells=(5,5)\n");
    let o = qmlab(&["eval", "--scenario", &bundled(), "--fn", "delta_a", "--region", &regions]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["1/1", "0/1"]);
}

#[test]
fn bundled_scenario_passes_and_reports_are_reproducible() {
    let first = scratch("first.json", "");
    let second = scratch("second.json", "");
    for out in [&first, &second] {
        let o = qmlab(&["check", "--scenario", &bundled(), "--report", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["verdict"], "PASS");
    let check = &report["runs"][0]["reports"][0];
    for key in ["check", "verdict", "witnesses", "stats"] {
        assert!(check.get(key).is_some(), "missing {key}");
    }
    assert!(check["stats"].get("probes").is_some() && check["stats"].get("depth").is_some());

    let o = qmlab(&["witness", "--scenario", &bundled(), &first]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("REPLAYED")), "{}", stdout(&o));
}

#[test]
fn parse_errors_exit_with_three() {
    let bad = scratch("bad.json", r#"{"functions": {}, "bogus": 1}"#);
    assert_eq!(qmlab(&["check", "--scenario", &bad]).status.code(), Some(3));
    let unknown = scratch("unknown.json", r#"{"fn": "wobble"}"#);
    assert_eq!(qmlab(&["eval", "--fn", &unknown, "--region-text", "X"]).status.code(), Some(3));
    assert_eq!(qmlab(&["eval", "--fn", "{", "--region-text", "X"]).status.code(), Some(3));
    assert_eq!(qmlab(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(qmlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn suite_failures_exit_with_one() {
    let s = scratch(
        "negative.json",
        r#"{"functions": {"neg": {"fn": "lincomb", "coeffs": [-1], "parts": [{"fn": "delta", "p": ["1/3", "1/3"]}]}},
            "probe": {"window": {"level": 0, "x0": 0, "y0": 0, "x1": 3, "y1": 3}, "random_count": 10, "random_seed": 1}}"#,
    );
    let o = qmlab(&["check", "--scenario", &s, "--suite", "tm"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn variations_on_the_atom() {
    let o = qmlab(&[
        "variations",
        "--fn",
        r#"{"fn":"delta","p":["1/3","1/3"]}"#,
        "--region-text",
        "level=0 kind=open cofinite=0 cells=(0,0)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["plus"]["value"], "1/1");
    assert_eq!(rows[0]["minus"]["value"], "0/1");
}
