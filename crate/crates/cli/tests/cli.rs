//! End-to-end CLI tests: every verb once, the exit-code contract, output
//! determinism, and byte-exact fixture emission against the golden files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_logpic")
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(bin())
            .args(["fixtures", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        Workspace { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, content: &str) -> PathBuf {
        let path = self.path(name);
        fs::write(&path, content).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(bin()).args(args).output().unwrap()
    }
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn fixtures_match_golden_files() {
    let ws = Workspace::new();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for entry in fs::read_dir(&golden).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name();
        let expected = fs::read(entry.path()).unwrap();
        let actual = fs::read(ws.path(name.to_str().unwrap())).unwrap();
        assert_eq!(actual, expected, "fixture {:?} drifted", name);
    }
}

#[test]
fn graph_verbs() {
    let ws = Workspace::new();
    let c3 = ws.path("C3.json");
    let d = ws.write("D.json", r#"{"v1": 1}"#);
    let d2 = ws.write("D2.json", r#"{"v2": 1}"#);

    let out = ws.run(&[
        "graph",
        "rank",
        "--divisor",
        d.to_str().unwrap(),
        c3.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["rank"], 0);

    let out = ws.run(&[
        "graph",
        "reduce",
        "--divisor",
        d.to_str().unwrap(),
        "--base",
        "v2",
        c3.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["base"], "v2");
    assert_eq!(v["unburnt"].as_array().unwrap().len(), 0);

    let out = ws.run(&[
        "graph",
        "equiv",
        "--divisor",
        d.to_str().unwrap(),
        "--divisor2",
        d2.to_str().unwrap(),
        c3.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["equivalent"], false);

    let out = ws.run(&["graph", "jacobian", ws.path("B3.json").to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["invariants"], serde_json::json!(["3"]));

    let out = ws.run(&["graph", "canonical", ws.path("B3.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["degree"], 2);
    assert_eq!(v["canonical"]["v1"], 1);

    let out = ws.run(&[
        "graph",
        "rr-check",
        "--degree-window",
        "-2..4",
        ws.path("LOOP1.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["violations"].as_array().unwrap().len(), 0);

    // negative control: loop-blind rank violates RR on the loop graph
    let out = ws.run(&[
        "graph",
        "rr-check",
        "--naive-rank",
        ws.path("LOOP1.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(!stdout_json(&out)["violations"].as_array().unwrap().is_empty());

    let out = ws.run(&[
        "graph",
        "sweep",
        "--seed",
        "1",
        "--max-vertices",
        "2",
        "--max-edges",
        "2",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn complex_verbs() {
    let ws = Workspace::new();
    let ell = ws.path("CPX-ELL5.json");
    let d = ws.write("E1.json", r#"{"v1": {"t1": 1, "t4": 1}}"#);
    let d2 = ws.write("E2.json", r#"{"v1": {"t2": 1, "t3": 1}}"#);

    let out = ws.run(&[
        "complex",
        "rank",
        "--divisor",
        d.to_str().unwrap(),
        ell.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["rank"], 1);

    let out = ws.run(&[
        "complex",
        "equiv",
        "--divisor",
        d.to_str().unwrap(),
        "--divisor2",
        d2.to_str().unwrap(),
        ell.to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["equivalent"], true);

    let out = ws.run(&[
        "complex",
        "canonical",
        ws.path("CPX-LOOP-RAT.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["degree"], 0);

    let loop_div = ws.write("LD.json", r#"{"v1": {"y": 1}}"#);
    let out = ws.run(&[
        "complex",
        "rank",
        "--divisor",
        loop_div.to_str().unwrap(),
        ws.path("CPX-LOOP-RAT.json").to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["rank"], 0);
    let out = ws.run(&[
        "complex",
        "rank",
        "--naive-rank",
        "--divisor",
        loop_div.to_str().unwrap(),
        ws.path("CPX-LOOP-RAT.json").to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["rank"], 1);

    let out = ws.run(&[
        "complex",
        "tropicalize",
        "--divisor",
        loop_div.to_str().unwrap(),
        ws.path("CPX-LOOP-RAT.json").to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["multidegree"]["v1"], 1);

    let out = ws.run(&[
        "complex",
        "rr-check",
        "--degree-window",
        "-2..4",
        ell.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let out = ws.run(&[
        "complex",
        "clifford",
        ws.path("CPX-B2-RAT.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let out = ws.run(&[
        "complex",
        "roundtrip",
        ws.path("CPX-C3-RAT.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["ok"], true);

    let out = ws.run(&[
        "complex",
        "sweep",
        "--seed",
        "2",
        "--max-vertices",
        "2",
        "--max-edges",
        "2",
        "--instances",
        "3",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn curve_verbs() {
    let ws = Workspace::new();
    let xb2 = ws.path("X-B2.json");
    let trivial = ws.write("L0.json", r#"{"classes": {}}"#);
    let twisted = ws.write(
        "L1.json",
        r#"{"classes": {"v1": {"degree": -2}, "v2": {"degree": 2}}}"#,
    );
    let glued = ws.write(
        "L2.json",
        r#"{"classes": {}, "gluing": {"e2": 1}}"#,
    );

    let out = ws.run(&[
        "curve",
        "rank",
        "--bundle",
        trivial.to_str().unwrap(),
        xb2.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["rank"], 0);

    let out = ws.run(&[
        "curve",
        "rank",
        "--direct",
        "--torus",
        "2",
        "--bundle",
        trivial.to_str().unwrap(),
        xb2.to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["rank"], 0);

    let out = ws.run(&[
        "curve",
        "equiv",
        "--bundle",
        trivial.to_str().unwrap(),
        "--bundle2",
        twisted.to_str().unwrap(),
        "--torus",
        "3",
        xb2.to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["equivalent"], true);

    let out = ws.run(&[
        "curve",
        "equiv",
        "--bundle",
        trivial.to_str().unwrap(),
        "--bundle2",
        glued.to_str().unwrap(),
        "--torus",
        "3",
        xb2.to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&out)["equivalent"], false);

    let out = ws.run(&["curve", "canonical", xb2.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["degree"], 0);

    let out = ws.run(&[
        "curve",
        "tropicalize",
        "--bundle",
        twisted.to_str().unwrap(),
        xb2.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["degree"], 0);
    assert_eq!(v["tau"], serde_json::json!({}));

    let out = ws.run(&["curve", "to-complex", xb2.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let emitted = stdout_json(&out);
    let golden: serde_json::Value = serde_json::from_slice(
        &fs::read(ws.path("CPX-B2-RAT.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(emitted, golden);

    let out = ws.run(&[
        "curve",
        "rr-check",
        "--degree-window",
        "-2..4",
        xb2.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["violations"].as_array().unwrap().len(), 0);

    let out = ws.run(&["curve", "ses-check", "--torus", "3", xb2.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["kernelOrder"], 3);
    assert_eq!(v["expected"], 3);

    let out = ws.run(&["curve", "clifford", xb2.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let out = ws.run(&["curve", "roundtrip", xb2.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["ok"], true);

    let out = ws.run(&[
        "curve",
        "sweep",
        "--property",
        "ses",
        "--seed",
        "3",
        "--instances",
        "2",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn output_is_byte_deterministic() {
    let ws = Workspace::new();
    let xb2 = ws.path("X-B2.json");
    let a = ws.run(&["curve", "rr-check", xb2.to_str().unwrap()]);
    let b = ws.run(&["curve", "rr-check", xb2.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let a = ws.run(&[
        "curve",
        "sweep",
        "--property",
        "roundtrip",
        "--seed",
        "4",
        "--instances",
        "5",
    ]);
    let b = ws.run(&[
        "curve",
        "sweep",
        "--property",
        "roundtrip",
        "--seed",
        "4",
        "--instances",
        "5",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn input_errors_exit_2() {
    let ws = Workspace::new();

    // malformed JSON
    let bad = ws.write("bad.json", "{");
    let out = ws.run(&["graph", "jacobian", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // duplicate attachment point: both half-edges of the loop at one point
    let dup = ws.write(
        "dup.json",
        r#"{
            "graph": {
                "vertices": [{"id": "v1", "weight": 0}],
                "edges": [{"id": "e1", "halves": [["e1a", "v1"], ["e1b", "v1"]], "length": [1]}]
            },
            "components": {"v1": {"genus": 0, "group": [], "points": [{"id": "x", "class": []}]}},
            "attach": {"e1a": "x", "e1b": "x"}
        }"#,
    );
    let out = ws.run(&["complex", "canonical", dup.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("distinct"));

    // marked curve refuses rank operations, citing verticality
    let marked = ws.write(
        "marked.json",
        r#"{
            "monoidRank": 1,
            "components": {
                "c1": {"genus": 0, "group": [], "points": [{"id": "p", "class": []}, {"id": "m", "class": []}]},
                "c2": {"genus": 0, "group": [], "points": [{"id": "q", "class": []}]}
            },
            "nodes": [{"id": "n1", "branches": [["c1", "p"], ["c2", "q"]], "length": [1]}],
            "marks": [{"component": "c1", "point": "m"}]
        }"#,
    );
    let bundle = ws.write("Lm.json", r#"{"classes": {}}"#);
    let out = ws.run(&[
        "curve",
        "rank",
        "--bundle",
        bundle.to_str().unwrap(),
        marked.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("vertical"));

    // unknown keys are rejected, with a location
    let unknown = ws.write(
        "unknown.json",
        r#"{"vertices": [{"id": "v1", "weight": 0, "color": "red"}], "edges": []}"#,
    );
    let out = ws.run(&["graph", "jacobian", unknown.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
