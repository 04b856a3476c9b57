//! End-to-end checks of the command-line surface: verbs, file formats,
//! round trips, exit codes, and sweep determinism.

use monoidkit::catalog::named;
use monoidkit::formats::parse_mon;
use monoidkit::products::direct_product;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monoidkit"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn validate_accepts_a_good_table() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("z2.mon");
    std::fs::write(&file, "2\n0 1\n1 0\n").unwrap();
    let out = run_in(dir.path(), &["validate", "z2.mon"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("order 2"));
}

#[test]
fn validate_flags_violations_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // the corrupted Z3 table: associativity fails
    let file = dir.path().join("bad.mon");
    std::fs::write(&file, "3\n0 1 2\n1 2 0\n2 0 2\n").unwrap();
    let out = run_in(dir.path(), &["validate", "bad.mon"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stdout(&out).contains("not associative"));

    // out-of-range entry, reported with its line
    std::fs::write(dir.path().join("range.mon"), "2\n0 1\n1 2\n").unwrap();
    let out = run_in(dir.path(), &["validate", "range.mon"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stdout(&out).contains("line 3"));

    // left-identity-only table
    std::fs::write(dir.path().join("noid.mon"), "2\n0 1\n0 1\n").unwrap();
    let out = run_in(dir.path(), &["validate", "noid.mon"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stdout(&out).contains("identity"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["validate", "missing.mon"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    std::fs::write(dir.path().join("syntax.mon"), "2\n0 x\n1 0\n").unwrap();
    let out = run_in(dir.path(), &["validate", "syntax.mon"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    let out = run_in(dir.path(), &["info", "nonsense:9"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    // cap errors are input errors
    let out = run_in(dir.path(), &["product", "--kind", "schutz", "-o", "x.mon", "A=t2", "B=t2"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn info_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["info", "monogenic:2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("order:       3"));
    assert!(text.contains("regular:     no (witness element 1)"));
    assert!(text.contains("1: {∅}"));
}

#[test]
fn product_round_trips_through_the_mon_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["product", "--kind", "direct", "-o", "d.mon", "A=zn:2", "B=zn:3"],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let text = std::fs::read_to_string(dir.path().join("d.mon")).unwrap();
    let parsed = parse_mon(&text, "d").unwrap();
    let expect = direct_product(&named("zn:2").unwrap(), &named("zn:3").unwrap(), 10_000).unwrap();
    assert_eq!(parsed.rows(), expect.rows());

    // the sidecar has one line per element
    let sidecar = std::fs::read_to_string(dir.path().join("d.mon.decode")).unwrap();
    assert_eq!(sidecar.lines().count(), 6);
    assert_eq!(sidecar.lines().next(), Some("0 0"));

    // and the written table validates from the CLI too
    let out = run_in(dir.path(), &["validate", "d.mon"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn semidirect_needs_and_uses_an_action_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["product", "--kind", "semidirect", "-o", "s.mon", "A=zn:3", "B=zn:2"],
    );
    assert_eq!(out.status.code(), Some(2), "--action is required");

    std::fs::write(dir.path().join("inv.act"), "3 2\n0 1 2\n0 2 1\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "product",
            "--kind",
            "semidirect",
            "--action",
            "inv.act",
            "-o",
            "s.mon",
            "A=zn:3",
            "B=zn:2",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = std::fs::read_to_string(dir.path().join("s.mon")).unwrap();
    let m = parse_mon(&text, "s").unwrap();
    assert_eq!(m.order(), 6);
    assert!(!m.rows()[1].is_empty());

    // invalid action file is an input error
    std::fs::write(dir.path().join("bad.act"), "3 2\n0 1 2\n0 1 1\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "product",
            "--kind",
            "semidirect",
            "--action",
            "bad.act",
            "-o",
            "s2.mon",
            "A=zn:3",
            "B=zn:2",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schutz_product_writes_triple_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["product", "--kind", "schutz", "-o", "sz.mon", "A=zn:2", "B=zn:2"],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let m = parse_mon(
        &std::fs::read_to_string(dir.path().join("sz.mon")).unwrap(),
        "sz",
    )
    .unwrap();
    assert_eq!(m.order(), 64);
    let sidecar = std::fs::read_to_string(dir.path().join("sz.mon.decode")).unwrap();
    assert_eq!(sidecar.lines().count(), 64);
    // line k is "a p_code b" for flat index k; the identity (1_A, ∅, 1_B)
    // sits at index 0
    assert_eq!(sidecar.lines().next(), Some("0 0 0"));
}

#[test]
fn regular_verdicts_are_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["regular", "--product", "schutz", "A=u1", "B=u1"]);
    assert_eq!(out.status.code(), Some(0), "a verdict is not a violation");
    let text = stdout(&out);
    assert!(text.contains("non-regular"));
    assert!(text.contains("index 3"));

    let out = run_in(dir.path(), &["regular", "monogenic:2,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("witness element 1"));

    let out = run_in(dir.path(), &["regular", "--format", "json", "t2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], "regular");
}

#[test]
fn theorem_breakdowns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["theorem", "--which", "1", "A=zn:2", "B=zn:2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: true"));

    let out = run_in(dir.path(), &["theorem", "--which", "2", "A=zn:2", "B=u1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verdict: false"));
    assert!(text.contains("T2.iii: fails"));

    let out = run_in(
        dir.path(),
        &["theorem", "--format", "json", "--which", "1", "A=u1", "B=u1"],
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], false);
    assert_eq!(doc["conditions"][1]["id"], "T1.ii");

    let out = run_in(dir.path(), &["theorem", "--which", "3", "A=u1", "B=u1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "sweep".to_string(),
            "--max-order".to_string(),
            "2".to_string(),
            "--kind".to_string(),
            "schutz".to_string(),
            "--out".to_string(),
            out.to_string(),
        ]
    };
    let run1 = bin()
        .current_dir(dir.path())
        .args(args("one"))
        .output()
        .unwrap();
    assert_eq!(run1.status.code(), Some(0), "{run1:?}");
    let run2 = bin()
        .current_dir(dir.path())
        .args(args("two"))
        .output()
        .unwrap();
    assert_eq!(run2.status.code(), Some(0));

    // 9 reports per run plus the summary
    let count = std::fs::read_dir(dir.path().join("one")).unwrap().count();
    assert_eq!(count, 10);

    let s1 = std::fs::read_to_string(dir.path().join("one/summary.txt")).unwrap();
    let s2 = std::fs::read_to_string(dir.path().join("two/summary.txt")).unwrap();
    assert_eq!(s1, s2);
    assert_eq!(s1.lines().count(), 9);
    assert!(s1.lines().all(|l| l.ends_with(",true")));

    // reports agree byte-for-byte once timing is struck
    for entry in std::fs::read_dir(dir.path().join("one")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let other = dir.path().join("two").join(path.file_name().unwrap());
        let strip = |p: &Path| {
            let mut v: serde_json::Value =
                serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
            v["elapsed_ms"] = serde_json::json!(null);
            v.to_string()
        };
        assert_eq!(strip(&path), strip(&other), "{path:?}");
    }
}

#[test]
fn catalog_emits_tables_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["catalog", "--enumerate", "2", "--up-to-iso", "--emit", "cat"],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let index = std::fs::read_to_string(dir.path().join("cat/index.txt")).unwrap();
    // 7 named entries + 2 enumerated classes of order 2
    assert_eq!(index.lines().count(), 9);
    assert!(index.contains("zn:2 2 true"));
    assert!(index.contains("monogenic:2,1 3 false"));

    // every emitted file parses back
    for line in index.lines() {
        let name = line.split(' ').next().unwrap();
        let file = dir.path().join("cat").join(format!(
            "{}.mon",
            name.chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
                .collect::<String>()
        ));
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(parse_mon(&text, name).is_ok(), "{file:?}");
    }

    let out = run_in(dir.path(), &["catalog", "--enumerate", "5"]);
    assert_eq!(out.status.code(), Some(2));
}
