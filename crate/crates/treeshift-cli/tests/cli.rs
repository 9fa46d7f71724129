//! End-to-end tests of the `treeshift` binary: exit codes, report shape,
//! byte determinism, and oracle/classifier agreement on generated corpora.

use std::process::{Command, Output};

use serde_json::Value;
use treeshift::corpus::random_tree_shift;
use treeshift_cli::spec_format::write_tree_spec;

const FORK: &str = "root w\nedge w a 1\nedge w b 2\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treeshift"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run treeshift")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("binary exited with a code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes `text` to a fresh temp file; keep the returned dir alive.
fn temp_tree(text: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("input.tree");
    std::fs::write(&path, text).unwrap();
    let path = path.to_str().unwrap().to_owned();
    (dir, path)
}

#[test]
fn classify_fork_reports_infinite_constant() {
    let (_d, path) = temp_tree(FORK);
    let out = run(&["classify", &path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["quasinormal"], Value::Bool(false));
    assert_eq!(v["weakly_quasinormal"], Value::Bool(false));
    assert_eq!(v["c_opt"], "inf");
    assert_eq!(v["abc3"], Value::Bool(false));
    for key in [
        "quasinormal",
        "weakly_quasinormal",
        "c_opt",
        "abc3",
        "hyponormal",
        "witnesses",
        "scope",
        "boundary_vertices",
        "fragile",
    ] {
        assert!(v.get(key).is_some(), "missing field {key}");
    }
}

#[test]
fn parse_errors_exit_2_with_line_numbers() {
    let cases: &[(&str, &str)] = &[
        ("edge w a 1\n", "line 1"),
        ("root w\nroot v\n", "line 2"),
        ("root w\nedge w a -1\n", "line 2"),
        ("root w\nedge w a abc\n", "line 2"),
        ("root w\nedge w a 1\nedge b c 1\n", "line 3"),
        ("root w\nedge w a 1\nnorm q 1\n", "line 3"),
    ];
    for (text, needle) in cases {
        let (_d, path) = temp_tree(text);
        let out = run(&["classify", &path]);
        assert_eq!(code(&out), 2, "input {text:?}");
        let err = stderr(&out);
        assert!(err.contains(needle), "stderr {err:?} lacks {needle:?}");
    }

    let out = run(&["classify", "/nonexistent/input.tree"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn family_binary_is_quasinormal_on_interior_but_not_at_the_boundary() {
    let out = run(&["classify", "--family", "eunb", "--depth", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["quasinormal"], Value::Bool(true));
    assert_eq!(v["scope"]["kind"], "interior");
    assert_eq!(v["unbounded_family"], Value::Bool(true));

    // The truncated boundary rows have zero norm, so the full scope rejects.
    let out = run(&["classify", "--family", "eunb", "--depth", "5", "--scope", "full"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["quasinormal"], Value::Bool(false));
    assert_eq!(v["scope"]["kind"], "full");
}

#[test]
fn family_comb_reports_the_chain_constant_exactly() {
    let out = run(&["classify", "--family", "fig1", "--c", "4", "--depth", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["c_opt"], "4");
    assert_eq!(v["quasinormal"], Value::Bool(false));
    assert_eq!(v["weakly_quasinormal"], Value::Bool(true));

    // A non-default constant still comes out exact.
    let out = run(&["classify", "--family", "fig1", "--c", "9", "--depth", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["c_opt"], "9");
}

#[test]
fn dot_export_is_exact_and_complete() {
    let (_d, path) = temp_tree("root w\n");
    let out = run(&["dot", &path]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"w\" [label=\"w [‖Se‖²=0]\"]"), "{text}");

    let (_d, path) = temp_tree("root w\nedge w a 2\n");
    let out = run(&["dot", &path]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"w\" [label=\"w [‖Se‖²=4]\"]"), "{text}");
    assert!(text.contains("\"w\" -> \"a\" [label=\"2\"]"), "{text}");

    // Exact rational arithmetic survives into the label.
    let (_d, path) = temp_tree("root w\nedge w a 1/3\nedge w b 2/3\n");
    let out = run(&["dot", &path]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("‖Se‖²=5/9"), "{text}");

    let out = run(&["dot", "--family", "eunb", "--depth", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let nodes = text.lines().filter(|l| l.contains("‖Se‖²")).count();
    let edges = text.lines().filter(|l| l.contains(" -> ")).count();
    assert_eq!(nodes, 15);
    assert_eq!(edges, 14);
}

#[test]
fn oracle_agrees_with_classifier_on_reference_families() {
    let cases: &[&[&str]] = &[
        &["oracle", "--family", "eunb", "--depth", "4"],
        &["oracle", "--family", "fig1", "--depth", "4"],
        &["oracle", "--family", "fig2", "--c", "4", "--depth", "4"],
        &["oracle", "--family", "fig3", "--depth", "3"],
        &["oracle", "--family", "path", "--q", "2", "--depth", "5"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
        let v = json(&out);
        assert_eq!(v["agreement"]["all"], Value::Bool(true), "{args:?}");
    }
}

#[test]
fn oracle_agrees_on_random_corpus_trees() {
    for seed in 0..10u64 {
        let s = random_tree_shift(seed);
        let text = write_tree_spec(&s).expect("corpus shifts are writable");
        let (_d, path) = temp_tree(&text);
        for scope in ["interior", "full"] {
            let out = run(&["oracle", &path, "--scope", scope, "--seed", "7"]);
            assert_eq!(code(&out), 0, "seed {seed} {scope}: {}", stderr(&out));
            let v = json(&out);
            assert_eq!(
                v["agreement"]["all"],
                Value::Bool(true),
                "seed {seed} {scope}"
            );
        }
    }
}

#[test]
fn named_check_izonp_holds() {
    let out = run(&["oracle", "--check", "izonp"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["check"], "izonp");
    assert_eq!(v["holds"], Value::Bool(true));
    assert!(v["max_isometry_defect"].as_f64().unwrap() <= 1e-9);
    assert!(v["min_operator_norm"].as_f64().unwrap() > 1.0 + 1e-6);
}

#[test]
fn transported_maps_agree_on_geometric_path() {
    let out = run(&[
        "oracle", "--family", "path", "--q", "2", "--depth", "6", "--phi", "id", "--psi", "q:2",
        "--scope", "interior",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let g = &v["generalized"];
    assert_eq!(g["conditions_ok"], serde_json::json!([true, true, true]));
    assert_eq!(g["verdict"], Value::Bool(true));
    assert_eq!(g["c_opt_classifier"], "1");
    assert_eq!(v["agreement"]["generalized"], Value::Bool(true));
    assert_eq!(v["agreement"]["all"], Value::Bool(true));
}

#[test]
fn dimension_cap_exits_3() {
    let out = bin()
        .env("TREESHIFT_DIM_CAP", "10")
        .args(["oracle", "--family", "eunb", "--depth", "5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
}

#[test]
fn reports_are_byte_deterministic() {
    let args = ["oracle", "--family", "fig1", "--depth", "4", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let (_d, path) = temp_tree(FORK);
    let a = run(&["classify", &path]);
    let b = run(&["classify", &path]);
    assert_eq!(a.stdout, b.stdout);
}

/// A 8e-9 norm gap sits between the classifier's comparison tolerance (1e-9)
/// and the oracle's cluster width (1e-7): the classifier rejects, the oracle
/// merges the atoms and accepts. The report must flag the disagreement, dump
/// a witness, and mark the classifier side fragile.
#[test]
fn tolerance_straddle_is_a_reported_disagreement() {
    let (_d, path) = temp_tree(
        "root w\nedge w a 1\nedge a b 1.000000004\nedge b c 1\nedge c d 1\nnorm d 1\n",
    );
    let out = run(&["oracle", &path, "--scope", "interior"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["agreement"]["all"], Value::Bool(false));
    assert_eq!(v["quasinormal"]["verdict"], Value::Bool(true));
    assert_eq!(v["classifier"]["quasinormal"], Value::Bool(false));
    assert_eq!(v["classifier"]["fragile"], Value::Bool(true));
    let dump = &v["witness_dump"];
    assert!(dump["reason"].as_str().unwrap().contains("quasinormality"));
    assert!(!dump["vector"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_2() {
    let (_d, path) = temp_tree(FORK);
    let cases: &[&[&str]] = &[
        &["classify"],
        &["classify", &path, "--family", "fig1"],
        &["classify", &path, "--depth", "3"],
        &["classify", "--family", "eunb", "--c", "2"],
        &["classify", "--family", "fig2", "--q", "2"],
        &["classify", "--family", "path", "--c", "2"],
        &["classify", "--family", "bogus"],
        &["oracle", "--family", "fig1", "--phi", "id"],
        &["oracle", "--check", "izonp", &path],
        &["oracle", "--check", "bogus"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }

    let out = run(&["classify", "--family", "bogus"]);
    assert!(stderr(&out).contains("expected eunb, fig1, fig2, fig3, or path"));
}

#[test]
fn text_format_renders_the_same_facts() {
    let (_d, path) = temp_tree(FORK);
    let out = run(&["classify", &path, "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("c_opt: inf"), "{text}");
    assert!(text.contains("quasinormal: false"), "{text}");

    let out = run(&["oracle", &path, "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("agreement:"), "{text}");
}
