use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn reoptlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reoptlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn generate_is_deterministic() {
    let args = ["--seed", "1", "generate", "--kind", "cnf", "--vars", "3", "--clauses", "4"];
    let a = reoptlab(&args);
    let b = reoptlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = reoptlab(&["--seed", "2", "generate", "--kind", "cnf", "--vars", "3", "--clauses", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn generate_writes_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen");
    let o = reoptlab(&[
        "--out",
        out.to_str().unwrap(),
        "generate",
        "--kind",
        "strips",
        "--count",
        "3",
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_dir(&out).unwrap().count(), 3);
}

#[test]
fn wide_gadget_clauses_are_invalid_config() {
    let o = reoptlab(&["generate", "--kind", "gadget", "--clause-size", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("invalid config") && err.contains("clause-size"), "{err}");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(reoptlab(&["verify", ""]).status.code(), Some(1));
    assert_eq!(reoptlab(&["verify"]).status.code(), Some(1));
    let ok = reoptlab(&["verify", "hint-tables"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("PASS hint-tables"));
}

#[test]
fn corrupted_budget_reports_witness() {
    let o = reoptlab(&["verify", "vc-gadget", "--budget-offset", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("FAIL vc-gadget"));
    assert!(text.contains("p cnf"), "{text}");
}

#[test]
fn solve_and_budget_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 3 2\n1 2 0\n-1 3 0\n");
    let o = reoptlab(&["solve", &cnf]);
    assert!(stdout(&o).starts_with("s SATISFIABLE"));
    let unsat = write(dir.path(), "u.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    assert_eq!(stdout(&reoptlab(&["solve", "--brute", &unsat])), "s UNSATISFIABLE\n");
    let o = reoptlab(&["--oracle-limit", "2", "solve", "--brute", &cnf]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solve_graphs_and_plans() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.edges", "a b\nb c\nc a\n");
    assert_eq!(stdout(&reoptlab(&["solve", &g])), "s COVER minimum 2\nv a b\n");
    assert_eq!(stdout(&reoptlab(&["solve", "--budget", "1", &g])), "s NO COVER budget 1\n");
    let gen = reoptlab(&["--seed", "4", "generate", "--kind", "strips"]);
    let inst = write(dir.path(), "i.strips.json", &stdout(&gen));
    let o = reoptlab(&["solve", &inst]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("s "));
}

#[test]
fn export_dot_and_unit_edits() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
    let dot = stdout(&reoptlab(&["export-dot", &cnf]));
    assert!(dot.starts_with("graph gadget {"));
    assert_eq!(dot.lines().filter(|l| l.contains("shape=")).count(), 14);
    assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), 6);

    let gadget = stdout(&reoptlab(&["reduce", "gadget", &cnf]));
    let gpath = write(dir.path(), "f.gadget.json", &gadget);
    let edited = stdout(&reoptlab(&["mutate", &gpath, "--add-unit", "-2"]));
    let epath = write(dir.path(), "e.gadget.json", &edited);
    let dot2 = stdout(&reoptlab(&["export-dot", &epath]));
    assert_eq!(dot2.lines().filter(|l| l.contains(" -- ")).count(), 7);

    let empty = write(dir.path(), "empty.cnf", "p cnf 0 0\n");
    assert_eq!(stdout(&reoptlab(&["export-dot", &empty])), "graph gadget {\n}\n");
}

#[test]
fn mutate_applies_change_sets() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 2 1\n1 2 0\n");
    let ch = write(dir.path(), "c.txt", "+ -1 0\n- 1 2 0\n");
    assert_eq!(stdout(&reoptlab(&["mutate", &cnf, "--changes", &ch])), "p cnf 2 1\n-1 0\n");
}

#[test]
fn reductions_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "g.cnf", "p cnf 1 1\n1 0\n");
    for r in ["fixed-model", "unique-model", "nsat", "replanning", "full-gadget"] {
        let o = reoptlab(&["reduce", r, &cnf]);
        assert!(o.status.success(), "{r}");
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap();
    }
}

#[test]
fn experiment_outputs() {
    let o = reoptlab(&["--seed", "3", "experiment", "random-add", "--trials", "5"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("# seed 3 scenario random-add\ntrial_id,problem,change_id,cold_verdict,hinted_verdict,cold_work,hinted_work,hint_used\n"));
    assert_eq!(csv.lines().count(), 7);

    let zero = reoptlab(&["--format", "json", "experiment", "vc", "--trials", "0"]);
    assert_eq!(zero.status.code(), Some(1));
    let zero = reoptlab(&["--format", "json", "experiment", "add-edge", "--trials", "0"]);
    assert!(zero.status.success());
    let report: serde_json::Value = serde_json::from_slice(&zero.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 0);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep");
    let o = reoptlab(&["--out", out.to_str().unwrap(), "experiment", "table", "--trials", "4"]);
    assert!(o.status.success());
    assert!(out.join("report.csv").exists() && out.join("report.json").exists());
}
