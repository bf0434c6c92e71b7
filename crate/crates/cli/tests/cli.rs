use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use netci::exactprob::DistFile;
use netci::finalg::AbelianGroup;
use netci::labeling::{synthesize_fnf, LabelingFile};
use netci::netmodel::{Code, Network};
use serde_json::Value;
use tempfile::TempDir;

fn netci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netci")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn fnf_file(dir: &TempDir, order: u32) -> String {
    let g = Arc::new(AbelianGroup::cyclic(order).unwrap());
    let (d, _) = synthesize_fnf(&g).unwrap();
    write(dir, "fnf.json", &serde_json::to_string(&DistFile::from_distribution(&d)).unwrap())
}

#[test]
fn check_fnf_on_synthesized_z2() {
    let dir = TempDir::new().unwrap();
    let f = fnf_file(&dir, 2);
    let o = netci(&["check-fnf", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_fnf_fails_when_a_sum_is_replaced() {
    let dir = TempDir::new().unwrap();
    let g = Arc::new(AbelianGroup::cyclic(2).unwrap());
    let (d, _) = synthesize_fnf(&g).unwrap();
    let mut f = DistFile::from_distribution(&d);
    let a1 = f.variables.iter().position(|v| v.name == "A1").unwrap();
    let a12 = f.variables.iter().position(|v| v.name == "A12").unwrap();
    for a in &mut f.atoms {
        a.values[a12] = a.values[a1];
    }
    let p = write(&dir, "bad.json", &serde_json::to_string(&f).unwrap());
    let o = netci(&["--json", "check-fnf", &p]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "fail");
    assert!(v["report"]["failing_clause"].as_str().unwrap().contains("ι≤"));
}

#[test]
fn recover_labeling_writes_a_labeling_file() {
    let dir = TempDir::new().unwrap();
    let f = fnf_file(&dir, 3);
    let out = dir.path().join("lab.json");
    let o = netci(&["recover-labeling", &f, "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let lab: LabelingFile = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(lab.order, 3);
}

#[test]
fn check_predicate_variants() {
    let dir = TempDir::new().unwrap();
    let f = fnf_file(&dir, 3);
    assert_eq!(code(&netci(&["check-predicate", &f, "tri", "A1", "A2", "A12"])), 0);
    assert_eq!(code(&netci(&["check-predicate", &f, "ci", "A1", "A2", "-"])), 0);
    assert_eq!(code(&netci(&["check-predicate", &f, "ci", "A1", "A12", "-"])), 0);
    assert_eq!(code(&netci(&["check-predicate", &f, "fd", "A12", "A1,A2"])), 0);
    assert_eq!(code(&netci(&["check-predicate", &f, "fd", "A12", "A1"])), 1);
    assert_eq!(code(&netci(&["check-predicate", &f, "fnf-reduced"])), 0);
    // Wrong arity is a usage error.
    assert_eq!(code(&netci(&["check-predicate", &f, "tri", "A1"])), 3);
}

#[test]
fn solve_butterfly_and_budget_refusal() {
    let bf = data("butterfly.json");
    let o = netci(&["solve", &bf, "--q", "2"]);
    assert_eq!(code(&o), 0);
    let c: Code = serde_json::from_str(&stdout(&o)).unwrap();
    let net: Network = serde_json::from_str(&std::fs::read_to_string(&bf).unwrap()).unwrap();
    assert!(netci::netmodel::eval_code(&net, &c).unwrap());
    let o = netci(&["--json", "solve", &bf, "--q", "2", "--budget", "1", "--no-precheck"]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "refused");
}

#[test]
fn bottleneck_removed_butterfly_is_unsolvable() {
    let dir = TempDir::new().unwrap();
    let mut net: Network = serde_json::from_str(&std::fs::read_to_string(data("butterfly.json")).unwrap()).unwrap();
    net.edges.retain(|e| e.id != "mid-relay");
    let p = write(&dir, "cut.json", &net.to_json());
    assert_eq!(code(&netci(&["solve", &p, "--q", "2"])), 1);
}

#[test]
fn witness_round_trip_through_verify_commands() {
    let dir = TempDir::new().unwrap();
    let words = data("square.json");
    let code_path = dir.path().join("code.json");
    let o = netci(&["witness", &words, "--group", &data("z2.json"), "--assign", "1,0", "--p", "2", "-o", code_path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&netci(&["verify-witness", &words, code_path.to_str().unwrap()])), 0);
    let net = dir.path().join("net.json");
    assert_eq!(code(&netci(&["compile-network", &words, "-o", net.to_str().unwrap()])), 0);
    let o = netci(&["verify-linear", net.to_str().unwrap(), code_path.to_str().unwrap(), "--field", "gf(2^2)"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = netci(&["verify-linear", net.to_str().unwrap(), code_path.to_str().unwrap(), "--field", "gf(3)"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn witness_with_identity_goal_cites_the_counting_obstruction() {
    let o = netci(&["witness", &data("square.json"), "--group", &data("z2.json"), "--assign", "0,0", "--p", "2"]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.contains("at most q^3"), "{s}");
    assert!(s.contains("3 of 4"), "{s}");
}

#[test]
fn compile_commands_are_deterministic() {
    let words = data("commutator.json");
    for cmd in ["normalize", "compile-ci", "compile-network", "entropic-export"] {
        let a = netci(&[cmd, &words]);
        let b = netci(&[cmd, &words]);
        assert_eq!(code(&a), 0, "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
    let v: Value = serde_json::from_str(&stdout(&netci(&["compile-ci", &data("square.json")]))).unwrap();
    // k = 2 and l = 1 before the identity variable is added.
    assert_eq!(v["antecedents"].as_array().unwrap().len(), netci::reduction::ci_census(3, 2).0);
    assert_eq!(v["consequent"]["origin"], "goal");
}

#[test]
fn dot_output_marks_the_final_demand() {
    let o = netci(&["compile-network", &data("square.json"), "--dot"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("digraph"));
    assert!(s.contains("dem:goal#1"));
}

#[test]
fn malformed_input_exits_3_with_position() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "broken.json", "{\n  \"k\": 2,\n  \"relations\": [[1, 1\n}");
    let o = netci(&["normalize", &p]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let p = write(&dir, "range.json", r#"{"k": 2, "relations": [[1, 1, 3]]}"#);
    assert_eq!(code(&netci(&["compile-ci", &p])), 3);
    assert_eq!(code(&netci(&["check-fnf", "/nonexistent/file.json"])), 3);
}

#[test]
fn lrr_rank_report() {
    let o = netci(&["--json", "lrr-rank", "--group", &data("z3.json"), "--field", "gf(2)"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["all_ok"], true);
}
