use porphyry_cli::{run, Output, EXIT_FOUND, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use porphyry_core::parse_document;
use serde_json::Value;
use std::path::PathBuf;

fn pdl(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "pdl", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn porphyry(args: &[&str]) -> Output {
    run(std::iter::once("porphyry").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = porphyry(&all);
    (out.code, serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout)))
}

/// Re-parses an emitted model block against the signature it mentions.
fn reparse_model(block: &str, sig: &str) -> porphyry_core::FiniteModel {
    let doc = parse_document(&format!("sig {{ {sig} }}\n{block}")).unwrap();
    doc.models.into_iter().next().unwrap().1
}

#[test]
fn check_accepts_the_group_chain() {
    let out = porphyry(&["check", &pdl("grp.pdl")]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.starts_with("verdict: valid"));
    let (_, v) = json(&["check", &pdl("grp.pdl")]);
    assert_eq!(v["verdict"], "valid");
    assert_eq!(v["violations"], Value::Array(vec![]));
}

#[test]
fn check_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.pdl");
    std::fs::write(&path, "sig { pred M1/1; } def A(x) := A(x) & M1(x);").unwrap();
    let (code, v) = json(&["check", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_FOUND);
    assert_eq!(v["verdict"], "invalid");
    assert_eq!(v["violations"][0]["kind"], "self-reference");
    assert_eq!(v["violations"][0]["entry"], 0);
}

#[test]
fn parse_errors_are_positioned() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.pdl");
    std::fs::write(&path, "sig { pred M1/1; }\ndef A(x) := M1(x) &;").unwrap();
    let out = porphyry(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("broken.pdl:2:"), "{}", out.stderr);
    assert_eq!(porphyry(&["check", "/nonexistent.pdl"]).code, EXIT_USAGE);
    assert_eq!(porphyry(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(porphyry(&["--bound", "0", "check", &pdl("grp.pdl")]).code, EXIT_USAGE);
}

#[test]
fn entail_emits_a_checkable_countermodel() {
    let args = [
        "entail",
        "--lhs",
        "forall x. M1(x)",
        "--rhs",
        "forall x. M2(x)",
        "--sig",
        "pred M1/1; pred M2/1",
    ];
    let (code, v) = json(&args);
    assert_eq!(code, EXIT_FOUND);
    assert_eq!(v["result"], "countermodel");
    assert_eq!(v["engine"], "exact-monadic");
    let m = reparse_model(v["countermodel"].as_str().unwrap(), "pred M1/1; pred M2/1;");
    assert_eq!(m.relation("M1").unwrap().len(), m.size());
    assert!(m.relation("M2").unwrap().is_empty());
    assert_eq!(porphyry(&args).code, EXIT_FOUND);
}

#[test]
fn entail_exit_codes() {
    let holds = porphyry(&["entail", "--lhs", "M1(x) & M2(x)", "--rhs", "M1(x)"]);
    assert_eq!(holds.code, EXIT_OK, "{}", holds.stderr);
    let bounded = porphyry(&["entail", "--lhs", "forall x. R(x,x)", "--rhs", "exists y. R(y,y)"]);
    assert_eq!(bounded.code, EXIT_INCONCLUSIVE);
    assert!(bounded.stdout.contains("inconclusive"));
    let cycle = porphyry(&[
        "--bound", "3", "entail", "--lhs", "exists x1. R(c,x1) & R(x1,c)",
        "--rhs", "exists x1. exists x2. R(c,x1) & R(x1,x2) & R(x2,c)", "--sig", "pred R/2; const c",
    ]);
    assert_eq!(cycle.code, EXIT_FOUND);
    assert!(cycle.stdout.contains("universe 2;"));
}

#[test]
fn ceiling_guard_is_inconclusive() {
    let out = porphyry(&[
        "--ceiling", "10", "entail", "--lhs", "forall x. R(x,x)", "--rhs", "exists y. R(y,y)",
    ]);
    assert_eq!(out.code, EXIT_INCONCLUSIVE);
    assert!(out.stderr.contains("ceiling"));
}

#[test]
fn ceiling_can_come_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_porphyry");
    let out = std::process::Command::new(bin)
        .env("PORPHYRY_CEILING", "10")
        .args(["entail", "--lhs", "forall x. R(x,x)", "--rhs", "exists y. R(y,y)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INCONCLUSIVE));
    let flag = std::process::Command::new(bin)
        .env("PORPHYRY_CEILING", "10")
        .args(["--ceiling", "100000000", "entail", "--lhs", "forall x. R(x,x)", "--rhs", "exists y. R(y,y)"])
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(EXIT_INCONCLUSIVE));
    assert!(String::from_utf8_lossy(&flag.stdout).contains("up to size 4"));
}

#[test]
fn sat_and_normalize() {
    let (code, v) = json(&["sat", "--formula", "(forall x. M1(x) -> M2(x)) & exists x. M1(x)", "--sig", "pred M1/1; pred M2/1"]);
    assert_eq!(code, EXIT_OK);
    let m = reparse_model(v["model"].as_str().unwrap(), "pred M1/1; pred M2/1;");
    assert_eq!(m.size(), 1);
    let unsat = porphyry(&["sat", "--formula", "(exists x. M1(x)) & forall x. !M1(x)", "--sig", "pred M1/1"]);
    assert_eq!(unsat.code, EXIT_FOUND);
    let out = porphyry(&["normalize", "--formula", "M2(x) & exists y. M1(y)", "--sig", "pred M1/1; pred M2/1", "--var", "x"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "M2(x) & (exists y. M1(y))\npure: no\n");
    let pure = porphyry(&["normalize", "--formula", "M1(x) | !M1(x)", "--sig", "pred M1/1"]);
    assert!(pure.stdout.ends_with("pure: yes\n"));
    let rel = porphyry(&["normalize", "--formula", "exists y. R(x,y)", "--sig", "pred R/2"]);
    assert_eq!(rel.code, EXIT_USAGE);
}

#[test]
fn tree_and_classification() {
    let out = porphyry(&["tree", &pdl("grp.pdl"), "--dot"]);
    assert!(out.stdout.contains("\"Ab\" -> \"Grp\" [label=\"Comm(x)\"]"));
    assert!(out.stdout.contains("\"Grp\" -> \"Mon\" [label=\"HasInv(x)\"]"));
    let (_, v) = json(&["tree", &pdl("grp.pdl")]);
    assert_eq!(v["roots"], serde_json::json!(["Mon"]));
    let (code, v) = json(&["classify", &pdl("toy.pdl"), "--species", "S", "--formula", "M1(x)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "accident");
    assert_eq!(v["exact"], true);
    let cm = v["evidence"][1]["countermodel"].as_str().unwrap();
    let m = reparse_model(cm, "pred M1/1; pred M2/1;");
    assert!(m.relation("M2").unwrap().is_empty());
    let (_, v) = json(&["classify", &pdl("grp.pdl"), "--species", "Ab", "--formula", "Comm(x)"]);
    assert_eq!(v["verdict"], "difference");
    let bad = porphyry(&["classify", &pdl("grp.pdl"), "--species", "Nope", "--formula", "Comm(x)"]);
    assert_eq!(bad.code, EXIT_USAGE);
}

#[test]
fn reconstruct_round_trips_through_the_parser() {
    let (code, v) = json(&["reconstruct", &pdl("toy.pdl"), "--model", "four", "--family", "@nested"]);
    assert_eq!(code, EXIT_OK);
    let doc = parse_document(v["document"].as_str().unwrap()).unwrap();
    assert_eq!(doc.system.definitions.len(), 3);
    let inline = porphyry(&["reconstruct", &pdl("toy.pdl"), "--model", "four", "--family", "A={0,1,2,3};B={0,1};C={0}"]);
    assert_eq!(inline.stdout, v["document"].as_str().unwrap());
    let crossing = porphyry(&["reconstruct", &pdl("toy.pdl"), "--model", "four", "--family", "@crossing"]);
    assert_eq!(crossing.code, EXIT_FOUND);
    let coarse = porphyry(&["reconstruct", &pdl("toy.pdl"), "--model", "four", "--family", "A={2}"]);
    assert_eq!(coarse.code, EXIT_FOUND);
    assert!(coarse.stdout.starts_with("undefinable"));
}

#[test]
fn generators_and_proximate() {
    let (code, v) = json(&["generators", &pdl("theory.pdl")]);
    assert_eq!(code, EXIT_OK);
    let flags: Vec<bool> = v["sentences"].as_array().unwrap().iter().map(|s| s["generator"].as_bool().unwrap()).collect();
    assert_eq!(flags, vec![true, false, false]);
    let (code, v) = json(&["proximate", &pdl("grp.pdl"), "--species", "Ab", "--candidates", "Mon,Grp"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["genus"], "Grp");
    assert_eq!(v["difference"], "Comm(x)");
    let none = porphyry(&["proximate", &pdl("grp.pdl"), "--species", "Mon", "--candidates", "Grp"]);
    assert_eq!(none.code, EXIT_FOUND);
}

#[test]
fn demo_output_reparses() {
    let out = porphyry(&["demo", "magma", "--max-size", "2"]);
    assert_eq!(out.code, EXIT_OK);
    let doc = parse_document(&out.stdout).unwrap();
    assert_eq!(doc.model("magma").unwrap().size(), 17);
    let (_, v) = json(&["demo", "magma", "--max-size", "1"]);
    assert_eq!(v["universe"], 1);
    for c in ["Mon", "Grp", "Ab"] {
        assert_eq!(v["counts"][c], 1);
    }
    assert_eq!(porphyry(&["demo", "magma", "--max-size", "4"]).code, EXIT_USAGE);
}

#[test]
fn json_errors_are_objects() {
    let (code, v) = json(&["check", "/nonexistent.pdl"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(v["exit_code"], EXIT_USAGE);
    assert!(v["error"].is_string());
}
