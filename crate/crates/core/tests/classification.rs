mod common;

use common::{random_model, unary_signature, Gen};
use porphyry_core::defsys::{expand_model, unfold};
use porphyry_core::eval::extension;
use porphyry_core::predicabilia::{classify_formula, generators, porphyry_tree, Engine};
use porphyry_core::{DefinitionSystem, Formula};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Guarded system: `D0` over the base, each later `Di := Dj(x) & δ(x)`.
fn guarded_system(rng: &mut ChaCha8Rng, k: usize, n: usize) -> DefinitionSystem {
    let base = unary_signature(k);
    let mut d = DefinitionSystem::new(base.clone());
    for i in 0..n {
        let delta = loop {
            let f = Gen::new(&base, 3, 1).open(rng, &["x"]);
            if f.free_vars().contains("x") {
                break f;
            }
        };
        let body = if i == 0 {
            delta
        } else {
            let j = rng.gen_range(0..i);
            Formula::and(Formula::pred(&format!("D{j}"), &["x"]), delta)
        };
        d = d.define(&format!("D{i}"), &["x"], body);
    }
    d
}

fn ext(f: &Formula, m: &porphyry_core::FiniteModel) -> BTreeSet<usize> {
    extension(f, "x", m).unwrap().into_iter().collect()
}

#[test]
fn edges_are_intersections_and_differences_oppose() {
    let mut rng = common::rng(41);
    for _ in 0..60 {
        let d = guarded_system(&mut rng, 2, 4);
        let tree = porphyry_tree(&d).unwrap();
        assert_eq!(tree.edges.len(), 3);
        assert_eq!(tree.roots, vec!["D0"]);
        for _ in 0..10 {
            let size = rng.gen_range(1..=4);
            let m = expand_model(&d, &random_model(&mut rng, &unary_signature(2), size)).unwrap();
            for e in &tree.edges {
                let species = ext(&Formula::pred(&e.species, &["x"]), &m);
                let genus = ext(&Formula::pred(&e.genus, &["x"]), &m);
                let delta = ext(&e.difference_at("x"), &m);
                let opposite = ext(&Formula::not(e.difference_at("x")), &m);
                assert_eq!(species, &genus & &delta);
                let other = &genus & &opposite;
                assert!(species.is_disjoint(&other));
                assert_eq!(&species | &other, genus);
            }
        }
    }
}

#[test]
fn verdicts_survive_unfolding() {
    let mut rng = common::rng(42);
    let engine = Engine::default();
    let mut kinds = BTreeSet::new();
    for _ in 0..100 {
        let d = guarded_system(&mut rng, 2, 3);
        let sig = d.expanded_signature();
        let rho = Gen::new(&sig, 3, 1).open(&mut rng, &["x"]);
        let species = format!("D{}", rng.gen_range(0..3));
        let v = classify_formula(&rho, "x", &species, &d, &engine).unwrap();
        let u = classify_formula(&unfold(&rho, &d).unwrap(), "x", &species, &d, &engine).unwrap();
        assert_eq!(v.kind, u.kind, "{rho}");
        assert!(v.exact);
        assert!(v.evidence.iter().all(|e| e.revalidate()));
        kinds.insert(v.kind);
    }
    assert!(kinds.len() >= 3, "{kinds:?}");
}

#[test]
fn generators_are_mutually_equivalent() {
    let mut rng = common::rng(43);
    let sig = unary_signature(2).with_predicate("p", 0);
    let engine = Engine::default();
    let mut flagged_total = 0;
    for _ in 0..100 {
        let mut gen = Gen::new(&sig, 3, 2);
        let mut list: Vec<Formula> = (0..3).map(|_| gen.sentence(&mut rng)).collect();
        let strong = Formula::conjoin(list.clone());
        list.push(strong.clone());
        if rng.gen_bool(0.5) {
            list.push(Formula::and(Formula::True, strong));
        }
        let t = generators(&list, &engine).unwrap();
        let flagged: Vec<&Formula> = t.generators().collect();
        flagged_total += flagged.len();
        for a in &flagged {
            for b in &flagged {
                assert!(engine.entails(a, b).unwrap().holds());
            }
        }
        for (i, row) in t.evidence.iter().enumerate() {
            assert_eq!(t.generator_flags[i], row.iter().flatten().all(|e| e.holds()));
        }
    }
    assert!(flagged_total >= 100);
}
