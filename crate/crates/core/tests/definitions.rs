mod common;

use common::{random_model, random_system, unary_signature, Gen};
use porphyry_core::defsys::{
    dependency_graph, expand_model, unfold, validate, Definition, ViolationKind,
};
use porphyry_core::eval::evaluate;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

#[test]
fn permutations_flag_exactly_the_forward_references() {
    let mut rng = common::rng(31);
    for _ in 0..200 {
        let n = rng.gen_range(2..6);
        let mut d = random_system(&mut rng, 2, n);
        assert!(validate(&d).is_valid());
        d.definitions.shuffle(&mut rng);
        let position: BTreeMap<String, usize> = d
            .definitions
            .iter()
            .enumerate()
            .map(|(i, def)| (def.name().to_string(), i))
            .collect();
        let expected: BTreeSet<usize> = d
            .definitions
            .iter()
            .enumerate()
            .filter(|(i, def)| {
                let Definition::Predicate(p) = def else { unreachable!() };
                p.body.predicates().keys().any(|s| position.get(s).is_some_and(|j| j > i))
            })
            .map(|(i, _)| i)
            .collect();
        let report = validate(&d);
        assert_eq!(report.flagged_entries(), expected);
        assert!(report.violations.iter().all(|v| v.kind == ViolationKind::ForwardReference));
        assert_eq!(report.is_valid(), expected.is_empty());
    }
}

#[test]
fn dependency_graphs_of_valid_systems_are_acyclic() {
    let mut rng = common::rng(32);
    for _ in 0..200 {
        let n = rng.gen_range(0..7);
        let d = random_system(&mut rng, 3, n);
        let g = dependency_graph(&d).unwrap();
        assert!(g.is_acyclic());
        for &(from, to) in &g.edges {
            assert!(to < from);
            let Definition::Predicate(p) = &d.definitions[from] else { unreachable!() };
            assert!(p.body.mentions_predicate(&g.nodes[to]));
        }
    }
}

#[test]
fn unfolding_agrees_with_model_expansion() {
    let mut rng = common::rng(33);
    for case in 0..200 {
        let n = rng.gen_range(1..5);
        let d = random_system(&mut rng, 2, n);
        let sig = d.expanded_signature();
        let f = Gen::new(&sig, 4, 2).open(&mut rng, &["x"]);
        let u = unfold(&f, &d).unwrap();
        assert!(u.predicates().keys().all(|p| d.base.arity(p).is_some()));
        for size in 1..=4 {
            let m = random_model(&mut rng, &unary_signature(2), size);
            let expanded = expand_model(&d, &m).unwrap();
            for e in 0..size {
                let a = BTreeMap::from([("x".to_string(), e)]);
                let a_f: BTreeMap<_, _> = a.iter().filter(|(v, _)| f.free_vars().contains(*v)).map(|(v, e)| (v.clone(), *e)).collect();
                let a_u: BTreeMap<_, _> = a.iter().filter(|(v, _)| u.free_vars().contains(*v)).map(|(v, e)| (v.clone(), *e)).collect();
                assert_eq!(
                    evaluate(&f, &expanded, &a_f),
                    evaluate(&u, &m, &a_u),
                    "case {case}: {f} vs {u}"
                );
            }
        }
    }
}

#[test]
fn self_reference_and_clashes_are_located() {
    let mut rng = common::rng(34);
    for _ in 0..100 {
        let mut d = random_system(&mut rng, 2, 4);
        let i = rng.gen_range(0..4);
        let Definition::Predicate(p) = &mut d.definitions[i] else { unreachable!() };
        p.body = porphyry_core::Formula::and(porphyry_core::Formula::pred(&p.name.clone(), &["x"]), p.body.clone());
        let r = validate(&d);
        assert_eq!(r.flagged_entries(), BTreeSet::from([i]));
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::SelfReference));
    }
}
