mod common;

use common::{unary_signature, Gen};
use porphyry_core::eval::evaluate;
use porphyry_core::monadic::{decide_entails, decide_sat, monadic_normal_form, SatResult};
use porphyry_core::semantics::{enumerate_models, DEFAULT_CEILING};
use porphyry_core::{Formula, Signature};
use std::collections::BTreeMap;

/// Satisfiable over sizes `1..=max` by exhaustive enumeration.
fn brute_sat(f: &Formula, sig: &Signature, max: usize) -> Option<usize> {
    let sig = sig.restrict_to([f]);
    (1..=max).find(|&n| {
        enumerate_models(&sig, n, 1 << 24)
            .unwrap()
            .any(|m| evaluate(f, &m, &BTreeMap::new()) == Ok(true))
    })
}

#[test]
fn decision_agrees_with_enumeration() {
    let mut rng = common::rng(21);
    let sig = unary_signature(2).with_predicate("p", 0);
    let mut sat = 0;
    for case in 0..400 {
        let f = Gen::new(&sig, 4, 2).sentence(&mut rng);
        let expected = brute_sat(&f, &sig, 4);
        let got = decide_sat(&f, DEFAULT_CEILING).unwrap();
        match (&got, expected) {
            (SatResult::Sat(m), Some(min)) => {
                sat += 1;
                assert_eq!(m.size(), min, "case {case}: witness is not minimal for {f}");
                assert_eq!(evaluate(&f, m, &BTreeMap::new()), Ok(true));
            }
            (SatResult::Unsat, None) => {}
            _ => panic!("case {case}: {f}: decided {got:?}, enumeration found {expected:?}"),
        }
    }
    assert!(sat >= 10 && 400 - sat >= 10, "generator is degenerate: {sat} satisfiable");
}

#[test]
fn all_cells_bound_is_tight() {
    let cells = ["M1(x) & M2(x)", "M1(x) & !M2(x)", "!M1(x) & M2(x)", "!M1(x) & !M2(x)"];
    let src = cells.map(|c| format!("(exists x. {c})")).join(" & ");
    let syms = porphyry_core::Symbols::from_signature(&unary_signature(2));
    let f = porphyry_core::parse_formula(&src, &syms).unwrap();
    assert_eq!(brute_sat(&f, &unary_signature(2), 3), None);
    let SatResult::Sat(m) = decide_sat(&f, DEFAULT_CEILING).unwrap() else { panic!() };
    assert_eq!(m.size(), 4);
}

#[test]
fn normal_forms_are_equivalent() {
    let mut rng = common::rng(22);
    let sig = unary_signature(3);
    let mut impure = 0;
    for case in 0..200 {
        let f = Gen::new(&sig, 4, 2).open(&mut rng, &["x"]);
        let nf = monadic_normal_form(&f, "x", &sig, DEFAULT_CEILING).unwrap();
        let g = nf.to_formula();
        assert!(decide_entails(&f, &g, DEFAULT_CEILING).unwrap().holds(), "case {case}: {f}");
        assert!(decide_entails(&g, &f, DEFAULT_CEILING).unwrap().holds(), "case {case}: {f}");
        let cells: Vec<_> = nf.disjuncts.iter().map(|(c, _)| c.clone()).collect();
        for (i, c) in cells.iter().enumerate() {
            assert!(!cells[i + 1..].contains(c));
        }
        impure += usize::from(!nf.pure);
    }
    assert!(impure > 0);
}
