#![allow(dead_code)]

use porphyry_core::model::{FiniteModel, Relation};
use porphyry_core::{Formula, Signature, Term};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn unary_signature(k: usize) -> Signature {
    (1..=k).fold(Signature::new(), |s, i| s.with_predicate(&format!("M{i}"), 1))
}

/// Random formula generator over a fixed signature.
pub struct Gen<'a> {
    pub sig: &'a Signature,
    pub max_depth: usize,
    pub max_quantifiers: usize,
    /// Give every binder a new name.
    pub distinct_binders: bool,
    pub counter: usize,
}

impl<'a> Gen<'a> {
    pub fn new(sig: &'a Signature, max_depth: usize, max_quantifiers: usize) -> Self {
        Gen {
            sig,
            max_depth,
            max_quantifiers,
            distinct_binders: false,
            counter: 0,
        }
    }

    pub fn sentence(&mut self, rng: &mut ChaCha8Rng) -> Formula {
        self.formula(rng, &mut Vec::new(), self.max_depth, self.max_quantifiers)
    }

    pub fn open(&mut self, rng: &mut ChaCha8Rng, free: &[&str]) -> Formula {
        let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
        self.formula(rng, &mut scope, self.max_depth, self.max_quantifiers)
    }

    fn binder(&mut self, rng: &mut ChaCha8Rng) -> String {
        if self.distinct_binders {
            self.counter += 1;
            format!("v{}", self.counter)
        } else {
            ["x", "y", "z"].choose(rng).unwrap().to_string()
        }
    }

    fn term(&self, rng: &mut ChaCha8Rng, scope: &[String]) -> Option<Term> {
        let n = scope.len() + self.sig.constants.len();
        if n == 0 {
            return None;
        }
        let i = rng.gen_range(0..n);
        Some(if i < scope.len() {
            Term::Var(scope[i].clone())
        } else {
            Term::Const(self.sig.constants[i - scope.len()].clone())
        })
    }

    fn atom(&self, rng: &mut ChaCha8Rng, scope: &[String]) -> Option<Formula> {
        let usable: Vec<&(String, usize)> = self
            .sig
            .predicates
            .iter()
            .filter(|(_, a)| *a == 0 || !scope.is_empty() || !self.sig.constants.is_empty())
            .collect();
        if self.sig.equality && rng.gen_bool(0.15) {
            if let (Some(a), Some(b)) = (self.term(rng, scope), self.term(rng, scope)) {
                return Some(Formula::Eq(a, b));
            }
        }
        let (p, a) = usable.choose(rng)?;
        let args = (0..*a).map(|_| self.term(rng, scope)).collect::<Option<Vec<_>>>()?;
        Some(Formula::Pred(p.clone(), args))
    }

    pub fn formula(&mut self, rng: &mut ChaCha8Rng, scope: &mut Vec<String>, depth: usize, q: usize) -> Formula {
        let leaf = depth == 0 || rng.gen_bool(0.25);
        if leaf {
            if let Some(a) = self.atom(rng, scope) {
                return a;
            }
            if q == 0 || depth == 0 {
                return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
            }
        }
        let choice = if scope.is_empty() && q > 0 && self.atom(rng, scope).is_none() {
            6
        } else {
            rng.gen_range(0..if q > 0 { 8 } else { 6 })
        };
        let d = depth.saturating_sub(1);
        match choice {
            0 | 1 => Formula::not(self.formula(rng, scope, d, q)),
            2 => Formula::and(self.formula(rng, scope, d, q), self.formula(rng, scope, d, q)),
            3 => Formula::or(self.formula(rng, scope, d, q), self.formula(rng, scope, d, q)),
            4 => Formula::implies(self.formula(rng, scope, d, q), self.formula(rng, scope, d, q)),
            5 => Formula::iff(self.formula(rng, scope, d, q), self.formula(rng, scope, d, q)),
            _ => {
                let v = self.binder(rng);
                scope.push(v.clone());
                let body = self.formula(rng, scope, d, q - 1);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::forall(&v, body)
                } else {
                    Formula::exists(&v, body)
                }
            }
        }
    }
}

pub fn random_model(rng: &mut ChaCha8Rng, sig: &Signature, size: usize) -> FiniteModel {
    let mut m = FiniteModel::new(size).unwrap();
    for c in &sig.constants {
        m.set_constant(c, rng.gen_range(0..size)).unwrap();
    }
    for (p, a) in &sig.predicates {
        let tuples: Vec<Vec<usize>> = porphyry_core::eval::assignments(*a, size)
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        m.set_relation(p, Relation::from_tuples(*a, size, tuples).unwrap()).unwrap();
    }
    m
}

/// A valid system over `M1..Mk` with `n` unary definitions `D0..`, each
/// mentioning base predicates and earlier definitions.
pub fn random_system(rng: &mut ChaCha8Rng, k: usize, n: usize) -> porphyry_core::DefinitionSystem {
    let mut d = porphyry_core::DefinitionSystem::new(unary_signature(k));
    for i in 0..n {
        let sig = d.expanded_signature();
        let mut gen = Gen::new(&sig, 3, 1);
        let mut body = gen.open(rng, &["x"]);
        while !body.free_vars().iter().all(|v| v == "x") || body.free_vars().is_empty() {
            body = Formula::and(Formula::pred(&sig.predicates[rng.gen_range(0..sig.predicates.len())].0, &["x"]), body);
        }
        d = d.define(&format!("D{i}"), &["x"], body);
    }
    d
}

/// Distinct, nonempty, laminar unions of the cells of `m` over its unary
/// predicates.
pub fn random_laminar_family(rng: &mut ChaCha8Rng, m: &FiniteModel) -> Vec<(String, std::collections::BTreeSet<usize>)> {
    let unary: Vec<&str> = m.relations().filter(|(_, r)| r.arity() == 1).map(|(p, _)| p).collect();
    let mut cells: BTreeMap<Vec<bool>, std::collections::BTreeSet<usize>> = BTreeMap::new();
    for e in 0..m.size() {
        let key = unary.iter().map(|p| m.relation(p).unwrap().contains(&[e])).collect();
        cells.entry(key).or_default().insert(e);
    }
    let cells: Vec<std::collections::BTreeSet<usize>> = cells.into_values().collect();
    let mut out = Vec::new();
    let mut pending: Vec<Vec<usize>> = vec![(0..cells.len()).filter(|_| rng.gen_bool(0.8)).collect()];
    if pending[0].is_empty() {
        pending[0].push(0);
    }
    let mut first = true;
    while let Some(group) = pending.pop() {
        if first || rng.gen_bool(0.8) {
            out.push(group.iter().flat_map(|&c| cells[c].iter().copied()).collect());
        }
        first = false;
        if group.len() < 2 {
            continue;
        }
        let mut rest = group.clone();
        rest.shuffle(rng);
        rest.truncate(rng.gen_range(1..group.len()));
        while !rest.is_empty() {
            let take = rng.gen_range(1..=rest.len());
            pending.push(rest.drain(..take).collect());
        }
    }
    out.into_iter().enumerate().map(|(i, s)| (format!("G{i}"), s)).collect()
}
