//! Exhaustive model enumeration and bounded semantic entailment.
//!
//! Models of a given size are numbered. Index `i` decodes as follows: the
//! low "digits" of `i` in base `n` give the constants, first declared
//! constant fastest; the remaining quotient is a bitmask over all predicate
//! tables, first declared predicate in the lowest bits, each table in
//! lexicographic tuple order. Counting upward therefore varies constants
//! fastest and then the predicate bitmask. Reported countermodels are the
//! first in this order, at the smallest size.

use crate::eval::{assignments, evaluate, Compiled, EvalError, Interp, Layout};
use crate::formula::{Formula, Signature};
use crate::model::{FiniteModel, Relation};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Largest number of models of a single size that may be enumerated unless
/// the caller raises it: 2^24. A single binary predicate at size 5 needs 2^25.
pub const DEFAULT_CEILING: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("{count} models of size {size} exceed the enumeration ceiling of {ceiling}")]
    ResourceLimit { size: usize, count: String, ceiling: u64 },
    #[error("entailment bound must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub ceiling: u64,
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            ceiling: DEFAULT_CEILING,
            parallel: true,
        }
    }
}

impl EnumOptions {
    pub fn with_ceiling(ceiling: u64) -> Self {
        EnumOptions {
            ceiling,
            ..Self::default()
        }
    }

    pub fn sequential(self) -> Self {
        EnumOptions {
            parallel: false,
            ..self
        }
    }
}

/// Number of models of `sig` of exactly `size` elements, or `None` when it
/// does not fit in 128 bits.
pub fn model_count(sig: &Signature, size: usize) -> Option<u128> {
    let bits: usize = sig
        .predicates
        .iter()
        .map(|(_, a)| size.checked_pow(*a as u32))
        .sum::<Option<usize>>()?;
    if bits >= 128 {
        return None;
    }
    let consts = (size as u128).checked_pow(sig.constants.len() as u32)?;
    (1u128 << bits).checked_mul(consts)
}

/// The models of one signature and size, addressable by index.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    layout: Layout,
    size: usize,
    count: u64,
    const_states: u64,
}

impl ModelSpace {
    pub fn new(sig: &Signature, size: usize, ceiling: u64) -> Result<Self, SemanticsError> {
        assert!(size >= 1, "model spaces start at size 1");
        let count = model_count(sig, size);
        let count = match count {
            Some(c) if c <= ceiling as u128 => c as u64,
            other => {
                return Err(SemanticsError::ResourceLimit {
                    size,
                    count: other.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string()),
                    ceiling,
                })
            }
        };
        Ok(ModelSpace {
            layout: Layout::of_signature(sig),
            size,
            count,
            const_states: (size as u64).pow(sig.constants.len() as u32),
        })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn blank(&self) -> Interp {
        Interp {
            size: self.size,
            consts: vec![0; self.layout.constants.len()],
            rels: self
                .layout
                .predicates
                .iter()
                .map(|(_, a)| Relation::empty(*a, self.size))
                .collect(),
        }
    }

    /// Overwrites `interp` with model number `index`.
    pub fn decode_into(&self, index: u64, interp: &mut Interp) {
        let n = self.size as u64;
        let mut c = index % self.const_states;
        for slot in interp.consts.iter_mut() {
            *slot = (c % n) as usize;
            c /= n;
        }
        let mut mask = index / self.const_states;
        for rel in interp.rels.iter_mut() {
            for j in 0..rel.table_len() {
                rel.set_index(j, mask & 1 == 1);
                mask >>= 1;
            }
        }
    }

    pub fn model(&self, index: u64) -> FiniteModel {
        let mut interp = self.blank();
        self.decode_into(index, &mut interp);
        interp.to_model(&self.layout)
    }

    /// Smallest index whose model satisfies `pred`. The parallel search
    /// returns the same index as the sequential one.
    pub fn find_first<F>(&self, parallel: bool, pred: F) -> Option<u64>
    where
        F: Fn(&Interp) -> bool + Sync,
    {
        if parallel && self.count > 1024 {
            (0..self.count)
                .into_par_iter()
                .map_init(
                    || self.blank(),
                    |interp, i| {
                        self.decode_into(i, interp);
                        pred(interp).then_some(i)
                    },
                )
                .find_first(Option::is_some)
                .flatten()
        } else {
            let mut interp = self.blank();
            (0..self.count).find(|&i| {
                self.decode_into(i, &mut interp);
                pred(&interp)
            })
        }
    }
}

/// Every model of `sig` with exactly `size` elements, each once, in index
/// order.
pub fn enumerate_models(
    sig: &Signature,
    size: usize,
    ceiling: u64,
) -> Result<impl Iterator<Item = FiniteModel>, SemanticsError> {
    if size == 0 {
        return Err(SemanticsError::ZeroBound);
    }
    let space = ModelSpace::new(sig, size, ceiling)?;
    Ok((0..space.count).map(move |i| space.model(i)))
}

/// A model together with an assignment of the free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub model: FiniteModel,
    pub assignment: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntailmentVerdict {
    /// No countermodel with at most `bound` elements. Not a proof.
    HoldsUpTo(usize),
    Countermodel(Countermodel),
}

impl EntailmentVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, EntailmentVerdict::HoldsUpTo(_))
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match self {
            EntailmentVerdict::Countermodel(c) => Some(c),
            _ => None,
        }
    }
}

/// Default bound: 4 when some predicate has arity at least 2, otherwise
/// 2^k for k unary predicates (the exact small-model bound of the monadic
/// fragment).
pub fn default_bound(sig: &Signature) -> usize {
    if sig.max_arity() >= 2 {
        4
    } else {
        let k = sig.unary_predicates().count();
        1usize << k.min(16)
    }
}

/// Searches all models of size `1..=bound` for one where every premise holds
/// and the conclusion fails, under some assignment of the free variables.
///
/// Only the symbols that occur in the formulas are enumerated. Sizes are
/// visited in increasing order and the ceiling is checked per size, so a
/// countermodel at a small size is found even when a later size would be
/// too large.
pub fn bounded_entails(
    premises: &[Formula],
    conclusion: &Formula,
    sig: &Signature,
    bound: usize,
    opts: &EnumOptions,
) -> Result<EntailmentVerdict, SemanticsError> {
    if bound == 0 {
        return Err(SemanticsError::ZeroBound);
    }
    let all: Vec<&Formula> = premises.iter().chain([conclusion]).collect();
    let sig = sig.restrict_to(all.iter().copied());
    let layout = Layout::of_signature(&sig);
    let mut free = std::collections::BTreeSet::new();
    for f in &all {
        free.extend(f.free_vars());
    }
    let free: Vec<String> = free.into_iter().collect();
    let compiled_premises = premises
        .iter()
        .map(|p| Compiled::new(p, &layout, &free))
        .collect::<Result<Vec<_>, _>>()?;
    let compiled_conclusion = Compiled::new(conclusion, &layout, &free)?;

    for size in 1..=bound {
        let space = ModelSpace::new(&sig, size, opts.ceiling)?;
        let witness = |interp: &Interp| first_bad_assignment(interp, &free, &compiled_premises, &compiled_conclusion);
        if let Some(index) = space.find_first(opts.parallel, |i| witness(i).is_some()) {
            let mut interp = space.blank();
            space.decode_into(index, &mut interp);
            let values = witness(&interp).expect("witness found on re-decode");
            let model = space.model(index);
            let assignment: BTreeMap<String, usize> =
                free.iter().cloned().zip(values).collect();
            if !recheck(premises, conclusion, &model, &assignment) {
                unreachable!("countermodel failed re-evaluation");
            }
            return Ok(EntailmentVerdict::Countermodel(Countermodel { model, assignment }));
        }
    }
    Ok(EntailmentVerdict::HoldsUpTo(bound))
}

fn first_bad_assignment(
    interp: &Interp,
    free: &[String],
    premises: &[Compiled],
    conclusion: &Compiled,
) -> Option<Vec<usize>> {
    assignments(free.len(), interp.size).find(|values| {
        let mut env = conclusion.env(values);
        premises.iter().all(|p| {
            let mut penv = p.env(values);
            p.eval(interp, &mut penv)
        }) && !conclusion.eval(interp, &mut env)
    })
}

/// Independent re-check of a countermodel through the public evaluator.
pub fn recheck(
    premises: &[Formula],
    conclusion: &Formula,
    model: &FiniteModel,
    assignment: &BTreeMap<String, usize>,
) -> bool {
    let holds = |f: &Formula| {
        let local: BTreeMap<String, usize> = f
            .free_vars()
            .into_iter()
            .filter_map(|v| assignment.get(&v).map(|&e| (v, e)))
            .collect();
        evaluate(f, model, &local)
    };
    premises.iter().all(|p| holds(p) == Ok(true)) && holds(conclusion) == Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;

    fn unary(n: usize) -> Signature {
        let mut s = Signature::new();
        for i in 1..=n {
            s = s.with_predicate(&format!("M{i}"), 1);
        }
        s
    }

    #[test]
    fn model_counts() {
        let u = unary(1);
        assert_eq!(enumerate_models(&u, 1, DEFAULT_CEILING).unwrap().count(), 2);
        assert_eq!(enumerate_models(&u, 2, DEFAULT_CEILING).unwrap().count(), 4);
        let b = Signature::new().with_predicate("R", 2);
        assert_eq!(enumerate_models(&b, 2, DEFAULT_CEILING).unwrap().count(), 16);
    }

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        let sig = Signature::new()
            .with_predicate("R", 2)
            .with_predicate("P", 1)
            .with_constant("c");
        let models: Vec<_> = enumerate_models(&sig, 2, DEFAULT_CEILING).unwrap().collect();
        assert_eq!(models.len(), 16 * 4 * 2);
        let set: std::collections::HashSet<_> = models.iter().cloned().collect();
        assert_eq!(set.len(), models.len());
        // constants vary fastest
        assert_eq!(models[0].constant("c"), Some(0));
        assert_eq!(models[1].constant("c"), Some(1));
        assert_eq!(models[0].relation("R").unwrap().len(), 0);
        assert_eq!(models[2].relation("R").unwrap().tuples().collect::<Vec<_>>(), vec![vec![0, 0]]);
    }

    #[test]
    fn ceiling_guard() {
        let b = Signature::new().with_predicate("R", 2);
        assert!(matches!(
            enumerate_models(&b, 5, DEFAULT_CEILING),
            Err(SemanticsError::ResourceLimit { .. })
        ));
        assert!(enumerate_models(&b, 5, 1 << 25).is_ok());
    }

    #[test]
    fn reflexive_entailment_holds() {
        let sig = unary(2);
        let phi = Formula::forall(
            "x",
            Formula::implies(Formula::pred("M1", &["x"]), Formula::pred("M2", &["x"])),
        );
        let v = bounded_entails(std::slice::from_ref(&phi), &phi, &sig, 3, &EnumOptions::default()).unwrap();
        assert_eq!(v, EntailmentVerdict::HoldsUpTo(3));
    }

    #[test]
    fn universal_entails_existential_on_nonempty_domains() {
        let sig = unary(1);
        let all = Formula::forall("x", Formula::pred("M1", &["x"]));
        let some = Formula::exists("x", Formula::pred("M1", &["x"]));
        let v = bounded_entails(&[all], &some, &sig, 4, &EnumOptions::default()).unwrap();
        assert!(v.holds());
    }

    #[test]
    fn free_variables_get_witness_assignment() {
        let sig = unary(2);
        let v = bounded_entails(
            &[Formula::pred("M1", &["x"])],
            &Formula::pred("M2", &["x"]),
            &sig,
            2,
            &EnumOptions::default(),
        )
        .unwrap();
        let cm = v.countermodel().unwrap();
        assert_eq!(cm.model.size(), 1);
        assert_eq!(cm.assignment, BTreeMap::from([("x".to_string(), 0)]));
        assert!(cm.model.relation("M1").unwrap().contains(&[0]));
    }

    #[test]
    fn zero_bound_rejected() {
        let f = Formula::True;
        assert_eq!(
            bounded_entails(&[], &f, &Signature::new(), 0, &EnumOptions::default()),
            Err(SemanticsError::ZeroBound)
        );
    }

    #[test]
    fn equality_formula_enumerates() {
        let sig = Signature { equality: true, ..Signature::new() };
        let all_equal = Formula::forall(
            "x",
            Formula::forall("y", Formula::Eq(Term::var("x"), Term::var("y"))),
        );
        let v = bounded_entails(&[], &all_equal, &sig, 3, &EnumOptions::default()).unwrap();
        assert_eq!(v.countermodel().unwrap().model.size(), 2);
    }
}
