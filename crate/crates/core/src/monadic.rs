//! Exact decision procedure and normal form for the monadic fragment:
//! predicates of arity at most one, no equality.
//!
//! Without equality, elements lying in the same cell (the same pattern of
//! unary predicates) cannot be told apart, so collapsing each inhabited cell
//! to a single element preserves every formula. A satisfiable sentence with
//! `k` unary predicates therefore has a model whose elements are distinct
//! cells, of size at most `2^k`. `decide_sat` searches exactly those models,
//! smallest first.
//!
//! Zero-ary predicates and constants are allowed; they do not change the
//! bound (a constant simply lands in one of the inhabited cells).

use crate::eval::{assignments, evaluate, Compiled, Interp, Layout};
use crate::formula::{Formula, Signature, Term};
use crate::model::{FiniteModel, Relation};
use crate::semantics::{Countermodel, SemanticsError};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonadicError {
    #[error("formula is outside the monadic fragment: {0}")]
    NotMonadic(String),
    #[error("free variables {0:?} other than the target variable")]
    ExtraFreeVariables(Vec<String>),
    #[error("{candidates} candidate cell models exceed the enumeration ceiling of {ceiling}")]
    ResourceLimit { candidates: String, ceiling: u64 },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// True iff every predicate has arity at most one and `=` does not occur.
pub fn is_monadic(f: &Formula) -> bool {
    !f.has_equality() && f.predicates().values().all(|&a| a <= 1)
}

fn require_monadic(f: &Formula) -> Result<(), MonadicError> {
    if f.has_equality() {
        return Err(MonadicError::NotMonadic("uses equality".into()));
    }
    if let Some((p, a)) = f.predicates().into_iter().find(|(_, a)| *a > 1) {
        return Err(MonadicError::NotMonadic(format!("`{p}` has arity {a}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(FiniteModel),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// Vocabulary of a monadic formula in a fixed order: unary predicates,
/// zero-ary predicates and constants, each sorted by name.
struct Vocabulary {
    unary: Vec<String>,
    props: Vec<String>,
    constants: Vec<String>,
}

impl Vocabulary {
    fn of(f: &Formula) -> Self {
        let preds = f.predicates();
        Vocabulary {
            unary: preds.iter().filter(|(_, a)| **a == 1).map(|(p, _)| p.clone()).collect(),
            props: preds.iter().filter(|(_, a)| **a == 0).map(|(p, _)| p.clone()).collect(),
            constants: f.constants().into_iter().collect(),
        }
    }

    fn layout(&self) -> Layout {
        Layout {
            constants: self.constants.clone(),
            predicates: self
                .props
                .iter()
                .map(|p| (p.clone(), 0))
                .chain(self.unary.iter().map(|p| (p.clone(), 1)))
                .collect(),
        }
    }
}

/// Number of cell models `decide_sat` may visit for `k` unary predicates,
/// `p` propositions and `c` constants, or `None` if it overflows.
fn candidate_count(k: usize, p: usize, c: usize) -> Option<u128> {
    let cells = 1u128.checked_shl(u32::try_from(k).ok()?)?;
    if cells > 100 {
        return None;
    }
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for s in 1..=cells {
        binom = binom.checked_mul(cells - s + 1)? / s;
        let placements = s.checked_pow(c as u32)?;
        total = total.checked_add(binom.checked_mul(placements)?)?;
    }
    total.checked_mul(1u128.checked_shl(p as u32)?)
}

/// Lexicographic `s`-subsets of `0..n`.
fn combinations(n: usize, s: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if s <= n { Some((0..s).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = s;
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if next[i] < n - s + i {
                next[i] += 1;
                for j in i + 1..s {
                    next[j] = next[j - 1] + 1;
                }
                break true;
            }
        };
        current = advanced.then_some(next);
        Some(out)
    })
}

/// Decides satisfiability of a monadic formula; free variables are read
/// existentially. On success the witness has at most `2^k` elements and is
/// the first found when searching sizes in increasing order.
pub fn decide_sat(f: &Formula, ceiling: u64) -> Result<SatResult, MonadicError> {
    require_monadic(f)?;
    let sentence = f.existential_closure();
    let vocab = Vocabulary::of(&sentence);
    let k = vocab.unary.len();
    let candidates = candidate_count(k, vocab.props.len(), vocab.constants.len());
    match candidates {
        Some(c) if c <= ceiling as u128 => {}
        other => {
            return Err(MonadicError::ResourceLimit {
                candidates: other.map_or_else(|| "too many".to_string(), |c| c.to_string()),
                ceiling,
            })
        }
    }
    let layout = vocab.layout();
    let compiled = Compiled::new(&sentence, &layout, &[]).map_err(SemanticsError::from)?;
    let props = vocab.props.len();
    let cells = 1usize << k;
    let mut env = compiled.env(&[]);
    for size in 1..=cells {
        for chosen in combinations(cells, size) {
            let mut interp = Interp {
                size,
                consts: vec![0; vocab.constants.len()],
                rels: Vec::with_capacity(props + k),
            };
            for _ in 0..props {
                interp.rels.push(Relation::empty(0, size));
            }
            for bit in 0..k {
                let mut r = Relation::empty(1, size);
                for (element, cell) in chosen.iter().enumerate() {
                    if cell >> bit & 1 == 1 {
                        r.insert(&[element]);
                    }
                }
                interp.rels.push(r);
            }
            for valuation in 0..(1u64 << props) {
                for (i, rel) in interp.rels.iter_mut().take(props).enumerate() {
                    rel.set_index(0, valuation >> i & 1 == 1);
                }
                for placement in assignments(vocab.constants.len(), size) {
                    interp.consts.copy_from_slice(&placement);
                    if compiled.eval(&interp, &mut env) {
                        let model = interp.to_model(&layout);
                        if evaluate(&sentence, &model, &BTreeMap::new()) != Ok(true) {
                            unreachable!("witness failed re-evaluation");
                        }
                        return Ok(SatResult::Sat(model));
                    }
                }
            }
        }
    }
    Ok(SatResult::Unsat)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Holds,
    Countermodel(Countermodel),
}

impl Decision {
    pub fn holds(&self) -> bool {
        matches!(self, Decision::Holds)
    }
}

/// Exact entailment in the monadic fragment. Free variables are read
/// universally, so a countermodel comes with an assignment.
pub fn decide_entails(
    premise: &Formula,
    conclusion: &Formula,
    ceiling: u64,
) -> Result<Decision, MonadicError> {
    require_monadic(premise)?;
    require_monadic(conclusion)?;
    let query = Formula::and(premise.clone(), Formula::not(conclusion.clone()));
    match decide_sat(&query, ceiling)? {
        SatResult::Unsat => Ok(Decision::Holds),
        SatResult::Sat(model) => {
            let free: Vec<String> = query.free_vars().into_iter().collect();
            let values = assignments(free.len(), model.size())
                .find(|values| {
                    let a: BTreeMap<String, usize> =
                        free.iter().cloned().zip(values.iter().copied()).collect();
                    evaluate(&query, &model, &a) == Ok(true)
                })
                .expect("sat witness has a satisfying assignment");
            let assignment = free.into_iter().zip(values).collect();
            Ok(Decision::Countermodel(Countermodel { model, assignment }))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mark {
    Positive,
    Negative,
    Absent,
}

/// A conjunction of unary literals on one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellConjunction {
    pub marks: Vec<(String, Mark)>,
}

impl CellConjunction {
    pub fn to_formula(&self, var: &str) -> Formula {
        Formula::conjoin(self.marks.iter().filter_map(|(p, m)| {
            let atom = Formula::Pred(p.clone(), vec![Term::var(var)]);
            match m {
                Mark::Positive => Some(atom),
                Mark::Negative => Some(Formula::not(atom)),
                Mark::Absent => None,
            }
        }))
    }

    pub fn is_verum(&self) -> bool {
        self.marks.iter().all(|(_, m)| *m == Mark::Absent)
    }
}

/// `W_1(x) | ... | W_m(x)` where each disjunct is a cell of `x` guarded by a
/// closed residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadicNormalForm {
    pub var: String,
    pub disjuncts: Vec<(CellConjunction, Formula)>,
    /// Every kept residue is `true`.
    pub pure: bool,
}

impl MonadicNormalForm {
    pub fn to_formula(&self) -> Formula {
        Formula::disjoin(
            self.disjuncts
                .iter()
                .map(|(c, r)| Formula::and(c.to_formula(&self.var), r.clone()).simplify()),
        )
    }
}

/// Splits `f` by the cell of `var`. Predicates applied to `var` are
/// ordered as in `sig` (others by name) and cells are visited in binary
/// counting order, bit `i` set meaning predicate `i` holds. Residues that
/// are unsatisfiable drop their cell; valid residues become `true`.
pub fn monadic_normal_form(
    f: &Formula,
    var: &str,
    sig: &Signature,
    ceiling: u64,
) -> Result<MonadicNormalForm, MonadicError> {
    require_monadic(f)?;
    let extra: Vec<String> = f.free_vars().into_iter().filter(|v| v != var).collect();
    if !extra.is_empty() {
        return Err(MonadicError::ExtraFreeVariables(extra));
    }
    let mut on_var = BTreeSet::new();
    collect_applied(f, var, &mut Vec::new(), &mut on_var);
    let mut scope: Vec<String> = sig
        .predicates
        .iter()
        .filter(|(p, _)| on_var.contains(p))
        .map(|(p, _)| p.clone())
        .collect();
    for p in &on_var {
        if !scope.contains(p) {
            scope.push(p.clone());
        }
    }
    let others: Vec<String> = sig
        .unary_predicates()
        .map(str::to_string)
        .chain(f.predicates().into_iter().filter(|(_, a)| *a == 1).map(|(p, _)| p))
        .filter(|p| !on_var.contains(p))
        .fold(Vec::new(), |mut acc, p| {
            if !acc.contains(&p) {
                acc.push(p);
            }
            acc
        });

    let mut disjuncts = Vec::new();
    let mut pure = true;
    for cell in 0..(1usize << scope.len()) {
        let values: BTreeMap<&str, bool> = scope
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), cell >> i & 1 == 1))
            .collect();
        let residue = fix_cell(f, var, &values, &mut Vec::new()).simplify();
        let residue = match residue {
            Formula::True | Formula::False => residue,
            r => {
                if !decide_sat(&r, ceiling)?.is_sat() {
                    Formula::False
                } else if !decide_sat(&Formula::not(r.clone()), ceiling)?.is_sat() {
                    Formula::True
                } else {
                    r
                }
            }
        };
        if residue == Formula::False {
            continue;
        }
        pure &= residue == Formula::True;
        let marks = scope
            .iter()
            .map(|p| {
                let m = if values[p.as_str()] { Mark::Positive } else { Mark::Negative };
                (p.clone(), m)
            })
            .chain(others.iter().map(|p| (p.clone(), Mark::Absent)))
            .collect();
        disjuncts.push((CellConjunction { marks }, residue));
    }
    Ok(MonadicNormalForm {
        var: var.to_string(),
        disjuncts,
        pure,
    })
}

fn collect_applied(f: &Formula, var: &str, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match f {
        Formula::Pred(p, args) => {
            if args.len() == 1 && args[0] == Term::var(var) && !bound.iter().any(|b| b == var) {
                out.insert(p.clone());
            }
        }
        Formula::Not(a) => collect_applied(a, var, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_applied(a, var, bound, out);
            collect_applied(b, var, bound, out);
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            bound.push(v.clone());
            collect_applied(a, var, bound, out);
            bound.pop();
        }
        _ => {}
    }
}

/// Replaces free atoms `P(var)` by their truth value in the given cell.
fn fix_cell(f: &Formula, var: &str, cell: &BTreeMap<&str, bool>, bound: &mut Vec<String>) -> Formula {
    use Formula::*;
    match f {
        Pred(p, args)
            if args.len() == 1 && args[0] == Term::var(var) && !bound.iter().any(|b| b == var) =>
        {
            if cell[p.as_str()] {
                True
            } else {
                False
            }
        }
        True | False | Pred(..) | Eq(..) => f.clone(),
        Not(a) => Formula::not(fix_cell(a, var, cell, bound)),
        And(a, b) => Formula::and(fix_cell(a, var, cell, bound), fix_cell(b, var, cell, bound)),
        Or(a, b) => Formula::or(fix_cell(a, var, cell, bound), fix_cell(b, var, cell, bound)),
        Implies(a, b) => {
            Formula::implies(fix_cell(a, var, cell, bound), fix_cell(b, var, cell, bound))
        }
        Iff(a, b) => Formula::iff(fix_cell(a, var, cell, bound), fix_cell(b, var, cell, bound)),
        Forall(v, a) | Exists(v, a) => {
            bound.push(v.clone());
            let body = Box::new(fix_cell(a, var, cell, bound));
            bound.pop();
            if matches!(f, Forall(..)) {
                Forall(v.clone(), body)
            } else {
                Exists(v.clone(), body)
            }
        }
    }
}
