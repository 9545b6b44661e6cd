//! First-order signatures, terms and formulas.
//!
//! Terms are variables or constants only; there are no function symbols of
//! positive arity. Formulas are plain trees with binary connectives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The base vocabulary: constants, predicate symbols with arities, and
/// whether `=` may be used.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub constants: Vec<String>,
    pub predicates: Vec<(String, usize)>,
    pub equality: bool,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Self {
        self.predicates.push((name.to_string(), arity));
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.constants.push(name.to_string());
        self
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.predicates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    pub fn declares(&self, name: &str) -> bool {
        self.has_constant(name) || self.arity(name).is_some()
    }

    /// First name declared twice, if any.
    pub fn duplicate_name(&self) -> Option<&str> {
        let mut seen = BTreeSet::new();
        self.constants
            .iter()
            .chain(self.predicates.iter().map(|(n, _)| n))
            .find(|n| !seen.insert(n.as_str()))
            .map(String::as_str)
    }

    /// The sub-signature containing only the symbols occurring in `formulas`.
    /// Equality is kept as declared.
    pub fn restrict_to<'a, I>(&self, formulas: I) -> Signature
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let mut preds = BTreeSet::new();
        let mut consts = BTreeSet::new();
        for f in formulas {
            f.collect_symbols(&mut preds, &mut consts);
        }
        Signature {
            constants: self
                .constants
                .iter()
                .filter(|c| consts.contains(c.as_str()))
                .cloned()
                .collect(),
            predicates: self
                .predicates
                .iter()
                .filter(|(p, _)| preds.contains(p.as_str()))
                .cloned()
                .collect(),
            equality: self.equality,
        }
    }

    pub fn unary_predicates(&self) -> impl Iterator<Item = &str> {
        self.predicates
            .iter()
            .filter(|(_, a)| *a == 1)
            .map(|(n, _)| n.as_str())
    }

    pub fn max_arity(&self) -> usize {
        self.predicates.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

// Small constructors used throughout the crate and its tests.
impl Formula {
    pub fn pred(name: &str, args: &[&str]) -> Self {
        Formula::Pred(name.to_string(), args.iter().map(|a| Term::var(a)).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; empty input gives `true`.
    pub fn conjoin<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; empty input gives `false`.
    pub fn disjoin<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Top-level conjuncts with nested conjunctions flattened, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Eq(a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Not(a) => a.free_vars_into(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.free_vars_into(bound, out);
                b.free_vars_into(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.free_vars_into(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Pred(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Eq(a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn collect_symbols(&self, preds: &mut BTreeSet<String>, consts: &mut BTreeSet<String>) {
        self.visit(&mut |f| match f {
            Formula::Pred(p, args) => {
                preds.insert(p.clone());
                for t in args {
                    if let Term::Const(c) = t {
                        consts.insert(c.clone());
                    }
                }
            }
            Formula::Eq(a, b) => {
                for t in [a, b] {
                    if let Term::Const(c) = t {
                        consts.insert(c.clone());
                    }
                }
            }
            _ => {}
        });
    }

    /// Predicate symbols with the arity at which they are used.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Pred(p, args) = f {
                out.entry(p.clone()).or_insert(args.len());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut preds = BTreeSet::new();
        let mut consts = BTreeSet::new();
        self.collect_symbols(&mut preds, &mut consts);
        consts
    }

    pub fn mentions_predicate(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if let Formula::Pred(p, _) = f {
                found |= p == name;
            }
        });
        found
    }

    pub fn has_equality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Eq(..)));
        found
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => 0,
            Formula::Not(a) => a.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.quantifier_depth(),
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Negation normal form: only `&`, `|`, quantifiers and negated atoms.
    /// `a <-> b` becomes `(!a | b) & (a | !b)`.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        use Formula::*;
        match (self, positive) {
            (True, true) | (False, false) => True,
            (True, false) | (False, true) => False,
            (Pred(..) | Eq(..), true) => self.clone(),
            (Pred(..) | Eq(..), false) => Formula::not(self.clone()),
            (Not(a), p) => a.nnf_signed(!p),
            (And(a, b), true) => Formula::and(a.nnf_signed(true), b.nnf_signed(true)),
            (And(a, b), false) => Formula::or(a.nnf_signed(false), b.nnf_signed(false)),
            (Or(a, b), true) => Formula::or(a.nnf_signed(true), b.nnf_signed(true)),
            (Or(a, b), false) => Formula::and(a.nnf_signed(false), b.nnf_signed(false)),
            (Implies(a, b), true) => Formula::or(a.nnf_signed(false), b.nnf_signed(true)),
            (Implies(a, b), false) => Formula::and(a.nnf_signed(true), b.nnf_signed(false)),
            (Iff(a, b), true) => Formula::and(
                Formula::or(a.nnf_signed(false), b.nnf_signed(true)),
                Formula::or(a.nnf_signed(true), b.nnf_signed(false)),
            ),
            (Iff(a, b), false) => Formula::or(
                Formula::and(a.nnf_signed(true), b.nnf_signed(false)),
                Formula::and(a.nnf_signed(false), b.nnf_signed(true)),
            ),
            (Forall(v, a), true) => Forall(v.clone(), Box::new(a.nnf_signed(true))),
            (Forall(v, a), false) => Exists(v.clone(), Box::new(a.nnf_signed(false))),
            (Exists(v, a), true) => Exists(v.clone(), Box::new(a.nnf_signed(true))),
            (Exists(v, a), false) => Forall(v.clone(), Box::new(a.nnf_signed(false))),
        }
    }

    /// Folds `true`/`false` through connectives and drops vacuous quantifiers
    /// over constant bodies.
    pub fn simplify(&self) -> Formula {
        use Formula::*;
        match self {
            True | False | Pred(..) | Eq(..) => self.clone(),
            Not(a) => match a.simplify() {
                True => False,
                False => True,
                Not(inner) => *inner,
                s => Formula::not(s),
            },
            And(a, b) => match (a.simplify(), b.simplify()) {
                (False, _) | (_, False) => False,
                (True, s) | (s, True) => s,
                (x, y) => Formula::and(x, y),
            },
            Or(a, b) => match (a.simplify(), b.simplify()) {
                (True, _) | (_, True) => True,
                (False, s) | (s, False) => s,
                (x, y) => Formula::or(x, y),
            },
            Implies(a, b) => match (a.simplify(), b.simplify()) {
                (False, _) | (_, True) => True,
                (True, s) => s,
                (s, False) => Formula::not(s),
                (x, y) => Formula::implies(x, y),
            },
            Iff(a, b) => match (a.simplify(), b.simplify()) {
                (True, s) | (s, True) => s,
                (False, s) | (s, False) => Formula::not(s).simplify(),
                (x, y) => Formula::iff(x, y),
            },
            Forall(v, a) => match a.simplify() {
                s @ (True | False) => s,
                s => Forall(v.clone(), Box::new(s)),
            },
            Exists(v, a) => match a.simplify() {
                s @ (True | False) => s,
                s => Exists(v.clone(), Box::new(s)),
            },
        }
    }

    /// Replaces free occurrences of variables according to `map`. Bound
    /// variables that would capture a substituted term are renamed to names
    /// fresh for the whole result.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        let mut avoid = self.all_vars();
        for t in map.values() {
            if let Term::Var(v) = t {
                avoid.insert(v.clone());
            }
        }
        self.subst_inner(map, &mut avoid)
    }

    fn subst_inner(&self, map: &BTreeMap<String, Term>, avoid: &mut BTreeSet<String>) -> Formula {
        use Formula::*;
        let term = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            True | False => self.clone(),
            Pred(p, args) => Pred(p.clone(), args.iter().map(term).collect()),
            Eq(a, b) => Eq(term(a), term(b)),
            Not(a) => Formula::not(a.subst_inner(map, avoid)),
            And(a, b) => Formula::and(a.subst_inner(map, avoid), b.subst_inner(map, avoid)),
            Or(a, b) => Formula::or(a.subst_inner(map, avoid), b.subst_inner(map, avoid)),
            Implies(a, b) => {
                Formula::implies(a.subst_inner(map, avoid), b.subst_inner(map, avoid))
            }
            Iff(a, b) => Formula::iff(a.subst_inner(map, avoid), b.subst_inner(map, avoid)),
            Forall(v, body) | Exists(v, body) => {
                let mut inner = map.clone();
                inner.remove(v);
                let captures = inner
                    .values()
                    .any(|t| matches!(t, Term::Var(w) if w == v));
                let (name, new_body) = if captures {
                    let fresh = fresh_name(v, avoid);
                    avoid.insert(fresh.clone());
                    inner.insert(v.clone(), Term::Var(fresh.clone()));
                    (fresh, body.subst_inner(&inner, avoid))
                } else {
                    (v.clone(), body.subst_inner(&inner, avoid))
                };
                match self {
                    Forall(..) => Forall(name, Box::new(new_body)),
                    _ => Exists(name, Box::new(new_body)),
                }
            }
        }
    }

    /// Renames binders so that no variable is bound twice and no binder
    /// shadows an enclosing one. Binders already satisfying this keep their
    /// names, so the operation is idempotent.
    pub fn alpha_normalize(&self) -> Formula {
        let mut used = self.all_vars();
        let mut bound_once = BTreeSet::new();
        self.alpha_inner(&BTreeMap::new(), &mut bound_once, &mut used)
    }

    fn alpha_inner(
        &self,
        env: &BTreeMap<String, String>,
        bound_once: &mut BTreeSet<String>,
        used: &mut BTreeSet<String>,
    ) -> Formula {
        use Formula::*;
        let term = |t: &Term| match t {
            Term::Var(v) => Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Const(_) => t.clone(),
        };
        match self {
            True | False => self.clone(),
            Pred(p, args) => Pred(p.clone(), args.iter().map(term).collect()),
            Eq(a, b) => Eq(term(a), term(b)),
            Not(a) => Formula::not(a.alpha_inner(env, bound_once, used)),
            And(a, b) => Formula::and(
                a.alpha_inner(env, bound_once, used),
                b.alpha_inner(env, bound_once, used),
            ),
            Or(a, b) => Formula::or(
                a.alpha_inner(env, bound_once, used),
                b.alpha_inner(env, bound_once, used),
            ),
            Implies(a, b) => Formula::implies(
                a.alpha_inner(env, bound_once, used),
                b.alpha_inner(env, bound_once, used),
            ),
            Iff(a, b) => Formula::iff(
                a.alpha_inner(env, bound_once, used),
                b.alpha_inner(env, bound_once, used),
            ),
            Forall(v, body) | Exists(v, body) => {
                let name = if bound_once.contains(v) {
                    let fresh = fresh_name(v, used);
                    used.insert(fresh.clone());
                    fresh
                } else {
                    v.clone()
                };
                bound_once.insert(name.clone());
                let mut inner = env.clone();
                inner.insert(v.clone(), name.clone());
                let new_body = body.alpha_inner(&inner, bound_once, used);
                match self {
                    Forall(..) => Forall(name, Box::new(new_body)),
                    _ => Exists(name, Box::new(new_body)),
                }
            }
        }
    }

    /// True when no variable is bound twice (which also rules out shadowing).
    pub fn has_distinct_binders(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut ok = true;
        self.visit(&mut |f| {
            if let Formula::Forall(v, _) | Formula::Exists(v, _) = f {
                ok &= seen.insert(v.clone());
            }
        });
        ok
    }

    /// Universal closure over the free variables, in name order.
    pub fn universal_closure(&self) -> Formula {
        self.free_vars()
            .into_iter()
            .rev()
            .fold(self.clone(), |acc, v| Formula::Forall(v, Box::new(acc)))
    }

    /// Existential closure over the free variables, in name order.
    pub fn existential_closure(&self) -> Formula {
        self.free_vars()
            .into_iter()
            .rev()
            .fold(self.clone(), |acc, v| Formula::Exists(v, Box::new(acc)))
    }
}

/// `base_1`, `base_2`, ... whichever is first not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}_{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::render(self))
    }
}
