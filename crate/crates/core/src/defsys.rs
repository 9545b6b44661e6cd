//! Ordered definition systems.
//!
//! A system is a base signature plus a sequence of definitions. Each
//! definition introduces one new symbol and may mention only base symbols and
//! symbols introduced strictly earlier in the sequence. Constant and
//! predicate definitions share one ordering.
//!
//! A constant is defined either as an alias for a term (`defconst c := d;`)
//! or by a description `defconst c(y) := δ(y);`, read as "the unique y with
//! δ(y)". Uniqueness is a property of a model, so it is checked whenever a
//! model is expanded rather than assumed.

use crate::eval::{extension, EvalError};
use crate::formula::{fresh_name, Formula, Signature, Term};
use crate::model::{FiniteModel, Relation};
use crate::semantics::{bounded_entails, EnumOptions, SemanticsError};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstBody {
    Alias(Term),
    Description { var: String, body: Formula },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantDef {
    pub name: String,
    pub body: ConstBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definition {
    Constant(ConstantDef),
    Predicate(PredicateDef),
}

impl Definition {
    pub fn name(&self) -> &str {
        match self {
            Definition::Constant(c) => &c.name,
            Definition::Predicate(p) => &p.name,
        }
    }

    /// Formulas whose symbols the definition depends on.
    fn bodies(&self) -> Vec<&Formula> {
        match self {
            Definition::Predicate(p) => vec![&p.body],
            Definition::Constant(ConstantDef {
                body: ConstBody::Description { body, .. },
                ..
            }) => vec![body],
            Definition::Constant(_) => vec![],
        }
    }

    /// Every symbol occurrence in the definition body: (name, Some(arity)) for
    /// predicates, (name, None) for constants. Repeats are kept.
    fn occurrences(&self) -> Vec<(String, Option<usize>)> {
        let mut out = Vec::new();
        if let Definition::Constant(ConstantDef {
            body: ConstBody::Alias(Term::Const(c)),
            ..
        }) = self
        {
            out.push((c.clone(), None));
        }
        for b in self.bodies() {
            b.visit(&mut |f| match f {
                Formula::Pred(p, args) => {
                    out.push((p.clone(), Some(args.len())));
                    for t in args {
                        if let Term::Const(c) = t {
                            out.push((c.clone(), None));
                        }
                    }
                }
                Formula::Eq(a, b) => {
                    for t in [a, b] {
                        if let Term::Const(c) = t {
                            out.push((c.clone(), None));
                        }
                    }
                }
                _ => {}
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DefinitionSystem {
    pub base: Signature,
    pub definitions: Vec<Definition>,
}

impl DefinitionSystem {
    pub fn new(base: Signature) -> Self {
        DefinitionSystem {
            base,
            definitions: Vec::new(),
        }
    }

    pub fn define(mut self, name: &str, params: &[&str], body: Formula) -> Self {
        self.definitions.push(Definition::Predicate(PredicateDef {
            name: name.to_string(),
            params: params.iter().map(|p| p.to_string()).collect(),
            body,
        }));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.definitions.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.definitions.iter().position(|d| d.name() == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDef> {
        self.definitions.iter().find_map(|d| match d {
            Definition::Predicate(p) if p.name == name => Some(p),
            _ => None,
        })
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredicateDef> {
        self.definitions.iter().filter_map(|d| match d {
            Definition::Predicate(p) => Some(p),
            _ => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &ConstantDef> {
        self.definitions.iter().filter_map(|d| match d {
            Definition::Constant(c) => Some(c),
            _ => None,
        })
    }

    /// Unary defined predicates, in definition order.
    pub fn classes(&self) -> impl Iterator<Item = &PredicateDef> {
        self.predicates().filter(|p| p.params.len() == 1)
    }

    /// Base signature extended with every defined symbol.
    pub fn expanded_signature(&self) -> Signature {
        let mut sig = self.base.clone();
        for d in &self.definitions {
            match d {
                Definition::Predicate(p) => sig.predicates.push((p.name.clone(), p.params.len())),
                Definition::Constant(c) => sig.constants.push(c.name.clone()),
            }
        }
        sig
    }

    /// Arity of a base or defined predicate.
    pub fn arity(&self, name: &str) -> Option<usize> {
        self.base
            .arity(name)
            .or_else(|| self.predicate(name).map(|p| p.params.len()))
    }

    pub fn is_class(&self, name: &str) -> bool {
        self.arity(name) == Some(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    ForwardReference,
    SelfReference,
    ArityMismatch,
    NameClash,
    FreeVariableMismatch,
    UnknownSymbol,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub entry: usize,
    pub kind: ViolationKind,
    pub symbol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub entry: usize,
    pub symbol: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    /// Entry indices with at least one violation.
    pub fn flagged_entries(&self) -> BTreeSet<usize> {
        self.violations.iter().map(|v| v.entry).collect()
    }
}

/// Checks ordering, circularity, arities, name clashes and free variables.
/// Does not look at models.
pub fn check_structure(d: &DefinitionSystem) -> Vec<Violation> {
    let mut violations = BTreeSet::new();
    let first_index: BTreeMap<&str, usize> = d
        .definitions
        .iter()
        .enumerate()
        .rev()
        .map(|(i, def)| (def.name(), i))
        .collect();
    let mut push = |entry: usize, kind: ViolationKind, symbol: &str| {
        violations.insert(Violation {
            entry,
            kind,
            symbol: symbol.to_string(),
        });
    };

    for (i, def) in d.definitions.iter().enumerate() {
        let name = def.name();
        if d.base.declares(name) || first_index[name] < i {
            push(i, ViolationKind::NameClash, name);
        }
        for (sym, arity) in def.occurrences() {
            if sym == name {
                push(i, ViolationKind::SelfReference, &sym);
                continue;
            }
            // prefer an earlier definition when the name is defined twice
            let defined = d
                .definitions
                .iter()
                .enumerate()
                .filter(|(_, e)| e.name() == sym)
                .min_by_key(|(j, _)| if *j < i { 0 } else { 1 });
            match (arity, defined) {
                (Some(a), _) if d.base.arity(&sym).is_some() => {
                    if d.base.arity(&sym) != Some(a) {
                        push(i, ViolationKind::ArityMismatch, &sym);
                    }
                }
                (None, _) if d.base.has_constant(&sym) => {}
                (_, Some((j, _))) if j > i => push(i, ViolationKind::ForwardReference, &sym),
                (_, Some((_, target))) => match (arity, target) {
                    (Some(a), Definition::Predicate(p)) if p.params.len() == a => {}
                    (None, Definition::Constant(_)) => {}
                    _ => push(i, ViolationKind::ArityMismatch, &sym),
                },
                (_, None) => push(i, ViolationKind::UnknownSymbol, &sym),
            }
        }
        match def {
            Definition::Predicate(p) => {
                let params: BTreeSet<&String> = p.params.iter().collect();
                if params.len() != p.params.len()
                    || p.body.free_vars().iter().any(|v| !params.contains(v))
                {
                    push(i, ViolationKind::FreeVariableMismatch, name);
                }
            }
            Definition::Constant(c) => match &c.body {
                ConstBody::Alias(Term::Var(_)) => {
                    push(i, ViolationKind::FreeVariableMismatch, name)
                }
                ConstBody::Alias(Term::Const(_)) => {}
                ConstBody::Description { var, body } => {
                    if body.free_vars().iter().any(|v| v != var) {
                        push(i, ViolationKind::FreeVariableMismatch, name);
                    }
                }
            },
        }
    }
    violations.into_iter().collect()
}

/// Largest universe used by the conjunct-redundancy check.
pub const IRREDUCIBILITY_BOUND: usize = 3;

/// Full validation: structural checks, then (for valid systems) a warning
/// for every top-level conjunct of a predicate definition that can be
/// dropped without changing its truth on any model of size at most
/// [`IRREDUCIBILITY_BOUND`].
pub fn validate(d: &DefinitionSystem) -> ValidationReport {
    validate_with(d, &EnumOptions::default())
}

pub fn validate_with(d: &DefinitionSystem, opts: &EnumOptions) -> ValidationReport {
    let violations = check_structure(d);
    let verdict = if violations.is_empty() {
        Verdict::Valid
    } else {
        Verdict::Invalid
    };
    let warnings = if violations.is_empty() {
        redundant_conjuncts(d, IRREDUCIBILITY_BOUND, opts)
    } else {
        Vec::new()
    };
    ValidationReport {
        verdict,
        violations,
        warnings,
    }
}

fn redundant_conjuncts(d: &DefinitionSystem, bound: usize, opts: &EnumOptions) -> Vec<Warning> {
    let mut warnings = Vec::new();
    for (i, def) in d.definitions.iter().enumerate() {
        let Definition::Predicate(p) = def else { continue };
        let parts = p.body.conjuncts();
        if parts.len() < 2 {
            continue;
        }
        let Ok(full) = unfold_unchecked(&p.body, d) else { continue };
        for (j, part) in parts.iter().enumerate() {
            let rest = Formula::conjoin(
                parts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, f)| (*f).clone()),
            );
            let Ok(reduced) = unfold_unchecked(&rest, d) else { continue };
            match bounded_entails(&[reduced], &full, &d.base, bound, opts) {
                Ok(v) if v.holds() => warnings.push(Warning {
                    entry: i,
                    symbol: p.name.clone(),
                    message: format!(
                        "conjunct `{part}` can be removed without changing `{}` on models of size <= {bound}",
                        p.name
                    ),
                }),
                Ok(_) => {}
                Err(e) => {
                    warnings.push(Warning {
                        entry: i,
                        symbol: p.name.clone(),
                        message: format!("irreducibility check skipped: {e}"),
                    });
                    break;
                }
            }
        }
    }
    warnings
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DefsysError {
    #[error("definition system is invalid ({} violation(s))", .0.len())]
    Invalid(Vec<Violation>),
    #[error("symbol `{0}` is neither in the base signature nor defined")]
    UnknownSymbol(String),
    #[error("constant `{name}` is described by {count} elements of the model, not exactly one")]
    NotUnique { name: String, count: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn require_valid(d: &DefinitionSystem) -> Result<(), DefsysError> {
    let v = check_structure(d);
    if v.is_empty() {
        Ok(())
    } else {
        Err(DefsysError::Invalid(v))
    }
}

/// Directed edges from each definiendum to the defined symbols in its body.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DependencyGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        for &(_, to) in &self.edges {
            indegree[to] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &(from, to) in self.edges.range((v, 0)..(v + 1, 0)) {
                debug_assert_eq!(from, v);
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    ready.push(to);
                }
            }
        }
        seen == n
    }

    pub fn edge_names(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependencies {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  \"{n}\";");
        }
        for (a, b) in self.edge_names() {
            let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
        }
        out.push_str("}\n");
        out
    }
}

pub fn dependency_graph(d: &DefinitionSystem) -> Result<DependencyGraph, DefsysError> {
    require_valid(d)?;
    let nodes: Vec<String> = d.definitions.iter().map(|x| x.name().to_string()).collect();
    let mut edges = BTreeSet::new();
    for (i, def) in d.definitions.iter().enumerate() {
        for (sym, _) in def.occurrences() {
            if let Some(j) = d.index_of(&sym) {
                edges.insert((i, j));
            }
        }
    }
    Ok(DependencyGraph { nodes, edges })
}

/// Replaces every defined symbol in `f` by its definition until only base
/// symbols remain. Definitions are expanded in ascending index order.
/// Defined constants given by a description are eliminated atom by atom:
/// `A(c)` becomes `exists y. δ(y) & A(y)`.
pub fn unfold(f: &Formula, d: &DefinitionSystem) -> Result<Formula, DefsysError> {
    require_valid(d)?;
    unfold_unchecked(f, d)
}

fn unfold_unchecked(f: &Formula, d: &DefinitionSystem) -> Result<Formula, DefsysError> {
    let mut preds = BTreeSet::new();
    let mut consts = BTreeSet::new();
    f.collect_symbols(&mut preds, &mut consts);
    for s in preds.iter().chain(&consts) {
        if !d.base.declares(s) && d.index_of(s).is_none() {
            return Err(DefsysError::UnknownSymbol(s.clone()));
        }
    }
    let table = Unfolder::new(d);
    Ok(table.unfold(f).alpha_normalize())
}

enum ConstMeaning {
    Term(Term),
    Description(String, Formula),
}

struct Unfolder {
    preds: BTreeMap<String, (Vec<String>, Formula)>,
    consts: BTreeMap<String, ConstMeaning>,
}

impl Unfolder {
    fn new(d: &DefinitionSystem) -> Self {
        let mut u = Unfolder {
            preds: BTreeMap::new(),
            consts: BTreeMap::new(),
        };
        for def in &d.definitions {
            match def {
                Definition::Predicate(p) => {
                    let body = u.unfold(&p.body);
                    u.preds.insert(p.name.clone(), (p.params.clone(), body));
                }
                Definition::Constant(c) => {
                    let meaning = match &c.body {
                        ConstBody::Alias(Term::Const(target)) => match u.consts.get(target) {
                            Some(ConstMeaning::Term(t)) => ConstMeaning::Term(t.clone()),
                            Some(ConstMeaning::Description(v, b)) => {
                                ConstMeaning::Description(v.clone(), b.clone())
                            }
                            None => ConstMeaning::Term(Term::Const(target.clone())),
                        },
                        ConstBody::Alias(t) => ConstMeaning::Term(t.clone()),
                        ConstBody::Description { var, body } => {
                            ConstMeaning::Description(var.clone(), u.unfold(body))
                        }
                    };
                    u.consts.insert(c.name.clone(), meaning);
                }
            }
        }
        u
    }

    fn unfold(&self, f: &Formula) -> Formula {
        let expanded = self.expand_predicates(f);
        self.eliminate_constants(&expanded)
    }

    fn expand_predicates(&self, f: &Formula) -> Formula {
        use Formula::*;
        match f {
            True | False | Eq(..) => f.clone(),
            Pred(p, args) => match self.preds.get(p) {
                Some((params, body)) => {
                    let map: BTreeMap<String, Term> =
                        params.iter().cloned().zip(args.iter().cloned()).collect();
                    body.substitute(&map)
                }
                None => f.clone(),
            },
            Not(a) => Formula::not(self.expand_predicates(a)),
            And(a, b) => Formula::and(self.expand_predicates(a), self.expand_predicates(b)),
            Or(a, b) => Formula::or(self.expand_predicates(a), self.expand_predicates(b)),
            Implies(a, b) => {
                Formula::implies(self.expand_predicates(a), self.expand_predicates(b))
            }
            Iff(a, b) => Formula::iff(self.expand_predicates(a), self.expand_predicates(b)),
            Forall(v, a) => Forall(v.clone(), Box::new(self.expand_predicates(a))),
            Exists(v, a) => Exists(v.clone(), Box::new(self.expand_predicates(a))),
        }
    }

    fn eliminate_constants(&self, f: &Formula) -> Formula {
        use Formula::*;
        match f {
            Pred(..) | Eq(..) => self.eliminate_in_atom(f),
            True | False => f.clone(),
            Not(a) => Formula::not(self.eliminate_constants(a)),
            And(a, b) => Formula::and(self.eliminate_constants(a), self.eliminate_constants(b)),
            Or(a, b) => Formula::or(self.eliminate_constants(a), self.eliminate_constants(b)),
            Implies(a, b) => {
                Formula::implies(self.eliminate_constants(a), self.eliminate_constants(b))
            }
            Iff(a, b) => Formula::iff(self.eliminate_constants(a), self.eliminate_constants(b)),
            Forall(v, a) => Forall(v.clone(), Box::new(self.eliminate_constants(a))),
            Exists(v, a) => Exists(v.clone(), Box::new(self.eliminate_constants(a))),
        }
    }

    fn eliminate_in_atom(&self, atom: &Formula) -> Formula {
        let terms: Vec<&Term> = match atom {
            Formula::Pred(_, args) => args.iter().collect(),
            Formula::Eq(a, b) => vec![a, b],
            _ => unreachable!("atoms only"),
        };
        let mut avoid = atom.all_vars();
        let mut rename: BTreeMap<String, Term> = BTreeMap::new();
        let mut wrappers: Vec<(String, Formula)> = Vec::new();
        for t in terms {
            let Term::Const(c) = t else { continue };
            if rename.contains_key(c) {
                continue;
            }
            match self.consts.get(c) {
                Some(ConstMeaning::Term(target)) => {
                    rename.insert(c.clone(), target.clone());
                }
                Some(ConstMeaning::Description(var, body)) => {
                    avoid.extend(body.all_vars());
                    let y = fresh_name(var, &avoid);
                    avoid.insert(y.clone());
                    let described =
                        body.substitute(&BTreeMap::from([(var.clone(), Term::Var(y.clone()))]));
                    rename.insert(c.clone(), Term::Var(y.clone()));
                    wrappers.push((y, described));
                }
                None => {}
            }
        }
        if rename.is_empty() {
            return atom.clone();
        }
        let map_term = |t: &Term| match t {
            Term::Const(c) => rename.get(c).cloned().unwrap_or_else(|| t.clone()),
            v => v.clone(),
        };
        let replaced = match atom {
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(map_term).collect()),
            Formula::Eq(a, b) => Formula::Eq(map_term(a), map_term(b)),
            _ => unreachable!(),
        };
        wrappers
            .into_iter()
            .rev()
            .fold(replaced, |acc, (y, described)| {
                Formula::Exists(y, Box::new(Formula::and(described, acc)))
            })
    }
}

/// Adds interpretations of every defined symbol to a model of the base
/// signature by evaluating each definition, in order, on the model built so
/// far. Independent of [`unfold`].
pub fn expand_model(d: &DefinitionSystem, m: &FiniteModel) -> Result<FiniteModel, DefsysError> {
    require_valid(d)?;
    let mut out = m.clone();
    for def in &d.definitions {
        match def {
            Definition::Predicate(p) => {
                let rel = relation_of(&p.params, &p.body, &out)?;
                out.set_relation(&p.name, rel).expect("sized to model");
            }
            Definition::Constant(c) => {
                let element = match &c.body {
                    ConstBody::Alias(Term::Const(t)) => out
                        .constant(t)
                        .ok_or_else(|| EvalError::Uninterpreted(t.clone()))?,
                    ConstBody::Alias(Term::Var(v)) => {
                        return Err(EvalError::UnassignedVariable(v.clone()).into())
                    }
                    ConstBody::Description { var, body } => {
                        let ext = extension(body, var, &out)?;
                        if ext.len() != 1 {
                            return Err(DefsysError::NotUnique {
                                name: c.name.clone(),
                                count: ext.len(),
                            });
                        }
                        ext[0]
                    }
                };
                out.set_constant(&c.name, element).expect("element in range");
            }
        }
    }
    Ok(out)
}

fn relation_of(params: &[String], body: &Formula, m: &FiniteModel) -> Result<Relation, DefsysError> {
    let mut rel = Relation::empty(params.len(), m.size());
    for tuple in crate::eval::assignments(params.len(), m.size()) {
        let a: BTreeMap<String, usize> = params.iter().cloned().zip(tuple.iter().copied()).collect();
        if crate::eval::evaluate(body, m, &a)? {
            rel.insert(&tuple);
        }
    }
    Ok(rel)
}

/// Checks that each described constant picks out exactly one element of `m`.
pub fn check_descriptions(d: &DefinitionSystem, m: &FiniteModel) -> Result<(), DefsysError> {
    expand_model(d, m).map(|_| ())
}
