//! Genus, species, difference, property and accident.
//!
//! Every entailment question goes through [`Engine`], which answers exactly
//! when both sides are monadic and falls back to bounded model search
//! otherwise. Each answer records which of the two was used.

use crate::defsys::{check_structure, unfold, DefinitionSystem, DefsysError, PredicateDef};
use crate::formula::{Formula, Signature, Term};
use crate::monadic::{self, Decision, MonadicError};
use crate::render::render;
use crate::semantics::{
    bounded_entails, default_bound, Countermodel, EntailmentVerdict, EnumOptions, SemanticsError,
    DEFAULT_CEILING,
};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredicabiliaError {
    #[error(transparent)]
    Defsys(#[from] DefsysError),
    #[error(transparent)]
    Monadic(#[from] MonadicError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("`{0}` is not a defined class")]
    NotADefinedClass(String),
    #[error("`{0}` is not a unary predicate")]
    NotAClass(String),
    #[error("formula has free variables {0:?} besides `{1}`")]
    FreeVariables(Vec<String>, String),
    #[error("no candidate contains `{0}`")]
    NoContainingCandidate(String),
    #[error("sentence list is empty")]
    Empty,
}

/// Entailment back end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    pub ceiling: u64,
    /// Bound for the non-monadic fallback; `None` picks the default for the
    /// signature of the query.
    pub bound: Option<usize>,
    pub parallel: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            ceiling: DEFAULT_CEILING,
            bound: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Proved in the monadic fragment.
    Holds,
    /// No countermodel up to the bound.
    HoldsUpTo(usize),
    Countermodel(Countermodel),
}

/// One entailment question and its answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub premise: Formula,
    pub conclusion: Formula,
    pub outcome: Outcome,
}

impl Evidence {
    pub fn holds(&self) -> bool {
        !matches!(self.outcome, Outcome::Countermodel(_))
    }

    pub fn exact(&self) -> bool {
        !matches!(self.outcome, Outcome::HoldsUpTo(_))
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match &self.outcome {
            Outcome::Countermodel(c) => Some(c),
            _ => None,
        }
    }

    /// Re-evaluates a countermodel; a positive outcome is accepted as is.
    pub fn revalidate(&self) -> bool {
        match &self.outcome {
            Outcome::Countermodel(c) => crate::semantics::recheck(
                std::slice::from_ref(&self.premise),
                &self.conclusion,
                &c.model,
                &c.assignment,
            ),
            _ => true,
        }
    }
}

fn signature_of(formulas: &[&Formula]) -> Signature {
    let mut sig = Signature::new();
    for f in formulas {
        for (p, a) in f.predicates() {
            if sig.arity(&p).is_none() {
                sig.predicates.push((p, a));
            }
        }
        for c in f.constants() {
            if !sig.has_constant(&c) {
                sig.constants.push(c);
            }
        }
        sig.equality |= f.has_equality();
    }
    sig
}

impl Engine {
    pub fn entails(&self, premise: &Formula, conclusion: &Formula) -> Result<Evidence, PredicabiliaError> {
        let outcome = if monadic::is_monadic(premise) && monadic::is_monadic(conclusion) {
            match monadic::decide_entails(premise, conclusion, self.ceiling)? {
                Decision::Holds => Outcome::Holds,
                Decision::Countermodel(c) => Outcome::Countermodel(c),
            }
        } else {
            let sig = signature_of(&[premise, conclusion]);
            let bound = self.bound.unwrap_or_else(|| default_bound(&sig));
            let opts = EnumOptions {
                ceiling: self.ceiling,
                parallel: self.parallel,
            };
            match bounded_entails(std::slice::from_ref(premise), conclusion, &sig, bound, &opts)? {
                EntailmentVerdict::HoldsUpTo(b) => Outcome::HoldsUpTo(b),
                EntailmentVerdict::Countermodel(c) => Outcome::Countermodel(c),
            }
        };
        Ok(Evidence {
            premise: premise.clone(),
            conclusion: conclusion.clone(),
            outcome,
        })
    }
}

/// `species ≺ genus` with the difference written over `param`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PorphyryEdge {
    pub species: String,
    pub genus: String,
    pub param: String,
    pub difference: Formula,
}

impl PorphyryEdge {
    /// The difference with its parameter renamed to `var`.
    pub fn difference_at(&self, var: &str) -> Formula {
        rename(&self.difference, &self.param, var)
    }
}

fn rename(f: &Formula, from: &str, to: &str) -> Formula {
    if from == to {
        return f.clone();
    }
    f.substitute(&BTreeMap::from([(from.to_string(), Term::var(to))]))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PorphyryTree {
    pub nodes: Vec<String>,
    pub edges: Vec<PorphyryEdge>,
    pub roots: Vec<String>,
    /// Unary definitions whose body has no defined-class guard.
    pub unguarded: Vec<String>,
}

impl PorphyryTree {
    pub fn genus_of(&self, species: &str) -> Option<&PorphyryEdge> {
        self.edges.iter().find(|e| e.species == species)
    }

    /// Genera from `species` upward, starting with `species` itself.
    pub fn chain(&self, species: &str) -> Vec<String> {
        let mut out = vec![species.to_string()];
        let mut cur = species;
        while let Some(e) = self.genus_of(cur) {
            out.push(e.genus.clone());
            cur = &e.genus;
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph porphyry {\n  rankdir=BT;\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  \"{n}\";");
        }
        for e in &self.edges {
            let label = render(&e.difference).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{label}\"];", e.species, e.genus);
        }
        out.push_str("}\n");
        out
    }
}

/// The guard of a unary definition: the first flattened conjunct of the form
/// `G(param)` with `G` an earlier defined class.
fn guard_of(def: &PredicateDef, d: &DefinitionSystem) -> Option<PorphyryEdge> {
    let param = def.params.first()?;
    let parts = def.body.conjuncts();
    let at = parts.iter().position(|c| match c {
        Formula::Pred(g, args) => {
            args.len() == 1
                && args[0] == Term::var(param)
                && d.predicate(g).is_some_and(|p| p.params.len() == 1 && g != &def.name)
        }
        _ => false,
    })?;
    let Formula::Pred(genus, _) = parts[at] else { unreachable!() };
    let difference = Formula::conjoin(
        parts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != at)
            .map(|(_, c)| (*c).clone()),
    );
    Some(PorphyryEdge {
        species: def.name.clone(),
        genus: genus.clone(),
        param: param.clone(),
        difference,
    })
}

pub fn porphyry_tree(d: &DefinitionSystem) -> Result<PorphyryTree, PredicabiliaError> {
    let violations = check_structure(d);
    if !violations.is_empty() {
        return Err(DefsysError::Invalid(violations).into());
    }
    let mut tree = PorphyryTree::default();
    for def in d.classes() {
        match guard_of(def, d) {
            Some(edge) => tree.edges.push(edge),
            None => tree.unguarded.push(def.name.clone()),
        }
    }
    for def in d.classes() {
        let named = tree
            .edges
            .iter()
            .any(|e| e.species == def.name || e.genus == def.name);
        if named {
            tree.nodes.push(def.name.clone());
            if tree.genus_of(&def.name).is_none() {
                tree.roots.push(def.name.clone());
            }
        }
    }
    Ok(tree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VerdictKind {
    Difference,
    Property,
    Accident,
    Unrelated,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Difference => "difference",
            VerdictKind::Property => "property",
            VerdictKind::Accident => "accident",
            VerdictKind::Unrelated => "unrelated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationVerdict {
    pub kind: VerdictKind,
    /// Every piece of evidence came from the exact monadic procedure.
    pub exact: bool,
    /// Bound used by the bounded fallback, if it was used.
    pub bound: Option<usize>,
    pub evidence: Vec<Evidence>,
}

impl ClassificationVerdict {
    fn from_evidence(kind: VerdictKind, evidence: Vec<Evidence>) -> Self {
        let bound = evidence.iter().find_map(|e| match e.outcome {
            Outcome::HoldsUpTo(b) => Some(b),
            _ => None,
        });
        ClassificationVerdict {
            kind,
            exact: evidence.iter().all(Evidence::exact),
            bound,
            evidence,
        }
    }
}

fn class_def<'a>(d: &'a DefinitionSystem, name: &str) -> Result<&'a PredicateDef, PredicabiliaError> {
    match d.predicate(name) {
        Some(p) if p.params.len() == 1 => Ok(p),
        Some(_) => Err(PredicabiliaError::NotAClass(name.to_string())),
        None => Err(PredicabiliaError::NotADefinedClass(name.to_string())),
    }
}

fn check_free(f: &Formula, var: &str) -> Result<(), PredicabiliaError> {
    let extra: Vec<String> = f.free_vars().into_iter().filter(|v| v != var).collect();
    if extra.is_empty() {
        Ok(())
    } else {
        Err(PredicabiliaError::FreeVariables(extra, var.to_string()))
    }
}

/// Classifies `rho`, a formula in `var`, against the defined class `species`.
/// Difference is tested first (equivalence with the difference of the
/// species' edge), then mutual entailment with the unfolded definition
/// (property), then one-way entailment (accident).
pub fn classify_formula(
    rho: &Formula,
    var: &str,
    species: &str,
    d: &DefinitionSystem,
    engine: &Engine,
) -> Result<ClassificationVerdict, PredicabiliaError> {
    let def = class_def(d, species)?;
    check_free(rho, var)?;
    let rho = unfold(rho, d)?;
    let psi = unfold(&Formula::Pred(species.to_string(), vec![Term::var(var)]), d)?;
    let mut evidence = Vec::new();
    if let Some(edge) = guard_of(def, d) {
        let delta = unfold(&edge.difference_at(var), d)?;
        let there = engine.entails(&rho, &delta)?;
        let back = if there.holds() {
            Some(engine.entails(&delta, &rho)?)
        } else {
            None
        };
        match back {
            Some(back) if back.holds() => {
                return Ok(ClassificationVerdict::from_evidence(
                    VerdictKind::Difference,
                    vec![there, back],
                ))
            }
            Some(back) => evidence.extend([there, back]),
            None => evidence.push(there),
        }
    }
    let forward = engine.entails(&psi, &rho)?;
    let reverse = engine.entails(&rho, &psi)?;
    let kind = match (forward.holds(), reverse.holds()) {
        (true, true) => VerdictKind::Property,
        (true, false) => VerdictKind::Accident,
        _ => VerdictKind::Unrelated,
    };
    let mut shown = vec![forward, reverse];
    if kind == VerdictKind::Unrelated {
        shown.extend(evidence);
    }
    Ok(ClassificationVerdict::from_evidence(kind, shown))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusScore {
    pub candidate: String,
    pub containment: Evidence,
    /// Residual difference and its NNF node count, for containing candidates.
    pub difference: Option<(Formula, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximateGenus {
    pub genus: String,
    pub difference: Formula,
    pub scores: Vec<GenusScore>,
}

/// Chooses among `candidates` the class giving the smallest difference for
/// `species`. The difference is found by greedily dropping conjuncts of the
/// unfolded definition while `candidate & difference` still entails it.
pub fn proximate_genus(
    species: &str,
    candidates: &[String],
    d: &DefinitionSystem,
    engine: &Engine,
) -> Result<ProximateGenus, PredicabiliaError> {
    let def = class_def(d, species)?;
    let var = def.params[0].as_str();
    let psi = unfold(&Formula::Pred(species.to_string(), vec![Term::var(var)]), d)?;
    let parts: Vec<Formula> = psi.conjuncts().into_iter().cloned().collect();
    let mut scores = Vec::new();
    for name in candidates {
        if !d.is_class(name) {
            return Err(PredicabiliaError::NotAClass(name.clone()));
        }
        let genus = unfold(&Formula::Pred(name.clone(), vec![Term::var(var)]), d)?;
        let containment = engine.entails(&psi, &genus)?;
        let difference = if containment.holds() {
            let mut kept = parts.clone();
            let mut i = 0;
            while i < kept.len() {
                let mut trial = kept.clone();
                trial.remove(i);
                let candidate = Formula::and(genus.clone(), Formula::conjoin(trial.clone()));
                if engine.entails(&candidate, &psi)?.holds() {
                    kept = trial;
                } else {
                    i += 1;
                }
            }
            let delta = Formula::conjoin(kept);
            let score = delta.nnf().node_count();
            Some((delta, score))
        } else {
            None
        };
        scores.push(GenusScore {
            candidate: name.clone(),
            containment,
            difference,
        });
    }
    let best = scores
        .iter()
        .filter_map(|s| s.difference.as_ref().map(|(f, n)| (*n, &s.candidate, f)))
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)))
        .map(|(_, g, f)| (g.clone(), f.clone()));
    match best {
        Some((genus, difference)) => Ok(ProximateGenus {
            genus,
            difference,
            scores,
        }),
        None => Err(PredicabiliaError::NoContainingCandidate(species.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheorySet {
    pub sentences: Vec<Formula>,
    pub generator_flags: Vec<bool>,
    /// `evidence[i][j]`: does sentence `i` entail sentence `j`. The diagonal
    /// is `None`.
    pub evidence: Vec<Vec<Option<Evidence>>>,
    pub exact: bool,
    pub bound: Option<usize>,
}

impl TheorySet {
    pub fn generators(&self) -> impl Iterator<Item = &Formula> {
        self.sentences
            .iter()
            .zip(&self.generator_flags)
            .filter(|(_, g)| **g)
            .map(|(s, _)| s)
    }
}

/// Flags each sentence that entails every other sentence of the list.
pub fn generators(sentences: &[Formula], engine: &Engine) -> Result<TheorySet, PredicabiliaError> {
    if sentences.is_empty() {
        return Err(PredicabiliaError::Empty);
    }
    let mut evidence = Vec::with_capacity(sentences.len());
    for (i, s) in sentences.iter().enumerate() {
        let mut row = Vec::with_capacity(sentences.len());
        for (j, t) in sentences.iter().enumerate() {
            row.push(if i == j { None } else { Some(engine.entails(s, t)?) });
        }
        evidence.push(row);
    }
    let generator_flags = evidence
        .iter()
        .map(|row| row.iter().flatten().all(Evidence::holds))
        .collect();
    let all = evidence.iter().flatten().flatten();
    let exact = all.clone().all(Evidence::exact);
    let bound = all.filter_map(|e| match e.outcome {
        Outcome::HoldsUpTo(b) => Some(b),
        _ => None,
    });
    Ok(TheorySet {
        sentences: sentences.to_vec(),
        generator_flags,
        exact,
        bound: bound.max(),
        evidence,
    })
}
