//! Extensions of defined classes, laminar families, and rebuilding a
//! definition system from a laminar family over a monadic model.

use crate::defsys::{unfold, DefinitionSystem, DefsysError};
use crate::eval::extension;
use crate::formula::{Formula, Term};
use crate::model::{FiniteModel, ModelError};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionalError {
    #[error(transparent)]
    Defsys(#[from] DefsysError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("set `{name}` contains {element}, outside a universe of size {size}")]
    OutOfBounds { name: String, element: usize, size: usize },
    #[error("set name `{0}` is used twice")]
    DuplicateName(String),
    #[error("set name `{0}` is already a symbol of the model")]
    NameClash(String),
    #[error("{0} unary predicates; cells are limited to {MAX_CELL_PREDICATES}")]
    TooManyPredicates(usize),
}

pub const MAX_CELL_PREDICATES: usize = 60;

/// Named subsets of one finite universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionFamily {
    pub universe: usize,
    pub sets: Vec<(String, BTreeSet<usize>)>,
}

impl ExtensionFamily {
    pub fn new(universe: usize, sets: Vec<(String, BTreeSet<usize>)>) -> Result<Self, ExtensionalError> {
        let mut seen = BTreeSet::new();
        for (name, set) in &sets {
            if !seen.insert(name.as_str()) {
                return Err(ExtensionalError::DuplicateName(name.clone()));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= universe) {
                return Err(ExtensionalError::OutOfBounds {
                    name: name.clone(),
                    element: e,
                    size: universe,
                });
            }
        }
        Ok(ExtensionFamily { universe, sets })
    }

    pub fn get(&self, name: &str) -> Option<&BTreeSet<usize>> {
        self.sets.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

/// Extension of every unary defined predicate, in definition order.
pub fn extensions(d: &DefinitionSystem, m: &FiniteModel) -> Result<ExtensionFamily, ExtensionalError> {
    m.check_interprets(&d.base)?;
    let mut sets = Vec::new();
    for class in d.classes() {
        let var = &class.params[0];
        let body = unfold(&Formula::Pred(class.name.clone(), vec![Term::var(var)]), d)?;
        let ext = extension(&body, var, m).map_err(DefsysError::from)?;
        sets.push((class.name.clone(), ext.into_iter().collect()));
    }
    Ok(ExtensionFamily {
        universe: m.size(),
        sets,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Laminarity {
    Laminar,
    /// Two sets that meet without either containing the other.
    NotLaminar(String, String),
}

fn overlap(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
    !a.is_disjoint(b) && !a.is_subset(b) && !b.is_subset(a)
}

/// The witness is the first overlapping pair with names in sorted order.
pub fn check_laminar(g: &ExtensionFamily) -> Laminarity {
    let mut sorted: Vec<&(String, BTreeSet<usize>)> = g.sets.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for (i, (a, sa)) in sorted.iter().map(|p| (&p.0, &p.1)).enumerate() {
        for (b, sb) in sorted[i + 1..].iter().map(|p| (&p.0, &p.1)) {
            if overlap(sa, sb) {
                return Laminarity::NotLaminar(a.clone(), b.clone());
            }
        }
    }
    Laminarity::Laminar
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReconstructionResult {
    System {
        system: DefinitionSystem,
        /// Each set with the set it was defined from.
        parents: Vec<(String, Option<String>)>,
    },
    NotLaminar(String, String),
    /// Two names for the same set.
    EqualSets(String, String),
    Undefinable { name: String, reason: String },
}

/// Rebuilds guarded definitions for a laminar family from the unary
/// predicates of `m`. Sets are defined largest first; each is guarded by
/// its smallest strict superset and distinguished from it by a small
/// disjunction of cells.
pub fn reconstruct(g: &ExtensionFamily, m: &FiniteModel) -> Result<ReconstructionResult, ExtensionalError> {
    let g = ExtensionFamily::new(m.size(), g.sets.clone())?;
    if let Laminarity::NotLaminar(a, b) = check_laminar(&g) {
        return Ok(ReconstructionResult::NotLaminar(a, b));
    }
    for (i, (a, sa)) in g.sets.iter().enumerate() {
        if m.relation(a).is_some() || m.constant(a).is_some() {
            return Err(ExtensionalError::NameClash(a.clone()));
        }
        if let Some((b, _)) = g.sets[i + 1..].iter().find(|(_, sb)| sb == sa) {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            return Ok(ReconstructionResult::EqualSets(x.clone(), y.clone()));
        }
    }

    let base = m.signature();
    let unary: Vec<String> = base.unary_predicates().map(str::to_string).collect();
    if unary.len() > MAX_CELL_PREDICATES {
        return Err(ExtensionalError::TooManyPredicates(unary.len()));
    }
    let cell_of: Vec<usize> = (0..m.size())
        .map(|e| {
            unary
                .iter()
                .enumerate()
                .filter(|(_, p)| m.relation(p).expect("declared").contains(&[e]))
                .fold(0, |acc, (i, _)| acc | 1 << i)
        })
        .collect();

    let mut order: Vec<&(String, BTreeSet<usize>)> = g.sets.iter().collect();
    order.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));

    let mut system = DefinitionSystem::new(base);
    let mut parents = Vec::new();
    let universe: BTreeSet<usize> = (0..m.size()).collect();
    for (name, set) in &order {
        for &e in set.iter() {
            if let Some(f) = (0..m.size()).find(|&f| cell_of[f] == cell_of[e] && !set.contains(&f)) {
                return Ok(ReconstructionResult::Undefinable {
                    name: name.clone(),
                    reason: format!(
                        "not a union of cells: {e} is in the set but {f}, in the same cell, is not"
                    ),
                });
            }
        }
        let parent = order
            .iter()
            .filter(|(_, s)| s.len() > set.len() && set.is_subset(s))
            .min_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.0.cmp(&b.0)));
        let within = parent.map_or(&universe, |p| &p.1);
        let positive: BTreeSet<usize> = set.iter().map(|&e| cell_of[e]).collect();
        let forbidden: BTreeSet<usize> = within
            .iter()
            .filter(|e| !set.contains(e))
            .map(|&e| cell_of[e])
            .collect();
        let selector = cover(&unary, &positive, &forbidden);
        let body = match parent {
            Some((p, _)) => Formula::and(Formula::pred(p, &["x"]), selector).simplify(),
            None => selector,
        };
        system = system.define(name, &["x"], body);
        parents.push((name.clone(), parent.map(|p| p.0.clone())));
    }
    Ok(ReconstructionResult::System { system, parents })
}

/// Above this many predicates the search over all terms is skipped and
/// each cell becomes its own term.
const MAX_TERM_SEARCH: usize = 10;

/// A disjunction of literal conjunctions true on every `positive` cell and
/// false on every `forbidden` one. Terms are picked greedily: most newly
/// covered cells, then fewest literals, then enumeration order.
fn cover(preds: &[String], positive: &BTreeSet<usize>, forbidden: &BTreeSet<usize>) -> Formula {
    if positive.is_empty() {
        return Formula::False;
    }
    let k = preds.len();
    // term = (mask of constrained predicates, required values)
    let mut terms: Vec<(usize, usize)> = Vec::new();
    if k <= MAX_TERM_SEARCH {
        for mask in 0..1usize << k {
            let mut value = mask;
            loop {
                terms.push((mask, value));
                if value == 0 {
                    break;
                }
                value = (value - 1) & mask;
            }
        }
        terms.sort_by_key(|&(mask, value)| (mask.count_ones(), mask, !value & mask));
    } else {
        let full = (1usize << k) - 1;
        terms.extend(positive.iter().map(|&c| (full, c)));
    }
    let covers = |t: (usize, usize), cell: usize| cell & t.0 == t.1;
    let admissible: Vec<(usize, usize)> = terms
        .into_iter()
        .filter(|&t| !forbidden.iter().any(|&c| covers(t, c)))
        .collect();
    let mut left = positive.clone();
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let best = admissible
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let na = left.iter().filter(|&&c| covers(a, c)).count();
                let nb = left.iter().filter(|&&c| covers(b, c)).count();
                na.cmp(&nb).then(std::cmp::Ordering::Greater)
            })
            .expect("each positive cell is admissible as a full term");
        left.retain(|&c| !covers(best, c));
        chosen.push(best);
    }
    Formula::disjoin(chosen.into_iter().map(|(mask, value)| {
        Formula::conjoin((0..k).filter(|i| mask >> i & 1 == 1).map(|i| {
            let atom = Formula::pred(&preds[i], &["x"]);
            if value >> i & 1 == 1 {
                atom
            } else {
                Formula::not(atom)
            }
        }))
    }))
    .simplify()
}
