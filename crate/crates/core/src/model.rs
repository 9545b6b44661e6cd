//! Finite structures over a signature.

use crate::formula::Signature;
use std::collections::BTreeMap;

/// A relation of fixed arity over `0..size`, stored as a dense table indexed
/// by the tuple read as a base-`size` number (first coordinate most
/// significant), so table order is lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    size: usize,
    table: Vec<bool>,
}

impl Relation {
    pub fn empty(arity: usize, size: usize) -> Self {
        Relation {
            arity,
            size,
            table: vec![false; size.pow(arity as u32)],
        }
    }

    pub fn from_tuples<I>(arity: usize, size: usize, tuples: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut r = Relation::empty(arity, size);
        for t in tuples {
            if t.len() != arity {
                return Err(ModelError::TupleArity {
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&e) = t.iter().find(|&&e| e >= size) {
                return Err(ModelError::OutOfBounds { element: e, size });
            }
            r.insert(&t);
        }
        Ok(r)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn index_of(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.size + e)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.table[self.index_of(tuple)]
    }

    pub fn insert(&mut self, tuple: &[usize]) {
        let i = self.index_of(tuple);
        self.table[i] = true;
    }

    pub(crate) fn set_index(&mut self, index: usize, value: bool) {
        self.table[index] = value;
    }

    pub(crate) fn get_index(&self, index: usize) -> bool {
        self.table[index]
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    /// Member tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| {
                let mut t = vec![0; self.arity];
                let mut rest = i;
                for slot in t.iter_mut().rev() {
                    *slot = rest % self.size;
                    rest /= self.size;
                }
                t
            })
    }

    pub fn len(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("element {element} outside universe of size {size}")]
    OutOfBounds { element: usize, size: usize },
    #[error("tuple has {found} components, relation has arity {expected}")]
    TupleArity { expected: usize, found: usize },
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(String),
    #[error("symbol `{0}` is interpreted twice")]
    Duplicate(String),
}

/// An explicit finite structure: universe `0..size`, constants mapped to
/// elements, predicates mapped to relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteModel {
    size: usize,
    constants: BTreeMap<String, usize>,
    relations: BTreeMap<String, Relation>,
}

impl FiniteModel {
    pub fn new(size: usize) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyUniverse);
        }
        Ok(FiniteModel {
            size,
            constants: BTreeMap::new(),
            relations: BTreeMap::new(),
        })
    }

    /// Every predicate empty and every constant at element 0.
    pub fn blank(sig: &Signature, size: usize) -> Result<Self, ModelError> {
        let mut m = FiniteModel::new(size)?;
        for c in &sig.constants {
            m.constants.insert(c.clone(), 0);
        }
        for (p, a) in &sig.predicates {
            m.relations.insert(p.clone(), Relation::empty(*a, size));
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn set_constant(&mut self, name: &str, element: usize) -> Result<(), ModelError> {
        if element >= self.size {
            return Err(ModelError::OutOfBounds {
                element,
                size: self.size,
            });
        }
        self.constants.insert(name.to_string(), element);
        Ok(())
    }

    pub fn set_relation(&mut self, name: &str, relation: Relation) -> Result<(), ModelError> {
        if relation.size != self.size {
            return Err(ModelError::OutOfBounds {
                element: relation.size.max(self.size) - 1,
                size: self.size,
            });
        }
        self.relations.insert(name.to_string(), relation);
        Ok(())
    }

    /// Builds a unary relation from a set of elements and installs it.
    pub fn set_unary<I: IntoIterator<Item = usize>>(
        &mut self,
        name: &str,
        elements: I,
    ) -> Result<(), ModelError> {
        let rel = Relation::from_tuples(1, self.size, elements.into_iter().map(|e| vec![e]))?;
        self.set_relation(name, rel)
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, usize)> {
        self.constants.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Checks that every symbol of `sig` is interpreted with the right arity.
    pub fn check_interprets(&self, sig: &Signature) -> Result<(), ModelError> {
        for c in &sig.constants {
            if !self.constants.contains_key(c) {
                return Err(ModelError::Uninterpreted(c.clone()));
            }
        }
        for (p, a) in &sig.predicates {
            match self.relations.get(p) {
                Some(r) if r.arity == *a => {}
                Some(r) => {
                    return Err(ModelError::TupleArity {
                        expected: *a,
                        found: r.arity,
                    })
                }
                None => return Err(ModelError::Uninterpreted(p.clone())),
            }
        }
        Ok(())
    }

    /// The signature this model interprets, equality off.
    pub fn signature(&self) -> Signature {
        Signature {
            constants: self.constants.keys().cloned().collect(),
            predicates: self
                .relations
                .iter()
                .map(|(k, r)| (k.clone(), r.arity))
                .collect(),
            equality: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_tuples_are_lexicographic() {
        let r = Relation::from_tuples(2, 3, vec![vec![2, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let ts: Vec<_> = r.tuples().collect();
        assert_eq!(ts, vec![vec![0, 1], vec![1, 1], vec![2, 0]]);
        assert!(r.contains(&[2, 0]));
        assert!(!r.contains(&[0, 2]));
    }

    #[test]
    fn bounds_are_checked() {
        assert_eq!(FiniteModel::new(0), Err(ModelError::EmptyUniverse));
        assert!(Relation::from_tuples(1, 2, vec![vec![2]]).is_err());
        assert!(Relation::from_tuples(2, 2, vec![vec![1]]).is_err());
    }

    #[test]
    fn zero_ary_relation_has_one_slot() {
        let mut r = Relation::empty(0, 4);
        assert_eq!(r.table_len(), 1);
        r.insert(&[]);
        assert_eq!(r.tuples().collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    }
}
