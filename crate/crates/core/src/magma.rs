//! Finite testbed of binary operation tables.
//!
//! The universe is every operation table on carriers `{0..n-1}` for
//! `n = 1..=max_size`, smallest carriers first and tables in lexicographic
//! order of their entries (row by row). Each table is one element, and the
//! base predicates record algebraic properties of it.

use crate::defsys::DefinitionSystem;
use crate::formula::{Formula, Signature};
use crate::model::FiniteModel;
use crate::render::{render_defsys, render_model, render_signature};

pub const MAX_DEMO_SIZE: usize = 3;

pub const BASE_PREDICATES: [&str; 4] = ["Assoc", "HasId", "HasInv", "Comm"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("carrier size must be between 1 and {MAX_DEMO_SIZE}, got {0}")]
pub struct SizeOutOfRange(pub usize);

/// `op[a][b]` for `a, b` in a carrier of size `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub n: usize,
    pub entries: Vec<usize>,
}

impl Table {
    fn decode(n: usize, mut index: usize) -> Self {
        let cells = n * n;
        let mut entries = vec![0; cells];
        for slot in entries.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        Table { n, entries }
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.entries[a * self.n + b]
    }

    pub fn is_associative(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| self.op(self.op(a, b), c) == self.op(a, self.op(b, c))))
        })
    }

    pub fn identity(&self) -> Option<usize> {
        (0..self.n).find(|&e| (0..self.n).all(|a| self.op(e, a) == a && self.op(a, e) == a))
    }

    /// Every element has a two-sided inverse with respect to the identity;
    /// false when there is no identity.
    pub fn has_inverses(&self) -> bool {
        self.identity().is_some_and(|e| {
            (0..self.n).all(|a| (0..self.n).any(|b| self.op(a, b) == e && self.op(b, a) == e))
        })
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.op(a, b) == self.op(b, a)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagmaDemo {
    pub model: FiniteModel,
    pub system: DefinitionSystem,
    pub tables: Vec<Table>,
}

impl MagmaDemo {
    /// Signature, definitions and the model `magma` as one DSL document.
    pub fn to_dsl(&self) -> String {
        format!(
            "{}\n{}\n{}",
            render_signature(&self.system.base),
            render_defsys(&self.system),
            render_model("magma", &self.model)
        )
    }
}

pub fn base_signature() -> Signature {
    BASE_PREDICATES
        .iter()
        .fold(Signature::new(), |s, p| s.with_predicate(p, 1))
}

/// `Mon := Assoc & HasId`, `Grp := Mon & HasInv`, `Ab := Grp & Comm`.
pub fn class_system() -> DefinitionSystem {
    let p = |name: &str| Formula::pred(name, &["x"]);
    DefinitionSystem::new(base_signature())
        .define("Mon", &["x"], Formula::and(p("Assoc"), p("HasId")))
        .define("Grp", &["x"], Formula::and(p("Mon"), p("HasInv")))
        .define("Ab", &["x"], Formula::and(p("Grp"), p("Comm")))
}

pub fn demo_magma(max_size: usize) -> Result<MagmaDemo, SizeOutOfRange> {
    if !(1..=MAX_DEMO_SIZE).contains(&max_size) {
        return Err(SizeOutOfRange(max_size));
    }
    let tables: Vec<Table> = (1..=max_size)
        .flat_map(|n| (0..n.pow((n * n) as u32)).map(move |i| Table::decode(n, i)))
        .collect();
    let mut model = FiniteModel::blank(&base_signature(), tables.len()).expect("nonempty");
    let tests: [fn(&Table) -> bool; 4] = [
        Table::is_associative,
        |t| t.identity().is_some(),
        Table::has_inverses,
        Table::is_commutative,
    ];
    for (name, test) in BASE_PREDICATES.iter().zip(tests) {
        let members = tables.iter().enumerate().filter(|(_, t)| test(t)).map(|(i, _)| i);
        model.set_unary(name, members).expect("elements in range");
    }
    Ok(MagmaDemo {
        model,
        system: class_system(),
        tables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(demo: &MagmaDemo, pred: &str) -> usize {
        demo.model.relation(pred).unwrap().len()
    }

    #[test]
    fn range_is_enforced() {
        assert!(demo_magma(0).is_err());
        assert!(demo_magma(4).is_err());
    }

    #[test]
    fn single_table_has_every_property() {
        let d = demo_magma(1).unwrap();
        assert_eq!(d.model.size(), 1);
        for p in BASE_PREDICATES {
            assert_eq!(count(&d, p), 1);
        }
    }

    #[test]
    fn two_element_counts() {
        let d = demo_magma(2).unwrap();
        assert_eq!(d.model.size(), 17);
        // size 1 contributes one table to every predicate
        assert_eq!(count(&d, "Assoc"), 1 + 8);
        assert_eq!(count(&d, "HasId"), 1 + 4);
        assert_eq!(count(&d, "HasInv"), 1 + 2);
        assert_eq!(count(&d, "Comm"), 1 + 8);
    }

    #[test]
    fn three_element_counts() {
        let d = demo_magma(3).unwrap();
        assert_eq!(d.model.size(), 1 + 16 + 19683);
        assert_eq!(count(&d, "Assoc"), 1 + 8 + 113);
        assert_eq!(count(&d, "HasId"), 1 + 4 + 243);
        assert_eq!(count(&d, "Comm"), 1 + 8 + 729);
    }

    #[test]
    fn tables_are_lexicographic() {
        let d = demo_magma(2).unwrap();
        assert_eq!(d.tables[1].entries, vec![0, 0, 0, 0]);
        assert_eq!(d.tables[2].entries, vec![0, 0, 0, 1]);
        assert_eq!(d.tables[16].entries, vec![1, 1, 1, 1]);
        // xor on {0,1}
        let xor = d.tables.iter().position(|t| t.n == 2 && t.entries == [0, 1, 1, 0]).unwrap();
        for p in BASE_PREDICATES {
            assert!(d.model.relation(p).unwrap().contains(&[xor]), "{p}");
        }
    }

    #[test]
    fn dsl_reparses() {
        let d = demo_magma(2).unwrap();
        let doc = crate::parser::parse_document(&d.to_dsl()).unwrap();
        assert_eq!(doc.system, d.system);
        assert_eq!(doc.model("magma"), Some(&d.model));
    }
}
