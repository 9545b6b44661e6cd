//! Definition systems over first-order signatures, and the analyses built
//! on them: unfolding, finite-model entailment, an exact procedure for the
//! monadic fragment, genus/species/difference classification, and
//! reconstruction of definitions from families of extensions.

pub mod defsys;
pub mod eval;
pub mod extensional;
pub mod formula;
pub mod lexer;
pub mod magma;
pub mod model;
pub mod monadic;
pub mod parser;
pub mod predicabilia;
pub mod render;
pub mod semantics;

pub use defsys::{DefinitionSystem, ValidationReport};
pub use formula::{Formula, Signature, Term};
pub use model::FiniteModel;
pub use parser::{parse_document, parse_formula, Document, ParseError, Symbols};
