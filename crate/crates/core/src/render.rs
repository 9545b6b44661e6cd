//! Printing formulas, signatures, models and definition systems back into
//! the DSL. Everything emitted here re-parses.

use crate::defsys::{ConstBody, Definition, DefinitionSystem};
use crate::formula::{Formula, Signature, Term};
use crate::model::FiniteModel;
use std::fmt::Write;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Iff = 1,
    Implies = 2,
    Or = 3,
    And = 4,
    Unary = 5,
}

pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Forall(v, body) => {
            let _ = write!(out, "forall {v}. ");
            write_formula(out, body);
        }
        Formula::Exists(v, body) => {
            let _ = write!(out, "exists {v}. ");
            write_formula(out, body);
        }
        other => write_operand(out, other, None),
    }
}

fn prec(f: &Formula) -> Option<Prec> {
    match f {
        Formula::Iff(..) => Some(Prec::Iff),
        Formula::Implies(..) => Some(Prec::Implies),
        Formula::Or(..) => Some(Prec::Or),
        Formula::And(..) => Some(Prec::And),
        Formula::Not(..) => Some(Prec::Unary),
        _ => None,
    }
}

/// Writes `f` as an operand; `needs_parens` decides from the parent context.
fn write_operand(out: &mut String, f: &Formula, parens: Option<bool>) {
    if parens == Some(true) {
        out.push('(');
        write_formula(out, f);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Pred(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                out.push('(');
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(t.name());
                }
                out.push(')');
            }
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "{} = {}", a.name(), b.name());
        }
        Formula::Not(a) => {
            out.push('!');
            let p = !matches!(**a, Formula::Pred(..) | Formula::True | Formula::False | Formula::Not(_));
            write_operand(out, a, Some(p));
        }
        Formula::And(a, b) => write_binary(out, a, " & ", b, Prec::And),
        Formula::Or(a, b) => write_binary(out, a, " | ", b, Prec::Or),
        Formula::Implies(a, b) => write_binary(out, a, " -> ", b, Prec::Implies),
        Formula::Iff(a, b) => write_binary(out, a, " <-> ", b, Prec::Iff),
        Formula::Forall(..) | Formula::Exists(..) => write_formula(out, f),
    }
}

fn write_binary(out: &mut String, a: &Formula, op: &str, b: &Formula, p: Prec) {
    let left = match prec(a) {
        // quantifiers would swallow the rest of the line
        None => is_quantifier(a),
        Some(q) => q < p || (q == p && matches!(p, Prec::Implies | Prec::Iff)),
    } || (matches!(p, Prec::Implies | Prec::Iff) && matches!(a, Formula::Implies(..) | Formula::Iff(..)));
    let right = match prec(b) {
        None => is_quantifier(b),
        Some(q) => q <= p && !matches!(b, Formula::Not(_)),
    } || matches!(b, Formula::Implies(..) | Formula::Iff(..)) && p <= Prec::Implies;
    write_operand(out, a, Some(left));
    out.push_str(op);
    write_operand(out, b, Some(right));
}

fn is_quantifier(f: &Formula) -> bool {
    matches!(f, Formula::Forall(..) | Formula::Exists(..))
}

/// Body of a `sig { ... }` block, e.g. `pred M1/1; const c; equality;`.
pub fn render_signature_body(sig: &Signature) -> String {
    let mut parts = Vec::new();
    for (p, a) in &sig.predicates {
        parts.push(format!("pred {p}/{a};"));
    }
    for c in &sig.constants {
        parts.push(format!("const {c};"));
    }
    if sig.equality {
        parts.push("equality;".to_string());
    }
    parts.join(" ")
}

pub fn render_signature(sig: &Signature) -> String {
    let mut out = String::from("sig {\n");
    for (p, a) in &sig.predicates {
        let _ = writeln!(out, "  pred {p}/{a};");
    }
    for c in &sig.constants {
        let _ = writeln!(out, "  const {c};");
    }
    if sig.equality {
        out.push_str("  equality;\n");
    }
    out.push_str("}\n");
    out
}

pub fn render_definition(def: &Definition) -> String {
    match def {
        Definition::Predicate(p) => {
            format!("def {}({}) := {};", p.name, p.params.join(", "), render(&p.body))
        }
        Definition::Constant(c) => match &c.body {
            ConstBody::Alias(t) => format!("defconst {} := {};", c.name, term(t)),
            ConstBody::Description { var, body } => {
                format!("defconst {}({var}) := {};", c.name, render(body))
            }
        },
    }
}

fn term(t: &Term) -> &str {
    t.name()
}

/// The definition entries of `d`, one per line.
pub fn render_defsys(d: &DefinitionSystem) -> String {
    let mut out = String::new();
    for def in &d.definitions {
        out.push_str(&render_definition(def));
        out.push('\n');
    }
    out
}

pub fn render_model(name: &str, m: &FiniteModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {name} {{");
    let _ = writeln!(out, "  universe {};", m.size());
    for (c, e) in m.constants() {
        let _ = writeln!(out, "  {c} = {{{e}}};");
    }
    for (p, rel) in m.relations() {
        let tuples: Vec<String> = rel
            .tuples()
            .map(|t| match t.len() {
                1 => t[0].to_string(),
                0 => "()".to_string(),
                _ => format!(
                    "({})",
                    t.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
                ),
            })
            .collect();
        let _ = writeln!(out, "  {p} = {{{}}};", tuples.join(", "));
    }
    out.push_str("}\n");
    out
}
