//! Tarskian satisfaction over finite models.
//!
//! Formulas are compiled once against a [`Layout`] (symbol names resolved to
//! table indices, variables to environment slots) so that the enumeration
//! loops can re-evaluate them against many interpretations cheaply.

use crate::formula::{Formula, Signature, Term};
use crate::model::{FiniteModel, Relation};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("free variable `{0}` has no assigned element")]
    UnassignedVariable(String),
    #[error("symbol `{0}` is not interpreted by the model")]
    Uninterpreted(String),
    #[error("predicate `{name}` used with {found} arguments but interpreted with arity {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("element {element} assigned to `{var}` is outside a universe of size {size}")]
    OutOfBounds {
        var: String,
        element: usize,
        size: usize,
    },
}

/// Ordered symbol names that fix table positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub constants: Vec<String>,
    pub predicates: Vec<(String, usize)>,
}

impl Layout {
    pub fn of_signature(sig: &Signature) -> Self {
        Layout {
            constants: sig.constants.clone(),
            predicates: sig.predicates.clone(),
        }
    }

    pub fn of_model(m: &FiniteModel) -> Self {
        Layout {
            constants: m.constants().map(|(c, _)| c.to_string()).collect(),
            predicates: m
                .relations()
                .map(|(p, r)| (p.to_string(), r.arity()))
                .collect(),
        }
    }
}

/// A model's interpretation arranged by a [`Layout`].
#[derive(Debug, Clone)]
pub struct Interp {
    pub size: usize,
    pub consts: Vec<usize>,
    pub rels: Vec<Relation>,
}

impl Interp {
    pub fn from_model(m: &FiniteModel, layout: &Layout) -> Result<Self, EvalError> {
        let consts = layout
            .constants
            .iter()
            .map(|c| m.constant(c).ok_or_else(|| EvalError::Uninterpreted(c.clone())))
            .collect::<Result<_, _>>()?;
        let rels = layout
            .predicates
            .iter()
            .map(|(p, a)| match m.relation(p) {
                Some(r) if r.arity() == *a => Ok(r.clone()),
                Some(r) => Err(EvalError::Arity {
                    name: p.clone(),
                    expected: r.arity(),
                    found: *a,
                }),
                None => Err(EvalError::Uninterpreted(p.clone())),
            })
            .collect::<Result<_, _>>()?;
        Ok(Interp {
            size: m.size(),
            consts,
            rels,
        })
    }

    pub fn to_model(&self, layout: &Layout) -> FiniteModel {
        let mut m = FiniteModel::new(self.size).expect("interpretations are nonempty");
        for (c, &e) in layout.constants.iter().zip(&self.consts) {
            m.set_constant(c, e).expect("constant in range");
        }
        for ((p, _), r) in layout.predicates.iter().zip(&self.rels) {
            m.set_relation(p, r.clone()).expect("relation sized to universe");
        }
        m
    }
}

#[derive(Debug, Clone, Copy)]
enum Arg {
    Slot(usize),
    Const(usize),
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Atom(usize, Vec<Arg>),
    Eq(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
}

/// A formula resolved against a layout. Free variables occupy slots
/// `0..free.len()` in the order given at compile time.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    free: Vec<String>,
    env_len: usize,
}

impl Compiled {
    pub fn new(f: &Formula, layout: &Layout, free: &[String]) -> Result<Self, EvalError> {
        let mut scope: Vec<(String, usize)> = free
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut env_len = free.len();
        let root = compile(f, layout, &mut scope, &mut env_len)?;
        Ok(Compiled {
            root,
            free: free.to_vec(),
            env_len,
        })
    }

    pub fn free(&self) -> &[String] {
        &self.free
    }

    /// A scratch environment with the free slots set from `values`.
    pub fn env(&self, values: &[usize]) -> Vec<usize> {
        let mut env = vec![0; self.env_len.max(1)];
        env[..values.len()].copy_from_slice(values);
        env
    }

    pub fn eval(&self, interp: &Interp, env: &mut [usize]) -> bool {
        eval_node(&self.root, interp, env)
    }
}

fn compile(
    f: &Formula,
    layout: &Layout,
    scope: &mut Vec<(String, usize)>,
    env_len: &mut usize,
) -> Result<Node, EvalError> {
    let arg = |t: &Term, scope: &Vec<(String, usize)>| -> Result<Arg, EvalError> {
        match t {
            Term::Var(v) => scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, s)| Arg::Slot(*s))
                .ok_or_else(|| EvalError::UnassignedVariable(v.clone())),
            Term::Const(c) => layout
                .constants
                .iter()
                .position(|n| n == c)
                .map(Arg::Const)
                .ok_or_else(|| EvalError::Uninterpreted(c.clone())),
        }
    };
    Ok(match f {
        Formula::True => Node::True,
        Formula::False => Node::False,
        Formula::Pred(p, args) => {
            let idx = layout
                .predicates
                .iter()
                .position(|(n, _)| n == p)
                .ok_or_else(|| EvalError::Uninterpreted(p.clone()))?;
            let arity = layout.predicates[idx].1;
            if arity != args.len() {
                return Err(EvalError::Arity {
                    name: p.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            Node::Atom(
                idx,
                args.iter().map(|t| arg(t, scope)).collect::<Result<_, _>>()?,
            )
        }
        Formula::Eq(a, b) => Node::Eq(arg(a, scope)?, arg(b, scope)?),
        Formula::Not(a) => Node::Not(Box::new(compile(a, layout, scope, env_len)?)),
        Formula::And(a, b) => Node::And(
            Box::new(compile(a, layout, scope, env_len)?),
            Box::new(compile(b, layout, scope, env_len)?),
        ),
        Formula::Or(a, b) => Node::Or(
            Box::new(compile(a, layout, scope, env_len)?),
            Box::new(compile(b, layout, scope, env_len)?),
        ),
        Formula::Implies(a, b) => Node::Implies(
            Box::new(compile(a, layout, scope, env_len)?),
            Box::new(compile(b, layout, scope, env_len)?),
        ),
        Formula::Iff(a, b) => Node::Iff(
            Box::new(compile(a, layout, scope, env_len)?),
            Box::new(compile(b, layout, scope, env_len)?),
        ),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let slot = *env_len;
            *env_len += 1;
            scope.push((v.clone(), slot));
            let inner = compile(body, layout, scope, env_len);
            scope.pop();
            let inner = Box::new(inner?);
            if matches!(f, Formula::Forall(..)) {
                Node::Forall(slot, inner)
            } else {
                Node::Exists(slot, inner)
            }
        }
    })
}

#[inline]
fn resolve(a: Arg, interp: &Interp, env: &[usize]) -> usize {
    match a {
        Arg::Slot(s) => env[s],
        Arg::Const(c) => interp.consts[c],
    }
}

fn eval_node(n: &Node, interp: &Interp, env: &mut [usize]) -> bool {
    match n {
        Node::True => true,
        Node::False => false,
        Node::Atom(r, args) => {
            let rel = &interp.rels[*r];
            let idx = args
                .iter()
                .fold(0, |acc, &a| acc * interp.size + resolve(a, interp, env));
            rel.get_index(idx)
        }
        Node::Eq(a, b) => resolve(*a, interp, env) == resolve(*b, interp, env),
        Node::Not(a) => !eval_node(a, interp, env),
        Node::And(a, b) => eval_node(a, interp, env) && eval_node(b, interp, env),
        Node::Or(a, b) => eval_node(a, interp, env) || eval_node(b, interp, env),
        Node::Implies(a, b) => !eval_node(a, interp, env) || eval_node(b, interp, env),
        Node::Iff(a, b) => eval_node(a, interp, env) == eval_node(b, interp, env),
        Node::Forall(slot, body) => (0..interp.size).all(|e| {
            env[*slot] = e;
            eval_node(body, interp, env)
        }),
        Node::Exists(slot, body) => (0..interp.size).any(|e| {
            env[*slot] = e;
            eval_node(body, interp, env)
        }),
    }
}

/// Truth of `f` in `m` under `assignment`, which must cover the free
/// variables of `f`. Equality is identity of elements.
pub fn evaluate(
    f: &Formula,
    m: &FiniteModel,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool, EvalError> {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    let mut values = Vec::with_capacity(free.len());
    for v in &free {
        let e = *assignment
            .get(v)
            .ok_or_else(|| EvalError::UnassignedVariable(v.clone()))?;
        if e >= m.size() {
            return Err(EvalError::OutOfBounds {
                var: v.clone(),
                element: e,
                size: m.size(),
            });
        }
        values.push(e);
    }
    let layout = Layout::of_model(m);
    let compiled = Compiled::new(f, &layout, &free)?;
    let interp = Interp::from_model(m, &layout)?;
    let mut env = compiled.env(&values);
    Ok(compiled.eval(&interp, &mut env))
}

/// Elements `e` with `m |= f[var := e]`; `f` may have no other free variable.
pub fn extension(f: &Formula, var: &str, m: &FiniteModel) -> Result<Vec<usize>, EvalError> {
    let layout = Layout::of_model(m);
    let compiled = Compiled::new(f, &layout, &[var.to_string()])?;
    let interp = Interp::from_model(m, &layout)?;
    let mut env = compiled.env(&[0]);
    Ok((0..m.size())
        .filter(|&e| {
            env[0] = e;
            compiled.eval(&interp, &mut env)
        })
        .collect())
}

/// All assignments of `vars` over `0..size`, lexicographic with the first
/// variable most significant.
pub fn assignments(vars: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = size.pow(vars as u32);
    (0..total).map(move |mut i| {
        let mut a = vec![0; vars];
        for slot in a.iter_mut().rev() {
            *slot = i % size;
            i /= size;
        }
        a
    })
}
