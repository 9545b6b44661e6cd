//! Recursive-descent parser for the DSL.
//!
//! ```text
//! file      := block* ;
//! block     := sig | defsys | model | assert | family ;
//! sig       := "sig" "{" (("pred" NAME "/" INT | "const" NAME | "equality") ";")* "}" ;
//! defsys    := ("defconst" NAME ":=" term ";"
//!              | "defconst" NAME "(" NAME ")" ":=" formula ";"
//!              | "def" NAME "(" vars ")" ":=" formula ";")* ;
//! model     := "model" NAME "{" "universe" INT ";" (NAME "=" tupleset ";")* "}" ;
//! assert    := "assert" formula ";" ;
//! family    := "family" NAME "{" (NAME "=" tupleset ";")* "}" ;
//! tupleset  := "{" [ item ("," item)* ] "}" ;  item := INT | "(" [INT ("," INT)*] ")"
//! ```
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->`, `<->`. `&` and `|` are
//! left-associative, `->` and `<->` right-associative. A quantifier body
//! extends as far right as possible. Zero-ary predicates may be written bare.
//!
//! Bound variables are renamed after parsing so that no name is bound twice.

use crate::defsys::{ConstBody, ConstantDef, Definition, DefinitionSystem, PredicateDef};
use crate::formula::{Formula, Signature, Term};
use crate::lexer::{tokenize, Pos, Tok, Token, KEYWORDS};
use crate::model::{FiniteModel, Relation};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: `{name}` expects {expected} argument(s), found {found}")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` is declared more than once")]
    Duplicate { line: usize, col: usize, name: String },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    pub fn position(&self) -> Option<Pos> {
        let (line, col) = match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Arity { line, col, .. }
            | ParseError::UnknownSymbol { line, col, .. }
            | ParseError::Duplicate { line, col, .. } => (*line, *col),
        };
        Some(Pos { line, col })
    }
}

/// Largest relation table a `model` block may allocate.
pub const MAX_TABLE: usize = 1 << 22;

/// Names visible while parsing a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Symbols {
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub equality: bool,
}

impl Symbols {
    pub fn from_signature(sig: &Signature) -> Self {
        Symbols {
            predicates: sig.predicates.iter().cloned().collect(),
            constants: sig.constants.iter().cloned().collect(),
            equality: sig.equality,
        }
    }

    /// Base symbols plus every symbol the system defines.
    pub fn of_system(d: &DefinitionSystem) -> Self {
        let mut s = Symbols::from_signature(&d.base);
        for def in &d.definitions {
            match def {
                Definition::Predicate(p) => {
                    s.predicates.insert(p.name.clone(), p.params.len());
                }
                Definition::Constant(c) => {
                    s.constants.insert(c.name.clone());
                }
            }
        }
        s
    }
}

/// A named family of element sets, as written in `family` blocks or on the
/// command line.
pub type NamedSets = Vec<(String, BTreeSet<usize>)>;

/// Everything a source file can declare.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub signature: Signature,
    pub system: DefinitionSystem,
    pub models: Vec<(String, FiniteModel)>,
    pub assertions: Vec<Formula>,
    pub families: Vec<(String, NamedSets)>,
}

impl Document {
    pub fn model(&self, name: &str) -> Option<&FiniteModel> {
        self.models.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn family(&self, name: &str) -> Option<&NamedSets> {
        self.families.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    syms: Symbols,
    bound: Vec<String>,
    depth: usize,
}

/// Maximum formula nesting (including the length of `&`/`|` chains).
pub const MAX_NESTING: usize = 512;

impl Parser {
    fn new(src: &str, syms: Symbols) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
            syms,
            bound: Vec::new(),
            depth: 0,
        })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::syntax(self.pos(), "formula is nested too deeply"));
        }
        Ok(())
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.at + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == want {
            Ok(self.advance().pos)
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    /// An identifier that is not a keyword.
    fn name(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Name(n) if !KEYWORDS.contains(&n.as_str()) => {
                let pos = self.advance().pos;
                Ok((n, pos))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn int(&mut self) -> Result<usize, ParseError> {
        match *self.peek() {
            Tok::Int(i) => {
                self.advance();
                Ok(i)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.implication()?;
        let f = if *self.peek() == Tok::DoubleArrow {
            self.advance();
            let rhs = self.formula()?;
            Formula::iff(lhs, rhs)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.disjunction()?;
        let f = if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.implication()?;
            Formula::implies(lhs, rhs)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(f)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        let start = self.depth;
        while *self.peek() == Tok::Bar {
            self.advance();
            self.enter()?;
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        self.depth = start;
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        let start = self.depth;
        while *self.peek() == Tok::Amp {
            self.advance();
            self.enter()?;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        self.depth = start;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let f = self.unary_inner()?;
        self.depth -= 1;
        Ok(f)
    }

    fn unary_inner(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Name(kw) if kw == "forall" || kw == "exists" => {
                self.advance();
                let (var, _) = self.name()?;
                self.expect(Tok::Dot)?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                let body = Box::new(body?);
                Ok(if kw == "forall" {
                    Formula::Forall(var, body)
                } else {
                    Formula::Exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Name(n) if n == "true" => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::Name(n) if n == "false" => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.advance();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Name(_) => {
                if *self.peek_at(1) == Tok::Equals {
                    let pos = self.pos();
                    let lhs = self.term()?;
                    self.advance();
                    let rhs = self.term()?;
                    if !self.syms.equality {
                        return Err(ParseError::syntax(
                            pos,
                            "equality is not enabled in the signature",
                        ));
                    }
                    return Ok(Formula::Eq(lhs, rhs));
                }
                let (name, pos) = self.name()?;
                let args = if *self.peek() == Tok::LParen {
                    self.advance();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.term()?);
                        while *self.peek() == Tok::Comma {
                            self.advance();
                            args.push(self.term()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    args
                } else {
                    Vec::new()
                };
                match self.syms.predicates.get(&name) {
                    None => Err(ParseError::UnknownSymbol {
                        line: pos.line,
                        col: pos.col,
                        name,
                    }),
                    Some(&arity) if arity != args.len() => Err(ParseError::Arity {
                        line: pos.line,
                        col: pos.col,
                        name,
                        expected: arity,
                        found: args.len(),
                    }),
                    Some(_) => Ok(Formula::Pred(name, args)),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (name, pos) = self.name()?;
        if self.syms.predicates.contains_key(&name) && !self.bound.contains(&name) {
            return Err(ParseError::syntax(
                pos,
                format!("predicate `{name}` used as a term"),
            ));
        }
        if self.syms.constants.contains(&name) && !self.bound.contains(&name) {
            Ok(Term::Const(name))
        } else {
            Ok(Term::Var(name))
        }
    }

    // ---- blocks ----

    fn signature_items(&mut self, sig: &mut Signature, until: &Tok) -> Result<(), ParseError> {
        while self.peek() != until {
            let pos = self.pos();
            if self.is_keyword("pred") {
                self.advance();
                let (name, _) = self.name()?;
                self.expect(Tok::Slash)?;
                let arity = self.int()?;
                if sig.declares(&name) {
                    return Err(dup(pos, name));
                }
                sig.predicates.push((name, arity));
            } else if self.is_keyword("const") {
                self.advance();
                let (name, _) = self.name()?;
                if sig.declares(&name) {
                    return Err(dup(pos, name));
                }
                sig.constants.push(name);
            } else if self.is_keyword("equality") {
                self.advance();
                sig.equality = true;
            } else {
                return Err(self.unexpected("`pred`, `const` or `equality`"));
            }
            self.expect(Tok::Semi)?;
        }
        Ok(())
    }

    fn param_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut vars = Vec::new();
        if *self.peek() != Tok::RParen {
            vars.push(self.name()?.0);
            while *self.peek() == Tok::Comma {
                self.advance();
                vars.push(self.name()?.0);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(vars)
    }

    fn tupleset(&mut self) -> Result<Vec<(Vec<usize>, Pos)>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let pos = self.pos();
                let tuple = if *self.peek() == Tok::LParen {
                    self.advance();
                    let mut t = Vec::new();
                    if *self.peek() != Tok::RParen {
                        t.push(self.int()?);
                        while *self.peek() == Tok::Comma {
                            self.advance();
                            t.push(self.int()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    t
                } else {
                    vec![self.int()?]
                };
                items.push((tuple, pos));
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(items)
    }

    fn model_block(&mut self, sig: &Signature) -> Result<(String, FiniteModel), ParseError> {
        self.expect_keyword("model")?;
        let (name, _) = self.name()?;
        self.expect(Tok::LBrace)?;
        self.expect_keyword("universe")?;
        let size_pos = self.pos();
        let size = self.int()?;
        self.expect(Tok::Semi)?;
        if size == 0 {
            return Err(ParseError::syntax(size_pos, "universe size must be at least 1"));
        }
        for (p, a) in &sig.predicates {
            match size.checked_pow(*a as u32) {
                Some(cells) if cells <= MAX_TABLE => {}
                _ => {
                    return Err(ParseError::syntax(
                        size_pos,
                        format!("table for `{p}` over {size} elements is too large"),
                    ))
                }
            }
        }
        let mut model = FiniteModel::blank(sig, size)
            .map_err(|e| ParseError::syntax(size_pos, e.to_string()))?;
        let mut seen = BTreeSet::new();
        let mut consts_given = BTreeSet::new();
        while *self.peek() != Tok::RBrace {
            let (sym, pos) = self.name()?;
            self.expect(Tok::Equals)?;
            let items = self.tupleset()?;
            self.expect(Tok::Semi)?;
            if !seen.insert(sym.clone()) {
                return Err(dup(pos, sym));
            }
            if sig.has_constant(&sym) {
                match items.as_slice() {
                    [(t, p)] if t.len() == 1 => {
                        model
                            .set_constant(&sym, t[0])
                            .map_err(|e| ParseError::syntax(*p, e.to_string()))?;
                        consts_given.insert(sym);
                    }
                    _ => {
                        return Err(ParseError::syntax(
                            pos,
                            format!("constant `{sym}` needs exactly one element, e.g. `{{0}}`"),
                        ))
                    }
                }
            } else if let Some(arity) = sig.arity(&sym) {
                let mut rel = Relation::empty(arity, size);
                for (t, p) in items {
                    if t.len() != arity {
                        return Err(ParseError::Arity {
                            line: p.line,
                            col: p.col,
                            name: sym.clone(),
                            expected: arity,
                            found: t.len(),
                        });
                    }
                    if let Some(&e) = t.iter().find(|&&e| e >= size) {
                        return Err(ParseError::syntax(
                            p,
                            format!("element {e} outside universe of size {size}"),
                        ));
                    }
                    rel.insert(&t);
                }
                model
                    .set_relation(&sym, rel)
                    .map_err(|e| ParseError::syntax(pos, e.to_string()))?;
            } else {
                return Err(ParseError::UnknownSymbol {
                    line: pos.line,
                    col: pos.col,
                    name: sym,
                });
            }
        }
        let close = self.expect(Tok::RBrace)?;
        if let Some(c) = sig.constants.iter().find(|c| !consts_given.contains(*c)) {
            return Err(ParseError::syntax(
                close,
                format!("model `{name}` does not interpret constant `{c}`"),
            ));
        }
        Ok((name, model))
    }

    fn family_items(&mut self, until: &Tok) -> Result<NamedSets, ParseError> {
        let mut sets: NamedSets = Vec::new();
        while self.peek() != until {
            let (name, pos) = self.name()?;
            self.expect(Tok::Equals)?;
            let items = self.tupleset()?;
            let mut set = BTreeSet::new();
            for (t, p) in items {
                match t.as_slice() {
                    [e] => {
                        set.insert(*e);
                    }
                    _ => return Err(ParseError::syntax(p, "family sets hold single elements")),
                }
            }
            if sets.iter().any(|(n, _)| *n == name) {
                return Err(dup(pos, name));
            }
            sets.push((name, set));
            if *self.peek() == Tok::Semi {
                self.advance();
            } else if self.peek() != until {
                return Err(self.unexpected("`;`"));
            }
        }
        Ok(sets)
    }

    /// Skips to just past the next `;` at the current nesting level.
    fn skip_statement(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Tok::Semi => {
                    self.advance();
                    return Ok(());
                }
                Tok::Eof => return Err(self.unexpected("`;`")),
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn skip_braced(&mut self) -> Result<(), ParseError> {
        while *self.peek() != Tok::LBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`{`"));
            }
            self.advance();
        }
        let mut depth = 0usize;
        loop {
            match self.advance().tok {
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Tok::Eof => return Err(self.unexpected("`}`")),
                _ => {}
            }
        }
    }
}

fn dup(pos: Pos, name: String) -> ParseError {
    ParseError::Duplicate {
        line: pos.line,
        col: pos.col,
        name,
    }
}

/// Heads collected by the first pass over a document.
struct Heads {
    sig: Signature,
    defs: Vec<(String, Option<usize>, Pos)>,
}

fn collect_heads(src: &str) -> Result<Heads, ParseError> {
    let mut p = Parser::new(src, Symbols::default())?;
    let mut sig = Signature::new();
    let mut defs: Vec<(String, Option<usize>, Pos)> = Vec::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        if p.is_keyword("sig") {
            p.advance();
            p.expect(Tok::LBrace)?;
            p.signature_items(&mut sig, &Tok::RBrace)?;
            p.expect(Tok::RBrace)?;
        } else if p.is_keyword("def") {
            p.advance();
            let (name, npos) = p.name()?;
            let params = p.param_list()?;
            defs.push((name, Some(params.len()), npos));
            p.skip_statement()?;
        } else if p.is_keyword("defconst") {
            p.advance();
            let (name, npos) = p.name()?;
            defs.push((name, None, npos));
            p.skip_statement()?;
        } else if p.is_keyword("model") || p.is_keyword("family") {
            p.skip_braced()?;
        } else if p.is_keyword("assert") {
            p.skip_statement()?;
        } else {
            return Err(ParseError::syntax(
                pos,
                format!(
                    "expected `sig`, `def`, `defconst`, `model`, `family` or `assert`, found {}",
                    p.peek().describe()
                ),
            ));
        }
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for (name, _, pos) in &defs {
        if sig.declares(name) || !seen.insert(name) {
            return Err(dup(*pos, name.clone()));
        }
    }
    Ok(Heads { sig, defs })
}

/// Parses a whole source file.
pub fn parse_document(src: &str) -> Result<Document, ParseError> {
    let heads = collect_heads(src)?;
    let mut syms = Symbols::from_signature(&heads.sig);
    for (name, arity, _) in &heads.defs {
        match arity {
            Some(a) => {
                syms.predicates.insert(name.clone(), *a);
            }
            None => {
                syms.constants.insert(name.clone());
            }
        }
    }
    let sig = heads.sig;
    let mut p = Parser::new(src, syms)?;
    let mut doc = Document {
        signature: sig.clone(),
        system: DefinitionSystem::new(sig.clone()),
        ..Document::default()
    };
    while *p.peek() != Tok::Eof {
        if p.is_keyword("sig") {
            p.skip_braced()?;
        } else if p.is_keyword("def") {
            p.advance();
            let (name, _) = p.name()?;
            let params = p.param_list()?;
            p.expect(Tok::Define)?;
            p.bound = params.clone();
            let body = p.formula();
            p.bound.clear();
            let body = body?.alpha_normalize();
            p.expect(Tok::Semi)?;
            doc.system
                .definitions
                .push(Definition::Predicate(PredicateDef { name, params, body }));
        } else if p.is_keyword("defconst") {
            p.advance();
            let (name, _) = p.name()?;
            let body = if *p.peek() == Tok::LParen {
                p.advance();
                let (var, _) = p.name()?;
                p.expect(Tok::RParen)?;
                p.expect(Tok::Define)?;
                p.bound = vec![var.clone()];
                let body = p.formula();
                p.bound.clear();
                ConstBody::Description { var, body: body?.alpha_normalize() }
            } else {
                p.expect(Tok::Define)?;
                ConstBody::Alias(p.term()?)
            };
            p.expect(Tok::Semi)?;
            doc.system
                .definitions
                .push(Definition::Constant(ConstantDef { name, body }));
        } else if p.is_keyword("model") {
            let (name, model) = p.model_block(&sig)?;
            if doc.models.iter().any(|(n, _)| *n == name) {
                return Err(dup(p.pos(), name));
            }
            doc.models.push((name, model));
        } else if p.is_keyword("family") {
            p.advance();
            let (name, pos) = p.name()?;
            p.expect(Tok::LBrace)?;
            let sets = p.family_items(&Tok::RBrace)?;
            p.expect(Tok::RBrace)?;
            if doc.families.iter().any(|(n, _)| *n == name) {
                return Err(dup(pos, name));
            }
            doc.families.push((name, sets));
        } else if p.is_keyword("assert") {
            p.advance();
            let f = p.formula()?.alpha_normalize();
            p.expect(Tok::Semi)?;
            doc.assertions.push(f);
        } else {
            return Err(p.unexpected("a block"));
        }
    }
    Ok(doc)
}

/// Parses a single formula against the given symbols. Trailing input is an
/// error.
pub fn parse_formula(src: &str, syms: &Symbols) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src, syms.clone())?;
    let f = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok(f.alpha_normalize())
}

/// Guesses the symbols of a formula from its shape: `P(a, b)` declares a
/// binary predicate, a bare name in formula position a 0-ary one, and any
/// `=` enables equality. Constants cannot be told from variables and are
/// never inferred.
pub fn infer_symbols(src: &str) -> Result<Symbols, ParseError> {
    let toks = tokenize(src)?;
    let mut syms = Symbols::default();
    // for each open paren: Some(comma count) if it is an argument list
    let mut parens: Vec<Option<usize>> = Vec::new();
    let mut calls: Vec<(String, usize)> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        let next = toks.get(i + 1).map(|t| &t.tok);
        let prev = i.checked_sub(1).map(|j| &toks[j].tok);
        match &t.tok {
            Tok::Name(n) if KEYWORDS.contains(&n.as_str()) => {}
            Tok::Name(n) if next == Some(&Tok::LParen) => {
                calls.push((n.clone(), parens.len()));
            }
            Tok::Name(n) => {
                let formula_position = matches!(
                    prev,
                    None | Some(
                        Tok::Dot | Tok::Bang | Tok::Amp | Tok::Bar | Tok::Arrow | Tok::DoubleArrow
                    )
                ) || (prev == Some(&Tok::LParen) && parens.last() == Some(&None));
                let in_args = parens.last().is_some_and(Option::is_some);
                if formula_position && !in_args && next != Some(&Tok::Equals) {
                    syms.predicates.entry(n.clone()).or_insert(0);
                }
            }
            Tok::LParen => {
                let is_call = matches!(prev, Some(Tok::Name(n)) if !KEYWORDS.contains(&n.as_str()));
                parens.push(is_call.then_some(0));
            }
            Tok::Comma => {
                if let Some(Some(c)) = parens.last_mut() {
                    *c += 1;
                }
            }
            Tok::RParen => {
                if let Some(Some(commas)) = parens.pop() {
                    if let Some((name, _)) = calls.pop() {
                        let empty = prev == Some(&Tok::LParen);
                        let arity = if empty { 0 } else { commas + 1 };
                        syms.predicates.entry(name).or_insert(arity);
                    }
                }
            }
            Tok::Equals => syms.equality = true,
            _ => {}
        }
    }
    Ok(syms)
}

/// Parses the inside of a `sig { ... }` block, e.g. `pred M1/1; const c;`.
/// The final `;` may be omitted.
pub fn parse_signature_body(src: &str) -> Result<Signature, ParseError> {
    let trimmed = src.trim_end();
    let owned;
    let src = if trimmed.is_empty() || trimmed.ends_with(';') {
        src
    } else {
        owned = format!("{trimmed};");
        &owned
    };
    let mut p = Parser::new(src, Symbols::default())?;
    let mut sig = Signature::new();
    p.signature_items(&mut sig, &Tok::Eof)?;
    Ok(sig)
}

/// Parses an inline family such as `A={0,1};B={0}`.
pub fn parse_family_spec(src: &str) -> Result<NamedSets, ParseError> {
    let mut p = Parser::new(src, Symbols::default())?;
    let sets = p.family_items(&Tok::Eof)?;
    p.expect(Tok::Eof)?;
    Ok(sets)
}
