use crate::args::{Cli, Command, Demo, SigArg};
use crate::{Output, EXIT_FOUND, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use porphyry_core::defsys::{check_descriptions, validate_with, DefsysError};
use porphyry_core::extensional::{
    check_laminar, extensions, reconstruct, ExtensionFamily, ExtensionalError, Laminarity,
    ReconstructionResult,
};
use porphyry_core::magma::demo_magma;
use porphyry_core::monadic::{self, monadic_normal_form, MonadicError, SatResult};
use porphyry_core::parser::{infer_symbols, parse_family_spec, parse_signature_body};
use porphyry_core::predicabilia::{
    classify_formula, generators, porphyry_tree, proximate_genus, Engine, Evidence, Outcome,
    PorphyryTree, PredicabiliaError, VerdictKind,
};
use porphyry_core::render::{render, render_defsys, render_model, render_signature};
use porphyry_core::semantics::{
    bounded_entails, default_bound, EntailmentVerdict, EnumOptions, SemanticsError,
    DEFAULT_CEILING,
};
use porphyry_core::{parse_document, parse_formula, Document, FiniteModel, Formula, Signature, Symbols};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

struct Report {
    code: i32,
    text: String,
    json: Value,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type Res<T> = Result<T, Failure>;

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        let code = match e {
            SemanticsError::ResourceLimit { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: with_hint(code, e.to_string()),
        }
    }
}

impl From<MonadicError> for Failure {
    fn from(e: MonadicError) -> Self {
        match e {
            MonadicError::Semantics(s) => s.into(),
            MonadicError::ResourceLimit { .. } => Failure {
                code: EXIT_INCONCLUSIVE,
                message: with_hint(EXIT_INCONCLUSIVE, e.to_string()),
            },
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<DefsysError> for Failure {
    fn from(e: DefsysError) -> Self {
        match e {
            DefsysError::Semantics(s) => s.into(),
            DefsysError::Invalid(_) | DefsysError::NotUnique { .. } => Failure {
                code: EXIT_FOUND,
                message: e.to_string(),
            },
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<PredicabiliaError> for Failure {
    fn from(e: PredicabiliaError) -> Self {
        match e {
            PredicabiliaError::Defsys(d) => d.into(),
            PredicabiliaError::Monadic(m) => m.into(),
            PredicabiliaError::Semantics(s) => s.into(),
            PredicabiliaError::NoContainingCandidate(_) => Failure {
                code: EXIT_FOUND,
                message: e.to_string(),
            },
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ExtensionalError> for Failure {
    fn from(e: ExtensionalError) -> Self {
        match e {
            ExtensionalError::Defsys(d) => d.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

fn with_hint(code: i32, message: String) -> String {
    if code == EXIT_INCONCLUSIVE {
        format!("{message} (raise --ceiling or lower --bound)")
    } else {
        message
    }
}

struct Ctx {
    ceiling: u64,
    bound: Option<usize>,
}

impl Ctx {
    fn engine(&self) -> Engine {
        Engine {
            ceiling: self.ceiling,
            bound: self.bound,
            parallel: true,
        }
    }

    fn opts(&self) -> EnumOptions {
        EnumOptions::with_ceiling(self.ceiling)
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Output {
    let ctx = Ctx {
        ceiling: cli.ceiling.unwrap_or(DEFAULT_CEILING),
        bound: cli.bound.map(|b| b as usize),
    };
    let result = match &cli.command {
        Command::Check { file } => check(file, &ctx),
        Command::Tree { file, dot } => tree(file, *dot),
        Command::Classify {
            file,
            species,
            formula,
            var,
        } => classify(file, species, formula, var, &ctx),
        Command::Entail { lhs, rhs, sig } => entail(lhs, rhs, sig, &ctx),
        Command::Sat { formula, sig } => sat(formula, sig, &ctx),
        Command::Normalize { formula, sig, var } => normalize(formula, sig, var, &ctx),
        Command::Extensions { file, model } => show_extensions(file, model),
        Command::Reconstruct {
            file,
            model,
            family,
        } => rebuild(file, model, family),
        Command::Generators { file } => theory(file, &ctx),
        Command::Demo {
            which: Demo::Magma { max_size },
        } => magma(*max_size as usize),
        Command::Proximate {
            file,
            species,
            candidates,
        } => proximate(file, species, candidates, &ctx),
    };
    match result {
        Ok(r) => Output {
            code: r.code,
            stdout: if cli.json {
                format!("{:#}\n", r.json)
            } else {
                r.text
            },
            stderr: String::new(),
        },
        Err(f) => Output {
            code: f.code,
            stdout: if cli.json {
                format!("{:#}\n", json!({ "error": f.message, "exit_code": f.code }))
            } else {
                String::new()
            },
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn load(path: &Path) -> Res<Document> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_document(&src).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn model<'a>(doc: &'a Document, name: &str) -> Res<&'a FiniteModel> {
    doc.model(name)
        .ok_or_else(|| Failure::usage(format!("no model named `{name}`")))
}

fn formula_in(src: &str, syms: &Symbols, what: &str) -> Res<Formula> {
    parse_formula(src, syms).map_err(|e| Failure::usage(format!("{what}:{e}")))
}

/// Symbols from `--sig`, or inferred from the given formulas.
fn symbols(sig: &SigArg, formulas: &[&str]) -> Res<Symbols> {
    match &sig.sig {
        Some(s) => parse_signature_body(s)
            .map(|sig| Symbols::from_signature(&sig))
            .map_err(|e| Failure::usage(format!("--sig:{e}"))),
        None => {
            let mut out = Symbols::default();
            for f in formulas {
                let s = infer_symbols(f).map_err(|e| Failure::usage(format!("formula:{e}")))?;
                for (p, a) in s.predicates {
                    out.predicates.entry(p).or_insert(a);
                }
                out.equality |= s.equality;
            }
            Ok(out)
        }
    }
}

fn signature_of(syms: &Symbols) -> Signature {
    Signature {
        constants: syms.constants.iter().cloned().collect(),
        predicates: syms.predicates.iter().map(|(p, a)| (p.clone(), *a)).collect(),
        equality: syms.equality,
    }
}

fn engine_label(exact: bool, bound: Option<usize>) -> String {
    match (exact, bound) {
        (true, _) => "exact-monadic".to_string(),
        (false, Some(b)) => format!("bounded (universe size <= {b})"),
        (false, None) => "bounded".to_string(),
    }
}

fn assignment_text(a: &BTreeMap<String, usize>) -> String {
    a.iter()
        .map(|(v, e)| format!("{v} = {e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn evidence_json(e: &Evidence) -> Value {
    let mut v = json!({
        "premise": render(&e.premise),
        "conclusion": render(&e.conclusion),
    });
    match &e.outcome {
        Outcome::Holds => v["result"] = json!("holds"),
        Outcome::HoldsUpTo(b) => {
            v["result"] = json!("holds-up-to");
            v["bound"] = json!(b);
        }
        Outcome::Countermodel(c) => {
            v["result"] = json!("countermodel");
            v["countermodel"] = json!(render_model("countermodel", &c.model));
            v["assignment"] = json!(c.assignment);
        }
    }
    v
}

fn evidence_text(out: &mut String, e: &Evidence) {
    let tag = match &e.outcome {
        Outcome::Holds => "holds".to_string(),
        Outcome::HoldsUpTo(b) => format!("holds up to size {b}"),
        Outcome::Countermodel(_) => "fails".to_string(),
    };
    let _ = writeln!(out, "  [{tag}] {}  |=  {}", render(&e.premise), render(&e.conclusion));
    if let Outcome::Countermodel(c) = &e.outcome {
        if !c.assignment.is_empty() {
            let _ = writeln!(out, "    at {}", assignment_text(&c.assignment));
        }
        for line in render_model("countermodel", &c.model).lines() {
            let _ = writeln!(out, "    {line}");
        }
    }
}

fn check(file: &Path, ctx: &Ctx) -> Res<Report> {
    let doc = load(file)?;
    let report = validate_with(&doc.system, &ctx.opts());
    let mut text = format!(
        "verdict: {}\n",
        if report.is_valid() { "valid" } else { "invalid" }
    );
    let name_of = |i: usize| doc.system.definitions.get(i).map_or("?", |d| d.name());
    for v in &report.violations {
        let kind = serde_json::to_value(v.kind).expect("serializable");
        let _ = writeln!(
            text,
            "violation: entry {} (`{}`): {} on `{}`",
            v.entry,
            name_of(v.entry),
            kind.as_str().unwrap_or_default(),
            v.symbol
        );
    }
    for w in &report.warnings {
        let _ = writeln!(text, "warning: entry {} (`{}`): {}", w.entry, name_of(w.entry), w.message);
    }
    let mut models = Vec::new();
    let mut model_failure = false;
    if report.is_valid() {
        for (name, m) in &doc.models {
            match check_descriptions(&doc.system, m) {
                Ok(()) => models.push(json!({ "name": name, "ok": true })),
                Err(e) => {
                    model_failure |= matches!(e, DefsysError::NotUnique { .. });
                    let _ = writeln!(text, "model {name}: {e}");
                    models.push(json!({ "name": name, "ok": false, "error": e.to_string() }));
                }
            }
        }
    }
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["models"] = json!(models);
    let code = if report.is_valid() && !model_failure {
        EXIT_OK
    } else {
        EXIT_FOUND
    };
    Ok(Report { code, text, json })
}

fn tree_text(t: &PorphyryTree) -> String {
    fn walk(t: &PorphyryTree, node: &str, depth: usize, out: &mut String) {
        let indent = "  ".repeat(depth);
        match t.genus_of(node) {
            Some(e) if depth > 0 => {
                let _ = writeln!(out, "{indent}{node}  [{}]", render(&e.difference));
            }
            _ => {
                let _ = writeln!(out, "{indent}{node}");
            }
        }
        for e in t.edges.iter().filter(|e| e.genus == node) {
            walk(t, &e.species, depth + 1, out);
        }
    }
    let mut out = String::new();
    for r in &t.roots {
        walk(t, r, 0, &mut out);
    }
    if !t.unguarded.is_empty() {
        let _ = writeln!(out, "unguarded: {}", t.unguarded.join(", "));
    }
    out
}

fn tree(file: &Path, dot: bool) -> Res<Report> {
    let doc = load(file)?;
    let t = porphyry_tree(&doc.system)?;
    let edges: Vec<Value> = t
        .edges
        .iter()
        .map(|e| json!({ "species": e.species, "genus": e.genus, "difference": render(&e.difference) }))
        .collect();
    let json = json!({
        "nodes": t.nodes,
        "roots": t.roots,
        "edges": edges,
        "unguarded": t.unguarded,
        "dot": t.to_dot(),
    });
    let text = if dot { t.to_dot() } else { tree_text(&t) };
    Ok(Report {
        code: EXIT_OK,
        text,
        json,
    })
}

fn classify(file: &Path, species: &str, formula: &str, var: &str, ctx: &Ctx) -> Res<Report> {
    let doc = load(file)?;
    let rho = formula_in(formula, &Symbols::of_system(&doc.system), "--formula")?;
    let v = classify_formula(&rho, var, species, &doc.system, &ctx.engine())?;
    let code = if v.kind != VerdictKind::Unrelated && !v.exact {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let engine = engine_label(v.exact, v.bound);
    let mut text = format!("verdict: {}\nengine: {engine}\nevidence:\n", v.kind.as_str());
    for e in &v.evidence {
        evidence_text(&mut text, e);
    }
    let json = json!({
        "species": species,
        "formula": render(&rho),
        "verdict": v.kind.as_str(),
        "exact": v.exact,
        "bound": v.bound,
        "engine": engine,
        "evidence": v.evidence.iter().map(evidence_json).collect::<Vec<_>>(),
    });
    Ok(Report { code, text, json })
}

fn entail(lhs: &str, rhs: &str, sig: &SigArg, ctx: &Ctx) -> Res<Report> {
    let syms = symbols(sig, &[lhs, rhs])?;
    let premise = formula_in(lhs, &syms, "--lhs")?;
    let conclusion = formula_in(rhs, &syms, "--rhs")?;
    let e = ctx.engine().entails(&premise, &conclusion)?;
    let (code, result) = match &e.outcome {
        Outcome::Holds => (EXIT_OK, "holds".to_string()),
        Outcome::HoldsUpTo(b) => (
            EXIT_INCONCLUSIVE,
            format!("no countermodel up to size {b} (inconclusive)"),
        ),
        Outcome::Countermodel(_) => (EXIT_FOUND, "countermodel".to_string()),
    };
    let bound = match e.outcome {
        Outcome::HoldsUpTo(b) => Some(b),
        _ => None,
    };
    let engine = if monadic::is_monadic(&premise) && monadic::is_monadic(&conclusion) {
        engine_label(true, None)
    } else {
        let b = ctx
            .bound
            .unwrap_or_else(|| default_bound(&signature_of(&syms).restrict_to([&premise, &conclusion])));
        engine_label(false, Some(b))
    };
    let mut text = format!("result: {result}\nengine: {engine}\n");
    if let Some(c) = e.countermodel() {
        if !c.assignment.is_empty() {
            let _ = writeln!(text, "assignment: {}", assignment_text(&c.assignment));
        }
        text.push_str(&render_model("countermodel", &c.model));
    }
    let mut json = evidence_json(&e);
    json["engine"] = json!(engine);
    json["bound"] = json!(bound);
    Ok(Report { code, text, json })
}

fn sat(formula: &str, sig: &SigArg, ctx: &Ctx) -> Res<Report> {
    let syms = symbols(sig, &[formula])?;
    let f = formula_in(formula, &syms, "--formula")?;
    let (code, engine, found, note) = if monadic::is_monadic(&f) {
        match monadic::decide_sat(&f, ctx.ceiling)? {
            SatResult::Sat(m) => (EXIT_OK, engine_label(true, None), Some((m, BTreeMap::new())), "sat"),
            SatResult::Unsat => (EXIT_FOUND, engine_label(true, None), None, "unsat"),
        }
    } else {
        let sig = signature_of(&syms).restrict_to([&f]);
        let bound = ctx.bound.unwrap_or_else(|| default_bound(&sig));
        let label = engine_label(false, Some(bound));
        match bounded_entails(std::slice::from_ref(&f), &Formula::False, &sig, bound, &ctx.opts())? {
            EntailmentVerdict::Countermodel(c) => (EXIT_OK, label, Some((c.model, c.assignment)), "sat"),
            EntailmentVerdict::HoldsUpTo(_) => (EXIT_INCONCLUSIVE, label, None, "no model up to the bound (inconclusive)"),
        }
    };
    let mut text = format!("result: {note}\nengine: {engine}\n");
    let mut json = json!({ "result": note, "engine": engine });
    if let Some((m, a)) = found {
        if !a.is_empty() {
            let _ = writeln!(text, "assignment: {}", assignment_text(&a));
        }
        text.push_str(&render_model("witness", &m));
        json["model"] = json!(render_model("witness", &m));
        json["assignment"] = json!(a);
    }
    Ok(Report { code, text, json })
}

fn normalize(formula: &str, sig: &SigArg, var: &str, ctx: &Ctx) -> Res<Report> {
    let syms = symbols(sig, &[formula])?;
    let f = formula_in(formula, &syms, "--formula")?;
    let nf = monadic_normal_form(&f, var, &signature_of(&syms), ctx.ceiling)?;
    let whole = nf.to_formula();
    let pure = if nf.pure { "yes" } else { "no" };
    let text = format!("{}\npure: {pure}\n", render(&whole));
    let disjuncts: Vec<Value> = nf
        .disjuncts
        .iter()
        .map(|(c, r)| json!({ "cell": render(&c.to_formula(var)), "residue": render(r) }))
        .collect();
    let json = json!({
        "var": var,
        "formula": render(&whole),
        "pure": nf.pure,
        "disjuncts": disjuncts,
        "engine": engine_label(true, None),
    });
    Ok(Report {
        code: EXIT_OK,
        text,
        json,
    })
}

fn set_text(s: &std::collections::BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn show_extensions(file: &Path, name: &str) -> Res<Report> {
    let doc = load(file)?;
    let m = model(&doc, name)?;
    let g = extensions(&doc.system, m)?;
    let mut text = String::new();
    for (n, s) in &g.sets {
        let _ = writeln!(text, "{n} = {}", set_text(s));
    }
    let lam = check_laminar(&g);
    let (laminar, witness) = match &lam {
        Laminarity::Laminar => (true, Value::Null),
        Laminarity::NotLaminar(a, b) => (false, json!([a, b])),
    };
    match &lam {
        Laminarity::Laminar => text.push_str("laminar: yes\n"),
        Laminarity::NotLaminar(a, b) => {
            let _ = writeln!(text, "laminar: no ({a} and {b} overlap)");
        }
    }
    let sets: Vec<Value> = g
        .sets
        .iter()
        .map(|(n, s)| json!({ "name": n, "elements": s, "size": s.len() }))
        .collect();
    let json = json!({
        "model": name,
        "universe": g.universe,
        "sets": sets,
        "laminar": laminar,
        "witness": witness,
    });
    Ok(Report {
        code: EXIT_OK,
        text,
        json,
    })
}

fn rebuild(file: &Path, name: &str, spec: &str) -> Res<Report> {
    let doc = load(file)?;
    let m = model(&doc, name)?;
    let sets = match spec.strip_prefix('@') {
        Some(f) => doc
            .family(f)
            .cloned()
            .ok_or_else(|| Failure::usage(format!("no family named `{f}`")))?,
        None => parse_family_spec(spec).map_err(|e| Failure::usage(format!("--family:{e}")))?,
    };
    let g = ExtensionFamily::new(m.size(), sets)?;
    let report = match reconstruct(&g, m)? {
        ReconstructionResult::System { system, parents } => {
            let document = format!("{}\n{}", render_signature(&system.base), render_defsys(&system));
            let parents: Vec<Value> = parents
                .iter()
                .map(|(n, p)| json!({ "name": n, "parent": p }))
                .collect();
            Report {
                code: EXIT_OK,
                text: document.clone(),
                json: json!({ "result": "system", "document": document, "parents": parents }),
            }
        }
        ReconstructionResult::NotLaminar(a, b) => Report {
            code: EXIT_FOUND,
            text: format!("not laminar: `{a}` and `{b}` overlap without nesting\n"),
            json: json!({ "result": "not-laminar", "witness": [a, b] }),
        },
        ReconstructionResult::EqualSets(a, b) => Report {
            code: EXIT_FOUND,
            text: format!("`{a}` and `{b}` are the same set\n"),
            json: json!({ "result": "equal-sets", "witness": [a, b] }),
        },
        ReconstructionResult::Undefinable { name, reason } => Report {
            code: EXIT_FOUND,
            text: format!("undefinable: `{name}`: {reason}\n"),
            json: json!({ "result": "undefinable", "set": name, "reason": reason }),
        },
    };
    Ok(report)
}

fn theory(file: &Path, ctx: &Ctx) -> Res<Report> {
    let doc = load(file)?;
    if doc.assertions.is_empty() {
        return Err(Failure::usage(format!("{}: no `assert` sentences", file.display())));
    }
    let t = generators(&doc.assertions, &ctx.engine())?;
    let bounded_generator = t.evidence.iter().zip(&t.generator_flags).any(|(row, &flag)| {
        flag && row.iter().flatten().any(|e| !e.exact())
    });
    let code = if bounded_generator {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let engine = engine_label(t.exact, t.bound);
    let mut text = format!("engine: {engine}\n");
    let mut rows = Vec::new();
    for (s, flag) in t.sentences.iter().zip(&t.generator_flags) {
        let _ = writeln!(text, "{}  {}", if *flag { "generator" } else { "-        " }, render(s));
        rows.push(json!({ "sentence": render(s), "generator": flag }));
    }
    let json = json!({ "engine": engine, "exact": t.exact, "bound": t.bound, "sentences": rows });
    Ok(Report { code, text, json })
}

fn magma(max_size: usize) -> Res<Report> {
    let demo = demo_magma(max_size).map_err(|e| Failure::usage(e.to_string()))?;
    let classes = extensions(&demo.system, &demo.model)?;
    let mut counts = serde_json::Map::new();
    let mut header = format!("# {} operation tables on carriers of size 1..={max_size}\n", demo.model.size());
    for (p, r) in demo.model.relations() {
        counts.insert(p.to_string(), json!(r.len()));
        let _ = writeln!(header, "# {p}: {}", r.len());
    }
    for (c, s) in &classes.sets {
        counts.insert(c.clone(), json!(s.len()));
        let _ = writeln!(header, "# {c}: {}", s.len());
    }
    let document = demo.to_dsl();
    let json = json!({
        "universe": demo.model.size(),
        "counts": counts,
        "document": document,
    });
    Ok(Report {
        code: EXIT_OK,
        text: format!("{header}\n{document}"),
        json,
    })
}

fn proximate(file: &Path, species: &str, candidates: &[String], ctx: &Ctx) -> Res<Report> {
    let doc = load(file)?;
    let p = proximate_genus(species, candidates, &doc.system, &ctx.engine())?;
    let exact = p.scores.iter().all(|s| s.containment.exact());
    let code = if exact { EXIT_OK } else { EXIT_INCONCLUSIVE };
    let mut text = format!(
        "genus: {}\ndifference: {}\nengine: {}\n",
        p.genus,
        render(&p.difference),
        engine_label(exact, ctx.bound)
    );
    let mut rows = Vec::new();
    for s in &p.scores {
        let (diff, score) = match &s.difference {
            Some((f, n)) => (render(f), Some(*n)),
            None => ("-".to_string(), None),
        };
        let _ = writeln!(
            text,
            "  {:<12} contains: {:<3}  score: {:<4}  difference: {diff}",
            s.candidate,
            if s.containment.holds() { "yes" } else { "no" },
            score.map_or("-".to_string(), |n| n.to_string()),
        );
        rows.push(json!({
            "candidate": s.candidate,
            "contains": s.containment.holds(),
            "score": score,
            "difference": s.difference.as_ref().map(|(f, _)| render(f)),
            "containment": evidence_json(&s.containment),
        }));
    }
    let json = json!({
        "species": species,
        "genus": p.genus,
        "difference": render(&p.difference),
        "exact": exact,
        "scores": rows,
    });
    Ok(Report { code, text, json })
}
