use std::fmt::Write;

use super::ast::*;

/// Prints a document back as PDDLS text, or as plain PDDL when
/// `strip_semantics` is set (no `:context` block, no `:semantics`
/// requirement). The output reparses to an AST equal to the input, modulo
/// the stripped parts.
///
/// Assumes parser-shaped typed lists: untyped entries only after the last
/// typed one, since `a b - t` syntax types the whole preceding group.
pub fn print_pddl(doc: &PddlsDocument, strip_semantics: bool) -> String {
    let mut out = String::new();
    let kind = if doc.is_domain() { "domain" } else { "problem" };
    let _ = writeln!(out, "(define ({kind} {})", doc.name);

    if doc.kind == DocumentKind::Problem {
        if let Some(d) = &doc.domain_ref {
            let _ = writeln!(out, "  (:domain {d})");
        }
    }

    let reqs: Vec<&String> = doc
        .requirements
        .iter()
        .filter(|r| !(strip_semantics && r.eq_ignore_ascii_case(":semantics")))
        .collect();
    if !reqs.is_empty() {
        let _ = write!(out, "  (:requirements");
        for r in reqs {
            let _ = write!(out, " {r}");
        }
        let _ = writeln!(out, ")");
    }

    if !strip_semantics {
        if let Some(iri) = &doc.context_ref {
            let _ = writeln!(out, "  (:context {iri})");
        } else if !doc.context.is_empty() {
            let _ = writeln!(out, "  (:context");
            for (term, iri) in doc.context.entries() {
                let _ = writeln!(out, "    {term} - {iri}");
            }
            trim_newline(&mut out);
            let _ = writeln!(out, ")");
        }
    }

    if doc.is_domain() {
        typed_section(&mut out, ":types", &doc.types);
        typed_section(&mut out, ":constants", &doc.constants);
        if !doc.predicates.is_empty() {
            let _ = writeln!(out, "  (:predicates");
            for p in &doc.predicates {
                let _ = writeln!(out, "    ({}{})", p.name, typed_inline(&p.params));
            }
            trim_newline(&mut out);
            let _ = writeln!(out, ")");
        }
        for extra in &doc.extras {
            let _ = writeln!(out, "  {extra}");
        }
        for a in &doc.actions {
            let _ = writeln!(out, "  (:action {}", a.name);
            let _ = writeln!(out, "    :parameters ({})", typed_inline(&a.parameters).trim_start());
            let _ = writeln!(out, "    :precondition {}", fmt_formula(&a.precondition, 4));
            let _ = writeln!(out, "    :effect {})", fmt_formula(&a.effect, 4));
        }
    } else {
        typed_section(&mut out, ":objects", &doc.objects);
        if !doc.init.is_empty() {
            let _ = writeln!(out, "  (:init");
            for lit in &doc.init {
                let atom = fmt_atom(&lit.name, &lit.args);
                if lit.negated {
                    let _ = writeln!(out, "    (not {atom})");
                } else {
                    let _ = writeln!(out, "    {atom}");
                }
            }
            trim_newline(&mut out);
            let _ = writeln!(out, ")");
        }
        if let Some(goal) = &doc.goal {
            let _ = writeln!(out, "  (:goal {})", fmt_formula(goal, 2));
        }
    }

    trim_newline(&mut out);
    out.push_str(")\n");
    out
}

fn trim_newline(out: &mut String) {
    while out.ends_with('\n') {
        out.pop();
    }
}

fn typed_section(out: &mut String, key: &str, items: &[TypedSymbol]) {
    if items.is_empty() {
        return;
    }
    let _ = writeln!(out, "  ({key}{})", typed_inline(items));
}

fn typed_inline(items: &[TypedSymbol]) -> String {
    let mut s = String::new();
    for item in items {
        let _ = write!(s, " {}", item.name);
        if let Some(ty) = &item.ty {
            let _ = write!(s, " - {ty}");
        }
    }
    s
}

fn fmt_atom(name: &Symbol, args: &[Symbol]) -> String {
    let mut s = format!("({name}");
    for a in args {
        let _ = write!(s, " {a}");
    }
    s.push(')');
    s
}

fn fmt_formula(f: &Formula, indent: usize) -> String {
    match f {
        Formula::Atom { name, args } => fmt_atom(name, args),
        Formula::Not(inner) => format!("(not {})", fmt_formula(inner, indent)),
        Formula::And(parts) if parts.is_empty() => "(and)".to_string(),
        Formula::And(parts) => {
            let pad = " ".repeat(indent + 2);
            let mut s = String::from("(and");
            for p in parts {
                let _ = write!(s, "\n{pad}{}", fmt_formula(p, indent + 2));
            }
            s.push(')');
            s
        }
    }
}
