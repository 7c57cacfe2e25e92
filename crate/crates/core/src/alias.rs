//! Alias canonicalization across independently authored documents.
//!
//! One problem and N domains each bind local symbols to IRIs. Two symbols
//! denote the same thing exactly when they bind the same IRI, so per-domain
//! symbol-to-symbol translation maps are built that unify aliases onto one
//! canonical name and freshen names that collide on different IRIs. Problem
//! symbols are never renamed; domains are processed in the given order and
//! the output is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::context::ContextMap;
use crate::syntax::{PddlsDocument, Symbol, TypedSymbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("context of `{document}` binds term `{term}` more than once")]
    DuplicateTerm { document: String, term: String },
}

/// The global symbol/IRI tables accumulated while building translations.
#[derive(Clone, Debug, Default)]
pub struct TranslationState {
    sym_to_uri: BTreeMap<Symbol, String>,
    uri_to_sym: BTreeMap<String, Symbol>,
}

impl TranslationState {
    /// The canonical symbol for an IRI, if any document bound one.
    pub fn symbol_for(&self, iri: &str) -> Option<&Symbol> {
        self.uri_to_sym.get(iri)
    }

    pub fn iri_for(&self, sym: &Symbol) -> Option<&str> {
        self.sym_to_uri.get(sym).map(|s| s.as_str())
    }

    fn contains_symbol(&self, sym: &Symbol) -> bool {
        self.sym_to_uri.contains_key(sym)
    }
}

/// One domain's symbol renaming, total on the domain's context terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainTranslation {
    pub domain_id: Symbol,
    entries: Vec<(Symbol, Symbol)>,
}

impl DomainTranslation {
    pub fn entries(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> {
        self.entries.iter().map(|(a, b)| (a, b))
    }

    pub fn translate(&self, sym: &Symbol) -> Option<&Symbol> {
        self.entries.iter().find(|(from, _)| from == sym).map(|(_, to)| to)
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|(a, b)| a == b)
    }
}

#[derive(Debug)]
pub struct Canonicalization {
    pub translations: Vec<DomainTranslation>,
    pub state: TranslationState,
}

/// Builds per-domain translation maps from the problem context and the
/// domain contexts, in order. For each domain term `t` bound to IRI `u`:
/// if the global table already has `t -> u`, keep `t`; else if `u` already
/// has a canonical symbol, unify onto it; else if `t` is globally unused,
/// adopt it; else mint a fresh `t_k` and register it for `u`.
pub fn build_translation_maps(
    problem_ctx: &ContextMap,
    domain_ctxs: &[(Symbol, ContextMap)],
) -> Result<Canonicalization, ContextError> {
    check_unique_terms("problem", problem_ctx)?;
    for (id, ctx) in domain_ctxs {
        check_unique_terms(id.as_str(), ctx)?;
    }

    // Fresh names must avoid every term that occurs in any input context.
    let mut input_terms: BTreeSet<Symbol> = BTreeSet::new();
    for (t, _) in problem_ctx.entries() {
        input_terms.insert(t.clone());
    }
    for (_, ctx) in domain_ctxs {
        for (t, _) in ctx.entries() {
            input_terms.insert(t.clone());
        }
    }

    let mut state = TranslationState::default();
    for (t, u) in problem_ctx.entries() {
        state.sym_to_uri.insert(t.clone(), u.to_string());
        if !state.uri_to_sym.contains_key(u) {
            state.uri_to_sym.insert(u.to_string(), t.clone());
        }
    }

    let mut translations = Vec::new();
    for (domain_id, ctx) in domain_ctxs {
        let mut entries: Vec<(Symbol, Symbol)> = Vec::new();
        for (t, u) in ctx.entries() {
            if state.sym_to_uri.get(t).map(|s| s.as_str()) == Some(u) {
                entries.push((t.clone(), t.clone()));
            } else if let Some(canonical) = state.uri_to_sym.get(u) {
                entries.push((t.clone(), canonical.clone()));
            } else if !state.contains_symbol(t) {
                state.sym_to_uri.insert(t.clone(), u.to_string());
                state.uri_to_sym.insert(u.to_string(), t.clone());
                entries.push((t.clone(), t.clone()));
            } else {
                let fresh = mint_fresh(t, &state, &input_terms);
                state.sym_to_uri.insert(fresh.clone(), u.to_string());
                state.uri_to_sym.insert(u.to_string(), fresh.clone());
                entries.push((t.clone(), fresh));
            }
        }
        translations.push(DomainTranslation { domain_id: domain_id.clone(), entries });
    }

    Ok(Canonicalization { translations, state })
}

fn check_unique_terms(document: &str, ctx: &ContextMap) -> Result<(), ContextError> {
    if let Some(term) = ctx.duplicate_terms().first() {
        return Err(ContextError::DuplicateTerm {
            document: document.to_string(),
            term: term.to_string(),
        });
    }
    Ok(())
}

/// `<term>_<k>` for the smallest k >= 2 that is unused globally and absent
/// from every input context.
fn mint_fresh(base: &Symbol, state: &TranslationState, input_terms: &BTreeSet<Symbol>) -> Symbol {
    for k in 2u64.. {
        let candidate = Symbol::new(format!("{base}_{k}"));
        if !state.contains_symbol(&candidate) && !input_terms.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!("unbounded counter")
}

/// Rewrites every occurrence of a mapped symbol in a domain document:
/// predicate declarations and uses, action names, constants, types and the
/// context terms themselves. Variables are never rewritten, nor is the
/// document name.
pub fn apply_translation(doc: &PddlsDocument, tr: &DomainTranslation) -> PddlsDocument {
    let rename = |s: &Symbol| -> Symbol {
        if s.is_variable() {
            return s.clone();
        }
        tr.translate(s).cloned().unwrap_or_else(|| s.clone())
    };
    let rename_typed = |items: &[TypedSymbol]| -> Vec<TypedSymbol> {
        items
            .iter()
            .map(|i| TypedSymbol {
                name: rename(&i.name),
                ty: i.ty.as_ref().map(&rename),
            })
            .collect()
    };

    let mut out = doc.clone();
    out.types = rename_typed(&doc.types);
    out.constants = rename_typed(&doc.constants);
    out.objects = rename_typed(&doc.objects);
    out.predicates = doc
        .predicates
        .iter()
        .map(|p| crate::syntax::PredicateDecl {
            name: rename(&p.name),
            params: rename_typed(&p.params),
        })
        .collect();
    out.actions = doc
        .actions
        .iter()
        .map(|a| crate::syntax::ActionDef {
            name: rename(&a.name),
            parameters: rename_typed(&a.parameters),
            precondition: rename_formula(&a.precondition, &rename),
            effect: rename_formula(&a.effect, &rename),
        })
        .collect();
    out.init = doc
        .init
        .iter()
        .map(|l| crate::syntax::Literal {
            negated: l.negated,
            name: rename(&l.name),
            args: l.args.iter().map(&rename).collect(),
        })
        .collect();
    out.goal = doc.goal.as_ref().map(|g| rename_formula(g, &rename));

    let mut ctx = ContextMap::default();
    let mut seen: BTreeSet<(Symbol, String)> = BTreeSet::new();
    for (t, iri) in doc.context.entries() {
        let t2 = rename(t);
        if seen.insert((t2.clone(), iri.to_string())) {
            ctx.push(t2, iri.to_string());
        }
    }
    out.context = ctx;
    out
}

fn rename_formula(
    f: &crate::syntax::Formula,
    rename: &impl Fn(&Symbol) -> Symbol,
) -> crate::syntax::Formula {
    use crate::syntax::Formula::*;
    match f {
        Atom { name, args } => Atom {
            name: rename(name),
            args: args.iter().map(rename).collect(),
        },
        Not(inner) => Not(Box::new(rename_formula(inner, rename))),
        And(parts) => And(parts.iter().map(|p| rename_formula(p, rename)).collect()),
    }
}

/// The `canonicalize` subcommand's text rendering: a `domain <id>` header
/// followed by one `t -> t'` line per context term.
pub fn render_translations(translations: &[DomainTranslation]) -> String {
    let mut out = String::new();
    for tr in translations {
        out.push_str(&format!("domain {}\n", tr.domain_id));
        for (from, to) in tr.entries() {
            out.push_str(&format!("{from} -> {to}\n"));
        }
    }
    out
}
