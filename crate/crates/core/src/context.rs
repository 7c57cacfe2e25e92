//! Term-to-IRI bindings and the PDDLS/JSON-LD translation.
//!
//! The `@context` object of the JSON form always carries the reserved
//! binding `pddl -> uri:pddl`; user contexts may not rebind it. Keys are
//! emitted in a stable order (context first, then the document sections) so
//! the JSON output is byte-reproducible.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::syntax::{
    parse_document, ActionDef, DocumentKind, Formula, Literal, PddlsDocument, PredicateDecl,
    Sexpr, Symbol, SyntaxError, TypedSymbol,
};

pub const RESERVED_PREFIX: &str = "pddl";
pub const RESERVED_PREFIX_IRI: &str = "uri:pddl";

/// Ordered term-to-IRI bindings of one document's `:context` block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContextMap {
    entries: Vec<(Symbol, String)>,
}

impl ContextMap {
    pub fn from_pairs<T: Into<Symbol>, S: Into<String>>(pairs: Vec<(T, S)>) -> Self {
        ContextMap {
            entries: pairs.into_iter().map(|(t, i)| (t.into(), i.into())).collect(),
        }
    }

    pub fn push(&mut self, term: Symbol, iri: String) {
        self.entries.push((term, iri));
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Symbol, &str)> {
        self.entries.iter().map(|(t, i)| (t, i.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The bound IRI for `term`, or `None` for a local-only symbol.
    pub fn expand(&self, term: &Symbol) -> Option<&str> {
        self.entries.iter().find(|(t, _)| t == term).map(|(_, i)| i.as_str())
    }

    /// The first term bound to `iri` (IRI comparison is case-sensitive).
    pub fn term_for(&self, iri: &str) -> Option<&Symbol> {
        self.entries.iter().find(|(_, i)| i == iri).map(|(t, _)| t)
    }

    /// Terms appearing more than once (forbidden by the canonicalizer).
    pub fn duplicate_terms(&self) -> Vec<&Symbol> {
        let mut seen: Vec<&Symbol> = Vec::new();
        let mut dups = Vec::new();
        for (t, _) in &self.entries {
            if seen.contains(&t) {
                if !dups.contains(&t) {
                    dups.push(t);
                }
            } else {
                seen.push(t);
            }
        }
        dups
    }

    /// Pairs of distinct terms bound to the same IRI, which makes `expand`
    /// non-injective.
    pub fn duplicate_iri_bindings(&self) -> Vec<(&Symbol, &Symbol, &str)> {
        let mut by_iri: BTreeMap<&str, &Symbol> = BTreeMap::new();
        let mut out = Vec::new();
        for (t, iri) in &self.entries {
            match by_iri.get(iri.as_str()) {
                Some(first) if *first != t => out.push((*first, t, iri.as_str())),
                Some(_) => {}
                None => {
                    by_iri.insert(iri.as_str(), t);
                }
            }
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum ContextResolveError {
    #[error("context IRI `{0}` does not resolve to a file under the context directory")]
    NotFound(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Resolves a `(:context <URI>)` remote reference from a local directory.
/// The referenced file holds a single `(:context term - IRI ...)` form; it is
/// looked up as `<sanitized-iri>.ctx`, where every character outside
/// `[A-Za-z0-9._-]` becomes `_`. Nothing is ever fetched over the network.
pub fn resolve_remote_context(
    doc: &mut PddlsDocument,
    context_dir: &Path,
) -> Result<(), ContextResolveError> {
    let Some(iri) = doc.context_ref.clone() else {
        return Ok(());
    };
    let path = context_dir.join(format!("{}.ctx", sanitize_iri(&iri)));
    if !path.exists() {
        return Err(ContextResolveError::NotFound(iri));
    }
    let text = std::fs::read_to_string(&path)?;
    // Wrap so the shared parser handles the (:context ...) form.
    let wrapped = format!("(define (domain context-holder) {})", text.trim());
    let parsed = parse_document(&wrapped)?;
    doc.context = parsed.context;
    doc.context_ref = None;
    Ok(())
}

pub fn sanitize_iri(iri: &str) -> String {
    iri.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("JSON-LD document is missing the `@context` key")]
    MissingContext,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` has an unexpected shape: {1}")]
    BadValue(String, String),
    #[error("the reserved `pddl` binding must map to `uri:pddl`")]
    ReservedBinding,
}

/// Serializes a document to its JSON-LD form. The `:semantics` requirement
/// key is dropped: a nonempty `@context` already says the document carries
/// semantic bindings.
pub fn to_jsonld(doc: &PddlsDocument) -> Value {
    let mut context = Map::new();
    context.insert(RESERVED_PREFIX.into(), json!(RESERVED_PREFIX_IRI));
    for (term, iri) in doc.context.entries() {
        context.insert(term.as_str().into(), json!(iri));
    }

    let mut root = Map::new();
    root.insert("@context".into(), Value::Object(context));
    if let Some(iri) = &doc.context_ref {
        root.insert("@context-ref".into(), json!(iri));
    }

    match doc.kind {
        DocumentKind::Domain => {
            root.insert("pddl:domain".into(), json!(doc.name.as_str()));
        }
        DocumentKind::Problem => {
            root.insert("pddl:problem".into(), json!(doc.name.as_str()));
            if let Some(d) = &doc.domain_ref {
                root.insert("pddl:domain".into(), json!(d.as_str()));
            }
        }
    }

    let reqs: Vec<Value> = doc
        .requirements
        .iter()
        .filter(|r| !r.eq_ignore_ascii_case(":semantics"))
        .map(|r| json!(r))
        .collect();
    if !reqs.is_empty() {
        root.insert("pddl:requirements".into(), Value::Array(reqs));
    }

    if doc.is_domain() {
        if !doc.types.is_empty() {
            root.insert("pddl:types".into(), typed_list_json(&doc.types));
        }
        if !doc.constants.is_empty() {
            root.insert("pddl:constants".into(), typed_list_json(&doc.constants));
        }
        let preds: Vec<Value> = doc
            .predicates
            .iter()
            .map(|p| single_key(p.name.as_str(), typed_list_json(&p.params)))
            .collect();
        root.insert("pddl:predicates".into(), Value::Array(preds));
        if !doc.extras.is_empty() {
            let extras: Vec<Value> = doc.extras.iter().map(|e| json!(e.to_string())).collect();
            root.insert("pddl:extras".into(), Value::Array(extras));
        }
        if !doc.actions.is_empty() {
            let actions: Vec<Value> = doc.actions.iter().map(action_json).collect();
            root.insert("pddl:structure".into(), Value::Array(actions));
        }
    } else {
        if !doc.objects.is_empty() {
            root.insert("pddl:objects".into(), typed_list_json(&doc.objects));
        }
        if !doc.init.is_empty() {
            let init: Vec<Value> = doc.init.iter().map(literal_json).collect();
            root.insert("pddl:init".into(), Value::Array(init));
        }
        if let Some(goal) = &doc.goal {
            root.insert("pddl:goal".into(), formula_json(goal));
        }
    }

    Value::Object(root)
}

/// Renders the JSON-LD value in the document's canonical layout: UTF-8,
/// 2-space indent, insertion-ordered keys.
pub fn jsonld_to_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("valid JSON value");
    s.push('\n');
    s
}

fn single_key(key: &str, value: Value) -> Value {
    let mut m = Map::new();
    m.insert(key.into(), value);
    Value::Object(m)
}

fn typed_list_json(items: &[TypedSymbol]) -> Value {
    Value::Array(
        items
            .iter()
            .map(|i| {
                single_key(
                    i.name.as_str(),
                    i.ty.as_ref().map(|t| json!(t.as_str())).unwrap_or(Value::Null),
                )
            })
            .collect(),
    )
}

fn action_json(a: &ActionDef) -> Value {
    let mut m = Map::new();
    m.insert("pddl:action".into(), json!(a.name.as_str()));
    m.insert("pddl:parameters".into(), typed_list_json(&a.parameters));
    m.insert("pddl:precondition".into(), formula_json(&a.precondition));
    m.insert("pddl:effect".into(), formula_json(&a.effect));
    Value::Object(m)
}

fn formula_json(f: &Formula) -> Value {
    match f {
        Formula::Atom { name, args } => single_key(
            name.as_str(),
            Value::Array(args.iter().map(|a| json!(a.as_str())).collect()),
        ),
        Formula::Not(inner) => single_key("pddl:not", formula_json(inner)),
        Formula::And(parts) => single_key(
            "pddl:and",
            Value::Array(parts.iter().map(formula_json).collect()),
        ),
    }
}

fn literal_json(lit: &Literal) -> Value {
    let atom = single_key(
        lit.name.as_str(),
        Value::Array(lit.args.iter().map(|a| json!(a.as_str())).collect()),
    );
    if lit.negated {
        single_key("pddl:not", atom)
    } else {
        atom
    }
}

/// Reads a document back from its JSON-LD form. The `:semantics` requirement
/// is reinstated when the context carries user bindings.
pub fn from_jsonld(value: &Value) -> Result<PddlsDocument, SchemaError> {
    let root = value
        .as_object()
        .ok_or_else(|| SchemaError::BadValue("<root>".into(), "expected an object".into()))?;
    let context_val = root.get("@context").ok_or(SchemaError::MissingContext)?;
    let context_obj = context_val
        .as_object()
        .ok_or_else(|| SchemaError::BadValue("@context".into(), "expected an object".into()))?;

    let mut context = ContextMap::default();
    for (term, iri) in context_obj {
        let iri = iri
            .as_str()
            .ok_or_else(|| SchemaError::BadValue(term.clone(), "expected an IRI string".into()))?;
        if term == RESERVED_PREFIX {
            if iri != RESERVED_PREFIX_IRI {
                return Err(SchemaError::ReservedBinding);
            }
            continue;
        }
        context.push(Symbol::new(term.as_str()), iri.to_string());
    }

    let kind = if root.contains_key("pddl:problem") {
        DocumentKind::Problem
    } else {
        DocumentKind::Domain
    };
    let name_key = if kind == DocumentKind::Problem { "pddl:problem" } else { "pddl:domain" };
    let name = get_str(root, name_key)?
        .ok_or_else(|| SchemaError::BadValue(name_key.into(), "missing document name".into()))?;

    let mut doc = PddlsDocument::new(kind, name);
    doc.context = context;

    const KNOWN: [&str; 13] = [
        "@context",
        "@context-ref",
        "pddl:domain",
        "pddl:problem",
        "pddl:requirements",
        "pddl:types",
        "pddl:constants",
        "pddl:predicates",
        "pddl:extras",
        "pddl:structure",
        "pddl:objects",
        "pddl:init",
        "pddl:goal",
    ];
    for key in root.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(SchemaError::UnknownKey(key.clone()));
        }
    }

    if let Some(iri) = get_str(root, "@context-ref")? {
        doc.context_ref = Some(iri.to_string());
    }
    if kind == DocumentKind::Problem {
        doc.domain_ref = get_str(root, "pddl:domain")?.map(Symbol::new);
    }

    if let Some(reqs) = root.get("pddl:requirements") {
        let arr = as_array(reqs, "pddl:requirements")?;
        for r in arr {
            doc.requirements.push(
                r.as_str()
                    .ok_or_else(|| {
                        SchemaError::BadValue("pddl:requirements".into(), "expected strings".into())
                    })?
                    .to_string(),
            );
        }
    }
    if !doc.context.is_empty()
        && !doc.requirements.iter().any(|r| r.eq_ignore_ascii_case(":semantics"))
    {
        doc.requirements.push(":semantics".to_string());
    }

    if let Some(v) = root.get("pddl:types") {
        doc.types = typed_list_from(v, "pddl:types")?;
    }
    if let Some(v) = root.get("pddl:constants") {
        doc.constants = typed_list_from(v, "pddl:constants")?;
    }
    if let Some(v) = root.get("pddl:objects") {
        doc.objects = typed_list_from(v, "pddl:objects")?;
    }
    if let Some(v) = root.get("pddl:predicates") {
        for p in as_array(v, "pddl:predicates")? {
            let (name, params) = split_single_key(p, "pddl:predicates")?;
            doc.predicates.push(PredicateDecl {
                name: Symbol::new(name),
                params: typed_list_from(params, "pddl:predicates")?,
            });
        }
    }
    if let Some(v) = root.get("pddl:extras") {
        for e in as_array(v, "pddl:extras")? {
            let text = e.as_str().ok_or_else(|| {
                SchemaError::BadValue("pddl:extras".into(), "expected strings".into())
            })?;
            doc.extras.push(parse_opaque(text)?);
        }
    }
    if let Some(v) = root.get("pddl:structure") {
        for a in as_array(v, "pddl:structure")? {
            doc.actions.push(action_from(a)?);
        }
    }
    if let Some(v) = root.get("pddl:init") {
        for lit in as_array(v, "pddl:init")? {
            doc.init.push(literal_from(lit)?);
        }
    }
    if let Some(v) = root.get("pddl:goal") {
        doc.goal = Some(formula_from(v)?);
    }

    Ok(doc)
}

fn get_str<'a>(root: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>, SchemaError> {
    match root.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(Some)
            .ok_or_else(|| SchemaError::BadValue(key.into(), "expected a string".into())),
    }
}

fn as_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, SchemaError> {
    v.as_array()
        .ok_or_else(|| SchemaError::BadValue(key.into(), "expected an array".into()))
}

fn split_single_key<'a>(v: &'a Value, key: &str) -> Result<(&'a str, &'a Value), SchemaError> {
    let obj = v
        .as_object()
        .ok_or_else(|| SchemaError::BadValue(key.into(), "expected an object".into()))?;
    if obj.len() != 1 {
        return Err(SchemaError::BadValue(key.into(), "expected a single-key object".into()));
    }
    let (k, val) = obj.iter().next().unwrap();
    Ok((k.as_str(), val))
}

fn typed_list_from(v: &Value, key: &str) -> Result<Vec<TypedSymbol>, SchemaError> {
    let mut out = Vec::new();
    for item in as_array(v, key)? {
        let (name, ty) = split_single_key(item, key)?;
        let ty = match ty {
            Value::Null => None,
            Value::String(s) => Some(Symbol::new(s.as_str())),
            _ => return Err(SchemaError::BadValue(key.into(), "expected null or a type".into())),
        };
        out.push(TypedSymbol { name: Symbol::new(name), ty });
    }
    Ok(out)
}

fn action_from(v: &Value) -> Result<ActionDef, SchemaError> {
    let obj = v
        .as_object()
        .ok_or_else(|| SchemaError::BadValue("pddl:structure".into(), "expected objects".into()))?;
    for key in obj.keys() {
        if !["pddl:action", "pddl:parameters", "pddl:precondition", "pddl:effect"]
            .contains(&key.as_str())
        {
            return Err(SchemaError::UnknownKey(key.clone()));
        }
    }
    let name = obj
        .get("pddl:action")
        .and_then(|v| v.as_str())
        .ok_or_else(|| SchemaError::BadValue("pddl:action".into(), "missing name".into()))?;
    let parameters = match obj.get("pddl:parameters") {
        Some(v) => typed_list_from(v, "pddl:parameters")?,
        None => Vec::new(),
    };
    let precondition = match obj.get("pddl:precondition") {
        Some(v) => formula_from(v)?,
        None => Formula::And(Vec::new()),
    };
    let effect = obj
        .get("pddl:effect")
        .ok_or_else(|| SchemaError::BadValue("pddl:effect".into(), "missing effect".into()))?;
    Ok(ActionDef {
        name: Symbol::new(name),
        parameters,
        precondition,
        effect: formula_from(effect)?,
    })
}

fn formula_from(v: &Value) -> Result<Formula, SchemaError> {
    let (key, val) = split_single_key(v, "formula")?;
    match key {
        "pddl:and" => {
            let mut parts = Vec::new();
            for p in as_array(val, "pddl:and")? {
                parts.push(formula_from(p)?);
            }
            Ok(Formula::And(parts))
        }
        "pddl:not" => Ok(Formula::Not(Box::new(formula_from(val)?))),
        name => {
            let mut args = Vec::new();
            for a in as_array(val, name)? {
                args.push(Symbol::new(a.as_str().ok_or_else(|| {
                    SchemaError::BadValue(name.into(), "expected symbol strings".into())
                })?));
            }
            Ok(Formula::atom(name, args))
        }
    }
}

fn literal_from(v: &Value) -> Result<Literal, SchemaError> {
    match formula_from(v)? {
        Formula::Atom { name, args } => Ok(Literal { negated: false, name, args }),
        Formula::Not(inner) => match *inner {
            Formula::Atom { name, args } => Ok(Literal { negated: true, name, args }),
            _ => Err(SchemaError::BadValue("pddl:init".into(), "expected literals".into())),
        },
        _ => Err(SchemaError::BadValue("pddl:init".into(), "expected literals".into())),
    }
}

fn parse_opaque(text: &str) -> Result<Sexpr, SchemaError> {
    let wrapped = format!("(define (domain opaque-holder) {})", text);
    let doc = parse_document(&wrapped)
        .map_err(|e| SchemaError::BadValue("pddl:extras".into(), e.to_string()))?;
    doc.extras
        .into_iter()
        .next()
        .ok_or_else(|| SchemaError::BadValue("pddl:extras".into(), "not an opaque section".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CRIL_DOMAIN: &str = r#"
(define (domain example-ur5-domain)
  (:requirements :strips :adl :typing :semantics)
  (:context
    available - uri:cril/action/available
    insertable - uri:cril/action/insertable
    pick-n-insert - uri:cril/action/pick-n-insert)
  (:predicates
    (available ?object)
    (insertable ?pillar ?hole))
  (:action pick-n-insert
    :parameters (?pillar ?hole)
    :precondition (and
      (available ?pillar)
      (available ?hole)
      (insertable ?pillar ?hole))
    :effect (and
      (not (available ?pillar))
      (not (available ?hole)))))
"#;

    fn cril_doc() -> PddlsDocument {
        parse_document(CRIL_DOMAIN).unwrap()
    }

    #[test]
    fn expand_bound_and_unbound_terms() {
        let doc = cril_doc();
        assert_eq!(
            doc.context.expand(&Symbol::new("available")),
            Some("uri:cril/action/available")
        );
        assert_eq!(
            doc.context.expand(&Symbol::new("pick-n-insert")),
            Some("uri:cril/action/pick-n-insert")
        );
        assert_eq!(doc.context.expand(&Symbol::new("unknown-symbol")), None);
    }

    #[test]
    fn jsonld_shape_matches_the_annotation_scheme() {
        let json = to_jsonld(&cril_doc());
        assert_eq!(json["pddl:domain"], json!("example-ur5-domain"));
        assert_eq!(json["pddl:requirements"], json!([":strips", ":adl", ":typing"]));
        assert_eq!(json["@context"]["pddl"], json!("uri:pddl"));
        assert_eq!(json["@context"]["available"], json!("uri:cril/action/available"));
        assert_eq!(
            json["pddl:predicates"][0],
            json!({"available": [{"?object": null}]})
        );
        // @context must be the first key.
        let obj = json.as_object().unwrap();
        assert_eq!(obj.keys().next().map(|s| s.as_str()), Some("@context"));
    }

    #[test]
    fn empty_domain_jsonld() {
        let doc = parse_document("(define (domain d0))").unwrap();
        let json = to_jsonld(&doc);
        let ctx = json["@context"].as_object().unwrap();
        assert_eq!(ctx.len(), 1);
        assert_eq!(json["pddl:predicates"], json!([]));
    }

    #[test]
    fn problem_jsonld_keeps_bindings() {
        let src = "(define (problem p) (:context a - uri:a b - uri:b c - uri:c d - uri:d) \
                   (:domain d) (:objects a b) (:init (q a)) (:goal (q b)))";
        let doc = parse_document(src).unwrap();
        let json = to_jsonld(&doc);
        let ctx = json["@context"].as_object().unwrap();
        assert_eq!(ctx.len(), 5); // reserved pddl + 4 user bindings
        let doc2 = from_jsonld(&json).unwrap();
        assert!(doc2.eq_modulo_semantics(&doc));
    }

    #[test]
    fn round_trip_domain() {
        let doc = cril_doc();
        let doc2 = from_jsonld(&to_jsonld(&doc)).unwrap();
        assert_eq!(doc2, doc);
    }

    #[test]
    fn opaque_sections_survive_jsonld() {
        let doc = parse_document(
            "(define (domain d) (:functions (total-cost) - number) (:predicates (p ?x)))",
        )
        .unwrap();
        let doc2 = from_jsonld(&to_jsonld(&doc)).unwrap();
        assert_eq!(doc2, doc);
    }

    #[test]
    fn missing_context_is_schema_error() {
        let err = from_jsonld(&json!({"pddl:domain": "d"})).unwrap_err();
        assert_eq!(err, SchemaError::MissingContext);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = from_jsonld(&json!({
            "@context": {"pddl": "uri:pddl"},
            "pddl:domain": "d",
            "pddl:bogus": 1
        }))
        .unwrap_err();
        assert_eq!(err, SchemaError::UnknownKey("pddl:bogus".into()));
    }

    #[test]
    fn rebound_reserved_prefix_rejected() {
        let err = from_jsonld(&json!({
            "@context": {"pddl": "uri:elsewhere"},
            "pddl:domain": "d"
        }))
        .unwrap_err();
        assert_eq!(err, SchemaError::ReservedBinding);
    }
}
