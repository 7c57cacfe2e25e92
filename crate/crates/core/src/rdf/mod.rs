//! An in-memory triple store over IRIs, blank nodes and literals, with a
//! Turtle reader/writer for the supported subset and RDFS-style entailment
//! materialization (subclass transitivity and type propagation).

mod decimal;
mod turtle;

pub use decimal::Decimal;
pub use turtle::{parse_turtle, serialize_turtle, RdfError};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Well-known vocabulary IRIs.
pub mod ns {
    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
    pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";

    pub const SH_NODE_SHAPE: &str = "http://www.w3.org/ns/shacl#NodeShape";
    pub const SH_TARGET_CLASS: &str = "http://www.w3.org/ns/shacl#targetClass";
    pub const SH_PROPERTY: &str = "http://www.w3.org/ns/shacl#property";
    pub const SH_PATH: &str = "http://www.w3.org/ns/shacl#path";
    pub const SH_LESS_THAN_OR_EQUALS: &str = "http://www.w3.org/ns/shacl#lessThanOrEquals";
    pub const SH_EQUALS: &str = "http://www.w3.org/ns/shacl#equals";

    /// The special predicate tying a role to its constraint body.
    pub const PDDLS_ESTABLISHED_WITH: &str = "uri:pddls#establishedWith";
    /// Virtual parameter-pair vocabulary used by SHACL constraint bodies.
    pub const PDDL_PARAMETERS: &str = "uri:pddl#parameters";
    pub const PDDL_PARAM1: &str = "uri:pddl#param1";
    pub const PDDL_PARAM2: &str = "uri:pddl#param2";
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal {
        lexical: String,
        datatype: String,
        lang: Option<String>,
    },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    pub fn string(s: impl Into<String>) -> Term {
        Term::Literal { lexical: s.into(), datatype: ns::XSD_STRING.into(), lang: None }
    }

    pub fn decimal(s: impl Into<String>) -> Term {
        Term::Literal { lexical: s.into(), datatype: ns::XSD_DECIMAL.into(), lang: None }
    }

    pub fn integer(s: impl Into<String>) -> Term {
        Term::Literal { lexical: s.into(), datatype: ns::XSD_INTEGER.into(), lang: None }
    }

    /// Language tags are lowercased on construction.
    pub fn lang_string(s: impl Into<String>, lang: &str) -> Term {
        Term::Literal {
            lexical: s.into(),
            datatype: ns::RDF_LANG_STRING.into(),
            lang: Some(lang.to_ascii_lowercase()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn lexical_form(&self) -> &str {
        match self {
            Term::Iri(i) => i,
            Term::Blank(b) => b,
            Term::Literal { lexical, .. } => lexical,
        }
    }

    /// Numeric value for xsd:decimal / xsd:integer literals.
    pub fn numeric(&self) -> Option<Decimal> {
        match self {
            Term::Literal { lexical, datatype, .. }
                if datatype == ns::XSD_DECIMAL || datatype == ns::XSD_INTEGER =>
            {
                Decimal::parse(lexical)
            }
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Iri(_) => 0,
            Term::Blank(_) => 1,
            Term::Literal { .. } => 2,
        }
    }
}

// Ordered by lexical form first so result sets and serializations come out
// sorted the way a human reads them.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lexical_form()
            .cmp(other.lexical_form())
            .then_with(|| self.rank().cmp(&other.rank()))
            .then_with(|| match (self, other) {
                (
                    Term::Literal { datatype: d1, lang: l1, .. },
                    Term::Literal { datatype: d2, lang: l2, .. },
                ) => d1.cmp(d2).then_with(|| l1.cmp(l2)),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Blank(b) => write!(f, "_:{b}"),
            Term::Literal { lexical, datatype, lang } => {
                if let Some(tag) = lang {
                    write!(f, "{lexical:?}@{tag}")
                } else if datatype == ns::XSD_STRING {
                    write!(f, "{lexical:?}")
                } else {
                    write!(f, "{lexical:?}^^<{datatype}>")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: impl Into<String>, object: Term) -> Triple {
        Triple { subject, predicate: predicate.into(), object }
    }
}

/// A set of triples plus the prefix table seen while parsing (kept for
/// serialization). Mutable while loading, then shared read-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RdfGraph {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, String>,
    next_blank: u64,
}

impl RdfGraph {
    pub fn new() -> RdfGraph {
        RdfGraph::default()
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn add(&mut self, subject: Term, predicate: impl Into<String>, object: Term) -> bool {
        self.insert(Triple::new(subject, predicate, object))
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn set_prefix(&mut self, prefix: impl Into<String>, iri: impl Into<String>) {
        self.prefixes.insert(prefix.into(), iri.into());
    }

    pub fn prefixes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(p, i)| (p.as_str(), i.as_str()))
    }

    pub fn fresh_blank(&mut self) -> Term {
        self.next_blank += 1;
        Term::Blank(format!("b{}", self.next_blank))
    }

    /// A copy with every blank-node label prefixed. Used before unioning
    /// independently parsed files so their anonymous nodes stay distinct.
    pub fn with_blank_prefix(&self, prefix: &str) -> RdfGraph {
        let relabel = |t: &Term| match t {
            Term::Blank(label) => Term::Blank(format!("{prefix}{label}")),
            other => other.clone(),
        };
        let mut out = RdfGraph::new();
        for t in self.iter() {
            out.insert(Triple::new(
                relabel(&t.subject),
                t.predicate.clone(),
                relabel(&t.object),
            ));
        }
        out.prefixes = self.prefixes.clone();
        out.next_blank = self.next_blank;
        out
    }

    /// Unions another graph into this one (triples and prefixes).
    pub fn extend(&mut self, other: &RdfGraph) {
        for t in other.iter() {
            self.triples.insert(t.clone());
        }
        for (p, i) in other.prefixes() {
            self.prefixes.entry(p.to_string()).or_insert_with(|| i.to_string());
        }
        self.next_blank = self.next_blank.max(other.next_blank);
    }

    pub fn objects<'a>(
        &'a self,
        subject: &'a Term,
        predicate: &'a str,
    ) -> impl Iterator<Item = &'a Term> {
        self.triples
            .iter()
            .filter(move |t| &t.subject == subject && t.predicate == predicate)
            .map(|t| &t.object)
    }

    pub fn subjects<'a>(
        &'a self,
        predicate: &'a str,
        object: &'a Term,
    ) -> impl Iterator<Item = &'a Term> {
        self.triples
            .iter()
            .filter(move |t| t.predicate == predicate && &t.object == object)
            .map(|t| &t.subject)
    }

    /// Subjects that carry at least one `rdf:type` triple, i.e. the
    /// individuals of the dataset in the loose sense.
    pub fn typed_subjects(&self) -> BTreeSet<&Term> {
        self.triples
            .iter()
            .filter(|t| t.predicate == ns::RDF_TYPE)
            .map(|t| &t.subject)
            .collect()
    }

    /// Every distinct term occurring in the graph.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            out.insert(t.subject.clone());
            out.insert(Term::Iri(t.predicate.clone()));
            out.insert(t.object.clone());
        }
        out
    }

    /// Decodes an `rdf:first`/`rdf:rest` list starting at `head`.
    pub fn decode_list(&self, head: &Term) -> Option<Vec<Term>> {
        let mut items = Vec::new();
        let mut cursor = head.clone();
        loop {
            if cursor.as_iri() == Some(ns::RDF_NIL) {
                return Some(items);
            }
            let first = self.objects(&cursor, ns::RDF_FIRST).next()?.clone();
            let rest = self.objects(&cursor, ns::RDF_REST).next()?.clone();
            items.push(first);
            cursor = rest;
        }
    }
}

/// Materializes the RDFS-style entailments used here: subclass transitivity
/// and type propagation along `rdfs:subClassOf`. The result contains the
/// input graph and the operation is idempotent.
pub fn rdfs_closure(g: &RdfGraph) -> RdfGraph {
    let mut out = g.clone();
    loop {
        let mut new_triples: Vec<Triple> = Vec::new();

        let sub_pairs: Vec<(Term, Term)> = out
            .iter()
            .filter(|t| t.predicate == ns::RDFS_SUBCLASS_OF)
            .map(|t| (t.subject.clone(), t.object.clone()))
            .collect();
        let types: Vec<(Term, Term)> = out
            .iter()
            .filter(|t| t.predicate == ns::RDF_TYPE)
            .map(|t| (t.subject.clone(), t.object.clone()))
            .collect();

        // subclass transitivity
        for (a, b) in &sub_pairs {
            for (c, d) in &sub_pairs {
                if b == c {
                    let t = Triple::new(a.clone(), ns::RDFS_SUBCLASS_OF, d.clone());
                    if !out.contains(&t) {
                        new_triples.push(t);
                    }
                }
            }
        }
        // type propagation
        for (x, c) in &types {
            for (sub, sup) in &sub_pairs {
                if c == sub {
                    let t = Triple::new(x.clone(), ns::RDF_TYPE, sup.clone());
                    if !out.contains(&t) {
                        new_triples.push(t);
                    }
                }
            }
        }

        if new_triples.is_empty() {
            return out;
        }
        for t in new_triples {
            out.insert(t);
        }
    }
}
