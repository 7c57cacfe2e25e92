//! The SHACL fragment used by constraint bodies: node shapes targeting a
//! virtual parameter-pair class, with sequence paths compared by
//! `sh:lessThanOrEquals` or `sh:equals`.
//!
//! A shape is checked against an ordered pair `(a, b)` by constructing a
//! virtual focus node `f` with `(f, pddl:param1, a)`, `(f, pddl:param2, b)`
//! and `(f, rdf:type, <target class>)`, then collecting the value set along
//! each constraint's path and the compared path and testing them:
//! every-to-every `<=` for `lessThanOrEquals`, non-empty set equality for
//! `equals`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::rdf::{ns, RdfGraph, Term};
use crate::sparql::{compare_terms, CmpOp};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("shape `{0}` has no sh:targetClass")]
    MissingTargetClass(String),
    #[error("property shape under `{0}` has no sh:path")]
    MissingPath(String),
    #[error("sh:path under `{0}` is not a sequence of IRIs")]
    BadPath(String),
    #[error("shape `{shape}` uses unsupported constraint component `{component}`")]
    UnsupportedComponent { shape: String, component: String },
    #[error("property shape under `{0}` has no comparison constraint")]
    MissingComparator(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparator {
    LessThanOrEquals,
    Equals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyConstraint {
    pub path: Vec<String>,
    pub comparator: Comparator,
    pub other_path: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub shape_iri: Term,
    pub target_class: String,
    pub properties: Vec<PropertyConstraint>,
}

const SUPPORTED_ON_PROPERTY: [&str; 3] = [ns::SH_PATH, ns::SH_LESS_THAN_OR_EQUALS, ns::SH_EQUALS];
const SUPPORTED_ON_SHAPE: [&str; 3] = [ns::RDF_TYPE, ns::SH_TARGET_CLASS, ns::SH_PROPERTY];

/// Extracts every `sh:NodeShape` from the graph, decoding `sh:path` RDF
/// lists into path sequences.
pub fn load_shapes(g: &RdfGraph) -> Result<Vec<Shape>, ShapeError> {
    let node_shape = Term::iri(ns::SH_NODE_SHAPE);
    let mut shapes = Vec::new();
    for subject in g.subjects(ns::RDF_TYPE, &node_shape) {
        shapes.push(load_shape(g, subject)?);
    }
    Ok(shapes)
}

fn load_shape(g: &RdfGraph, subject: &Term) -> Result<Shape, ShapeError> {
    let name = subject.lexical_form().to_string();

    for t in g.iter().filter(|t| &t.subject == subject) {
        if t.predicate.starts_with("http://www.w3.org/ns/shacl#")
            && !SUPPORTED_ON_SHAPE.contains(&t.predicate.as_str())
        {
            return Err(ShapeError::UnsupportedComponent {
                shape: name,
                component: t.predicate.clone(),
            });
        }
    }

    let target_class = g
        .objects(subject, ns::SH_TARGET_CLASS)
        .next()
        .and_then(|t| t.as_iri())
        .ok_or_else(|| ShapeError::MissingTargetClass(name.clone()))?
        .to_string();

    let mut properties = Vec::new();
    for prop in g.objects(subject, ns::SH_PROPERTY) {
        properties.push(load_property(g, &name, prop)?);
    }

    Ok(Shape { shape_iri: subject.clone(), target_class, properties })
}

fn load_property(
    g: &RdfGraph,
    shape_name: &str,
    prop: &Term,
) -> Result<PropertyConstraint, ShapeError> {
    for t in g.iter().filter(|t| &t.subject == prop) {
        if t.predicate.starts_with("http://www.w3.org/ns/shacl#")
            && !SUPPORTED_ON_PROPERTY.contains(&t.predicate.as_str())
        {
            return Err(ShapeError::UnsupportedComponent {
                shape: shape_name.to_string(),
                component: t.predicate.clone(),
            });
        }
    }

    let path = decode_path(g, shape_name, prop)?;
    let (comparator, compared) =
        if let Some(node) = g.objects(prop, ns::SH_LESS_THAN_OR_EQUALS).next() {
            (Comparator::LessThanOrEquals, node)
        } else if let Some(node) = g.objects(prop, ns::SH_EQUALS).next() {
            (Comparator::Equals, node)
        } else {
            return Err(ShapeError::MissingComparator(shape_name.to_string()));
        };

    // The compared side is written as a nested property shape holding the
    // other path.
    let other_prop = g
        .objects(compared, ns::SH_PROPERTY)
        .next()
        .ok_or_else(|| ShapeError::MissingPath(shape_name.to_string()))?;
    let other_path = decode_path(g, shape_name, other_prop)?;

    Ok(PropertyConstraint { path, comparator, other_path })
}

fn decode_path(g: &RdfGraph, shape_name: &str, prop: &Term) -> Result<Vec<String>, ShapeError> {
    let head = g
        .objects(prop, ns::SH_PATH)
        .next()
        .ok_or_else(|| ShapeError::MissingPath(shape_name.to_string()))?;
    let steps = match head {
        Term::Iri(iri) => vec![Term::iri(iri.clone())],
        _ => g
            .decode_list(head)
            .ok_or_else(|| ShapeError::BadPath(shape_name.to_string()))?,
    };
    if steps.is_empty() {
        return Err(ShapeError::BadPath(shape_name.to_string()));
    }
    steps
        .into_iter()
        .map(|t| {
            t.as_iri()
                .map(|s| s.to_string())
                .ok_or_else(|| ShapeError::BadPath(shape_name.to_string()))
        })
        .collect()
}

/// Whether the ordered pair `(a, b)` conforms to the shape over a frozen,
/// closed graph. Non-numeric `<=` comparisons yield non-conformance.
pub fn conforms_pair(shape: &Shape, g: &RdfGraph, a: &Term, b: &Term) -> bool {
    shape.properties.iter().all(|c| {
        let left = path_values(g, a, b, &c.path);
        let right = path_values(g, a, b, &c.other_path);
        match c.comparator {
            Comparator::LessThanOrEquals => left.iter().all(|v1| {
                right
                    .iter()
                    .all(|v2| compare_terms(v1, v2, CmpOp::Le) == Some(true))
            }),
            Comparator::Equals => !left.is_empty() && left == right,
        }
    })
}

/// Value set reached from the virtual focus node along the path. The first
/// step consults the virtual triples (`param1 -> a`, `param2 -> b`), the
/// remaining steps follow the graph.
fn path_values(g: &RdfGraph, a: &Term, b: &Term, path: &[String]) -> BTreeSet<Term> {
    let mut current: BTreeSet<Term> = match path[0].as_str() {
        ns::PDDL_PARAM1 => [a.clone()].into(),
        ns::PDDL_PARAM2 => [b.clone()].into(),
        _ => BTreeSet::new(),
    };
    for step in &path[1..] {
        let mut next = BTreeSet::new();
        for value in &current {
            for obj in g.objects(value, step) {
                next.insert(obj.clone());
            }
        }
        current = next;
    }
    current
}

/// Filters candidate pairs down to those conforming to the shape.
pub fn derive_pairs_shacl(
    shape: &Shape,
    g: &RdfGraph,
    candidates: &BTreeSet<(Term, Term)>,
) -> BTreeSet<(Term, Term)> {
    candidates
        .iter()
        .filter(|(a, b)| conforms_pair(shape, g, a, b))
        .cloned()
        .collect()
}
