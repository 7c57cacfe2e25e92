//! PDDLS toolkit: parse PDDL with semantic `:context` annotations, canonicalize
//! symbols across independently authored domains by IRI identity, derive
//! conditional predicates from an RDF ontology (SPARQL or SHACL constraint
//! bodies), emit plain PDDL, and solve it with a built-in STRIPS planner.

pub mod alias;
pub mod context;
pub mod diag;
pub mod pipeline;
pub mod planner;
pub mod rdf;
pub mod repo;
pub mod resolver;
pub mod shacl;
pub mod sparql;
pub mod syntax;

pub use context::ContextMap;
pub use diag::{Diagnostic, Level};
pub use rdf::{RdfGraph, Term, Triple};
pub use syntax::{DocumentKind, Formula, PddlsDocument, Symbol};
