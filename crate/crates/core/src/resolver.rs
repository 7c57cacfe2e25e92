//! Conditional-predicate resolution: collect `pddls:establishedWith` rules
//! from the ontology, evaluate each rule body (SPARQL query or SHACL shape)
//! over the entailment-closed dataset to derive role assertions, close
//! again, canonicalize aliases across the problem and domains, and inject
//! the derived facts that land on problem objects into the problem's init.
//!
//! Rule evaluation is a single, non-recursive pass: derived role triples are
//! added to the graph and may feed the second entailment closure, but they
//! never retrigger rule evaluation.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::alias::{apply_translation, build_translation_maps, ContextError, DomainTranslation};
use crate::diag::Diagnostic;
use crate::rdf::{ns, rdfs_closure, RdfGraph, Term, Triple};
use crate::shacl::{derive_pairs_shacl, load_shapes, Shape, ShapeError};
use crate::sparql::{evaluate, parse_query, Query, SparqlError};
use crate::syntax::{
    print_pddl, validate_document, DocumentKind, Literal, PddlsDocument, Symbol, SyntaxError,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("role `{role}`: constraint body failed to parse: {source}")]
    BadSparql {
        role: String,
        #[source]
        source: SparqlError,
    },
    #[error("role `{role}`: constraint query must project exactly 2 variables, found {found}")]
    WrongProjection { role: String, found: usize },
    #[error("role `{role}`: `{iri}` is not a loadable shape")]
    NotAShape { role: String, iri: String },
    #[error("role `{role}`: shape failed to load: {source}")]
    BadShape {
        role: String,
        #[source]
        source: ShapeError,
    },
    #[error("`pddls:establishedWith` subject `{0}` is not an IRI")]
    BadRole(String),
}

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("expected a problem document, got a domain")]
    NotAProblem,
    #[error("problem has no :domain reference")]
    MissingDomainRef,
    #[error("problem references domain `{0}`, which was not supplied")]
    UnknownDomain(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Context(#[from] ContextError),
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("emitted PDDL failed to reparse: {0}")]
    Reparse(#[from] SyntaxError),
    #[error("emitted PDDL failed validation: {0}")]
    Validation(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    Sparql(Query),
    Shacl(Shape),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EstablishRule {
    pub role_iri: String,
    pub body: RuleBody,
}

/// One derived role assertion `role(subject, object)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DerivedFact {
    pub role_iri: String,
    pub subject: Term,
    pub object: Term,
}

impl std::fmt::Display for DerivedFact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({} {} {})",
            self.role_iri,
            self.subject.lexical_form(),
            self.object.lexical_form()
        )
    }
}

#[derive(Debug)]
pub struct ResolvedBundle {
    /// All supplied domains, canonicalized. `primary` indexes the one the
    /// problem references.
    pub domains: Vec<PddlsDocument>,
    pub primary: usize,
    /// The problem with derived facts appended to `:init`.
    pub problem: PddlsDocument,
    pub derived: Vec<DerivedFact>,
    pub injected: Vec<Literal>,
    pub dropped: Vec<DerivedFact>,
    pub translations: Vec<DomainTranslation>,
    pub diagnostics: Vec<Diagnostic>,
    /// The dataset after rule evaluation and the second closure.
    pub graph: RdfGraph,
}

impl ResolvedBundle {
    pub fn domain(&self) -> &PddlsDocument {
        &self.domains[self.primary]
    }
}

/// One rule per `(role, body)` triple. String-literal bodies parse as
/// constraint queries; IRI bodies must resolve to a loadable shape.
pub fn collect_rules(g: &RdfGraph) -> Result<Vec<EstablishRule>, RuleError> {
    let shapes = load_shapes(g);
    let mut rules = Vec::new();
    for t in g.iter().filter(|t| t.predicate == ns::PDDLS_ESTABLISHED_WITH) {
        let role = t
            .subject
            .as_iri()
            .ok_or_else(|| RuleError::BadRole(t.subject.lexical_form().to_string()))?
            .to_string();
        match &t.object {
            Term::Literal { lexical, .. } => {
                let query = parse_query(lexical)
                    .map_err(|source| RuleError::BadSparql { role: role.clone(), source })?;
                if query.projected.len() != 2 {
                    return Err(RuleError::WrongProjection {
                        role,
                        found: query.projected.len(),
                    });
                }
                rules.push(EstablishRule { role_iri: role, body: RuleBody::Sparql(query) });
            }
            Term::Iri(iri) => {
                let loaded = match &shapes {
                    Ok(list) => list,
                    Err(e) => {
                        return Err(RuleError::BadShape { role, source: e.clone() });
                    }
                };
                let shape = loaded
                    .iter()
                    .find(|s| s.shape_iri.as_iri() == Some(iri.as_str()))
                    .cloned()
                    .ok_or_else(|| RuleError::NotAShape {
                        role: role.clone(),
                        iri: iri.clone(),
                    })?;
                rules.push(EstablishRule { role_iri: role, body: RuleBody::Shacl(shape) });
            }
            Term::Blank(b) => {
                return Err(RuleError::NotAShape { role, iri: format!("_:{b}") });
            }
        }
    }
    Ok(rules)
}

/// Evaluates one rule over the closed dataset. For a query body, every
/// result pair becomes a fact (rows binding non-IRI terms are skipped, since
/// roles relate individuals). For a shape body, all ordered pairs of
/// distinct typed individuals are tested for conformance.
pub fn establish(rule: &EstablishRule, g: &RdfGraph) -> BTreeSet<DerivedFact> {
    let pairs: BTreeSet<(Term, Term)> = match &rule.body {
        RuleBody::Sparql(query) => evaluate(query, g)
            .rows()
            .filter(|row| row.len() == 2 && row[0].as_iri().is_some() && row[1].as_iri().is_some())
            .map(|row| (row[0].clone(), row[1].clone()))
            .collect(),
        RuleBody::Shacl(shape) => {
            let individuals: Vec<&Term> = g
                .typed_subjects()
                .into_iter()
                .filter(|t| t.as_iri().is_some())
                .collect();
            let mut candidates = BTreeSet::new();
            for a in &individuals {
                for b in &individuals {
                    if a != b {
                        candidates.insert(((*a).clone(), (*b).clone()));
                    }
                }
            }
            derive_pairs_shacl(shape, g, &candidates)
        }
    };
    pairs
        .into_iter()
        .map(|(subject, object)| DerivedFact { role_iri: rule.role_iri.clone(), subject, object })
        .collect()
}

pub fn resolve(
    problem: &PddlsDocument,
    domains: &[PddlsDocument],
    ontology: &RdfGraph,
) -> Result<ResolvedBundle, ResolveError> {
    resolve_with_options(problem, domains, ontology, true)
}

pub fn resolve_with_options(
    problem: &PddlsDocument,
    domains: &[PddlsDocument],
    ontology: &RdfGraph,
    closure_enabled: bool,
) -> Result<ResolvedBundle, ResolveError> {
    if problem.kind != DocumentKind::Problem {
        return Err(ResolveError::NotAProblem);
    }
    let domain_ref = problem.domain_ref.as_ref().ok_or(ResolveError::MissingDomainRef)?;
    let primary = domains
        .iter()
        .position(|d| &d.name == domain_ref)
        .ok_or_else(|| ResolveError::UnknownDomain(domain_ref.to_string()))?;

    let mut diagnostics = Vec::new();
    for doc in std::iter::once(problem).chain(domains.iter()) {
        for (a, b, iri) in doc.context.duplicate_iri_bindings() {
            diagnostics.push(Diagnostic::warning(
                "duplicate-iri-binding",
                format!("`{}`: terms `{a}` and `{b}` both bind IRI `{iri}`", doc.name),
            ));
        }
    }

    // Entailment closure, one rule pass, closure again. Facts derived here
    // never feed back into rule evaluation.
    let closed = if closure_enabled { rdfs_closure(ontology) } else { ontology.clone() };
    let rules = collect_rules(&closed)?;
    let mut facts: BTreeSet<DerivedFact> = BTreeSet::new();
    for rule in &rules {
        facts.extend(establish(rule, &closed));
    }
    let mut enriched = closed.clone();
    for fact in &facts {
        enriched.insert(Triple::new(
            fact.subject.clone(),
            fact.role_iri.clone(),
            fact.object.clone(),
        ));
    }
    let graph = if closure_enabled { rdfs_closure(&enriched) } else { enriched };

    // Unify symbol aliases across the problem and every domain.
    let domain_ctxs: Vec<(Symbol, crate::context::ContextMap)> =
        domains.iter().map(|d| (d.name.clone(), d.context.clone())).collect();
    let canon = build_translation_maps(&problem.context, &domain_ctxs)?;
    let translated: Vec<PddlsDocument> = domains
        .iter()
        .zip(&canon.translations)
        .map(|(d, tr)| apply_translation(d, tr))
        .collect();

    // Inject derived facts whose role and endpoints are all bound to problem
    // objects; report everything else rather than losing it silently.
    let objects: BTreeSet<&Symbol> = problem.objects.iter().map(|o| &o.name).collect();
    let primary_domain = &translated[primary];
    let mut out_problem = problem.clone();
    let mut injected: Vec<Literal> = Vec::new();
    let mut dropped: Vec<DerivedFact> = Vec::new();

    for fact in &facts {
        let role_sym = match canon.state.symbol_for(&fact.role_iri) {
            Some(s) => s.clone(),
            None => {
                diagnostics.push(Diagnostic::warning(
                    "dropped-derived-fact",
                    format!("{fact} dropped: role IRI has no context binding"),
                ));
                dropped.push(fact.clone());
                continue;
            }
        };
        let endpoint = |term: &Term| -> Option<Symbol> {
            let iri = term.as_iri()?;
            let sym = canon.state.symbol_for(iri)?;
            objects.contains(sym).then(|| sym.clone())
        };
        let (subj, obj) = match (endpoint(&fact.subject), endpoint(&fact.object)) {
            (Some(s), Some(o)) => (s, o),
            _ => {
                diagnostics.push(Diagnostic::warning(
                    "dropped-derived-fact",
                    format!("{fact} dropped: endpoint is not a problem object"),
                ));
                dropped.push(fact.clone());
                continue;
            }
        };
        match primary_domain.predicate(&role_sym) {
            Some(decl) if decl.arity() == 2 => {}
            _ => {
                diagnostics.push(Diagnostic::warning(
                    "undeclared-role-predicate",
                    format!(
                        "{fact} dropped: `{role_sym}` is not declared as a 2-ary predicate in domain `{}`",
                        primary_domain.name
                    ),
                ));
                dropped.push(fact.clone());
                continue;
            }
        }
        let literal = Literal { negated: false, name: role_sym, args: vec![subj, obj] };
        if !out_problem.init.contains(&literal) {
            out_problem.init.push(literal.clone());
            injected.push(literal);
        }
    }

    Ok(ResolvedBundle {
        domains: translated,
        primary,
        problem: out_problem,
        derived: facts.into_iter().collect(),
        injected,
        dropped,
        translations: canon.translations,
        diagnostics,
        graph,
    })
}

/// Writes the canonicalized primary domain and the enriched problem as
/// plain PDDL (`domain.pddl`, `problem.pddl`); extra domains land next to
/// them as `domain-<name>.pddl`. Every emitted file must reparse and
/// validate without errors.
pub fn emit(bundle: &ResolvedBundle, out_dir: &Path) -> Result<(PathBuf, PathBuf), EmitError> {
    std::fs::create_dir_all(out_dir)?;
    let domain_path = out_dir.join("domain.pddl");
    let problem_path = out_dir.join("problem.pddl");

    let mut outputs: Vec<(PathBuf, &PddlsDocument)> =
        vec![(domain_path.clone(), bundle.domain()), (problem_path.clone(), &bundle.problem)];
    for (i, domain) in bundle.domains.iter().enumerate() {
        if i != bundle.primary {
            outputs.push((out_dir.join(format!("domain-{}.pddl", domain.name)), domain));
        }
    }

    for (path, doc) in outputs {
        let text = print_pddl(doc, true);
        let reparsed = crate::syntax::parse_document(&text)?;
        let errors: Vec<String> = validate_document(&reparsed)
            .into_iter()
            .filter(|d| d.is_error())
            .map(|d| d.to_string())
            .collect();
        if !errors.is_empty() {
            return Err(EmitError::Validation(errors.join("; ")));
        }
        std::fs::write(&path, text)?;
    }
    Ok((domain_path, problem_path))
}
