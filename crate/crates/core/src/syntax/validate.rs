use std::collections::BTreeSet;

use crate::diag::Diagnostic;

use super::ast::*;

/// Checks a parsed document for the classic authoring mistakes: variables
/// used in an action body but missing from `:parameters`, predicates applied
/// with the wrong arity, and objects used in `:init`/`:goal` without being
/// declared. Also flags two context terms bound to the same IRI, which would
/// defeat alias canonicalization.
pub fn validate_document(doc: &PddlsDocument) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    for (a, b, iri) in doc.context.duplicate_iri_bindings() {
        diags.push(Diagnostic::warning(
            "duplicate-iri-binding",
            format!("terms `{a}` and `{b}` both bind IRI `{iri}`"),
        ));
    }

    if doc.is_domain() {
        validate_domain(doc, &mut diags);
    } else {
        validate_problem(doc, &mut diags);
    }
    diags
}

fn validate_domain(doc: &PddlsDocument, diags: &mut Vec<Diagnostic>) {
    for action in &doc.actions {
        let declared: BTreeSet<&Symbol> = action.parameters.iter().map(|p| &p.name).collect();
        let mut reported: BTreeSet<Symbol> = BTreeSet::new();
        for formula in [&action.precondition, &action.effect] {
            for (name, args) in formula.atoms() {
                check_arity(doc, name, args.len(), diags);
                for arg in args {
                    if arg.is_variable()
                        && !declared.contains(arg)
                        && reported.insert(arg.clone())
                    {
                        diags.push(Diagnostic::warning(
                            "undeclared-variable",
                            format!(
                                "variable `{arg}` used in action `{}` but not declared in :parameters",
                                action.name
                            ),
                        ));
                    }
                }
            }
        }
    }
}

fn validate_problem(doc: &PddlsDocument, diags: &mut Vec<Diagnostic>) {
    let declared: BTreeSet<&Symbol> = doc.objects.iter().map(|o| &o.name).collect();
    let mut reported: BTreeSet<Symbol> = BTreeSet::new();
    let mut check_arg = |arg: &Symbol, diags: &mut Vec<Diagnostic>| {
        if !arg.is_variable() && !declared.contains(arg) && reported.insert(arg.clone()) {
            diags.push(Diagnostic::warning(
                "undeclared-object",
                format!("object `{arg}` used but not declared in :objects"),
            ));
        }
    };

    for lit in &doc.init {
        for arg in &lit.args {
            check_arg(arg, diags);
        }
    }
    if let Some(goal) = &doc.goal {
        for (_, args) in goal.atoms() {
            for arg in args {
                check_arg(arg, diags);
            }
        }
    }
}

fn check_arity(doc: &PddlsDocument, name: &Symbol, used: usize, diags: &mut Vec<Diagnostic>) {
    if let Some(decl) = doc.predicate(name) {
        if decl.arity() != used {
            diags.push(Diagnostic::error(
                "arity-mismatch",
                format!(
                    "predicate `{name}` declared with arity {} but used with {used} arguments",
                    decl.arity()
                ),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_document;
    use super::*;
    use crate::diag::Level;

    const TYPO_DOMAIN: &str = r#"
(define (domain example-ur5-domain)
  (:requirements :strips :adl :typing :semantics)
  (:context
    available - uri:cril/action/available
    insertable - uri:cril/action/insertable
    pick-n-insert - uri:cril/action/pick-n-insert)
  (:predicates
    (available ?object)
    (insertable ?piller ?hole))
  (:action pick-n-insert
    :parameters (?pillar ?hole)
    :precondition (and
      (available ?piller)
      (available ?hole)
      (insertable ?piller ?hole))
    :effect (and
      (not (available ?piller))
      (not (available ?hole)))))
"#;

    #[test]
    fn undeclared_variable_reported_once() {
        let doc = parse_document(TYPO_DOMAIN).unwrap();
        let diags = validate_document(&doc);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].level, Level::Warning);
        assert_eq!(diags[0].code, "undeclared-variable");
        assert!(diags[0].message.contains("?piller"));
    }

    #[test]
    fn consistent_domain_is_clean() {
        let fixed = TYPO_DOMAIN.replace("?piller", "?pillar");
        let doc = parse_document(&fixed).unwrap();
        assert!(validate_document(&doc).is_empty());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let src = "(define (domain d) (:predicates (available ?x)) \
                   (:action go :parameters (?a ?b) :precondition (available ?a ?b) \
                   :effect (available ?a)))";
        let doc = parse_document(src).unwrap();
        let diags = validate_document(&doc);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].level, Level::Error);
        assert_eq!(diags[0].code, "arity-mismatch");
    }

    #[test]
    fn undeclared_object_in_init() {
        let src = "(define (problem p) (:domain d) (:objects a) \
                   (:init (on a b)) (:goal (on a a)))";
        let doc = parse_document(src).unwrap();
        let diags = validate_document(&doc);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].code, "undeclared-object");
        assert!(diags[0].message.contains("`b`"));
    }

    #[test]
    fn duplicate_iri_binding_flagged() {
        let src = "(define (domain d) (:context a - uri:x b - uri:x))";
        let doc = parse_document(src).unwrap();
        let diags = validate_document(&doc);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "duplicate-iri-binding");
    }
}
