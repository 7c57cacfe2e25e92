//! Round-trip properties over generated corpora: PDDLS text <-> AST,
//! AST <-> JSON-LD, Turtle graph <-> text.

use proptest::prelude::*;

use pddls_core::context::{from_jsonld, to_jsonld, ContextMap};
use pddls_core::rdf::{parse_turtle, serialize_turtle, RdfGraph, Term, Triple};
use pddls_core::syntax::{
    parse_document, print_pddl, ActionDef, DocumentKind, Formula, Literal, PddlsDocument,
    PredicateDecl, Symbol, TypedSymbol,
};

// Steer clear of formula keywords and the reserved context term.
fn name_strategy() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9-]{0,6}".prop_filter("reserved word", |s| {
        !["and", "not", "or", "imply", "exists", "forall", "when", "pddl", "define"]
            .contains(&s.as_str())
            && !s.ends_with('-')
    })
}

fn var_strategy() -> impl Strategy<Value = Symbol> {
    name_strategy().prop_map(|n| Symbol::new(format!("?{n}")))
}

fn typed_symbol(vars: bool) -> impl Strategy<Value = TypedSymbol> {
    let name = if vars {
        var_strategy().boxed()
    } else {
        name_strategy().prop_map(Symbol::new).boxed()
    };
    (name, proptest::option::of(name_strategy())).prop_map(|(name, ty)| TypedSymbol {
        name,
        ty: ty.map(Symbol::new),
    })
}

// Deduplicates and puts typed entries first: `a b - t` types the whole
// group, so an untyped name can only precede a typed one in texts the
// grammar cannot produce. Round trips are quantified over valid texts.
fn unique_by_name(items: Vec<TypedSymbol>) -> Vec<TypedSymbol> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out: Vec<TypedSymbol> =
        items.into_iter().filter(|t| seen.insert(t.name.clone())).collect();
    out.sort_by_key(|t| t.ty.is_none());
    out
}

fn context_strategy() -> impl Strategy<Value = ContextMap> {
    proptest::collection::btree_map(name_strategy(), "[a-z0-9/:#_.-]{1,12}", 0..4)
        .prop_map(|m| ContextMap::from_pairs(m.into_iter().collect()))
}

fn formula_from_literals(lits: Vec<Literal>) -> Formula {
    let to_f = |l: &Literal| {
        let atom = Formula::Atom { name: l.name.clone(), args: l.args.clone() };
        if l.negated {
            Formula::Not(Box::new(atom))
        } else {
            atom
        }
    };
    match lits.len() {
        1 => to_f(&lits[0]),
        _ => Formula::And(lits.iter().map(to_f).collect()),
    }
}

prop_compose! {
    fn domain_strategy()(
        name in name_strategy(),
        reqs in proptest::sample::subsequence(
            vec![":strips", ":typing", ":adl", ":negative-preconditions", ":semantics"], 0..4),
        context in context_strategy(),
        types in proptest::collection::vec(typed_symbol(false), 0..3),
        constants in proptest::collection::vec(typed_symbol(false), 0..3),
        pred_names in proptest::collection::btree_set(name_strategy(), 1..4),
        arities in proptest::collection::vec(0usize..3, 3),
        action_seed in proptest::collection::vec(
            (name_strategy(), proptest::collection::btree_set(name_strategy(), 1..3), 1usize..4, 1usize..3),
            0..3),
    ) -> PddlsDocument {
        let mut doc = PddlsDocument::new(DocumentKind::Domain, name);
        doc.requirements = reqs.into_iter().map(String::from).collect();
        doc.context = context;
        doc.types = unique_by_name(types);
        doc.constants = unique_by_name(constants);
        doc.predicates = pred_names
            .into_iter()
            .enumerate()
            .map(|(i, n)| PredicateDecl {
                name: Symbol::new(n),
                params: (0..arities[i % arities.len()])
                    .map(|k| TypedSymbol::untyped(format!("?p{k}")))
                    .collect(),
            })
            .collect();
        let mut actions = Vec::new();
        for (aname, params, pre_n, eff_n) in action_seed {
            let params: Vec<TypedSymbol> = params
                .into_iter()
                .map(|p| TypedSymbol::untyped(format!("?{p}")))
                .collect();
            let args: Vec<Symbol> = params.iter().map(|p| p.name.clone()).collect();
            let pick = |count: usize, neg_from: usize| -> Vec<Literal> {
                (0..count)
                    .map(|i| {
                        let pred = &doc.predicates[i % doc.predicates.len()];
                        Literal {
                            negated: (i + neg_from).is_multiple_of(2),
                            name: pred.name.clone(),
                            args: (0..pred.arity())
                                .map(|k| args[(i + k) % args.len()].clone())
                                .collect(),
                        }
                    })
                    .collect()
            };
            actions.push(ActionDef {
                name: Symbol::new(aname),
                parameters: params,
                precondition: formula_from_literals(pick(pre_n, 1)),
                effect: formula_from_literals(pick(eff_n, 0)),
            });
        }
        // Action names must be unique only for readability; the grammar
        // allows repetition, so no dedup here.
        doc.actions = actions;
        doc
    }
}

prop_compose! {
    fn problem_strategy()(
        name in name_strategy(),
        domain in name_strategy(),
        context in context_strategy(),
        objects in proptest::collection::vec(typed_symbol(false), 1..4),
        pred_names in proptest::collection::btree_set(name_strategy(), 1..3),
        init_n in 0usize..4,
        has_goal in proptest::bool::ANY,
    ) -> PddlsDocument {
        let mut doc = PddlsDocument::new(DocumentKind::Problem, name);
        doc.domain_ref = Some(Symbol::new(domain));
        doc.context = context;
        doc.objects = unique_by_name(objects);
        let preds: Vec<PredicateDecl> = pred_names
            .into_iter()
            .map(|n| PredicateDecl {
                name: Symbol::new(n),
                params: vec![TypedSymbol::untyped("?x")],
            })
            .collect();
        let objs: Vec<Symbol> = doc.objects.iter().map(|o| o.name.clone()).collect();
        doc.init = (0..init_n)
            .map(|i| Literal {
                negated: false,
                name: preds[i % preds.len()].name.clone(),
                args: vec![objs[i % objs.len()].clone()],
            })
            .collect();
        if has_goal {
            doc.goal = Some(Formula::Not(Box::new(Formula::Atom {
                name: preds[0].name.clone(),
                args: vec![objs[0].clone()],
            })));
        }
        doc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn domain_text_round_trip(doc in domain_strategy()) {
        let text = print_pddl(&doc, false);
        let reparsed = parse_document(&text).unwrap();
        prop_assert_eq!(&reparsed, &doc, "printed:\n{}", text);
        // Printing is a fixpoint: print(parse(print(d))) == print(d).
        prop_assert_eq!(print_pddl(&reparsed, false), text);
    }

    #[test]
    fn problem_text_round_trip(doc in problem_strategy()) {
        let text = print_pddl(&doc, false);
        let reparsed = parse_document(&text).unwrap();
        prop_assert_eq!(&reparsed, &doc, "printed:\n{}", text);
    }

    #[test]
    fn stripped_output_is_plain_pddl(doc in domain_strategy()) {
        let text = print_pddl(&doc, true);
        prop_assert!(!text.contains(":context"));
        prop_assert!(!text.contains(":semantics"));
        let reparsed = parse_document(&text).unwrap();
        prop_assert!(reparsed.context.is_empty());
    }

    #[test]
    fn domain_jsonld_round_trip(doc in domain_strategy()) {
        let json = to_jsonld(&doc);
        let back = from_jsonld(&json).unwrap();
        prop_assert!(back.eq_modulo_semantics(&doc), "json: {json}");
    }

    #[test]
    fn problem_jsonld_round_trip(doc in problem_strategy()) {
        let json = to_jsonld(&doc);
        let back = from_jsonld(&json).unwrap();
        prop_assert!(back.eq_modulo_semantics(&doc), "json: {json}");
    }
}

fn term_strategy() -> impl Strategy<Value = Term> {
    let iri = "[a-z]{1,5}".prop_map(|s| Term::iri(format!("uri:gen/{s}")));
    let blank = "[a-z][a-z0-9]{0,3}".prop_map(Term::Blank);
    let string = "[ -~\n]{0,12}".prop_map(Term::string);
    let lang = ("[ -~]{0,8}", "[a-z]{2,6}").prop_map(|(s, t)| Term::lang_string(s, &t));
    let integer = proptest::num::i64::ANY.prop_map(|n| Term::integer(n.to_string()));
    let decimal = (proptest::num::i32::ANY, 0u8..4).prop_map(|(n, scale)| {
        Term::decimal(format!("{}.{}", n, "0".repeat(scale as usize + 1)))
    });
    let typed = "[a-z]{0,8}".prop_map(|s| Term::Literal {
        lexical: s,
        datatype: "uri:gen/dt".into(),
        lang: None,
    });
    prop_oneof![iri, blank, string, lang, integer, decimal, typed]
}

fn graph_strategy() -> impl Strategy<Value = RdfGraph> {
    proptest::collection::vec(
        (term_strategy(), "[a-z]{1,5}", term_strategy()),
        0..40,
    )
    .prop_map(|triples| {
        let mut g = RdfGraph::new();
        for (s, p, o) in triples {
            let subject = match s {
                Term::Literal { .. } => Term::iri("uri:gen/s"),
                other => other,
            };
            g.insert(Triple::new(subject, format!("uri:gen/p/{p}"), o));
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn turtle_round_trip(g in graph_strategy()) {
        let text = serialize_turtle(&g);
        let reparsed = parse_turtle(&text, None).unwrap();
        let a: Vec<&Triple> = g.iter().collect();
        let b: Vec<&Triple> = reparsed.iter().collect();
        prop_assert_eq!(a, b, "serialized:\n{}", text);
    }
}
