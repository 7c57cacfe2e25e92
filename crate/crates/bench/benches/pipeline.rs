use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pddls_core::planner::{goal_formula, ground, initial_state, search};
use pddls_core::rdf::{parse_turtle, rdfs_closure};
use pddls_core::resolver::resolve;
use pddls_core::sparql::{evaluate, parse_query};
use pddls_core::syntax::{parse_document, print_pddl};

const COMMON_SENSE: &str = include_str!("../../../fixtures/common-sense.ttl");
const OBJECTS: &str = include_str!("../../../fixtures/objects.ttl");
const DOMAIN: &str = include_str!("../../../fixtures/example-ur5-domain.pddls");
const PROBLEM: &str = include_str!("../../../fixtures/example-problem.pddls");

const HOLE_QUERY: &str = "PREFIX ex_shapes: <uri:ex/shapes#>\n\
                          SELECT DISTINCT ?x ?s WHERE {\n\
                          ?x a ex_shapes:Hole . ?x <uri:ex/shapes#size> ?s\n\
                          FILTER (?s >= 2.0) }";

fn fixture_graph() -> pddls_core::RdfGraph {
    let mut g = parse_turtle(COMMON_SENSE, None).unwrap();
    g.extend(&parse_turtle(OBJECTS, None).unwrap());
    g
}

fn bench_parse_pddls(c: &mut Criterion) {
    c.bench_function("parse_domain", |b| b.iter(|| parse_document(black_box(DOMAIN)).unwrap()));
    let doc = parse_document(DOMAIN).unwrap();
    c.bench_function("print_domain", |b| b.iter(|| print_pddl(black_box(&doc), true)));
}

fn bench_turtle_and_closure(c: &mut Criterion) {
    c.bench_function("parse_turtle_fixtures", |b| {
        b.iter(|| {
            let mut g = parse_turtle(black_box(COMMON_SENSE), None).unwrap();
            g.extend(&parse_turtle(black_box(OBJECTS), None).unwrap());
            g
        })
    });
    let g = fixture_graph();
    c.bench_function("rdfs_closure_fixtures", |b| b.iter(|| rdfs_closure(black_box(&g))));
}

fn bench_query(c: &mut Criterion) {
    let closed = rdfs_closure(&fixture_graph());
    let q = parse_query(HOLE_QUERY).unwrap();
    c.bench_function("evaluate_hole_query", |b| {
        b.iter(|| evaluate(black_box(&q), black_box(&closed)))
    });
}

fn bench_resolve_and_plan(c: &mut Criterion) {
    let problem = parse_document(PROBLEM).unwrap();
    let domain = parse_document(DOMAIN).unwrap();
    let graph = fixture_graph();
    c.bench_function("resolve_fixtures", |b| {
        b.iter(|| resolve(black_box(&problem), black_box(std::slice::from_ref(&domain)), &graph))
    });

    let bundle = resolve(&problem, std::slice::from_ref(&domain), &graph).unwrap();
    let actions = ground(bundle.domain(), &bundle.problem).unwrap();
    let init = initial_state(&bundle.problem);
    let goal = goal_formula(&bundle.problem).unwrap();
    c.bench_function("plan_fixtures", |b| {
        b.iter(|| search(black_box(&init), black_box(&goal), black_box(&actions)))
    });
}

criterion_group!(
    benches,
    bench_parse_pddls,
    bench_turtle_and_closure,
    bench_query,
    bench_resolve_and_plan
);
criterion_main!(benches);
