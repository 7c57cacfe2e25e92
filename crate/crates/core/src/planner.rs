//! Grounding and forward search for plain STRIPS with negative
//! preconditions and goals, under the closed-world assumption. Breadth-first
//! search returns a shortest plan; expansion order is lexicographic over
//! `(name, args)` so returned plans are reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, PddlsDocument, Symbol, TypedSymbol};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PlannerError {
    #[error("unsupported requirement `{0}`: only :strips, :typing and the negation slice of :adl are handled")]
    UnsupportedFeature(String),
    #[error("variable `{variable}` in action `{action}` is not bound by :parameters")]
    UnboundVariable { action: String, variable: String },
    #[error("goal or init is not ground: found variable `{0}`")]
    Ungrounded(String),
    #[error("predicate `{0}` is not declared in the domain")]
    UnknownPredicate(String),
    #[error("predicate `{name}` used with {used} arguments, declared with {declared}")]
    ArityMismatch { name: String, used: usize, declared: usize },
    #[error("object `{0}` is not declared")]
    UnknownObject(String),
    #[error("expected a precondition/effect in the literal-conjunction fragment: {0}")]
    BadFormula(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub name: Symbol,
    pub args: Vec<Symbol>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A state is the set of atoms currently true; everything else is false.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct State {
    atoms: BTreeSet<GroundAtom>,
}

impl State {
    pub fn from_atoms(atoms: impl IntoIterator<Item = GroundAtom>) -> State {
        State { atoms: atoms.into_iter().collect() }
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: Symbol,
    pub args: Vec<Symbol>,
    pub pre_pos: BTreeSet<GroundAtom>,
    pub pre_neg: BTreeSet<GroundAtom>,
    pub add: BTreeSet<GroundAtom>,
    pub del: BTreeSet<GroundAtom>,
}

impl GroundAction {
    pub fn applicable(&self, state: &State) -> bool {
        self.pre_pos.iter().all(|a| state.contains(a))
            && self.pre_neg.iter().all(|a| !state.contains(a))
    }

    pub fn apply(&self, state: &State) -> State {
        let mut atoms = state.atoms.clone();
        for d in &self.del {
            atoms.remove(d);
        }
        for a in &self.add {
            atoms.insert(a.clone());
        }
        State { atoms }
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One `(name arg1 arg2)` line per step.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&step.to_string());
            out.push('\n');
        }
        out
    }
}

const SUPPORTED_REQUIREMENTS: [&str; 5] =
    [":strips", ":typing", ":adl", ":semantics", ":negative-preconditions"];

fn check_requirements(domain: &PddlsDocument) -> Result<(), PlannerError> {
    for r in &domain.requirements {
        if !SUPPORTED_REQUIREMENTS.iter().any(|s| r.eq_ignore_ascii_case(s)) {
            return Err(PlannerError::UnsupportedFeature(r.clone()));
        }
    }
    if !domain.extras.is_empty() {
        let head = match &domain.extras[0] {
            crate::syntax::Sexpr::List(items) => items
                .first()
                .map(|s| s.to_string())
                .unwrap_or_else(|| ":functions".into()),
            crate::syntax::Sexpr::Sym(s) => s.clone(),
        };
        return Err(PlannerError::UnsupportedFeature(head));
    }
    Ok(())
}

/// Instantiates every action over the declared objects (and domain
/// constants), respecting parameter types when present. The result is
/// sorted by `(name, args)`.
pub fn ground(
    domain: &PddlsDocument,
    problem: &PddlsDocument,
) -> Result<Vec<GroundAction>, PlannerError> {
    check_requirements(domain)?;
    let objects = all_objects(domain, problem);
    let type_parents = type_table(domain);

    let mut out = Vec::new();
    for action in &domain.actions {
        let params: BTreeSet<&Symbol> = action.parameters.iter().map(|p| &p.name).collect();
        for formula in [&action.precondition, &action.effect] {
            for (_, args) in formula.atoms() {
                for arg in args {
                    if arg.is_variable() && !params.contains(arg) {
                        return Err(PlannerError::UnboundVariable {
                            action: action.name.to_string(),
                            variable: arg.to_string(),
                        });
                    }
                }
            }
        }

        let candidates: Vec<Vec<&Symbol>> = action
            .parameters
            .iter()
            .map(|p| {
                objects
                    .iter()
                    .filter(|o| type_matches(&type_parents, o.ty.as_ref(), p.ty.as_ref()))
                    .map(|o| &o.name)
                    .collect()
            })
            .collect();

        let mut tuple: Vec<&Symbol> = Vec::with_capacity(candidates.len());
        instantiate(action, &candidates, &mut tuple, &mut out)?;
    }
    out.sort_by(|a, b| (&a.name, &a.args).cmp(&(&b.name, &b.args)));
    Ok(out)
}

fn all_objects(domain: &PddlsDocument, problem: &PddlsDocument) -> Vec<TypedSymbol> {
    let mut out = domain.constants.clone();
    out.extend(problem.objects.iter().cloned());
    out
}

fn type_table(domain: &PddlsDocument) -> BTreeMap<Symbol, Symbol> {
    domain
        .types
        .iter()
        .filter_map(|t| t.ty.as_ref().map(|parent| (t.name.clone(), parent.clone())))
        .collect()
}

fn type_matches(
    parents: &BTreeMap<Symbol, Symbol>,
    object_ty: Option<&Symbol>,
    param_ty: Option<&Symbol>,
) -> bool {
    let Some(wanted) = param_ty else { return true };
    if wanted == &Symbol::new("object") {
        return true;
    }
    let mut current = object_ty.cloned();
    while let Some(ty) = current {
        if &ty == wanted {
            return true;
        }
        current = parents.get(&ty).cloned();
    }
    false
}

fn instantiate<'a>(
    action: &crate::syntax::ActionDef,
    candidates: &[Vec<&'a Symbol>],
    tuple: &mut Vec<&'a Symbol>,
    out: &mut Vec<GroundAction>,
) -> Result<(), PlannerError> {
    if tuple.len() == candidates.len() {
        let subst: BTreeMap<&Symbol, &Symbol> = action
            .parameters
            .iter()
            .map(|p| &p.name)
            .zip(tuple.iter().copied())
            .collect();
        let bind = |s: &Symbol| -> Symbol {
            subst.get(s).copied().cloned().unwrap_or_else(|| s.clone())
        };

        let mut pre_pos = BTreeSet::new();
        let mut pre_neg = BTreeSet::new();
        for lit in action
            .precondition
            .literals()
            .map_err(PlannerError::BadFormula)?
        {
            let atom =
                GroundAtom { name: lit.name.clone(), args: lit.args.iter().map(&bind).collect() };
            if lit.negated {
                pre_neg.insert(atom);
            } else {
                pre_pos.insert(atom);
            }
        }
        let mut add = BTreeSet::new();
        let mut del = BTreeSet::new();
        for lit in action.effect.literals().map_err(PlannerError::BadFormula)? {
            let atom =
                GroundAtom { name: lit.name.clone(), args: lit.args.iter().map(&bind).collect() };
            if lit.negated {
                del.insert(atom);
            } else {
                add.insert(atom);
            }
        }
        // Add wins over delete on the same atom.
        del = del.difference(&add).cloned().collect();

        out.push(GroundAction {
            name: action.name.clone(),
            args: tuple.iter().map(|s| (*s).clone()).collect(),
            pre_pos,
            pre_neg,
            add,
            del,
        });
        return Ok(());
    }
    for candidate in &candidates[tuple.len()] {
        tuple.push(candidate);
        instantiate(action, candidates, tuple, out)?;
        tuple.pop();
    }
    Ok(())
}

/// The closed-world initial state: positive `:init` literals. Negated init
/// literals only restate the default and are dropped.
pub fn initial_state(problem: &PddlsDocument) -> State {
    State::from_atoms(problem.init.iter().filter(|l| !l.negated).map(|l| GroundAtom {
        name: l.name.clone(),
        args: l.args.clone(),
    }))
}

/// The problem goal, checked to be ground.
pub fn goal_formula(problem: &PddlsDocument) -> Result<Formula, PlannerError> {
    let goal = problem.goal.clone().unwrap_or(Formula::And(Vec::new()));
    for (_, args) in goal.atoms() {
        for arg in args {
            if arg.is_variable() {
                return Err(PlannerError::Ungrounded(arg.to_string()));
            }
        }
    }
    Ok(goal)
}

pub fn goal_holds(goal: &Formula, state: &State) -> bool {
    match goal {
        Formula::Atom { name, args } => {
            state.contains(&GroundAtom { name: name.clone(), args: args.clone() })
        }
        Formula::Not(inner) => !goal_holds(inner, state),
        Formula::And(parts) => parts.iter().all(|p| goal_holds(p, state)),
    }
}

/// Breadth-first search for a shortest plan. `None` means the reachable
/// state space was exhausted without satisfying the goal.
pub fn search(init: &State, goal: &Formula, actions: &[GroundAction]) -> Option<Plan> {
    let mut order: Vec<usize> = (0..actions.len()).collect();
    order.sort_by(|&i, &j| {
        (&actions[i].name, &actions[i].args).cmp(&(&actions[j].name, &actions[j].args))
    });

    if goal_holds(goal, init) {
        return Some(Plan::default());
    }

    let mut nodes: Vec<(State, Option<(usize, usize)>)> = vec![(init.clone(), None)];
    let mut visited: HashMap<State, ()> = HashMap::new();
    visited.insert(init.clone(), ());
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);

    while let Some(node_idx) = queue.pop_front() {
        let state = nodes[node_idx].0.clone();
        for &action_idx in &order {
            let action = &actions[action_idx];
            if !action.applicable(&state) {
                continue;
            }
            let next = action.apply(&state);
            if visited.contains_key(&next) {
                continue;
            }
            let next_idx = nodes.len();
            nodes.push((next.clone(), Some((node_idx, action_idx))));
            if goal_holds(goal, &next) {
                let mut steps = Vec::new();
                let mut cursor = next_idx;
                while let Some((parent, act)) = nodes[cursor].1 {
                    steps.push(actions[act].clone());
                    cursor = parent;
                }
                steps.reverse();
                return Some(Plan { steps });
            }
            visited.insert(next, ());
            queue.push_back(next_idx);
        }
    }
    None
}

/// Simulates the plan from `init`; true iff every step is applicable in
/// sequence and the goal holds in the final state.
pub fn validate_plan(init: &State, goal: &Formula, plan: &Plan) -> bool {
    let mut state = init.clone();
    for step in &plan.steps {
        if !step.applicable(&state) {
            return false;
        }
        state = step.apply(&state);
    }
    goal_holds(goal, &state)
}

/// Ground, then search: the whole planning call for already-plain documents.
pub fn solve(
    domain: &PddlsDocument,
    problem: &PddlsDocument,
) -> Result<Option<Plan>, PlannerError> {
    let actions = ground(domain, problem)?;
    let init = initial_state(problem);
    let goal = goal_formula(problem)?;
    Ok(search(&init, &goal, &actions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_document;

    const DOMAIN: &str = include_str!("../../../fixtures/example-ur5-domain.pddls");
    const PROBLEM: &str = include_str!("../../../fixtures/example-problem.pddls");

    fn atom(name: &str, args: &[&str]) -> GroundAtom {
        GroundAtom { name: Symbol::new(name), args: args.iter().map(|a| Symbol::new(*a)).collect() }
    }

    fn docs() -> (PddlsDocument, PddlsDocument) {
        (parse_document(DOMAIN).unwrap(), parse_document(PROBLEM).unwrap())
    }

    #[test]
    fn grounding_is_the_full_cartesian_product() {
        let (domain, problem) = docs();
        let actions = ground(&domain, &problem).unwrap();
        assert_eq!(actions.len(), 9); // 3 objects x 2 untyped parameters
        assert!(actions.windows(2).all(|w| (&w[0].name, &w[0].args) <= (&w[1].name, &w[1].args)));
    }

    #[test]
    fn domain_without_actions_grounds_to_nothing() {
        let domain = parse_document("(define (domain d))").unwrap();
        let problem =
            parse_document("(define (problem p) (:domain d) (:objects a b))").unwrap();
        assert!(ground(&domain, &problem).unwrap().is_empty());
    }

    #[test]
    fn empty_type_extension_grounds_to_nothing() {
        let domain = parse_document(
            "(define (domain d) (:requirements :typing) (:types widget) \
             (:predicates (p ?x - widget)) \
             (:action a :parameters (?x - widget) :precondition (p ?x) :effect (not (p ?x))))",
        )
        .unwrap();
        let problem = parse_document("(define (problem p) (:domain d) (:objects o))").unwrap();
        assert!(ground(&domain, &problem).unwrap().is_empty());
    }

    #[test]
    fn unbound_variable_is_a_grounding_error() {
        let domain = parse_document(
            "(define (domain d) (:predicates (p ?x)) \
             (:action a :parameters (?x) :precondition (p ?piller) :effect (not (p ?x))))",
        )
        .unwrap();
        let problem = parse_document("(define (problem p) (:domain d) (:objects o))").unwrap();
        let err = ground(&domain, &problem).unwrap_err();
        assert_eq!(
            err,
            PlannerError::UnboundVariable { action: "a".into(), variable: "?piller".into() }
        );
    }

    #[test]
    fn unsupported_requirement_rejected() {
        let domain = parse_document(
            "(define (domain d) (:requirements :strips :durative-actions))",
        )
        .unwrap();
        let problem = parse_document("(define (problem p) (:domain d))").unwrap();
        let err = ground(&domain, &problem).unwrap_err();
        assert_eq!(err, PlannerError::UnsupportedFeature(":durative-actions".into()));
    }

    #[test]
    fn solves_the_motivating_instance_with_the_derived_fact() {
        let (domain, mut problem) = docs();
        problem.init.push(crate::syntax::Literal {
            negated: false,
            name: Symbol::new("insertable"),
            args: vec![Symbol::new("CylindricalPillar_1"), Symbol::new("CylindricalHole_4")],
        });
        let plan = solve(&domain, &problem).unwrap().expect("plan exists");
        assert_eq!(plan.len(), 1);
        assert_eq!(
            plan.render(),
            "(pick-n-insert CylindricalPillar_1 CylindricalHole_4)\n"
        );
        let actions = ground(&domain, &problem).unwrap();
        assert!(validate_plan(&initial_state(&problem), &goal_formula(&problem).unwrap(), &plan));
        assert_eq!(actions.len(), 9);
    }

    #[test]
    fn no_plan_without_the_derived_fact() {
        let (domain, problem) = docs();
        assert_eq!(solve(&domain, &problem).unwrap(), None);
    }

    #[test]
    fn trivially_satisfied_goal_gives_empty_plan() {
        let (domain, mut problem) = docs();
        problem.goal = Some(Formula::atom(
            "available",
            vec![Symbol::new("CylindricalHole_4")],
        ));
        let plan = solve(&domain, &problem).unwrap().expect("empty plan");
        assert!(plan.is_empty());
        assert!(validate_plan(
            &initial_state(&problem),
            &goal_formula(&problem).unwrap(),
            &plan
        ));
    }

    #[test]
    fn inapplicable_step_fails_validation() {
        let (domain, problem) = docs();
        let actions = ground(&domain, &problem).unwrap();
        let bad = actions
            .iter()
            .find(|a| a.args == vec![Symbol::new("CylindricalPillar_1"), Symbol::new("CylindricalHole_4")])
            .unwrap()
            .clone();
        // insertable(CP1, CH4) is missing from init, so the step cannot fire.
        let plan = Plan { steps: vec![bad] };
        assert!(!validate_plan(
            &initial_state(&problem),
            &goal_formula(&problem).unwrap(),
            &plan
        ));
    }

    #[test]
    fn frame_property_untouched_atoms_survive() {
        let (domain, mut problem) = docs();
        problem.init.push(crate::syntax::Literal {
            negated: false,
            name: Symbol::new("insertable"),
            args: vec![Symbol::new("CylindricalPillar_1"), Symbol::new("CylindricalHole_4")],
        });
        let actions = ground(&domain, &problem).unwrap();
        let step = actions
            .iter()
            .find(|a| {
                a.args == vec![Symbol::new("CylindricalPillar_1"), Symbol::new("CylindricalHole_4")]
            })
            .unwrap();
        let init = initial_state(&problem);
        let next = step.apply(&init);
        assert!(next.contains(&atom("available", &["TriangularPillar_2"])));
        assert!(next.contains(&atom("insertable", &["CylindricalPillar_1", "CylindricalHole_4"])));
        assert!(!next.contains(&atom("available", &["CylindricalHole_4"])));
    }

    #[test]
    fn fills_every_hole_with_a_two_step_plan() {
        let (domain, mut problem) = docs();
        problem.objects.push(crate::syntax::TypedSymbol::untyped("TriangularHole_5"));
        for (name, args) in [
            ("available", vec!["TriangularHole_5"]),
            ("insertable", vec!["CylindricalPillar_1", "CylindricalHole_4"]),
            ("insertable", vec!["TriangularPillar_2", "TriangularHole_5"]),
        ] {
            problem.init.push(crate::syntax::Literal {
                negated: false,
                name: Symbol::new(name),
                args: args.into_iter().map(Symbol::new).collect(),
            });
        }
        problem.goal = Some(Formula::And(vec![
            Formula::Not(Box::new(Formula::atom(
                "available",
                vec![Symbol::new("CylindricalHole_4")],
            ))),
            Formula::Not(Box::new(Formula::atom(
                "available",
                vec![Symbol::new("TriangularHole_5")],
            ))),
        ]));

        let plan = solve(&domain, &problem).unwrap().expect("plan exists");
        assert_eq!(plan.len(), 2);
        assert_eq!(
            plan.render(),
            "(pick-n-insert CylindricalPillar_1 CylindricalHole_4)\n\
             (pick-n-insert TriangularPillar_2 TriangularHole_5)\n"
        );
        assert!(validate_plan(&initial_state(&problem), &goal_formula(&problem).unwrap(), &plan));
    }

    #[test]
    fn typed_grounding_respects_hierarchy() {
        let domain = parse_document(
            "(define (domain d) (:requirements :typing) \
             (:types cup - vessel bowl - vessel) \
             (:predicates (clean ?v - vessel)) \
             (:action wash :parameters (?v - vessel) :precondition (and) :effect (clean ?v)))",
        )
        .unwrap();
        let problem = parse_document(
            "(define (problem p) (:domain d) (:objects c1 - cup b1 - bowl rock))",
        )
        .unwrap();
        let actions = ground(&domain, &problem).unwrap();
        // The untyped rock does not match ?v - vessel.
        assert_eq!(actions.len(), 2);
    }
}
