use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::context::ContextMap;

/// A PDDL symbol. Case-preserving, but two symbols are the same symbol when
/// they agree up to ASCII case (standard PDDL convention). IRIs are never
/// `Symbol`s; they stay case-sensitive strings.
#[derive(Clone)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(s: impl Into<String>) -> Self {
        Symbol(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_variable(&self) -> bool {
        self.0.starts_with('?')
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.0.eq_ignore_ascii_case(&other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for b in self.0.bytes() {
            b.to_ascii_lowercase().hash(state);
        }
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.0.bytes().map(|b| b.to_ascii_lowercase());
        let b = other.0.bytes().map(|b| b.to_ascii_lowercase());
        a.cmp(b)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    Domain,
    Problem,
}

/// A symbol with an optional type annotation, as written `name - type`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedSymbol {
    pub name: Symbol,
    pub ty: Option<Symbol>,
}

impl TypedSymbol {
    pub fn untyped(name: impl Into<Symbol>) -> Self {
        TypedSymbol { name: name.into(), ty: None }
    }

    pub fn typed(name: impl Into<Symbol>, ty: impl Into<Symbol>) -> Self {
        TypedSymbol { name: name.into(), ty: Some(ty.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: Symbol,
    pub params: Vec<TypedSymbol>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Formula over the supported subset: atoms, negation of atoms, conjunction.
/// After parsing, `Not` only ever wraps `Atom` (double negations are removed,
/// negated conjunctions are rejected).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom { name: Symbol, args: Vec<Symbol> },
    Not(Box<Formula>),
    And(Vec<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<Symbol>, args: Vec<Symbol>) -> Self {
        Formula::Atom { name: name.into(), args }
    }

    /// Flattens the formula into literals. Errors with the offending shape
    /// when the formula is not a conjunction of literals.
    pub fn literals(&self) -> Result<Vec<Literal>, String> {
        match self {
            Formula::Atom { name, args } => Ok(vec![Literal {
                negated: false,
                name: name.clone(),
                args: args.clone(),
            }]),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom { name, args } => Ok(vec![Literal {
                    negated: true,
                    name: name.clone(),
                    args: args.clone(),
                }]),
                other => Err(format!("negation of non-atom: {:?}", other)),
            },
            Formula::And(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.literals()?);
                }
                Ok(out)
            }
        }
    }

    /// Every atom in the formula, with polarity ignored.
    pub fn atoms(&self) -> Vec<(&Symbol, &Vec<Symbol>)> {
        let mut out = Vec::new();
        self.walk_atoms(&mut out);
        out
    }

    fn walk_atoms<'a>(&'a self, out: &mut Vec<(&'a Symbol, &'a Vec<Symbol>)>) {
        match self {
            Formula::Atom { name, args } => out.push((name, args)),
            Formula::Not(inner) => inner.walk_atoms(out),
            Formula::And(parts) => {
                for p in parts {
                    p.walk_atoms(out);
                }
            }
        }
    }
}

/// A positive or negated ground-or-schematic atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub negated: bool,
    pub name: Symbol,
    pub args: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDef {
    pub name: Symbol,
    pub parameters: Vec<TypedSymbol>,
    pub precondition: Formula,
    pub effect: Formula,
}

/// A raw s-expression, used to carry sections we parse but do not interpret
/// (`:functions`, `:constraints`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexpr {
    Sym(String),
    List(Vec<Sexpr>),
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Sym(s) => f.write_str(s),
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", item)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// AST of one PDDLS domain or problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PddlsDocument {
    pub kind: DocumentKind,
    pub name: Symbol,
    pub requirements: Vec<String>,
    /// Inline term-to-IRI bindings. Empty when absent or when the document
    /// uses the remote form (see `context_ref`).
    pub context: ContextMap,
    /// The `(:context <URI>)` remote form, resolved later against a local
    /// context directory, never over the network.
    pub context_ref: Option<String>,
    pub types: Vec<TypedSymbol>,
    pub constants: Vec<TypedSymbol>,
    pub objects: Vec<TypedSymbol>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionDef>,
    pub init: Vec<Literal>,
    pub goal: Option<Formula>,
    pub domain_ref: Option<Symbol>,
    /// Sections preserved as opaque s-expressions (`:functions`, `:constraints`).
    pub extras: Vec<Sexpr>,
}

impl PddlsDocument {
    pub fn new(kind: DocumentKind, name: impl Into<Symbol>) -> Self {
        PddlsDocument {
            kind,
            name: name.into(),
            requirements: Vec::new(),
            context: ContextMap::default(),
            context_ref: None,
            types: Vec::new(),
            constants: Vec::new(),
            objects: Vec::new(),
            predicates: Vec::new(),
            actions: Vec::new(),
            init: Vec::new(),
            goal: None,
            domain_ref: None,
            extras: Vec::new(),
        }
    }

    pub fn is_domain(&self) -> bool {
        self.kind == DocumentKind::Domain
    }

    pub fn predicate(&self, name: &Symbol) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| &p.name == name)
    }

    /// Document equality up to the `:semantics` requirement key, which a
    /// nonempty context implies.
    pub fn eq_modulo_semantics(&self, other: &PddlsDocument) -> bool {
        let strip = |d: &PddlsDocument| {
            let mut c = d.clone();
            c.requirements.retain(|r| !r.eq_ignore_ascii_case(":semantics"));
            c
        };
        strip(self) == strip(other)
    }
}
