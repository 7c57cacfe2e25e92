//! The SPARQL fragment needed for constraint bodies: `SELECT DISTINCT` over
//! a basic graph pattern plus `FILTER` comparisons. Anything outside the
//! fragment (OPTIONAL, UNION, property paths, subqueries, solution
//! modifiers) is rejected up front.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::rdf::{RdfGraph, Term};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SparqlError {
    #[error("sparql syntax error at {line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("unsupported sparql feature `{0}`")]
    Unsupported(String),
    #[error("unknown prefix `{0}:`")]
    UnknownPrefix(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    fn holds(&self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        matches!(
            (self, ord),
            (CmpOp::Lt, Less)
                | (CmpOp::Le, Less)
                | (CmpOp::Le, Equal)
                | (CmpOp::Eq, Equal)
                | (CmpOp::Ne, Less)
                | (CmpOp::Ne, Greater)
                | (CmpOp::Ge, Greater)
                | (CmpOp::Ge, Equal)
                | (CmpOp::Gt, Greater)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatTerm {
    Var(String),
    Ground(Term),
}

impl PatTerm {
    fn is_ground(&self) -> bool {
        matches!(self, PatTerm::Ground(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatTerm,
    pub predicate: PatTerm,
    pub object: PatTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterRhs {
    Var(String),
    Const(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterCmp {
    pub lhs: String,
    pub op: CmpOp,
    pub rhs: FilterRhs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub prefixes: Vec<(String, String)>,
    pub projected: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<FilterCmp>,
}

/// Solutions as a deduplicated set of tuples, ordered per the projection
/// list and iterated in sorted order for reproducible output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultSet {
    pub vars: Vec<String>,
    rows: BTreeSet<Vec<Term>>,
}

impl ResultSet {
    pub fn rows(&self) -> impl Iterator<Item = &Vec<Term>> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: &[Term]) -> bool {
        self.rows.contains(row)
    }

    pub fn insert(&mut self, row: Vec<Term>) {
        self.rows.insert(row);
    }

    pub fn is_subset(&self, other: &ResultSet) -> bool {
        self.rows.is_subset(&other.rows)
    }

    /// Tab-separated rows, one binding per line, sorted.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut first = true;
            for term in row {
                if !first {
                    out.push('\t');
                }
                let _ = write!(out, "{term}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

const KEYWORDS_OUTSIDE_SUBSET: [&str; 16] = [
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "ORDER", "LIMIT",
    "OFFSET", "GROUP", "HAVING", "ASK", "CONSTRUCT", "DESCRIBE", "EXISTS",
];

/// Parses a query in the supported fragment.
pub fn parse_query(text: &str) -> Result<Query, SparqlError> {
    let mut lx = Lexer { chars: text.chars().collect(), pos: 0, line: 1, col: 1 };
    let mut q = Query {
        prefixes: Vec::new(),
        projected: Vec::new(),
        patterns: Vec::new(),
        filters: Vec::new(),
    };
    let mut prefix_map: BTreeMap<String, String> = BTreeMap::new();

    loop {
        let tok = lx.next_token()?;
        match tok {
            Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                let name = match lx.next_token()? {
                    Tok::Word(n) if n.ends_with(':') => n.trim_end_matches(':').to_string(),
                    other => return Err(lx.err(format!("expected prefix name, found {other:?}"))),
                };
                let iri = match lx.next_token()? {
                    Tok::Iri(i) => i,
                    other => return Err(lx.err(format!("expected IRI, found {other:?}"))),
                };
                prefix_map.insert(name.clone(), iri.clone());
                q.prefixes.push((name, iri));
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("select") => break,
            Tok::Word(w) if is_unsupported_keyword(&w) => {
                return Err(SparqlError::Unsupported(w.to_uppercase()));
            }
            other => return Err(lx.err(format!("expected PREFIX or SELECT, found {other:?}"))),
        }
    }

    // DISTINCT is the only supported (and implied) set semantics.
    let mut tok = lx.next_token()?;
    if matches!(&tok, Tok::Word(w) if w.eq_ignore_ascii_case("distinct")) {
        tok = lx.next_token()?;
    }
    loop {
        match tok {
            Tok::Var(v) => q.projected.push(v),
            Tok::Word(w) if w.eq_ignore_ascii_case("where") => break,
            Tok::Word(w) if w == "*" => return Err(SparqlError::Unsupported("SELECT *".into())),
            other => return Err(lx.err(format!("expected a variable or WHERE, found {other:?}"))),
        }
        tok = lx.next_token()?;
    }
    if q.projected.is_empty() {
        return Err(lx.err("no projected variables"));
    }

    match lx.next_token()? {
        Tok::Punct('{') => {}
        other => return Err(lx.err(format!("expected `{{`, found {other:?}"))),
    }

    loop {
        let tok = lx.next_token()?;
        match tok {
            Tok::Punct('}') => break,
            Tok::Punct('.') => continue,
            Tok::Punct('{') => return Err(SparqlError::Unsupported("subquery".into())),
            Tok::Word(w) if w.eq_ignore_ascii_case("filter") => {
                q.filters.push(parse_filter(&mut lx, &prefix_map)?);
            }
            Tok::Word(w) if is_unsupported_keyword(&w) => {
                return Err(SparqlError::Unsupported(w.to_uppercase()));
            }
            other => {
                let subject = pat_term(other, &mut lx, &prefix_map)?;
                let predicate = {
                    let t = lx.next_token()?;
                    if matches!(&t, Tok::Word(w) if w == "a") {
                        PatTerm::Ground(Term::iri(crate::rdf::ns::RDF_TYPE))
                    } else {
                        let p = pat_term(t, &mut lx, &prefix_map)?;
                        if let PatTerm::Ground(t) = &p {
                            if t.is_literal() {
                                return Err(lx.err("literal in predicate position"));
                            }
                        }
                        p
                    }
                };
                let object = {
                    let t = lx.next_token()?;
                    pat_term(t, &mut lx, &prefix_map)?
                };
                q.patterns.push(TriplePattern { subject, predicate, object });
            }
        }
    }

    match lx.next_token()? {
        Tok::Eof => {}
        Tok::Word(w) if is_unsupported_keyword(&w) => {
            return Err(SparqlError::Unsupported(w.to_uppercase()));
        }
        other => return Err(lx.err(format!("trailing content after `}}`: {other:?}"))),
    }

    let pattern_vars: BTreeSet<&String> = q
        .patterns
        .iter()
        .flat_map(|p| [&p.subject, &p.predicate, &p.object])
        .filter_map(|t| match t {
            PatTerm::Var(v) => Some(v),
            _ => None,
        })
        .collect();
    for v in &q.projected {
        if !pattern_vars.contains(v) {
            return Err(SparqlError::Syntax {
                line: 1,
                col: 1,
                message: format!("projected variable ?{v} does not occur in the pattern"),
            });
        }
    }
    for f in &q.filters {
        let mut vars = vec![&f.lhs];
        if let FilterRhs::Var(v) = &f.rhs {
            vars.push(v);
        }
        for v in vars {
            if !pattern_vars.contains(v) {
                return Err(SparqlError::Syntax {
                    line: 1,
                    col: 1,
                    message: format!("filter variable ?{v} does not occur in the pattern"),
                });
            }
        }
    }
    Ok(q)
}

fn is_unsupported_keyword(w: &str) -> bool {
    KEYWORDS_OUTSIDE_SUBSET.iter().any(|k| w.eq_ignore_ascii_case(k))
}

fn pat_term(
    tok: Tok,
    lx: &mut Lexer,
    prefixes: &BTreeMap<String, String>,
) -> Result<PatTerm, SparqlError> {
    match tok {
        Tok::Var(v) => Ok(PatTerm::Var(v)),
        Tok::Iri(i) => Ok(PatTerm::Ground(Term::iri(i))),
        Tok::Number { lexical, decimal } => Ok(PatTerm::Ground(if decimal {
            Term::decimal(lexical)
        } else {
            Term::integer(lexical)
        })),
        Tok::Str(s) => Ok(PatTerm::Ground(Term::string(s))),
        Tok::Word(w) => {
            if w.contains('/') || w.contains('|') || w.contains('^') || w.ends_with('*') {
                return Err(SparqlError::Unsupported(format!("property path `{w}`")));
            }
            match w.split_once(':') {
                Some((prefix, local)) => match prefixes.get(prefix) {
                    Some(iri) => Ok(PatTerm::Ground(Term::iri(format!("{iri}{local}")))),
                    None => Err(SparqlError::UnknownPrefix(prefix.to_string())),
                },
                None => Err(lx.err(format!("expected a term, found `{w}`"))),
            }
        }
        other => Err(lx.err(format!("expected a term, found {other:?}"))),
    }
}

fn parse_filter(
    lx: &mut Lexer,
    prefixes: &BTreeMap<String, String>,
) -> Result<FilterCmp, SparqlError> {
    match lx.next_token()? {
        Tok::Punct('(') => {}
        other => return Err(lx.err(format!("expected `(` after FILTER, found {other:?}"))),
    }
    let lhs = match lx.next_token()? {
        Tok::Var(v) => v,
        other => return Err(lx.err(format!("expected a variable in FILTER, found {other:?}"))),
    };
    let op = match lx.next_token()? {
        Tok::Word(w) => match w.as_str() {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" | "==" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            other => return Err(SparqlError::Unsupported(format!("filter operator `{other}`"))),
        },
        other => return Err(lx.err(format!("expected a comparison operator, found {other:?}"))),
    };
    let rhs = match lx.next_token()? {
        Tok::Var(v) => FilterRhs::Var(v),
        Tok::Number { lexical, decimal } => FilterRhs::Const(if decimal {
            Term::decimal(lexical)
        } else {
            Term::integer(lexical)
        }),
        Tok::Str(s) => FilterRhs::Const(Term::string(s)),
        Tok::Iri(i) => FilterRhs::Const(Term::iri(i)),
        Tok::Word(w) => match w.split_once(':') {
            Some((prefix, local)) => match prefixes.get(prefix) {
                Some(iri) => FilterRhs::Const(Term::iri(format!("{iri}{local}"))),
                None => return Err(SparqlError::UnknownPrefix(prefix.to_string())),
            },
            None => return Err(lx.err(format!("expected a value in FILTER, found `{w}`"))),
        },
        other => return Err(lx.err(format!("expected a value in FILTER, found {other:?}"))),
    };
    match lx.next_token()? {
        Tok::Punct(')') => {}
        other => return Err(lx.err(format!("expected `)` closing FILTER, found {other:?}"))),
    }
    Ok(FilterCmp { lhs, op, rhs })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Iri(String),
    Str(String),
    Number { lexical: String, decimal: bool },
    Punct(char),
    Eof,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer {
    fn err(&self, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax { line: self.line, col: self.col, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied();
        if let Some(c) = c {
            self.pos += 1;
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        c
    }

    fn next_token(&mut self) -> Result<Tok, SparqlError> {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let Some(c) = self.peek() else { return Ok(Tok::Eof) };

        match c {
            '{' | '}' | '(' | ')' => {
                self.bump();
                Ok(Tok::Punct(c))
            }
            '.' => {
                self.bump();
                Ok(Tok::Punct('.'))
            }
            '?' | '$' => {
                self.bump();
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    Err(self.err("empty variable name"))
                } else {
                    Ok(Tok::Var(name))
                }
            }
            '<' => {
                // Either an IRI or a comparison operator.
                if matches!(self.chars.get(self.pos + 1), Some(c) if c.is_whitespace() || *c == '=')
                {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Ok(Tok::Word("<=".into()))
                    } else {
                        Ok(Tok::Word("<".into()))
                    }
                } else {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) => iri.push(c),
                            None => return Err(self.err("unterminated IRI")),
                        }
                    }
                    Ok(Tok::Iri(iri))
                }
            }
            '>' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Ok(Tok::Word(">=".into()))
                } else {
                    Ok(Tok::Word(">".into()))
                }
            }
            '=' | '!' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Ok(Tok::Word(format!("{c}=")))
                } else if c == '=' {
                    Ok(Tok::Word("=".into()))
                } else {
                    Err(self.err("expected `!=`"))
                }
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            _ => return Err(self.err("unsupported escape in string")),
                        },
                        Some(c) => s.push(c),
                        None => return Err(self.err("unterminated string")),
                    }
                }
                Ok(Tok::Str(s))
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut s = String::new();
                if c == '-' || c == '+' {
                    s.push(self.bump().unwrap());
                }
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    s.push(self.bump().unwrap());
                }
                let mut decimal = false;
                if self.peek() == Some('.')
                    && matches!(self.chars.get(self.pos + 1), Some(c) if c.is_ascii_digit())
                {
                    decimal = true;
                    s.push(self.bump().unwrap());
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        s.push(self.bump().unwrap());
                    }
                }
                if s.is_empty() || s == "-" || s == "+" {
                    return Err(self.err("malformed number"));
                }
                Ok(Tok::Number { lexical: s, decimal })
            }
            _ => {
                let mut w = String::new();
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || "_-:/|^*".contains(c) {
                        w.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if w.is_empty() {
                    let c = self.peek().unwrap();
                    Err(self.err(format!("unexpected character `{c}`")))
                } else {
                    Ok(Tok::Word(w))
                }
            }
        }
    }
}

/// Evaluates the query over a graph: the set of assignments over terms of
/// the graph satisfying every triple pattern and every filter, projected and
/// deduplicated. A filter comparison that is not defined for the bound
/// values (say, ordering IRIs) drops the candidate row instead of failing
/// the whole query.
pub fn evaluate(q: &Query, g: &RdfGraph) -> ResultSet {
    let mut patterns: Vec<&TriplePattern> = q.patterns.iter().collect();
    // Most-selective-first: ground positions narrow the scan. Stable sort
    // keeps the query order among equals, so join order is deterministic.
    patterns.sort_by_key(|p| {
        let ground = [&p.subject, &p.predicate, &p.object]
            .iter()
            .filter(|t| t.is_ground())
            .count();
        std::cmp::Reverse(ground)
    });

    let mut bindings: Vec<BTreeMap<&str, Term>> = vec![BTreeMap::new()];
    for pat in patterns {
        let mut next: Vec<BTreeMap<&str, Term>> = Vec::new();
        for binding in &bindings {
            for triple in g.iter() {
                let mut candidate = binding.clone();
                if unify(&pat.subject, &triple.subject, &mut candidate)
                    && unify(&pat.predicate, &Term::Iri(triple.predicate.clone()), &mut candidate)
                    && unify(&pat.object, &triple.object, &mut candidate)
                {
                    next.push(candidate);
                }
            }
        }
        bindings = next;
        if bindings.is_empty() {
            break;
        }
    }

    let mut result = ResultSet { vars: q.projected.clone(), rows: BTreeSet::new() };
    'outer: for binding in bindings {
        for f in &q.filters {
            let lhs = binding.get(f.lhs.as_str());
            let rhs = match &f.rhs {
                FilterRhs::Var(v) => binding.get(v.as_str()),
                FilterRhs::Const(t) => Some(t),
            };
            match (lhs, rhs) {
                (Some(a), Some(b)) => match compare_terms(a, b, f.op) {
                    Some(true) => {}
                    // Comparison failed or was a type error: skip the row.
                    Some(false) | None => continue 'outer,
                },
                _ => continue 'outer,
            }
        }
        let row: Vec<Term> = q
            .projected
            .iter()
            .map(|v| binding.get(v.as_str()).cloned().expect("projected vars occur in bgp"))
            .collect();
        result.rows.insert(row);
    }
    result
}

fn unify<'a>(pat: &'a PatTerm, term: &Term, binding: &mut BTreeMap<&'a str, Term>) -> bool {
    match pat {
        PatTerm::Ground(t) => t == term,
        PatTerm::Var(v) => match binding.get(v.as_str()) {
            Some(bound) => bound == term,
            None => {
                binding.insert(v, term.clone());
                true
            }
        },
    }
}

/// `None` is a type error (error-as-false semantics at the caller). Numeric
/// literals compare by exact decimal value, with xsd:integer promoted to
/// xsd:decimal; order operators are otherwise only defined on plain strings.
pub fn compare_terms(a: &Term, b: &Term, op: CmpOp) -> Option<bool> {
    if let (Some(da), Some(db)) = (a.numeric(), b.numeric()) {
        return Some(op.holds(da.cmp(&db)));
    }
    match op {
        CmpOp::Eq | CmpOp::Ne => {
            let same_kind = matches!(
                (a, b),
                (Term::Iri(_), Term::Iri(_))
                    | (Term::Literal { .. }, Term::Literal { .. })
                    | (Term::Blank(_), Term::Blank(_))
            );
            if !same_kind {
                return None;
            }
            // Numeric pairs were handled above; numeric vs non-numeric
            // literal is a type error.
            if matches!(a, Term::Literal { .. }) && (a.numeric().is_some() != b.numeric().is_some())
            {
                return None;
            }
            let eq = a == b;
            Some(if op == CmpOp::Eq { eq } else { !eq })
        }
        _ => match (a, b) {
            (
                Term::Literal { lexical: la, datatype: da, lang: None },
                Term::Literal { lexical: lb, datatype: db, lang: None },
            ) if da == crate::rdf::ns::XSD_STRING && db == crate::rdf::ns::XSD_STRING => {
                Some(op.holds(la.cmp(lb)))
            }
            _ => None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const INSERTABLE_QUERY: &str = r#"PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX ex_shapes: <uri:ex/shapes#>
SELECT DISTINCT ?pillar ?hole
WHERE {
 ?pillar a ?pillar_type .
 ?pillar_type rdfs:subClassOf ex_shapes:Pillar .
 ?pillar ex_shapes:size ?pillar_size .
 ?pillar_type ex_shapes:sectionShape ?section_shape .
 ?hole a ?hole_type .
 ?hole_type rdfs:subClassOf ex_shapes:Hole .
 ?hole ex_shapes:size ?hole_size .
 ?hole_type ex_shapes:sectionShape ?section_shape .
 FILTER (?hole_size >= ?pillar_size)
}"#;

    #[test]
    fn parses_the_insertable_query() {
        let q = parse_query(INSERTABLE_QUERY).unwrap();
        assert_eq!(q.projected, vec!["pillar", "hole"]);
        assert_eq!(q.patterns.len(), 8);
        assert_eq!(q.filters.len(), 1);
        assert_eq!(q.filters[0].op, CmpOp::Ge);
    }

    #[test]
    fn parses_single_pattern_query() {
        let q = parse_query("SELECT DISTINCT ?x WHERE { ?x a <uri:C> }").unwrap();
        assert_eq!(q.projected, vec!["x"]);
        assert_eq!(q.patterns.len(), 1);
        assert!(q.filters.is_empty());
    }

    #[test]
    fn optional_is_unsupported() {
        let err = parse_query(
            "SELECT DISTINCT ?x WHERE { ?x a <uri:C> OPTIONAL { ?x <uri:p> ?y } }",
        )
        .unwrap_err();
        assert_eq!(err, SparqlError::Unsupported("OPTIONAL".into()));
    }

    #[test]
    fn order_by_is_unsupported() {
        let err =
            parse_query("SELECT DISTINCT ?x WHERE { ?x a <uri:C> } ORDER BY ?x").unwrap_err();
        assert!(matches!(err, SparqlError::Unsupported(k) if k == "ORDER"));
    }

    #[test]
    fn property_path_is_unsupported() {
        let err = parse_query(
            "PREFIX ex: <uri:ex/> SELECT DISTINCT ?x WHERE { ?x ex:a/ex:b ?y . ?y a ex:C }",
        )
        .unwrap_err();
        assert!(matches!(err, SparqlError::Unsupported(k) if k.contains("property path")));
    }

    #[test]
    fn unprojected_variable_rejected() {
        let err = parse_query("SELECT DISTINCT ?y WHERE { ?x a <uri:C> }").unwrap_err();
        assert!(matches!(err, SparqlError::Syntax { message, .. } if message.contains("?y")));
    }

    #[test]
    fn evaluation_over_empty_graph_is_empty() {
        let q = parse_query(INSERTABLE_QUERY).unwrap();
        let g = RdfGraph::new();
        assert!(evaluate(&q, &g).is_empty());
    }

    #[test]
    fn repeated_variable_joins() {
        let mut g = RdfGraph::new();
        g.add(Term::iri("uri:a"), "uri:p", Term::iri("uri:b"));
        g.add(Term::iri("uri:b"), "uri:p", Term::iri("uri:c"));
        let q = parse_query(
            "SELECT DISTINCT ?x ?z WHERE { ?x <uri:p> ?y . ?y <uri:p> ?z }",
        )
        .unwrap();
        let rs = evaluate(&q, &g);
        assert_eq!(rs.len(), 1);
        assert!(rs.contains(&[Term::iri("uri:a"), Term::iri("uri:c")]));
    }

    #[test]
    fn filter_type_error_skips_binding() {
        let mut g = RdfGraph::new();
        g.add(Term::iri("uri:a"), "uri:size", Term::decimal("2.0"));
        g.add(Term::iri("uri:b"), "uri:size", Term::iri("uri:odd"));
        let q = parse_query(
            "SELECT DISTINCT ?x WHERE { ?x <uri:size> ?s . FILTER (?s >= 1.0) }",
        )
        .unwrap();
        let rs = evaluate(&q, &g);
        assert_eq!(rs.len(), 1);
        assert!(rs.contains(&[Term::iri("uri:a")]));
    }

    #[test]
    fn integer_promotes_to_decimal() {
        let mut g = RdfGraph::new();
        g.add(Term::iri("uri:a"), "uri:size", Term::integer("2"));
        let q = parse_query(
            "SELECT DISTINCT ?x WHERE { ?x <uri:size> ?s . FILTER (?s = 2.0) }",
        )
        .unwrap();
        assert_eq!(evaluate(&q, &g).len(), 1);
    }

    #[test]
    fn distinct_deduplicates() {
        let mut g = RdfGraph::new();
        g.add(Term::iri("uri:a"), "uri:p", Term::iri("uri:b"));
        g.add(Term::iri("uri:a"), "uri:q", Term::iri("uri:c"));
        let q = parse_query("SELECT DISTINCT ?x WHERE { ?x ?p ?o }").unwrap();
        assert_eq!(evaluate(&q, &g).len(), 1);
    }
}
