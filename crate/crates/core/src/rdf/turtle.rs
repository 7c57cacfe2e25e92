//! Turtle reader and writer for the subset used by the ontology fixtures:
//! `@prefix`/`@base`, `a`, `;`/`,` continuations, angle-bracket IRIs,
//! prefixed names, plain and triple-quoted string literals with language
//! tags or datatypes, integer and decimal literals, `[...]` blank nodes,
//! `(...)` collections, `_:label` blank nodes and `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{ns, RdfGraph, Term, Triple};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RdfError {
    #[error("turtle syntax error at {line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("unknown prefix `{prefix}:` at {line}:{col}")]
    UnknownPrefix { prefix: String, line: u32, col: u32 },
}

/// Parses Turtle text into a graph. Relative IRIs are resolved against
/// `base` (or a `@base` directive) by simple concatenation, which covers the
/// flat `uri:` namespaces used here.
pub fn parse_turtle(text: &str, base: Option<&str>) -> Result<RdfGraph, RdfError> {
    let mut p = TurtleParser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        base: base.map(|s| s.to_string()),
        prefixes: BTreeMap::new(),
        graph: RdfGraph::new(),
    };
    p.parse()?;
    for (pre, iri) in &p.prefixes {
        p.graph.set_prefix(pre.clone(), iri.clone());
    }
    Ok(p.graph)
}

struct TurtleParser {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    base: Option<String>,
    prefixes: BTreeMap<String, String>,
    graph: RdfGraph,
}

impl TurtleParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
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

    fn err(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax { line: self.line, col: self.col, message: message.into() }
    }

    fn skip_ws(&mut self) {
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
    }

    fn expect_char(&mut self, expected: char) -> Result<(), RdfError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected `{expected}`, found `{c}`"))),
            None => Err(self.err(format!("expected `{expected}`, found end of input"))),
        }
    }

    fn parse(&mut self) -> Result<(), RdfError> {
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(()),
                Some('@') => self.directive()?,
                Some(_) => {
                    let subject = self.subject()?;
                    self.predicate_object_list(&subject, '.')?;
                    self.expect_char('.')?;
                }
            }
        }
    }

    fn directive(&mut self) -> Result<(), RdfError> {
        self.bump(); // '@'
        let word = self.bare_word();
        match word.as_str() {
            "prefix" => {
                self.skip_ws();
                let name = self.bare_word();
                self.expect_char(':')?;
                self.skip_ws();
                let iri = self.iri_ref()?;
                self.prefixes.insert(name, iri);
                self.expect_char('.')?;
            }
            "base" => {
                self.skip_ws();
                let iri = self.iri_ref()?;
                self.base = Some(iri);
                self.expect_char('.')?;
            }
            other => return Err(self.err(format!("unknown directive `@{other}`"))),
        }
        Ok(())
    }

    fn bare_word(&mut self) -> String {
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        word
    }

    fn iri_ref(&mut self) -> Result<String, RdfError> {
        self.expect_char('<')?;
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\n') => return Err(self.err("newline inside IRI")),
                Some(c) => iri.push(c),
                None => return Err(self.err("unterminated IRI")),
            }
        }
        Ok(self.resolve(&iri))
    }

    fn resolve(&self, iri: &str) -> String {
        let absolute = iri
            .find(':')
            .map(|i| iri[..i].chars().all(|c| c.is_ascii_alphanumeric() || "+.-".contains(c)))
            .unwrap_or(false)
            && !iri.starts_with(':');
        if absolute {
            iri.to_string()
        } else {
            match &self.base {
                Some(base) => format!("{base}{iri}"),
                None => iri.to_string(),
            }
        }
    }

    fn prefixed_name(&mut self) -> Result<String, RdfError> {
        let (line, col) = (self.line, self.col);
        let prefix = self.bare_word();
        if self.peek() != Some(':') {
            return Err(RdfError::Syntax {
                line,
                col,
                message: format!("expected a prefixed name, found `{prefix}`"),
            });
        }
        self.bump();
        let local = self.bare_word();
        match self.prefixes.get(&prefix) {
            Some(iri) => Ok(format!("{iri}{local}")),
            None => Err(RdfError::UnknownPrefix { prefix, line, col }),
        }
    }

    fn subject(&mut self) -> Result<Term, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('[') => self.blank_node_property_list(),
            Some('(') => self.collection(),
            Some('_') if self.peek_at(1) == Some(':') => Ok(self.blank_label()),
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => Err(self.err("expected a subject")),
        }
    }

    fn blank_label(&mut self) -> Term {
        self.bump(); // '_'
        self.bump(); // ':'
        Term::Blank(self.bare_word())
    }

    fn predicate(&mut self) -> Result<String, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some(_) => {
                // `a` only when not the start of a prefixed name.
                if self.peek() == Some('a')
                    && self
                        .peek_at(1)
                        .map(|c| c.is_whitespace() || c == '<' || c == '[' || c == '(')
                        .unwrap_or(true)
                {
                    self.bump();
                    Ok(ns::RDF_TYPE.to_string())
                } else {
                    self.prefixed_name()
                }
            }
            None => Err(self.err("expected a predicate")),
        }
    }

    /// `pred obj (, obj)* (; pred obj ...)*` — a dangling `;` before the
    /// closing delimiter is accepted, as commonly written.
    fn predicate_object_list(&mut self, subject: &Term, end: char) -> Result<(), RdfError> {
        loop {
            self.skip_ws();
            if self.peek() == Some(end) {
                return Ok(());
            }
            let predicate = self.predicate()?;
            loop {
                let object = self.object()?;
                self.graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() == Some(';') {
                self.bump();
                continue;
            }
            return Ok(());
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('[') => self.blank_node_property_list(),
            Some('(') => self.collection(),
            Some('"') => self.string_literal(),
            Some('_') if self.peek_at(1) == Some(':') => Ok(self.blank_label()),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => self.number(),
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => Err(self.err("expected an object")),
        }
    }

    fn blank_node_property_list(&mut self) -> Result<Term, RdfError> {
        self.expect_char('[')?;
        let node = self.graph.fresh_blank();
        self.predicate_object_list(&node, ']')?;
        self.expect_char(']')?;
        Ok(node)
    }

    fn collection(&mut self) -> Result<Term, RdfError> {
        self.expect_char('(')?;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(')') {
                self.bump();
                break;
            }
            if self.peek().is_none() {
                return Err(self.err("unterminated collection"));
            }
            items.push(self.object()?);
        }
        let mut tail = Term::Iri(ns::RDF_NIL.to_string());
        for item in items.into_iter().rev() {
            let node = self.graph.fresh_blank();
            self.graph.insert(Triple::new(node.clone(), ns::RDF_FIRST, item));
            self.graph.insert(Triple::new(node.clone(), ns::RDF_REST, tail));
            tail = node;
        }
        Ok(tail)
    }

    fn string_literal(&mut self) -> Result<Term, RdfError> {
        let long = self.peek_at(1) == Some('"') && self.peek_at(2) == Some('"');
        let mut lexical = String::new();
        if long {
            self.bump();
            self.bump();
            self.bump();
            loop {
                if self.peek() == Some('"')
                    && self.peek_at(1) == Some('"')
                    && self.peek_at(2) == Some('"')
                {
                    self.bump();
                    self.bump();
                    self.bump();
                    break;
                }
                match self.bump() {
                    Some('\\') => lexical.push(self.escape()?),
                    Some(c) => lexical.push(c),
                    None => return Err(self.err("unterminated long string")),
                }
            }
        } else {
            self.bump();
            loop {
                match self.bump() {
                    Some('"') => break,
                    Some('\\') => lexical.push(self.escape()?),
                    Some('\n') => return Err(self.err("newline in short string")),
                    Some(c) => lexical.push(c),
                    None => return Err(self.err("unterminated string")),
                }
            }
        }

        match self.peek() {
            Some('@') => {
                self.bump();
                let tag = self.bare_word();
                if tag.is_empty() {
                    return Err(self.err("empty language tag"));
                }
                Ok(Term::lang_string(lexical, &tag))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.bump();
                self.bump();
                let dt = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::Literal { lexical, datatype: dt, lang: None })
            }
            _ => Ok(Term::string(lexical)),
        }
    }

    fn escape(&mut self) -> Result<char, RdfError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('"') => Ok('"'),
            Some('\\') => Ok('\\'),
            Some(c) => Err(self.err(format!("unsupported escape `\\{c}`"))),
            None => Err(self.err("dangling escape")),
        }
    }

    /// Integer or decimal. A trailing `.` is the statement terminator, not
    /// part of the number.
    fn number(&mut self) -> Result<Term, RdfError> {
        let mut s = String::new();
        if matches!(self.peek(), Some('+') | Some('-')) {
            s.push(self.bump().unwrap());
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        let mut decimal = false;
        if self.peek() == Some('.')
            && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit())
        {
            decimal = true;
            s.push(self.bump().unwrap());
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                s.push(self.bump().unwrap());
            }
        }
        if s.is_empty() || s == "+" || s == "-" {
            return Err(self.err("malformed numeric literal"));
        }
        Ok(if decimal { Term::decimal(s) } else { Term::integer(s) })
    }
}

/// Serializes a graph back to Turtle. Reparsing the output yields an equal
/// triple set.
pub fn serialize_turtle(g: &RdfGraph) -> String {
    let mut out = String::new();
    for (prefix, iri) in g.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{iri}> .");
    }
    if g.prefixes().next().is_some() && !g.is_empty() {
        out.push('\n');
    }

    let mut by_subject: BTreeMap<&Term, Vec<&Triple>> = BTreeMap::new();
    for t in g.iter() {
        by_subject.entry(&t.subject).or_default().push(t);
    }

    for (subject, triples) in by_subject {
        let _ = writeln!(out, "{}", render_term(g, subject));
        for (i, t) in triples.iter().enumerate() {
            let sep = if i + 1 == triples.len() { " ." } else { " ;" };
            let pred = if t.predicate == ns::RDF_TYPE {
                "a".to_string()
            } else {
                render_iri(g, &t.predicate)
            };
            let _ = writeln!(out, "  {pred} {}{sep}", render_term(g, &t.object));
        }
    }
    out
}

fn render_term(g: &RdfGraph, term: &Term) -> String {
    match term {
        Term::Iri(iri) => render_iri(g, iri),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, datatype, lang } => {
            if let Some(tag) = lang {
                format!("{}@{tag}", quote(lexical))
            } else if datatype == ns::XSD_STRING {
                quote(lexical)
            } else if (datatype == ns::XSD_INTEGER && is_integer_lexical(lexical))
                || (datatype == ns::XSD_DECIMAL && is_decimal_lexical(lexical))
            {
                lexical.clone()
            } else {
                format!("{}^^{}", quote(lexical), render_iri(g, datatype))
            }
        }
    }
}

// Bare numeric forms are used only when reparsing them recovers the same
// datatype; anything else goes out quoted with an explicit datatype.
fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    match body.split_once('.') {
        Some((int, frac)) => {
            int.bytes().all(|b| b.is_ascii_digit())
                && !frac.is_empty()
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

fn quote(s: &str) -> String {
    let escaped = s.replace('\\', "\\\\").replace('"', "\\\"");
    if s.contains('\n') {
        // Newlines stay raw inside the long form; quotes are escaped above.
        format!("\"\"\"{escaped}\"\"\"")
    } else {
        format!("\"{escaped}\"")
    }
}

fn render_iri(g: &RdfGraph, iri: &str) -> String {
    let mut best: Option<(&str, &str)> = None;
    for (prefix, ns_iri) in g.prefixes() {
        if let Some(local) = iri.strip_prefix(ns_iri) {
            let simple = !local.is_empty()
                && local.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-');
            if simple && best.map(|(_, l)| local.len() < l.len()).unwrap_or(true) {
                best = Some((prefix, local));
            }
        }
    }
    match best {
        Some((prefix, local)) => format!("{prefix}:{local}"),
        None => format!("<{iri}>"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OBJECTS: &str = r#"
@prefix ex_shapes: <uri:ex/shapes#> .
@prefix pddl: <uri:pddl#> .

<uri:ex/demo2/CylindricalHole_4>
    ex_shapes:size 3.0 ;  # xsd:decimal
    a ex_shapes:CylindricalHole .

<uri:ex/demo2/CylindricalPillar_1>
    ex_shapes:size 2.0 ;  # xsd:decimal
    a ex_shapes:CylindricalPillar .
"#;

    #[test]
    fn parses_object_descriptions() {
        let g = parse_turtle(OBJECTS, None).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.contains(&Triple::new(
            Term::iri("uri:ex/demo2/CylindricalHole_4"),
            "uri:ex/shapes#size",
            Term::decimal("3.0"),
        )));
        assert!(g.contains(&Triple::new(
            Term::iri("uri:ex/demo2/CylindricalPillar_1"),
            ns::RDF_TYPE,
            Term::iri("uri:ex/shapes#CylindricalPillar"),
        )));
    }

    #[test]
    fn empty_input_gives_empty_graph() {
        let g = parse_turtle("", None).unwrap();
        assert!(g.is_empty());
        let g = parse_turtle("# only a comment\n", None).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn base_resolution() {
        let g = parse_turtle(
            "@base <uri:ex/demo2/> . <CylindricalHole_4> a <uri:ex/shapes#Hole> .",
            None,
        )
        .unwrap();
        assert!(g.contains(&Triple::new(
            Term::iri("uri:ex/demo2/CylindricalHole_4"),
            ns::RDF_TYPE,
            Term::iri("uri:ex/shapes#Hole"),
        )));
    }

    #[test]
    fn language_tag_is_lowercased() {
        let g = parse_turtle(
            "@prefix ex: <uri:ex/> . ex:r ex:q \"SELECT\"@SPARQL .",
            None,
        )
        .unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(
            t.object,
            Term::lang_string("SELECT", "sparql")
        );
    }

    #[test]
    fn long_string_keeps_newlines() {
        let g = parse_turtle(
            "@prefix ex: <uri:ex/> . ex:r ex:q \"\"\"line1\nline2\"\"\"@sparql .",
            None,
        )
        .unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.object.lexical_form(), "line1\nline2");
    }

    #[test]
    fn unknown_prefix_is_reported() {
        let err = parse_turtle("nope:x a nope:Y .", None).unwrap_err();
        assert!(matches!(err, RdfError::UnknownPrefix { prefix, .. } if prefix == "nope"));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_turtle("@prefix ex: <uri:ex/> .\nex:a ex:b", None).unwrap_err();
        assert!(matches!(err, RdfError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn collections_become_lists() {
        let g = parse_turtle(
            "@prefix ex: <uri:ex/> . ex:s ex:path ( ex:a ex:b ) .",
            None,
        )
        .unwrap();
        let head = g
            .objects(&Term::iri("uri:ex/s"), "uri:ex/path")
            .next()
            .unwrap()
            .clone();
        assert_eq!(
            g.decode_list(&head),
            Some(vec![Term::iri("uri:ex/a"), Term::iri("uri:ex/b")])
        );
    }

    #[test]
    fn nested_blank_nodes() {
        let g = parse_turtle(
            "@prefix ex: <uri:ex/> . ex:s ex:p [ ex:q [ ex:r ex:o ; ] ; ] .",
            None,
        )
        .unwrap();
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn round_trip_objects() {
        let g = parse_turtle(OBJECTS, None).unwrap();
        let text = serialize_turtle(&g);
        let g2 = parse_turtle(&text, None).unwrap();
        let a: Vec<_> = g.iter().collect();
        let b: Vec<_> = g2.iter().collect();
        assert_eq!(a, b, "serialized:\n{text}");
    }

    #[test]
    fn round_trip_single_triple_is_one_statement() {
        let mut g = RdfGraph::new();
        g.add(Term::iri("uri:ex/a"), "uri:ex/p", Term::iri("uri:ex/b"));
        let text = serialize_turtle(&g);
        assert_eq!(text.lines().filter(|l| l.ends_with('.')).count(), 1, "{text}");
        let g2 = parse_turtle(&text, None).unwrap();
        assert_eq!(g.iter().collect::<Vec<_>>(), g2.iter().collect::<Vec<_>>());
    }

    #[test]
    fn empty_graph_serializes_to_nothing_but_prefixes() {
        let g = RdfGraph::new();
        assert_eq!(serialize_turtle(&g), "");
    }
}
