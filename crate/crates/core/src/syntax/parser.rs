use std::collections::BTreeSet;

use crate::context::ContextMap;

use super::ast::*;
use super::lexer::{tokenize, SyntaxError, Token, TokenKind};

/// Parses one PDDLS domain or problem. Accepts plain PDDL as the degenerate
/// case (no `:context`, no `:semantics`). Sections may appear in any order;
/// a repeated section (other than `:action`) is an error.
pub fn parse_document(text: &str) -> Result<PddlsDocument, SyntaxError> {
    let tokens = tokenize(text);
    let mut p = Parser { tokens: &tokens, pos: 0 };
    let doc = p.document()?;
    if p.pos != tokens.len() {
        let t = &tokens[p.pos];
        return Err(SyntaxError::new(t.line, t.col, "trailing tokens after document"));
    }
    Ok(doc)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> SyntaxError {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => SyntaxError::new(t.line, t.col, message),
            None => SyntaxError::new(1, 1, message),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'a Token, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.next().unwrap()),
            Some(t) => Err(SyntaxError::new(
                t.line,
                t.col,
                format!("expected {what}, found `{}`", t.text),
            )),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_word(&mut self, what: &str) -> Result<&'a Token, SyntaxError> {
        self.expect(TokenKind::Word, what)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        let t = self.expect_word(&format!("`{kw}`"))?;
        if t.text.eq_ignore_ascii_case(kw) {
            Ok(())
        } else {
            Err(SyntaxError::new(t.line, t.col, format!("expected `{kw}`, found `{}`", t.text)))
        }
    }

    fn at_rparen(&self) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::RParen)
    }

    fn document(&mut self) -> Result<PddlsDocument, SyntaxError> {
        self.expect(TokenKind::LParen, "`(`")?;
        self.expect_keyword("define")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let kind_tok = self.expect_word("`domain` or `problem`")?;
        let kind = if kind_tok.text.eq_ignore_ascii_case("domain") {
            DocumentKind::Domain
        } else if kind_tok.text.eq_ignore_ascii_case("problem") {
            DocumentKind::Problem
        } else {
            return Err(SyntaxError::new(
                kind_tok.line,
                kind_tok.col,
                format!("expected `domain` or `problem`, found `{}`", kind_tok.text),
            ));
        };
        let name = self.expect_word("document name")?;
        self.expect(TokenKind::RParen, "`)`")?;

        let mut doc = PddlsDocument::new(kind, name.text.as_str());
        let mut seen: BTreeSet<String> = BTreeSet::new();

        while !self.at_rparen() {
            self.section(&mut doc, &mut seen)?;
        }
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(doc)
    }

    fn section(
        &mut self,
        doc: &mut PddlsDocument,
        seen: &mut BTreeSet<String>,
    ) -> Result<(), SyntaxError> {
        self.expect(TokenKind::LParen, "`(` opening a section")?;
        let head = self.expect_word("section keyword")?;
        let key = head.text.to_ascii_lowercase();

        if key != ":action" && !seen.insert(key.clone()) {
            return Err(SyntaxError::new(
                head.line,
                head.col,
                format!("duplicate section `{}`", head.text),
            ));
        }

        let domain_only = |doc: &PddlsDocument| -> Result<(), SyntaxError> {
            if doc.is_domain() {
                Ok(())
            } else {
                Err(SyntaxError::new(
                    head.line,
                    head.col,
                    format!("section `{}` is not allowed in a problem", head.text),
                ))
            }
        };
        let problem_only = |doc: &PddlsDocument| -> Result<(), SyntaxError> {
            if doc.is_domain() {
                Err(SyntaxError::new(
                    head.line,
                    head.col,
                    format!("section `{}` is not allowed in a domain", head.text),
                ))
            } else {
                Ok(())
            }
        };

        match key.as_str() {
            ":requirements" => {
                while !self.at_rparen() {
                    let t = self.expect_word("requirement key")?;
                    doc.requirements.push(t.text.clone());
                }
            }
            ":context" => self.context_block(doc)?,
            ":types" => {
                domain_only(doc)?;
                doc.types = self.typed_list(false)?;
            }
            ":constants" => {
                domain_only(doc)?;
                doc.constants = self.typed_list(false)?;
            }
            ":predicates" => {
                domain_only(doc)?;
                while !self.at_rparen() {
                    doc.predicates.push(self.predicate_decl()?);
                }
            }
            ":functions" | ":constraints" => {
                domain_only(doc)?;
                let mut items = vec![Sexpr::Sym(head.text.clone())];
                while !self.at_rparen() {
                    items.push(self.sexpr()?);
                }
                doc.extras.push(Sexpr::List(items));
            }
            ":action" => {
                domain_only(doc)?;
                doc.actions.push(self.action()?);
            }
            ":domain" => {
                problem_only(doc)?;
                let t = self.expect_word("domain name")?;
                doc.domain_ref = Some(Symbol::new(t.text.as_str()));
            }
            ":objects" => {
                problem_only(doc)?;
                doc.objects = self.typed_list(false)?;
            }
            ":init" => {
                problem_only(doc)?;
                while !self.at_rparen() {
                    doc.init.push(self.literal()?);
                }
            }
            ":goal" => {
                problem_only(doc)?;
                doc.goal = Some(self.formula()?);
            }
            _ => {
                return Err(SyntaxError::new(
                    head.line,
                    head.col,
                    format!("unknown section `{}`", head.text),
                ));
            }
        }
        self.expect(TokenKind::RParen, "`)` closing the section")?;
        Ok(())
    }

    /// `(:context <URI>)` or `(:context term - IRI ...)`. A single word
    /// before the closing paren is the remote form.
    fn context_block(&mut self, doc: &mut PddlsDocument) -> Result<(), SyntaxError> {
        let mut words: Vec<&'a Token> = Vec::new();
        while !self.at_rparen() {
            words.push(self.expect_word("context entry")?);
        }
        if words.len() == 1 {
            doc.context_ref = Some(words[0].text.clone());
            return Ok(());
        }
        if !words.len().is_multiple_of(3) {
            let t = words.last().copied();
            let (line, col) = t.map(|t| (t.line, t.col)).unwrap_or((1, 1));
            return Err(SyntaxError::new(
                line,
                col,
                "malformed term mapping: expected `term - IRI` triples",
            ));
        }
        let mut ctx = ContextMap::default();
        for chunk in words.chunks(3) {
            let (term, sep, iri) = (chunk[0], chunk[1], chunk[2]);
            if sep.text != "-" {
                return Err(SyntaxError::new(
                    sep.line,
                    sep.col,
                    format!("malformed term mapping: expected `-`, found `{}`", sep.text),
                ));
            }
            if iri.text.is_empty() {
                return Err(SyntaxError::new(iri.line, iri.col, "empty IRI in term mapping"));
            }
            if term.text.eq_ignore_ascii_case("pddl") {
                return Err(SyntaxError::new(
                    term.line,
                    term.col,
                    "the term `pddl` is reserved and may not be rebound",
                ));
            }
            ctx.push(Symbol::new(term.text.as_str()), iri.text.clone());
        }
        doc.context = ctx;
        Ok(())
    }

    /// `name name - type name ...`; the trailing group without `-` is untyped.
    fn typed_list(&mut self, variables: bool) -> Result<Vec<TypedSymbol>, SyntaxError> {
        let mut out: Vec<TypedSymbol> = Vec::new();
        let mut pending: Vec<&'a Token> = Vec::new();
        while !self.at_rparen() {
            let t = self.expect_word("name")?;
            if t.text == "-" {
                let ty = self.expect_word("type name")?;
                if pending.is_empty() {
                    return Err(SyntaxError::new(t.line, t.col, "type with no preceding names"));
                }
                for name in pending.drain(..) {
                    out.push(TypedSymbol::typed(name.text.as_str(), ty.text.as_str()));
                }
            } else {
                if variables && !t.text.starts_with('?') {
                    return Err(SyntaxError::new(
                        t.line,
                        t.col,
                        format!("expected a `?`-variable, found `{}`", t.text),
                    ));
                }
                pending.push(t);
            }
        }
        for name in pending {
            out.push(TypedSymbol::untyped(name.text.as_str()));
        }
        Ok(out)
    }

    fn predicate_decl(&mut self) -> Result<PredicateDecl, SyntaxError> {
        self.expect(TokenKind::LParen, "`(` opening a predicate declaration")?;
        let name = self.expect_word("predicate name")?;
        let params = self.typed_list(true)?;
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(PredicateDecl { name: Symbol::new(name.text.as_str()), params })
    }

    fn action(&mut self) -> Result<ActionDef, SyntaxError> {
        let name = self.expect_word("action name")?;
        let mut parameters: Option<Vec<TypedSymbol>> = None;
        let mut precondition: Option<Formula> = None;
        let mut effect: Option<Formula> = None;

        while !self.at_rparen() {
            let kw = self.expect_word("action keyword")?;
            match kw.text.to_ascii_lowercase().as_str() {
                ":parameters" => {
                    self.expect(TokenKind::LParen, "`(`")?;
                    let params = self.typed_list(true)?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    let mut names: BTreeSet<&Symbol> = BTreeSet::new();
                    for p in &params {
                        if !names.insert(&p.name) {
                            return Err(SyntaxError::new(
                                kw.line,
                                kw.col,
                                format!("duplicate parameter `{}`", p.name),
                            ));
                        }
                    }
                    parameters = Some(params);
                }
                ":precondition" => precondition = Some(self.formula()?),
                ":effect" => effect = Some(self.formula()?),
                other => {
                    return Err(SyntaxError::new(
                        kw.line,
                        kw.col,
                        format!("unknown action keyword `{other}`"),
                    ));
                }
            }
        }

        let effect = effect.ok_or_else(|| {
            self.err_here(format!("action `{}` has no :effect", name.text))
        })?;
        effect.literals().map_err(|m| {
            SyntaxError::new(name.line, name.col, format!("effect must be a conjunction of literals: {m}"))
        })?;
        Ok(ActionDef {
            name: Symbol::new(name.text.as_str()),
            parameters: parameters.unwrap_or_default(),
            precondition: precondition.unwrap_or(Formula::And(Vec::new())),
            effect,
        })
    }

    /// Parses and normalizes a formula: nested conjunctions are flattened,
    /// double negations removed, one-element conjunctions collapsed. Negated
    /// conjunctions are outside the subset and rejected.
    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let open = self.expect(TokenKind::LParen, "`(` opening a formula")?;
        let head = self.expect_word("formula head")?;
        let f = match head.text.to_ascii_lowercase().as_str() {
            "and" => {
                let mut parts = Vec::new();
                while !self.at_rparen() {
                    let part = self.formula()?;
                    match part {
                        Formula::And(inner) => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                if parts.len() == 1 {
                    parts.pop().unwrap()
                } else {
                    Formula::And(parts)
                }
            }
            "not" => {
                let inner = self.formula()?;
                match inner {
                    Formula::Not(body) => *body,
                    Formula::And(_) => {
                        return Err(SyntaxError::new(
                            open.line,
                            open.col,
                            "negated conjunctions are not supported",
                        ));
                    }
                    atom => Formula::Not(Box::new(atom)),
                }
            }
            "or" | "imply" | "exists" | "forall" | "when" => {
                return Err(SyntaxError::new(
                    head.line,
                    head.col,
                    format!("`{}` formulas are not supported", head.text),
                ));
            }
            _ => {
                let mut args = Vec::new();
                while !self.at_rparen() {
                    let t = self.expect_word("atom argument")?;
                    args.push(Symbol::new(t.text.as_str()));
                }
                Formula::atom(head.text.as_str(), args)
            }
        };
        self.expect(TokenKind::RParen, "`)` closing the formula")?;
        Ok(f)
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let at = self.peek().map(|t| (t.line, t.col)).unwrap_or((1, 1));
        let f = self.formula()?;
        let mut lits = f
            .literals()
            .map_err(|m| SyntaxError::new(at.0, at.1, format!("expected a literal: {m}")))?;
        if lits.len() != 1 {
            return Err(SyntaxError::new(at.0, at.1, "expected a single literal"));
        }
        Ok(lits.pop().unwrap())
    }

    fn sexpr(&mut self) -> Result<Sexpr, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::LParen => {
                self.next();
                let mut items = Vec::new();
                while !self.at_rparen() {
                    items.push(self.sexpr()?);
                }
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(Sexpr::List(items))
            }
            Some(t) if t.kind == TokenKind::Word => {
                self.next();
                Ok(Sexpr::Sym(t.text.clone()))
            }
            _ => Err(self.err_here("expected an s-expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UR5_DOMAIN: &str = r#"
(define (domain example-ur5-domain)
  (:requirements :strips :adl :typing :semantics)
  (:context
    available - uri:ex/action/available
    insertable - uri:ex/action/insertable
    pick-n-insert - uri:ex/action/pick-n-insert )
  (:predicates
    (available ?object) ; pillar or hole is available
    (insertable ?pillar ?hole) )
  (:action pick-n-insert
    :parameters (?pillar ?hole)
    :precondition (and
      (available ?pillar)
      (available ?hole)
      (insertable ?pillar ?hole))
    :effect (and
      (not (available ?pillar))
      (not (available ?hole)) ) ) )
"#;

    const PEG_PROBLEM: &str = r#"
(define (problem example-problem)
  (:context
    available - uri:ex/action/available
    CylindricalPillar_1 - uri:ex/demo2/CylindricalPillar_1
    TriangularPillar_2 - uri:ex/demo2/TriangularPillar_2
    CylindricalHole_4 - uri:ex/demo2/CylindricalHole_4 )
  (:domain example-ur5-domain)
  (:objects
    CylindricalPillar_1
    TriangularPillar_2
    CylindricalHole_4 )
  (:init
    (available CylindricalPillar_1)
    (available TriangularPillar_2)
    (available CylindricalHole_4) )
  (:goal
    (not (available CylindricalHole_4)) )
)
"#;

    #[test]
    fn parses_ur5_domain() {
        let doc = parse_document(UR5_DOMAIN).unwrap();
        assert_eq!(doc.kind, DocumentKind::Domain);
        assert_eq!(doc.name.as_str(), "example-ur5-domain");
        assert_eq!(doc.context.len(), 3);
        assert_eq!(doc.predicates.len(), 2);
        assert_eq!(doc.predicates[0].arity(), 1);
        assert_eq!(doc.predicates[1].arity(), 2);
        assert_eq!(doc.actions.len(), 1);
        assert_eq!(doc.actions[0].name.as_str(), "pick-n-insert");
        assert!(doc.requirements.iter().any(|r| r == ":semantics"));
    }

    #[test]
    fn parses_minimal_domain() {
        let doc = parse_document("(define (domain d0))").unwrap();
        assert_eq!(doc.kind, DocumentKind::Domain);
        assert!(doc.context.is_empty());
        assert!(doc.predicates.is_empty());
        assert!(doc.actions.is_empty());
    }

    #[test]
    fn parses_peg_problem() {
        let doc = parse_document(PEG_PROBLEM).unwrap();
        assert_eq!(doc.kind, DocumentKind::Problem);
        assert_eq!(doc.context.len(), 4);
        assert_eq!(doc.objects.len(), 3);
        assert_eq!(doc.init.len(), 3);
        let goal = doc.goal.as_ref().unwrap();
        assert_eq!(
            goal,
            &Formula::Not(Box::new(Formula::atom(
                "available",
                vec![Symbol::new("CylindricalHole_4")]
            )))
        );
    }

    #[test]
    fn comments_and_whitespace_do_not_change_ast() {
        let bare = "(define (domain d)(:predicates (p ?x)))";
        let noisy = "(define ; def\n (domain d)\n  (:predicates\n   (p ?x) ; param\n  )\n)";
        assert_eq!(parse_document(bare).unwrap(), parse_document(noisy).unwrap());
    }

    #[test]
    fn unbalanced_parens_report_position() {
        let err = parse_document("(define (domain d)").unwrap_err();
        assert!(err.message.contains("end of input"), "{err}");
    }

    #[test]
    fn malformed_term_mapping_rejected() {
        let err = parse_document("(define (domain d) (:context a uri:x))").unwrap_err();
        assert!(err.message.contains("term mapping"), "{err}");
        let err = parse_document("(define (domain d) (:context a = uri:x))").unwrap_err();
        assert!(err.message.contains("expected `-`"), "{err}");
    }

    #[test]
    fn duplicate_section_rejected() {
        let err = parse_document("(define (domain d) (:types a) (:types b))").unwrap_err();
        assert!(err.message.contains("duplicate section"), "{err}");
    }

    #[test]
    fn remote_context_form() {
        let doc = parse_document("(define (domain d) (:context uri:ctx/shared))").unwrap();
        assert_eq!(doc.context_ref.as_deref(), Some("uri:ctx/shared"));
        assert!(doc.context.is_empty());
    }

    #[test]
    fn kind_sections_enforced() {
        assert!(parse_document("(define (domain d) (:init (p a)))").is_err());
        assert!(parse_document("(define (problem p) (:action a :effect (q)))").is_err());
    }

    #[test]
    fn double_negation_removed() {
        let doc =
            parse_document("(define (problem p) (:goal (not (not (q a)))))").unwrap();
        assert_eq!(doc.goal.unwrap(), Formula::atom("q", vec![Symbol::new("a")]));
    }

    #[test]
    fn negated_conjunction_rejected() {
        let err =
            parse_document("(define (problem p) (:goal (not (and (q a) (r b)))))").unwrap_err();
        assert!(err.message.contains("negated conjunctions"), "{err}");
    }

    #[test]
    fn opaque_sections_preserved() {
        let doc = parse_document(
            "(define (domain d) (:functions (cost ?x) - number) (:predicates (p ?x)))",
        )
        .unwrap();
        assert_eq!(doc.extras.len(), 1);
        assert_eq!(doc.extras[0].to_string(), "(:functions (cost ?x) - number)");
    }

    #[test]
    fn reserved_pddl_term_rejected() {
        let err = parse_document("(define (domain d) (:context pddl - uri:other))").unwrap_err();
        assert!(err.message.contains("reserved"), "{err}");
    }
}
