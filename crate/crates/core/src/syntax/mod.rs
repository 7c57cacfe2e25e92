//! Lexing, parsing and printing of PDDLS documents.
//!
//! PDDLS is plain PDDL plus a `(:context term - IRI ...)` block binding local
//! symbols to globally unique IRIs, and a `:semantics` requirement key
//! announcing that the document carries such annotations.

mod ast;
mod lexer;
mod parser;
mod printer;
mod validate;

pub use ast::{
    ActionDef, DocumentKind, Formula, Literal, PddlsDocument, PredicateDecl, Sexpr, Symbol,
    TypedSymbol,
};
pub use lexer::{SyntaxError, Token, TokenKind};
pub use parser::parse_document;
pub use printer::print_pddl;
pub use validate::validate_document;
