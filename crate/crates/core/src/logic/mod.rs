//! FO_R syntax: signatures, the formula/term AST, a parser and a printer.

mod ast;
mod parser;
mod printer;
pub mod signature;

use thiserror::Error;

pub use ast::{Formula, IndexTerm, Node, NumberTerm};
pub(crate) use ast::visit_formula_terms;
pub use parser::{parse_formula, parse_number_term};
pub use printer::{print_formula, print_index_term, print_number_term};
pub use signature::{AuxKind, AuxSymbol, Signature, SignatureError, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {column} (offset {offset}): {message}")]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("symbol `{0}` used with the wrong kind of value")]
    WrongKind(String),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
}
