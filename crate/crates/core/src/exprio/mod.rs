//! Text grammar, canonical printer, named-component tuples, and the
//! structured (JSON) serialization.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' nat)?
//! base     := rational | 'nu' | 't' | 'x' nat | 'u' nat '_[' nat (',' nat)* ']'
//!           | 'p_[' nat (',' nat)* ']' | '(' expr ')'
//! rational := int ('/' nat)?
//! ```
//!
//! Whitespace is insignificant between tokens.

mod parse;
mod print;
mod structured;
mod tuple;

use std::fmt;

pub use parse::parse_expr;
pub use print::print_expr;
pub use structured::{expr_from_json, expr_to_json, report_to_json};
pub use tuple::{
    parse_characteristic, parse_chi, parse_cotuple, parse_current, parse_tuple, print_characteristic, print_chi,
    print_cotuple, print_current, print_tuple, Tuple, TupleShape,
};

/// Byte range `start..end` in the parsed text.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}
