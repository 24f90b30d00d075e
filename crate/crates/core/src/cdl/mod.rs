//! Circuit description language.
//!
//! A source is a sequence of statements; line breaks carry no meaning.
//!
//! ```text
//! internal <label>+
//! external <label>+
//! statistics boson|fermion|distinguishable
//! particle <internal> <external>
//! hbs <in_a> <in_b> <out_t> <out_r>
//! bs  <in_a> <in_b> <out_t> <out_r>
//! phase <external> <number>|$<param>
//! sorter internal <port> (<internal> -> <external>)+
//! sorter external (<external> -> <external>)+
//! exchange (<external> -> <external>)+
//! measure A|B internal|external (bin <label> = <internal>:<external>+)+
//! ```
//!
//! Numbers are decimals or `pi`, optionally negated and joined by `*` and
//! `/` without spaces (`-3*pi/4`). `#` starts a comment. Labels must be
//! declared before use, and `pi` cannot be a label.

mod compile;
mod lexer;
mod parser;
mod pretty;

use std::fmt;

pub use compile::{compile, phase_params, CompiledCircuit};
pub use lexer::{tokenize, Token, TokenKind, KEYWORDS};
pub use parser::{parse, parse_source};
pub use pretty::{format_number, pretty_print};

use crate::analysis::{DofKind, Party};
use crate::fock::Statistics;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdlErrorKind {
    Lex,
    Syntax,
    Semantic,
}

/// Diagnostic pointing at the first offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdlError {
    pub kind: CdlErrorKind,
    pub message: String,
    pub line: usize,
    pub col: usize,
    /// Token descriptions that would have been accepted.
    pub expected: Vec<String>,
}

impl CdlError {
    pub(crate) fn lex(message: impl Into<String>, line: usize, col: usize) -> Self {
        CdlError {
            kind: CdlErrorKind::Lex,
            message: message.into(),
            line,
            col,
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for CdlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CdlErrorKind::Lex => "lexical error",
            CdlErrorKind::Syntax => "syntax error",
            CdlErrorKind::Semantic => "error",
        };
        write!(f, "{}:{}: {kind}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for CdlError {}

/// Literal phase or a named parameter bound at compile time.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseValue {
    Literal(f64),
    Param(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SorterSpec {
    /// Sorts the internal label of particles at `port`.
    Internal { port: String },
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Hbs { ports: [String; 4] },
    Bs { ports: [String; 4] },
    Phase { port: String, value: PhaseValue },
    Sorter { spec: SorterSpec, routes: Vec<(String, String)> },
    Exchange { routes: Vec<(String, String)> },
}

/// `internal:external` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModeRef {
    pub internal: String,
    pub external: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDecl {
    pub party: Party,
    pub kind: DofKind,
    pub bins: Vec<(String, Vec<ModeRef>)>,
}

/// Validated circuit description.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpecTree {
    pub internal: Vec<String>,
    pub external: Vec<String>,
    pub statistics: Statistics,
    /// Creation order: the first particle's operator is leftmost.
    pub particles: Vec<ModeRef>,
    pub elements: Vec<Element>,
    pub measurements: Vec<MeasureDecl>,
}

/// Sources shipped with the library, as `(file name, text)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("li_fermion.cdl", include_str!("../../examples/li_fermion.cdl")),
    ("li_boson.cdl", include_str!("../../examples/li_boson.cdl")),
    ("li_distinguishable.cdl", include_str!("../../examples/li_distinguishable.cdl")),
    ("swap.cdl", include_str!("../../examples/swap.cdl")),
    ("cascade2.cdl", include_str!("../../examples/cascade2.cdl")),
    ("cascade3.cdl", include_str!("../../examples/cascade3.cdl")),
];

/// Text of a bundled source by file name, with or without `.cdl`.
pub fn bundled(name: &str) -> Option<&'static str> {
    let want = if name.ends_with(".cdl") {
        name.to_string()
    } else {
        format!("{name}.cdl")
    };
    BUNDLED.iter().find(|(n, _)| *n == want).map(|(_, s)| *s)
}
