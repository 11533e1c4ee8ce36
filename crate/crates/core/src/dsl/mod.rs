//! A small scripting language: theories, models, proofs and commands,
//! executed into a report.

pub mod ast;
pub mod exec;
pub mod lexer;
pub mod parser;
pub mod report;

pub use ast::Script;
pub use exec::{execute, Config, Mode};
pub use parser::{parse_script, parse_term, parse_type};
pub use report::{emit_report, Format, Report, Status};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: unknown {kind} `{name}`")]
    Name {
        line: usize,
        col: usize,
        kind: String,
        name: String,
    },
}
