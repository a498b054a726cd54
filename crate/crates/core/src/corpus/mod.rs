//! The textual corpus language: definitions of polynomials, derivations,
//! automorphisms, contexts, divisors and group laws, followed by `check`
//! directives that run the library's verifications and report PASS, FAIL or
//! ERROR per directive.

pub mod ast;
mod parse;
pub mod report;
mod run;

pub use ast::Corpus;
pub use parse::parse;
pub use report::{Entry, Report, Verdict};
pub use run::{
    directive_names, directive_params, run, RunOptions, CORPUS_DEGREE_LIMIT, DEFAULT_SEARCH_DEGREE,
};

use crate::arith::text::SyntaxError;

/// Parses and runs `src`; a syntax error becomes `Err`.
pub fn check_source(src: &str, opts: &RunOptions) -> Result<Report, SyntaxError> {
    Ok(run(&parse(src)?, opts))
}
