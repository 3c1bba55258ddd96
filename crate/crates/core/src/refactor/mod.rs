//! Source rewrites: applying an extraction for an accepted candidate, and
//! inlining callees to plant known extraction sites for benchmarking.
//!
//! Rewrites build a new unit and re-parse their own pretty-printed output, so
//! results always carry fresh spans and statement ids and are guaranteed to
//! re-parse and re-resolve.

mod extract;
mod inline;
mod mutate;

pub use extract::extract;
pub use inline::inline;
pub use mutate::{mutate, MutateConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::Precondition;
use crate::structure::RangeError;
use crate::syntax::{self, SourceUnit};

/// A planted extraction site: the statement range an inline splice produced,
/// addressed in the mutated unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEntry {
    /// Relative path of the mutated file; filled by the corpus-level caller.
    pub file: String,
    #[serde(rename = "class")]
    pub class_name: String,
    pub method: String,
    pub block: usize,
    pub start: usize,
    pub end: usize,
    pub inlined_from: String,
}

#[derive(Debug, Clone, Error)]
pub enum RefactorError {
    #[error("extraction preconditions failed: {}", codes(.reasons))]
    Precondition { reasons: Vec<Precondition> },
    #[error("method name `{name}` already exists in the class")]
    NameClash { name: String },
    #[error("cannot inline `{callee}`: {message}")]
    Inline { callee: String, message: String },
    #[error(transparent)]
    Range(#[from] RangeError),
    #[error("{0} not found")]
    NotFound(String),
    #[error("rewrite output failed to re-parse: {0}")]
    Reparse(String),
}

fn codes(reasons: &[Precondition]) -> String {
    reasons.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
}

/// Re-parse and re-resolve a rewritten unit so spans and ids are consistent.
pub(crate) fn renormalize(unit: &SourceUnit) -> Result<SourceUnit, RefactorError> {
    let text = syntax::pretty_print(unit);
    syntax::load_unit(&text).map_err(|e| RefactorError::Reparse(e.to_string()))
}

pub(crate) fn find_class<'u>(
    unit: &'u SourceUnit,
    class_name: &str,
) -> Result<(usize, &'u syntax::ClassDecl), RefactorError> {
    unit.classes
        .iter()
        .enumerate()
        .find(|(_, c)| c.name == class_name)
        .ok_or_else(|| RefactorError::NotFound(format!("class `{class_name}`")))
}

pub(crate) fn find_method<'c>(
    class: &'c syntax::ClassDecl,
    method_name: &str,
) -> Result<(usize, &'c syntax::MethodDecl), RefactorError> {
    class
        .methods
        .iter()
        .enumerate()
        .find(|(_, m)| m.name == method_name)
        .ok_or_else(|| {
            RefactorError::NotFound(format!("method `{}.{method_name}`", class.name))
        })
}

/// Walk to a nested block inside a method body along a structure path.
pub(crate) fn block_at_path_mut<'b>(
    body: &'b mut syntax::Block,
    path: &[crate::structure::PathStep],
) -> &'b mut syntax::Block {
    use crate::structure::PathStep;
    use crate::syntax::StmtKind;
    let mut block = body;
    for step in path {
        let (idx, pick_else) = match step {
            PathStep::Then(i) => (*i, false),
            PathStep::Else(i) => (*i, true),
            PathStep::LoopBody(i) | PathStep::Inner(i) => (*i, false),
        };
        let stmt = &mut block.stmts[idx];
        block = match (&mut stmt.kind, pick_else) {
            (StmtKind::If { then_block, .. }, false) => then_block,
            (StmtKind::If { else_block: Some(e), .. }, true) => e,
            (StmtKind::While { body, .. }, _) | (StmtKind::For { body, .. }, _) => body,
            (StmtKind::Block(inner), _) => inner,
            _ => unreachable!("path does not match statement shape"),
        };
    }
    block
}
