//! Candidate enumeration and validity checking.
//!
//! Candidates are exactly the contiguous ranges `(block, i, j)` over every
//! block of a method, with nested statements pulled in by the selection
//! closure. A candidate survives only if an extraction could actually be
//! applied to it; failed checks are reported as precondition codes.

use std::collections::HashSet;
use std::fmt;

use crate::deps::{self, DefUse, VarKind};
use crate::structure::{count_statements, LabeledMethod, Selection};
use crate::syntax::{StmtId, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationConfig {
    /// Smallest closure size an extraction may have.
    pub min_extracted_statements: usize,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig { min_extracted_statements: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub sel: Selection,
    /// Closure statement count.
    pub size: usize,
}

/// Extraction precondition codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Precondition {
    /// Selection is smaller than the configured minimum.
    V1,
    /// More than one variable is assigned inside and read afterwards.
    V2,
    /// A `return` in the selection, or a `break`/`continue` whose loop is
    /// outside it.
    V3,
    /// The selection covers the whole method body.
    V4,
    /// The remainder reads a selection-declared local other than the single
    /// live-out variable.
    V5,
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Precondition {
    pub fn describe(&self) -> &'static str {
        match self {
            Precondition::V1 => "selection has fewer statements than the minimum",
            Precondition::V2 => "more than one variable leaves the selection alive",
            Precondition::V3 => "control flow escapes the selection",
            Precondition::V4 => "selection covers the entire method body",
            Precondition::V5 => "remainder reads a variable declared inside the selection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityVerdict {
    pub valid: bool,
    pub reasons: Vec<Precondition>,
}

impl ValidityVerdict {
    fn from_reasons(reasons: Vec<Precondition>) -> ValidityVerdict {
        ValidityVerdict { valid: reasons.is_empty(), reasons }
    }
}

/// Every `(block, i, j)` selection of the method, validity not considered.
/// Ordered by block id, then start, then end.
pub fn enumerate(labeled: &LabeledMethod<'_>) -> Vec<Selection> {
    let mut out = Vec::new();
    for block in &labeled.blocks {
        let n = block.statements.len();
        for i in 1..=n {
            for j in i..=n {
                out.push(labeled.selection(block.block_id, i, j).expect("in range"));
            }
        }
    }
    out
}

/// Selections that pass all validity preconditions, as candidates.
pub fn generate(
    labeled: &LabeledMethod<'_>,
    def_use: &DefUse,
    cfg: &GenerationConfig,
) -> Vec<Candidate> {
    enumerate(labeled)
        .into_iter()
        .filter(|sel| is_valid(labeled, def_use, sel, cfg).valid)
        .map(|sel| {
            let size = count_statements(&sel);
            Candidate { sel, size }
        })
        .collect()
}

/// Check the extraction preconditions V1..V5 for one selection.
pub fn is_valid(
    labeled: &LabeledMethod<'_>,
    def_use: &DefUse,
    sel: &Selection,
    cfg: &GenerationConfig,
) -> ValidityVerdict {
    let mut reasons = Vec::new();
    let closure: HashSet<StmtId> = sel.closure.iter().copied().collect();

    if count_statements(sel) < cfg.min_extracted_statements {
        reasons.push(Precondition::V1);
    }

    let live = deps::live_out(labeled, def_use, sel);
    if live.len() > 1 {
        reasons.push(Precondition::V2);
    }

    if control_flow_escapes(labeled, &closure, sel) {
        reasons.push(Precondition::V3);
    }

    if closure.len() >= labeled.total_statements() {
        reasons.push(Precondition::V4);
    }

    // reads in the remainder of locals declared inside the selection must be
    // the single live-out variable
    let single = live.iter().next().cloned().filter(|_| live.len() == 1);
    'outer: for stmt in labeled.statements() {
        if closure.contains(&stmt.id) {
            continue;
        }
        for used in &def_use.facts(stmt.id).uses {
            if used.kind != VarKind::Local {
                continue;
            }
            let Some(decl_label) = used.decl else { continue };
            let Some(decl_stmt) = labeled.stmt_at(decl_label) else { continue };
            if closure.contains(&decl_stmt.id) && Some(used) != single.as_ref() {
                reasons.push(Precondition::V5);
                break 'outer;
            }
        }
    }

    ValidityVerdict::from_reasons(reasons)
}

fn control_flow_escapes(
    labeled: &LabeledMethod<'_>,
    closure: &HashSet<StmtId>,
    sel: &Selection,
) -> bool {
    for id in &sel.closure {
        let stmt = labeled.stmt_by_id(*id).expect("closure statement");
        match stmt.kind {
            StmtKind::Return { .. } => return true,
            StmtKind::Break | StmtKind::Continue => {
                match labeled.enclosing_loop(*id) {
                    Some(target) if closure.contains(&target) => {}
                    _ => return true,
                }
            }
            _ => {}
        }
    }
    false
}
