//! Decomposition of a method body into numbered blocks and labeled
//! statements, plus selection queries over that structure.
//!
//! Statements are visited in pre-order. When a composite statement is
//! visited, each block it owns is assigned the next block number (then-block
//! before else-block) and the walk descends into them in that order. The
//! method body is block 1; statement `SX.Y` is the Y-th direct statement of
//! block X.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Block, MethodDecl, Span, Stmt, StmtId};

/// Label of a statement: `S<block>.<index>`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StmtLabel {
    pub block: usize,
    pub index: usize,
}

impl fmt::Display for StmtLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}.{}", self.block, self.index)
    }
}

/// Steps from the method body to a nested block; used to edit the block
/// inside a cloned AST.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    /// Descend into the then-block of the `if` at this statement index.
    Then(usize),
    /// Descend into the else-block of the `if` at this statement index.
    Else(usize),
    /// Descend into the body of the loop at this statement index.
    LoopBody(usize),
    /// Descend into a bare block statement at this statement index.
    Inner(usize),
}

#[derive(Debug, Clone)]
pub struct BlockInfo<'a> {
    pub block_id: usize,
    /// Direct child statements, in source order.
    pub statements: Vec<&'a Stmt>,
    /// Composite statement owning this block; `None` for block 1.
    pub parent_stmt: Option<StmtId>,
    /// Navigation path from the method body to this block.
    pub path: Vec<PathStep>,
}

/// A method body indexed by block number and statement label.
#[derive(Debug)]
pub struct LabeledMethod<'a> {
    pub method: &'a MethodDecl,
    pub blocks: Vec<BlockInfo<'a>>,
    labels: HashMap<StmtId, StmtLabel>,
    /// Flattened statements in pre-order (= source order).
    order: Vec<&'a Stmt>,
    positions: HashMap<StmtId, usize>,
    parents: HashMap<StmtId, Option<StmtId>>,
}

/// Contiguous selection of a block's direct statements plus everything nested
/// inside them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub block_id: usize,
    pub start: usize,
    pub end: usize,
    /// Every covered statement, nested ones included, in pre-order.
    pub closure: Vec<StmtId>,
    pub span: Span,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("selection {block}:{start}:{end} out of range (block has {len} statements)")]
pub struct RangeError {
    pub block: usize,
    pub start: usize,
    pub end: usize,
    pub len: usize,
}

/// Build the block/label structure of a method body.
pub fn build_blocks(method: &MethodDecl) -> LabeledMethod<'_> {
    let mut lm = LabeledMethod {
        method,
        blocks: Vec::new(),
        labels: HashMap::new(),
        order: Vec::new(),
        positions: HashMap::new(),
        parents: HashMap::new(),
    };
    let mut next_block = 2usize;
    walk_block(&method.body, None, Vec::new(), 1, &mut next_block, &mut lm);
    for (pos, stmt) in lm.order.iter().enumerate() {
        lm.positions.insert(stmt.id, pos);
    }
    lm
}

fn walk_block<'a>(
    block: &'a Block,
    parent_stmt: Option<StmtId>,
    path: Vec<PathStep>,
    block_id: usize,
    next_block: &mut usize,
    lm: &mut LabeledMethod<'a>,
) {
    debug_assert!(block_id < *next_block);
    lm.blocks.push(BlockInfo {
        block_id,
        statements: block.stmts.iter().collect(),
        parent_stmt,
        path: path.clone(),
    });
    for (idx, stmt) in block.stmts.iter().enumerate() {
        lm.labels.insert(stmt.id, StmtLabel { block: block_id, index: idx + 1 });
        lm.parents.insert(stmt.id, parent_stmt);
        lm.order.push(stmt);
        // all blocks of this statement are numbered before descending
        let children = child_blocks_with_steps(stmt, idx);
        let first = *next_block;
        *next_block += children.len();
        for (offset, (child, step)) in children.into_iter().enumerate() {
            let mut child_path = path.clone();
            child_path.push(step);
            walk_block(child, Some(stmt.id), child_path, first + offset, next_block, lm);
        }
    }
}

fn child_blocks_with_steps(stmt: &Stmt, idx: usize) -> Vec<(&Block, PathStep)> {
    use crate::syntax::StmtKind;
    match &stmt.kind {
        StmtKind::If { then_block, else_block, .. } => {
            let mut v = vec![(then_block, PathStep::Then(idx))];
            if let Some(e) = else_block {
                v.push((e, PathStep::Else(idx)));
            }
            v
        }
        StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
            vec![(body, PathStep::LoopBody(idx))]
        }
        StmtKind::Block(inner) => vec![(inner, PathStep::Inner(idx))],
        _ => Vec::new(),
    }
}

impl<'a> LabeledMethod<'a> {
    pub fn block(&self, block_id: usize) -> Option<&BlockInfo<'a>> {
        self.blocks.iter().find(|b| b.block_id == block_id)
    }

    pub fn label(&self, id: StmtId) -> Option<StmtLabel> {
        self.labels.get(&id).copied()
    }

    pub fn stmt_at(&self, label: StmtLabel) -> Option<&'a Stmt> {
        self.block(label.block)?.statements.get(label.index - 1).copied()
    }

    pub fn stmt_by_id(&self, id: StmtId) -> Option<&'a Stmt> {
        self.positions.get(&id).map(|&p| self.order[p])
    }

    /// Pre-order position of a statement in the flattened body.
    pub fn position(&self, id: StmtId) -> Option<usize> {
        self.positions.get(&id).copied()
    }

    /// All statements of the body in pre-order.
    pub fn statements(&self) -> &[&'a Stmt] {
        &self.order
    }

    pub fn total_statements(&self) -> usize {
        self.order.len()
    }

    /// The composite statement directly owning the block that contains `id`.
    pub fn parent_of(&self, id: StmtId) -> Option<StmtId> {
        self.parents.get(&id).copied().flatten()
    }

    /// Innermost enclosing loop statement of `id`, if any.
    pub fn enclosing_loop(&self, id: StmtId) -> Option<StmtId> {
        let mut cur = self.parent_of(id);
        while let Some(pid) = cur {
            let stmt = self.stmt_by_id(pid)?;
            if stmt.is_loop() {
                return Some(pid);
            }
            cur = self.parent_of(pid);
        }
        None
    }

    /// All loop statements enclosing `id`, innermost first.
    pub fn enclosing_loops(&self, id: StmtId) -> Vec<StmtId> {
        let mut loops = Vec::new();
        let mut cur = self.parent_of(id);
        while let Some(pid) = cur {
            if let Some(stmt) = self.stmt_by_id(pid) {
                if stmt.is_loop() {
                    loops.push(pid);
                }
            }
            cur = self.parent_of(pid);
        }
        loops
    }

    /// Selection of statements `start..=end` of a block, with full closure.
    pub fn selection(&self, block_id: usize, start: usize, end: usize) -> Result<Selection, RangeError> {
        let block = self.block(block_id).ok_or(RangeError { block: block_id, start, end, len: 0 })?;
        let len = block.statements.len();
        if start < 1 || end < start || end > len {
            return Err(RangeError { block: block_id, start, end, len });
        }
        let mut closure = Vec::new();
        for stmt in &block.statements[start - 1..end] {
            collect_closure(stmt, &mut closure);
        }
        let span = Span::cover(block.statements[start - 1].span, block.statements[end - 1].span);
        Ok(Selection { block_id, start, end, closure, span })
    }
}

fn collect_closure(stmt: &Stmt, out: &mut Vec<StmtId>) {
    out.push(stmt.id);
    for block in stmt.child_blocks() {
        for child in &block.stmts {
            collect_closure(child, out);
        }
    }
}

/// Statement count of a selection; nested statements included.
pub fn count_statements(sel: &Selection) -> usize {
    sel.closure.len()
}

/// Source listing of a method with `SX.Y` label prefixes per statement line.
pub fn labeled_listing(labeled: &LabeledMethod<'_>) -> String {
    use crate::syntax::{stmt_line, StmtKind};

    let width = labeled
        .labels
        .values()
        .map(|l| l.to_string().len())
        .max()
        .unwrap_or(4)
        + 2;
    let method = labeled.method;
    let ret = method.return_type.as_ref().map_or("void", |t| t.name.as_str());
    let params = method
        .params
        .iter()
        .map(|p| format!("{} {}", p.ty.name, p.name))
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = format!("{:width$}{ret} {}({params}) {{\n", "", method.name, width = width);

    fn write_block(
        out: &mut String,
        labeled: &LabeledMethod<'_>,
        block: &Block,
        indent: usize,
        width: usize,
    ) {
        for stmt in &block.stmts {
            let label = labeled.label(stmt.id).expect("labeled statement");
            let header = stmt_line(stmt);
            let opener = match &stmt.kind {
                StmtKind::If { .. } | StmtKind::While { .. } | StmtKind::For { .. } => {
                    format!("{header} {{")
                }
                StmtKind::Block(_) => "{".to_string(),
                _ => header.clone(),
            };
            out.push_str(&format!(
                "{:<width$}{:indent$}{opener}\n",
                label.to_string(),
                "",
                width = width,
                indent = indent * 4
            ));
            match &stmt.kind {
                StmtKind::If { then_block, else_block, .. } => {
                    write_block(out, labeled, then_block, indent + 1, width);
                    if let Some(e) = else_block {
                        out.push_str(&format!(
                            "{:width$}{:indent$}}} else {{\n",
                            "",
                            "",
                            width = width,
                            indent = indent * 4
                        ));
                        write_block(out, labeled, e, indent + 1, width);
                    }
                    out.push_str(&format!(
                        "{:width$}{:indent$}}}\n",
                        "",
                        "",
                        width = width,
                        indent = indent * 4
                    ));
                }
                StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
                    write_block(out, labeled, body, indent + 1, width);
                    out.push_str(&format!(
                        "{:width$}{:indent$}}}\n",
                        "",
                        "",
                        width = width,
                        indent = indent * 4
                    ));
                }
                StmtKind::Block(inner) => {
                    write_block(out, labeled, inner, indent + 1, width);
                    out.push_str(&format!(
                        "{:width$}{:indent$}}}\n",
                        "",
                        "",
                        width = width,
                        indent = indent * 4
                    ));
                }
                _ => {}
            }
        }
    }

    write_block(&mut out, labeled, &method.body, 1, width);
    out.push_str(&format!("{:width$}}}\n", "", width = width));
    out
}
