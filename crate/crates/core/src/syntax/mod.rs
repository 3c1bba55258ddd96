//! Lexer, parser, type-name resolver, and printer for the JX language.
//!
//! JX is a small Java-like language: one package declaration, imports,
//! classes with fields and methods, block-structured statements, and a
//! conventional expression grammar. Files use the `.jx` extension.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod resolve;
pub mod token;

pub use ast::*;
pub use lexer::tokenize;
pub use parser::parse;
pub use pretty::{expr_to_string, pretty_print, stmt_line};
pub use resolve::resolve_types;

use thiserror::Error;

#[derive(Debug, Clone, Error)]
#[error("{line}:{col}: {message}")]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Clone, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Unexpected { line: u32, col: u32, expected: String, found: String },
}

#[derive(Debug, Clone, Error)]
pub enum ResolveError {
    #[error("{line}:{col}: ambiguous type `{name}`: imported as {candidates:?}")]
    AmbiguousType { name: String, candidates: Vec<String>, line: u32, col: u32 },
}

/// Parse and resolve in one step.
pub fn load_unit(text: &str) -> Result<SourceUnit, UnitError> {
    let unit = parse(text)?;
    Ok(resolve_types(&unit)?)
}

#[derive(Debug, Clone, Error)]
pub enum UnitError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

/// Visit every type reference in the unit, declarations and expressions alike.
pub fn visit_types<F: FnMut(&TypeRef)>(unit: &SourceUnit, f: &mut F) {
    for class in &unit.classes {
        for field in &class.fields {
            f(&field.ty);
            if let Some(e) = &field.init {
                visit_expr_types(e, f);
            }
        }
        for method in &class.methods {
            if let Some(rt) = &method.return_type {
                f(rt);
            }
            for p in &method.params {
                f(&p.ty);
            }
            visit_block_types(&method.body, f);
        }
    }
}

fn visit_block_types<F: FnMut(&TypeRef)>(block: &Block, f: &mut F) {
    for stmt in &block.stmts {
        visit_stmt_types(stmt, f);
    }
}

fn visit_stmt_types<F: FnMut(&TypeRef)>(stmt: &Stmt, f: &mut F) {
    match &stmt.kind {
        StmtKind::VarDecl { ty, init, .. } => {
            f(ty);
            if let Some(e) = init {
                visit_expr_types(e, f);
            }
        }
        StmtKind::Assign { value, .. } => visit_expr_types(value, f),
        StmtKind::ExprStmt { expr } => visit_expr_types(expr, f),
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => visit_expr_types(cond, f),
        StmtKind::For { init, cond, update, .. } => {
            match init {
                Some(ForInit::Decl { ty, init, .. }) => {
                    f(ty);
                    if let Some(e) = init {
                        visit_expr_types(e, f);
                    }
                }
                Some(ForInit::Assign { value, .. }) => visit_expr_types(value, f),
                None => {}
            }
            if let Some(c) = cond {
                visit_expr_types(c, f);
            }
            if let Some((_, e)) = update {
                visit_expr_types(e, f);
            }
        }
        StmtKind::Return { value } => {
            if let Some(e) = value {
                visit_expr_types(e, f);
            }
        }
        _ => {}
    }
    for block in stmt.child_blocks() {
        visit_block_types(block, f);
    }
}

fn visit_expr_types<F: FnMut(&TypeRef)>(expr: &Expr, f: &mut F) {
    match &expr.kind {
        ExprKind::Unary { operand, .. } => visit_expr_types(operand, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            visit_expr_types(lhs, f);
            visit_expr_types(rhs, f);
        }
        ExprKind::Call { receiver, args, .. } => {
            match receiver {
                Some(Receiver::Expr(e)) => visit_expr_types(e, f),
                Some(Receiver::Type(ty)) => f(ty),
                _ => {}
            }
            for a in args {
                visit_expr_types(a, f);
            }
        }
        ExprKind::New { ty, args } => {
            f(ty);
            for a in args {
                visit_expr_types(a, f);
            }
        }
        ExprKind::Cast { ty, operand } => {
            f(ty);
            visit_expr_types(operand, f);
        }
        _ => {}
    }
}
