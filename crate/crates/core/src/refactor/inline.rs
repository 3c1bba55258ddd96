//! The inline rewrite: splice a callee's body into its single call site.
//!
//! Each parameter becomes a fresh local declaration bound to the argument
//! expression, so the spliced statements are always a contiguous range; that
//! range is reported as the oracle entry.

use std::collections::BTreeSet;

use super::{block_at_path_mut, find_class, find_method, renormalize, OracleEntry, RefactorError};
use crate::structure::{build_blocks, PathStep};
use crate::syntax::*;

/// Where the unique call statement lives.
#[derive(Debug, Clone)]
pub(crate) struct CallSite {
    pub method_idx: usize,
    pub method_name: String,
    /// Path to the block containing the call statement.
    pub path: Vec<PathStep>,
    /// Block id and 1-based index of the call statement.
    pub block_id: usize,
    pub index: usize,
}

pub(crate) fn check_inline(
    unit: &SourceUnit,
    class_name: &str,
    callee_name: &str,
) -> Result<CallSite, RefactorError> {
    let (_, class) = find_class(unit, class_name)?;
    let (callee_idx, callee) = find_method(class, callee_name)?;

    let err = |message: &str| RefactorError::Inline {
        callee: callee_name.to_string(),
        message: message.to_string(),
    };

    // the callee body may end with `return v;` but contain no other return
    let body_len = callee.body.stmts.len();
    let mut returns = Vec::new();
    for (idx, stmt) in callee.body.stmts.iter().enumerate() {
        collect_returns(stmt, idx + 1 == body_len, &mut returns);
    }
    if returns.iter().any(|ok| !ok) {
        return Err(err("body has a return that is not a trailing `return <var>;`"));
    }

    // exactly one call, as a whole statement, outside the callee itself
    let mut count = 0usize;
    for field in &class.fields {
        if let Some(init) = &field.init {
            count += count_calls_expr(init, callee_name);
        }
    }
    let mut site = None;
    for (method_idx, method) in class.methods.iter().enumerate() {
        let in_callee = method_idx == callee_idx;
        let labeled = build_blocks(method);
        for block in &labeled.blocks {
            for (i, stmt) in block.statements.iter().enumerate() {
                let stmt_calls = count_calls_stmt(stmt, callee_name);
                count += stmt_calls;
                if stmt_calls == 0 {
                    continue;
                }
                if in_callee {
                    return Err(err("callee is recursive"));
                }
                if stmt_calls == 1 && call_of_stmt(stmt, callee_name).is_some() {
                    site = Some(CallSite {
                        method_idx,
                        method_name: method.name.clone(),
                        path: block.path.clone(),
                        block_id: block.block_id,
                        index: i + 1,
                    });
                }
            }
        }
    }
    if count != 1 {
        return Err(err(&format!("called {count} times in the class, need exactly 1")));
    }
    site.ok_or_else(|| err("call site is not a simple statement"))
}

/// Inline `callee_name` into its unique call site inside `class_name`.
/// Returns the rewritten unit and the oracle entry covering the spliced
/// statements. The entry's `file` field is left empty.
pub fn inline(
    unit: &SourceUnit,
    class_name: &str,
    callee_name: &str,
) -> Result<(SourceUnit, OracleEntry), RefactorError> {
    let site = check_inline(unit, class_name, callee_name)?;
    let (class_idx, class) = find_class(unit, class_name)?;
    let (callee_idx, callee) = find_method(class, callee_name)?;
    let host = &class.methods[site.method_idx];

    let err = |message: &str| RefactorError::Inline {
        callee: callee_name.to_string(),
        message: message.to_string(),
    };

    // rename callee locals that would collide at the call site
    let mut taken: BTreeSet<String> = collect_decl_names(&host.body);
    taken.extend(host.params.iter().map(|p| p.name.clone()));
    taken.extend(class.fields.iter().map(|f| f.name.clone()));
    let callee_names: BTreeSet<String> = {
        let mut n = collect_decl_names(&callee.body);
        n.extend(callee.params.iter().map(|p| p.name.clone()));
        n
    };
    let mut rename = std::collections::BTreeMap::new();
    for name in &callee_names {
        if taken.contains(name) {
            let mut n = 1usize;
            loop {
                let candidate = format!("{name}_{n}");
                if !taken.contains(&candidate) && !callee_names.contains(&candidate) {
                    rename.insert(name.clone(), candidate.clone());
                    taken.insert(candidate);
                    break;
                }
                n += 1;
            }
        }
    }

    // the call statement decides what happens to a trailing return
    let call_stmt = {
        let labeled = build_blocks(host);
        let block = labeled.block(site.block_id).expect("call block");
        (*block.statements[site.index - 1]).clone()
    };
    let call_expr = call_of_stmt(&call_stmt, callee_name).expect("checked call site").clone();
    let ExprKind::Call { args, .. } = &call_expr.kind else { unreachable!() };
    if args.len() != callee.params.len() {
        return Err(err("argument count does not match the parameter list"));
    }

    let mut spliced: Vec<Stmt> = Vec::new();
    for (param, arg) in callee.params.iter().zip(args) {
        let name = rename.get(&param.name).cloned().unwrap_or_else(|| param.name.clone());
        spliced.push(plain_stmt(StmtKind::VarDecl {
            ty: param.ty.clone(),
            name,
            init: Some(arg.clone()),
        }));
    }

    let mut body = callee.body.stmts.clone();
    let trailing_return = match body.last().map(|s| &s.kind) {
        Some(StmtKind::Return { value: Some(expr) }) => match &expr.kind {
            ExprKind::VarRef(name) => {
                let renamed = rename.get(name).cloned().unwrap_or_else(|| name.clone());
                body.pop();
                Some(renamed)
            }
            _ => return Err(err("trailing return does not return a variable")),
        },
        Some(StmtKind::Return { value: None }) => {
            body.pop();
            None
        }
        _ => None,
    };
    for stmt in &mut body {
        rename_stmt(stmt, &rename);
    }
    spliced.extend(body);

    match (&call_stmt.kind, trailing_return) {
        (StmtKind::ExprStmt { .. }, _) => {}
        (StmtKind::VarDecl { ty, name, .. }, Some(ret)) => {
            spliced.push(plain_stmt(StmtKind::VarDecl {
                ty: ty.clone(),
                name: name.clone(),
                init: Some(var_ref(&ret)),
            }));
        }
        (StmtKind::Assign { target, .. }, Some(ret)) => {
            spliced.push(plain_stmt(StmtKind::Assign {
                target: target.clone(),
                value: var_ref(&ret),
            }));
        }
        (StmtKind::VarDecl { .. }, None) | (StmtKind::Assign { .. }, None) => {
            return Err(err("call site expects a value but the callee returns none"));
        }
        _ => unreachable!("checked call site shape"),
    }

    let splice_len = spliced.len();
    if splice_len == 0 {
        return Err(err("nothing to splice"));
    }

    let mut out = unit.clone();
    {
        let host = &mut out.classes[class_idx].methods[site.method_idx];
        let target = block_at_path_mut(&mut host.body, &site.path);
        target.stmts.splice(site.index - 1..site.index, spliced);
    }
    out.classes[class_idx].methods.remove(callee_idx);

    let entry = OracleEntry {
        file: String::new(),
        class_name: class_name.to_string(),
        method: site.method_name.clone(),
        block: site.block_id,
        start: site.index,
        end: site.index + splice_len - 1,
        inlined_from: callee_name.to_string(),
    };
    Ok((renormalize(&out)?, entry))
}

fn plain_stmt(kind: StmtKind) -> Stmt {
    Stmt { id: StmtId(0), kind, span: Span::default() }
}

fn var_ref(name: &str) -> Expr {
    Expr { kind: ExprKind::VarRef(name.to_string()), span: Span::default() }
}

/// Record for each return whether it is acceptable (trailing, top level).
fn collect_returns(stmt: &Stmt, is_trailing_top: bool, out: &mut Vec<bool>) {
    if matches!(stmt.kind, StmtKind::Return { .. }) {
        out.push(is_trailing_top);
    }
    for block in stmt.child_blocks() {
        for child in &block.stmts {
            collect_returns(child, false, out);
        }
    }
}

/// The call expression if this statement is exactly `callee(args);`,
/// `T v = callee(args);`, or `v = callee(args);`.
fn call_of_stmt<'s>(stmt: &'s Stmt, callee: &str) -> Option<&'s Expr> {
    let expr = match &stmt.kind {
        StmtKind::ExprStmt { expr } => expr,
        StmtKind::VarDecl { init: Some(expr), .. } => expr,
        StmtKind::Assign { value, .. } => value,
        _ => return None,
    };
    match &expr.kind {
        ExprKind::Call { receiver: None, method, .. } if method == callee => Some(expr),
        _ => None,
    }
}

fn count_calls_stmt(stmt: &Stmt, callee: &str) -> usize {
    let mut count = 0;
    each_expr_stmt(stmt, &mut |e| count += count_calls_expr(e, callee));
    count
}

fn each_expr_stmt<F: FnMut(&Expr)>(stmt: &Stmt, f: &mut F) {
    match &stmt.kind {
        StmtKind::VarDecl { init, .. } => {
            if let Some(e) = init {
                f(e);
            }
        }
        StmtKind::Assign { value, .. } => f(value),
        StmtKind::ExprStmt { expr } => f(expr),
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => f(cond),
        StmtKind::For { init, cond, update, .. } => {
            match init {
                Some(ForInit::Decl { init: Some(e), .. }) => f(e),
                Some(ForInit::Assign { value, .. }) => f(value),
                _ => {}
            }
            if let Some(c) = cond {
                f(c);
            }
            if let Some((_, e)) = update {
                f(e);
            }
        }
        StmtKind::Return { value } => {
            if let Some(e) = value {
                f(e);
            }
        }
        _ => {}
    }
    // headers only; nested statements are visited by the block walk
}

fn count_calls_expr(expr: &Expr, callee: &str) -> usize {
    let mut count = 0;
    match &expr.kind {
        ExprKind::Call { receiver, method, args } => {
            if receiver.is_none() && method == callee {
                count += 1;
            }
            if let Some(Receiver::Expr(e)) = receiver {
                count += count_calls_expr(e, callee);
            }
            for a in args {
                count += count_calls_expr(a, callee);
            }
        }
        ExprKind::Unary { operand, .. } => count += count_calls_expr(operand, callee),
        ExprKind::Binary { lhs, rhs, .. } => {
            count += count_calls_expr(lhs, callee) + count_calls_expr(rhs, callee);
        }
        ExprKind::New { args, .. } => {
            for a in args {
                count += count_calls_expr(a, callee);
            }
        }
        ExprKind::Cast { operand, .. } => count += count_calls_expr(operand, callee),
        _ => {}
    }
    count
}

fn collect_decl_names(block: &Block) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    fn walk(block: &Block, names: &mut BTreeSet<String>) {
        for stmt in &block.stmts {
            match &stmt.kind {
                StmtKind::VarDecl { name, .. } => {
                    names.insert(name.clone());
                }
                StmtKind::For { init: Some(ForInit::Decl { name, .. }), .. } => {
                    names.insert(name.clone());
                }
                _ => {}
            }
            for child in stmt.child_blocks() {
                walk(child, names);
            }
        }
    }
    walk(block, &mut names);
    names
}

/// Apply a local-name substitution through a statement tree.
fn rename_stmt(stmt: &mut Stmt, map: &std::collections::BTreeMap<String, String>) {
    if map.is_empty() {
        return;
    }
    let rename = |name: &mut String| {
        if let Some(n) = map.get(name) {
            *name = n.clone();
        }
    };
    match &mut stmt.kind {
        StmtKind::VarDecl { name, init, .. } => {
            rename(name);
            if let Some(e) = init {
                rename_expr(e, map);
            }
        }
        StmtKind::Assign { target, value } => {
            if let LValue::Var(name) = target {
                rename(name);
            }
            rename_expr(value, map);
        }
        StmtKind::ExprStmt { expr } => rename_expr(expr, map),
        StmtKind::If { cond, then_block, else_block } => {
            rename_expr(cond, map);
            rename_block(then_block, map);
            if let Some(e) = else_block {
                rename_block(e, map);
            }
        }
        StmtKind::While { cond, body } => {
            rename_expr(cond, map);
            rename_block(body, map);
        }
        StmtKind::For { init, cond, update, body } => {
            match init {
                Some(ForInit::Decl { name, init, .. }) => {
                    rename(name);
                    if let Some(e) = init {
                        rename_expr(e, map);
                    }
                }
                Some(ForInit::Assign { target, value }) => {
                    if let LValue::Var(name) = target {
                        rename(name);
                    }
                    rename_expr(value, map);
                }
                None => {}
            }
            if let Some(c) = cond {
                rename_expr(c, map);
            }
            if let Some((lv, e)) = update {
                if let LValue::Var(name) = lv {
                    rename(name);
                }
                rename_expr(e, map);
            }
            rename_block(body, map);
        }
        StmtKind::Return { value } => {
            if let Some(e) = value {
                rename_expr(e, map);
            }
        }
        StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(inner) => rename_block(inner, map),
    }
}

fn rename_block(block: &mut Block, map: &std::collections::BTreeMap<String, String>) {
    for stmt in &mut block.stmts {
        rename_stmt(stmt, map);
    }
}

fn rename_expr(expr: &mut Expr, map: &std::collections::BTreeMap<String, String>) {
    match &mut expr.kind {
        ExprKind::VarRef(name) => {
            if let Some(n) = map.get(name) {
                *name = n.clone();
            }
        }
        ExprKind::Unary { operand, .. } => rename_expr(operand, map),
        ExprKind::Binary { lhs, rhs, .. } => {
            rename_expr(lhs, map);
            rename_expr(rhs, map);
        }
        ExprKind::Call { receiver, args, .. } => {
            match receiver {
                Some(Receiver::Expr(e)) => rename_expr(e, map),
                Some(Receiver::Name { segments, .. }) => {
                    if segments.len() == 1 {
                        if let Some(n) = map.get(&segments[0]) {
                            segments[0] = n.clone();
                        }
                    }
                }
                _ => {}
            }
            for a in args {
                rename_expr(a, map);
            }
        }
        ExprKind::New { args, .. } => {
            for a in args {
                rename_expr(a, map);
            }
        }
        ExprKind::Cast { operand, .. } => rename_expr(operand, map),
        _ => {}
    }
}
