//! The extraction rewrite: move a valid selection into a new method of the
//! same class and replace it with a call.

use super::{block_at_path_mut, find_class, find_method, renormalize, RefactorError};
use crate::candidates::{is_valid, GenerationConfig};
use crate::deps::{self, VarId, VarKind};
use crate::structure::{build_blocks, LabeledMethod};
use crate::syntax::*;

/// Extract statements `start..=end` of `block` in the given method into a new
/// method `new_name`, called where the statements were.
///
/// Parameters of the new method are the selection's inputs, in first-read
/// order. A single live-out variable becomes the return value; the call site
/// then declares or assigns it depending on where it was declared.
pub fn extract(
    unit: &SourceUnit,
    class_name: &str,
    method_name: &str,
    block: usize,
    start: usize,
    end: usize,
    new_name: &str,
    cfg: &GenerationConfig,
) -> Result<SourceUnit, RefactorError> {
    let (class_idx, class) = find_class(unit, class_name)?;
    let (method_idx, method) = find_method(class, method_name)?;
    if class.methods.iter().any(|m| m.name == new_name) {
        return Err(RefactorError::NameClash { name: new_name.to_string() });
    }

    let labeled = build_blocks(method);
    let def_use = deps::def_use(&labeled, class);
    let sel = labeled.selection(block, start, end)?;
    let verdict = is_valid(&labeled, &def_use, &sel, cfg);
    if !verdict.valid {
        return Err(RefactorError::Precondition { reasons: verdict.reasons });
    }

    let input_vars = deps::inputs(&labeled, &def_use, &sel);
    let live = deps::live_out(&labeled, &def_use, &sel);
    let live_var = live.iter().next().cloned();

    // locals assigned inside but declared before the selection need a local
    // slot in the new method unless they already arrive as parameters
    let closure: std::collections::HashSet<StmtId> = sel.closure.iter().copied().collect();
    let mut outer_assigned: Vec<VarId> = Vec::new();
    for id in &sel.closure {
        for def in &def_use.facts(*id).defs {
            if def.kind != VarKind::Local || input_vars.contains(def) || outer_assigned.contains(def) {
                continue;
            }
            let declared_inside = def
                .decl
                .and_then(|label| labeled.stmt_at(label))
                .map(|s| closure.contains(&s.id))
                .unwrap_or(false);
            if !declared_inside {
                outer_assigned.push(def.clone());
            }
        }
    }

    let live_declared_inside = live_var.as_ref().map(|v| {
        v.decl
            .and_then(|label| labeled.stmt_at(label))
            .map(|s| closure.contains(&s.id))
            .unwrap_or(false)
    });

    let params: Vec<Param> = input_vars
        .iter()
        .map(|v| Param {
            ty: var_type(&labeled, v).expect("input has a declared type"),
            name: v.name.clone(),
            span: Span::default(),
        })
        .collect();
    let return_type = live_var
        .as_ref()
        .map(|v| var_type(&labeled, v).expect("live-out has a declared type"));
    let prepend_decls: Vec<(String, TypeRef)> = outer_assigned
        .iter()
        .map(|v| (v.name.clone(), var_type(&labeled, v).expect("assigned local has a declaration")))
        .collect();

    let target_path = labeled.block(block).expect("selected block").path.clone();
    drop(labeled);

    let mut out = unit.clone();
    let host = &mut out.classes[class_idx].methods[method_idx];
    let target = block_at_path_mut(&mut host.body, &target_path);
    let mut extracted: Vec<Stmt> = target.stmts.drain(start - 1..end).collect();

    for (name, ty) in prepend_decls.into_iter().rev() {
        extracted.insert(0, plain_stmt(StmtKind::VarDecl { ty, name, init: None }));
    }

    let call = Expr {
        kind: ExprKind::Call {
            receiver: None,
            method: new_name.to_string(),
            args: input_vars
                .iter()
                .map(|v| Expr { kind: ExprKind::VarRef(v.name.clone()), span: Span::default() })
                .collect(),
        },
        span: Span::default(),
    };
    let call_stmt = match (&live_var, live_declared_inside) {
        (Some(v), Some(true)) => plain_stmt(StmtKind::VarDecl {
            ty: return_type.clone().unwrap(),
            name: v.name.clone(),
            init: Some(call),
        }),
        (Some(v), _) => plain_stmt(StmtKind::Assign {
            target: LValue::Var(v.name.clone()),
            value: call,
        }),
        (None, _) => plain_stmt(StmtKind::ExprStmt { expr: call }),
    };
    let target = block_at_path_mut(&mut out.classes[class_idx].methods[method_idx].body, &target_path);
    target.stmts.insert(start - 1, call_stmt);

    if let Some(v) = &live_var {
        extracted.push(plain_stmt(StmtKind::Return {
            value: Some(Expr { kind: ExprKind::VarRef(v.name.clone()), span: Span::default() }),
        }));
    }

    let new_method = MethodDecl {
        return_type,
        name: new_name.to_string(),
        params,
        body: Block { stmts: extracted, span: Span::default() },
        span: Span::default(),
    };
    out.classes[class_idx].methods.insert(method_idx + 1, new_method);

    renormalize(&out)
}

fn plain_stmt(kind: StmtKind) -> Stmt {
    Stmt { id: StmtId(0), kind, span: Span::default() }
}

/// Declared type of a parameter or local.
fn var_type(labeled: &LabeledMethod<'_>, var: &VarId) -> Option<TypeRef> {
    match var.kind {
        VarKind::Param => labeled
            .method
            .params
            .iter()
            .find(|p| p.name == var.name)
            .map(|p| p.ty.clone()),
        VarKind::Local => {
            let stmt = labeled.stmt_at(var.decl?)?;
            match &stmt.kind {
                StmtKind::VarDecl { ty, .. } => Some(ty.clone()),
                StmtKind::For { init: Some(ForInit::Decl { ty, .. }), .. } => Some(ty.clone()),
                _ => None,
            }
        }
        VarKind::Field => None,
    }
}
