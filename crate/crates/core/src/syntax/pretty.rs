//! Deterministic source printer: 4-space indent, one statement per line.
//!
//! The output re-parses to a unit structurally equal to the input (spans
//! excluded). Expressions are parenthesized from operator precedence, never
//! from the original source text.

use super::ast::*;

pub fn pretty_print(unit: &SourceUnit) -> String {
    let mut out = String::new();
    out.push_str(&format!("package {};\n", unit.package));
    for imp in &unit.imports {
        out.push_str(&format!("import {imp};\n"));
    }
    for class in &unit.classes {
        out.push_str(&format!("class {} {{\n", class.name));
        for field in &class.fields {
            match &field.init {
                Some(e) => out.push_str(&format!(
                    "    {} {} = {};\n",
                    field.ty.name,
                    field.name,
                    expr_to_string(e)
                )),
                None => out.push_str(&format!("    {} {};\n", field.ty.name, field.name)),
            }
        }
        for method in &class.methods {
            let ret = method.return_type.as_ref().map_or("void", |t| t.name.as_str());
            let params = method
                .params
                .iter()
                .map(|p| format!("{} {}", p.ty.name, p.name))
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!("    {ret} {}({params}) {{\n", method.name));
            for stmt in &method.body.stmts {
                write_stmt(&mut out, stmt, 2);
            }
            out.push_str("    }\n");
        }
        out.push_str("}\n");
    }
    out
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("    ");
    }
}

pub(crate) fn write_stmt(out: &mut String, stmt: &Stmt, indent: usize) {
    pad(out, indent);
    match &stmt.kind {
        StmtKind::VarDecl { .. } | StmtKind::Assign { .. } | StmtKind::ExprStmt { .. }
        | StmtKind::Return { .. } | StmtKind::Break | StmtKind::Continue => {
            out.push_str(&stmt_line(stmt));
            out.push('\n');
        }
        StmtKind::If { cond, then_block, else_block } => {
            out.push_str(&format!("if ({}) {{\n", expr_to_string(cond)));
            for s in &then_block.stmts {
                write_stmt(out, s, indent + 1);
            }
            if let Some(else_block) = else_block {
                pad(out, indent);
                out.push_str("} else {\n");
                for s in &else_block.stmts {
                    write_stmt(out, s, indent + 1);
                }
            }
            pad(out, indent);
            out.push_str("}\n");
        }
        StmtKind::While { cond, body } => {
            out.push_str(&format!("while ({}) {{\n", expr_to_string(cond)));
            for s in &body.stmts {
                write_stmt(out, s, indent + 1);
            }
            pad(out, indent);
            out.push_str("}\n");
        }
        StmtKind::For { body, .. } => {
            out.push_str(&format!("{} {{\n", for_header(stmt)));
            for s in &body.stmts {
                write_stmt(out, s, indent + 1);
            }
            pad(out, indent);
            out.push_str("}\n");
        }
        StmtKind::Block(inner) => {
            out.push_str("{\n");
            for s in &inner.stmts {
                write_stmt(out, s, indent + 1);
            }
            pad(out, indent);
            out.push_str("}\n");
        }
    }
}

/// One-line rendering of a simple statement, or the header of a composite one
/// (without the opening brace).
pub fn stmt_line(stmt: &Stmt) -> String {
    match &stmt.kind {
        StmtKind::VarDecl { ty, name, init } => match init {
            Some(e) => format!("{} {} = {};", ty.name, name, expr_to_string(e)),
            None => format!("{} {};", ty.name, name),
        },
        StmtKind::Assign { target, value } => {
            format!("{} = {};", lvalue_to_string(target), expr_to_string(value))
        }
        StmtKind::ExprStmt { expr } => format!("{};", expr_to_string(expr)),
        StmtKind::If { cond, .. } => format!("if ({})", expr_to_string(cond)),
        StmtKind::While { cond, .. } => format!("while ({})", expr_to_string(cond)),
        StmtKind::For { .. } => for_header(stmt),
        StmtKind::Return { value } => match value {
            Some(e) => format!("return {};", expr_to_string(e)),
            None => "return;".to_string(),
        },
        StmtKind::Break => "break;".to_string(),
        StmtKind::Continue => "continue;".to_string(),
        StmtKind::Block(_) => "{".to_string(),
    }
}

fn for_header(stmt: &Stmt) -> String {
    let StmtKind::For { init, cond, update, .. } = &stmt.kind else { unreachable!() };
    let init_part = match init {
        Some(ForInit::Decl { ty, name, init: Some(e) }) => {
            format!("{} {} = {};", ty.name, name, expr_to_string(e))
        }
        Some(ForInit::Decl { ty, name, init: None }) => format!("{} {};", ty.name, name),
        Some(ForInit::Assign { target, value }) => {
            format!("{} = {};", lvalue_to_string(target), expr_to_string(value))
        }
        None => ";".to_string(),
    };
    let cond_part = match cond {
        Some(c) => format!(" {};", expr_to_string(c)),
        None => ";".to_string(),
    };
    let update_part = match update {
        Some((lv, e)) => format!(" {} = {}", lvalue_to_string(lv), expr_to_string(e)),
        None => String::new(),
    };
    format!("for ({init_part}{cond_part}{update_part})")
}

pub fn lvalue_to_string(lv: &LValue) -> String {
    match lv {
        LValue::Var(n) => n.clone(),
        LValue::Field(n) => format!("this.{n}"),
    }
}

// Precedence levels; higher binds tighter. Mirrors the parser.
fn bin_level(op: BinaryOp) -> u8 {
    match op {
        BinaryOp::Or => 1,
        BinaryOp::And => 2,
        BinaryOp::Eq | BinaryOp::Ne => 3,
        BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
        BinaryOp::Add | BinaryOp::Sub => 5,
        BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
    }
}

const UNARY_LEVEL: u8 = 7;
const PRIMARY_LEVEL: u8 = 8;

fn level(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Binary { op, .. } => bin_level(*op),
        ExprKind::Unary { .. } | ExprKind::Cast { .. } => UNARY_LEVEL,
        _ => PRIMARY_LEVEL,
    }
}

fn bin_op_text(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::Or => "||",
        BinaryOp::And => "&&",
        BinaryOp::Eq => "==",
        BinaryOp::Ne => "!=",
        BinaryOp::Lt => "<",
        BinaryOp::Le => "<=",
        BinaryOp::Gt => ">",
        BinaryOp::Ge => ">=",
        BinaryOp::Add => "+",
        BinaryOp::Sub => "-",
        BinaryOp::Mul => "*",
        BinaryOp::Div => "/",
        BinaryOp::Rem => "%",
    }
}

pub fn expr_to_string(expr: &Expr) -> String {
    match &expr.kind {
        ExprKind::IntLit(v) => v.to_string(),
        ExprKind::DoubleLit(text) => text.clone(),
        ExprKind::BoolLit(b) => b.to_string(),
        ExprKind::StrLit(s) => escape_string(s),
        ExprKind::VarRef(n) => n.clone(),
        ExprKind::FieldRef(n) => format!("this.{n}"),
        ExprKind::Unary { op, operand } => {
            let text = maybe_paren(operand, UNARY_LEVEL);
            match op {
                UnaryOp::Not => format!("!{text}"),
                UnaryOp::Neg => format!("-{text}"),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let lv = bin_level(*op);
            let left = if level(lhs) < lv { paren(lhs) } else { expr_to_string(lhs) };
            let right = if level(rhs) <= lv { paren(rhs) } else { expr_to_string(rhs) };
            format!("{left} {} {right}", bin_op_text(*op))
        }
        ExprKind::Call { receiver, method, args } => {
            let args = args.iter().map(expr_to_string).collect::<Vec<_>>().join(", ");
            match receiver {
                None => format!("{method}({args})"),
                Some(Receiver::Name { segments, .. }) => {
                    format!("{}.{method}({args})", segments.join("."))
                }
                Some(Receiver::Type(ty)) => format!("{}.{method}({args})", ty.name),
                Some(Receiver::Expr(e)) => {
                    // receivers must be primaries when re-parsed
                    let text = if level(e) < PRIMARY_LEVEL { paren(e) } else { expr_to_string(e) };
                    format!("{text}.{method}({args})")
                }
            }
        }
        ExprKind::New { ty, args } => {
            let args = args.iter().map(expr_to_string).collect::<Vec<_>>().join(", ");
            format!("new {}({args})", ty.name)
        }
        ExprKind::Cast { ty, operand } => {
            // a bare `-` after `(Name)` would re-parse as subtraction
            let force = matches!(operand.kind, ExprKind::Unary { op: UnaryOp::Neg, .. });
            let text =
                if force || level(operand) < UNARY_LEVEL { paren(operand) } else { expr_to_string(operand) };
            format!("({}) {text}", ty.name)
        }
    }
}

fn maybe_paren(expr: &Expr, min: u8) -> String {
    if level(expr) < min {
        paren(expr)
    } else {
        expr_to_string(expr)
    }
}

fn paren(expr: &Expr) -> String {
    format!("({})", expr_to_string(expr))
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}
