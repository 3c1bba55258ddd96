//! Name resolution: fully qualifies every named type reference and
//! classifies call receivers as variables or static type names.
//!
//! Simple names resolve by (1) exact last-segment import match, (2) classes
//! declared in the same unit, (3) same-package fallback. Dotted names resolve
//! to themselves. Builtins resolve to nothing.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::ResolveError;

pub fn resolve_types(unit: &SourceUnit) -> Result<SourceUnit, ResolveError> {
    let mut imports_by_last: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for imp in &unit.imports {
        let last = imp.rsplit('.').next().unwrap().to_string();
        imports_by_last.entry(last).or_default().push(imp.clone());
    }
    let local_classes: BTreeSet<String> = unit.classes.iter().map(|c| c.name.clone()).collect();
    let cx = Resolver { package: unit.package.clone(), imports_by_last, local_classes };

    let mut out = unit.clone();
    for class in &mut out.classes {
        cx.resolve_class(class)?;
    }
    Ok(out)
}

struct Resolver {
    package: String,
    imports_by_last: BTreeMap<String, Vec<String>>,
    local_classes: BTreeSet<String>,
}

/// Names visible as variables at some point in a method body.
struct Scopes {
    fields: BTreeSet<String>,
    params: BTreeSet<String>,
    locals: Vec<BTreeSet<String>>,
}

impl Scopes {
    fn is_var(&self, name: &str) -> bool {
        self.locals.iter().any(|s| s.contains(name))
            || self.params.contains(name)
            || self.fields.contains(name)
    }

    fn bind(&mut self, name: &str) {
        self.locals.last_mut().expect("scope stack").insert(name.to_string());
    }
}

impl Resolver {
    fn resolve_class(&self, class: &mut ClassDecl) -> Result<(), ResolveError> {
        let fields: BTreeSet<String> = class.fields.iter().map(|f| f.name.clone()).collect();
        for field in &mut class.fields {
            self.resolve_type(&mut field.ty)?;
            if let Some(init) = &mut field.init {
                let mut scopes =
                    Scopes { fields: fields.clone(), params: BTreeSet::new(), locals: vec![BTreeSet::new()] };
                self.resolve_expr(init, &mut scopes)?;
            }
        }
        for method in &mut class.methods {
            if let Some(rt) = &mut method.return_type {
                self.resolve_type(rt)?;
            }
            let mut scopes = Scopes {
                fields: fields.clone(),
                params: method.params.iter().map(|p| p.name.clone()).collect(),
                locals: Vec::new(),
            };
            for p in &mut method.params {
                self.resolve_type(&mut p.ty)?;
            }
            self.resolve_block(&mut method.body, &mut scopes)?;
        }
        Ok(())
    }

    fn resolve_type(&self, ty: &mut TypeRef) -> Result<(), ResolveError> {
        if ty.is_builtin() {
            return Ok(());
        }
        if ty.name.contains('.') {
            ty.resolved = Some(ty.name.clone());
            return Ok(());
        }
        if let Some(matches) = self.imports_by_last.get(&ty.name) {
            if matches.len() > 1 {
                return Err(ResolveError::AmbiguousType {
                    name: ty.name.clone(),
                    candidates: matches.clone(),
                    line: ty.span.start_line,
                    col: ty.span.start_col,
                });
            }
            ty.resolved = Some(matches[0].clone());
            return Ok(());
        }
        // declared in this unit, or assumed to live in the current package
        let _ = self.local_classes.contains(&ty.name);
        ty.resolved = Some(format!("{}.{}", self.package, ty.name));
        Ok(())
    }

    fn resolve_block(&self, block: &mut Block, scopes: &mut Scopes) -> Result<(), ResolveError> {
        scopes.locals.push(BTreeSet::new());
        for stmt in &mut block.stmts {
            self.resolve_stmt(stmt, scopes)?;
        }
        scopes.locals.pop();
        Ok(())
    }

    fn resolve_stmt(&self, stmt: &mut Stmt, scopes: &mut Scopes) -> Result<(), ResolveError> {
        match &mut stmt.kind {
            StmtKind::VarDecl { ty, name, init } => {
                self.resolve_type(ty)?;
                if let Some(e) = init {
                    self.resolve_expr(e, scopes)?;
                }
                scopes.bind(name);
            }
            StmtKind::Assign { value, .. } => self.resolve_expr(value, scopes)?,
            StmtKind::ExprStmt { expr } => self.resolve_expr(expr, scopes)?,
            StmtKind::If { cond, then_block, else_block } => {
                self.resolve_expr(cond, scopes)?;
                self.resolve_block(then_block, scopes)?;
                if let Some(e) = else_block {
                    self.resolve_block(e, scopes)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.resolve_expr(cond, scopes)?;
                self.resolve_block(body, scopes)?;
            }
            StmtKind::For { init, cond, update, body } => {
                scopes.locals.push(BTreeSet::new());
                match init {
                    Some(ForInit::Decl { ty, name, init }) => {
                        self.resolve_type(ty)?;
                        if let Some(e) = init {
                            self.resolve_expr(e, scopes)?;
                        }
                        scopes.bind(name);
                    }
                    Some(ForInit::Assign { value, .. }) => self.resolve_expr(value, scopes)?,
                    None => {}
                }
                if let Some(c) = cond {
                    self.resolve_expr(c, scopes)?;
                }
                if let Some((_, e)) = update {
                    self.resolve_expr(e, scopes)?;
                }
                self.resolve_block(body, scopes)?;
                scopes.locals.pop();
            }
            StmtKind::Return { value } => {
                if let Some(e) = value {
                    self.resolve_expr(e, scopes)?;
                }
            }
            StmtKind::Break | StmtKind::Continue => {}
            StmtKind::Block(inner) => self.resolve_block(inner, scopes)?,
        }
        Ok(())
    }

    fn resolve_expr(&self, expr: &mut Expr, scopes: &mut Scopes) -> Result<(), ResolveError> {
        match &mut expr.kind {
            ExprKind::Unary { operand, .. } => self.resolve_expr(operand, scopes)?,
            ExprKind::Binary { lhs, rhs, .. } => {
                self.resolve_expr(lhs, scopes)?;
                self.resolve_expr(rhs, scopes)?;
            }
            ExprKind::Call { receiver, args, .. } => {
                if let Some(r) = receiver {
                    match r {
                        Receiver::Expr(inner) => self.resolve_expr(inner, scopes)?,
                        Receiver::Name { segments, span } => {
                            if segments.len() == 1 && scopes.is_var(&segments[0]) {
                                *r = Receiver::Expr(Box::new(Expr {
                                    kind: ExprKind::VarRef(segments[0].clone()),
                                    span: *span,
                                }));
                            } else {
                                let mut ty = TypeRef::named(segments.join("."), *span);
                                self.resolve_type(&mut ty)?;
                                *r = Receiver::Type(ty);
                            }
                        }
                        Receiver::Type(ty) => self.resolve_type(ty)?,
                    }
                }
                for a in args {
                    self.resolve_expr(a, scopes)?;
                }
            }
            ExprKind::New { ty, args } => {
                self.resolve_type(ty)?;
                for a in args {
                    self.resolve_expr(a, scopes)?;
                }
            }
            ExprKind::Cast { ty, operand } => {
                self.resolve_type(ty)?;
                self.resolve_expr(operand, scopes)?;
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn first_decl_type(unit: &SourceUnit) -> String {
        match &unit.classes[0].methods[0].body.stmts[0].kind {
            StmtKind::VarDecl { ty, .. } => ty.resolved.clone().unwrap(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn import_match_wins() {
        let unit = parse(
            "package p; import org.app.ui.FigClass; class C { void m() { FigClass f = new FigClass(); } }",
        )
        .unwrap();
        let resolved = resolve_types(&unit).unwrap();
        assert_eq!(first_decl_type(&resolved), "org.app.ui.FigClass");
    }

    #[test]
    fn same_unit_class_resolves_to_package() {
        let unit =
            parse("package p; class D { } class C { void m() { D d = new D(); } }").unwrap();
        let resolved = resolve_types(&unit).unwrap();
        match &resolved.classes[1].methods[0].body.stmts[0].kind {
            StmtKind::VarDecl { ty, .. } => assert_eq!(ty.resolved.as_deref(), Some("p.D")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_simple_name_defaults_to_package() {
        let unit = parse("package p; class C { void m() { Widget w = new Widget(); } }").unwrap();
        let resolved = resolve_types(&unit).unwrap();
        assert_eq!(first_decl_type(&resolved), "p.Widget");
    }

    #[test]
    fn ambiguous_import_is_an_error() {
        let unit = parse(
            "package p; import a.X; import b.X; class C { void m() { X x = new X(); } }",
        )
        .unwrap();
        let err = resolve_types(&unit).unwrap_err();
        assert!(err.to_string().contains("ambiguous"));
    }

    #[test]
    fn dotted_name_resolves_to_itself() {
        let unit = parse("package p; class C { void m() { a.b.T t = new a.b.T(); } }").unwrap();
        let resolved = resolve_types(&unit).unwrap();
        assert_eq!(first_decl_type(&resolved), "a.b.T");
    }

    #[test]
    fn receivers_are_classified() {
        let unit = parse(
            "package p; import u.Screen; class C { int f; void m(int a) { a = Screen.width(); g(a); this.f = 1; } void g(int x) { x = x + 1; } }",
        )
        .unwrap();
        let resolved = resolve_types(&unit).unwrap();
        let stmts = &resolved.classes[0].methods[0].body.stmts;
        match &stmts[0].kind {
            StmtKind::Assign { value, .. } => match &value.kind {
                ExprKind::Call { receiver: Some(Receiver::Type(ty)), .. } => {
                    assert_eq!(ty.resolved.as_deref(), Some("u.Screen"));
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn variable_receiver_becomes_var_ref() {
        let unit = parse(
            "package p; import u.Fig; class C { void m(Fig fig) { fig.draw(); } }",
        )
        .unwrap();
        let resolved = resolve_types(&unit).unwrap();
        match &resolved.classes[0].methods[0].body.stmts[0].kind {
            StmtKind::ExprStmt { expr } => match &expr.kind {
                ExprKind::Call { receiver: Some(Receiver::Expr(e)), .. } => {
                    assert!(matches!(e.kind, ExprKind::VarRef(ref n) if n == "fig"));
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn resolution_is_total_on_named_types() {
        let unit = parse(
            "package p; import a.B; class C { B b; void m(B x, q.r.S s) { B y = (B) x; s = new q.r.S(); } }",
        )
        .unwrap();
        let resolved = resolve_types(&unit).unwrap();
        let mut named = 0;
        crate::syntax::visit_types(&resolved, &mut |ty| {
            if !ty.is_builtin() {
                named += 1;
                assert!(ty.resolved.is_some(), "unresolved type {}", ty.name);
            }
        });
        assert!(named >= 5);
    }
}
