//! Dependency extraction: the variable, type, and package sets referenced by
//! a statement set, plus the def-use and liveness facts that extraction
//! preconditions need.
//!
//! Facts are computed per statement; a composite statement owns the reads of
//! its condition or loop header, while its child-block statements keep their
//! own entries. Set-level queries sum per-statement facts, so unions of
//! statement sets map to unions of dependency sets.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::structure::{LabeledMethod, Selection, StmtLabel};
use crate::syntax::{
    Block, ClassDecl, Expr, ExprKind, ForInit, LValue, Receiver, Stmt, StmtId, StmtKind, TypeRef,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Local,
    Param,
    Field,
}

/// Identity of a variable. Two locals with the same name but different
/// declaration sites are distinct; fields are keyed as `this.<name>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub kind: VarKind,
    pub name: String,
    /// Declaration site for locals; `None` for parameters and fields.
    pub decl: Option<StmtLabel>,
}

impl VarId {
    pub fn param(name: impl Into<String>) -> VarId {
        VarId { kind: VarKind::Param, name: name.into(), decl: None }
    }

    pub fn field(name: impl Into<String>) -> VarId {
        VarId { kind: VarKind::Field, name: name.into(), decl: None }
    }

    pub fn local(name: impl Into<String>, decl: StmtLabel) -> VarId {
        VarId { kind: VarKind::Local, name: name.into(), decl: Some(decl) }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Field => write!(f, "this.{}", self.name),
            _ => write!(f, "{}", self.name),
        }
    }
}

/// The three dependency sets of a statement set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DepSets {
    pub vars: BTreeSet<VarId>,
    /// Fully-qualified names of non-builtin types.
    pub types: BTreeSet<String>,
    /// Packages of those types, closed under the parent-package relation.
    pub packs: BTreeSet<String>,
}

/// Per-statement dependency facts for one method.
#[derive(Debug, Clone, Default)]
pub struct StmtFacts {
    pub defs: BTreeSet<VarId>,
    pub uses: BTreeSet<VarId>,
    /// Reads in source encounter order, duplicates included.
    pub uses_ordered: Vec<VarId>,
    pub types: BTreeSet<String>,
}

/// Def-use table of a method, keyed by statement identity.
#[derive(Debug, Clone, Default)]
pub struct DefUse {
    facts: BTreeMap<StmtId, StmtFacts>,
}

impl DefUse {
    pub fn facts(&self, id: StmtId) -> &StmtFacts {
        self.facts.get(&id).expect("statement analyzed")
    }
}

/// Compute per-statement defs, uses, and type mentions for a method.
/// The unit must be resolved.
pub fn def_use(labeled: &LabeledMethod<'_>, class: &ClassDecl) -> DefUse {
    let mut walker = Walker {
        labeled,
        fields: class.fields.iter().map(|f| f.name.clone()).collect(),
        params: labeled.method.params.iter().map(|p| p.name.clone()).collect(),
        scopes: Vec::new(),
        facts: BTreeMap::new(),
    };
    walker.walk_block(&labeled.method.body);
    DefUse { facts: walker.facts }
}

struct Walker<'a, 'm> {
    labeled: &'a LabeledMethod<'m>,
    fields: BTreeSet<String>,
    params: BTreeSet<String>,
    scopes: Vec<BTreeMap<String, VarId>>,
    facts: BTreeMap<StmtId, StmtFacts>,
}

impl<'a, 'm> Walker<'a, 'm> {
    fn classify(&self, name: &str) -> VarId {
        for scope in self.scopes.iter().rev() {
            if let Some(v) = scope.get(name) {
                return v.clone();
            }
        }
        if self.params.contains(name) {
            return VarId::param(name);
        }
        if self.fields.contains(name) {
            return VarId::field(name);
        }
        // undeclared; kept distinct from every declared local
        VarId { kind: VarKind::Local, name: name.to_string(), decl: None }
    }

    fn bind(&mut self, name: &str, decl: StmtLabel) {
        let var = VarId::local(name, decl);
        self.scopes.last_mut().expect("scope").insert(name.to_string(), var);
    }

    fn walk_block(&mut self, block: &Block) {
        self.scopes.push(BTreeMap::new());
        for stmt in &block.stmts {
            self.walk_stmt(stmt);
        }
        self.scopes.pop();
    }

    fn walk_stmt(&mut self, stmt: &Stmt) {
        let label = self.labeled.label(stmt.id).expect("labeled statement");
        let mut facts = StmtFacts::default();
        match &stmt.kind {
            StmtKind::VarDecl { ty, name, init } => {
                type_dep(ty, &mut facts.types);
                if let Some(e) = init {
                    self.expr(e, &mut facts);
                }
                self.bind(name, label);
                facts.defs.insert(VarId::local(name, label));
            }
            StmtKind::Assign { target, value } => {
                self.expr(value, &mut facts);
                facts.defs.insert(self.lvalue(target));
            }
            StmtKind::ExprStmt { expr } => self.expr(expr, &mut facts),
            StmtKind::If { cond, then_block, else_block } => {
                self.expr(cond, &mut facts);
                self.facts.insert(stmt.id, facts);
                self.walk_block(then_block);
                if let Some(e) = else_block {
                    self.walk_block(e);
                }
                return;
            }
            StmtKind::While { cond, body } => {
                self.expr(cond, &mut facts);
                self.facts.insert(stmt.id, facts);
                self.walk_block(body);
                return;
            }
            StmtKind::For { init, cond, update, body } => {
                self.scopes.push(BTreeMap::new());
                match init {
                    Some(ForInit::Decl { ty, name, init }) => {
                        type_dep(ty, &mut facts.types);
                        if let Some(e) = init {
                            self.expr(e, &mut facts);
                        }
                        self.bind(name, label);
                        facts.defs.insert(VarId::local(name, label));
                    }
                    Some(ForInit::Assign { target, value }) => {
                        self.expr(value, &mut facts);
                        facts.defs.insert(self.lvalue(target));
                    }
                    None => {}
                }
                if let Some(c) = cond {
                    self.expr(c, &mut facts);
                }
                if let Some((lv, e)) = update {
                    self.expr(e, &mut facts);
                    facts.defs.insert(self.lvalue(lv));
                }
                self.facts.insert(stmt.id, facts);
                self.walk_block(body);
                self.scopes.pop();
                return;
            }
            StmtKind::Return { value } => {
                if let Some(e) = value {
                    self.expr(e, &mut facts);
                }
            }
            StmtKind::Break | StmtKind::Continue => {}
            StmtKind::Block(inner) => {
                self.facts.insert(stmt.id, facts);
                self.walk_block(inner);
                return;
            }
        }
        self.facts.insert(stmt.id, facts);
    }

    fn lvalue(&self, lv: &LValue) -> VarId {
        match lv {
            LValue::Var(name) => self.classify(name),
            LValue::Field(name) => VarId::field(name),
        }
    }

    fn read(&self, var: VarId, facts: &mut StmtFacts) {
        facts.uses.insert(var.clone());
        facts.uses_ordered.push(var);
    }

    fn expr(&self, expr: &Expr, facts: &mut StmtFacts) {
        match &expr.kind {
            ExprKind::VarRef(name) => self.read(self.classify(name), facts),
            ExprKind::FieldRef(name) => self.read(VarId::field(name.clone()), facts),
            ExprKind::Unary { operand, .. } => self.expr(operand, facts),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs, facts);
                self.expr(rhs, facts);
            }
            ExprKind::Call { receiver, args, .. } => {
                match receiver {
                    Some(Receiver::Expr(e)) => self.expr(e, facts),
                    Some(Receiver::Type(ty)) => type_dep(ty, &mut facts.types),
                    Some(Receiver::Name { segments, .. }) => {
                        // unresolved unit; a lone in-scope segment is a read
                        if segments.len() == 1 {
                            let var = self.classify(&segments[0]);
                            if var.decl.is_some() || var.kind != VarKind::Local {
                                self.read(var, facts);
                            }
                        }
                    }
                    None => {}
                }
                for a in args {
                    self.expr(a, facts);
                }
            }
            ExprKind::New { ty, args } => {
                type_dep(ty, &mut facts.types);
                for a in args {
                    self.expr(a, facts);
                }
            }
            ExprKind::Cast { ty, operand } => {
                type_dep(ty, &mut facts.types);
                self.expr(operand, facts);
            }
            _ => {}
        }
    }
}

fn type_dep(ty: &TypeRef, types: &mut BTreeSet<String>) {
    if ty.is_builtin() {
        return;
    }
    if let Some(fq) = &ty.resolved {
        types.insert(fq.clone());
    } else {
        types.insert(ty.name.clone());
    }
}

/// Dependency sets of an arbitrary statement set.
pub fn extract_deps<I>(def_use: &DefUse, stmts: I) -> DepSets
where
    I: IntoIterator<Item = StmtId>,
{
    let mut out = DepSets::default();
    for id in stmts {
        let facts = def_use.facts(id);
        out.vars.extend(facts.defs.iter().cloned());
        out.vars.extend(facts.uses.iter().cloned());
        out.types.extend(facts.types.iter().cloned());
    }
    for ty in &out.types {
        // packages of `a.b.C` are `a.b` and `a`
        let mut segs: Vec<&str> = ty.split('.').collect();
        segs.pop();
        while !segs.is_empty() {
            out.packs.insert(segs.join("."));
            segs.pop();
        }
    }
    out
}

/// Variables assigned or declared inside the selection and read after it.
/// Parameters and fields are excluded. When the selection sits inside a loop,
/// reads anywhere in that loop body outside the selection count as "after".
pub fn live_out(labeled: &LabeledMethod<'_>, def_use: &DefUse, sel: &Selection) -> BTreeSet<VarId> {
    let closure: HashSet<StmtId> = sel.closure.iter().copied().collect();
    let mut defs: BTreeSet<VarId> = BTreeSet::new();
    for id in &sel.closure {
        defs.extend(def_use.facts(*id).defs.iter().cloned());
    }
    defs.retain(|v| v.kind == VarKind::Local);
    if defs.is_empty() {
        return defs;
    }

    let end_pos = sel
        .closure
        .iter()
        .filter_map(|id| labeled.position(*id))
        .max()
        .unwrap_or(0);

    let mut after: Vec<StmtId> = Vec::new();
    for stmt in labeled.statements() {
        let pos = labeled.position(stmt.id).unwrap();
        if pos > end_pos && !closure.contains(&stmt.id) {
            after.push(stmt.id);
        }
    }
    // back-edge rule: the whole body of any enclosing loop re-executes
    let first_stmt = sel.closure.first().copied();
    if let Some(first) = first_stmt {
        for loop_id in labeled.enclosing_loops(first) {
            let loop_stmt = labeled.stmt_by_id(loop_id).expect("loop statement");
            let mut body_ids = Vec::new();
            for block in loop_stmt.child_blocks() {
                for s in &block.stmts {
                    collect_ids(s, &mut body_ids);
                }
            }
            for id in body_ids {
                if !closure.contains(&id) {
                    after.push(id);
                }
            }
        }
    }

    defs.retain(|v| after.iter().any(|id| def_use.facts(*id).uses.contains(v)));
    defs
}

fn collect_ids(stmt: &Stmt, out: &mut Vec<StmtId>) {
    out.push(stmt.id);
    for block in stmt.child_blocks() {
        for child in &block.stmts {
            collect_ids(child, out);
        }
    }
}

/// Variables read inside the selection whose declaration lies outside it:
/// parameters, and locals declared before the selection. Fields are excluded.
/// Ordered by first read inside the selection.
pub fn inputs(labeled: &LabeledMethod<'_>, def_use: &DefUse, sel: &Selection) -> Vec<VarId> {
    let closure: HashSet<StmtId> = sel.closure.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for id in &sel.closure {
        for var in &def_use.facts(*id).uses_ordered {
            if !seen.insert(var.clone()) {
                continue;
            }
            let outside = match var.kind {
                VarKind::Param => true,
                VarKind::Field => false,
                VarKind::Local => match var.decl {
                    Some(label) => labeled
                        .stmt_at(label)
                        .map(|s| !closure.contains(&s.id))
                        .unwrap_or(false),
                    None => false,
                },
            };
            if outside {
                out.push(var.clone());
            }
        }
    }
    out
}
