//! AST for JX source units.
//!
//! Every statement carries a [`StmtId`] that is unique within its unit and a
//! [`Span`] into the original source. Structural comparisons go through
//! [`SourceUnit::normalized`], which strips both.

/// Byte range plus line/column of both endpoints. Columns are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn cover(a: Span, b: Span) -> Span {
        Span {
            start: a.start.min(b.start),
            end: a.end.max(b.end),
            start_line: a.start_line,
            start_col: a.start_col,
            end_line: b.end_line,
            end_col: b.end_col,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Identity of a statement within one parsed unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StmtId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeKind {
    Int,
    Boolean,
    Double,
    /// The builtin `String` type; grouped with primitives for dependency purposes.
    Str,
    Named,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub kind: TypeKind,
    /// Name as written in the source (simple or dotted).
    pub name: String,
    /// Fully-qualified name, filled by resolution for named types.
    pub resolved: Option<String>,
    pub span: Span,
}

impl TypeRef {
    pub fn named(name: impl Into<String>, span: Span) -> TypeRef {
        TypeRef { kind: TypeKind::Named, name: name.into(), resolved: None, span }
    }

    pub fn builtin(kind: TypeKind, span: Span) -> TypeRef {
        let name = match kind {
            TypeKind::Int => "int",
            TypeKind::Boolean => "boolean",
            TypeKind::Double => "double",
            TypeKind::Str => "String",
            TypeKind::Named => unreachable!("builtin() takes a primitive kind"),
        };
        TypeRef { kind, name: name.to_string(), resolved: None, span }
    }

    pub fn is_builtin(&self) -> bool {
        self.kind != TypeKind::Named
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub package: String,
    pub imports: Vec<String>,
    pub classes: Vec<ClassDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    /// `None` means `void`.
    pub return_type: Option<TypeRef>,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl { ty: TypeRef, name: String, init: Option<Expr> },
    Assign { target: LValue, value: Expr },
    ExprStmt { expr: Expr },
    If { cond: Expr, then_block: Block, else_block: Option<Block> },
    While { cond: Expr, body: Block },
    For { init: Option<ForInit>, cond: Option<Expr>, update: Option<(LValue, Expr)>, body: Block },
    Return { value: Option<Expr> },
    Break,
    Continue,
    Block(Block),
}

/// Loop header initializer; an attribute of the `for` statement, not a
/// separately labeled statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForInit {
    Decl { ty: TypeRef, name: String, init: Option<Expr> },
    Assign { target: LValue, value: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    /// `this.<name>`
    Field(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    IntLit(i64),
    /// Lexeme kept verbatim so printing round-trips exactly.
    DoubleLit(String),
    BoolLit(bool),
    StrLit(String),
    VarRef(String),
    /// `this.<name>`
    FieldRef(String),
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { receiver: Option<Receiver>, method: String, args: Vec<Expr> },
    New { ty: TypeRef, args: Vec<Expr> },
    Cast { ty: TypeRef, operand: Box<Expr> },
}

/// Call receiver. The parser cannot tell a variable from a class name, so it
/// produces [`Receiver::Name`]; resolution replaces those with `Expr` or
/// `Type`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Receiver {
    Expr(Box<Expr>),
    Name { segments: Vec<String>, span: Span },
    Type(TypeRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl Stmt {
    /// Blocks directly owned by this statement, in then/else (or body) order.
    pub fn child_blocks(&self) -> Vec<&Block> {
        match &self.kind {
            StmtKind::If { then_block, else_block, .. } => {
                let mut v = vec![then_block];
                if let Some(e) = else_block {
                    v.push(e);
                }
                v
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => vec![body],
            StmtKind::Block(inner) => vec![inner],
            _ => Vec::new(),
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self.kind, StmtKind::While { .. } | StmtKind::For { .. })
    }
}

impl Block {
    /// Number of statements in the block including all nested ones.
    pub fn total_stmts(&self) -> usize {
        self.stmts
            .iter()
            .map(|s| 1 + s.child_blocks().iter().map(|b| b.total_stmts()).sum::<usize>())
            .sum()
    }
}

impl SourceUnit {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Copy with zeroed spans, pre-order statement ids, and cleared resolution
    /// results. Two units are structurally equal iff their normalized forms
    /// compare equal.
    pub fn normalized(&self) -> SourceUnit {
        let mut out = self.clone();
        let mut next = 0u32;
        out.span = Span::default();
        for class in &mut out.classes {
            class.span = Span::default();
            for field in &mut class.fields {
                field.span = Span::default();
                norm_type(&mut field.ty);
                if let Some(init) = &mut field.init {
                    norm_expr(init);
                }
            }
            for method in &mut class.methods {
                method.span = Span::default();
                if let Some(rt) = &mut method.return_type {
                    norm_type(rt);
                }
                for p in &mut method.params {
                    p.span = Span::default();
                    norm_type(&mut p.ty);
                }
                norm_block(&mut method.body, &mut next);
            }
        }
        out
    }
}

fn norm_type(ty: &mut TypeRef) {
    ty.span = Span::default();
    ty.resolved = None;
}

fn norm_block(block: &mut Block, next: &mut u32) {
    block.span = Span::default();
    for stmt in &mut block.stmts {
        norm_stmt(stmt, next);
    }
}

fn norm_stmt(stmt: &mut Stmt, next: &mut u32) {
    stmt.id = StmtId(*next);
    *next += 1;
    stmt.span = Span::default();
    match &mut stmt.kind {
        StmtKind::VarDecl { ty, init, .. } => {
            norm_type(ty);
            if let Some(e) = init {
                norm_expr(e);
            }
        }
        StmtKind::Assign { value, .. } => norm_expr(value),
        StmtKind::ExprStmt { expr } => norm_expr(expr),
        StmtKind::If { cond, then_block, else_block } => {
            norm_expr(cond);
            norm_block(then_block, next);
            if let Some(e) = else_block {
                norm_block(e, next);
            }
        }
        StmtKind::While { cond, body } => {
            norm_expr(cond);
            norm_block(body, next);
        }
        StmtKind::For { init, cond, update, body } => {
            match init {
                Some(ForInit::Decl { ty, init, .. }) => {
                    norm_type(ty);
                    if let Some(e) = init {
                        norm_expr(e);
                    }
                }
                Some(ForInit::Assign { value, .. }) => norm_expr(value),
                None => {}
            }
            if let Some(c) = cond {
                norm_expr(c);
            }
            if let Some((_, e)) = update {
                norm_expr(e);
            }
            norm_block(body, next);
        }
        StmtKind::Return { value } => {
            if let Some(e) = value {
                norm_expr(e);
            }
        }
        StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(inner) => norm_block(inner, next),
    }
}

fn norm_expr(expr: &mut Expr) {
    expr.span = Span::default();
    match &mut expr.kind {
        ExprKind::Unary { operand, .. } => norm_expr(operand),
        ExprKind::Binary { lhs, rhs, .. } => {
            norm_expr(lhs);
            norm_expr(rhs);
        }
        ExprKind::Call { receiver, args, .. } => {
            match receiver {
                Some(Receiver::Expr(e)) => norm_expr(e),
                Some(Receiver::Name { span, .. }) => *span = Span::default(),
                Some(Receiver::Type(ty)) => norm_type(ty),
                None => {}
            }
            for a in args {
                norm_expr(a);
            }
        }
        ExprKind::New { ty, args } => {
            norm_type(ty);
            for a in args {
                norm_expr(a);
            }
        }
        ExprKind::Cast { ty, operand } => {
            norm_type(ty);
            norm_expr(operand);
        }
        _ => {}
    }
}
