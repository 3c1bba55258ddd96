//! Recursive-descent parser for JX.
//!
//! Statement starts that begin with an identifier are disambiguated by
//! scanning the dotted name and peeking one token past it: another identifier
//! means a declaration, `=` an assignment, `(` a call statement.

use super::ast::*;
use super::lexer::tokenize;
use super::token::{Token, TokenKind};
use super::ParseError;

pub fn parse(text: &str) -> Result<SourceUnit, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, next_id: 0 };
    p.unit()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_id: u32,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, off: usize) -> &TokenKind {
        let i = (self.pos + off).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek() == &kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&kind.describe()))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError::Unexpected {
            line: t.span.start_line,
            col: t.span.start_col,
            expected: expected.to_string(),
            found: t.kind.describe(),
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let t = self.bump();
                Ok((name, t.span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn fresh_id(&mut self) -> StmtId {
        let id = StmtId(self.next_id);
        self.next_id += 1;
        id
    }

    fn unit(&mut self) -> Result<SourceUnit, ParseError> {
        let start = self.span();
        self.expect(TokenKind::KwPackage)?;
        let package = self.dotted()?.0;
        self.expect(TokenKind::Semi)?;

        let mut imports: Vec<String> = Vec::new();
        while self.eat(&TokenKind::KwImport) {
            let imp = self.dotted()?.0;
            self.expect(TokenKind::Semi)?;
            // exact duplicates collapse; the import list stays unique
            if !imports.contains(&imp) {
                imports.push(imp);
            }
        }

        let mut classes = Vec::new();
        classes.push(self.class_decl()?);
        while matches!(self.peek(), TokenKind::KwClass) {
            classes.push(self.class_decl()?);
        }
        self.expect(TokenKind::Eof)?;
        let span = Span::cover(start, self.prev_span());
        Ok(SourceUnit { package, imports, classes, span })
    }

    fn dotted(&mut self) -> Result<(String, Span), ParseError> {
        let (first, start) = self.ident()?;
        let mut name = first;
        let mut span = start;
        while self.peek() == &TokenKind::Dot {
            if !matches!(self.peek_at(1), TokenKind::Ident(_)) {
                break;
            }
            self.bump();
            let (seg, s) = self.ident()?;
            name.push('.');
            name.push_str(&seg);
            span = Span::cover(span, s);
        }
        Ok((name, span))
    }

    fn class_decl(&mut self) -> Result<ClassDecl, ParseError> {
        let start = self.span();
        self.expect(TokenKind::KwClass)?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LBrace)?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        let mut member_names: Vec<String> = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            self.member(&mut fields, &mut methods, &mut member_names)?;
        }
        let span = Span::cover(start, self.prev_span());
        Ok(ClassDecl { name, fields, methods, span })
    }

    fn member(
        &mut self,
        fields: &mut Vec<FieldDecl>,
        methods: &mut Vec<MethodDecl>,
        member_names: &mut Vec<String>,
    ) -> Result<(), ParseError> {
        let start = self.span();
        let return_type = if self.eat(&TokenKind::KwVoid) { None } else { Some(self.type_ref()?) };
        let (name, name_span) = self.ident()?;
        if member_names.contains(&name) {
            return Err(ParseError::Unexpected {
                line: name_span.start_line,
                col: name_span.start_col,
                expected: "a unique member name".to_string(),
                found: format!("duplicate member `{name}`"),
            });
        }
        member_names.push(name.clone());

        if self.peek() == &TokenKind::LParen {
            self.bump();
            let mut params: Vec<Param> = Vec::new();
            if self.peek() != &TokenKind::RParen {
                loop {
                    let pty = self.type_ref()?;
                    let (pname, pspan) = self.ident()?;
                    if params.iter().any(|p| p.name == pname) {
                        return Err(ParseError::Unexpected {
                            line: pspan.start_line,
                            col: pspan.start_col,
                            expected: "a unique parameter name".to_string(),
                            found: format!("duplicate parameter `{pname}`"),
                        });
                    }
                    let span = Span::cover(pty.span, pspan);
                    params.push(Param { ty: pty, name: pname, span });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(TokenKind::RParen)?;
            let body = self.block()?;
            let span = Span::cover(start, self.prev_span());
            methods.push(MethodDecl { return_type, name, params, body, span });
        } else {
            let ty = return_type.ok_or_else(|| self.unexpected("`(` after void member name"))?;
            let init = if self.eat(&TokenKind::Assign) { Some(self.expr()?) } else { None };
            self.expect(TokenKind::Semi)?;
            let span = Span::cover(start, self.prev_span());
            fields.push(FieldDecl { ty, name, init, span });
        }
        Ok(())
    }

    fn type_ref(&mut self) -> Result<TypeRef, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            TokenKind::KwInt => {
                self.bump();
                Ok(TypeRef::builtin(TypeKind::Int, span))
            }
            TokenKind::KwBoolean => {
                self.bump();
                Ok(TypeRef::builtin(TypeKind::Boolean, span))
            }
            TokenKind::KwDouble => {
                self.bump();
                Ok(TypeRef::builtin(TypeKind::Double, span))
            }
            TokenKind::Ident(name) if name == "String" && self.peek_at(1) != &TokenKind::Dot => {
                self.bump();
                Ok(TypeRef::builtin(TypeKind::Str, span))
            }
            TokenKind::Ident(_) => {
                let (name, span) = self.dotted()?;
                Ok(TypeRef::named(name, span))
            }
            _ => Err(self.unexpected("type")),
        }
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        let start = self.span();
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            stmts.push(self.stmt()?);
        }
        let span = Span::cover(start, self.prev_span());
        Ok(Block { stmts, span })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let id = self.fresh_id();
        let start = self.span();
        let kind = match self.peek().clone() {
            TokenKind::LBrace => StmtKind::Block(self.block()?),
            TokenKind::KwIf => self.if_stmt()?,
            TokenKind::KwWhile => self.while_stmt()?,
            TokenKind::KwFor => self.for_stmt()?,
            TokenKind::KwReturn => {
                self.bump();
                let value = if self.peek() == &TokenKind::Semi { None } else { Some(self.expr()?) };
                self.expect(TokenKind::Semi)?;
                StmtKind::Return { value }
            }
            TokenKind::KwBreak => {
                self.bump();
                self.expect(TokenKind::Semi)?;
                StmtKind::Break
            }
            TokenKind::KwContinue => {
                self.bump();
                self.expect(TokenKind::Semi)?;
                StmtKind::Continue
            }
            TokenKind::KwInt | TokenKind::KwBoolean | TokenKind::KwDouble => {
                let (ty, name, init) = self.var_decl_parts()?;
                StmtKind::VarDecl { ty, name, init }
            }
            TokenKind::KwThis => {
                self.this_stmt()?
            }
            TokenKind::Ident(_) => self.ident_stmt()?,
            _ => return Err(self.unexpected("statement")),
        };
        let span = Span::cover(start, self.prev_span());
        Ok(Stmt { id, kind, span })
    }

    /// `type IDENT ("=" expr)? ";"`, starting at the type.
    fn var_decl_parts(&mut self) -> Result<(TypeRef, String, Option<Expr>), ParseError> {
        let ty = self.type_ref()?;
        let (name, _) = self.ident()?;
        let init = if self.eat(&TokenKind::Assign) { Some(self.expr()?) } else { None };
        self.expect(TokenKind::Semi)?;
        Ok((ty, name, init))
    }

    /// Statement beginning with `this`: either `this.f = expr;` or an
    /// expression statement whose leading primary is a field reference.
    fn this_stmt(&mut self) -> Result<StmtKind, ParseError> {
        let save = self.pos;
        self.bump(); // this
        self.expect(TokenKind::Dot)?;
        let (field, _) = self.ident()?;
        if self.eat(&TokenKind::Assign) {
            let value = self.expr()?;
            self.expect(TokenKind::Semi)?;
            return Ok(StmtKind::Assign { target: LValue::Field(field), value });
        }
        self.pos = save;
        let expr = self.expr()?;
        self.expect(TokenKind::Semi)?;
        Ok(StmtKind::ExprStmt { expr })
    }

    /// Statement beginning with an identifier: declaration with a named type,
    /// assignment, or call statement.
    fn ident_stmt(&mut self) -> Result<StmtKind, ParseError> {
        let save = self.pos;
        let mut segments = 1usize;
        // scan IDENT (. IDENT)*
        self.bump();
        while self.peek() == &TokenKind::Dot && matches!(self.peek_at(1), TokenKind::Ident(_)) {
            self.bump();
            self.bump();
            segments += 1;
        }
        let next = self.peek().clone();
        self.pos = save;
        match next {
            TokenKind::Ident(_) => {
                let (ty, name, init) = self.var_decl_parts()?;
                Ok(StmtKind::VarDecl { ty, name, init })
            }
            TokenKind::Assign => {
                if segments != 1 {
                    self.bump();
                    return Err(self.unexpected("`=` after a simple variable name"));
                }
                let (name, _) = self.ident()?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(StmtKind::Assign { target: LValue::Var(name), value })
            }
            _ => {
                let expr = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(StmtKind::ExprStmt { expr })
            }
        }
    }

    fn if_stmt(&mut self) -> Result<StmtKind, ParseError> {
        self.bump(); // if
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let then_block = self.block()?;
        let else_block = if self.eat(&TokenKind::KwElse) { Some(self.block()?) } else { None };
        Ok(StmtKind::If { cond, then_block, else_block })
    }

    fn while_stmt(&mut self) -> Result<StmtKind, ParseError> {
        self.bump(); // while
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let body = self.block()?;
        Ok(StmtKind::While { cond, body })
    }

    fn for_stmt(&mut self) -> Result<StmtKind, ParseError> {
        self.bump(); // for
        self.expect(TokenKind::LParen)?;
        let init = if self.eat(&TokenKind::Semi) {
            None
        } else {
            Some(self.for_init()?)
        };
        let cond = if self.peek() == &TokenKind::Semi { None } else { Some(self.expr()?) };
        self.expect(TokenKind::Semi)?;
        let update = if self.peek() == &TokenKind::RParen {
            None
        } else {
            Some(self.assign_no_semi()?)
        };
        self.expect(TokenKind::RParen)?;
        let body = self.block()?;
        Ok(StmtKind::For { init, cond, update, body })
    }

    /// `varDecl | assign`, consuming the trailing `;`.
    fn for_init(&mut self) -> Result<ForInit, ParseError> {
        match self.peek().clone() {
            TokenKind::KwInt | TokenKind::KwBoolean | TokenKind::KwDouble => {
                let (ty, name, init) = self.var_decl_parts()?;
                Ok(ForInit::Decl { ty, name, init })
            }
            TokenKind::KwThis => {
                let (target, value) = self.assign_no_semi()?;
                self.expect(TokenKind::Semi)?;
                Ok(ForInit::Assign { target, value })
            }
            TokenKind::Ident(_) => {
                // `IDENT =` is an assignment; anything else starts a declaration
                if self.peek_at(1) == &TokenKind::Assign {
                    let (target, value) = self.assign_no_semi()?;
                    self.expect(TokenKind::Semi)?;
                    Ok(ForInit::Assign { target, value })
                } else {
                    let (ty, name, init) = self.var_decl_parts()?;
                    Ok(ForInit::Decl { ty, name, init })
                }
            }
            _ => Err(self.unexpected("loop initializer")),
        }
    }

    fn assign_no_semi(&mut self) -> Result<(LValue, Expr), ParseError> {
        let target = if self.eat(&TokenKind::KwThis) {
            self.expect(TokenKind::Dot)?;
            let (field, _) = self.ident()?;
            LValue::Field(field)
        } else {
            let (name, _) = self.ident()?;
            LValue::Var(name)
        };
        self.expect(TokenKind::Assign)?;
        let value = self.expr()?;
        Ok((target, value))
    }

    // -- expressions --------------------------------------------------------

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(0)
    }

    fn binary(&mut self, min_level: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (op, level) = match self.peek() {
                TokenKind::OrOr => (BinaryOp::Or, 1),
                TokenKind::AndAnd => (BinaryOp::And, 2),
                TokenKind::EqEq => (BinaryOp::Eq, 3),
                TokenKind::NotEq => (BinaryOp::Ne, 3),
                TokenKind::Lt => (BinaryOp::Lt, 4),
                TokenKind::Le => (BinaryOp::Le, 4),
                TokenKind::Gt => (BinaryOp::Gt, 4),
                TokenKind::Ge => (BinaryOp::Ge, 4),
                TokenKind::Plus => (BinaryOp::Add, 5),
                TokenKind::Minus => (BinaryOp::Sub, 5),
                TokenKind::Star => (BinaryOp::Mul, 6),
                TokenKind::Slash => (BinaryOp::Div, 6),
                TokenKind::Percent => (BinaryOp::Rem, 6),
                _ => break,
            };
            if level < min_level {
                break;
            }
            self.bump();
            let rhs = self.binary(level + 1)?;
            let span = Span::cover(lhs.span, rhs.span);
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let op = match self.peek() {
            TokenKind::Bang => Some(UnaryOp::Not),
            TokenKind::Minus => Some(UnaryOp::Neg),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            let span = Span::cover(start, operand.span);
            return Ok(Expr { kind: ExprKind::Unary { op, operand: Box::new(operand) }, span });
        }
        self.postfix()
    }

    /// Primary expression followed by `.method(args)` chains.
    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut expr = self.primary()?;
        while self.peek() == &TokenKind::Dot {
            self.bump();
            let (method, _) = self.ident()?;
            self.expect(TokenKind::LParen)?;
            let args = self.args()?;
            let end = self.prev_span();
            let span = Span::cover(expr.span, end);
            expr = Expr {
                kind: ExprKind::Call { receiver: Some(Receiver::Expr(Box::new(expr))), method, args },
                span,
            };
        }
        Ok(expr)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if self.peek() != &TokenKind::RParen {
            loop {
                args.push(self.expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            TokenKind::Int(v) => {
                self.bump();
                Ok(Expr { kind: ExprKind::IntLit(v), span: start })
            }
            TokenKind::Double(text) => {
                self.bump();
                Ok(Expr { kind: ExprKind::DoubleLit(text), span: start })
            }
            TokenKind::Str(s) => {
                self.bump();
                Ok(Expr { kind: ExprKind::StrLit(s), span: start })
            }
            TokenKind::KwTrue => {
                self.bump();
                Ok(Expr { kind: ExprKind::BoolLit(true), span: start })
            }
            TokenKind::KwFalse => {
                self.bump();
                Ok(Expr { kind: ExprKind::BoolLit(false), span: start })
            }
            TokenKind::KwNew => {
                self.bump();
                let ty = self.type_ref()?;
                self.expect(TokenKind::LParen)?;
                let args = self.args()?;
                let span = Span::cover(start, self.prev_span());
                Ok(Expr { kind: ExprKind::New { ty, args }, span })
            }
            TokenKind::KwThis => {
                self.bump();
                self.expect(TokenKind::Dot)?;
                let (field, fspan) = self.ident()?;
                if self.peek() == &TokenKind::LParen {
                    return Err(ParseError::Unexpected {
                        line: fspan.start_line,
                        col: fspan.start_col,
                        expected: "a field reference (same-class calls are written unqualified)"
                            .to_string(),
                        found: format!("call on `this.{field}`"),
                    });
                }
                let span = Span::cover(start, fspan);
                Ok(Expr { kind: ExprKind::FieldRef(field), span })
            }
            TokenKind::LParen => self.paren_or_cast(),
            TokenKind::Ident(_) => self.name_expr(),
            _ => Err(self.unexpected("expression")),
        }
    }

    /// `(expr)` or `(type) operand`. A parenthesized dotted name is a cast
    /// only when the token after `)` can begin an operand.
    fn paren_or_cast(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let save = self.pos;
        self.bump(); // (
        let primitive_cast = matches!(
            self.peek(),
            TokenKind::KwInt | TokenKind::KwBoolean | TokenKind::KwDouble
        ) || matches!(self.peek(), TokenKind::Ident(n) if n == "String" && self.peek_at(1) == &TokenKind::RParen);
        if primitive_cast {
            let ty = self.type_ref()?;
            self.expect(TokenKind::RParen)?;
            let operand = self.unary()?;
            let span = Span::cover(start, operand.span);
            return Ok(Expr { kind: ExprKind::Cast { ty, operand: Box::new(operand) }, span });
        }
        if matches!(self.peek(), TokenKind::Ident(_)) {
            // try: ( dotted ) followed by an operand start
            let ty_pos = self.pos;
            if self.dotted().is_ok() && self.peek() == &TokenKind::RParen {
                let cast_like = matches!(
                    self.peek_at(1),
                    TokenKind::Ident(_)
                        | TokenKind::Int(_)
                        | TokenKind::Double(_)
                        | TokenKind::Str(_)
                        | TokenKind::KwTrue
                        | TokenKind::KwFalse
                        | TokenKind::KwThis
                        | TokenKind::KwNew
                        | TokenKind::LParen
                        | TokenKind::Bang
                );
                if cast_like {
                    self.pos = ty_pos;
                    let ty = self.type_ref()?;
                    self.expect(TokenKind::RParen)?;
                    let operand = self.unary()?;
                    let span = Span::cover(start, operand.span);
                    return Ok(Expr { kind: ExprKind::Cast { ty, operand: Box::new(operand) }, span });
                }
            }
            self.pos = save;
            self.bump(); // (
        }
        let inner = self.expr()?;
        self.expect(TokenKind::RParen)?;
        Ok(inner)
    }

    /// Expression starting with an identifier: a variable reference or a call
    /// whose receiver is a dotted name chain.
    fn name_expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let (first, _) = self.ident()?;
        let mut segments = vec![first];
        let mut span = start;
        loop {
            if self.peek() == &TokenKind::Dot
                && matches!(self.peek_at(1), TokenKind::Ident(_))
                && self.peek_at(2) != &TokenKind::LParen
            {
                self.bump();
                let (seg, s) = self.ident()?;
                segments.push(seg);
                span = Span::cover(span, s);
                continue;
            }
            break;
        }
        if self.peek() == &TokenKind::Dot && matches!(self.peek_at(1), TokenKind::Ident(_)) {
            // `segments . method (` — a call with a name-chain receiver
            self.bump();
            let (method, _) = self.ident()?;
            self.expect(TokenKind::LParen)?;
            let args = self.args()?;
            let cspan = Span::cover(start, self.prev_span());
            return Ok(Expr {
                kind: ExprKind::Call {
                    receiver: Some(Receiver::Name { segments, span }),
                    method,
                    args,
                },
                span: cspan,
            });
        }
        if segments.len() == 1 && self.peek() == &TokenKind::LParen {
            // bare call `m(args)`
            self.bump();
            let args = self.args()?;
            let cspan = Span::cover(start, self.prev_span());
            return Ok(Expr {
                kind: ExprKind::Call { receiver: None, method: segments.pop().unwrap(), args },
                span: cspan,
            });
        }
        if segments.len() > 1 {
            return Err(self.unexpected("`(` (dotted names are only valid as call receivers)"));
        }
        Ok(Expr { kind: ExprKind::VarRef(segments.pop().unwrap()), span })
    }
}
