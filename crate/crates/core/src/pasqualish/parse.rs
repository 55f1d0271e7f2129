use std::collections::{HashMap, HashSet};

use super::ast::{BinOp, ExprKind, FuncDef, PExpr, Program};
use super::lex::{lex_source, Keyword, PToken, TokenKind};
use super::{Origin, PasqError, Pos, ResolveError};

// program := funcdef+
// funcdef := 'function' Ident '(' params? ')' 'begin' exprseq 'end'
// exprseq := expr (';' expr?)*
// expr    := 'if' '(' expr ')' 'then' expr 'else' expr | cmp
// cmp     := add (('>' | '<' | '=') add)?
// add     := mul (('+' | '-') mul)*
// mul     := atom (('*' | '/') atom)*
// atom    := Num | Ident | Ident '(' args? ')' | '(' expr ')'
struct Cursor {
    tokens: Vec<PToken>,
    index: usize,
    end: Pos,
    origin: Origin,
}

type Parsed<T> = Result<T, PasqError>;

impl Cursor {
    fn new(tokens: Vec<PToken>, text: &str, origin: Origin) -> Self {
        let line = text.matches('\n').count() + 1;
        let column = text.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        Cursor {
            tokens,
            index: 0,
            end: Pos { line, column },
            origin,
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.index).map(|t| &t.kind)
    }

    fn pos(&self) -> Pos {
        self.tokens.get(self.index).map_or(self.end, |t| t.pos)
    }

    fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    fn error<T>(&self, expected: &str) -> Parsed<T> {
        let found = match self.peek() {
            Some(kind) => kind.to_string(),
            None => "end of input".to_string(),
        };
        Err(PasqError::Parse {
            origin: self.origin,
            pos: self.pos(),
            message: format!("expected {expected}, found {found}"),
        })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.index += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Parsed<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            self.error(&kind.to_string())
        }
    }

    fn ident(&mut self) -> Parsed<(String, Pos)> {
        let pos = self.pos();
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.index += 1;
                Ok((name, pos))
            }
            _ => self.error("an identifier"),
        }
    }

    fn program(&mut self) -> Parsed<Program> {
        let mut functions = vec![self.funcdef()?];
        while !self.at_end() {
            functions.push(self.funcdef()?);
        }
        Ok(Program { functions })
    }

    fn funcdef(&mut self) -> Parsed<FuncDef> {
        let pos = self.pos();
        self.expect(TokenKind::Keyword(Keyword::Function))?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                params.push(self.ident()?.0);
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                if !self.eat(&TokenKind::Comma) {
                    return self.error("`,` or `)`");
                }
            }
        }
        let body_pos = self.pos();
        self.expect(TokenKind::Keyword(Keyword::Begin))?;
        let mut items = vec![self.expr()?];
        while self.eat(&TokenKind::Semicolon) {
            if !self.starts_expr() {
                continue;
            }
            items.push(self.expr()?);
        }
        if !self.eat(&TokenKind::Keyword(Keyword::End)) {
            return self.error("`;` or `end`");
        }
        Ok(FuncDef {
            name,
            params,
            body: PExpr::new(ExprKind::Block(items), body_pos),
            pos,
        })
    }

    fn starts_expr(&self) -> bool {
        matches!(
            self.peek(),
            Some(TokenKind::Keyword(Keyword::If) | TokenKind::Num(_) | TokenKind::Ident(_) | TokenKind::LParen)
        )
    }

    fn expr(&mut self) -> Parsed<PExpr> {
        let pos = self.pos();
        if !self.eat(&TokenKind::Keyword(Keyword::If)) {
            return self.cmp();
        }
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Keyword(Keyword::Then))?;
        let then = self.expr()?;
        self.expect(TokenKind::Keyword(Keyword::Else))?;
        let otherwise = self.expr()?;
        Ok(PExpr::new(
            ExprKind::If(Box::new(cond), Box::new(then), Box::new(otherwise)),
            pos,
        ))
    }

    fn operator(&mut self, allowed: &[BinOp]) -> Option<BinOp> {
        match self.peek() {
            Some(TokenKind::Op(op)) if allowed.contains(op) => {
                let op = *op;
                self.index += 1;
                Some(op)
            }
            _ => None,
        }
    }

    fn cmp(&mut self) -> Parsed<PExpr> {
        let left = self.add()?;
        match self.operator(&[BinOp::Gt, BinOp::Lt, BinOp::Eq]) {
            Some(op) => Ok(PExpr::bin(op, left, self.add()?)),
            None => Ok(left),
        }
    }

    fn add(&mut self) -> Parsed<PExpr> {
        let mut left = self.mul()?;
        while let Some(op) = self.operator(&[BinOp::Add, BinOp::Sub]) {
            left = PExpr::bin(op, left, self.mul()?);
        }
        Ok(left)
    }

    fn mul(&mut self) -> Parsed<PExpr> {
        let mut left = self.atom()?;
        while let Some(op) = self.operator(&[BinOp::Mul, BinOp::Div]) {
            left = PExpr::bin(op, left, self.atom()?);
        }
        Ok(left)
    }

    fn atom(&mut self) -> Parsed<PExpr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(TokenKind::Num(n)) => {
                self.index += 1;
                Ok(PExpr::num(n, pos))
            }
            Some(TokenKind::Ident(name)) => {
                self.index += 1;
                if !self.eat(&TokenKind::LParen) {
                    return Ok(PExpr::new(ExprKind::Var(name), pos));
                }
                let mut args = Vec::new();
                if !self.eat(&TokenKind::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(&TokenKind::RParen) {
                            break;
                        }
                        if !self.eat(&TokenKind::Comma) {
                            return self.error("`,` or `)`");
                        }
                    }
                }
                Ok(PExpr::new(ExprKind::Call(name, args), pos))
            }
            Some(TokenKind::LParen) => {
                self.index += 1;
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            _ => self.error("an expression"),
        }
    }
}

/// Parses and resolves a program.
pub fn parse_program(text: &str) -> Result<Program, PasqError> {
    let tokens = lex_source(text, Origin::Program)?;
    parse_tokens(tokens, text)
}

/// Parses and resolves an already tokenized program; `text` is only used
/// to position end-of-input errors.
pub fn parse_tokens(tokens: Vec<PToken>, text: &str) -> Result<Program, PasqError> {
    let program = Cursor::new(tokens, text, Origin::Program).program()?;
    resolve_program(&program)?;
    Ok(program)
}

/// Parses an entry expression, which must be a single function call, and
/// resolves it against `program`. Arguments may not mention variables.
pub fn parse_entry(text: &str, program: &Program) -> Result<PExpr, PasqError> {
    let tokens = lex_source(text, Origin::Entry)?;
    let mut cursor = Cursor::new(tokens, text, Origin::Entry);
    let expr = cursor.expr()?;
    if !cursor.at_end() {
        return cursor.error("end of input");
    }
    if !matches!(expr.kind, ExprKind::Call(..)) {
        return Err(PasqError::Parse {
            origin: Origin::Entry,
            pos: expr.pos,
            message: format!("entry must be a function call, found `{expr}`"),
        });
    }
    Resolver::new(program, Origin::Entry).expr(&expr, &HashSet::new())?;
    Ok(expr)
}

struct Resolver<'a> {
    arities: HashMap<&'a str, usize>,
    origin: Origin,
}

impl<'a> Resolver<'a> {
    fn new(program: &'a Program, origin: Origin) -> Self {
        Resolver {
            arities: program
                .functions
                .iter()
                .map(|f| (f.name.as_str(), f.params.len()))
                .collect(),
            origin,
        }
    }

    fn fail<T>(&self, pos: Pos, error: ResolveError) -> Result<T, PasqError> {
        Err(PasqError::Resolve {
            origin: self.origin,
            pos,
            error,
        })
    }

    fn expr(&self, root: &PExpr, scope: &HashSet<&str>) -> Result<(), PasqError> {
        let mut first_error = None;
        root.walk(&mut |e| {
            if first_error.is_some() {
                return;
            }
            first_error = match &e.kind {
                ExprKind::Var(name) if !scope.contains(name.as_str()) => {
                    Some((e.pos, ResolveError::UnknownVariable(name.clone())))
                }
                ExprKind::Call(name, args) => match self.arities.get(name.as_str()) {
                    None => Some((e.pos, ResolveError::UnknownFunction(name.clone()))),
                    Some(&expected) if expected != args.len() => Some((
                        e.pos,
                        ResolveError::Arity {
                            name: name.clone(),
                            expected,
                            got: args.len(),
                        },
                    )),
                    _ => None,
                },
                _ => None,
            };
        });
        match first_error {
            Some((pos, error)) => self.fail(pos, error),
            None => Ok(()),
        }
    }
}

fn resolve_program(program: &Program) -> Result<(), PasqError> {
    let resolver = Resolver::new(program, Origin::Program);
    let mut seen = HashSet::new();
    for f in &program.functions {
        if !seen.insert(f.name.as_str()) {
            return resolver.fail(f.pos, ResolveError::DuplicateFunction(f.name.clone()));
        }
    }
    for f in &program.functions {
        let mut scope = HashSet::new();
        for p in &f.params {
            if !scope.insert(p.as_str()) {
                return resolver.fail(
                    f.pos,
                    ResolveError::DuplicateParameter {
                        function: f.name.clone(),
                        param: p.clone(),
                    },
                );
            }
            if resolver.arities.contains_key(p.as_str()) {
                return resolver.fail(
                    f.pos,
                    ResolveError::ShadowedFunction {
                        function: f.name.clone(),
                        param: p.clone(),
                    },
                );
            }
        }
        resolver.expr(&f.body, &scope)?;
    }
    Ok(())
}
