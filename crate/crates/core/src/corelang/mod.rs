//! The core language: a small, lexically scoped, call-by-value expression
//! language with exact arithmetic. Everything above compiles down to it.

mod env;
mod eval;
mod read;

use std::fmt;
use std::sync::Arc;

use crate::form::Form;
use crate::number::Number;

pub use env::Env;
pub use eval::{eval, EvalError, Evaluator, DEFAULT_MAX_DEPTH};
pub use read::{read_core, CoreSyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    Div,
    Gt,
    Lt,
    Eq,
    Ge,
    Le,
}

impl PrimOp {
    pub const ALL: [PrimOp; 9] = [
        PrimOp::Add,
        PrimOp::Sub,
        PrimOp::Mul,
        PrimOp::Div,
        PrimOp::Gt,
        PrimOp::Lt,
        PrimOp::Eq,
        PrimOp::Ge,
        PrimOp::Le,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimOp::Add => "+",
            PrimOp::Sub => "-",
            PrimOp::Mul => "*",
            PrimOp::Div => "/",
            PrimOp::Gt => ">",
            PrimOp::Lt => "<",
            PrimOp::Eq => "=",
            PrimOp::Ge => ">=",
            PrimOp::Le => "<=",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        PrimOp::ALL.into_iter().find(|op| op.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Const {
    Number(Number),
    Boolean(bool),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lambda {
    pub params: Vec<String>,
    pub body: CoreExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreExpr {
    Const(Const),
    VarRef(String),
    If(Box<CoreExpr>, Box<CoreExpr>, Box<CoreExpr>),
    Lambda(Arc<Lambda>),
    Apply(Box<CoreExpr>, Vec<CoreExpr>),
    LetRec(Vec<(String, Arc<Lambda>)>, Box<CoreExpr>),
    PrimCall(PrimOp, Vec<CoreExpr>),
}

impl CoreExpr {
    pub fn num(n: impl Into<Number>) -> Self {
        CoreExpr::Const(Const::Number(n.into()))
    }

    pub fn boolean(b: bool) -> Self {
        CoreExpr::Const(Const::Boolean(b))
    }

    pub fn var(name: &str) -> Self {
        CoreExpr::VarRef(name.to_string())
    }

    pub fn if_(cond: CoreExpr, then: CoreExpr, otherwise: CoreExpr) -> Self {
        CoreExpr::If(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    pub fn lambda(params: &[&str], body: CoreExpr) -> Self {
        CoreExpr::Lambda(Arc::new(Lambda {
            params: params.iter().map(|p| p.to_string()).collect(),
            body,
        }))
    }

    pub fn apply(f: CoreExpr, args: Vec<CoreExpr>) -> Self {
        CoreExpr::Apply(Box::new(f), args)
    }

    pub fn prim(op: PrimOp, args: Vec<CoreExpr>) -> Self {
        CoreExpr::PrimCall(op, args)
    }

    /// The S-expression notation read by [`read_core`].
    pub fn to_form(&self) -> Form {
        match self {
            CoreExpr::Const(Const::Number(n)) => Form::num(n.clone()),
            CoreExpr::Const(Const::Boolean(b)) => Form::boolean(*b),
            CoreExpr::Const(Const::Text(t)) => Form::text(t.as_str()),
            CoreExpr::VarRef(name) => Form::sym(name),
            CoreExpr::If(c, t, e) => Form::list([Form::sym("if"), c.to_form(), t.to_form(), e.to_form()]),
            CoreExpr::Lambda(l) => lambda_form(l),
            CoreExpr::Apply(f, args) => {
                Form::list(std::iter::once(f.to_form()).chain(args.iter().map(CoreExpr::to_form)))
            }
            CoreExpr::LetRec(bindings, body) => Form::list([
                Form::sym("letrec"),
                Form::list(
                    bindings
                        .iter()
                        .map(|(name, l)| Form::list([Form::sym(name), lambda_form(l)])),
                ),
                body.to_form(),
            ]),
            CoreExpr::PrimCall(op, args) => {
                Form::list(std::iter::once(Form::sym(op.name())).chain(args.iter().map(CoreExpr::to_form)))
            }
        }
    }
}

fn lambda_form(l: &Lambda) -> Form {
    Form::list([
        Form::sym("lambda"),
        Form::list(l.params.iter().map(|p| Form::sym(p))),
        l.body.to_form(),
    ])
}

impl fmt::Display for CoreExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_form())
    }
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub lambda: Arc<Lambda>,
    pub env: Env,
}

#[derive(Debug, Clone)]
pub enum Value {
    Number(Number),
    Boolean(bool),
    Text(String),
    Closure(Closure),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Boolean(_) => "boolean",
            Value::Text(_) => "text",
            Value::Closure(_) => "closure",
        }
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            Value::Number(n) => Some(n),
            _ => None,
        }
    }
}

/// Closures are equal only when they share both code and environment.
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a == b,
            (Value::Boolean(a), Value::Boolean(b)) => a == b,
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Closure(a), Value::Closure(b)) => Arc::ptr_eq(&a.lambda, &b.lambda) && a.env.same_frame(&b.env),
            _ => false,
        }
    }
}

impl From<Number> for Value {
    fn from(n: Number) -> Self {
        Value::Number(n)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Boolean(b) => write!(f, "{}", Form::boolean(*b)),
            Value::Text(t) => write!(f, "{}", Form::text(t.as_str())),
            Value::Closure(c) => write!(
                f,
                "#<closure {}>",
                Form::list(c.lambda.params.iter().map(|p| Form::sym(p)))
            ),
        }
    }
}
