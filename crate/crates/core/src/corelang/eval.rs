use std::sync::Arc;

use super::{Closure, Const, CoreExpr, Env, PrimOp, Value};
use crate::number::Number;

pub const DEFAULT_MAX_DEPTH: usize = 10_000;

// grow the native stack in 1 MiB segments once less than 64 KiB remain
const RED_ZONE: usize = 64 * 1024;
const STACK_SEGMENT: usize = 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("arity mismatch calling {callee}: expected {expected} argument(s), got {got}")]
    Arity {
        callee: String,
        expected: usize,
        got: usize,
    },
    #[error("type mismatch in {context}: expected {expected}, got {found}")]
    TypeMismatch {
        context: String,
        expected: &'static str,
        found: String,
    },
    #[error("division by zero: {dividend} / 0")]
    DivisionByZero { dividend: String },
    #[error("recursion depth limit of {limit} calls exceeded")]
    RecursionDepth { limit: usize },
}

/// Evaluates with the default recursion limit.
pub fn eval(expr: &CoreExpr, env: &Env) -> Result<Value, EvalError> {
    Evaluator::default().eval(expr, env)
}

#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    max_depth: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl Evaluator {
    /// `max_depth` bounds the number of nested closure calls.
    pub fn with_max_depth(max_depth: usize) -> Self {
        Evaluator { max_depth }
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn eval(&self, expr: &CoreExpr, env: &Env) -> Result<Value, EvalError> {
        self.eval_at(expr, env, 0)
    }

    fn eval_at(&self, expr: &CoreExpr, env: &Env, depth: usize) -> Result<Value, EvalError> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.step(expr, env, depth))
    }

    fn step(&self, expr: &CoreExpr, env: &Env, depth: usize) -> Result<Value, EvalError> {
        match expr {
            CoreExpr::Const(Const::Number(n)) => Ok(Value::Number(n.clone())),
            CoreExpr::Const(Const::Boolean(b)) => Ok(Value::Boolean(*b)),
            CoreExpr::Const(Const::Text(t)) => Ok(Value::Text(t.clone())),
            CoreExpr::VarRef(name) => env.lookup(name).ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            CoreExpr::If(cond, then, otherwise) => match self.eval_at(cond, env, depth)? {
                Value::Boolean(true) => self.eval_at(then, env, depth),
                Value::Boolean(false) => self.eval_at(otherwise, env, depth),
                other => Err(EvalError::TypeMismatch {
                    context: "if condition".into(),
                    expected: "boolean",
                    found: describe(&other),
                }),
            },
            CoreExpr::Lambda(lambda) => Ok(Value::Closure(Closure {
                lambda: Arc::clone(lambda),
                env: env.clone(),
            })),
            CoreExpr::Apply(callee, args) => {
                let f = self.eval_at(callee, env, depth)?;
                let values = args
                    .iter()
                    .map(|a| self.eval_at(a, env, depth))
                    .collect::<Result<Vec<_>, _>>()?;
                let Value::Closure(closure) = f else {
                    return Err(EvalError::TypeMismatch {
                        context: format!("application of {callee}"),
                        expected: "closure",
                        found: describe(&f),
                    });
                };
                let params = &closure.lambda.params;
                if params.len() != values.len() {
                    return Err(EvalError::Arity {
                        callee: callee.to_string(),
                        expected: params.len(),
                        got: values.len(),
                    });
                }
                if depth >= self.max_depth {
                    return Err(EvalError::RecursionDepth { limit: self.max_depth });
                }
                let frame = closure.env.extend(params.iter().cloned().zip(values));
                self.eval_at(&closure.lambda.body, &frame, depth + 1)
            }
            CoreExpr::LetRec(bindings, body) => {
                let frame =
                    env.extend_recursive(bindings.iter().map(|(name, lambda)| (name.clone(), Arc::clone(lambda))));
                self.eval_at(body, &frame, depth)
            }
            CoreExpr::PrimCall(op, args) => {
                let [a, b] = args.as_slice() else {
                    return Err(EvalError::Arity {
                        callee: op.name().to_string(),
                        expected: 2,
                        got: args.len(),
                    });
                };
                let a = self.number_operand(*op, self.eval_at(a, env, depth)?)?;
                let b = self.number_operand(*op, self.eval_at(b, env, depth)?)?;
                apply_prim(*op, &a, &b)
            }
        }
    }

    fn number_operand(&self, op: PrimOp, v: Value) -> Result<Number, EvalError> {
        match v {
            Value::Number(n) => Ok(n),
            other => Err(EvalError::TypeMismatch {
                context: format!("operand of `{}`", op.name()),
                expected: "number",
                found: describe(&other),
            }),
        }
    }
}

fn describe(v: &Value) -> String {
    format!("{} {v}", v.type_name())
}

pub(crate) fn apply_prim(op: PrimOp, a: &Number, b: &Number) -> Result<Value, EvalError> {
    Ok(match op {
        PrimOp::Add => Value::Number(a + b),
        PrimOp::Sub => Value::Number(a - b),
        PrimOp::Mul => Value::Number(a * b),
        PrimOp::Div => Value::Number(a.checked_div(b).ok_or_else(|| EvalError::DivisionByZero {
            dividend: a.to_string(),
        })?),
        PrimOp::Gt => Value::Boolean(a > b),
        PrimOp::Lt => Value::Boolean(a < b),
        PrimOp::Eq => Value::Boolean(a == b),
        PrimOp::Ge => Value::Boolean(a >= b),
        PrimOp::Le => Value::Boolean(a <= b),
    })
}
