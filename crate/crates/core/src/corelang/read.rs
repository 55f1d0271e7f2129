use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Const, CoreExpr, Lambda, PrimOp};
use crate::form::{Atom, Form};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed core form `{form}`: {message}")]
pub struct CoreSyntaxError {
    pub form: String,
    pub message: String,
}

const KEYWORDS: [&str; 3] = ["if", "lambda", "letrec"];

fn error(form: &Form, message: impl Into<String>) -> CoreSyntaxError {
    CoreSyntaxError {
        form: form.to_string(),
        message: message.into(),
    }
}

/// Converts core notation into an expression:
///
/// ```text
/// 42  #t  "text"  name
/// (if c t e)
/// (lambda (x y) body)
/// (letrec ((f (lambda (n) ...)) ...) body)
/// (+ a b)  (- a b)  (* a b)  (/ a b)  (> a b)  (< a b)  (= a b)  (>= a b)  (<= a b)
/// (f arg ...)
/// ```
pub fn read_core(form: &Form) -> Result<CoreExpr, CoreSyntaxError> {
    match form {
        Form::Atom(Atom::Number(n)) => Ok(CoreExpr::Const(Const::Number(n.clone()))),
        Form::Atom(Atom::Boolean(b)) => Ok(CoreExpr::Const(Const::Boolean(*b))),
        Form::Atom(Atom::Text(t)) => Ok(CoreExpr::Const(Const::Text(t.clone()))),
        Form::Atom(Atom::Char(_)) => Err(error(form, "character literals are not core values")),
        Form::Atom(Atom::Symbol(s)) => {
            let name = s.as_str();
            if KEYWORDS.contains(&name) || PrimOp::from_name(name).is_some() {
                Err(error(
                    form,
                    format!("`{name}` is reserved and cannot be used as a variable"),
                ))
            } else {
                Ok(CoreExpr::VarRef(name.to_string()))
            }
        }
        Form::List(items) => {
            let Some(head) = items.first() else {
                return Err(error(form, "empty application"));
            };
            match head.as_symbol() {
                Some("if") => {
                    let [_, c, t, e] = items.as_slice() else {
                        return Err(error(form, "`if` takes a condition and two branches"));
                    };
                    Ok(CoreExpr::if_(read_core(c)?, read_core(t)?, read_core(e)?))
                }
                Some("lambda") => Ok(CoreExpr::Lambda(read_lambda(form)?)),
                Some("letrec") => {
                    let [_, bindings, body] = items.as_slice() else {
                        return Err(error(form, "`letrec` takes a binding list and a body"));
                    };
                    let Some(bindings) = bindings.as_list() else {
                        return Err(error(form, "`letrec` bindings must be a list"));
                    };
                    let mut seen = BTreeSet::new();
                    let mut out = Vec::with_capacity(bindings.len());
                    for b in bindings {
                        let Some([name, value]) = b.as_list() else {
                            return Err(error(b, "binding must be `(name (lambda ...))`"));
                        };
                        let name = binding_name(name)?;
                        if !seen.insert(name.clone()) {
                            return Err(error(form, format!("`{name}` bound twice")));
                        }
                        out.push((name, read_lambda(value)?));
                    }
                    Ok(CoreExpr::LetRec(out, Box::new(read_core(body)?)))
                }
                Some(op) if PrimOp::from_name(op).is_some() => {
                    let op = PrimOp::from_name(op).expect("checked");
                    if items.len() != 3 {
                        return Err(error(form, format!("`{}` takes exactly two operands", op.name())));
                    }
                    let args = items[1..].iter().map(read_core).collect::<Result<_, _>>()?;
                    Ok(CoreExpr::PrimCall(op, args))
                }
                _ => {
                    let callee = read_core(head)?;
                    let args = items[1..].iter().map(read_core).collect::<Result<_, _>>()?;
                    Ok(CoreExpr::Apply(Box::new(callee), args))
                }
            }
        }
    }
}

fn binding_name(form: &Form) -> Result<String, CoreSyntaxError> {
    match form.as_symbol() {
        Some(name) if !KEYWORDS.contains(&name) && PrimOp::from_name(name).is_none() => Ok(name.to_string()),
        Some(name) => Err(error(form, format!("`{name}` is reserved"))),
        None => Err(error(form, "expected a name")),
    }
}

fn read_lambda(form: &Form) -> Result<Arc<Lambda>, CoreSyntaxError> {
    let items = form.as_list().unwrap_or(&[]);
    let [head, params, body] = items else {
        return Err(error(form, "expected `(lambda (params...) body)`"));
    };
    if !head.is_symbol("lambda") {
        return Err(error(form, "expected a lambda"));
    }
    let Some(params) = params.as_list() else {
        return Err(error(form, "lambda parameters must be a list"));
    };
    let mut names = Vec::with_capacity(params.len());
    for p in params {
        let name = binding_name(p)?;
        if names.contains(&name) {
            return Err(error(form, format!("duplicate parameter `{name}`")));
        }
        names.push(name);
    }
    Ok(Arc::new(Lambda {
        params: names,
        body: read_core(body)?,
    }))
}
