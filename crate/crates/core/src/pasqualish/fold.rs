use crate::calc::{eval_infix, InfixExpr, InfixOp};

use super::ast::{BinOp, ExprKind, FuncDef, PExpr, Program};
use super::PasqError;

fn infix_op(op: BinOp) -> Option<InfixOp> {
    Some(match op {
        BinOp::Add => InfixOp::Add,
        BinOp::Sub => InfixOp::Sub,
        BinOp::Mul => InfixOp::Mul,
        BinOp::Div => InfixOp::Div,
        _ => return None,
    })
}

/// The calculator expression for a constant arithmetic subtree.
fn as_infix(e: &PExpr) -> Option<InfixExpr> {
    match &e.kind {
        ExprKind::NumLit(n) => Some(InfixExpr::Leaf(n.clone())),
        ExprKind::Bin(op, l, r) => Some(InfixExpr::bin(infix_op(*op)?, as_infix(l)?, as_infix(r)?)),
        _ => None,
    }
}

/// Replaces every maximal arithmetic subtree whose leaves are all literals
/// with its value, computed by the calculator. Division by zero in such a
/// subtree is reported now, even if it would never be evaluated.
pub fn fold_expr(e: &PExpr) -> Result<PExpr, PasqError> {
    if let (ExprKind::Bin(..), Some(infix)) = (&e.kind, as_infix(e)) {
        // evaluate the tree as parsed here; the calculator's flat grammar
        // would re-associate it
        let value = eval_infix(&infix).map_err(|error| PasqError::Fold { pos: e.pos, error })?;
        return Ok(PExpr::num(value, e.pos));
    }
    let fold_all = |items: &[PExpr]| items.iter().map(fold_expr).collect::<Result<Vec<_>, _>>();
    let boxed = |x: &PExpr| fold_expr(x).map(Box::new);
    let kind = match &e.kind {
        ExprKind::NumLit(_) | ExprKind::Var(_) => return Ok(e.clone()),
        ExprKind::Call(name, args) => ExprKind::Call(name.clone(), fold_all(args)?),
        ExprKind::Block(items) => ExprKind::Block(fold_all(items)?),
        ExprKind::If(c, t, f) => ExprKind::If(boxed(c)?, boxed(t)?, boxed(f)?),
        ExprKind::Bin(op, l, r) => ExprKind::Bin(*op, boxed(l)?, boxed(r)?),
    };
    Ok(PExpr::new(kind, e.pos))
}

pub fn constant_fold(program: &Program) -> Result<Program, PasqError> {
    let functions = program
        .functions
        .iter()
        .map(|f| {
            Ok(FuncDef {
                body: fold_expr(&f.body)?,
                ..f.clone()
            })
        })
        .collect::<Result<_, PasqError>>()?;
    Ok(Program { functions })
}
