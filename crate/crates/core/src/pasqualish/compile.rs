use std::sync::Arc;

use crate::corelang::{CoreExpr, Lambda, PrimOp};

use super::ast::{BinOp, ExprKind, PExpr, Program};

/// Throwaway binding used to sequence block items. `%` cannot start a
/// source identifier, so it never captures a user name.
pub const SEQ_BINDER: &str = "%seq";

fn prim(op: BinOp) -> PrimOp {
    match op {
        BinOp::Add => PrimOp::Add,
        BinOp::Sub => PrimOp::Sub,
        BinOp::Mul => PrimOp::Mul,
        BinOp::Div => PrimOp::Div,
        BinOp::Gt => PrimOp::Gt,
        BinOp::Lt => PrimOp::Lt,
        BinOp::Eq => PrimOp::Eq,
    }
}

pub fn compile_expr(e: &PExpr) -> CoreExpr {
    match &e.kind {
        ExprKind::NumLit(n) => CoreExpr::num(n.clone()),
        ExprKind::Var(name) => CoreExpr::var(name),
        ExprKind::Call(name, args) => CoreExpr::apply(CoreExpr::var(name), args.iter().map(compile_expr).collect()),
        ExprKind::If(c, t, f) => CoreExpr::if_(compile_expr(c), compile_expr(t), compile_expr(f)),
        ExprKind::Bin(op, l, r) => CoreExpr::prim(prim(*op), vec![compile_expr(l), compile_expr(r)]),
        ExprKind::Block(items) => {
            let (last, init) = items.split_last().expect("blocks are never empty");
            init.iter().rev().fold(compile_expr(last), |rest, item| {
                CoreExpr::apply(CoreExpr::lambda(&[SEQ_BINDER], rest), vec![compile_expr(item)])
            })
        }
    }
}

/// One recursive binding per function.
pub fn compile_functions(program: &Program) -> Vec<(String, Arc<Lambda>)> {
    program
        .functions
        .iter()
        .map(|f| {
            let lambda = Lambda {
                params: f.params.clone(),
                body: compile_expr(&f.body),
            };
            (f.name.clone(), Arc::new(lambda))
        })
        .collect()
}

/// All functions bound by one `letrec` around the entry expression.
pub fn compile(program: &Program, entry: &PExpr) -> CoreExpr {
    CoreExpr::LetRec(compile_functions(program), Box::new(compile_expr(entry)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pasqualish::{parse_entry, parse_program};

    #[test]
    fn factorial_compiles_to_letrec() {
        let p = parse_program("function fac(x) begin if (x > 0) then x*fac(x - 1) else 1; end").unwrap();
        let entry = parse_entry("fac(5)", &p).unwrap();
        assert_eq!(
            compile(&p, &entry).to_string(),
            "(letrec ((fac (lambda (x) (if (> x 0) (* x (fac (- x 1))) 1)))) (fac 5))"
        );
    }

    #[test]
    fn blocks_sequence_through_throwaway_bindings() {
        let p = parse_program("function f(a) begin 1; a; 3 end").unwrap();
        assert_eq!(
            compile_functions(&p)[0].1.body.to_string(),
            "((lambda (%seq) ((lambda (%seq) 3) a)) 1)"
        );
    }
}
