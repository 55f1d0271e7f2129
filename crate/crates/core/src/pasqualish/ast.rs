use std::fmt;

use crate::number::Number;

use super::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Gt,
    Lt,
    Eq,
}

impl BinOp {
    pub const ALL: [BinOp; 7] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Gt,
        BinOp::Lt,
        BinOp::Eq,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Gt => ">",
            BinOp::Lt => "<",
            BinOp::Eq => "=",
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        BinOp::ALL.into_iter().find(|op| op.symbol().starts_with(c))
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    NumLit(Number),
    Var(String),
    Call(String, Vec<PExpr>),
    If(Box<PExpr>, Box<PExpr>, Box<PExpr>),
    Bin(BinOp, Box<PExpr>, Box<PExpr>),
    /// Expressions evaluated in order; the last one is the value.
    Block(Vec<PExpr>),
}

/// An expression together with the position of its first token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PExpr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PExpr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        PExpr { kind, pos }
    }

    pub fn num(n: impl Into<Number>, pos: Pos) -> Self {
        PExpr::new(ExprKind::NumLit(n.into()), pos)
    }

    pub fn bin(op: BinOp, left: PExpr, right: PExpr) -> Self {
        let pos = left.pos;
        PExpr::new(ExprKind::Bin(op, Box::new(left), Box::new(right)), pos)
    }

    /// Visits this expression and all subexpressions, parents first.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a PExpr)) {
        visit(self);
        match &self.kind {
            ExprKind::NumLit(_) | ExprKind::Var(_) => {}
            ExprKind::Call(_, args) | ExprKind::Block(args) => args.iter().for_each(|a| a.walk(visit)),
            ExprKind::If(c, t, e) => {
                c.walk(visit);
                t.walk(visit);
                e.walk(visit);
            }
            ExprKind::Bin(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
        }
    }
}

/// Fully parenthesized binary operations; fractions print as divisions so
/// the output always re-parses.
impl fmt::Display for PExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::NumLit(n) if n.is_integer() && *n >= Number::zero() => write!(f, "{n}"),
            ExprKind::NumLit(n) => {
                let (sign, numer) = if *n < Number::zero() {
                    ("0 - ", -n)
                } else {
                    ("", n.clone())
                };
                if numer.is_integer() {
                    write!(f, "({sign}{numer})")
                } else {
                    write!(f, "({sign}{} / {})", numer.numer(), numer.denom())
                }
            }
            ExprKind::Var(name) => f.write_str(name),
            ExprKind::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            ExprKind::If(c, t, e) => write!(f, "if ({c}) then {t} else {e}"),
            ExprKind::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprKind::Block(items) => {
                f.write_str("begin")?;
                for item in items {
                    write!(f, " {item};")?;
                }
                f.write_str(" end")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: PExpr,
    pub pos: Pos,
}

impl fmt::Display for FuncDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "function {}({}) {}", self.name, self.params.join(", "), self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub functions: Vec<FuncDef>,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FuncDef> {
        self.functions.iter().find(|f| f.name == name)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, func) in self.functions.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{func}")?;
        }
        Ok(())
    }
}
