//! Infix constant calculator over forms.
//!
//! The grammar is deliberately flat: `e := body op e / body`. All four
//! operators share one precedence level and chains associate to the
//! **right**, so `2 - 3 - 4` is `2 - (3 - 4) = 3`. Parenthesized
//! subexpressions arrive as nested list tokens.

use std::fmt;
use std::sync::OnceLock;

use crate::combinator::{number_token, run, ParseOutcome, Parser};
use crate::form::Form;
use crate::grammar::{compile_grammar, parse_grammar_with, ParserEnv};
use crate::number::Number;

const INFIX_GRAMMAR: &str = r#"
epr := body "+" epr :-> binop
     / body "-" epr :-> binop
     / body "*" epr :-> binop
     / body "/" epr :-> binop
     / body ;
body := number / @(epr) ;
"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfixOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl InfixOp {
    pub fn symbol(self) -> &'static str {
        match self {
            InfixOp::Add => "+",
            InfixOp::Sub => "-",
            InfixOp::Mul => "*",
            InfixOp::Div => "/",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "+" => InfixOp::Add,
            "-" => InfixOp::Sub,
            "*" => InfixOp::Mul,
            "/" => InfixOp::Div,
            _ => return None,
        })
    }

    pub const ALL: [InfixOp; 4] = [InfixOp::Add, InfixOp::Sub, InfixOp::Mul, InfixOp::Div];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfixExpr {
    Leaf(Number),
    BinOp(InfixOp, Box<InfixExpr>, Box<InfixExpr>),
}

impl InfixExpr {
    pub fn leaf(n: impl Into<Number>) -> Self {
        InfixExpr::Leaf(n.into())
    }

    pub fn bin(op: InfixOp, left: InfixExpr, right: InfixExpr) -> Self {
        InfixExpr::BinOp(op, Box::new(left), Box::new(right))
    }

    /// The token sequence this tree would be written as, with every
    /// non-leaf operand wrapped in a nested list.
    pub fn to_tokens(&self) -> Vec<Form> {
        fn operand(e: &InfixExpr) -> Form {
            match e {
                InfixExpr::Leaf(n) => Form::num(n.clone()),
                InfixExpr::BinOp(..) => Form::List(e.to_tokens()),
            }
        }
        match self {
            InfixExpr::Leaf(n) => vec![Form::num(n.clone())],
            InfixExpr::BinOp(op, l, r) => vec![operand(l), Form::sym(op.symbol()), operand(r)],
        }
    }

    fn from_form(form: &Form) -> Option<Self> {
        if let Some(n) = form.as_number() {
            return Some(InfixExpr::Leaf(n.clone()));
        }
        match form.as_list()? {
            [op, l, r] => Some(InfixExpr::bin(
                InfixOp::from_symbol(op.as_symbol()?)?,
                InfixExpr::from_form(l)?,
                InfixExpr::from_form(r)?,
            )),
            _ => None,
        }
    }
}

/// Infix rendering with non-leaf operands parenthesized.
impl fmt::Display for InfixExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(e: &InfixExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                InfixExpr::Leaf(_) => write!(f, "{e}"),
                InfixExpr::BinOp(..) => write!(f, "({e})"),
            }
        }
        match self {
            InfixExpr::Leaf(n) => write!(f, "{n}"),
            InfixExpr::BinOp(op, l, r) => {
                operand(l, f)?;
                write!(f, " {} ", op.symbol())?;
                operand(r, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalcError {
    #[error("column {column}: {message}")]
    Lex { column: usize, message: String },
    #[error("{}syntax error at token {position}: {message}", .column.map(|c| format!("column {c}: ")).unwrap_or_default())]
    Syntax {
        /// Index of the offending top-level token.
        position: usize,
        /// 1-based text column, when parsing came from text.
        column: Option<usize>,
        message: String,
    },
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
}

fn infix_parser() -> &'static Parser {
    static PARSER: OnceLock<Parser> = OnceLock::new();
    PARSER.get_or_init(|| {
        let mut env = ParserEnv::default();
        env.define_parser("number", number_token()).expect("fresh name");
        env.define_action("binop", |v| match v {
            [l, op, r] => Ok(vec![Form::list([op.clone(), l.clone(), r.clone()])]),
            _ => Err(format!("expected three captures, got {}", v.len())),
        })
        .expect("fresh name");
        let grammar = parse_grammar_with(INFIX_GRAMMAR, &env).expect("infix grammar is valid");
        compile_grammar(&grammar, &env).expect("infix grammar compiles")
    })
}

/// Parses a token sequence (numbers, operator symbols, nested lists).
pub fn parse_infix(tokens: &[Form]) -> Result<InfixExpr, CalcError> {
    let syntax = |position: usize, message: String| CalcError::Syntax {
        position,
        column: None,
        message,
    };
    let outcome = run(infix_parser(), tokens.to_vec()).map_err(|e| syntax(0, e.to_string()))?;
    match outcome {
        ParseOutcome::Success { values, rest } if rest.is_exhausted() => values
            .first()
            .and_then(InfixExpr::from_form)
            .ok_or_else(|| syntax(0, "malformed parse result".into())),
        ParseOutcome::Success { rest, .. } => Err(syntax(
            rest.position(),
            format!("unexpected `{}`", rest.peek().expect("not exhausted")),
        )),
        ParseOutcome::Failure { .. } => Err(syntax(
            0,
            match tokens.first() {
                None => "empty expression".to_string(),
                Some(t) => format!("expected a number or parenthesized expression, found `{t}`"),
            },
        )),
    }
}

/// Exact evaluation.
pub fn eval_infix(expr: &InfixExpr) -> Result<Number, CalcError> {
    match expr {
        InfixExpr::Leaf(n) => Ok(n.clone()),
        InfixExpr::BinOp(op, l, r) => {
            let a = eval_infix(l)?;
            let b = eval_infix(r)?;
            Ok(match op {
                InfixOp::Add => &a + &b,
                InfixOp::Sub => &a - &b,
                InfixOp::Mul => &a * &b,
                InfixOp::Div => a
                    .checked_div(&b)
                    .ok_or_else(|| CalcError::DivisionByZero { expr: expr.to_string() })?,
            })
        }
    }
}

/// Lexes calculator text into forms. Parentheses nest, operator
/// characters always split tokens, and `-` directly before a digit in
/// operand position starts a negative literal. Returns the top-level tokens
/// and the 1-based column of each.
pub fn lex_infix(text: &str) -> Result<(Vec<Form>, Vec<usize>), CalcError> {
    let chars: Vec<char> = text.chars().collect();
    // open lists: items gathered so far in the enclosing list, `(` column
    let mut stack: Vec<(Vec<Form>, usize)> = Vec::new();
    let mut current: Vec<Form> = Vec::new();
    let mut columns = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        i += 1;
        let operand_position = current.last().is_none_or(|t| t.as_symbol().is_some());
        let (token, token_column) = match c {
            c if c.is_whitespace() => continue,
            '(' => {
                stack.push((std::mem::take(&mut current), column));
                continue;
            }
            ')' => {
                let Some((outer, open)) = stack.pop() else {
                    return Err(CalcError::Lex {
                        column,
                        message: "unbalanced `)`".into(),
                    });
                };
                let list = Form::List(std::mem::replace(&mut current, outer));
                (list, open)
            }
            '-' if operand_position && chars.get(i).is_some_and(char::is_ascii_digit) => {
                (Form::num(-&digits(&chars, &mut i)), column)
            }
            '0'..='9' => {
                i -= 1;
                (Form::num(digits(&chars, &mut i)), column)
            }
            '+' | '-' | '*' | '/' => (Form::sym(&c.to_string()), column),
            other => {
                return Err(CalcError::Lex {
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        current.push(token);
        if stack.is_empty() {
            columns.push(token_column);
        }
    }
    if let Some((_, column)) = stack.last() {
        return Err(CalcError::Lex {
            column: *column,
            message: "unbalanced `(`".into(),
        });
    }
    Ok((current, columns))
}

/// Reads a run of decimal digits starting at `*i`.
fn digits(chars: &[char], i: &mut usize) -> Number {
    let start = *i;
    while *i < chars.len() && chars[*i].is_ascii_digit() {
        *i += 1;
    }
    let literal: String = chars[start..*i].iter().collect();
    literal.parse().expect("digit run is a valid integer")
}

/// Parses `text` into a tree, attaching text columns to syntax errors.
pub fn parse_calc_text(text: &str) -> Result<InfixExpr, CalcError> {
    let (tokens, columns) = lex_infix(text)?;
    parse_infix(&tokens).map_err(|e| match e {
        CalcError::Syntax { position, message, .. } => CalcError::Syntax {
            position,
            column: Some(columns.get(position).copied().unwrap_or(text.chars().count() + 1)),
            message,
        },
        other => other,
    })
}

/// Lex, parse and evaluate `text`.
pub fn calc(text: &str) -> Result<Number, CalcError> {
    eval_infix(&parse_calc_text(text)?)
}
