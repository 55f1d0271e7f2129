//! A small Pascal-flavoured language of recursive numeric functions,
//! compiled to the core language.
//!
//! ```text
//! function fac(x)
//! begin
//!   if (x > 0) then
//!      x*fac(x - 1)
//!   else 1;
//! end
//! ```

mod ast;
mod compile;
mod fold;
mod lex;
mod parse;

use std::fmt;

use crate::calc::CalcError;
use crate::corelang::{Env, EvalError, Evaluator, Value, DEFAULT_MAX_DEPTH};

pub use ast::{BinOp, ExprKind, FuncDef, PExpr, Program};
pub use compile::{compile, compile_expr, compile_functions, SEQ_BINDER};
pub use fold::{constant_fold, fold_expr};
pub use lex::{lex, lex_source, Keyword, PToken, TokenKind, LEXICAL_GRAMMAR};
pub use parse::{parse_entry, parse_program, parse_tokens};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Which text a position refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Program,
    Entry,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Program => "program",
            Origin::Entry => "entry",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Lex,
    Parse,
    Resolve,
    Fold,
    Eval,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {expected} argument(s), called with {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("function `{0}` is defined more than once")]
    DuplicateFunction(String),
    #[error("parameter `{param}` of `{function}` is listed more than once")]
    DuplicateParameter { function: String, param: String },
    #[error("parameter `{param}` of `{function}` shadows a function of the same name")]
    ShadowedFunction { function: String, param: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PasqError {
    #[error("lex error in {origin} at {pos}: {message}")]
    Lex { origin: Origin, pos: Pos, message: String },
    #[error("parse error in {origin} at {pos}: {message}")]
    Parse { origin: Origin, pos: Pos, message: String },
    #[error("resolve error in {origin} at {pos}: {error}")]
    Resolve {
        origin: Origin,
        pos: Pos,
        error: ResolveError,
    },
    #[error("fold error at {pos}: {error}")]
    Fold { pos: Pos, error: CalcError },
    #[error("runtime error: {0}")]
    Eval(#[from] EvalError),
}

impl PasqError {
    pub fn stage(&self) -> Stage {
        match self {
            PasqError::Lex { .. } => Stage::Lex,
            PasqError::Parse { .. } => Stage::Parse,
            PasqError::Resolve { .. } => Stage::Resolve,
            PasqError::Fold { .. } => Stage::Fold,
            PasqError::Eval(_) => Stage::Eval,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub fold: bool,
    pub max_depth: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            fold: false,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

/// Parses `text`, then evaluates the call `entry` (e.g. `"fac(5)"`).
pub fn run_program(text: &str, entry: &str) -> Result<Value, PasqError> {
    run_program_with(text, entry, RunOptions::default())
}

pub fn run_program_with(text: &str, entry: &str, options: RunOptions) -> Result<Value, PasqError> {
    let mut program = parse_program(text)?;
    let mut call = parse_entry(entry, &program)?;
    if options.fold {
        program = constant_fold(&program)?;
        call = fold_expr(&call)?;
    }
    let core = compile(&program, &call);
    Ok(Evaluator::with_max_depth(options.max_depth).eval(&core, &Env::empty())?)
}
