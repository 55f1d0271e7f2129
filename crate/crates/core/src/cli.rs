//! Command-line front end.
//!
//! Exit codes: 0 success (including a `REJECT` from `parse`), 1 malformed
//! source of any kind, 2 runtime evaluation error, 3 usage or I/O error.
//! Standard output receives exactly one line on success; diagnostics and
//! `--trace` output go to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser as ClapParser, Subcommand};

use crate::calc::{eval_infix, lex_infix, parse_calc_text, CalcError};
use crate::combinator::{run, ParseError, ParseOutcome};
use crate::corelang::{Env, Evaluator};
use crate::form::Form;
use crate::grammar::{compile_grammar, parse_grammar};
use crate::pasqualish::{self, PasqError, Stage};

/// Places shown by `--decimal` for non-terminating expansions.
pub const DECIMAL_PLACES: usize = 12;

pub const EXIT_OK: u8 = 0;
pub const EXIT_SYNTAX: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug, ClapParser)]
#[command(
    name = "dsltower",
    version,
    about = "A tower of small languages built from parser combinators"
)]
pub struct CliConfig {
    /// Print each stage's output form to stderr
    #[arg(long, global = true)]
    pub trace: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Pasqualish program
    Run {
        file: PathBuf,
        /// Entry call, e.g. "fac(5)"
        #[arg(long = "call", value_name = "CALL")]
        call: String,
        /// Fold constant arithmetic before running
        #[arg(long)]
        fold: bool,
    },
    /// Evaluate an infix expression exactly
    Calc {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Also render as a decimal
        #[arg(long)]
        decimal: bool,
    },
    /// Match text against a grammar's start rule
    Parse {
        #[arg(long, value_name = "FILE")]
        grammar: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
    },
    /// Validate a grammar file
    GrammarCheck { file: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<String, Failure>;

struct Tracer<'a> {
    enabled: bool,
    sink: &'a mut dyn Write,
}

impl Tracer<'_> {
    fn stage(&mut self, name: &str, output: impl std::fmt::Display) {
        if self.enabled {
            let _ = writeln!(self.sink, "[{name}] {output}");
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn pasq_failure(path: &Path, call: &str, e: PasqError) -> Failure {
    let code = match e.stage() {
        Stage::Lex | Stage::Parse | Stage::Resolve => EXIT_SYNTAX,
        Stage::Fold | Stage::Eval => EXIT_RUNTIME,
    };
    let origin = match &e {
        PasqError::Lex { origin, .. } | PasqError::Parse { origin, .. } | PasqError::Resolve { origin, .. } => {
            Some(*origin)
        }
        PasqError::Fold { .. } => Some(pasqualish::Origin::Program),
        PasqError::Eval(_) => None,
    };
    let prefix = match origin {
        Some(pasqualish::Origin::Program) => format!("{}: ", path.display()),
        Some(pasqualish::Origin::Entry) => format!("--call {call:?}: "),
        None => String::new(),
    };
    Failure::new(code, format!("{prefix}{e}"))
}

fn run_command(file: &Path, call: &str, fold: bool, trace: &mut Tracer) -> Outcome {
    let text = read_file(file)?;
    let fail = |e| pasq_failure(file, call, e);
    let tokens = pasqualish::lex(&text).map_err(fail)?;
    trace.stage("tokens", Form::list(tokens.iter().map(|t| t.to_form())));
    let mut program = pasqualish::parse_tokens(tokens, &text).map_err(fail)?;
    let mut entry = pasqualish::parse_entry(call, &program).map_err(fail)?;
    trace.stage("ast", format_args!("{program} ; entry {entry}"));
    if fold {
        program = pasqualish::constant_fold(&program).map_err(fail)?;
        entry = pasqualish::fold_expr(&entry).map_err(fail)?;
        trace.stage("folded", format_args!("{program} ; entry {entry}"));
    }
    let core = pasqualish::compile(&program, &entry);
    trace.stage("core", &core);
    let value = Evaluator::default()
        .eval(&core, &Env::empty())
        .map_err(|e| fail(PasqError::Eval(e)))?;
    trace.stage("value", &value);
    Ok(value.to_string())
}

fn calc_command(expr: &str, decimal: bool, trace: &mut Tracer) -> Outcome {
    let fail = |e: CalcError| {
        let code = match e {
            CalcError::DivisionByZero { .. } => EXIT_RUNTIME,
            _ => EXIT_SYNTAX,
        };
        Failure::new(code, format!("calc: {e}"))
    };
    if trace.enabled {
        let (tokens, _) = lex_infix(expr).map_err(fail)?;
        trace.stage("tokens", Form::list(tokens));
    }
    let tree = parse_calc_text(expr).map_err(fail)?;
    trace.stage("tree", &tree);
    let value = eval_infix(&tree).map_err(fail)?;
    trace.stage("value", &value);
    Ok(if decimal {
        value.to_decimal(DECIMAL_PLACES)
    } else {
        value.to_string()
    })
}

fn load_grammar(path: &Path, trace: &mut Tracer) -> Result<crate::grammar::Grammar, Failure> {
    let text = read_file(path)?;
    let grammar = parse_grammar(&text).map_err(|e| Failure::new(EXIT_SYNTAX, format!("{}: {e}", path.display())))?;
    trace.stage("grammar", &grammar);
    Ok(grammar)
}

fn parse_command(grammar_path: &Path, input: &str, trace: &mut Tracer) -> Outcome {
    let grammar = load_grammar(grammar_path, trace)?;
    let parser = compile_grammar(&grammar, &Default::default())
        .map_err(|e| Failure::new(EXIT_SYNTAX, format!("{}: {e}", grammar_path.display())))?;
    let chars: Vec<Form> = input.chars().map(Form::char).collect();
    let outcome = run(&parser, chars).map_err(|e| {
        let what = match e {
            ParseError::NonProgress { .. } => "grammar loops without consuming input",
            ParseError::Action { .. } => "action failed",
        };
        Failure::new(EXIT_RUNTIME, format!("parse: {what}: {e}"))
    })?;
    trace.stage("outcome", outcome.to_form());
    Ok(match outcome {
        ParseOutcome::Success { values, rest } if rest.is_exhausted() => {
            format!("ACCEPT {}", Form::list(values))
        }
        _ => "REJECT".to_string(),
    })
}

fn grammar_check_command(path: &Path, trace: &mut Tracer) -> Outcome {
    let grammar = load_grammar(path, trace)?;
    compile_grammar(&grammar, &Default::default())
        .map_err(|e| Failure::new(EXIT_SYNTAX, format!("{}: {e}", path.display())))?;
    Ok("OK".to_string())
}

pub fn execute(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let mut trace = Tracer {
        enabled: config.trace,
        sink: stderr,
    };
    let outcome = match &config.command {
        Command::Run { file, call, fold } => run_command(file, call, *fold, &mut trace),
        Command::Calc { expr, decimal } => calc_command(expr, *decimal, &mut trace),
        Command::Parse { grammar, input } => parse_command(grammar, input, &mut trace),
        Command::GrammarCheck { file } => grammar_check_command(file, &mut trace),
    };
    match outcome {
        Ok(line) => match writeln!(stdout, "{line}") {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_USAGE,
        },
        Err(failure) => {
            let _ = writeln!(trace.sink, "error: {}", failure.message);
            failure.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match CliConfig::try_parse_from(args) {
        Ok(config) => execute(&config, stdout, stderr),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                // --help and --version
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            }
        }
    }
}

pub fn main() -> ExitCode {
    let code = run_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
