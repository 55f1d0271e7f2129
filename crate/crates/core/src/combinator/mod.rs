//! Parser combinators over [`TokenStream`]s.
//!
//! Every parser is a pure function from a stream to a [`ParseOutcome`]:
//! either a success carrying the captured forms and the unparsed rest, or a
//! failure carrying a chain of reason labels and the stream it was given.
//! Ordinary mismatches are values; only programming errors (a repetition
//! whose body consumes nothing, a semantic action that fails) surface as
//! [`ParseError`].

mod stream;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::form::Form;

pub use stream::TokenStream;

/// Reason label used when a parser meets an exhausted stream.
pub const EMPTY: &str = "EMPTY";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseOutcome {
    Success {
        values: Vec<Form>,
        rest: TokenStream,
    },
    /// `reasons` is non-empty, outermost label first. `rest` is the stream
    /// the failing parser received.
    Failure {
        reasons: Vec<String>,
        rest: TokenStream,
    },
}

impl ParseOutcome {
    pub fn success(values: Vec<Form>, rest: TokenStream) -> Self {
        ParseOutcome::Success { values, rest }
    }

    pub fn failure(reasons: Vec<String>, rest: TokenStream) -> Self {
        debug_assert!(!reasons.is_empty());
        ParseOutcome::Failure { reasons, rest }
    }

    fn fail(label: &str, rest: &TokenStream) -> Self {
        ParseOutcome::failure(vec![label.to_string()], rest.clone())
    }

    pub fn is_success(&self) -> bool {
        matches!(self, ParseOutcome::Success { .. })
    }

    /// Captured values on success; on failure, the reason labels as text
    /// forms.
    pub fn result_values(&self) -> Vec<Form> {
        match self {
            ParseOutcome::Success { values, .. } => values.clone(),
            ParseOutcome::Failure { reasons, .. } => reasons.iter().map(|r| Form::text(r.as_str())).collect(),
        }
    }

    pub fn rest_of(&self) -> &TokenStream {
        match self {
            ParseOutcome::Success { rest, .. } | ParseOutcome::Failure { rest, .. } => rest,
        }
    }

    pub fn reasons(&self) -> Option<&[String]> {
        match self {
            ParseOutcome::Failure { reasons, .. } => Some(reasons),
            ParseOutcome::Success { .. } => None,
        }
    }

    /// Renders the outcome in the `((RESULT ...) rest...)` /
    /// `((FAIL ...) input...)` shape.
    pub fn to_form(&self) -> Form {
        let (head, rest) = match self {
            ParseOutcome::Success { values, rest } => (
                Form::list(std::iter::once(Form::sym("RESULT")).chain(values.iter().cloned())),
                rest,
            ),
            ParseOutcome::Failure { reasons, rest } => (
                Form::list(std::iter::once(Form::sym("FAIL")).chain(reasons.iter().map(|r| Form::text(r.as_str())))),
                rest,
            ),
        };
        Form::list(std::iter::once(head).chain(rest.remaining().iter().cloned()))
    }
}

/// Errors that abort a parse instead of producing a failure outcome.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("repetition body `{parser}` succeeded without consuming input at token {position}")]
    NonProgress { parser: String, position: usize },
    #[error("action `{action}` failed on captures {}: {message}", render_captures(.captures))]
    Action {
        action: String,
        message: String,
        captures: Vec<Form>,
    },
}

fn render_captures(captures: &[Form]) -> String {
    Form::list(captures.iter().cloned()).to_string()
}

pub type ParseResult = Result<ParseOutcome, ParseError>;

type ParseFn = dyn Fn(&TokenStream) -> ParseResult + Send + Sync;

/// A deterministic parsing function with an optional debug name.
#[derive(Clone)]
pub struct Parser {
    name: Option<Arc<str>>,
    run: Arc<ParseFn>,
}

impl Parser {
    pub fn new(run: impl Fn(&TokenStream) -> ParseResult + Send + Sync + 'static) -> Self {
        Parser {
            name: None,
            run: Arc::new(run),
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(Arc::from(name));
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn parse(&self, input: &TokenStream) -> ParseResult {
        (self.run)(input)
    }

    pub fn then(&self, next: &Parser) -> Parser {
        seq2(self.clone(), next.clone())
    }

    pub fn or(&self, alternative: &Parser) -> Parser {
        choice2(self.clone(), alternative.clone())
    }

    fn label(&self) -> String {
        self.name.as_deref().unwrap_or("<anonymous>").to_string()
    }
}

impl fmt::Debug for Parser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "Parser({n})"),
            None => f.write_str("Parser(<anonymous>)"),
        }
    }
}

/// Applies `parser` to `input` from position 0.
pub fn run(parser: &Parser, input: impl Into<Arc<[Form]>>) -> ParseResult {
    parser.parse(&TokenStream::new(input))
}

/// True when `parser` succeeds on `input` and leaves nothing unparsed.
pub fn full_match(parser: &Parser, input: impl Into<Arc<[Form]>>) -> Result<bool, ParseError> {
    Ok(match run(parser, input)? {
        ParseOutcome::Success { rest, .. } => rest.is_exhausted(),
        ParseOutcome::Failure { .. } => false,
    })
}

/// Fails with `EMPTY` on an exhausted stream; otherwise delegates to `p`.
pub fn guard(p: Parser) -> Parser {
    let name = p.name.clone();
    let mut guarded = Parser::new(move |s| {
        if s.is_exhausted() {
            Ok(ParseOutcome::fail(EMPTY, s))
        } else {
            p.parse(s)
        }
    });
    guarded.name = name;
    guarded
}

/// Always succeeds, capturing nothing and consuming nothing.
pub fn epsilon() -> Parser {
    Parser::new(|s| Ok(ParseOutcome::success(Vec::new(), s.clone()))).named("epsilon")
}

/// Consumes one token satisfying `pred`, capturing it. Fails with `label`
/// on a mismatch and with `EMPTY` at the end of input.
pub fn satisfy(label: &str, pred: impl Fn(&Form) -> bool + Send + Sync + 'static) -> Parser {
    let label_owned = label.to_string();
    Parser::new(move |s| {
        Ok(match s.peek() {
            None => ParseOutcome::fail(EMPTY, s),
            Some(token) if pred(token) => ParseOutcome::success(vec![token.clone()], s.advance(1)),
            Some(_) => ParseOutcome::fail(&label_owned, s),
        })
    })
    .named(label)
}

pub fn char_eq(c: char) -> Parser {
    satisfy("pcharx", move |t| t.as_char() == Some(c))
}

pub fn char_in(set: impl IntoIterator<Item = char>) -> Parser {
    let set: BTreeSet<char> = set.into_iter().collect();
    satisfy("pcsx-or", move |t| t.as_char().is_some_and(|c| set.contains(&c)))
}

/// A decimal digit character `0`-`9`.
pub fn digit() -> Parser {
    satisfy("pdigit", |t| t.as_char().is_some_and(|c| c.is_ascii_digit()))
}

pub fn alpha() -> Parser {
    satisfy("palpha", |t| t.as_char().is_some_and(|c| c.is_ascii_alphabetic()))
}

pub fn whitespace() -> Parser {
    satisfy("pspace", |t| t.as_char().is_some_and(char::is_whitespace))
}

pub fn symbol_eq(name: &str) -> Parser {
    let name = name.to_string();
    satisfy("psym", move |t| t.is_symbol(&name))
}

/// Any number atom.
pub fn number_token() -> Parser {
    satisfy("pnum", |t| t.as_number().is_some())
}

pub fn any_token() -> Parser {
    satisfy("pany", |_| true)
}

fn seq2(first: Parser, second: Parser) -> Parser {
    Parser::new(move |s| {
        let r1 = first.parse(s)?;
        let ParseOutcome::Success {
            values: mut v1,
            rest: rest1,
        } = r1
        else {
            return Ok(r1);
        };
        match second.parse(&rest1)? {
            ParseOutcome::Success { values: v2, rest } => {
                v1.extend(v2);
                Ok(ParseOutcome::success(v1, rest))
            }
            ParseOutcome::Failure { reasons, .. } => {
                let mut chain = Vec::with_capacity(reasons.len() + 1);
                chain.push("p+".to_string());
                chain.extend(reasons);
                Ok(ParseOutcome::failure(chain, s.clone()))
            }
        }
    })
}

fn choice2(first: Parser, second: Parser) -> Parser {
    Parser::new(move |s| {
        let r1 = first.parse(s)?;
        if r1.is_success() {
            Ok(r1)
        } else {
            second.parse(s)
        }
    })
}

/// Right-nested fold of a binary combinator: `m(p1, m(p2, ... m(px, pn)))`.
fn nest(parsers: impl IntoIterator<Item = Parser>, m: fn(Parser, Parser) -> Parser) -> Parser {
    let mut parsers: Vec<Parser> = parsers.into_iter().collect();
    let mut acc = parsers.pop().expect("combinator needs at least one parser");
    while let Some(p) = parsers.pop() {
        acc = m(p, acc);
    }
    acc
}

/// Sequence. Captures are concatenated; a failure after the first element
/// is reported as `["p+", inner...]` against the original input.
///
/// Panics if `parsers` is empty.
pub fn seq(parsers: impl IntoIterator<Item = Parser>) -> Parser {
    nest(parsers, seq2)
}

/// Ordered choice. Returns the first success, or the last alternative's
/// failure.
///
/// Panics if `parsers` is empty.
pub fn choice(parsers: impl IntoIterator<Item = Parser>) -> Parser {
    nest(parsers, choice2)
}

/// `p` or nothing.
pub fn optional(p: Parser) -> Parser {
    choice2(p, epsilon())
}

fn repeat(p: Parser, at_least_one: bool) -> Parser {
    Parser::new(move |s| {
        let mut values = Vec::new();
        let mut cursor = s.clone();
        let mut count = 0usize;
        loop {
            match p.parse(&cursor)? {
                ParseOutcome::Success { values: v, rest } => {
                    if rest.position() == cursor.position() {
                        return Err(ParseError::NonProgress {
                            parser: p.label(),
                            position: cursor.position(),
                        });
                    }
                    values.extend(v);
                    cursor = rest;
                    count += 1;
                }
                ParseOutcome::Failure { reasons, .. } => {
                    if count == 0 && at_least_one {
                        let mut chain = Vec::with_capacity(reasons.len() + 1);
                        chain.push("pMANY".to_string());
                        chain.extend(reasons);
                        return Ok(ParseOutcome::failure(chain, s.clone()));
                    }
                    return Ok(ParseOutcome::success(values, cursor));
                }
            }
        }
    })
}

/// Greedy one-or-more repetition.
pub fn many1(p: Parser) -> Parser {
    repeat(p, true)
}

/// Greedy zero-or-more repetition; never fails.
pub fn many0(p: Parser) -> Parser {
    repeat(p, false)
}

/// Signature of semantic actions: captures in, replacement captures out.
pub type ActionFn = dyn Fn(&[Form]) -> Result<Vec<Form>, String> + Send + Sync;

/// Replaces the captures of a successful `p` with `f(captures)`.
pub fn map_action(
    p: Parser,
    action_name: &str,
    f: impl Fn(&[Form]) -> Result<Vec<Form>, String> + Send + Sync + 'static,
) -> Parser {
    map_action_arc(p, action_name, Arc::new(f))
}

pub(crate) fn map_action_arc(p: Parser, action_name: &str, f: Arc<ActionFn>) -> Parser {
    let action_name = action_name.to_string();
    Parser::new(move |s| match p.parse(s)? {
        ParseOutcome::Success { values, rest } => match f(&values) {
            Ok(mapped) => Ok(ParseOutcome::success(mapped, rest)),
            Err(message) => Err(ParseError::Action {
                action: action_name.clone(),
                message,
                captures: values,
            }),
        },
        failure => Ok(failure),
    })
}

/// Matches one list token whose items `p` consumes completely.
pub fn descend(p: Parser) -> Parser {
    Parser::new(move |s| {
        let Some(token) = s.peek() else {
            return Ok(ParseOutcome::fail(EMPTY, s));
        };
        let Some(items) = token.as_list() else {
            return Ok(ParseOutcome::failure(
                vec!["descend".to_string(), "not a list".to_string()],
                s.clone(),
            ));
        };
        let inner = TokenStream::new(items.to_vec());
        match p.parse(&inner)? {
            ParseOutcome::Success { values, rest } if rest.is_exhausted() => {
                Ok(ParseOutcome::success(values, s.advance(1)))
            }
            ParseOutcome::Success { .. } => Ok(ParseOutcome::failure(
                vec!["descend".to_string(), "unconsumed list items".to_string()],
                s.clone(),
            )),
            ParseOutcome::Failure { reasons, .. } => {
                let mut chain = vec!["descend".to_string()];
                chain.extend(reasons);
                Ok(ParseOutcome::failure(chain, s.clone()))
            }
        }
    })
}

/// Builds a self-referential parser. `build` receives a handle that
/// delegates to the parser being defined.
///
/// The handle only holds a weak reference; it stays valid while the
/// returned parser is alive.
pub fn recursive(build: impl FnOnce(Parser) -> Parser) -> Parser {
    let slot: Arc<OnceLock<Parser>> = Arc::new(OnceLock::new());
    let weak = Arc::downgrade(&slot);
    let handle = Parser::new(move |s| {
        let slot = weak.upgrade().expect("recursive parser handle outlived its definition");
        let p = slot.get().expect("recursive parser invoked during construction");
        p.parse(s)
    });
    let built = build(handle);
    let name = built.name.clone();
    slot.set(built).expect("slot is set once");
    let mut p = Parser::new(move |s| slot.get().expect("initialized").parse(s));
    p.name = name;
    p
}

/// The floating point recognizer built directly from combinators:
/// optional sign, one or more digits, optional `.` followed by one or more
/// digits.
pub fn parse_num() -> Parser {
    seq([
        choice([char_in(['-', '+']), epsilon()]),
        many1(digit()),
        choice([seq([char_eq('.'), many1(digit())]), epsilon()]),
    ])
    .named("parse-num")
}
