//! The universal S-expression data model: tokens, syntax trees and parse
//! results are all [`Form`]s.

use std::fmt;
use std::sync::Arc;

use crate::number::{Number, NumberError};

/// An interned-by-refcount symbol name.
///
/// Names are non-empty, contain no whitespace, parentheses or double quotes,
/// do not start with `#`, and do not spell a number. Those rules keep
/// `read(render(f)) == f` for every form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid symbol name {0:?}")]
pub struct InvalidSymbol(pub String);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, InvalidSymbol> {
        if is_valid_symbol(name) {
            Ok(Symbol(Arc::from(name)))
        } else {
            Err(InvalidSymbol(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '"')
}

fn is_valid_symbol(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('#')
        && !name.chars().any(is_delimiter)
        && !matches!(name.parse::<Number>(), Ok(_) | Err(NumberError::ZeroDenominator))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Char(char),
    Symbol(Symbol),
    Number(Number),
    Text(String),
    Boolean(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Form {
    Atom(Atom),
    List(Vec<Form>),
}

impl Form {
    pub fn char(c: char) -> Self {
        Form::Atom(Atom::Char(c))
    }

    /// Builds a symbol form.
    ///
    /// Panics if `name` is not a valid symbol; use [`Symbol::new`] for
    /// untrusted input.
    pub fn sym(name: &str) -> Self {
        Form::Atom(Atom::Symbol(Symbol::new(name).expect("valid symbol name")))
    }

    pub fn num(value: impl Into<Number>) -> Self {
        Form::Atom(Atom::Number(value.into()))
    }

    pub fn text(value: impl Into<String>) -> Self {
        Form::Atom(Atom::Text(value.into()))
    }

    pub fn boolean(value: bool) -> Self {
        Form::Atom(Atom::Boolean(value))
    }

    pub fn list(items: impl IntoIterator<Item = Form>) -> Self {
        Form::List(items.into_iter().collect())
    }

    /// One character form per scalar value of `text`.
    pub fn chars(text: &str) -> Vec<Form> {
        text.chars().map(Form::char).collect()
    }

    pub fn as_char(&self) -> Option<char> {
        match self {
            Form::Atom(Atom::Char(c)) => Some(*c),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Form::Atom(Atom::Symbol(s)) => Some(s.as_str()),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            Form::Atom(Atom::Number(n)) => Some(n),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Form::Atom(Atom::Text(t)) => Some(t),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Form]> {
        match self {
            Form::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.as_symbol() == Some(name)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Atom(atom) => fmt::Display::fmt(atom, f),
            Form::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    fmt::Display::fmt(item, f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Char(c) => match char_name(*c) {
                Some(name) => write!(f, "#\\{name}"),
                None if c.is_whitespace() || c.is_control() => write!(f, "#\\x{:x}", *c as u32),
                None => write!(f, "#\\{c}"),
            },
            Atom::Symbol(s) => f.write_str(s.as_str()),
            Atom::Number(n) => write!(f, "{n}"),
            Atom::Text(t) => {
                f.write_str("\"")?;
                for c in t.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Atom::Boolean(true) => f.write_str("#t"),
            Atom::Boolean(false) => f.write_str("#f"),
        }
    }
}

const CHAR_NAMES: &[(&str, char)] = &[
    ("space", ' '),
    ("newline", '\n'),
    ("tab", '\t'),
    ("return", '\r'),
    ("nul", '\0'),
];

fn char_name(c: char) -> Option<&'static str> {
    CHAR_NAMES.iter().find(|(_, ch)| *ch == c).map(|(n, _)| *n)
}

/// Canonical textual rendering of a form.
pub fn render(form: &Form) -> String {
    form.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ReadError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Reads exactly one form from `text`. Surrounding whitespace is allowed,
/// anything else after the form is an error.
pub fn read(text: &str) -> Result<Form, ReadError> {
    let mut reader = Reader::new(text);
    reader.skip_whitespace();
    if reader.at_end() {
        return Err(reader.error("empty input"));
    }
    let form = reader.form()?;
    reader.skip_whitespace();
    if !reader.at_end() {
        return Err(reader.error("unexpected text after form"));
    }
    Ok(form)
}

/// Reads every form in `text`, in order.
pub fn read_all(text: &str) -> Result<Vec<Form>, ReadError> {
    let mut reader = Reader::new(text);
    let mut forms = Vec::new();
    loop {
        reader.skip_whitespace();
        if reader.at_end() {
            return Ok(forms);
        }
        forms.push(reader.form()?);
    }
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader { text, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_whitespace(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> ReadError {
        let (line, column) = line_column(self.text, offset);
        ReadError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ReadError {
        self.error_at(self.pos, message)
    }

    fn token(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| !is_delimiter(c)) {
            self.bump();
        }
        &self.text[start..self.pos]
    }

    fn form(&mut self) -> Result<Form, ReadError> {
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_whitespace();
                    match self.peek() {
                        None => return Err(self.error_at(start, "unbalanced `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Form::List(items));
                        }
                        Some(_) => items.push(self.form()?),
                    }
                }
            }
            Some(')') => Err(self.error("unbalanced `)`")),
            Some('"') => self.text_literal(),
            Some('#') => self.hash_literal(),
            Some(_) => {
                let token = self.token();
                match token.parse::<Number>() {
                    Ok(n) => return Ok(Form::num(n)),
                    Err(e @ NumberError::ZeroDenominator) => return Err(self.error_at(start, e.to_string())),
                    Err(NumberError::Malformed(_)) => {}
                }
                Symbol::new(token)
                    .map(|s| Form::Atom(Atom::Symbol(s)))
                    .map_err(|e| self.error_at(start, e.to_string()))
            }
        }
    }

    fn text_literal(&mut self) -> Result<Form, ReadError> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated string")),
                Some('"') => return Ok(Form::text(out)),
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('r') => out.push('\r'),
                    _ => return Err(self.error("unknown string escape")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn hash_literal(&mut self) -> Result<Form, ReadError> {
        let start = self.pos;
        self.bump();
        if self.peek() == Some('\\') {
            self.bump();
            let Some(first) = self.bump() else {
                return Err(self.error_at(start, "incomplete character literal"));
            };
            let rest = self.token();
            if rest.is_empty() {
                return Ok(Form::char(first));
            }
            let name = format!("{first}{rest}");
            if let Some((_, c)) = CHAR_NAMES.iter().find(|(n, _)| *n == name) {
                return Ok(Form::char(*c));
            }
            if let Some(hex) = name.strip_prefix('x') {
                if let Some(c) = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32) {
                    return Ok(Form::char(c));
                }
            }
            return Err(self.error_at(start, format!("unknown character name `{name}`")));
        }
        match self.token() {
            "t" => Ok(Form::boolean(true)),
            "f" => Ok(Form::boolean(false)),
            other => Err(self.error_at(start, format!("unknown literal `#{other}`"))),
        }
    }
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}
