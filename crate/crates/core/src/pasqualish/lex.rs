use std::fmt;
use std::sync::OnceLock;

use crate::combinator::{ParseOutcome, Parser, TokenStream};
use crate::form::Form;
use crate::grammar::{compile_rule, parse_grammar_with, ParserEnv};
use crate::number::Number;

use super::{BinOp, Origin, PasqError, Pos};

/// Token rules, written in the grammar language and run over characters.
pub const LEXICAL_GRAMMAR: &str = r#"
start token;
token := ident :-> ident
       / digit* :-> integer
       / ('+' / '-' / '*' / '/' / '>' / '<' / '=' / '(' / ')' / ';' / ',') :-> punct ;
ident := alpha (alpha / digit / '_')*? ;
space := whitespace*? ;
"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Function,
    Begin,
    End,
    If,
    Then,
    Else,
}

impl Keyword {
    fn from_ident(name: &str) -> Option<Self> {
        Some(match name {
            "function" => Keyword::Function,
            "begin" => Keyword::Begin,
            "end" => Keyword::End,
            "if" => Keyword::If,
            "then" => Keyword::Then,
            "else" => Keyword::Else,
            _ => return None,
        })
    }

    pub fn spelling(self) -> &'static str {
        match self {
            Keyword::Function => "function",
            Keyword::Begin => "begin",
            Keyword::End => "end",
            Keyword::If => "if",
            Keyword::Then => "then",
            Keyword::Else => "else",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Num(Number),
    Op(BinOp),
    LParen,
    RParen,
    Semicolon,
    Comma,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.spelling()),
            TokenKind::Ident(name) => write!(f, "identifier `{name}`"),
            TokenKind::Num(n) => write!(f, "number {n}"),
            TokenKind::Op(op) => write!(f, "`{}`", op.symbol()),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Semicolon => f.write_str("`;`"),
            TokenKind::Comma => f.write_str("`,`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PToken {
    pub kind: TokenKind,
    pub pos: Pos,
}

impl PToken {
    /// Token as a form, for tracing.
    pub fn to_form(&self) -> Form {
        match &self.kind {
            TokenKind::Keyword(k) => Form::list([Form::sym("keyword"), Form::sym(k.spelling())]),
            TokenKind::Ident(name) => Form::list([Form::sym("ident"), Form::text(name.as_str())]),
            TokenKind::Num(n) => Form::list([Form::sym("num"), Form::num(n.clone())]),
            TokenKind::Op(op) => Form::list([Form::sym("op"), Form::sym(op.symbol())]),
            TokenKind::LParen => Form::sym("lparen"),
            TokenKind::RParen => Form::sym("rparen"),
            TokenKind::Semicolon => Form::sym("semicolon"),
            TokenKind::Comma => Form::sym("comma"),
        }
    }
}

struct Lexer {
    space: Parser,
    token: Parser,
}

fn lexer() -> &'static Lexer {
    static LEXER: OnceLock<Lexer> = OnceLock::new();
    LEXER.get_or_init(|| {
        let mut env = ParserEnv::default();
        let chars = |v: &[Form]| -> String { v.iter().filter_map(Form::as_char).collect() };
        env.define_action("ident", move |v| {
            Ok(vec![Form::list([Form::sym("ident"), Form::text(chars(v))])])
        })
        .expect("fresh name");
        env.define_action("integer", move |v| {
            let n: Number = chars(v).parse().map_err(|e| format!("{e}"))?;
            Ok(vec![Form::list([Form::sym("num"), Form::num(n)])])
        })
        .expect("fresh name");
        env.define_action("punct", |v| Ok(vec![Form::list([Form::sym("punct"), v[0].clone()])]))
            .expect("fresh name");
        let grammar = parse_grammar_with(LEXICAL_GRAMMAR, &env).expect("lexical grammar is valid");
        Lexer {
            space: compile_rule(&grammar, &env, "space").expect("compiles"),
            token: compile_rule(&grammar, &env, "token").expect("compiles"),
        }
    })
}

fn token_kind(form: &Form) -> Option<TokenKind> {
    let [tag, payload] = form.as_list()? else {
        return None;
    };
    Some(match tag.as_symbol()? {
        "ident" => {
            let name = payload.as_text()?;
            match Keyword::from_ident(name) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(name.to_string()),
            }
        }
        "num" => TokenKind::Num(payload.as_number()?.clone()),
        "punct" => match payload.as_char()? {
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ';' => TokenKind::Semicolon,
            ',' => TokenKind::Comma,
            c => TokenKind::Op(BinOp::from_char(c)?),
        },
        _ => return None,
    })
}

/// Tokenizes source text. `origin` tags error positions.
pub fn lex_source(text: &str, origin: Origin) -> Result<Vec<PToken>, PasqError> {
    let chars: Vec<char> = text.chars().collect();
    let mut positions = Vec::with_capacity(chars.len() + 1);
    let (mut line, mut column) = (1, 1);
    for c in &chars {
        positions.push(Pos { line, column });
        if *c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    positions.push(Pos { line, column });

    let lexer = lexer();
    let lex_error = |at: usize, message: String| PasqError::Lex {
        origin,
        pos: positions[at],
        message,
    };
    let mut cursor = TokenStream::from_chars(text);
    let mut tokens = Vec::new();
    loop {
        let at = cursor.position();
        if let ParseOutcome::Success { rest, .. } =
            lexer.space.parse(&cursor).map_err(|e| lex_error(at, e.to_string()))?
        {
            cursor = rest;
        }
        let at = cursor.position();
        let Some(next) = cursor.peek() else {
            return Ok(tokens);
        };
        match lexer.token.parse(&cursor).map_err(|e| lex_error(at, e.to_string()))? {
            ParseOutcome::Success { values, rest } => {
                for v in &values {
                    let kind = token_kind(v).ok_or_else(|| lex_error(at, format!("malformed token form {v}")))?;
                    tokens.push(PToken {
                        kind,
                        pos: positions[at],
                    });
                }
                cursor = rest;
            }
            ParseOutcome::Failure { .. } => {
                let c = next.as_char().unwrap_or('?');
                return Err(lex_error(at, format!("unexpected character `{c}`")));
            }
        }
    }
}

/// Tokenizes program text.
pub fn lex(text: &str) -> Result<Vec<PToken>, PasqError> {
    lex_source(text, Origin::Program)
}
