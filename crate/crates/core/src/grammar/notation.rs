//! Reader for grammar notation, itself written with the combinators: a
//! character-level lexer produces token forms, and a token-level parser
//! turns them into [`GrammarNode`]s.

use crate::combinator::{
    any_token, char_eq, choice, many0, many1, map_action, optional, recursive, satisfy, seq, whitespace, ParseError,
    ParseOutcome, Parser, TokenStream,
};
use crate::form::{line_column, Form, Symbol};
use crate::number::Number;

use super::{Grammar, GrammarError, GrammarNode, Literal, ParserEnv, Rule};

/// Parses and validates grammar text. References may name rules of the
/// grammar or parsers registered in `env`.
pub fn parse_grammar_with(text: &str, env: &ParserEnv) -> Result<Grammar, GrammarError> {
    let tokens = tokenize(text)?;
    let end = end_position(text);
    let (rules, start) = parse_rules(tokens, end)?;
    Grammar::new(rules, start, &env.parser_names(), &env.nullable_names())
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn end_position(text: &str) -> (usize, usize) {
    line_column(text, text.len())
}

fn token(kind: &str, payload: Form) -> Form {
    Form::list([Form::sym(kind), payload])
}

fn text_of(values: &[Form]) -> String {
    values.iter().filter_map(Form::as_char).collect()
}

fn punct(spelling: &str, name: &'static str) -> Parser {
    let parts: Vec<Parser> = spelling.chars().map(char_eq).collect();
    map_action(seq(parts), name, move |_| Ok(vec![token("p", Form::sym(name))]))
}

struct Lexer {
    skip: Parser,
    token: Parser,
}

impl Lexer {
    fn new() -> Self {
        let not_newline = satisfy("not-newline", |t| t.as_char().is_some_and(|c| c != '\n'));
        let comment = seq([char_eq('#'), many0(not_newline)]);
        let skip = many0(choice([whitespace(), comment]));

        let ident_start = satisfy("ident", |t| {
            t.as_char().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        });
        let ident_rest = satisfy("ident", |t| {
            t.as_char()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        });
        let ident = map_action(seq([ident_start, many0(ident_rest)]), "ident", |v| {
            Ok(vec![token("id", Form::text(text_of(v)))])
        });

        let escape = map_action(seq([char_eq('\\'), any_token()]), "escape", |v| {
            let c = match v[1].as_char() {
                Some('n') => '\n',
                Some('t') => '\t',
                Some('r') => '\r',
                Some(c @ ('\\' | '\'' | '"')) => c,
                other => {
                    return Err(format!(
                        "unknown escape `\\{}`",
                        other.map(String::from).unwrap_or_default()
                    ))
                }
            };
            Ok(vec![Form::char(c)])
        });
        let plain = satisfy("char", |t| t.as_char().is_some_and(|c| c != '\'' && c != '\\'));
        let char_lit = map_action(
            seq([char_eq('\''), choice([escape, plain]), char_eq('\'')]),
            "char-literal",
            |v| Ok(vec![token("chr", v[1].clone())]),
        );

        let sym_char = satisfy("symbol", |t| {
            t.as_char().is_some_and(|c| c != '"' && !c.is_whitespace())
        });
        let sym_lit = map_action(
            seq([char_eq('"'), many1(sym_char), char_eq('"')]),
            "symbol-literal",
            |v| {
                let name = text_of(&v[1..v.len() - 1]);
                Symbol::new(&name).map_err(|e| e.to_string())?;
                Ok(vec![token("lit", Form::text(name))])
            },
        );

        let token = choice([
            punct(":->", "action"),
            punct(":=", "define"),
            punct("@(", "descend"),
            punct("/", "slash"),
            punct("+", "plus"),
            punct("*", "star"),
            punct("?", "question"),
            punct("(", "lparen"),
            punct(")", "rparen"),
            punct(";", "semi"),
            char_lit,
            sym_lit,
            ident,
        ]);
        Lexer { skip, token }
    }
}

/// Splits grammar text into token forms `(kind payload line column)`.
fn tokenize(text: &str) -> Result<Vec<Form>, GrammarError> {
    let chars: Vec<char> = text.chars().collect();
    let mut offsets = Vec::with_capacity(chars.len() + 1);
    let mut offset = 0;
    for c in &chars {
        offsets.push(offset);
        offset += c.len_utf8();
    }
    offsets.push(offset);
    let position = |index: usize| line_column(text, offsets[index]);

    let lexer = Lexer::new();
    let mut cursor = TokenStream::from_chars(text);
    let mut tokens = Vec::new();
    let internal = |e: ParseError, at: usize| {
        let (line, column) = position(at);
        match e {
            ParseError::Action { message, .. } => syntax(line, column, message),
            other => syntax(line, column, other.to_string()),
        }
    };
    loop {
        cursor = match lexer.skip.parse(&cursor).map_err(|e| internal(e, cursor.position()))? {
            ParseOutcome::Success { rest, .. } => rest,
            ParseOutcome::Failure { rest, .. } => rest,
        };
        let Some(next) = cursor.peek() else {
            return Ok(tokens);
        };
        let at = cursor.position();
        match lexer.token.parse(&cursor).map_err(|e| internal(e, at))? {
            ParseOutcome::Success { values, rest } => {
                let (line, column) = position(at);
                for v in values {
                    let mut items = v.as_list().expect("token form").to_vec();
                    items.push(Form::num(line as i64));
                    items.push(Form::num(column as i64));
                    tokens.push(Form::List(items));
                }
                cursor = rest;
            }
            ParseOutcome::Failure { .. } => {
                let (line, column) = position(at);
                let message = match next.as_char() {
                    Some('\'') => "malformed character literal".to_string(),
                    Some('"') => "malformed symbol literal".to_string(),
                    Some(c) => format!("unexpected character `{c}`"),
                    None => "unexpected token".to_string(),
                };
                return Err(syntax(line, column, message));
            }
        }
    }
}

fn token_kind(t: &Form) -> Option<&str> {
    t.as_list()?.first()?.as_symbol()
}

fn token_payload(t: &Form) -> Option<&Form> {
    t.as_list()?.get(1)
}

fn token_position(t: &Form) -> (usize, usize) {
    let items = t.as_list().unwrap_or(&[]);
    let get = |i: usize| {
        items
            .get(i)
            .and_then(Form::as_number)
            .and_then(Number::to_i64)
            .unwrap_or(0) as usize
    };
    (get(items.len().saturating_sub(2)), get(items.len().saturating_sub(1)))
}

fn punct_tok(name: &'static str) -> Parser {
    satisfy(name, move |t| {
        token_kind(t) == Some("p") && token_payload(t).is_some_and(|p| p.is_symbol(name))
    })
}

fn kind_tok(kind: &'static str) -> Parser {
    satisfy(kind, move |t| token_kind(t) == Some(kind))
}

fn is_punct(f: &Form) -> bool {
    token_kind(f) == Some("p")
}

fn node(kind: &str, items: impl IntoIterator<Item = Form>) -> Form {
    Form::list(std::iter::once(Form::sym(kind)).chain(items))
}

/// Builds the expression parser; captures exactly one node form on success.
fn expression_parser() -> Parser {
    recursive(|expr| {
        let reference = map_action(kind_tok("id"), "ref", |v| {
            let items = v[0].as_list().expect("token");
            Ok(vec![node("ref", items[1..].iter().cloned())])
        });
        let char_lit = map_action(kind_tok("chr"), "chr", |v| {
            Ok(vec![node("chr", [token_payload(&v[0]).cloned().expect("payload")])])
        });
        let sym_lit = map_action(kind_tok("lit"), "lit", |v| {
            Ok(vec![node("lit", [token_payload(&v[0]).cloned().expect("payload")])])
        });
        let group = map_action(
            seq([punct_tok("lparen"), expr.clone(), punct_tok("rparen")]),
            "group",
            |v| Ok(vec![v[1].clone()]),
        );
        let descend = map_action(
            seq([punct_tok("descend"), expr.clone(), punct_tok("rparen")]),
            "descend",
            |v| Ok(vec![node("down", [v[1].clone()])]),
        );
        let primary = choice([reference, char_lit, sym_lit, group, descend]);

        let postfix = map_action(
            seq([primary, many0(choice([punct_tok("star"), punct_tok("question")]))]),
            "postfix",
            |v| {
                let mut n = v[0].clone();
                for op in &v[1..] {
                    let kind = if token_payload(op).is_some_and(|p| p.is_symbol("star")) {
                        "rep"
                    } else {
                        "opt"
                    };
                    n = node(kind, [n]);
                }
                Ok(vec![n])
            },
        );

        let sequence = map_action(
            seq([postfix.clone(), many0(seq([optional(punct_tok("plus")), postfix]))]),
            "sequence",
            |v| {
                let parts: Vec<Form> = v.iter().filter(|f| !is_punct(f)).cloned().collect();
                Ok(if parts.len() == 1 {
                    parts
                } else {
                    vec![node("seq", parts)]
                })
            },
        );

        let actioned = map_action(
            seq([sequence, optional(seq([punct_tok("action"), kind_tok("id")]))]),
            "actioned",
            |v| {
                Ok(match v {
                    [body] => vec![body.clone()],
                    [body, _, name] => vec![node(
                        "act",
                        [body.clone(), token_payload(name).cloned().expect("payload")],
                    )],
                    _ => return Err("malformed action".into()),
                })
            },
        );

        map_action(
            seq([actioned.clone(), many0(seq([punct_tok("slash"), actioned]))]),
            "choice",
            |v| {
                let parts: Vec<Form> = v.iter().filter(|f| !is_punct(f)).cloned().collect();
                Ok(if parts.len() == 1 {
                    parts
                } else {
                    vec![node("alt", parts)]
                })
            },
        )
    })
    .named("grammar-expression")
}

fn node_from_form(form: &Form) -> GrammarNode {
    let items = form.as_list().expect("node form");
    let kind = items[0].as_symbol().expect("node kind");
    let child = |i: usize| Box::new(node_from_form(&items[i]));
    match kind {
        "ref" => {
            let (line, column) = token_position(form);
            GrammarNode::RuleRef {
                name: items[1].as_text().expect("name").to_string(),
                line,
                column,
            }
        }
        "chr" => GrammarNode::Lit(Literal::Char(items[1].as_char().expect("char"))),
        "lit" => GrammarNode::Lit(Literal::Symbol(items[1].as_text().expect("name").to_string())),
        "rep" => GrammarNode::Repeat(child(1)),
        "opt" => GrammarNode::Optional(child(1)),
        "down" => GrammarNode::Descend(child(1)),
        "seq" => GrammarNode::Seq(items[1..].iter().map(node_from_form).collect()),
        "alt" => GrammarNode::Choice(items[1..].iter().map(node_from_form).collect()),
        "act" => GrammarNode::Action {
            body: child(1),
            action: items[2].as_text().expect("action").to_string(),
        },
        other => unreachable!("unknown node kind {other}"),
    }
}

type StartDecl = Option<(String, usize, usize)>;

fn parse_rules(tokens: Vec<Form>, end: (usize, usize)) -> Result<(Vec<Rule>, StartDecl), GrammarError> {
    let expr = expression_parser();
    let head = seq([kind_tok("id"), punct_tok("define")]);
    let start_decl = seq([kind_tok("id"), kind_tok("id"), punct_tok("semi")]);
    let semi = punct_tok("semi");

    let at = |s: &TokenStream| s.peek().map(token_position).unwrap_or(end);
    let describe = |s: &TokenStream| match s.peek() {
        None => "end of input".to_string(),
        Some(t) => match (token_kind(t), token_payload(t)) {
            (Some("p"), Some(p)) => format!("`{}`", spelling(p.as_symbol().unwrap_or(""))),
            (Some("id"), Some(p)) => format!("identifier `{}`", p.as_text().unwrap_or("")),
            (Some("chr"), _) => "character literal".to_string(),
            (Some("lit"), _) => "symbol literal".to_string(),
            _ => "token".to_string(),
        },
    };
    let fail = |s: &TokenStream, expected: &str| {
        let (line, column) = at(s);
        syntax(line, column, format!("expected {expected}, found {}", describe(s)))
    };
    let internal = |s: &TokenStream, e: ParseError| {
        let (line, column) = at(s);
        syntax(line, column, e.to_string())
    };

    let mut cursor = TokenStream::new(tokens);
    let mut rules = Vec::new();
    let mut start: StartDecl = None;
    while let Some(first) = cursor.peek() {
        let is_start = token_payload(first).is_some_and(|p| p.as_text() == Some("start"))
            && token_kind(first) == Some("id")
            && cursor.advance(1).peek().is_some_and(|t| token_kind(t) == Some("id"));
        if is_start {
            match start_decl.parse(&cursor).map_err(|e| internal(&cursor, e))? {
                ParseOutcome::Success { values, rest } => {
                    if start.is_some() {
                        return Err(fail(&cursor, "a single `start` declaration"));
                    }
                    let (line, column) = token_position(&values[1]);
                    let name = token_payload(&values[1]).and_then(Form::as_text).unwrap_or("");
                    start = Some((name.to_string(), line, column));
                    cursor = rest;
                }
                ParseOutcome::Failure { .. } => return Err(fail(&cursor.advance(2), "`;`")),
            }
            continue;
        }

        let (name_token, after_head) = match head.parse(&cursor).map_err(|e| internal(&cursor, e))? {
            ParseOutcome::Success { values, rest } => (values[0].clone(), rest),
            ParseOutcome::Failure { .. } => {
                let expected = if token_kind(first) == Some("id") {
                    return Err(fail(&cursor.advance(1), "`:=`"));
                } else {
                    "rule name"
                };
                return Err(fail(&cursor, expected));
            }
        };
        let (body, after_body) = match expr.parse(&after_head).map_err(|e| internal(&after_head, e))? {
            ParseOutcome::Success { values, rest } => (node_from_form(&values[0]), rest),
            ParseOutcome::Failure { .. } => return Err(fail(&after_head, "expression")),
        };
        match semi.parse(&after_body).map_err(|e| internal(&after_body, e))? {
            ParseOutcome::Success { rest, .. } => cursor = rest,
            ParseOutcome::Failure { .. } => return Err(fail(&after_body, "`;` or operator")),
        }
        let (line, column) = token_position(&name_token);
        rules.push(Rule {
            name: token_payload(&name_token)
                .and_then(Form::as_text)
                .unwrap_or("")
                .to_string(),
            body,
            line,
            column,
        });
    }
    Ok((rules, start))
}

fn spelling(punct: &str) -> &'static str {
    match punct {
        "action" => ":->",
        "define" => ":=",
        "descend" => "@(",
        "slash" => "/",
        "plus" => "+",
        "star" => "*",
        "question" => "?",
        "lparen" => "(",
        "rparen" => ")",
        "semi" => ";",
        _ => "?",
    }
}
