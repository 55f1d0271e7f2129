//! A textual grammar language compiled at runtime onto the combinators.
//!
//! ```text
//! # one rule per `name := body ;`
//! num := ('-' / '+')? digit* ('.' digit*)? ;
//! ```
//!
//! | syntax          | meaning                                   |
//! |-----------------|-------------------------------------------|
//! | `a b`, `a + b`  | sequence                                  |
//! | `a / b`         | ordered choice, binds looser than `+`     |
//! | `a*`            | **one** or more (not Kleene star)         |
//! | `a?`            | optional                                  |
//! | `a*?`           | zero or more                              |
//! | `'c'`           | character literal (`\n \t \\ \'` escapes) |
//! | `"sym"`         | symbol literal                            |
//! | `@( a )`        | descend into a nested list token          |
//! | `a :-> name`    | semantic action looked up in the env      |
//!
//! The first rule is the start rule unless `start name;` says otherwise.
//! `#` starts a comment that runs to the end of the line.

mod compile;
mod notation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use compile::{compile_grammar, compile_rule, ParserEnv};
pub use notation::parse_grammar_with;

/// The floating point recognizer written in grammar notation.
pub const FLOAT_GRAMMAR: &str = "num := ('-' / '+')? digit* ('.' digit*)? ;";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Char(char),
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrammarNode {
    RuleRef {
        name: String,
        line: usize,
        column: usize,
    },
    Lit(Literal),
    Seq(Vec<GrammarNode>),
    Choice(Vec<GrammarNode>),
    /// One or more.
    Repeat(Box<GrammarNode>),
    Optional(Box<GrammarNode>),
    Descend(Box<GrammarNode>),
    Action {
        body: Box<GrammarNode>,
        action: String,
    },
}

impl GrammarNode {
    pub fn rule_ref(name: &str) -> Self {
        GrammarNode::RuleRef {
            name: name.to_string(),
            line: 0,
            column: 0,
        }
    }

    fn visit_refs<'a>(&'a self, out: &mut Vec<&'a GrammarNode>) {
        match self {
            GrammarNode::RuleRef { .. } => out.push(self),
            GrammarNode::Lit(_) => {}
            GrammarNode::Seq(parts) | GrammarNode::Choice(parts) => parts.iter().for_each(|p| p.visit_refs(out)),
            GrammarNode::Repeat(b) | GrammarNode::Optional(b) | GrammarNode::Descend(b) => b.visit_refs(out),
            GrammarNode::Action { body, .. } => body.visit_refs(out),
        }
    }

    /// Structural equality ignoring the source positions of rule references.
    pub fn same_shape(&self, other: &GrammarNode) -> bool {
        use GrammarNode::*;
        match (self, other) {
            (RuleRef { name: a, .. }, RuleRef { name: b, .. }) => a == b,
            (Lit(a), Lit(b)) => a == b,
            (Seq(a), Seq(b)) | (Choice(a), Choice(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_shape(y))
            }
            (Repeat(a), Repeat(b)) | (Optional(a), Optional(b)) | (Descend(a), Descend(b)) => a.same_shape(b),
            (Action { body: a, action: x }, Action { body: b, action: y }) => x == y && a.same_shape(b),
            _ => false,
        }
    }
}

impl fmt::Display for GrammarNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarNode::RuleRef { name, .. } => f.write_str(name),
            GrammarNode::Lit(Literal::Char(c)) => match c {
                '\n' => f.write_str("'\\n'"),
                '\t' => f.write_str("'\\t'"),
                '\r' => f.write_str("'\\r'"),
                '\\' => f.write_str("'\\\\'"),
                '\'' => f.write_str("'\\''"),
                c => write!(f, "'{c}'"),
            },
            GrammarNode::Lit(Literal::Symbol(s)) => write!(f, "\"{s}\""),
            GrammarNode::Seq(parts) => {
                f.write_str("(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            GrammarNode::Choice(parts) => {
                f.write_str("(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" / ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            GrammarNode::Repeat(b) => write!(f, "{b}*"),
            GrammarNode::Optional(b) => write!(f, "{b}?"),
            GrammarNode::Descend(b) => write!(f, "@({b})"),
            GrammarNode::Action { body, action } => write!(f, "({body} :-> {action})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub body: GrammarNode,
    pub line: usize,
    pub column: usize,
}

/// A validated set of named rules with a designated start rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Rule>,
    start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: rule `{name}` defined twice")]
    DuplicateRule { name: String, line: usize, column: usize },
    #[error("{line}:{column}: unresolved rule `{name}`")]
    UnresolvedRule { name: String, line: usize, column: usize },
    #[error("left recursion: {}", .cycle.join(" -> "))]
    LeftRecursion { cycle: Vec<String> },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

impl GrammarError {
    /// 1-based source position, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            GrammarError::Syntax { line, column, .. }
            | GrammarError::DuplicateRule { line, column, .. }
            | GrammarError::UnresolvedRule { line, column, .. } => Some((*line, *column)),
            _ => None,
        }
    }
}

/// Parses and validates grammar text against the builtin parser names.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    parse_grammar_with(text, &ParserEnv::default())
}

impl Grammar {
    /// Validates `rules` and builds a grammar. `start` defaults to the first
    /// rule. `builtins` lists parser names that references may resolve to,
    /// and `nullable_builtins` those among them that can match without
    /// consuming input.
    pub fn new(
        rules: Vec<Rule>,
        start: Option<(String, usize, usize)>,
        builtins: &BTreeSet<String>,
        nullable_builtins: &BTreeSet<String>,
    ) -> Result<Self, GrammarError> {
        let Some(first) = rules.first() else {
            return Err(GrammarError::Syntax {
                line: 1,
                column: 1,
                message: "grammar has no rules".into(),
            });
        };
        let (start, start_line, start_column) = start.unwrap_or((first.name.clone(), first.line, first.column));

        let mut seen = BTreeSet::new();
        for rule in &rules {
            if !seen.insert(rule.name.as_str()) {
                return Err(GrammarError::DuplicateRule {
                    name: rule.name.clone(),
                    line: rule.line,
                    column: rule.column,
                });
            }
        }
        if !seen.contains(start.as_str()) {
            return Err(GrammarError::UnresolvedRule {
                name: start,
                line: start_line,
                column: start_column,
            });
        }
        for rule in &rules {
            let mut refs = Vec::new();
            rule.body.visit_refs(&mut refs);
            for r in refs {
                if let GrammarNode::RuleRef { name, line, column } = r {
                    if !seen.contains(name.as_str()) && !builtins.contains(name) {
                        return Err(GrammarError::UnresolvedRule {
                            name: name.clone(),
                            line: *line,
                            column: *column,
                        });
                    }
                }
            }
        }

        let grammar = Grammar { rules, start };
        grammar.check_left_recursion(nullable_builtins)?;
        Ok(grammar)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Rules that can succeed without consuming input (least fixed point).
    fn nullable_rules(&self, nullable_builtins: &BTreeSet<String>) -> BTreeSet<String> {
        let mut nullable = BTreeSet::new();
        loop {
            let before = nullable.len();
            for rule in &self.rules {
                if !nullable.contains(&rule.name) && self.is_nullable(&rule.body, &nullable, nullable_builtins) {
                    nullable.insert(rule.name.clone());
                }
            }
            if nullable.len() == before {
                return nullable;
            }
        }
    }

    fn is_nullable(&self, node: &GrammarNode, rules: &BTreeSet<String>, builtins: &BTreeSet<String>) -> bool {
        match node {
            GrammarNode::RuleRef { name, .. } => {
                if self.rule(name).is_some() {
                    rules.contains(name)
                } else {
                    builtins.contains(name)
                }
            }
            GrammarNode::Lit(_) | GrammarNode::Descend(_) => false,
            GrammarNode::Seq(parts) => parts.iter().all(|p| self.is_nullable(p, rules, builtins)),
            GrammarNode::Choice(parts) => parts.iter().any(|p| self.is_nullable(p, rules, builtins)),
            GrammarNode::Optional(_) => true,
            GrammarNode::Repeat(b) => self.is_nullable(b, rules, builtins),
            GrammarNode::Action { body, .. } => self.is_nullable(body, rules, builtins),
        }
    }

    /// Rules that may be entered before `node` consumes anything.
    fn leading_rules(
        &self,
        node: &GrammarNode,
        nullable: &BTreeSet<String>,
        builtins: &BTreeSet<String>,
        out: &mut BTreeSet<String>,
    ) {
        match node {
            GrammarNode::RuleRef { name, .. } => {
                if self.rule(name).is_some() {
                    out.insert(name.clone());
                }
            }
            // a descended parser runs on a strictly smaller sub-stream
            GrammarNode::Lit(_) | GrammarNode::Descend(_) => {}
            GrammarNode::Seq(parts) => {
                for p in parts {
                    self.leading_rules(p, nullable, builtins, out);
                    if !self.is_nullable(p, nullable, builtins) {
                        break;
                    }
                }
            }
            GrammarNode::Choice(parts) => parts
                .iter()
                .for_each(|p| self.leading_rules(p, nullable, builtins, out)),
            GrammarNode::Repeat(b) | GrammarNode::Optional(b) => self.leading_rules(b, nullable, builtins, out),
            GrammarNode::Action { body, .. } => self.leading_rules(body, nullable, builtins, out),
        }
    }

    fn check_left_recursion(&self, nullable_builtins: &BTreeSet<String>) -> Result<(), GrammarError> {
        let nullable = self.nullable_rules(nullable_builtins);
        let edges: BTreeMap<&str, BTreeSet<String>> = self
            .rules
            .iter()
            .map(|r| {
                let mut out = BTreeSet::new();
                self.leading_rules(&r.body, &nullable, nullable_builtins, &mut out);
                (r.name.as_str(), out)
            })
            .collect();

        // depth-first search from the start rule, tracking the active path
        fn visit<'a>(
            name: &'a str,
            edges: &'a BTreeMap<&str, BTreeSet<String>>,
            path: &mut Vec<&'a str>,
            done: &mut BTreeSet<&'a str>,
        ) -> Option<Vec<String>> {
            if let Some(i) = path.iter().position(|n| *n == name) {
                let mut cycle: Vec<String> = path[i..].iter().map(|s| s.to_string()).collect();
                cycle.push(name.to_string());
                return Some(cycle);
            }
            if done.contains(name) {
                return None;
            }
            path.push(name);
            for next in &edges[name] {
                if let Some(c) = visit(next, edges, path, done) {
                    return Some(c);
                }
            }
            path.pop();
            done.insert(name);
            None
        }

        let mut path = Vec::new();
        let mut done = BTreeSet::new();
        match visit(&self.start, &edges, &mut path, &mut done) {
            Some(cycle) => Err(GrammarError::LeftRecursion { cycle }),
            None => Ok(()),
        }
    }

    /// Same rules, different start rule.
    pub fn with_start(&self, name: &str) -> Result<Grammar, GrammarError> {
        if self.rule(name).is_none() {
            return Err(GrammarError::UnresolvedRule {
                name: name.to_string(),
                line: 0,
                column: 0,
            });
        }
        Ok(Grammar {
            rules: self.rules.clone(),
            start: name.to_string(),
        })
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rules.first().map(|r| r.name.as_str()) != Some(self.start.as_str()) {
            writeln!(f, "start {};", self.start)?;
        }
        for rule in &self.rules {
            writeln!(f, "{} := {} ;", rule.name, rule.body)?;
        }
        Ok(())
    }
}
