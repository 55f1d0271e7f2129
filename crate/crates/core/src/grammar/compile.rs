use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, Weak};

use crate::combinator::{
    alpha, any_token, char_eq, choice, descend, digit, epsilon, many1, map_action_arc, optional, seq, symbol_eq,
    whitespace, ActionFn, Parser,
};
use crate::form::Form;
use crate::number::Number;

use super::{Grammar, GrammarError, GrammarNode, Literal};

/// Named parsers and actions that grammars may refer to.
#[derive(Clone)]
pub struct ParserEnv {
    parsers: BTreeMap<String, Parser>,
    nullable: BTreeSet<String>,
    actions: BTreeMap<String, Arc<ActionFn>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is already defined")]
pub struct DuplicateName(pub String);

impl ParserEnv {
    /// An environment with nothing in it.
    pub fn empty() -> Self {
        ParserEnv {
            parsers: BTreeMap::new(),
            nullable: BTreeSet::new(),
            actions: BTreeMap::new(),
        }
    }

    pub fn define_parser(&mut self, name: &str, parser: Parser) -> Result<(), DuplicateName> {
        if self.parsers.contains_key(name) {
            return Err(DuplicateName(name.to_string()));
        }
        self.parsers.insert(name.to_string(), parser.named(name));
        Ok(())
    }

    /// Like [`define_parser`](Self::define_parser), for parsers that can
    /// succeed without consuming input. Left recursion checks need to know.
    pub fn define_nullable_parser(&mut self, name: &str, parser: Parser) -> Result<(), DuplicateName> {
        self.define_parser(name, parser)?;
        self.nullable.insert(name.to_string());
        Ok(())
    }

    pub fn define_action(
        &mut self,
        name: &str,
        action: impl Fn(&[Form]) -> Result<Vec<Form>, String> + Send + Sync + 'static,
    ) -> Result<(), DuplicateName> {
        if self.actions.contains_key(name) {
            return Err(DuplicateName(name.to_string()));
        }
        self.actions.insert(name.to_string(), Arc::new(action));
        Ok(())
    }

    pub fn parser(&self, name: &str) -> Option<&Parser> {
        self.parsers.get(name)
    }

    pub fn parser_names(&self) -> BTreeSet<String> {
        self.parsers.keys().cloned().collect()
    }

    pub fn nullable_names(&self) -> BTreeSet<String> {
        self.nullable.clone()
    }

    pub fn action_names(&self) -> BTreeSet<String> {
        self.actions.keys().cloned().collect()
    }
}

fn chars_to_string(values: &[Form]) -> Result<String, String> {
    values
        .iter()
        .map(|v| v.as_char().ok_or_else(|| format!("expected a character, got {v}")))
        .collect()
}

/// Builtins: parsers `digit`, `alpha`, `whitespace`, `any`, `epsilon`;
/// actions `text` (characters to a string), `number` (characters to an
/// exact decimal), `symbol`, `list` (wrap captures) and `drop`.
impl Default for ParserEnv {
    fn default() -> Self {
        let mut env = ParserEnv::empty();
        let builtins = [
            ("digit", digit()),
            ("alpha", alpha()),
            ("whitespace", whitespace()),
            ("any", any_token()),
        ];
        for (name, p) in builtins {
            env.define_parser(name, p).expect("fresh env");
        }
        env.define_nullable_parser("epsilon", epsilon()).expect("fresh env");

        env.define_action("text", |v| Ok(vec![Form::text(chars_to_string(v)?)]))
            .expect("fresh env");
        env.define_action("number", |v| {
            let text = chars_to_string(v)?;
            Number::from_decimal_str(&text)
                .map(|n| vec![Form::num(n)])
                .map_err(|e| e.to_string())
        })
        .expect("fresh env");
        env.define_action("symbol", |v| {
            let text = chars_to_string(v)?;
            crate::form::Symbol::new(&text)
                .map(|s| vec![Form::Atom(crate::form::Atom::Symbol(s))])
                .map_err(|e| e.to_string())
        })
        .expect("fresh env");
        env.define_action("list", |v| Ok(vec![Form::list(v.iter().cloned())]))
            .expect("fresh env");
        env.define_action("drop", |_| Ok(Vec::new())).expect("fresh env");
        env
    }
}

impl fmt::Debug for ParserEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParserEnv")
            .field("parsers", &self.parsers.keys().collect::<Vec<_>>())
            .field("actions", &self.actions.keys().collect::<Vec<_>>())
            .finish()
    }
}

type RuleTable = OnceLock<HashMap<String, Parser>>;

/// Compiles the grammar's start rule into a parser.
pub fn compile_grammar(grammar: &Grammar, env: &ParserEnv) -> Result<Parser, GrammarError> {
    compile_rule(grammar, env, grammar.start())
}

/// Compiles `grammar` with `rule` as the entry point. Rule references are
/// resolved lazily through a shared table, so mutually recursive rules work.
pub fn compile_rule(grammar: &Grammar, env: &ParserEnv, rule: &str) -> Result<Parser, GrammarError> {
    if grammar.rule(rule).is_none() {
        return Err(GrammarError::UnresolvedRule {
            name: rule.to_string(),
            line: 0,
            column: 0,
        });
    }
    let table: Arc<RuleTable> = Arc::new(OnceLock::new());
    let compiler = Compiler {
        grammar,
        env,
        table: Arc::downgrade(&table),
    };
    let mut compiled = HashMap::new();
    for r in grammar.rules() {
        compiled.insert(r.name.clone(), compiler.node(&r.body)?.named(&r.name));
    }
    table.set(compiled).expect("table is filled once");
    let entry = rule.to_string();
    Ok(Parser::new(move |s| table.get().expect("filled")[&entry].parse(s)).named(rule))
}

struct Compiler<'a> {
    grammar: &'a Grammar,
    env: &'a ParserEnv,
    // weak, so the rule table does not own itself through its parsers
    table: Weak<RuleTable>,
}

impl Compiler<'_> {
    fn node(&self, node: &GrammarNode) -> Result<Parser, GrammarError> {
        Ok(match node {
            GrammarNode::RuleRef { name, line, column } => {
                if self.grammar.rule(name).is_some() {
                    let table = self.table.clone();
                    let name = name.clone();
                    Parser::new(move |s| {
                        let table = table.upgrade().expect("rule table outlived by its parsers");
                        table.get().expect("filled")[&name].parse(s)
                    })
                } else if let Some(p) = self.env.parser(name) {
                    p.clone()
                } else {
                    return Err(GrammarError::UnresolvedRule {
                        name: name.clone(),
                        line: *line,
                        column: *column,
                    });
                }
            }
            GrammarNode::Lit(Literal::Char(c)) => char_eq(*c),
            GrammarNode::Lit(Literal::Symbol(s)) => symbol_eq(s),
            GrammarNode::Seq(parts) => seq(self.nodes(parts)?),
            GrammarNode::Choice(parts) => choice(self.nodes(parts)?),
            GrammarNode::Repeat(body) => many1(self.node(body)?),
            GrammarNode::Optional(body) => optional(self.node(body)?),
            GrammarNode::Descend(body) => descend(self.node(body)?),
            GrammarNode::Action { body, action } => {
                let f = self
                    .env
                    .actions
                    .get(action)
                    .ok_or_else(|| GrammarError::UnknownAction(action.clone()))?;
                map_action_arc(self.node(body)?, action, Arc::clone(f))
            }
        })
    }

    fn nodes(&self, nodes: &[GrammarNode]) -> Result<Vec<Parser>, GrammarError> {
        nodes.iter().map(|n| self.node(n)).collect()
    }
}
