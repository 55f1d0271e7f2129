//! Acceptance suite. Runs without the libtest harness so the verdict lines
//! are always printed; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use dsltower::calc::{calc, eval_infix, parse_calc_text, CalcError};
use dsltower::combinator::{
    any_token, char_eq, char_in, choice, epsilon, full_match, many0, many1, map_action, optional, parse_num, seq,
    ParseOutcome, Parser, TokenStream,
};
use dsltower::form::Form;
use dsltower::grammar::{compile_grammar, parse_grammar, ParserEnv, FLOAT_GRAMMAR};
use dsltower::number::Number;
use dsltower::pasqualish::{run_program, run_program_with, RunOptions};
use rand::{rngs::StdRng, Rng, SeedableRng};

use common::*;

const C1_TIME_LIMIT: Duration = Duration::from_secs(10);
const C3_PARSERS: usize = 1000;
const C3_STREAMS_PER_PARSER: usize = 100;
const C3_MAX_DEPTH: u32 = 4;
const C3_MAX_STREAM_LEN: usize = 8;
const C4_ALPHABET: [char; 3] = ['a', 'b', 'c'];
const C4_MAX_LEN: usize = 4;
const C5_RANDOM_TREES: usize = 500;
const C5_TREE_DEPTH: u32 = 4;
const C6_TIME_LIMIT: Duration = Duration::from_secs(1);
const C7_PROGRAMS: usize = 100;
const C7_TUPLES_PER_PROGRAM: usize = 10;
const C7_BODY_DEPTH: u32 = 4;
const C8_MIN_FIXTURES: usize = 12;
const SEED: u64 = 0xacce_97ed;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn chars(s: &str) -> Vec<Form> {
    Form::chars(s)
}

fn criterion_1() -> Verdict {
    let strings = all_strings(&FLOAT_ALPHABET, FLOAT_MAX_LEN);
    if strings.len() != FLOAT_STRING_COUNT {
        return Err(format!(
            "generated {} strings, expected {FLOAT_STRING_COUNT}",
            strings.len()
        ));
    }
    let oracle = float_oracle();
    let p = parse_num();
    let start = Instant::now();
    let mut disagreements = Vec::new();
    for s in &strings {
        let got = full_match(&p, chars(s)).map_err(|e| format!("{s:?}: {e}"))?;
        if got != oracle.is_match(s) {
            disagreements.push(s.clone());
        }
    }
    let elapsed = start.elapsed();
    let agree = strings.len() - disagreements.len();
    let summary = format!("{agree}/{} agree with the oracle in {elapsed:.2?}", strings.len());
    if !disagreements.is_empty() {
        Err(format!(
            "{summary}; first disagreements {:?}",
            &disagreements[..disagreements.len().min(5)]
        ))
    } else if elapsed >= C1_TIME_LIMIT {
        Err(format!("{summary}; limit {C1_TIME_LIMIT:?}"))
    } else {
        Ok(summary)
    }
}

fn criterion_2() -> Verdict {
    let grammar = parse_grammar(FLOAT_GRAMMAR).map_err(|e| e.to_string())?;
    let compiled = compile_grammar(&grammar, &ParserEnv::default()).map_err(|e| e.to_string())?;
    let hand = parse_num();
    let strings = all_strings(&FLOAT_ALPHABET, FLOAT_MAX_LEN);
    let mut disagreements = Vec::new();
    for s in &strings {
        let a = full_match(&compiled, chars(s)).map_err(|e| e.to_string())?;
        let b = full_match(&hand, chars(s)).map_err(|e| e.to_string())?;
        if a != b {
            disagreements.push(s.clone());
        }
    }
    let summary = format!(
        "grammar-compiled and hand-built recognizers agree on {}/{} strings",
        strings.len() - disagreements.len(),
        strings.len()
    );
    if disagreements.is_empty() {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; e.g. {:?}",
            &disagreements[..disagreements.len().min(5)]
        ))
    }
}

fn criterion_3() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut failures, mut violations) = (0usize, Vec::new());
    for _ in 0..C3_PARSERS {
        let (p, desc) = random_parser(&mut rng, C3_MAX_DEPTH);
        for _ in 0..C3_STREAMS_PER_PARSER {
            let text = random_text(&mut rng, C3_MAX_STREAM_LEN);
            let input = TokenStream::from_chars(&text);
            match p.parse(&input) {
                Ok(ParseOutcome::Failure { rest, .. }) => {
                    failures += 1;
                    if rest != input {
                        violations.push(format!("{desc} on {text:?} left rest at {}", rest.position()));
                    }
                }
                Ok(ParseOutcome::Success { .. }) => {}
                Err(e) => violations.push(format!("{desc} on {text:?}: {e}")),
            }
        }
    }
    let summary = format!(
        "{} runs, {failures} failures, {} violations",
        C3_PARSERS * C3_STREAMS_PER_PARSER,
        violations.len()
    );
    if failures == 0 {
        Err(format!("{summary}; generator produced no failures to check"))
    } else if violations.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; e.g. {}", violations[0]))
    }
}

#[derive(Debug, PartialEq)]
enum Observed {
    Matched(Vec<Form>, usize),
    Failed(usize),
    Error,
}

fn observe(p: &Parser, input: &TokenStream) -> Observed {
    match p.parse(input) {
        Ok(ParseOutcome::Success { values, rest }) => Observed::Matched(values, rest.position()),
        Ok(ParseOutcome::Failure { rest, .. }) => Observed::Failed(rest.position()),
        Err(_) => Observed::Error,
    }
}

fn algebra_pool() -> Vec<(Parser, String)> {
    let wrap = |p: Parser, name: &str| map_action(p, name, |v| Ok(vec![Form::list(v.to_vec())]));
    vec![
        (char_eq('a'), "'a'".into()),
        (char_in(['a', 'b']), "[ab]".into()),
        (any_token(), "any".into()),
        (many1(char_eq('b')), "'b'*".into()),
        (seq([char_eq('a'), char_eq('c')]), "'a' 'c'".into()),
        (
            choice([char_eq('c'), seq([char_eq('a'), char_eq('b')])]),
            "'c' / 'a' 'b'".into(),
        ),
        (optional(char_eq('a')), "'a'?".into()),
        (epsilon(), "epsilon".into()),
        (wrap(seq([any_token(), any_token()]), "pair"), "<any any>".into()),
        (wrap(many1(char_in(['a', 'c'])), "run"), "<[ac]*>".into()),
    ]
}

fn criterion_4() -> Verdict {
    let pool = algebra_pool();
    let streams: Vec<TokenStream> = all_strings(&C4_ALPHABET, C4_MAX_LEN)
        .iter()
        .map(|s| TokenStream::from_chars(s))
        .collect();
    let mut checks = 0usize;
    let mut violations: Vec<String> = Vec::new();
    let mut check = |law: &str, left: Observed, right: Observed, what: String| {
        checks += 1;
        if left != right && violations.len() < 5 {
            violations.push(format!("{law}: {what}: {left:?} vs {right:?}"));
        }
    };
    for (p, pn) in &pool {
        for s in &streams {
            let base = observe(p, s);
            check(
                "epsilon identity (left)",
                observe(&seq([epsilon(), p.clone()]), s),
                observe(p, s),
                pn.clone(),
            );
            check(
                "epsilon identity (right)",
                observe(&seq([p.clone(), epsilon()]), s),
                base,
                pn.clone(),
            );
            check(
                "many1 = seq(p, many0 p)",
                observe(&many1(p.clone()), s),
                observe(&seq([p.clone(), many0(p.clone())]), s),
                pn.clone(),
            );
        }
        for (q, qn) in &pool {
            for s in &streams {
                let expected = match observe(p, s) {
                    Observed::Failed(_) => observe(q, s),
                    other => other,
                };
                check(
                    "choice left bias",
                    observe(&choice([p.clone(), q.clone()]), s),
                    expected,
                    format!("{pn} / {qn}"),
                );
            }
            for (r, rn) in &pool {
                let left = seq([seq([p.clone(), q.clone()]), r.clone()]);
                let right = seq([p.clone(), seq([q.clone(), r.clone()])]);
                for s in &streams {
                    check(
                        "seq associativity",
                        observe(&left, s),
                        observe(&right, s),
                        format!("{pn}, {qn}, {rn}"),
                    );
                }
            }
        }
    }
    let summary = format!("{checks} law instances over {} streams", streams.len());
    if violations.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", violations.join(" | ")))
    }
}

fn criterion_5() -> Verdict {
    let example = calc("5 + ((10 / 2)-(1 / 5))").map_err(|e| e.to_string())?;
    if example != Number::new(49, 5).unwrap() || example.to_decimal(12) != "9.8" {
        return Err(format!("example evaluated to {example}"));
    }
    let right_assoc = calc("2 - 3 - 4").map_err(|e| e.to_string())?;
    if right_assoc != Number::integer(3) {
        return Err(format!("2 - 3 - 4 evaluated to {right_assoc}"));
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut divisions_by_zero = 0;
    for _ in 0..C5_RANDOM_TREES {
        let tree = random_infix(&mut rng, C5_TREE_DEPTH);
        let text = tree.to_string();
        let parsed = parse_calc_text(&text).map_err(|e| format!("{text}: {e}"))?;
        if parsed != tree {
            return Err(format!("{text} re-parsed as {parsed}"));
        }
        match (eval_infix(&parsed), infix_oracle(&tree)) {
            (Ok(v), Some(want)) if v.to_string() == want.render() => {}
            (Err(CalcError::DivisionByZero { .. }), None) => divisions_by_zero += 1,
            (got, want) => return Err(format!("{text}: got {got:?}, oracle {want:?}")),
        }
    }
    Ok(format!(
        "example = 49/5 (9.8), 2 - 3 - 4 = 3, {C5_RANDOM_TREES} random trees exact ({divisions_by_zero} divide by zero on both sides)"
    ))
}

fn criterion_6() -> Verdict {
    let listing = factorial_listing();
    let start = Instant::now();
    let mut results = Vec::new();
    for n in 0..=10u32 {
        let v = run_program(&listing, &format!("fac({n})")).map_err(|e| format!("fac({n}): {e}"))?;
        if v.to_string() != factorial(n).to_string() {
            return Err(format!("fac({n}) = {v}, expected {}", factorial(n)));
        }
        results.push(v.to_string());
    }
    let elapsed = start.elapsed();
    let summary = format!("fac(0..10) = {} in {elapsed:.2?}", results.join(", "));
    if elapsed < C6_TIME_LIMIT {
        Ok(summary)
    } else {
        Err(format!("{summary}; limit {C6_TIME_LIMIT:?}"))
    }
}

fn criterion_7() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut divergences = Vec::new();
    let mut runs = 0;
    for _ in 0..C7_PROGRAMS {
        // programs whose constant parts divide by zero cannot be folded at all
        let body = loop {
            let b = random_arith(&mut rng, C7_BODY_DEPTH);
            if !has_constant_zero_division(&b) {
                break b;
            }
        };
        let src = format!("function g(a, b) begin {} end", arith_source(&body));
        for _ in 0..C7_TUPLES_PER_PROGRAM {
            let (a, b) = (rng.gen_range(0..=20), rng.gen_range(0..=20));
            let call = format!("g({a}, {b})");
            let plain = run_program(&src, &call).map_err(|e| e.to_string());
            let folded = run_program_with(
                &src,
                &call,
                RunOptions {
                    fold: true,
                    ..RunOptions::default()
                },
            )
            .map_err(|e| e.to_string());
            runs += 1;
            let plain_text = plain.as_ref().map(|v| v.to_string());
            let folded_text = folded.as_ref().map(|v| v.to_string());
            let both_fail = plain.is_err() && folded.is_err();
            if !both_fail && plain_text != folded_text {
                divergences.push(format!("{src} {call}: {plain_text:?} vs {folded_text:?}"));
            }
        }
    }
    let summary = format!("{runs} folded/unfolded runs, {} divergences", divergences.len());
    if divergences.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; e.g. {}", divergences[0]))
    }
}

fn criterion_8() -> Verdict {
    let cases = load_cli_cases();
    let codes: BTreeSet<i32> = cases.iter().map(|c| c.exit).collect();
    let subcommands: BTreeSet<&str> = ["run", "calc", "parse", "grammar-check"]
        .into_iter()
        .filter(|sub| cases.iter().any(|c| c.args.iter().any(|a| a == sub)))
        .collect();
    if cases.len() < C8_MIN_FIXTURES || codes != BTreeSet::from([0, 1, 2, 3]) || subcommands.len() != 4 {
        return Err(format!(
            "corpus too narrow: {} fixtures, exit codes {codes:?}, subcommands {subcommands:?}",
            cases.len()
        ));
    }
    let failures: Vec<String> = cases
        .iter()
        .filter_map(|c| check_cli_case(c).err().map(|e| format!("{}: {e}", c.name)))
        .collect();
    let summary = format!("{}/{} fixtures pass", cases.len() - failures.len(), cases.len());
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join(" | ")))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("float recognizer vs oracle", criterion_1),
        ("two formulations agree", criterion_2),
        ("failure restores input", criterion_3),
        ("combinator algebra", criterion_4),
        ("calc oracle", criterion_5),
        ("pasqualish factorial", criterion_6),
        ("fold soundness", criterion_7),
        ("CLI contract", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
