//! Oracles and generators shared by the integration tests and the
//! acceptance suite. Everything here is written independently of the
//! library code it checks.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use dsltower::calc::{InfixExpr, InfixOp};
use dsltower::combinator::{char_eq, char_in, choice, digit, many1, seq, Parser};
use rand::Rng;

/// Alphabet of the exhaustive float-recognizer check.
pub const FLOAT_ALPHABET: [char; 6] = ['0', '1', '.', '+', '-', 'x'];
pub const FLOAT_MAX_LEN: usize = 5;
/// 6^0 + 6^1 + ... + 6^5.
pub const FLOAT_STRING_COUNT: usize = 9331;

/// Every string over `alphabet` with length at most `max_len`, shortest first.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |c| {
                    let mut s = prefix.clone();
                    s.push(*c);
                    s
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Reference recognizer for signed decimals.
pub fn float_oracle() -> regex::Regex {
    regex::Regex::new(r"^[+-]?[0-9]+(\.[0-9]+)?$").expect("valid regex")
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join(name)).expect("fixture exists")
}

/// The factorial listing exactly as printed, minus the quoting around it.
pub fn factorial_listing() -> String {
    fixture_text("fac.pasq")
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

// ---------------------------------------------------------------------------
// exact fractions on i128, as an oracle for the rational arithmetic

pub fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac(pub i128, pub i128);

impl Frac {
    pub fn new(n: i128, d: i128) -> Option<Frac> {
        if d == 0 {
            return None;
        }
        let g = gcd(n, d).max(1);
        let sign = if d < 0 { -1 } else { 1 };
        Some(Frac(sign * n / g, sign * d / g))
    }

    pub fn int(n: i128) -> Frac {
        Frac(n, 1)
    }

    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1).unwrap()
    }

    pub fn sub(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 - o.0 * self.1, self.1 * o.1).unwrap()
    }

    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.0, self.1 * o.1).unwrap()
    }

    pub fn div(self, o: Frac) -> Option<Frac> {
        Frac::new(self.0 * o.1, self.1 * o.0)
    }

    /// Same canonical text as the library's numbers: `n` or `n/d`.
    pub fn render(self) -> String {
        if self.1 == 1 {
            self.0.to_string()
        } else {
            format!("{}/{}", self.0, self.1)
        }
    }
}

// ---------------------------------------------------------------------------
// calculator trees

pub fn random_infix<R: Rng>(rng: &mut R, depth: u32) -> InfixExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return InfixExpr::leaf(rng.gen_range(-9i64..=9));
    }
    let op = InfixOp::ALL[rng.gen_range(0..4)];
    InfixExpr::bin(op, random_infix(rng, depth - 1), random_infix(rng, depth - 1))
}

/// Independent evaluation; `None` on division by zero.
pub fn infix_oracle(e: &InfixExpr) -> Option<Frac> {
    match e {
        InfixExpr::Leaf(n) => Some(Frac::int(n.to_i64().expect("integer leaf") as i128)),
        InfixExpr::BinOp(op, l, r) => {
            let (a, b) = (infix_oracle(l)?, infix_oracle(r)?);
            match op {
                InfixOp::Add => Some(a.add(b)),
                InfixOp::Sub => Some(a.sub(b)),
                InfixOp::Mul => Some(a.mul(b)),
                InfixOp::Div => a.div(b),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// random parsers over characters

pub const FUZZ_ALPHABET: [char; 6] = ['0', '7', 'a', 'b', '.', '-'];

pub fn random_primitive<R: Rng>(rng: &mut R) -> (Parser, String) {
    match rng.gen_range(0..4) {
        0 => (digit(), "digit".into()),
        1 => {
            let c = FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())];
            (char_eq(c), format!("'{c}'"))
        }
        2 => (char_in(['a', 'b']), "[ab]".into()),
        _ => (char_in(['.', '-', '0']), "[.-0]".into()),
    }
}

/// A parser of nesting depth at most `depth`, with a description.
pub fn random_parser<R: Rng>(rng: &mut R, depth: u32) -> (Parser, String) {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_primitive(rng);
    }
    match rng.gen_range(0..3) {
        0 => {
            let parts: Vec<_> = (0..rng.gen_range(1..=3))
                .map(|_| random_parser(rng, depth - 1))
                .collect();
            let desc = parts.iter().map(|p| p.1.as_str()).collect::<Vec<_>>().join(" ");
            (seq(parts.into_iter().map(|p| p.0)), format!("({desc})"))
        }
        1 => {
            let parts: Vec<_> = (0..rng.gen_range(1..=3))
                .map(|_| random_parser(rng, depth - 1))
                .collect();
            let desc = parts.iter().map(|p| p.1.as_str()).collect::<Vec<_>>().join(" / ");
            (choice(parts.into_iter().map(|p| p.0)), format!("({desc})"))
        }
        _ => {
            let (p, desc) = random_parser(rng, depth - 1);
            (many1(p), format!("{desc}*"))
        }
    }
}

pub fn random_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    (0..rng.gen_range(0..=max_len))
        .map(|_| FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())])
        .collect()
}

// ---------------------------------------------------------------------------
// random straight-line Pasqualish functions over two parameters

#[derive(Debug, Clone)]
pub enum Arith {
    Lit(i64),
    A,
    B,
    Op(char, Box<Arith>, Box<Arith>),
}

pub fn random_arith<R: Rng>(rng: &mut R, depth: u32) -> Arith {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Arith::A,
            1 => Arith::B,
            _ => Arith::Lit(rng.gen_range(0..=12)),
        };
    }
    let op = ['+', '-', '*', '/'][rng.gen_range(0..4)];
    Arith::Op(
        op,
        Box::new(random_arith(rng, depth - 1)),
        Box::new(random_arith(rng, depth - 1)),
    )
}

/// Source text; parenthesizes every operation, so no precedence is involved.
pub fn arith_source(e: &Arith) -> String {
    match e {
        Arith::Lit(n) => n.to_string(),
        Arith::A => "a".into(),
        Arith::B => "b".into(),
        Arith::Op(op, l, r) => format!("({} {op} {})", arith_source(l), arith_source(r)),
    }
}

/// Value under the oracle, or `None` when some division has a zero divisor.
pub fn arith_oracle(e: &Arith, a: Frac, b: Frac) -> Option<Frac> {
    match e {
        Arith::Lit(n) => Some(Frac::int(*n as i128)),
        Arith::A => Some(a),
        Arith::B => Some(b),
        Arith::Op(op, l, r) => {
            let (x, y) = (arith_oracle(l, a, b)?, arith_oracle(r, a, b)?);
            match op {
                '+' => Some(x.add(y)),
                '-' => Some(x.sub(y)),
                '*' => Some(x.mul(y)),
                _ => x.div(y),
            }
        }
    }
}

pub fn is_constant(e: &Arith) -> bool {
    match e {
        Arith::Lit(_) => true,
        Arith::A | Arith::B => false,
        Arith::Op(_, l, r) => is_constant(l) && is_constant(r),
    }
}

/// Whether some operation over literals only divides by zero.
pub fn has_constant_zero_division(e: &Arith) -> bool {
    match e {
        Arith::Op(..) if is_constant(e) => arith_oracle(e, Frac::int(0), Frac::int(0)).is_none(),
        Arith::Op(_, l, r) => has_constant_zero_division(l) || has_constant_zero_division(r),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// CLI fixture corpus

#[derive(Debug, Default)]
pub struct CliCase {
    pub name: String,
    pub args: Vec<String>,
    pub exit: i32,
    pub stdout: Option<String>,
    pub stderr_contains: Vec<String>,
}

pub fn load_cli_cases() -> Vec<CliCase> {
    let mut cases = Vec::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "case"))
        .collect();
    paths.sort();
    for path in paths {
        let mut case = CliCase {
            name: path.file_stem().unwrap().to_string_lossy().into_owned(),
            exit: -1,
            ..CliCase::default()
        };
        for line in std::fs::read_to_string(&path).unwrap().lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(": ")
                .unwrap_or_else(|| panic!("{}: bad line {line:?}", case.name));
            match key {
                "arg" => case.args.push(value.to_string()),
                "exit" => case.exit = value.parse().expect("exit code"),
                "stdout" => case.stdout = Some(value.to_string()),
                "stderr" => case.stderr_contains.push(value.to_string()),
                _ => panic!("{}: unknown key {key}", case.name),
            }
        }
        assert!(case.exit >= 0, "{}: missing exit code", case.name);
        cases.push(case);
    }
    cases
}

/// Runs the binary for one case and describes every contract violation.
pub fn check_cli_case(case: &CliCase) -> Result<(), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_dsltower"))
        .args(&case.args)
        .current_dir(fixtures_dir())
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    let mut problems = Vec::new();
    let code = output.status.code().unwrap_or(-1);
    if code != case.exit {
        problems.push(format!("exit {code}, expected {}", case.exit));
    }
    if case.exit == 0 {
        let expected = format!("{}\n", case.stdout.as_deref().unwrap_or(""));
        if stdout != expected {
            problems.push(format!("stdout {stdout:?}, expected {expected:?}"));
        }
    } else {
        if !stdout.is_empty() {
            problems.push(format!("stdout should be empty, got {stdout:?}"));
        }
        if stderr.trim().is_empty() {
            problems.push("no diagnostic on stderr".into());
        }
    }
    for needle in &case.stderr_contains {
        if !stderr.contains(needle.as_str()) {
            problems.push(format!("stderr lacks {needle:?}: {stderr:?}"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("; "))
    }
}
