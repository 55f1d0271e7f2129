mod common;

use dsltower::calc::{calc, eval_infix, parse_calc_text, parse_infix, CalcError, InfixExpr, InfixOp};
use dsltower::form::Form;
use dsltower::number::Number;
use rand::{rngs::StdRng, SeedableRng};

use common::{infix_oracle, random_infix};

#[test]
fn expression_from_the_example() {
    let v = calc("5 + ((10 / 2)-(1 / 5))").unwrap();
    assert_eq!(v, Number::new(49, 5).unwrap());
    assert_eq!(v.to_decimal(12), "9.8");
}

#[test]
fn operators_associate_to_the_right_without_precedence() {
    // 2 - (3 - 4)
    assert_eq!(calc("2 - 3 - 4").unwrap(), Number::integer(3));
    // 2 * (3 + 4)
    assert_eq!(calc("2 * 3 + 4").unwrap(), Number::integer(14));
    assert_eq!(calc("(2 * 3) + 4").unwrap(), Number::integer(10));
}

#[test]
fn adjacent_and_spaced_tokens_lex_alike() {
    assert_eq!(parse_calc_text("(1/5)").unwrap(), parse_calc_text("( 1 / 5 )").unwrap());
    assert_eq!(calc("-3*-2").unwrap(), Number::integer(6));
}

#[test]
fn random_trees_round_trip_and_match_the_oracle() {
    let mut rng = StdRng::seed_from_u64(0xca1c);
    for _ in 0..500 {
        let tree = random_infix(&mut rng, 4);
        let text = tree.to_string();
        let parsed = parse_calc_text(&text).unwrap();
        assert_eq!(parsed, tree, "{text}");
        assert_eq!(parse_infix(&tree.to_tokens()).unwrap(), tree);
        match (eval_infix(&parsed), infix_oracle(&tree)) {
            (Ok(v), Some(expected)) => assert_eq!(v.to_string(), expected.render(), "{text}"),
            (Err(CalcError::DivisionByZero { .. }), None) => {}
            (got, want) => panic!("{text}: {got:?} vs {want:?}"),
        }
    }
}

#[test]
fn token_level_parse_of_nested_lists() {
    let tokens = vec![
        Form::num(1),
        Form::sym("+"),
        Form::list([Form::num(2), Form::sym("*"), Form::num(3)]),
    ];
    assert_eq!(
        parse_infix(&tokens).unwrap(),
        InfixExpr::bin(
            InfixOp::Add,
            InfixExpr::leaf(1),
            InfixExpr::bin(InfixOp::Mul, InfixExpr::leaf(2), InfixExpr::leaf(3))
        )
    );
}

#[test]
fn errors() {
    assert!(matches!(calc("1 / (3 - 3)"), Err(CalcError::DivisionByZero { .. })));
    assert!(matches!(calc("1 +"), Err(CalcError::Syntax { .. })));
    assert!(matches!(calc(""), Err(CalcError::Syntax { .. })));
    assert!(matches!(calc("(1 + 2"), Err(CalcError::Lex { .. })));
    assert!(matches!(calc("1 % 2"), Err(CalcError::Lex { .. })));
    assert!(matches!(calc("1 2"), Err(CalcError::Syntax { .. })));
}
