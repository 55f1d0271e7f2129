use dsltower::form::{read, read_all, render, Atom, Form, Symbol};
use dsltower::number::Number;
use proptest::prelude::*;

fn symbol() -> impl Strategy<Value = Form> {
    "[a-z0-9+*/<>=!?_.-]{1,6}"
        .prop_filter_map("valid symbol", |s| Symbol::new(&s).ok())
        .prop_map(|s| Form::Atom(Atom::Symbol(s)))
}

fn atom() -> impl Strategy<Value = Form> {
    prop_oneof![
        any::<char>().prop_map(Form::char),
        symbol(),
        (any::<i64>(), 1..1000i64).prop_map(|(n, d)| Form::num(Number::new(n, d).unwrap())),
        any::<String>().prop_map(Form::text),
        any::<bool>().prop_map(Form::boolean),
    ]
}

/// Forms nested at most six lists deep.
fn form() -> impl Strategy<Value = Form> {
    atom().prop_recursive(6, 64, 5, |inner| {
        prop::collection::vec(inner, 0..5).prop_map(Form::list)
    })
}

fn depth(f: &Form) -> usize {
    match f.as_list() {
        Some(items) => 1 + items.iter().map(depth).max().unwrap_or(0),
        None => 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn read_inverts_render(f in form()) {
        prop_assert!(depth(&f) <= 6);
        let text = render(&f);
        prop_assert_eq!(read(&text).unwrap(), f);
    }

    #[test]
    fn render_is_stable(f in form()) {
        let once = render(&f);
        prop_assert_eq!(render(&read(&once).unwrap()), once);
    }

    #[test]
    fn sequences_of_forms_round_trip(forms in prop::collection::vec(form(), 0..4)) {
        let text = forms.iter().map(render).collect::<Vec<_>>().join(" ");
        prop_assert_eq!(read_all(&text).unwrap(), forms);
    }
}

#[test]
fn numbers_render_canonically() {
    assert_eq!(render(&Form::num(Number::new(10, 4).unwrap())), "5/2");
    assert_eq!(render(&Form::num(Number::new(-6, 3).unwrap())), "-2");
    assert_eq!(read("4/6").unwrap(), Form::num(Number::new(2, 3).unwrap()));
}

#[test]
fn reader_reports_positions() {
    let err = read("(a\n  (b c)").unwrap_err();
    assert_eq!(err.line, 1);
    assert!(read("").is_err());
    assert!(read(")").is_err());
    assert!(read("a b").is_err());
}

#[test]
fn number_like_symbols_round_trip() {
    for name in ["-", "+", "1/0", "1.5", "...", "1/", "/2", "-x", "+1a", "1/-2", "0x10"] {
        if let Ok(s) = Symbol::new(name) {
            let f = Form::Atom(Atom::Symbol(s));
            assert_eq!(read(&render(&f)).unwrap(), f, "{name}");
        }
    }
}
