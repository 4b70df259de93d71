use nsakit::lang::schema::schema;
use nsakit::lang::{parse, parse_term, parse_type, print, print_term, schema_names};
use nsakit::model::random_formula;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>(), size in 0usize..6) {
        let f = random_formula(seed, size);
        let src = print(&f);
        let back = parse(&src).unwrap_or_else(|e| panic!("{e}: {src}"));
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(print(&back), src);
    }

    #[test]
    fn printed_terms_parse_back(seed in any::<u64>()) {
        let f = random_formula(seed, 4);
        for t in f.node_terms() {
            let src = print_term(t);
            prop_assert!(parse_term(&src).unwrap().alpha_eq(t), "{}", src);
        }
    }
}

#[test]
fn every_schema_template_round_trips() {
    for name in schema_names() {
        let f = schema(name).unwrap().template_formula().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse(&print(&f)).unwrap(), f, "{name}");
    }
}

#[test]
fn types_print_compactly() {
    for (src, shown) in [("0", "0"), ("0->0", "1"), ("(0->0)->0", "2"), ("0*", "0*"), ("0->0*", "0->0*")] {
        assert_eq!(parse_type(src).unwrap().to_string(), shown, "{src}");
    }
}

#[test]
fn errors_carry_positions() {
    let e = parse("(forall x:0)\n  le(x, ").unwrap_err().to_string();
    assert!(e.contains("2:"), "{e}");
    assert!(parse("(forall x:0)le(x, <1>)").is_err());
}
