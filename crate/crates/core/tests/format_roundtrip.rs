use tacheck::model::generators::{gen_model, gen_property, Family, Params};
use tacheck::model::{parse_model, print_model};
use tacheck::Error;

#[test]
fn generated_models_survive_printing() {
    for family in Family::ALL {
        for n in 1..=3 {
            for (fixed, nonzeno) in [(false, false), (true, true)] {
                let p = Params { fixed, nonzeno, ..Params::default() };
                for net in [gen_model(family, n, &p), gen_property(family, n, &p), gen_model(family, n, &p).scaled(13)] {
                    let text = print_model(&net);
                    let back = parse_model(&text).unwrap_or_else(|e| panic!("{family} {n}: {e}\n{text}"));
                    assert_eq!(back, net, "{family} {n}");
                    assert_eq!(print_model(&back), text);
                }
            }
        }
    }
}

#[test]
fn errors_carry_positions() {
    let text = "clocks: x\nautomaton A:\n  state q\n  trans q -> q guard x <= \n";
    match parse_model(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let text = "clocks: x\nautomaton A:\n  state q\n  trans q -> r\n";
    assert!(parse_model(text).is_err());
}

#[test]
fn products_of_printed_models_match() {
    let p = Params::corrected();
    let (net, prop) = (gen_model(Family::Csma, 2, &p), gen_property(Family::Csma, 2, &p));
    let direct = tacheck::model::product(&net, &prop).unwrap();
    let reparsed = tacheck::model::product(
        &parse_model(&print_model(&net)).unwrap(),
        &parse_model(&print_model(&prop)).unwrap(),
    )
    .unwrap();
    assert_eq!(direct.num_states(), reparsed.num_states());
    assert_eq!(direct.transitions, reparsed.transitions);
}
