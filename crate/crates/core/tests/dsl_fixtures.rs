use std::path::Path;

use lumpkit::casestudies::{polymer_model, scaffold_model, PolymerParams, ScaffoldParams};
use lumpkit::dsl::{parse_model, parse_source, print_model};
use lumpkit::markov::classify;
use lumpkit::rules::{explore, Rate};

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/models")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn fixtures_round_trip_through_the_printer() {
    for name in [
        "scaffold_111.lk",
        "scaffold_131.lk",
        "polymer_2.lk",
        "polymer_2_unequal.lk",
        "egf_excerpt.lk",
    ] {
        let model = parse_model(&fixture(name)).unwrap();
        let printed = print_model(&model).unwrap();
        assert_eq!(parse_model(&printed).unwrap(), model, "{name}");
        assert_eq!(print_model(&parse_model(&printed).unwrap()).unwrap(), printed, "{name}");
    }
}

#[test]
fn case_study_fixtures_match_builders() {
    let rates = |r: [u64; 4]| r.map(Rate::from_integer);
    assert_eq!(
        parse_model(&fixture("scaffold_131.lk")).unwrap(),
        scaffold_model(&ScaffoldParams::unit(1, 3, 1))
    );
    assert_eq!(
        parse_model(&fixture("scaffold_111.lk")).unwrap(),
        scaffold_model(&ScaffoldParams::unit(1, 1, 1))
    );
    assert_eq!(
        parse_model(&fixture("polymer_2.lk")).unwrap(),
        polymer_model(&PolymerParams::unit(2))
    );
    assert_eq!(
        parse_model(&fixture("polymer_2_unequal.lk")).unwrap(),
        polymer_model(&PolymerParams {
            n: 2,
            rates: rates([1, 1, 2, 1])
        })
    );
}

#[test]
fn egf_excerpt_explores_to_an_irreducible_chain() {
    let src = parse_source(&fixture("egf_excerpt.lk")).unwrap();
    assert_eq!(src.nodes.len(), 5);
    assert_eq!(src.rules.len(), 8);
    let model = src.to_model().unwrap();
    // Decimal and fractional spellings of the same rate parse to the same value.
    let grb2 = model.rules()[2].rate().clone();
    assert_eq!(grb2, model.rules()[0].rate().clone());
    assert_eq!(grb2, "0.003".parse::<Rate>().unwrap());
    let chain = explore(&model, 10_000).unwrap();
    // With one copy of each agent the four bonds form and break
    // independently.
    assert_eq!(chain.len(), 16);
    assert!(classify(&chain.rates).irreducible);
}
