use std::collections::BTreeMap;

use lumpkit::casestudies::*;
use lumpkit::markov::{classify, Kernel};
use lumpkit::rules::{explore, is_reversible, ExploredChain, Rate, RuleModel};
use lumpkit::sitegraph::{connected_components, find_embeddings, species_census, Node, NodeRenaming};
use proptest::prelude::*;
use proptest::sample::Index;

fn rate() -> impl Strategy<Value = Rate> {
    (1u64..6, 1u64..4).prop_map(|(p, q)| Rate::from_ratio(p, q).unwrap())
}

fn rates() -> impl Strategy<Value = [Rate; 4]> {
    [rate(), rate(), rate(), rate()]
}

fn scaffold() -> impl Strategy<Value = RuleModel> {
    (1u32..3, 1u32..4, 1u32..3, rates())
        .prop_map(|(n_a, n_b, n_c, rates)| scaffold_model(&ScaffoldParams { n_a, n_b, n_c, rates }))
}

fn polymer() -> impl Strategy<Value = RuleModel> {
    (1u32..3, rates()).prop_map(|(n, rates)| polymer_model(&PolymerParams { n, rates }))
}

fn model() -> impl Strategy<Value = RuleModel> {
    prop_oneof![scaffold(), polymer()]
}

fn picks() -> impl Strategy<Value = Vec<Index>> {
    prop::collection::vec(any::<Index>(), 8)
}

/// Per-type permutation of instance indices (Fisher-Yates driven by `picks`).
fn permutation(chain: &ExploredChain, picks: &[Index]) -> NodeRenaming {
    let mut map = BTreeMap::new();
    let mut next = picks.iter().cycle();
    for (ty, &n) in chain.mixtures[0].counts() {
        let mut idx: Vec<u32> = (1..=n).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, next.next().unwrap().index(i + 1));
        }
        for (j, k) in idx.into_iter().enumerate() {
            map.insert(Node::new(ty.clone(), j as u32 + 1), Node::new(ty.clone(), k));
        }
    }
    NodeRenaming::new(map).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversible_positive_rates_give_irreducible_chains(m in model()) {
        prop_assert!(is_reversible(&m));
        let chain = explore(&m, 10_000).unwrap();
        prop_assert!(classify(&chain.rates).irreducible);
        prop_assert!(chain.rates.row_sum_residual() <= 1e-12);
    }

    #[test]
    fn exit_rate_is_weighted_embedding_count(m in model()) {
        let chain = explore(&m, 10_000).unwrap();
        for (s, mix) in chain.mixtures.iter().enumerate() {
            let exact: Rate = m
                .rules()
                .iter()
                .map(|r| r.rate() * find_embeddings(r.left(), mix).unwrap().len() as u64)
                .sum();
            prop_assert_eq!(chain.rates.exit_rate(s), exact.to_f64());
        }
    }

    #[test]
    fn renaming_preserves_state_space_and_abstractions(m in scaffold(), picks in picks()) {
        let chain = explore(&m, 10_000).unwrap();
        let eta = permutation(&chain, &picks);
        for (s, mix) in chain.mixtures.iter().enumerate() {
            let renamed = mix.renamed(&eta, m.interface()).unwrap();
            let t = chain.space.position(&renamed.key());
            prop_assert!(t.is_some());
            prop_assert_eq!(chain.rates.exit_rate(t.unwrap()), chain.rates.exit_rate(s));
            prop_assert_eq!(species_census(&renamed).unwrap(), species_census(mix).unwrap());
            prop_assert_eq!(scaffold_phi1(&renamed), scaffold_phi1(mix));
            prop_assert_eq!(scaffold_phi2(&renamed), scaffold_phi2(mix));
        }
    }

    #[test]
    fn polymer_abstractions_are_renaming_invariant(m in polymer(), picks in picks()) {
        let chain = explore(&m, 10_000).unwrap();
        let eta = permutation(&chain, &picks);
        for mix in &chain.mixtures {
            let renamed = mix.renamed(&eta, m.interface()).unwrap();
            prop_assert_eq!(polymer_phi1(&renamed).unwrap(), polymer_phi1(mix).unwrap());
            prop_assert_eq!(polymer_phi2(&renamed), polymer_phi2(mix));
            prop_assert_eq!(species_census(&renamed).unwrap(), species_census(mix).unwrap());
        }
    }
}

#[test]
fn ring_of_length_two_is_one_component() {
    let m = polymer_model(&PolymerParams::unit(1));
    let ring = m.mixture_from_key("{A^1.b~B^1.a A^1.r~B^1.l}").unwrap();
    let comps = connected_components(ring.graph());
    assert_eq!(comps.len(), 1);
    assert_eq!((comps[0].node_count(), comps[0].edges().len()), (2, 2));
}
