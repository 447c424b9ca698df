use std::collections::HashSet;

use mfc_core::langgen::{build_lexicon, generate_language, GroundedOrder, LanguageSpec};
use mfc_core::seed::rng_from_seed;
use proptest::prelude::*;

fn arb_order() -> impl Strategy<Value = GroundedOrder> {
    prop_oneof![
        Just(GroundedOrder::Fixed),
        Just(GroundedOrder::PerMeaning),
        Just(GroundedOrder::PerMessage)
    ]
}

fn arb_spec() -> impl Strategy<Value = LanguageSpec> {
    (1usize..=5, 1usize..=3, 0usize..=3, 1usize..=3, arb_order(), any::<u64>())
        .prop_map(|(h, s, u, p, order, seed)| LanguageSpec::new(h, s, u, p).with_order(order).with_seed(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generation_is_deterministic(spec in arb_spec()) {
        prop_assert_eq!(generate_language(&spec).unwrap(), generate_language(&spec).unwrap());
    }

    #[test]
    fn message_length_law(spec in arb_spec()) {
        let lang = generate_language(&spec).unwrap();
        let expected = spec.concepts - spec.holistic + 1 + spec.ungrounded;
        prop_assert!(lang.messages().all(|m| m.len() == expected));
    }

    #[test]
    fn messages_decode_to_their_meaning(spec in arb_spec()) {
        let lexicon = build_lexicon(&spec, &mut rng_from_seed(spec.seed)).unwrap();
        let lang = generate_language(&spec).unwrap();
        for (meaning, message) in &lang.pairs {
            prop_assert_eq!(lexicon.decode(message), Some(meaning.clone()));
        }
    }

    #[test]
    fn pair_count_bounds(spec in arb_spec()) {
        let lang = generate_language(&spec).unwrap();
        prop_assert!((32..=32 * spec.paraphrases).contains(&lang.len()));
        let meanings: HashSet<_> = lang.meanings().collect();
        prop_assert_eq!(meanings.len(), 32);
        let distinct: HashSet<_> = lang.pairs.iter().collect();
        prop_assert_eq!(distinct.len(), lang.len());
    }

    #[test]
    fn no_synonyms_no_paraphrases(h in 1usize..=5, p in 1usize..=3, seed in any::<u64>(), order in prop_oneof![Just(GroundedOrder::Fixed), Just(GroundedOrder::PerMeaning)]) {
        let spec = LanguageSpec::new(h, 1, 0, p).with_order(order).with_seed(seed);
        prop_assert_eq!(generate_language(&spec).unwrap().len(), 32);
    }
}
