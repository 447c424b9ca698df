use mfc_core::langgen::MeaningVector;
use mfc_core::metrics::{
    euclidean_distance, hamming, levenshtein, levenshtein_normalized, pairwise_matrix,
    parse_bracketed, ted, ted_normalized, ParseTree,
};
use proptest::prelude::*;

fn arb_tree() -> impl Strategy<Value = ParseTree> {
    let leaf = "[abc]".prop_map(ParseTree::leaf);
    leaf.prop_recursive(3, 10, 3, |inner| {
        ("[abc]", prop::collection::vec(inner, 0..3)).prop_map(|(l, c)| ParseTree::node(l, c))
    })
}

fn arb_meaning() -> impl Strategy<Value = MeaningVector> {
    prop::collection::vec(0u8..2, 5).prop_map(|b| MeaningVector::new(b).unwrap())
}

fn arb_tokens() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..10)
}

fn arb_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 3)
}

fn check_axioms(d: impl Fn(usize, usize) -> f64, tol: f64) -> Result<(), TestCaseError> {
    for i in 0..3 {
        prop_assert!(d(i, i).abs() <= tol);
        for j in 0..3 {
            prop_assert!((d(i, j) - d(j, i)).abs() <= tol);
            for k in 0..3 {
                prop_assert!(d(i, k) <= d(i, j) + d(j, k) + tol);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hamming_is_a_metric(xs in prop::array::uniform3(arb_meaning())) {
        check_axioms(|i, j| hamming(&xs[i], &xs[j]).unwrap() as f64, 0.0)?;
    }

    #[test]
    fn levenshtein_is_a_metric(xs in prop::array::uniform3(arb_tokens())) {
        check_axioms(|i, j| levenshtein(&xs[i], &xs[j]) as f64, 0.0)?;
    }

    #[test]
    fn euclidean_is_a_metric(xs in prop::array::uniform3(arb_point())) {
        check_axioms(|i, j| euclidean_distance(&xs[i], &xs[j]).unwrap(), 1e-9)?;
    }

    #[test]
    fn ted_is_a_metric(xs in prop::array::uniform3(arb_tree())) {
        check_axioms(|i, j| ted(&xs[i], &xs[j]) as f64, 0.0)?;
    }

    #[test]
    fn normalized_distances_are_bounded(a in arb_tokens(), b in arb_tokens(), s in arb_tree(), t in arb_tree()) {
        prop_assert!((0.0..=1.0).contains(&levenshtein_normalized(&a, &b)));
        prop_assert!((0.0..=1.0).contains(&ted_normalized(&s, &t)));
    }

    #[test]
    fn bracketed_round_trip(tree in arb_tree()) {
        prop_assert_eq!(parse_bracketed(&tree.to_string()).unwrap(), tree);
    }

    #[test]
    fn pairwise_matrix_follows_item_permutation(
        (items, perm) in prop::collection::vec(arb_tokens(), 3..9)
            .prop_flat_map(|items| {
                let n = items.len();
                (Just(items), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
    ) {
        let metric = |a: &Vec<u8>, b: &Vec<u8>| Ok(levenshtein(a, b) as f64);
        let dm = pairwise_matrix(&items, metric).unwrap();
        let shuffled: Vec<Vec<u8>> = perm.iter().map(|&k| items[k].clone()).collect();
        prop_assert_eq!(pairwise_matrix(&shuffled, metric).unwrap(), dm.permuted(&perm));

        let constant = pairwise_matrix(&items, |_, _| Ok(2.5)).unwrap();
        prop_assert!(constant.values().iter().all(|&v| v == 2.5));
    }
}
