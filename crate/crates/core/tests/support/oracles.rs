//! Slow reference implementations and random input generators, kept
//! independent of the library code they check.

use std::collections::HashMap;

use mfc_core::metrics::ParseTree;
use mfc_core::seed::Rng;
use rand::Rng as _;

/// Full-table edit distance with unit costs.
pub fn naive_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = table[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = sub.min(table[i - 1][j] + 1).min(table[i][j - 1] + 1);
        }
    }
    table[a.len()][b.len()]
}

type Forest = Vec<ParseTree>;

fn forest_key(f: &[ParseTree]) -> String {
    f.iter().map(|t| format!("({} {})", t.label, forest_key(&t.children))).collect()
}

fn forest_size(f: &[ParseTree]) -> usize {
    f.iter().map(|t| 1 + forest_size(&t.children)).sum()
}

/// Forest with its rightmost root removed (children promoted in place).
fn drop_root(f: &[ParseTree]) -> Forest {
    let mut out = f[..f.len() - 1].to_vec();
    out.extend(f[f.len() - 1].children.iter().cloned());
    out
}

/// Ordered forest edit distance by the classic rightmost-root recursion,
/// memoised on the serialised forest pair.
pub fn forest_distance(f: &[ParseTree], g: &[ParseTree], memo: &mut HashMap<(String, String), usize>) -> usize {
    if f.is_empty() {
        return forest_size(g);
    }
    if g.is_empty() {
        return forest_size(f);
    }
    let key = (forest_key(f), forest_key(g));
    if let Some(&d) = memo.get(&key) {
        return d;
    }
    let (v, w) = (&f[f.len() - 1], &g[g.len() - 1]);
    let delete = forest_distance(&drop_root(f), g, memo) + 1;
    let insert = forest_distance(f, &drop_root(g), memo) + 1;
    let matched = forest_distance(&f[..f.len() - 1], &g[..g.len() - 1], memo)
        + forest_distance(&v.children, &w.children, memo)
        + usize::from(v.label != w.label);
    let d = delete.min(insert).min(matched);
    memo.insert(key, d);
    d
}

pub fn oracle_ted(a: &ParseTree, b: &ParseTree) -> usize {
    forest_distance(std::slice::from_ref(a), std::slice::from_ref(b), &mut HashMap::new())
}

/// Random ordered tree with 1 to `max_size` nodes over a small label set.
pub fn random_tree(rng: &mut Rng, max_size: usize, labels: &[&str]) -> ParseTree {
    let size = rng.random_range(1..=max_size);
    tree_of_size(rng, size, labels)
}

fn tree_of_size(rng: &mut Rng, size: usize, labels: &[&str]) -> ParseTree {
    assert!(size >= 1);
    let label = labels[rng.random_range(0..labels.len())];
    let mut remaining = size - 1;
    let mut children = Vec::new();
    while remaining > 0 {
        let take = rng.random_range(1..=remaining);
        children.push(tree_of_size(rng, take, labels));
        remaining -= take;
    }
    ParseTree::node(label, children)
}

pub fn random_tokens(rng: &mut Rng, max_len: usize, alphabet: u8) -> Vec<u8> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_range(0..alphabet)).collect()
}
