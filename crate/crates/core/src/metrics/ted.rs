//! Unit-cost ordered tree edit distance.
//!
//! The distance is computed with the keyroot dynamic program over postorder
//! numberings. Before running it, the cheaper of the two path decompositions
//! (leftmost paths on the trees as given, or rightmost paths via mirroring
//! both trees) is selected by counting the subproblems each would solve, in
//! the spirit of path-strategy algorithms. Mirroring both trees preserves the
//! distance, so the choice only affects running time.

use std::collections::HashMap;

use super::tree::ParseTree;

/// Postorder view of a tree with interned labels.
struct Postorder {
    labels: Vec<u32>,
    /// Leftmost leaf descendant of each node, as a postorder index.
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl Postorder {
    fn new(tree: &ParseTree, interner: &mut HashMap<String, u32>) -> Self {
        let mut this = Postorder {
            labels: Vec::new(),
            leftmost: Vec::new(),
            keyroots: Vec::new(),
        };
        this.visit(tree, interner);
        // a keyroot is the highest-numbered node for its leftmost leaf
        let mut last_with_leftmost: HashMap<usize, usize> = HashMap::new();
        for (node, &lm) in this.leftmost.iter().enumerate() {
            last_with_leftmost.insert(lm, node);
        }
        this.keyroots = last_with_leftmost.into_values().collect();
        this.keyroots.sort_unstable();
        this
    }

    fn visit(&mut self, tree: &ParseTree, interner: &mut HashMap<String, u32>) -> usize {
        let mut first_leaf = None;
        for child in &tree.children {
            let child_idx = self.visit(child, interner);
            first_leaf.get_or_insert(self.leftmost[child_idx]);
        }
        let next_id = interner.len() as u32;
        let label = *interner.entry(tree.label.clone()).or_insert(next_id);
        let idx = self.labels.len();
        self.labels.push(label);
        self.leftmost.push(first_leaf.unwrap_or(idx));
        idx
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    /// Total size of the keyroot subtrees: the number of rows the forest
    /// tables span for this tree.
    fn keyroot_weight(&self) -> u64 {
        self.keyroots
            .iter()
            .map(|&k| (k - self.leftmost[k] + 1) as u64)
            .sum()
    }
}

fn keyroot_distance(f: &Postorder, g: &Postorder) -> usize {
    let (n, m) = (f.len(), g.len());
    let mut tree_dist = vec![0usize; n * m];
    let mut forest = vec![0usize; (n + 1) * (m + 1)];
    let width = m + 1;

    for &i in &f.keyroots {
        for &j in &g.keyroots {
            let (li, lj) = (f.leftmost[i], g.leftmost[j]);
            let rows = i - li + 2;
            let cols = j - lj + 2;
            forest[0] = 0;
            for x in 1..rows {
                forest[x * width] = x;
            }
            for (y, cell) in forest.iter_mut().enumerate().take(cols).skip(1) {
                *cell = y;
            }
            for x in 1..rows {
                let fx = li + x - 1;
                for y in 1..cols {
                    let gy = lj + y - 1;
                    let delete = forest[(x - 1) * width + y] + 1;
                    let insert = forest[x * width + y - 1] + 1;
                    let best = if f.leftmost[fx] == li && g.leftmost[gy] == lj {
                        let relabel = forest[(x - 1) * width + y - 1]
                            + usize::from(f.labels[fx] != g.labels[gy]);
                        let d = delete.min(insert).min(relabel);
                        tree_dist[fx * m + gy] = d;
                        d
                    } else {
                        let px = f.leftmost[fx] - li;
                        let py = g.leftmost[gy] - lj;
                        let subtree = forest[px * width + py] + tree_dist[fx * m + gy];
                        delete.min(insert).min(subtree)
                    };
                    forest[x * width + y] = best;
                }
            }
        }
    }
    tree_dist[n * m - 1]
}

/// Minimum number of node insertions, deletions and relabelings turning `f`
/// into `g`.
pub fn ted(f: &ParseTree, g: &ParseTree) -> usize {
    let mut interner = HashMap::new();
    let left_f = Postorder::new(f, &mut interner);
    let left_g = Postorder::new(g, &mut interner);
    let left_cost = left_f.keyroot_weight() * left_g.keyroot_weight();

    let (mf, mg) = (f.mirrored(), g.mirrored());
    let right_f = Postorder::new(&mf, &mut interner);
    let right_g = Postorder::new(&mg, &mut interner);
    let right_cost = right_f.keyroot_weight() * right_g.keyroot_weight();

    if right_cost < left_cost {
        keyroot_distance(&right_f, &right_g)
    } else {
        keyroot_distance(&left_f, &left_g)
    }
}

/// `ted(f, g) / (|f| + |g| − min(height(f), height(g)))`, in `[0, 1]`.
pub fn ted_normalized(f: &ParseTree, g: &ParseTree) -> f64 {
    let denom = f.size() + g.size() - f.height().min(g.height());
    ted(f, g) as f64 / denom as f64
}
