//! Exhaustive generation of small connected graphs up to isomorphism.
//!
//! Every connected graph on `n` vertices has a non-cut vertex, so it arises
//! from a connected graph on `n - 1` vertices by adding one vertex with a
//! nonempty neighborhood. Level `n` is built from level `n - 1` that way and
//! deduplicated by canonical form.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::graph::Graph;
use crate::iso::canonical_form;

/// All connected graphs with `1..=max_n` vertices, one per isomorphism class,
/// in canonical labeling, ordered by vertex count and then graph6 string.
pub fn connected_graphs(max_n: usize) -> Vec<Graph> {
    connected_graphs_where(max_n, |_| true)
}

/// Like [`connected_graphs`] but keeps only graphs accepted by `keep`.
///
/// `keep` must be closed under deleting a non-cut vertex (for instance any
/// hereditary sparsity condition), otherwise members whose every connected
/// predecessor is rejected will be missed.
pub fn connected_graphs_where<F>(max_n: usize, keep: F) -> Vec<Graph>
where
    F: Fn(&Graph) -> bool + Sync,
{
    let mut all = Vec::new();
    if max_n == 0 {
        return all;
    }
    let k1 = Graph::empty(1).expect("one vertex");
    if !keep(&k1) {
        return all;
    }
    let mut level = vec![k1];
    for n in 2..=max_n {
        let children: HashSet<Graph> = level
            .par_iter()
            .flat_map_iter(|parent| {
                let keep = &keep;
                (1u64..(1 << (n - 1))).filter_map(move |mask| {
                    let new = n - 1;
                    let extra = (0..new).filter(|&v| mask >> v & 1 == 1).map(move |v| (v, new));
                    let child = Graph::new(n, parent.edges().iter().copied().chain(extra)).ok()?;
                    keep(&child).then(|| canonical_form(&child).0)
                })
            })
            .collect();
        let mut next: Vec<Graph> = children.into_iter().collect();
        next.sort_by_cached_key(|g| g.to_graph6());
        all.append(&mut level);
        level = next;
    }
    all.append(&mut level);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        // Connected graphs on n unlabeled vertices: 1, 1, 2, 6, 21, 112.
        let graphs = connected_graphs(6);
        let mut counts = [0usize; 7];
        for g in &graphs {
            counts[g.vertex_count()] += 1;
        }
        assert_eq!(&counts[1..], &[1, 1, 2, 6, 21, 112]);
        assert!(graphs.iter().all(Graph::is_connected));
    }

    #[test]
    fn filtered_enumeration_of_trees() {
        // Trees are closed under deleting a leaf; counts 1, 1, 1, 2, 3, 6, 11.
        let trees = connected_graphs_where(7, |g| g.edge_count() + 1 == g.vertex_count());
        let mut counts = [0usize; 8];
        for g in &trees {
            counts[g.vertex_count()] += 1;
        }
        assert_eq!(&counts[1..], &[1, 1, 1, 2, 3, 6, 11]);
    }
}
