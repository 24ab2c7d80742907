//! Isomorphism testing and canonical labeling for small graphs.
//!
//! Canonical forms come from an individualization-refinement search: the
//! degree partition is refined to an equitable ordered partition, and every
//! branch that individualizes one vertex of the first non-singleton cell is
//! explored. The lexicographically largest adjacency word over all leaves is
//! the certificate. There is no automorphism pruning, so highly symmetric
//! graphs cost up to `n!` leaves; callers cap `n`.

use crate::graph::{Graph, GraphError};

/// Default vertex cap for [`are_isomorphic`].
pub const DEFAULT_ISO_LIMIT: usize = 10;

type Partition = Vec<Vec<usize>>;

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in g.edges() {
        m[a][b] = true;
        m[b][a] = true;
    }
    m
}

/// Refines an ordered partition until it is equitable. Cells split by the
/// vector of neighbor counts into every current cell, in sorted order, so the
/// result does not depend on vertex labels.
fn refine(adj: &[Vec<bool>], mut cells: Partition) -> Partition {
    let n = adj.len();
    loop {
        let mut cell_of = vec![0; n];
        for (c, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = c;
            }
        }
        let mut next: Partition = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<usize>, usize)> = cell
                .iter()
                .map(|&v| {
                    let mut counts = vec![0; cells.len()];
                    for w in 0..n {
                        if adj[v][w] {
                            counts[cell_of[w]] += 1;
                        }
                    }
                    (counts, v)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn certificate(adj: &[Vec<bool>], order: &[usize]) -> Vec<bool> {
    let n = order.len();
    let mut word = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for i in 0..j {
            word.push(adj[order[i]][order[j]]);
        }
    }
    word
}

struct Search<'a> {
    adj: &'a [Vec<bool>],
    best: Option<(Vec<bool>, Vec<usize>)>,
}

impl Search<'_> {
    fn explore(&mut self, cells: Partition) {
        let cells = refine(self.adj, cells);
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let cert = certificate(self.adj, &order);
            if self.best.as_ref().is_none_or(|(b, _)| cert > *b) {
                self.best = Some((cert, order));
            }
            return;
        };
        for &v in &cells[target] {
            let mut branch = cells.clone();
            let rest: Vec<usize> = branch[target].iter().copied().filter(|&w| w != v).collect();
            branch[target] = vec![v];
            branch.insert(target + 1, rest);
            self.explore(branch);
        }
    }
}

/// Canonical relabeling of `g`: returns the canonical graph and the map
/// `perm[old] = new` taking `g` onto it. Isomorphic graphs have identical
/// canonical graphs.
pub fn canonical_form(g: &Graph) -> (Graph, Vec<usize>) {
    let adj = adjacency_matrix(g);
    let n = g.vertex_count();
    let mut by_degree: Vec<(usize, usize)> = (0..n).map(|v| (g.degree(v), v)).collect();
    by_degree.sort();
    let mut cells: Partition = Vec::new();
    for (d, v) in by_degree {
        match cells.last_mut() {
            Some(cell) if g.degree(cell[0]) == d => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut search = Search { adj: &adj, best: None };
    search.explore(cells);
    let (_, order) = search.best.expect("search visits at least one leaf");
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    (g.relabel(&perm), perm)
}

/// Isomorphism test with the default size cap.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<bool, GraphError> {
    are_isomorphic_with_limit(g1, g2, DEFAULT_ISO_LIMIT)
}

/// Isomorphism test: cheap invariants first, then canonical forms.
pub fn are_isomorphic_with_limit(g1: &Graph, g2: &Graph, limit: usize) -> Result<bool, GraphError> {
    for g in [g1, g2] {
        if g.vertex_count() > limit {
            return Err(GraphError::SizeLimitExceeded { n: g.vertex_count(), limit });
        }
    }
    if g1.vertex_count() != g2.vertex_count()
        || g1.edge_count() != g2.edge_count()
        || g1.degree_sequence() != g2.degree_sequence()
        || g1.triangle_count() != g2.triangle_count()
    {
        return Ok(false);
    }
    Ok(canonical_form(g1).0 == canonical_form(g2).0)
}

/// An explicit isomorphism `map[v1] = v2` from `g1` onto `g2`, if one exists.
pub fn find_isomorphism(g1: &Graph, g2: &Graph) -> Option<Vec<usize>> {
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let (c1, p1) = canonical_form(g1);
    let (c2, p2) = canonical_form(g2);
    if c1 != c2 {
        return None;
    }
    let mut inv2 = vec![0; p2.len()];
    for (old, &new) in p2.iter().enumerate() {
        inv2[new] = old;
    }
    Some(p1.iter().map(|&c| inv2[c]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn permuted_k4_is_isomorphic() {
        let k4 = Graph::complete(4);
        assert!(are_isomorphic(&k4, &k4.relabel(&[2, 0, 3, 1])).unwrap());
    }

    #[test]
    fn k4_vs_k4_minus_edge() {
        let k4 = Graph::complete(4);
        assert!(!are_isomorphic(&k4, &k4.without_edge(0, 1)).unwrap());
    }

    #[test]
    fn c6_vs_two_triangles() {
        let two_c3 = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(!are_isomorphic(&Graph::cycle(6), &two_c3).unwrap());
    }

    #[test]
    fn cospectral_like_pair_distinguished() {
        // Both cubic on six vertices.
        let prism = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
        let k33 = Graph::new(6, [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]).unwrap();
        assert!(!are_isomorphic(&prism, &k33).unwrap());
        let c3c3 = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
        // K3,3 drawn as a hexagon with its three long diagonals.
        assert!(are_isomorphic(&k33, &c3c3).unwrap());
    }

    #[test]
    fn size_cap() {
        let g = Graph::path(11);
        assert!(matches!(are_isomorphic(&g, &g), Err(GraphError::SizeLimitExceeded { .. })));
        assert!(are_isomorphic_with_limit(&g, &g, 12).unwrap());
    }

    #[test]
    fn explicit_isomorphism_maps_edges() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let h = g.relabel(&[3, 1, 4, 0, 2]);
        let map = find_isomorphism(&g, &h).unwrap();
        assert_eq!(g.relabel(&map), h);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..8).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|j| (0..j).map(move |i| (i, j)));
                Graph::new(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn canonical_form_is_label_invariant(g in arb_graph(), seed in any::<u64>()) {
            let n = g.vertex_count();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let h = g.relabel(&perm);
            prop_assert_eq!(canonical_form(&g).0, canonical_form(&h).0);
            prop_assert!(are_isomorphic(&g, &h).unwrap());
        }

        #[test]
        fn isomorphism_is_an_equivalence(a in arb_graph(), b in arb_graph(), c in arb_graph()) {
            let ab = are_isomorphic(&a, &b).unwrap();
            let bc = are_isomorphic(&b, &c).unwrap();
            let ac = are_isomorphic(&a, &c).unwrap();
            prop_assert!(are_isomorphic(&a, &a).unwrap());
            prop_assert_eq!(ab, are_isomorphic(&b, &a).unwrap());
            if ab && bc {
                prop_assert!(ac);
            }
        }
    }
}
