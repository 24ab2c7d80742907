//! Decompositions into two edge-disjoint spanning trees, built by carrying a
//! pair of trees along a Henneberg derivation.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph};
use crate::moves::{derive_laman_labeled, derive_type2_labeled, replay, Base, DerivationSequence, Move};
use crate::sparsity::is_laman;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("graph is not maximally independent of type 2")]
    NotType2Maximal,
    #[error("graph is not a Laman graph")]
    NotLaman,
    #[error("added edge ({0}, {1}) must join two distinct vertices of the graph")]
    InvalidExtraEdge(usize, usize),
}

/// An edge of a multigraph: the vertex pair (low, high) and which parallel
/// copy it is. Serialized as `[u, v, copy]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct TaggedEdge {
    pub u: usize,
    pub v: usize,
    pub copy: usize,
}

impl From<[usize; 3]> for TaggedEdge {
    fn from([a, b, copy]: [usize; 3]) -> Self {
        let (u, v) = edge(a, b);
        TaggedEdge { u, v, copy }
    }
}

impl From<TaggedEdge> for [usize; 3] {
    fn from(e: TaggedEdge) -> Self {
        [e.u, e.v, e.copy]
    }
}

/// Tags a list of vertex pairs: the first occurrence of a pair is copy 0,
/// the next copy 1, and so on.
pub fn tag_edges(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<TaggedEdge> {
    let mut seen: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut out: Vec<TaggedEdge> = pairs
        .into_iter()
        .map(|(a, b)| {
            let (u, v) = edge(a, b);
            let copy = seen.entry((u, v)).or_insert(0);
            *copy += 1;
            TaggedEdge { u, v, copy: *copy - 1 }
        })
        .collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub tree1: Vec<TaggedEdge>,
    pub tree2: Vec<TaggedEdge>,
}

impl TreeDecomposition {
    /// Builds a decomposition from two pair lists; a pair present in both
    /// trees is copy 0 in the first and copy 1 in the second.
    fn from_pairs(tree1: &[Edge], tree2: &[Edge]) -> Self {
        let first = tag_edges(tree1.iter().copied());
        let mut second: Vec<TaggedEdge> = tree2
            .iter()
            .map(|&(a, b)| {
                let (u, v) = edge(a, b);
                let copy = first.iter().filter(|e| (e.u, e.v) == (u, v)).count();
                TaggedEdge { u, v, copy }
            })
            .collect();
        second.sort();
        TreeDecomposition { tree1: first, tree2: second }
    }
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn is_spanning_tree(n: usize, tree: &[TaggedEdge]) -> bool {
    if tree.len() + 1 != n {
        return false;
    }
    let mut sets = DisjointSets::new(n);
    tree.iter().all(|e| e.u < n && e.v < n && e.u != e.v && sets.union(e.u, e.v))
}

/// True iff the two trees are disjoint, together equal `edges` as a
/// multiset, and each is a spanning tree on `0..vertex_count`.
pub fn verify_decomposition(vertex_count: usize, edges: &[TaggedEdge], d: &TreeDecomposition) -> bool {
    let mut target = edges.to_vec();
    target.sort();
    let mut union: Vec<TaggedEdge> = d.tree1.iter().chain(&d.tree2).copied().collect();
    union.sort();
    let disjoint = union.windows(2).all(|w| w[0] != w[1]);
    disjoint
        && union == target
        && is_spanning_tree(vertex_count, &d.tree1)
        && is_spanning_tree(vertex_count, &d.tree2)
}

/// Two edge lists over the same vertex set, each meant to become a
/// spanning tree. Parallel edges are plain repeated pairs.
#[derive(Clone, Debug)]
struct TreePair {
    trees: [Vec<Edge>; 2],
}

impl TreePair {
    fn holding(&self, e: Edge) -> Vec<usize> {
        (0..2).filter(|&t| self.trees[t].contains(&e)).collect()
    }

    /// Removes one copy of `e`, preferring a tree other than `avoid`.
    /// Returns the tree it came from.
    fn remove(&mut self, e: Edge, avoid: Option<usize>) -> usize {
        let holders = self.holding(e);
        let t = *holders
            .iter()
            .find(|&&t| Some(t) != avoid)
            .or(holders.first())
            .expect("edge belongs to one of the trees");
        let pos = self.trees[t].iter().position(|&f| f == e).expect("held edge");
        self.trees[t].swap_remove(pos);
        t
    }

    fn add(&mut self, t: usize, a: usize, b: usize) {
        self.trees[t].push(edge(a, b));
    }

    /// Component labels of tree `t` on `n` vertices.
    fn components(&self, t: usize, n: usize) -> Vec<usize> {
        let mut sets = DisjointSets::new(n);
        for &(a, b) in &self.trees[t] {
            sets.union(a, b);
        }
        (0..n).map(|v| sets.find(v)).collect()
    }

    /// Splits the edge `split` of `G` at new vertex `w` joined to `third`,
    /// when no added edge touches `w`.
    fn split_edge(&mut self, split: Edge, third: usize, w: usize) {
        let t = self.remove(split, None);
        self.add(t, split.0, w);
        self.add(t, split.1, w);
        self.add(1 - t, third, w);
    }

    fn apply_simple(&mut self, step: &Move, n_before: usize) {
        let w = n_before;
        match step {
            Move::Henneberg1 { a, b } => {
                self.add(0, *a, w);
                self.add(1, *b, w);
            }
            Move::Henneberg2 { split, third } => self.split_edge(edge(split[0], split[1]), *third, w),
            Move::SubgraphExtension { star, subgraph, attachments } => {
                let (_, inner) = transport_type2(subgraph);
                let place = |x: usize| if x == 0 { *star } else { n_before + x - 1 };
                let target: BTreeMap<usize, usize> = attachments.iter().map(|a| (a.neighbor, a.target)).collect();
                for t in 0..2 {
                    let mut next: Vec<Edge> = Vec::new();
                    for &(a, b) in &self.trees[t] {
                        if a == *star || b == *star {
                            let outer = if a == *star { b } else { a };
                            next.push(edge(outer, place(target[&outer])));
                        } else {
                            next.push((a, b));
                        }
                    }
                    next.extend(inner.trees[t].iter().map(|&(a, b)| edge(place(a), place(b))));
                    self.trees[t] = next;
                }
            }
        }
    }
}

/// The type-2 base decompositions: `K4` as two paths, `K1` as two empty trees.
fn base_pair(base: Base) -> TreePair {
    match base {
        Base::K4 => TreePair { trees: [vec![(0, 1), (0, 2), (1, 3)], vec![(0, 3), (1, 2), (2, 3)]] },
        Base::K1 => TreePair { trees: [vec![], vec![]] },
        Base::K2 => panic!("K2 is not maximally independent of type 2"),
    }
}

/// Carries a tree pair along a type-2 derivation: Henneberg 1 puts one new
/// edge in each tree, Henneberg 2 keeps the split edge's tree connected
/// through the new vertex, and an extension swaps the star's edges for
/// their rerouted versions and adds the subgraph's own trees.
fn transport_type2(seq: &DerivationSequence) -> (Graph, TreePair) {
    let mut g = seq.base.graph();
    let mut pair = base_pair(seq.base);
    for step in &seq.steps {
        pair.apply_simple(step, g.vertex_count());
        g = step.apply(&g).expect("derivation replays");
    }
    (g, pair)
}

/// Two edge-disjoint spanning trees of a maximally independent type-2 graph.
pub fn decompose_type2(g: &Graph) -> Result<TreeDecomposition, TreeError> {
    let derivation = derive_type2_labeled(g).map_err(|_| TreeError::NotType2Maximal)?;
    let (_, pair) = transport_type2(&derivation.sequence);
    let relabel = |t: &[Edge]| -> Vec<Edge> {
        t.iter().map(|&(a, b)| edge(derivation.labels[a], derivation.labels[b])).collect()
    };
    Ok(TreeDecomposition::from_pairs(&relabel(&pair.trees[0]), &relabel(&pair.trees[1])))
}

/// Inserts `extra` into two forests on `n` vertices by the matroid-partition
/// augmenting path search: an edge that closes a cycle in one forest may
/// displace a cycle edge, which then looks for room in the other forest.
/// Breadth-first order makes the swaps along the path consistent.
fn insert_by_augmentation(pair: &mut TreePair, n: usize, extra: Edge) {
    let mut items: Vec<Edge> = Vec::new();
    let mut home: Vec<Option<usize>> = Vec::new();
    for t in 0..2 {
        for &e in &pair.trees[t] {
            items.push(e);
            home.push(Some(t));
        }
    }
    items.push(extra);
    home.push(None);
    let start = items.len() - 1;

    let forest_path = |t: usize, a: usize, b: usize, home: &[Option<usize>]| -> Option<Vec<usize>> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(x, y)) in items.iter().enumerate() {
            if home[i] == Some(t) {
                adj[x].push((y, i));
                adj[y].push((x, i));
            }
        }
        let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for &(y, i) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some((x, i));
                    queue.push_back(y);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = b;
        while let Some((prev, i)) = via[cur] {
            path.push(i);
            cur = prev;
        }
        Some(path)
    };

    let mut label: Vec<Option<usize>> = vec![None; items.len()];
    let mut visited = vec![false; items.len()];
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for t in (0..2).filter(|&t| home[cur] != Some(t)) {
            let (a, b) = items[cur];
            match forest_path(t, a, b, &home) {
                None => {
                    let mut mover = cur;
                    let mut into = t;
                    loop {
                        let old = home[mover];
                        home[mover] = Some(into);
                        match label[mover] {
                            Some(prev) => {
                                mover = prev;
                                into = old.expect("displaced edges have a home");
                            }
                            None => break,
                        }
                    }
                    for k in 0..2 {
                        pair.trees[k] = items.iter().zip(&home).filter(|(_, h)| **h == Some(k)).map(|(e, _)| *e).collect();
                    }
                    return;
                }
                Some(cycle) => {
                    for i in cycle {
                        if !visited[i] {
                            visited[i] = true;
                            label[i] = Some(cur);
                            queue.push_back(i);
                        }
                    }
                }
            }
        }
    }
    panic!("no augmenting path: the edge set is not a union of two forests");
}

/// Updates a tree pair for `G + before` to one for `G' + after`, where `G'`
/// is `G` after `step` adds vertex `w = n`.
fn laman_plus_step(pair: &mut TreePair, step: &Move, n: usize, before: Edge, after: Edge) {
    let w = n;
    let touches = after.0 == w || after.1 == w;
    if !touches {
        match step {
            Move::Henneberg1 { a, b } => {
                pair.add(0, *a, w);
                pair.add(1, *b, w);
            }
            Move::Henneberg2 { split, third } => pair.split_edge(edge(split[0], split[1]), *third, w),
            Move::SubgraphExtension { .. } => unreachable!("Laman derivations use Henneberg moves only"),
        }
        return;
    }
    let u = if after.0 == w { after.1 } else { after.0 };
    match step {
        Move::Henneberg1 { a, b } => {
            // `before` joins u to a or b (or is the pair ab when u is one of
            // them). Removing it splits its tree into the part holding u and
            // the part holding the other end.
            let t = pair.remove(before, None);
            let comp = pair.components(t, n);
            if comp[*a] != comp[*b] {
                pair.add(t, *a, w);
                pair.add(t, *b, w);
                pair.add(1 - t, u, w);
            } else {
                pair.add(1 - t, *a, w);
                pair.add(t, *b, w);
                pair.add(t, u, w);
            }
        }
        Move::Henneberg2 { split, third } => {
            let (vi, vj, vk) = (split[0], split[1], *third);
            let s = edge(vi, vj);
            let ts = pair.remove(s, None);
            if u == vk {
                // Both copies of (w, vk) are pendant edges at w; the split
                // ends are then routed by augmentation.
                pair.remove(before, None);
                pair.add(0, vk, w);
                pair.add(1, vk, w);
                insert_by_augmentation(pair, n + 1, edge(vi, w));
                insert_by_augmentation(pair, n + 1, edge(vj, w));
                return;
            }
            let tf = pair.remove(before, Some(ts));
            if tf != ts {
                pair.add(ts, vi, w);
                pair.add(ts, vj, w);
                pair.add(tf, vk, w);
                pair.add(tf, u, w);
            } else {
                // Three components, each holding one of vi, vj, vk, u; join
                // the first endpoint found in each to w and send the spare
                // endpoint to the other tree.
                let comp = pair.components(ts, n);
                let mut used = Vec::new();
                let mut spare = None;
                for x in [vi, vj, vk, u] {
                    if used.contains(&comp[x]) {
                        spare = Some(x);
                    } else {
                        used.push(comp[x]);
                        pair.add(ts, x, w);
                    }
                }
                pair.add(1 - ts, spare.expect("four endpoints over three components"), w);
            }
        }
        Move::SubgraphExtension { .. } => unreachable!("Laman derivations use Henneberg moves only"),
    }
}

/// The added edge each earlier graph must carry so the next step can be
/// handled locally.
fn pull_back_extra(step: &Move, n: usize, after: Edge) -> Edge {
    let w = n;
    if after.0 != w && after.1 != w {
        return after;
    }
    let u = if after.0 == w { after.1 } else { after.0 };
    match step {
        Move::Henneberg1 { a, b } => {
            if u == *a || u == *b {
                edge(*a, *b)
            } else {
                edge(u, *a)
            }
        }
        Move::Henneberg2 { split, third } => {
            if u == *third {
                edge(split[0], *third)
            } else {
                edge(*third, u)
            }
        }
        Move::SubgraphExtension { .. } => unreachable!("Laman derivations use Henneberg moves only"),
    }
}

/// Two edge-disjoint spanning trees of the Laman graph `g` plus the pair
/// `extra`, which may double an existing edge. A doubled pair appears once
/// in each tree, as copy 0 in `tree1` and copy 1 in `tree2`.
pub fn decompose_laman_plus_edge(g: &Graph, extra: (usize, usize)) -> Result<TreeDecomposition, TreeError> {
    let n = g.vertex_count();
    let (a, b) = extra;
    if a == b || a >= n || b >= n {
        return Err(TreeError::InvalidExtraEdge(a, b));
    }
    if !is_laman(g) {
        return Err(TreeError::NotLaman);
    }
    let derivation = derive_laman_labeled(g).map_err(|_| TreeError::NotLaman)?;
    let mut position = vec![0; n];
    for (r, &v) in derivation.labels.iter().enumerate() {
        position[v] = r;
    }
    let steps = &derivation.sequence.steps;
    // extras[i] is the added edge for the graph after i steps, which has
    // i + 2 vertices.
    let mut extras = vec![edge(position[a], position[b]); steps.len() + 1];
    for i in (0..steps.len()).rev() {
        extras[i] = pull_back_extra(&steps[i], i + 2, extras[i + 1]);
    }
    debug_assert_eq!(extras[0], (0, 1));
    let mut pair = TreePair { trees: [vec![(0, 1)], vec![(0, 1)]] };
    for (i, step) in steps.iter().enumerate() {
        laman_plus_step(&mut pair, step, i + 2, extras[i], extras[i + 1]);
    }
    debug_assert_eq!(replay(&derivation.sequence).map(|r| r.vertex_count()), Ok(n));
    let relabel = |t: &[Edge]| -> Vec<Edge> {
        t.iter().map(|&(x, y)| edge(derivation.labels[x], derivation.labels[y])).collect()
    };
    Ok(TreeDecomposition::from_pairs(&relabel(&pair.trees[0]), &relabel(&pair.trees[1])))
}

/// The edge multiset of `g` plus optional extra pair, tagged.
pub fn tagged_edges(g: &Graph, extra: Option<(usize, usize)>) -> Vec<TaggedEdge> {
    tag_edges(g.edges().iter().copied().chain(extra))
}
