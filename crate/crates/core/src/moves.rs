//! Henneberg moves, subgraph extension, and derivation certificates.
//!
//! A derivation starts from a small base graph and applies moves in order.
//! New vertices always take the next free label, so a derivation found by
//! reverse moves replays to a relabeled copy of its target. The `*_labeled`
//! functions also return that relabeling.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{contract, edge, Edge, Graph};
use crate::sparsity::{check_type, is_laman, is_laman_plus_one, maximal_tight_subgraph, IndependenceType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("attachment vertices ({0}, {1}) must be two distinct vertices of the graph")]
    InvalidVertices(usize, usize),
    #[error("({0}, {1}) is not an edge of the graph")]
    InvalidEdge(usize, usize),
    #[error("third vertex {0} must be a vertex of the graph off the split edge")]
    InvalidThirdVertex(usize),
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    WrongDegree { vertex: usize, degree: usize },
    #[error("invalid subgraph extension: {0}")]
    InvalidExtension(String),
    #[error("graph is not a Laman graph")]
    NotLaman,
    #[error("graph is not a Laman plus one graph")]
    NotLamanPlusOne,
    #[error("graph is not maximally independent of type 2")]
    NotType2Maximal,
    #[error("step {step} is ill formed: {reason}")]
    IllFormedStep { step: usize, reason: String },
}

/// Starting graph of a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    K1,
    K2,
    K4,
}

impl Base {
    pub fn graph(self) -> Graph {
        match self {
            Base::K1 => Graph::complete(1),
            Base::K2 => Graph::complete(2),
            Base::K4 => Graph::complete(4),
        }
    }
}

/// Joins quotient vertex `neighbor` to vertex `target` of the inserted
/// subgraph, replacing the edge `(neighbor, star)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attachment {
    pub neighbor: usize,
    pub target: usize,
}

/// One construction step. The new vertex of a Henneberg move is labeled
/// `n`, the old vertex count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    /// New vertex adjacent to `a` and `b`.
    Henneberg1 { a: usize, b: usize },
    /// Remove `split`, add a new vertex adjacent to both its ends and `third`.
    Henneberg2 { split: [usize; 2], third: usize },
    /// Replace vertex `star` by the graph that `subgraph` derives. Subgraph
    /// vertex 0 keeps the label `star`; subgraph vertex `t >= 1` becomes
    /// `n + t - 1`. Each edge at `star` is rerouted by one attachment.
    SubgraphExtension {
        star: usize,
        subgraph: DerivationSequence,
        attachments: Vec<Attachment>,
    },
}

impl Move {
    pub fn apply(&self, g: &Graph) -> Result<Graph, MoveError> {
        match self {
            Move::Henneberg1 { a, b } => henneberg1(g, *a, *b),
            Move::Henneberg2 { split, third } => henneberg2(g, (split[0], split[1]), *third),
            Move::SubgraphExtension { star, subgraph, attachments } => {
                let h = replay(subgraph).map_err(|e| MoveError::InvalidExtension(format!("subgraph: {e}")))?;
                subgraph_extension(g, *star, &h, attachments)
            }
        }
    }

    /// Renames the pre-move vertices referenced by a Henneberg move.
    fn relabeled(&self, map: impl Fn(usize) -> usize) -> Move {
        match self {
            Move::Henneberg1 { a, b } => Move::Henneberg1 { a: map(*a), b: map(*b) },
            Move::Henneberg2 { split, third } => Move::Henneberg2 {
                split: [map(split[0]), map(split[1])],
                third: map(*third),
            },
            Move::SubgraphExtension { .. } => unreachable!("extensions are never produced by a single reverse move"),
        }
    }
}

/// A base graph and the moves that build a target from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationSequence {
    pub base: Base,
    pub steps: Vec<Move>,
}

/// A derivation with `labels[r] = v`: replay vertex `r` is target vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDerivation {
    pub sequence: DerivationSequence,
    pub labels: Vec<usize>,
}

impl LabeledDerivation {
    fn from_base(base: Base) -> Self {
        let n = base.graph().vertex_count();
        LabeledDerivation {
            sequence: DerivationSequence { base, steps: Vec::new() },
            labels: (0..n).collect(),
        }
    }

    /// Extends a derivation of `G \ removed` (plus ghost edge) to one of `G`.
    fn undo(mut self, reduction: &Reduction) -> Self {
        let inverse = invert(&self.labels);
        self.sequence.steps.push(reduction.step.relabeled(|x| inverse[x]));
        let v = reduction.removed;
        for label in &mut self.labels {
            if *label >= v {
                *label += 1;
            }
        }
        self.labels.push(v);
        self
    }

    /// The replayed graph relabeled onto the target.
    pub fn relabeled_replay(&self) -> Result<Graph, MoveError> {
        Ok(replay(&self.sequence)?.relabel(&self.labels))
    }
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = i;
    }
    inverse
}

/// Reverse move: `removed` was deleted, and `step` (in the labels of the
/// smaller graph) rebuilds it.
struct Reduction {
    removed: usize,
    step: Move,
}

fn shift_down(v: usize) -> impl Fn(usize) -> usize {
    move |x| if x > v { x - 1 } else { x }
}

/// Adds a vertex joined to `a` and `b`.
pub fn henneberg1(g: &Graph, a: usize, b: usize) -> Result<Graph, MoveError> {
    let n = g.vertex_count();
    if a == b || a >= n || b >= n {
        return Err(MoveError::InvalidVertices(a, b));
    }
    Ok(Graph::new(n + 1, g.edges().iter().copied().chain([(a, n), (b, n)])).expect("new vertex keeps the graph simple"))
}

/// Splits `split` at a new vertex that is also joined to `third`.
pub fn henneberg2(g: &Graph, split: (usize, usize), third: usize) -> Result<Graph, MoveError> {
    let n = g.vertex_count();
    let (i, j) = split;
    if !g.has_edge(i, j) {
        return Err(MoveError::InvalidEdge(i, j));
    }
    if third >= n || third == i || third == j {
        return Err(MoveError::InvalidThirdVertex(third));
    }
    let e = edge(i, j);
    let edges = g.edges().iter().copied().filter(|&f| f != e).chain([(i, n), (j, n), (third, n)]);
    Ok(Graph::new(n + 1, edges).expect("edge split keeps the graph simple"))
}

/// Replaces vertex `star` of `g` by `h`; see [`Move::SubgraphExtension`].
pub fn subgraph_extension(g: &Graph, star: usize, h: &Graph, attachments: &[Attachment]) -> Result<Graph, MoveError> {
    let n = g.vertex_count();
    if star >= n {
        return Err(MoveError::InvalidExtension(format!("vertex {star} is not in the graph")));
    }
    let attached: BTreeSet<usize> = attachments.iter().map(|a| a.neighbor).collect();
    if attached.len() != attachments.len() || attached != *g.neighbors(star) {
        return Err(MoveError::InvalidExtension(format!(
            "attachments must reroute each edge at vertex {star} exactly once"
        )));
    }
    if let Some(bad) = attachments.iter().find(|a| a.target >= h.vertex_count()) {
        return Err(MoveError::InvalidExtension(format!("subgraph has no vertex {}", bad.target)));
    }
    let place = |t: usize| if t == 0 { star } else { n + t - 1 };
    let edges = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| a != star && b != star)
        .chain(h.edges().iter().map(|&(a, b)| (place(a), place(b))))
        .chain(attachments.iter().map(|a| (a.neighbor, place(a.target))));
    Graph::new(n + h.vertex_count() - 1, edges).map_err(|e| MoveError::InvalidExtension(e.to_string()))
}

/// Ghost pairs at the degree-3 vertex `v` whose reverse Henneberg 2 move
/// leaves a graph maximally independent of type `k`. Pairs are in the
/// labels of `G \ v` (labels above `v` shift down by one) and come in the
/// order `xy, xz, yz` for neighbors `x < y < z`.
pub fn inverse_henneberg2_candidates(
    g: &Graph,
    v: usize,
    k: IndependenceType,
) -> Result<Vec<(Edge, Graph)>, MoveError> {
    if v >= g.vertex_count() || g.degree(v) != 3 {
        let degree = if v < g.vertex_count() { g.degree(v) } else { 0 };
        return Err(MoveError::WrongDegree { vertex: v, degree });
    }
    let shift = shift_down(v);
    let nb: Vec<usize> = g.neighbors(v).iter().map(|&x| shift(x)).collect();
    let reduced = g.without_vertex(v);
    let mut out = Vec::new();
    for (a, b) in [(nb[0], nb[1]), (nb[0], nb[2]), (nb[1], nb[2])] {
        if reduced.has_edge(a, b) {
            continue;
        }
        let candidate = reduced.with_edge(a, b).expect("ghost pair is a non-edge");
        if check_type(&candidate, k).maximal {
            out.push(((a, b), candidate));
        }
    }
    Ok(out)
}

fn reverse_h1(g: &Graph, v: usize) -> (Reduction, Graph) {
    let shift = shift_down(v);
    let nb: Vec<usize> = g.neighbors(v).iter().map(|&x| shift(x)).collect();
    let step = Move::Henneberg1 { a: nb[0], b: nb[1] };
    (Reduction { removed: v, step }, g.without_vertex(v))
}

fn reverse_h2(g: &Graph, v: usize, ghost: Edge, smaller: Graph) -> (Reduction, Graph) {
    let shift = shift_down(v);
    let third = g
        .neighbors(v)
        .iter()
        .map(|&x| shift(x))
        .find(|&x| x != ghost.0 && x != ghost.1)
        .expect("degree-3 vertex has a third neighbor");
    let step = Move::Henneberg2 { split: [ghost.0, ghost.1], third };
    (Reduction { removed: v, step }, smaller)
}

fn vertices_of_degree(g: &Graph, d: usize) -> impl Iterator<Item = usize> + '_ {
    (0..g.vertex_count()).filter(move |&v| g.degree(v) == d)
}

fn fold_reductions(base: Base, reductions: &[Reduction]) -> LabeledDerivation {
    reductions
        .iter()
        .rev()
        .fold(LabeledDerivation::from_base(base), |acc, r| acc.undo(r))
}

/// Derivation of a Laman graph from `K2`, with replay labels.
///
/// Each reverse step deletes the lowest degree-2 vertex, or else applies a
/// reverse Henneberg 2 move at the lowest degree-3 vertex onto its first
/// ghost pair that keeps the graph Laman.
pub fn derive_laman_labeled(g: &Graph) -> Result<LabeledDerivation, MoveError> {
    if !is_laman(g) {
        return Err(MoveError::NotLaman);
    }
    let mut reductions = Vec::new();
    let mut current = g.clone();
    while current.vertex_count() > 2 {
        let (reduction, smaller) = if let Some(v) = vertices_of_degree(&current, 2).next() {
            reverse_h1(&current, v)
        } else {
            vertices_of_degree(&current, 3)
                .find_map(|v| {
                    let (ghost, smaller) = inverse_henneberg2_candidates(&current, v, IndependenceType::Type3)
                        .ok()?
                        .into_iter()
                        .next()?;
                    Some(reverse_h2(&current, v, ghost, smaller))
                })
                .expect("a Laman graph without degree-2 vertices has a reducible degree-3 vertex")
        };
        reductions.push(reduction);
        current = smaller;
    }
    Ok(fold_reductions(Base::K2, &reductions))
}

pub fn derive_laman(g: &Graph) -> Result<DerivationSequence, MoveError> {
    derive_laman_labeled(g).map(|d| d.sequence)
}

/// First reverse Henneberg move (degree-2 vertices first, then degree-3
/// vertices with ghost pairs in order) whose result is Laman plus one.
fn laman_plus_one_reduction(g: &Graph) -> Option<(Reduction, Graph)> {
    for v in vertices_of_degree(g, 2) {
        let (reduction, smaller) = reverse_h1(g, v);
        if is_laman_plus_one(&smaller).is_some() {
            return Some((reduction, smaller));
        }
    }
    for v in vertices_of_degree(g, 3) {
        let candidates = inverse_henneberg2_candidates(g, v, IndependenceType::Type2).ok()?;
        for (ghost, smaller) in candidates {
            if is_laman_plus_one(&smaller).is_some() {
                return Some(reverse_h2(g, v, ghost, smaller));
            }
        }
    }
    None
}

/// Derivation of a Laman plus one graph from `K4` by Henneberg moves only,
/// each intermediate graph being Laman plus one.
pub fn derive_laman_plus_one_labeled(g: &Graph) -> Result<LabeledDerivation, MoveError> {
    if is_laman_plus_one(g).is_none() {
        return Err(MoveError::NotLamanPlusOne);
    }
    let mut reductions = Vec::new();
    let mut current = g.clone();
    while current.vertex_count() > 4 {
        let (reduction, smaller) =
            laman_plus_one_reduction(&current).expect("every Laman plus one graph other than K4 has a reverse move");
        reductions.push(reduction);
        current = smaller;
    }
    debug_assert_eq!(current, Graph::complete(4));
    Ok(fold_reductions(Base::K4, &reductions))
}

pub fn derive_laman_plus_one(g: &Graph) -> Result<DerivationSequence, MoveError> {
    derive_laman_plus_one_labeled(g).map(|d| d.sequence)
}

/// Derivation of a maximally independent type-2 graph from `K4` (or `K1`).
///
/// Laman plus one graphs use Henneberg moves alone. Otherwise a degree-2
/// vertex is peeled off by a reverse Henneberg 1 move; this is the case where
/// the maximal tight subgraph is `G \ v` and the quotient would carry a
/// double edge. Failing both, the graph splits along an inclusion-maximal
/// proper tight subgraph `H`: the quotient `G/H` and `H` are derived
/// recursively and joined by one subgraph extension.
pub fn derive_type2_labeled(g: &Graph) -> Result<LabeledDerivation, MoveError> {
    if !check_type(g, IndependenceType::Type2).maximal {
        return Err(MoveError::NotType2Maximal);
    }
    Ok(type2_recursive(g))
}

fn type2_recursive(g: &Graph) -> LabeledDerivation {
    if g.vertex_count() == 1 {
        return LabeledDerivation::from_base(Base::K1);
    }
    if is_laman_plus_one(g).is_some() {
        return derive_laman_plus_one_labeled(g).expect("checked Laman plus one");
    }
    if let Some(v) = vertices_of_degree(g, 2).next() {
        let (reduction, smaller) = reverse_h1(g, v);
        return type2_recursive(&smaller).undo(&reduction);
    }
    let h = maximal_tight_subgraph(g).expect("a type-2 graph that is not Laman plus one has a proper tight subgraph");
    let quotient = contract(g, &h).expect("an inclusion-maximal tight subgraph has a simple quotient");
    let (h_graph, h_local) = g.induced(&h.vertices).expect("induced subgraph");

    let outer = type2_recursive(&quotient.graph);
    let inner = type2_recursive(&h_graph);

    // quotient vertex -> original vertex, for vertices outside H
    let mut outside = vec![usize::MAX; quotient.star];
    for (v, &q) in quotient.vertex_map.iter().enumerate() {
        if q != quotient.star {
            outside[q] = v;
        }
    }
    let outer_inverse = invert(&outer.labels);
    let inner_inverse = invert(&inner.labels);
    let star = outer_inverse[quotient.star];
    let mut attachments: Vec<Attachment> = quotient
        .graph
        .neighbors(quotient.star)
        .iter()
        .map(|&q| {
            let o = outside[q];
            let inside = *g
                .neighbors(o)
                .iter()
                .find(|x| h.vertices.contains(x))
                .expect("quotient edge comes from an edge into H");
            let local = h_local.binary_search(&inside).expect("vertex of H");
            Attachment { neighbor: outer_inverse[q], target: inner_inverse[local] }
        })
        .collect();
    attachments.sort_by_key(|a| a.neighbor);

    let mut labels: Vec<usize> = outer
        .labels
        .iter()
        .enumerate()
        .map(|(r, &q)| if r == star { h_local[inner.labels[0]] } else { outside[q] })
        .collect();
    labels.extend(inner.labels[1..].iter().map(|&l| h_local[l]));

    let mut sequence = outer.sequence;
    sequence.steps.push(Move::SubgraphExtension { star, subgraph: inner.sequence, attachments });
    LabeledDerivation { sequence, labels }
}

pub fn derive_type2(g: &Graph) -> Result<DerivationSequence, MoveError> {
    derive_type2_labeled(g).map(|d| d.sequence)
}

/// Replays a derivation, checking every intermediate graph is connected.
pub fn replay(seq: &DerivationSequence) -> Result<Graph, MoveError> {
    let mut g = seq.base.graph();
    for (step, m) in seq.steps.iter().enumerate() {
        g = m.apply(&g).map_err(|e| MoveError::IllFormedStep { step, reason: e.to_string() })?;
        if !g.is_connected() {
            return Err(MoveError::IllFormedStep { step, reason: "result is disconnected".into() });
        }
    }
    Ok(g)
}

/// How a maximally independent type-2 graph reduces by a single vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Type2Reduction {
    /// The lowest vertex of degree 2.
    DegreeTwo(usize),
    /// Every degree-3 vertex lies in a `K4` subgraph.
    AllDegreeThreeInK4,
    /// A reverse Henneberg 2 move at `vertex` onto the ghost pair `ghost`
    /// (labels of `G \ vertex`) gives the type-2 graph `predecessor`.
    Henneberg2 { vertex: usize, ghost: Edge, predecessor: Graph },
}

fn in_k4(g: &Graph, v: usize) -> bool {
    let nb: Vec<usize> = g.neighbors(v).iter().copied().collect();
    (0..nb.len()).any(|i| {
        (i + 1..nb.len()).any(|j| {
            (j + 1..nb.len()).any(|k| g.has_edge(nb[i], nb[j]) && g.has_edge(nb[i], nb[k]) && g.has_edge(nb[j], nb[k]))
        })
    })
}

/// The three-way case split for maximally independent type-2 graphs: a
/// degree-2 vertex, or all degree-3 vertices in `K4` subgraphs, or else a
/// degree-3 vertex outside every `K4` with a ghost pair avoided by every
/// tight subgraph, so the reverse Henneberg 2 move onto it stays type 2.
pub fn classify_type2(g: &Graph) -> Result<Type2Reduction, MoveError> {
    if !check_type(g, IndependenceType::Type2).maximal {
        return Err(MoveError::NotType2Maximal);
    }
    if let Some(v) = vertices_of_degree(g, 2).next() {
        return Ok(Type2Reduction::DegreeTwo(v));
    }
    for v in vertices_of_degree(g, 3).filter(|&v| !in_k4(g, v)) {
        if let Some((ghost, predecessor)) =
            inverse_henneberg2_candidates(g, v, IndependenceType::Type2)?.into_iter().next()
        {
            return Ok(Type2Reduction::Henneberg2 { vertex: v, ghost, predecessor });
        }
    }
    Ok(Type2Reduction::AllDegreeThreeInK4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::are_isomorphic;

    fn two_k4_at_vertex() -> Graph {
        let mut edges = Vec::new();
        for block in [[0, 1, 2, 3], [3, 4, 5, 6]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((block[i], block[j]));
                }
            }
        }
        Graph::new(7, edges).unwrap()
    }

    fn two_k4_by_two_edges() -> Graph {
        let mut edges = vec![(0, 4), (1, 5)];
        for block in [[0, 1, 2, 3], [4, 5, 6, 7]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((block[i], block[j]));
                }
            }
        }
        Graph::new(8, edges).unwrap()
    }

    #[test]
    fn henneberg1_examples() {
        assert_eq!(henneberg1(&Graph::complete(2), 0, 1).unwrap(), Graph::complete(3));
        let g = henneberg1(&Graph::complete(3), 0, 1).unwrap();
        assert!(are_isomorphic(&g, &Graph::complete(4).without_edge(2, 3)).unwrap());
        assert_eq!(g.freedom_number(), 3);
        assert_eq!(henneberg1(&Graph::complete(3), 1, 1), Err(MoveError::InvalidVertices(1, 1)));
        assert_eq!(henneberg1(&Graph::complete(3), 0, 5), Err(MoveError::InvalidVertices(0, 5)));
    }

    #[test]
    fn henneberg2_examples() {
        let g = henneberg2(&Graph::complete(3), (0, 1), 2).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(is_laman(&g));
        let g = henneberg2(&Graph::complete(4), (0, 1), 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 8));
        assert!(check_type(&g, IndependenceType::Type2).maximal);
        assert_eq!(henneberg2(&Graph::path(3), (0, 2), 1), Err(MoveError::InvalidEdge(0, 2)));
        assert_eq!(henneberg2(&Graph::complete(3), (0, 1), 1), Err(MoveError::InvalidThirdVertex(1)));
    }

    #[test]
    fn henneberg2_then_inverse_is_identity() {
        let g = Graph::complete(4).without_edge(0, 1);
        let bigger = henneberg2(&g, (0, 2), 3).unwrap();
        let back = bigger.without_vertex(4).with_edge(0, 2).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn inverse_candidates() {
        assert!(inverse_henneberg2_candidates(&two_k4_at_vertex(), 0, IndependenceType::Type2)
            .unwrap()
            .is_empty());
        let kite = Graph::complete(4).without_edge(0, 1);
        assert_eq!(
            inverse_henneberg2_candidates(&kite, 0, IndependenceType::Type3),
            Err(MoveError::WrongDegree { vertex: 0, degree: 2 })
        );
        let g = henneberg2(&Graph::complete(3), (0, 1), 2).unwrap();
        let candidates = inverse_henneberg2_candidates(&g, 3, IndependenceType::Type3).unwrap();
        assert_eq!(candidates.len(), 1);
        assert_eq!(candidates[0].0, (0, 1));
        assert_eq!(candidates[0].1, Graph::complete(3));
    }

    #[test]
    fn laman_derivations() {
        let d = derive_laman(&Graph::complete(3)).unwrap();
        assert_eq!(d.base, Base::K2);
        assert_eq!(d.steps, vec![Move::Henneberg1 { a: 0, b: 1 }]);
        let kite = Graph::complete(4).without_edge(0, 1);
        let d = derive_laman_labeled(&kite).unwrap();
        assert_eq!(d.sequence.steps.len(), 2);
        assert_eq!(d.relabeled_replay().unwrap(), kite);
        assert_eq!(derive_laman(&Graph::complete(4)), Err(MoveError::NotLaman));
    }

    #[test]
    fn laman_plus_one_derivations() {
        let k4 = Graph::complete(4);
        let d = derive_laman_plus_one(&k4).unwrap();
        assert_eq!((d.base, d.steps.len()), (Base::K4, 0));
        let g = henneberg1(&k4, 0, 1).unwrap();
        let d = derive_laman_plus_one_labeled(&g).unwrap();
        assert_eq!(d.sequence.steps.len(), 1);
        assert!(matches!(d.sequence.steps[0], Move::Henneberg1 { .. }));
        assert_eq!(d.relabeled_replay().unwrap(), g);
        assert_eq!(derive_laman_plus_one(&two_k4_at_vertex()), Err(MoveError::NotLamanPlusOne));
    }

    #[test]
    fn type2_derivations() {
        let d = derive_type2(&Graph::complete(4)).unwrap();
        assert_eq!((d.base, d.steps.len()), (Base::K4, 0));

        let g = two_k4_at_vertex();
        let d = derive_type2_labeled(&g).unwrap();
        assert_eq!(d.sequence.base, Base::K4);
        assert_eq!(d.sequence.steps.len(), 1);
        match &d.sequence.steps[0] {
            Move::SubgraphExtension { subgraph, attachments, .. } => {
                assert_eq!(subgraph.base, Base::K4);
                assert!(subgraph.steps.is_empty());
                assert_eq!(attachments.len(), 3);
            }
            other => panic!("expected an extension, got {other:?}"),
        }
        assert_eq!(d.relabeled_replay().unwrap(), g);

        let g = two_k4_by_two_edges();
        let d = derive_type2_labeled(&g).unwrap();
        assert!(d.sequence.steps.iter().any(|m| matches!(m, Move::SubgraphExtension { .. })));
        assert_eq!(d.relabeled_replay().unwrap(), g);

        let d = derive_type2(&Graph::complete(1)).unwrap();
        assert_eq!((d.base, d.steps.len()), (Base::K1, 0));
        assert_eq!(derive_type2(&Graph::complete(3)), Err(MoveError::NotType2Maximal));
    }

    #[test]
    fn replay_rejects_bad_steps() {
        assert_eq!(replay(&DerivationSequence { base: Base::K4, steps: vec![] }).unwrap(), Graph::complete(4));
        let seq = DerivationSequence {
            base: Base::K4,
            steps: vec![
                Move::Henneberg2 { split: [0, 1], third: 2 },
                Move::Henneberg2 { split: [0, 1], third: 3 },
            ],
        };
        assert!(matches!(replay(&seq), Err(MoveError::IllFormedStep { step: 1, .. })));
        let seq = DerivationSequence {
            base: Base::K4,
            steps: vec![Move::SubgraphExtension {
                star: 0,
                subgraph: DerivationSequence { base: Base::K4, steps: vec![] },
                attachments: vec![Attachment { neighbor: 1, target: 0 }],
            }],
        };
        assert!(matches!(replay(&seq), Err(MoveError::IllFormedStep { step: 0, .. })));
    }

    #[test]
    fn json_shape() {
        let seq = DerivationSequence { base: Base::K2, steps: vec![Move::Henneberg1 { a: 0, b: 1 }] };
        let text = serde_json::to_string(&seq).unwrap();
        assert_eq!(text, r#"{"base":"K2","steps":[{"kind":"Henneberg1","a":0,"b":1}]}"#);
        let back: DerivationSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_type2(&two_k4_at_vertex()).unwrap(), Type2Reduction::AllDegreeThreeInK4);
        let g = henneberg2(&Graph::complete(4), (0, 1), 2).unwrap();
        match classify_type2(&g).unwrap() {
            Type2Reduction::Henneberg2 { predecessor, .. } => {
                assert!(check_type(&predecessor, IndependenceType::Type2).maximal)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
