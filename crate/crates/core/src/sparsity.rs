//! Independence of types 2 and 3 and the related counting conditions.
//!
//! The fast path is the (2, l) pebble game for l in {2, 3}. A brute-force
//! oracle over vertex subsets backs it up for small graphs.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph, SubgraphRef};

/// Vertex cap for [`check_type_oracle`].
pub const ORACLE_LIMIT: usize = 12;

/// Which freedom-number bound a subgraph must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndependenceType {
    /// `f(H) >= 2` for every subgraph.
    Type2,
    /// `f(H) >= 3` for every subgraph with at least one edge.
    Type3,
}

impl IndependenceType {
    pub fn bound(self) -> i64 {
        match self {
            IndependenceType::Type2 => 2,
            IndependenceType::Type3 => 3,
        }
    }
}

impl TryFrom<u8> for IndependenceType {
    type Error = SparsityError;

    fn try_from(k: u8) -> Result<Self, Self::Error> {
        match k {
            2 => Ok(IndependenceType::Type2),
            3 => Ok(IndependenceType::Type3),
            _ => Err(SparsityError::UnsupportedType(k)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparsityError {
    #[error("independence type {0} is not supported (use 2 or 3)")]
    UnsupportedType(u8),
    #[error("graph has {n} vertices, above the oracle limit of {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },
    #[error("vertex {0} is not adjacent to every other vertex")]
    NotConeGraph(usize),
    #[error("point-line count needs a connected point graph with at least 4 points")]
    TooFewPoints,
}

/// Outcome of an independence check.
///
/// When `independent` is false the witness is a subgraph violating the
/// bound. When the graph is independent but not maximal the witness is the
/// whole graph, whose freedom number certifies the failed count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityVerdict {
    pub independent: bool,
    pub maximal: bool,
    pub witness: Option<SubgraphRef>,
}

/// Pebble game state: every vertex owns two pebbles, each either free or
/// covering an accepted edge, which is then directed out of that vertex.
struct PebbleGame {
    free: Vec<u8>,
    out: Vec<Vec<usize>>,
}

impl PebbleGame {
    fn new(n: usize) -> Self {
        PebbleGame { free: vec![2; n], out: vec![Vec::new(); n] }
    }

    fn free_on(&self, set: &[usize]) -> usize {
        set.iter().map(|&v| self.free[v] as usize).sum()
    }

    /// Moves one free pebble to `from` along a directed path that avoids
    /// the vertices of `blocked`, reversing the path. Returns false if no
    /// reachable vertex has a free pebble.
    fn pull_pebble(&mut self, from: usize, blocked: &[usize]) -> bool {
        let n = self.free.len();
        let mut parent = vec![usize::MAX; n];
        parent[from] = from;
        for &b in blocked {
            if b != from {
                parent[b] = b;
            }
        }
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.out[x] {
                if parent[y] != usize::MAX {
                    continue;
                }
                parent[y] = x;
                if self.free[y] > 0 {
                    self.free[y] -= 1;
                    self.free[from] += 1;
                    let mut head = y;
                    while head != from {
                        let tail = parent[head];
                        let pos = self.out[tail].iter().position(|&h| h == head).expect("path edge");
                        self.out[tail].swap_remove(pos);
                        self.out[head].push(tail);
                        head = tail;
                    }
                    return true;
                }
                queue.push_back(y);
            }
        }
        false
    }

    /// Gathers free pebbles onto `set` until it holds `target` of them or no
    /// more can be moved in. Returns the number held.
    fn gather(&mut self, set: &[usize], target: usize) -> usize {
        while self.free_on(set) < target {
            let pulled = set
                .iter()
                .any(|&s| self.free[s] < 2 && self.pull_pebble(s, set));
            if !pulled {
                break;
            }
        }
        self.free_on(set)
    }

    /// Vertices reachable from `set` along directed edges, `set` included.
    fn reach(&self, set: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = set.iter().copied().collect();
        let mut stack: Vec<usize> = set.to_vec();
        while let Some(x) = stack.pop() {
            for &y in &self.out[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Accepted edges with both endpoints in `vertices`.
    fn edges_within(&self, vertices: &BTreeSet<usize>) -> BTreeSet<Edge> {
        vertices
            .iter()
            .flat_map(|&x| self.out[x].iter().filter(|y| vertices.contains(y)).map(move |&y| edge(x, y)))
            .collect()
    }

    /// Tries to insert `u -> v`, keeping `ell` pebbles on the pair first.
    fn try_insert(&mut self, u: usize, v: usize, ell: usize) -> bool {
        if self.gather(&[u, v], ell + 1) < ell + 1 {
            return false;
        }
        let (tail, head) = if self.free[u] > 0 { (u, v) } else { (v, u) };
        self.free[tail] -= 1;
        self.out[tail].push(head);
        true
    }

    /// Plays every edge of `g` in order. Returns the first rejected edge.
    fn play(g: &Graph, ell: usize) -> (Self, Option<Edge>) {
        let mut game = PebbleGame::new(g.vertex_count());
        for &(u, v) in g.edges() {
            if !game.try_insert(u, v, ell) {
                return (game, Some((u, v)));
            }
        }
        (game, None)
    }
}

/// Decides type-`k` independence with the pebble game in `O(|V| |E|)`.
///
/// A rejected edge `uv` comes with the region reachable from `{u, v}`, which
/// holds exactly `l` free pebbles, so its accepted edges plus `uv` form a
/// subgraph with freedom number `l - 1`.
pub fn check_type(g: &Graph, k: IndependenceType) -> SparsityVerdict {
    let ell = k.bound() as usize;
    let (game, rejected) = PebbleGame::play(g, ell);
    if let Some((u, v)) = rejected {
        let vertices = game.reach(&[u, v]);
        let mut edges = game.edges_within(&vertices);
        edges.insert((u, v));
        return SparsityVerdict {
            independent: false,
            maximal: false,
            witness: Some(SubgraphRef { vertices, edges }),
        };
    }
    let maximal = g.freedom_number() == k.bound();
    SparsityVerdict {
        independent: true,
        maximal,
        witness: (!maximal).then(|| SubgraphRef::whole(g)),
    }
}

/// Same contract as [`check_type`], by exhaustive search over vertex
/// subsets. For a fixed vertex subset the induced edge set minimizes the
/// freedom number, so only induced subgraphs are inspected.
pub fn check_type_oracle(g: &Graph, k: IndependenceType) -> Result<SparsityVerdict, SparsityError> {
    let n = g.vertex_count();
    if n > ORACLE_LIMIT {
        return Err(SparsityError::SizeLimitExceeded { n, limit: ORACLE_LIMIT });
    }
    let mut worst: Option<(i64, u32)> = None;
    for mask in 1u32..(1 << n) {
        let edges = induced_edge_count(g, mask);
        if k == IndependenceType::Type3 && edges == 0 {
            continue;
        }
        let f = 2 * mask.count_ones() as i64 - edges as i64;
        if f < k.bound() && worst.is_none_or(|(best, _)| f < best) {
            worst = Some((f, mask));
        }
    }
    if let Some((_, mask)) = worst {
        let vertices = (0..n).filter(|&v| mask >> v & 1 == 1);
        return Ok(SparsityVerdict {
            independent: false,
            maximal: false,
            witness: Some(SubgraphRef::induced(g, vertices)),
        });
    }
    let maximal = g.freedom_number() == k.bound();
    Ok(SparsityVerdict {
        independent: true,
        maximal,
        witness: (!maximal).then(|| SubgraphRef::whole(g)),
    })
}

fn induced_edge_count(g: &Graph, mask: u32) -> usize {
    g.edges()
        .iter()
        .filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
        .count()
}

/// Laman: maximally independent of type 3.
pub fn is_laman(g: &Graph) -> bool {
    g.freedom_number() == 3 && check_type(g, IndependenceType::Type3).maximal
}

/// Returns the first edge `e` (in canonical order) with `G \ e` Laman, if
/// `g` is connected, has no degree-1 vertex and such an edge exists.
pub fn is_laman_plus_one(g: &Graph) -> Option<Edge> {
    if g.freedom_number() != 2 || !g.is_connected() || (0..g.vertex_count()).any(|v| g.degree(v) == 1) {
        return None;
    }
    // G \ e is Laman exactly when e lies on the unique dependent circuit,
    // and that circuit only uses edges up to the first rejected one.
    let (_, rejected) = PebbleGame::play(g, 3);
    let first_rejected = rejected?;
    g.edges()
        .iter()
        .copied()
        .take_while(|&e| e <= first_rejected)
        .find(|&(a, b)| is_laman(&g.without_edge(a, b)))
}

/// Smallest type-2-tight vertex set containing `seed`, for a graph that is
/// maximally independent of type 2. Tight sets meeting in a vertex have a
/// tight intersection, so this closure is well defined.
fn tight_closure(game: &mut PebbleGame, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
    let set: Vec<usize> = seed.iter().copied().collect();
    game.gather(&set, 2);
    game.reach(&set)
}

/// A proper, inclusion-maximal subgraph `H` with `f(H) = 2` and at least one
/// edge, or `None` when there is none. Expects `g` maximally independent of
/// type 2; the result is vertex-induced.
///
/// Starting from the lowest edge with a proper closure, the set grows by the
/// lowest outside vertex whose joint closure stays proper, until none does.
pub fn maximal_tight_subgraph(g: &Graph) -> Option<SubgraphRef> {
    let n = g.vertex_count();
    let (mut game, rejected) = PebbleGame::play(g, 2);
    if rejected.is_some() || g.freedom_number() != 2 {
        return None;
    }
    let mut current = g.edges().iter().find_map(|&(a, b)| {
        let closure = tight_closure(&mut game, &BTreeSet::from([a, b]));
        (closure.len() < n).then_some(closure)
    })?;
    'grow: loop {
        for w in (0..n).filter(|w| !current.contains(w)) {
            let mut seed = current.clone();
            seed.insert(w);
            let closure = tight_closure(&mut game, &seed);
            if closure.len() < n {
                current = closure;
                continue 'grow;
            }
        }
        return Some(SubgraphRef::induced(g, current));
    }
}

/// `3|V| - |E| = 6` and `3|V'| - |E'| >= 6` for every subgraph on more than
/// two vertices. This count is not matroidal, so it is checked over all
/// vertex subsets; cost is exponential in `|V|`.
pub fn check_tight_3_6(g: &Graph) -> bool {
    let n = g.vertex_count();
    if 3 * n as i64 - g.edge_count() as i64 != 6 {
        return false;
    }
    assert!(n < 32, "exhaustive (3,6) check supports fewer than 32 vertices");
    (1u32..(1 << n))
        .filter(|mask| mask.count_ones() > 2)
        .all(|mask| 3 * mask.count_ones() as i64 - induced_edge_count(g, mask) as i64 >= 6)
}

/// The point-line count for a cone graph whose apex `line_vertex` stands for
/// a single line and every other vertex for a point: `3|V_p| + 4 - |E| = 6`
/// together with the subgraph inequalities. Both reduce to the point graph
/// being maximally independent of type 2.
pub fn check_point_line(g: &Graph, line_vertex: usize) -> Result<bool, SparsityError> {
    let n = g.vertex_count();
    if line_vertex >= n || g.degree(line_vertex) != n - 1 {
        return Err(SparsityError::NotConeGraph(line_vertex));
    }
    let points = g.without_vertex(line_vertex);
    if points.vertex_count() < 4 || !points.is_connected() {
        return Err(SparsityError::TooFewPoints);
    }
    let count = 3 * points.vertex_count() as i64 + 4 - g.edge_count() as i64;
    Ok(count == 6 && check_type(&points, IndependenceType::Type2).independent)
}
