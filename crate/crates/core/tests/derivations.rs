use std::sync::OnceLock;

use surface_rigidity::enumerate::connected_graphs_where;
use surface_rigidity::graph::Graph;
use surface_rigidity::iso::are_isomorphic;
use surface_rigidity::moves::{
    classify_type2, derive_laman_labeled, derive_laman_plus_one_labeled, derive_type2_labeled, henneberg1,
    henneberg2, replay, Move, Type2Reduction,
};
use surface_rigidity::sparsity::{check_type, is_laman, is_laman_plus_one, IndependenceType};

/// Connected graphs on at most eight vertices that are independent of type 2.
fn type2_sparse() -> &'static [Graph] {
    static CELL: OnceLock<Vec<Graph>> = OnceLock::new();
    CELL.get_or_init(|| connected_graphs_where(8, |g| check_type(g, IndependenceType::Type2).independent))
}

fn type2_maximal() -> impl Iterator<Item = &'static Graph> {
    type2_sparse().iter().filter(|g| g.freedom_number() == 2)
}

fn laman() -> impl Iterator<Item = &'static Graph> {
    type2_sparse().iter().filter(|g| is_laman(g))
}

fn freedom_preserved(seq_base: Graph, steps: &[Move]) {
    let mut g = seq_base;
    for m in steps {
        let next = m.apply(&g).unwrap();
        assert_eq!(next.freedom_number(), g.freedom_number());
        g = next;
    }
}

#[test]
fn every_type2_maximal_graph_derives() {
    let mut count = 0;
    for g in type2_maximal() {
        let d = derive_type2_labeled(g).unwrap();
        assert_eq!(d.relabeled_replay().unwrap(), *g);
        assert!(are_isomorphic(&replay(&d.sequence).unwrap(), g).unwrap());
        freedom_preserved(d.sequence.base.graph(), &d.sequence.steps);
        count += 1;
    }
    assert!(count > 100, "{count}");
}

#[test]
fn every_laman_graph_derives_from_k2() {
    for g in laman() {
        let d = derive_laman_labeled(g).unwrap();
        assert_eq!(d.relabeled_replay().unwrap(), *g);
        assert!(d.sequence.steps.iter().all(|m| !matches!(m, Move::SubgraphExtension { .. })));
    }
}

#[test]
fn every_laman_plus_one_graph_derives_from_k4() {
    for g in type2_maximal().filter(|g| is_laman_plus_one(g).is_some()) {
        let d = derive_laman_plus_one_labeled(g).unwrap();
        assert_eq!(d.relabeled_replay().unwrap(), *g);
        let mut current = d.sequence.base.graph();
        for m in &d.sequence.steps {
            current = m.apply(&current).unwrap();
            assert!(is_laman_plus_one(&current).is_some());
        }
    }
}

#[test]
fn laman_graphs_without_degree_two_have_six_degree_three_vertices() {
    for g in laman().filter(|g| g.vertex_count() > 2) {
        let degrees = g.degree_sequence();
        if !degrees.contains(&2) {
            assert!(degrees.iter().filter(|&&d| d == 3).count() >= 6, "{g:?}");
        }
    }
}

#[test]
fn henneberg_moves_preserve_maximal_independence() {
    for k in [IndependenceType::Type2, IndependenceType::Type3] {
        for g in type2_sparse().iter().filter(|g| g.vertex_count() <= 6 && check_type(g, k).maximal) {
            let n = g.vertex_count();
            for a in 0..n {
                for b in a + 1..n {
                    assert!(check_type(&henneberg1(g, a, b).unwrap(), k).maximal);
                }
            }
            for &(i, j) in g.edges() {
                for third in (0..n).filter(|&t| t != i && t != j) {
                    let h = henneberg2(g, (i, j), third).unwrap();
                    assert!(check_type(&h, k).maximal);
                    assert_eq!(h.freedom_number(), g.freedom_number());
                }
            }
        }
    }
}

#[test]
fn ghost_edge_branch_when_other_cases_fail() {
    for g in type2_maximal() {
        if let Type2Reduction::Henneberg2 { vertex, ghost, predecessor } = classify_type2(g).unwrap() {
            assert!(check_type(&predecessor, IndependenceType::Type2).maximal);
            let rebuilt = henneberg2(&predecessor, ghost, {
                let shift = |x: usize| if x > vertex { x - 1 } else { x };
                g.neighbors(vertex).iter().map(|&x| shift(x)).find(|&x| x != ghost.0 && x != ghost.1).unwrap()
            })
            .unwrap();
            assert!(are_isomorphic(&rebuilt, g).unwrap());
        }
    }
}
