use num_traits::Zero;
use proptest::prelude::*;

use surface_rigidity::enumerate::connected_graphs;
use surface_rigidity::linalg::{rank_exact, rank_float, DEFAULT_TOL_REL};
use surface_rigidity::moves::{henneberg1, henneberg2};
use surface_rigidity::rigidity::{
    analyze, generic_analyze, relative_rigidity_matrix, round_robin_assignment, sample_framework, FlexBasis, Framework,
};
use surface_rigidity::surfaces::SurfaceFamily;
use surface_rigidity::Graph;

fn families() -> Vec<SurfaceFamily> {
    vec![
        SurfaceFamily::planes(&[0, 1]).unwrap(),
        SurfaceFamily::spheres(&[1, 2]).unwrap(),
        SurfaceFamily::cylinders(&[1, 2]).unwrap(),
    ]
}

fn sample(g: &Graph, s: &SurfaceFamily, seed: u64) -> Framework {
    sample_framework(g, s, &round_robin_assignment(g.vertex_count(), s), seed, 0).unwrap()
}

#[test]
fn flex_bases_satisfy_every_constraint_exactly() {
    for s in families() {
        for g in connected_graphs(5) {
            let f = sample(&g, &s, 17);
            let report = analyze(&f).unwrap();
            let FlexBasis::Exact(basis) = &report.flex_basis else { panic!("exact basis expected") };
            assert_eq!(basis.len(), report.nullity);
            for u in basis {
                for &(i, j) in g.edges() {
                    let dot = (0..3).fold(num_rational::BigRational::zero(), |acc, k| {
                        acc + (&u[3 * i + k] - &u[3 * j + k]) * (&f.points[i][k] - &f.points[j][k])
                    });
                    assert!(dot.is_zero());
                }
                for v in 0..g.vertex_count() {
                    let grad = s.h_gradient(f.assignment[v], &f.points[v]).unwrap();
                    let dot = (0..3).fold(num_rational::BigRational::zero(), |acc, k| acc + &u[3 * v + k] * &grad[k]);
                    assert!(dot.is_zero());
                }
            }
        }
    }
}

#[test]
fn isostatic_graphs_lose_rank_on_every_edge_deletion() {
    for s in families() {
        for g in connected_graphs(5) {
            let assignment = round_robin_assignment(g.vertex_count(), &s);
            let report = generic_analyze(&g, &s, &assignment, 3, 4).unwrap();
            if !report.isostatic {
                continue;
            }
            assert_eq!(report.rank, 3 * g.vertex_count() - s.ambient_dof());
            assert_eq!(g.freedom_number(), s.ambient_dof() as i64);
            for &(a, b) in g.edges() {
                let smaller = generic_analyze(&g.without_edge(a, b), &s, &assignment, 3, 4).unwrap();
                assert_eq!(smaller.rank + 1, report.rank, "{g:?} minus {a}-{b}");
            }
        }
    }
}

#[test]
fn henneberg_moves_keep_cylinder_frameworks_isostatic() {
    let s = SurfaceFamily::cylinders(&[1]).unwrap();
    let k4 = Graph::complete(4);
    let mut graphs = vec![henneberg1(&k4, 0, 1).unwrap(), henneberg2(&k4, (0, 1), 2).unwrap()];
    graphs.push(henneberg2(&graphs[0], (0, 4), 3).unwrap());
    graphs.push(henneberg1(&graphs[1], 3, 4).unwrap());
    for g in graphs {
        let report = generic_analyze(&g, &s, &vec![0; g.vertex_count()], 3, 8).unwrap();
        assert!(report.isostatic, "{g:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nullity_is_at_least_the_ambient_dof(index in 0usize..29, family in 0usize..3, seed in any::<u64>()) {
        let graphs = connected_graphs(5);
        let g = &graphs[index % graphs.len()];
        let s = &families()[family];
        let report = analyze(&sample(g, s, seed)).unwrap();
        prop_assert!(report.nullity >= report.rigid_motion_dim);
        // A lone joint only has the two tangent directions of its sheet.
        if g.vertex_count() >= 2 {
            prop_assert!(report.nullity >= s.ambient_dof());
            prop_assert!(report.rigid_motion_dim >= s.ambient_dof());
        } else {
            prop_assert_eq!(report.nullity, 2);
        }
        prop_assert_eq!(report.infinitesimally_rigid, report.nullity == s.ambient_dof());
    }

    #[test]
    fn exact_and_float_ranks_agree(index in 0usize..29, family in 0usize..3, seed in any::<u64>()) {
        let graphs = connected_graphs(5);
        let g = &graphs[index % graphs.len()];
        let m = relative_rigidity_matrix(&sample(g, &families()[family], seed)).unwrap();
        prop_assert_eq!(rank_exact(&m.rows), rank_float(&m.to_float(), DEFAULT_TOL_REL));
    }

    #[test]
    fn adding_an_edge_never_lowers_the_rank(index in 0usize..29, family in 0usize..3, seed in any::<u64>(), pick in any::<usize>()) {
        let graphs = connected_graphs(5);
        let g = &graphs[index % graphs.len()];
        let n = g.vertex_count();
        let missing: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !g.has_edge(i, j)).collect();
        prop_assume!(!missing.is_empty());
        let (a, b) = missing[pick % missing.len()];
        let f = sample(g, &families()[family], seed);
        let bigger = Framework { graph: g.with_edge(a, b).unwrap(), ..f.clone() };
        let r0 = rank_exact(&relative_rigidity_matrix(&f).unwrap().rows);
        let r1 = rank_exact(&relative_rigidity_matrix(&bigger).unwrap().rows);
        prop_assert!(r1 == r0 || r1 == r0 + 1);
    }
}
