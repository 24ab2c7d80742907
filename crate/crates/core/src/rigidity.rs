//! Rigidity matrices of frameworks on surfaces and the rank tests built on
//! them.
//!
//! The relative rigidity matrix has one row per edge, holding `p_i - p_j`
//! and `p_j - p_i` in the columns of the two endpoints, followed by one row
//! per vertex holding half the sheet gradient. Its kernel is the space of
//! infinitesimal flexes that keep every joint on its sheet.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{contract, Graph, GraphError, GraphJson, SubgraphRef};
use crate::linalg::{kernel_exact, kernel_float, rank_exact, rank_float, to_float_matrix};
use crate::sparsity::{check_type, IndependenceType};
use crate::surfaces::{parse_rational, to_f64, ExactPoint, SurfaceError, SurfaceFamily, SurfaceJson, SurfaceKind};

/// Default number of random placements probed by [`generic_analyze`].
pub const DEFAULT_TRIALS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigidityError {
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point of vertex {0} is not on its assigned sheet")]
    PointOffSurface(usize),
    #[error("vertices {0} and {1} are placed at the same point")]
    CoincidentPoints(usize, usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A graph placed on a surface, one exact point per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Framework {
    pub graph: Graph,
    pub surface: SurfaceFamily,
    pub assignment: Vec<usize>,
    pub points: Vec<ExactPoint>,
}

impl Framework {
    pub fn new(
        graph: Graph,
        surface: SurfaceFamily,
        assignment: Vec<usize>,
        points: Vec<ExactPoint>,
    ) -> Result<Self, RigidityError> {
        let f = Framework { graph, surface, assignment, points };
        f.validate()?;
        Ok(f)
    }

    /// Checks counts, sheet membership and that points are distinct.
    pub fn validate(&self) -> Result<(), RigidityError> {
        let n = self.graph.vertex_count();
        for len in [self.assignment.len(), self.points.len()] {
            if len != n {
                return Err(RigidityError::DimensionMismatch { expected: n, found: len });
            }
        }
        for (v, (p, &sheet)) in self.points.iter().zip(&self.assignment).enumerate() {
            if !self.surface.h_value(sheet, p)?.is_zero() {
                return Err(RigidityError::PointOffSurface(v));
            }
        }
        for i in 0..n {
            for j in 0..i {
                if self.points[i] == self.points[j] {
                    return Err(RigidityError::CoincidentPoints(j, i));
                }
            }
        }
        Ok(())
    }

    pub fn float_points(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(|p| [to_f64(&p[0]), to_f64(&p[1]), to_f64(&p[2])]).collect()
    }

    /// The same placement with every pair of vertices joined.
    pub fn complete(&self) -> Framework {
        Framework { graph: Graph::complete(self.graph.vertex_count()), ..self.clone() }
    }

    pub fn to_json(&self) -> FrameworkJson {
        FrameworkJson {
            graph: self.graph.to_json(),
            surface: SurfaceJson::from(&self.surface),
            assignment: self.assignment.clone(),
            points: self.points.iter().map(|p| p.clone().map(|c| c.to_string())).collect(),
        }
    }
}

/// Wire form of a framework; coordinates are rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkJson {
    pub graph: GraphJson,
    pub surface: SurfaceJson,
    pub assignment: Vec<usize>,
    pub points: Vec<[String; 3]>,
}

impl TryFrom<FrameworkJson> for Framework {
    type Error = RigidityError;

    fn try_from(json: FrameworkJson) -> Result<Self, Self::Error> {
        let graph = Graph::try_from(json.graph)?;
        let surface = SurfaceFamily::try_from(json.surface)?;
        let points = json
            .points
            .iter()
            .map(|p| -> Result<ExactPoint, SurfaceError> {
                Ok([parse_rational(&p[0])?, parse_rational(&p[1])?, parse_rational(&p[2])?])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Framework::new(graph, surface, json.assignment, points)
    }
}

impl Serialize for Framework {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Framework {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Framework::try_from(FrameworkJson::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// What a matrix row constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowLabel {
    Edge(usize, usize),
    Surface(usize),
}

impl std::fmt::Display for RowLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowLabel::Edge(a, b) => write!(f, "edge {a}-{b}"),
            RowLabel::Surface(v) => write!(f, "sheet {v}"),
        }
    }
}

/// The `(|E| + |V|) x 3|V|` relative rigidity matrix, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeRigidityMatrix {
    pub rows: Vec<Vec<BigRational>>,
    pub row_labels: Vec<RowLabel>,
    pub columns: usize,
}

impl RelativeRigidityMatrix {
    pub fn to_float(&self) -> DMatrix<f64> {
        to_float_matrix(&self.rows, self.columns)
    }

    /// CSV with a header of column names `x0, y0, z0, x1, ...` and one
    /// labeled line per row; entries are exact rational strings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for v in 0..self.columns / 3 {
            write!(out, ",x{v},y{v},z{v}").expect("writing to a string");
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.rows) {
            out.push_str(&label.to_string());
            for x in row {
                write!(out, ",{x}").expect("writing to a string");
            }
            out.push('\n');
        }
        out
    }
}

/// Edge rows of the usual rigidity matrix in dimension `dim`.
pub fn free_rigidity_matrix(g: &Graph, points: &[Vec<BigRational>], dim: usize) -> Result<Vec<Vec<BigRational>>, RigidityError> {
    let n = g.vertex_count();
    if points.len() != n {
        return Err(RigidityError::DimensionMismatch { expected: n, found: points.len() });
    }
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(RigidityError::DimensionMismatch { expected: dim, found: bad.len() });
    }
    Ok(g.edges()
        .iter()
        .map(|&(i, j)| {
            let mut row = vec![BigRational::zero(); dim * n];
            for k in 0..dim {
                let d = &points[i][k] - &points[j][k];
                row[dim * j + k] = -d.clone();
                row[dim * i + k] = d;
            }
            row
        })
        .collect())
}

pub fn relative_rigidity_matrix(f: &Framework) -> Result<RelativeRigidityMatrix, RigidityError> {
    f.validate()?;
    let n = f.graph.vertex_count();
    let points: Vec<Vec<BigRational>> = f.points.iter().map(|p| p.to_vec()).collect();
    let mut rows = free_rigidity_matrix(&f.graph, &points, 3)?;
    let mut row_labels: Vec<RowLabel> = f.graph.edges().iter().map(|&(a, b)| RowLabel::Edge(a, b)).collect();
    let half = BigRational::new(1.into(), 2.into());
    for v in 0..n {
        let gradient = f.surface.h_gradient(f.assignment[v], &f.points[v])?;
        let mut row = vec![BigRational::zero(); 3 * n];
        for k in 0..3 {
            row[3 * v + k] = &gradient[k] * &half;
        }
        rows.push(row);
        row_labels.push(RowLabel::Surface(v));
    }
    Ok(RelativeRigidityMatrix { rows, row_labels, columns: 3 * n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Float,
}

/// A basis of the kernel of the relative rigidity matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum FlexBasis {
    Exact(Vec<Vec<BigRational>>),
    Float(Vec<Vec<f64>>),
}

impl FlexBasis {
    pub fn len(&self) -> usize {
        match self {
            FlexBasis::Exact(b) => b.len(),
            FlexBasis::Float(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Serialize for FlexBasis {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            FlexBasis::Exact(b) => b
                .iter()
                .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .serialize(serializer),
            FlexBasis::Float(b) => b.serialize(serializer),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityReport {
    pub rank: usize,
    /// `dim ker R(G, p, M)` at the analyzed placement.
    pub nullity: usize,
    pub ambient_dof: usize,
    pub infinitesimally_rigid: bool,
    pub isostatic: bool,
    pub method: Method,
    pub samples_used: usize,
    /// `dim ker R(K_n, p, M)`: the rigid-motion flexes at this placement.
    pub rigid_motion_dim: usize,
    /// Set when random placements gave different ranks, so some of them
    /// were not generic.
    pub irregular_suspected: bool,
    pub flex_basis: FlexBasis,
}

fn build_report(f: &Framework, rank: usize, rigid_motion_rank: usize, method: Method, flex_basis: FlexBasis) -> RigidityReport {
    let n = f.graph.vertex_count();
    let nullity = 3 * n - rank;
    let dof = f.surface.ambient_dof();
    let rigid = nullity == dof;
    let count_matches = f.graph.freedom_number() == dof as i64;
    RigidityReport {
        rank,
        nullity,
        ambient_dof: dof,
        infinitesimally_rigid: rigid,
        isostatic: rigid && count_matches,
        method,
        samples_used: 1,
        rigid_motion_dim: 3 * n - rigid_motion_rank,
        irregular_suspected: false,
        flex_basis,
    }
}

/// Exact analysis at the given placement.
pub fn analyze(f: &Framework) -> Result<RigidityReport, RigidityError> {
    let m = relative_rigidity_matrix(f)?;
    let rank = rank_exact(&m.rows);
    let rigid_motion_rank = rank_exact(&relative_rigidity_matrix(&f.complete())?.rows);
    let basis = kernel_exact(&m.rows, m.columns);
    Ok(build_report(f, rank, rigid_motion_rank, Method::Exact, FlexBasis::Exact(basis)))
}

/// Floating-point analysis: ranks from singular values with relative
/// tolerance `tol_rel`, flexes from the smallest right singular vectors.
pub fn analyze_float(f: &Framework, tol_rel: f64) -> Result<RigidityReport, RigidityError> {
    let m = relative_rigidity_matrix(f)?.to_float();
    let rank = rank_float(&m, tol_rel);
    let rigid_motion_rank = rank_float(&relative_rigidity_matrix(&f.complete())?.to_float(), tol_rel);
    let basis = kernel_float(&m, m.ncols() - rank).into_iter().map(|v| v.iter().copied().collect()).collect();
    Ok(build_report(f, rank, rigid_motion_rank, Method::Float, FlexBasis::Float(basis)))
}

/// Random exact placement number `trial` for a given seed. Each trial reads
/// its own ChaCha stream, so trials are independent of evaluation order.
pub fn sample_framework(
    g: &Graph,
    surface: &SurfaceFamily,
    assignment: &[usize],
    seed: u64,
    trial: usize,
) -> Result<Framework, RigidityError> {
    if assignment.len() != g.vertex_count() {
        return Err(RigidityError::DimensionMismatch { expected: g.vertex_count(), found: assignment.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let points = surface.sample_configuration(assignment, &mut rng)?;
    Framework::new(g.clone(), surface.clone(), assignment.to_vec(), points)
}

/// Generic rank probe: exact ranks at `trials` random placements, reporting
/// on the placement of largest rank (lowest trial index on ties). Rank is
/// lower semicontinuous, so the maximum is a lower bound on the generic rank.
pub fn generic_analyze_with_framework(
    g: &Graph,
    surface: &SurfaceFamily,
    assignment: &[usize],
    trials: usize,
    seed: u64,
) -> Result<(RigidityReport, Framework), RigidityError> {
    if trials == 0 {
        return Err(RigidityError::NoTrials);
    }
    let probes: Vec<Result<(usize, Framework), RigidityError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = sample_framework(g, surface, assignment, seed, t)?;
            let rank = rank_exact(&relative_rigidity_matrix(&f)?.rows);
            Ok((rank, f))
        })
        .collect();
    let probes = probes.into_iter().collect::<Result<Vec<_>, _>>()?;
    let best = probes
        .iter()
        .enumerate()
        .max_by(|(i, (ra, _)), (j, (rb, _))| ra.cmp(rb).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("at least one trial");
    let (_, framework) = probes[best].clone();
    let mut report = analyze(&framework)?;
    report.samples_used = trials;
    report.irregular_suspected = probes.iter().any(|(r, _)| *r != probes[0].0);
    Ok((report, framework))
}

pub fn generic_analyze(
    g: &Graph,
    surface: &SurfaceFamily,
    assignment: &[usize],
    trials: usize,
    seed: u64,
) -> Result<RigidityReport, RigidityError> {
    generic_analyze_with_framework(g, surface, assignment, trials, seed).map(|(r, _)| r)
}

/// Sheet assignment cycling through the sheets by vertex index.
pub fn round_robin_assignment(n: usize, surface: &SurfaceFamily) -> Vec<usize> {
    (0..n).map(|v| v % surface.sheet_count()).collect()
}

/// Numerical check of the extension property on cylinders: `H`, `G/H` and
/// `G` are all generically isostatic. `embedding[i]` is the vertex of `g`
/// carrying vertex `i` of `h`.
pub fn verify_extension_lemma(
    h: &Graph,
    g: &Graph,
    embedding: &[usize],
    surface: &SurfaceFamily,
    seed: u64,
) -> Result<bool, RigidityError> {
    let fail = |msg: &str| Err(RigidityError::Precondition(msg.to_string()));
    if surface.kind() != SurfaceKind::Cylinders {
        return fail("the surface must be a union of concentric cylinders");
    }
    if embedding.len() != h.vertex_count() {
        return fail("embedding must map every vertex of H");
    }
    let image: std::collections::BTreeSet<usize> = embedding.iter().copied().collect();
    if image.len() != embedding.len() || embedding.iter().any(|&v| v >= g.vertex_count()) {
        return fail("embedding must be injective into G");
    }
    for i in 0..h.vertex_count() {
        for j in 0..i {
            if h.has_edge(i, j) != g.has_edge(embedding[i], embedding[j]) {
                return fail("H must be a vertex-induced subgraph of G");
            }
        }
    }
    let quotient = contract(g, &SubgraphRef::induced(g, image)).map_err(|e| RigidityError::Precondition(e.to_string()))?;
    let graphs = [h, &quotient.graph, g];
    if !graphs.iter().all(|x| check_type(x, IndependenceType::Type2).maximal) {
        return fail("H, G/H and G must all be maximally independent of type 2");
    }
    for x in graphs {
        let assignment = round_robin_assignment(x.vertex_count(), surface);
        if !generic_analyze(x, surface, &assignment, DEFAULT_TRIALS, seed)?.isostatic {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact dot product helper used by tests and callers checking flexes.
pub fn exact_dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::parse_rational;

    fn pt(coords: [&str; 3]) -> ExactPoint {
        coords.map(|c| parse_rational(c).unwrap())
    }

    fn cylinder() -> SurfaceFamily {
        SurfaceFamily::cylinders(&[1]).unwrap()
    }

    #[test]
    fn free_matrix_single_edge() {
        let g = Graph::complete(2);
        let p = vec![vec![parse_rational("0").unwrap(), parse_rational("0").unwrap()], vec![
            parse_rational("1").unwrap(),
            parse_rational("0").unwrap(),
        ]];
        let m = free_rigidity_matrix(&g, &p, 2).unwrap();
        let expected: Vec<BigRational> = ["-1", "0", "1", "0"].iter().map(|x| parse_rational(x).unwrap()).collect();
        assert_eq!(m, vec![expected]);
        assert!(matches!(free_rigidity_matrix(&g, &p[..1], 2), Err(RigidityError::DimensionMismatch { .. })));
    }

    #[test]
    fn free_matrix_triangles() {
        let g = Graph::complete(3);
        let generic: Vec<Vec<BigRational>> =
            [["0", "0"], ["1", "0"], ["1/3", "2"]].iter().map(|p| p.iter().map(|x| parse_rational(x).unwrap()).collect()).collect();
        assert_eq!(rank_exact(&free_rigidity_matrix(&g, &generic, 2).unwrap()), 3);
        let colinear: Vec<Vec<BigRational>> =
            [["0", "0"], ["1", "0"], ["2", "0"]].iter().map(|p| p.iter().map(|x| parse_rational(x).unwrap()).collect()).collect();
        assert_eq!(rank_exact(&free_rigidity_matrix(&g, &colinear, 2).unwrap()), 2);
    }

    #[test]
    fn k2_matrix_on_cylinder() {
        let f = Framework::new(Graph::complete(2), cylinder(), vec![0, 0], vec![pt(["1", "0", "0"]), pt(["0", "1", "1"])]).unwrap();
        let m = relative_rigidity_matrix(&f).unwrap();
        assert_eq!((m.rows.len(), m.columns), (3, 6));
        let row = |xs: [&str; 6]| xs.map(|x| parse_rational(x).unwrap()).to_vec();
        assert_eq!(m.rows[0], row(["1", "-1", "-1", "-1", "1", "1"]));
        assert_eq!(m.rows[1], row(["1", "0", "0", "0", "0", "0"]));
        assert_eq!(m.rows[2], row(["0", "0", "0", "0", "1", "0"]));
        assert!(m.to_csv().starts_with("row,x0,y0,z0,x1,y1,z1\nedge 0-1,1,-1,-1,-1,1,1\n"));
    }

    #[test]
    fn off_surface_points_are_rejected() {
        let result = Framework::new(Graph::complete(2), cylinder(), vec![0, 0], vec![pt(["1", "0", "0"]), pt(["2", "0", "0"])]);
        assert_eq!(result, Err(RigidityError::PointOffSurface(1)));
    }

    #[test]
    fn k4_shape_and_cylinder_rank() {
        let g = Graph::complete(4);
        let s = cylinder();
        let (report, f) = generic_analyze_with_framework(&g, &s, &[0; 4], 3, 0).unwrap();
        assert_eq!(relative_rigidity_matrix(&f).unwrap().rows.len(), 10);
        assert_eq!((report.rank, report.nullity), (10, 2));
        assert!(report.isostatic);
    }

    #[test]
    fn surface_rows_force_tangent_flexes() {
        let s = SurfaceFamily::spheres(&[1, 2]).unwrap();
        let f = sample_framework(&Graph::complete(4).without_edge(0, 1), &s, &[0, 1, 0, 1], 5, 0).unwrap();
        let report = analyze(&f).unwrap();
        let FlexBasis::Exact(basis) = &report.flex_basis else { panic!("exact basis expected") };
        assert_eq!(basis.len(), report.nullity);
        for u in basis {
            for v in 0..4 {
                let grad = s.h_gradient(f.assignment[v], &f.points[v]).unwrap();
                assert!(exact_dot(&u[3 * v..3 * v + 3], &grad).is_zero());
            }
        }
    }

    #[test]
    fn sphere_and_plane_examples() {
        let spheres = SurfaceFamily::spheres(&[1]).unwrap();
        let k4 = generic_analyze(&Graph::complete(4), &spheres, &[0; 4], 3, 1).unwrap();
        assert_eq!((k4.rank, k4.nullity, k4.isostatic), (9, 3, false));
        assert!(k4.infinitesimally_rigid);
        let kite = generic_analyze(&Graph::complete(4).without_edge(0, 1), &spheres, &[0; 4], 3, 1).unwrap();
        assert!(kite.isostatic);
        let planes = SurfaceFamily::planes(&[0]).unwrap();
        let triangle = generic_analyze(&Graph::complete(3), &planes, &[0; 3], 3, 1).unwrap();
        assert_eq!(triangle.nullity, 3);
        assert!(triangle.isostatic);
    }

    #[test]
    fn generic_analyze_is_deterministic() {
        let s = cylinder();
        let g = Graph::cycle(5);
        let a = generic_analyze_with_framework(&g, &s, &[0; 5], 4, 9).unwrap();
        let b = generic_analyze_with_framework(&g, &s, &[0; 5], 4, 9).unwrap();
        assert_eq!(a.1, b.1);
        assert_eq!(a.0.samples_used, 4);
        assert_eq!(generic_analyze(&g, &s, &[0; 5], 0, 9), Err(RigidityError::NoTrials));
    }

    #[test]
    fn float_analysis_agrees() {
        let s = SurfaceFamily::parse(SurfaceKind::Cylinders, &["1", "3/2"]).unwrap();
        let f = sample_framework(&Graph::complete(4), &s, &[0, 1, 0, 1], 2, 0).unwrap();
        let exact = analyze(&f).unwrap();
        let float = analyze_float(&f, crate::linalg::DEFAULT_TOL_REL).unwrap();
        assert_eq!(exact.rank, float.rank);
        assert_eq!(float.flex_basis.len(), float.nullity);
        assert_eq!(float.method, Method::Float);
    }

    #[test]
    fn framework_json_round_trip() {
        let f = sample_framework(&Graph::complete(3), &cylinder(), &[0; 3], 4, 0).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: Framework = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let mut json = f.to_json();
        json.points[0] = ["5".into(), "0".into(), "0".into()];
        assert_eq!(Framework::try_from(json), Err(RigidityError::PointOffSurface(0)));
    }

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

    #[test]
    fn extension_lemma_examples() {
        let s = cylinder();
        assert_eq!(verify_extension_lemma(&Graph::complete(4), &two_k4_at_vertex(), &[0, 1, 2, 3], &s, 0), Ok(true));
        let bad = verify_extension_lemma(&Graph::complete(3), &Graph::complete(4), &[0, 1, 2], &s, 0);
        assert!(matches!(bad, Err(RigidityError::Precondition(_))));
        let spheres = SurfaceFamily::spheres(&[1]).unwrap();
        assert!(matches!(
            verify_extension_lemma(&Graph::complete(4), &two_k4_at_vertex(), &[0, 1, 2, 3], &spheres, 0),
            Err(RigidityError::Precondition(_))
        ));
    }
}
