//! Numerical continuation of finite flexes of frameworks on surfaces.
//!
//! A flex is traced by predictor-corrector steps: move along a kernel vector
//! of the rigidity matrix that is orthogonal to the rigid-motion flexes, then
//! Newton-correct back onto the edge-length and surface equations.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::{kernel_float, least_squares, rank_float, DEFAULT_TOL_REL};
use crate::rigidity::{Framework, RigidityError};
use crate::surfaces::{SurfaceError, SurfaceFamily};

/// Newton stops once edge and surface residuals are below this times scale.
pub const CORRECTION_TOL: f64 = 1e-12;
pub const MAX_CORRECTIONS: usize = 25;
/// Number of times the step size is halved before giving up.
pub const MAX_HALVINGS: u32 = 6;
/// Allowed edge-length drift along a path, relative to scale.
pub const EDGE_TOL: f64 = 1e-9;
/// Allowed `|h|` along a path, relative to scale.
pub const SURFACE_TOL: f64 = 1e-12;
/// A non-edge distance must change by more than this to count as a witness.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

/// Below this norm a projected kernel vector is treated as zero.
const DIRECTION_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlexError {
    #[error("every infinitesimal flex is a rigid motion")]
    NoNontrivialFlex,
    #[error("Newton correction failed at step {step}")]
    CorrectionDiverged { step: usize },
    #[error("step size must be positive and finite")]
    InvalidStepSize,
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Samples `p(0), p(t_1), ...` of a traced flex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexPath {
    pub samples: Vec<Vec<[f64; 3]>>,
    pub step_size: f64,
    pub max_edge_error: f64,
    pub max_surface_error: f64,
}

impl FlexPath {
    /// One line per sample and vertex: `step,vertex,x,y,z`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,vertex,x,y,z\n");
        for (step, sample) in self.samples.iter().enumerate() {
            for (v, p) in sample.iter().enumerate() {
                writeln!(out, "{step},{v},{},{},{}", p[0], p[1], p[2]).expect("writing to a string");
            }
        }
        out
    }
}

/// A non-edge pair whose distance changed along a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoncongruenceWitness {
    pub pair: (usize, usize),
    pub delta: f64,
}

pub fn default_step_size(surface: &SurfaceFamily) -> f64 {
    0.01 * surface.scale()
}

fn flatten(points: &[[f64; 3]]) -> DVector<f64> {
    DVector::from_iterator(3 * points.len(), points.iter().flatten().copied())
}

fn unflatten(x: &DVector<f64>) -> Vec<[f64; 3]> {
    x.as_slice().chunks(3).map(|c| [c[0], c[1], c[2]]).collect()
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// The constraint system of a framework evaluated at float positions.
struct Constraints<'a> {
    edges: &'a [(usize, usize)],
    lengths: Vec<f64>,
    surface: &'a SurfaceFamily,
    assignment: &'a [usize],
    scale: f64,
}

impl<'a> Constraints<'a> {
    fn new(graph: &'a Graph, surface: &'a SurfaceFamily, assignment: &'a [usize], start: &[[f64; 3]]) -> Self {
        let edges = graph.edges();
        let lengths = edges.iter().map(|&(i, j)| distance(&start[i], &start[j])).collect();
        Constraints { edges, lengths, surface, assignment, scale: surface.scale() }
    }

    /// Rigidity matrix rows for the given pairs plus one surface row per
    /// vertex, with the same scaling as the exact matrix.
    fn jacobian(&self, pairs: &[(usize, usize)], p: &[[f64; 3]]) -> Result<DMatrix<f64>, FlexError> {
        let n = p.len();
        let mut m = DMatrix::zeros(pairs.len() + n, 3 * n);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..3 {
                let d = p[i][k] - p[j][k];
                m[(row, 3 * i + k)] = d;
                m[(row, 3 * j + k)] = -d;
            }
        }
        for v in 0..n {
            let g = self.surface.h_gradient_f64(self.assignment[v], &p[v])?;
            for k in 0..3 {
                m[(pairs.len() + v, 3 * v + k)] = 0.5 * g[k];
            }
        }
        Ok(m)
    }

    /// Residuals whose Jacobian is [`Self::jacobian`] on the edges.
    fn residual(&self, p: &[[f64; 3]]) -> Result<DVector<f64>, FlexError> {
        let mut r = Vec::with_capacity(self.edges.len() + p.len());
        for (&(i, j), l) in self.edges.iter().zip(&self.lengths) {
            r.push(0.5 * (distance(&p[i], &p[j]).powi(2) - l * l));
        }
        for (v, q) in p.iter().enumerate() {
            r.push(0.5 * self.surface.h_value_f64(self.assignment[v], q)?);
        }
        Ok(DVector::from_vec(r))
    }

    /// Largest edge-length drift and largest `|h|`.
    fn errors(&self, p: &[[f64; 3]]) -> Result<(f64, f64), FlexError> {
        let edge = self.edges.iter().zip(&self.lengths).map(|(&(i, j), l)| (distance(&p[i], &p[j]) - l).abs()).fold(0.0, f64::max);
        let mut surface = 0.0f64;
        for (v, q) in p.iter().enumerate() {
            surface = surface.max(self.surface.h_value_f64(self.assignment[v], q)?.abs());
        }
        Ok((edge, surface))
    }

    fn correct(&self, start: DVector<f64>) -> Option<Vec<[f64; 3]>> {
        let mut x = start;
        for _ in 0..MAX_CORRECTIONS {
            let p = unflatten(&x);
            let (edge, surface) = self.errors(&p).ok()?;
            if edge <= CORRECTION_TOL * self.scale && surface <= CORRECTION_TOL * self.scale {
                return Some(p);
            }
            let j = self.jacobian(self.edges, &p).ok()?;
            let dx = least_squares(&j, &self.residual(&p).ok()?);
            if !dx.iter().all(|v| v.is_finite()) {
                return None;
            }
            x -= dx;
        }
        None
    }
}

/// Orthonormal basis of the infinitesimal flexes, and of the rigid-motion
/// flexes, at `p`.
struct FlexSpaces {
    flexes: Vec<DVector<f64>>,
    motions: Vec<DVector<f64>>,
}

impl FlexSpaces {
    fn at(c: &Constraints, complete: &[(usize, usize)], p: &[[f64; 3]], nullity: usize, motion_dim: usize) -> Result<Self, FlexError> {
        Ok(FlexSpaces {
            flexes: kernel_float(&c.jacobian(c.edges, p)?, nullity),
            motions: kernel_float(&c.jacobian(complete, p)?, motion_dim),
        })
    }

    fn without_motions(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut w = u.clone();
        for q in &self.motions {
            w -= q * q.dot(u);
        }
        w
    }
}

/// Traces `steps` predictor-corrector steps of a nontrivial flex. Only the
/// sign of `direction_seed` matters: negative seeds trace the opposite
/// branch. On divergence the whole trace is retried with half the step, up
/// to [`MAX_HALVINGS`] times.
pub fn trace_flex(f: &Framework, steps: usize, step_size: f64, direction_seed: i64) -> Result<FlexPath, FlexError> {
    if !(step_size > 0.0 && step_size.is_finite()) {
        return Err(FlexError::InvalidStepSize);
    }
    f.validate()?;
    let mut h = step_size;
    let mut attempt = 0;
    loop {
        match trace_with_step(f, steps, h, direction_seed) {
            Err(FlexError::CorrectionDiverged { .. }) if attempt < MAX_HALVINGS => {
                attempt += 1;
                h /= 2.0;
            }
            other => return other,
        }
    }
}

fn trace_with_step(f: &Framework, steps: usize, h: f64, direction_seed: i64) -> Result<FlexPath, FlexError> {
    let n = f.graph.vertex_count();
    let start = f.float_points();
    let c = Constraints::new(&f.graph, &f.surface, &f.assignment, &start);
    let complete = Graph::complete(n);
    let cols = 3 * n;
    let nullity = cols - rank_float(&c.jacobian(c.edges, &start)?, DEFAULT_TOL_REL);
    let motion_dim = cols - rank_float(&c.jacobian(complete.edges(), &start)?, DEFAULT_TOL_REL);
    if nullity <= f.surface.ambient_dof() || nullity <= motion_dim {
        return Err(FlexError::NoNontrivialFlex);
    }

    let spaces = FlexSpaces::at(&c, complete.edges(), &start, nullity, motion_dim)?;
    let mut direction = spaces
        .flexes
        .iter()
        .map(|u| spaces.without_motions(u))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .filter(|w| w.norm() > DIRECTION_FLOOR)
        .ok_or(FlexError::NoNontrivialFlex)?
        .normalize();
    let pivot = direction.iter().enumerate().fold(0, |best, (i, v)| if v.abs() > direction[best].abs() { i } else { best });
    let sign = if direction_seed < 0 { -1.0 } else { 1.0 };
    if direction[pivot] * sign < 0.0 {
        direction = -direction;
    }

    let mut samples = vec![start.clone()];
    let (mut max_edge, mut max_surface) = c.errors(&start)?;
    let scale = f.surface.scale();
    for step in 1..=steps {
        let current = samples.last().expect("nonempty");
        if step > 1 {
            let spaces = FlexSpaces::at(&c, complete.edges(), current, nullity, motion_dim)?;
            let mut carried = DVector::zeros(cols);
            for u in &spaces.flexes {
                carried += u * u.dot(&direction);
            }
            let carried = spaces.without_motions(&carried);
            if carried.norm() < DIRECTION_FLOOR {
                return Err(FlexError::CorrectionDiverged { step });
            }
            direction = carried.normalize();
        }
        let predicted = flatten(current) + &direction * h;
        let corrected = c.correct(predicted).ok_or(FlexError::CorrectionDiverged { step })?;
        let projected = corrected
            .iter()
            .zip(&f.assignment)
            .map(|(q, &sheet)| f.surface.project(sheet, *q))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FlexError::CorrectionDiverged { step })?;
        let (edge, surface) = c.errors(&projected)?;
        if edge > EDGE_TOL * scale || surface > SURFACE_TOL * scale {
            return Err(FlexError::CorrectionDiverged { step });
        }
        max_edge = max_edge.max(edge);
        max_surface = max_surface.max(surface);
        samples.push(projected);
    }
    Ok(FlexPath { samples, step_size: h, max_edge_error: max_edge, max_surface_error: max_surface })
}

/// The non-edge pair whose distance moved most along the path, if it moved
/// by more than [`WITNESS_THRESHOLD`].
pub fn noncongruence_witness(path: &FlexPath, f: &Framework) -> Option<NoncongruenceWitness> {
    let first = path.samples.first()?;
    let n = f.graph.vertex_count();
    let mut best: Option<NoncongruenceWitness> = None;
    for i in 0..n {
        for j in i + 1..n {
            if f.graph.has_edge(i, j) {
                continue;
            }
            let d0 = distance(&first[i], &first[j]);
            let delta = path.samples.iter().map(|s| (distance(&s[i], &s[j]) - d0).abs()).fold(0.0, f64::max);
            if delta > WITNESS_THRESHOLD && best.is_none_or(|b| delta > b.delta) {
                best = Some(NoncongruenceWitness { pair: (i, j), delta });
            }
        }
    }
    best
}
