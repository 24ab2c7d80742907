//! Exhaustive comparison of combinatorial characterizations against rank
//! computations over small connected graphs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::connected_graphs;
use crate::graph::{cone, Graph};
use crate::rigidity::{generic_analyze, RigidityError, DEFAULT_TRIALS};
use crate::sparsity::{check_tight_3_6, check_type, is_laman, IndependenceType};
use crate::surfaces::SurfaceFamily;
use crate::trees::{decompose_type2, tagged_edges, verify_decomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// Laman graphs are the isostatic graphs on two parallel planes.
    Planes,
    /// Laman graphs are the isostatic graphs on two concentric spheres.
    Spheres,
    /// Maximal type-2 graphs are the isostatic graphs on a cylinder.
    Cylinder,
    /// `cone(G)` is (3,6)-tight exactly when `G` is Laman.
    Cone,
    /// Maximal type-2 graphs split into two edge-disjoint spanning trees.
    Trees,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [Theorem::Planes, Theorem::Spheres, Theorem::Cylinder, Theorem::Cone, Theorem::Trees];

    /// The surface probed numerically, if any.
    pub fn surface(self) -> Option<SurfaceFamily> {
        match self {
            Theorem::Planes => Some(SurfaceFamily::planes(&[0, 1]).expect("valid offsets")),
            Theorem::Spheres => Some(SurfaceFamily::spheres(&[1, 2]).expect("valid radii")),
            Theorem::Cylinder => Some(SurfaceFamily::cylinders(&[1]).expect("valid radius")),
            Theorem::Cone | Theorem::Trees => None,
        }
    }

    /// Global edge count a graph needs to be a candidate, `2|V| - dof`.
    fn meets_count(self, g: &Graph) -> bool {
        match self {
            Theorem::Planes | Theorem::Spheres => g.freedom_number() == 3,
            Theorem::Cylinder | Theorem::Trees => g.freedom_number() == 2,
            Theorem::Cone => g.vertex_count() >= 2,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Theorem::Planes => "planes",
            Theorem::Spheres => "spheres",
            Theorem::Cylinder => "cylinder",
            Theorem::Cone => "cone",
            Theorem::Trees => "trees",
        };
        f.write_str(name)
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL.into_iter().find(|t| t.to_string() == s).ok_or_else(|| format!("unknown theorem {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub graph6: String,
    pub combinatorial: bool,
    pub numerical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub theorem: Theorem,
    pub graphs_checked: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, trials: DEFAULT_TRIALS }
    }
}

/// Random sheet for every vertex, drawn from the stream of graph `index`.
pub fn random_assignment(n: usize, sheets: usize, seed: u64, index: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..n).map(|_| rng.random_range(0..sheets)).collect()
}

/// The two verdicts compared for one graph.
fn verdicts(theorem: Theorem, g: &Graph, index: usize, options: VerifyOptions) -> Result<(bool, bool), RigidityError> {
    match theorem {
        Theorem::Planes | Theorem::Spheres | Theorem::Cylinder => {
            let surface = theorem.surface().expect("numerical theorem");
            let combinatorial = match theorem {
                Theorem::Cylinder => check_type(g, IndependenceType::Type2).maximal,
                _ => is_laman(g),
            };
            let assignment = match theorem {
                Theorem::Cylinder => vec![0; g.vertex_count()],
                _ => random_assignment(g.vertex_count(), surface.sheet_count(), options.seed, index),
            };
            let report = generic_analyze(g, &surface, &assignment, options.trials, options.seed)?;
            Ok((combinatorial, report.isostatic))
        }
        Theorem::Cone => Ok((is_laman(g), check_tight_3_6(&cone(g)))),
        Theorem::Trees => {
            let combinatorial = check_type(g, IndependenceType::Type2).maximal;
            let decomposed = decompose_type2(g).is_ok_and(|d| verify_decomposition(g.vertex_count(), &tagged_edges(g, None), &d));
            Ok((combinatorial, decomposed))
        }
    }
}

/// Compares both verdicts on every graph in `graphs` that meets the global
/// count for `theorem`. Disagreements are sorted by graph6 string.
pub fn verify_graphs(theorem: Theorem, graphs: &[Graph], options: VerifyOptions) -> Result<VerificationSummary, RigidityError> {
    let mut candidates: Vec<(String, &Graph)> =
        graphs.iter().filter(|g| g.is_connected() && theorem.meets_count(g)).map(|g| (g.to_graph6(), g)).collect();
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    let results = candidates
        .par_iter()
        .enumerate()
        .map(|(index, (graph6, g))| {
            verdicts(theorem, g, index, options).map(|(combinatorial, numerical)| {
                (combinatorial != numerical).then(|| Disagreement { graph6: graph6.clone(), combinatorial, numerical })
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let disagreements: Vec<Disagreement> = results.into_iter().flatten().collect();
    Ok(VerificationSummary {
        theorem,
        graphs_checked: candidates.len(),
        agreements: candidates.len() - disagreements.len(),
        disagreements,
    })
}

/// [`verify_graphs`] over all connected graphs with at most `max_n` vertices.
pub fn verify(theorem: Theorem, max_n: usize, options: VerifyOptions) -> Result<VerificationSummary, RigidityError> {
    verify_graphs(theorem, &connected_graphs(max_n), options)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.to_string().parse::<Theorem>(), Ok(t));
        }
        assert!("torus".parse::<Theorem>().is_err());
    }

    #[test]
    fn small_runs_agree() {
        for t in Theorem::ALL {
            let summary = verify(t, 5, VerifyOptions::default()).unwrap();
            assert!(summary.disagreements.is_empty(), "{t}: {:?}", summary.disagreements);
            assert_eq!(summary.agreements, summary.graphs_checked);
            assert!(summary.graphs_checked > 0);
        }
    }

    #[test]
    fn candidates_respect_the_count() {
        let summary = verify(Theorem::Cylinder, 4, VerifyOptions::default()).unwrap();
        let expected = connected_graphs(4).iter().filter(|g| g.freedom_number() == 2).count();
        assert_eq!(summary.graphs_checked, expected);
    }

    #[test]
    fn external_lists_are_checked_as_given() {
        let k4 = Graph::complete(4);
        let summary = verify_graphs(Theorem::Cylinder, &[k4.clone(), k4], VerifyOptions::default()).unwrap();
        assert_eq!((summary.graphs_checked, summary.agreements), (2, 2));
    }

    #[test]
    fn assignments_are_reproducible() {
        assert_eq!(random_assignment(6, 2, 3, 1), random_assignment(6, 2, 3, 1));
        assert!(random_assignment(20, 2, 3, 1).iter().all(|&s| s < 2));
    }
}
