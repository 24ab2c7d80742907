//! `surface-rigidity`: sparsity checks, derivations, rank tests, exhaustive
//! verification and flex tracing from the command line.
//!
//! Exit codes: 0 success or property holds, 1 property fails, 2 input error,
//! 3 verification disagreement.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use surface_rigidity::flexes::{default_step_size, noncongruence_witness, trace_flex, FlexError};
use surface_rigidity::moves::{derive_laman_labeled, derive_laman_plus_one_labeled, derive_type2_labeled, MoveError};
use surface_rigidity::rigidity::{analyze, analyze_float, generic_analyze_with_framework, relative_rigidity_matrix, Framework};
use surface_rigidity::sparsity::{check_point_line, check_tight_3_6, check_type, is_laman_plus_one, IndependenceType};
use surface_rigidity::surfaces::{SurfaceFamily, SurfaceKind};
use surface_rigidity::verify::{verify, verify_graphs, Theorem, VerifyOptions};
use surface_rigidity::Graph;

const SCHEMA: &str = "surface-rigidity/1";
const THREADS_VAR: &str = "SURFACE_RIGIDITY_THREADS";

const EXIT_FALSE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DISAGREEMENT: u8 = 3;

#[derive(Parser)]
#[command(name = "surface-rigidity", version, about = "Generic rigidity of frameworks on planes, spheres and cylinders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a sparsity property of a graph (graph6 or JSON input).
    Check {
        #[arg(long = "type", value_enum)]
        property: Property,
        #[arg(long = "in")]
        input: PathBuf,
        /// Line vertex for `point-line`; defaults to the last vertex.
        #[arg(long)]
        line_vertex: Option<usize>,
    },
    /// Print a construction sequence for a graph.
    Derive {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rank of the relative rigidity matrix at random or given points.
    Rank {
        /// Graph file; points are sampled on the surface.
        #[arg(long = "in", required_unless_present = "framework", conflicts_with = "framework")]
        input: Option<PathBuf>,
        /// Framework JSON with explicit rational points.
        #[arg(long)]
        framework: Option<PathBuf>,
        /// planes, spheres or cylinders.
        #[arg(long)]
        surface: Option<SurfaceKind>,
        /// Comma-separated plane offsets or radii.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Comma-separated sheet index per vertex; defaults to sheet 0.
        #[arg(long, value_delimiter = ',')]
        assignment: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use singular values instead of exact elimination.
        #[arg(long)]
        float: bool,
        /// Also write the rigidity matrix as CSV.
        #[arg(long)]
        matrix_csv: Option<PathBuf>,
    },
    /// Compare combinatorial and numerical verdicts over small graphs.
    Verify {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Read graphs (one per line) instead of enumerating.
        #[arg(long)]
        graphs: Option<PathBuf>,
    },
    /// Trace a finite flex of a framework.
    Flex {
        #[arg(long)]
        framework: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Defaults to 0.01 times the surface scale.
        #[arg(long)]
        step_size: Option<f64>,
        /// Only the sign matters; negative traces the other direction.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        seed: i64,
        #[arg(long, value_enum, default_value_t = FlexFormat::Csv)]
        format: FlexFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Property {
    Laman,
    Type2,
    LamanPlusOne,
    Tight36,
    PointLine,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Class {
    Laman,
    LamanPlusOne,
    Type2,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    Planes,
    Spheres,
    Cylinder,
    Cone,
    Trees,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Planes => Theorem::Planes,
            TheoremArg::Spheres => Theorem::Spheres,
            TheoremArg::Cylinder => Theorem::Cylinder,
            TheoremArg::Cone => Theorem::Cone,
            TheoremArg::Trees => Theorem::Trees,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlexFormat {
    Csv,
    Json,
}

/// Every JSON document carries the schema tag.
#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: T,
}

fn write_stdout(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn emit<T: Serialize>(body: T) -> Result<()> {
    write_stdout(&(serde_json::to_string_pretty(&Envelope { schema: SCHEMA, body })? + "\n"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse_auto(&read(path)?).with_context(|| format!("cannot parse a graph from {}", path.display()))
}

fn read_framework(path: &Path) -> Result<Framework> {
    serde_json::from_str(&read(path)?).with_context(|| format!("cannot parse a framework from {}", path.display()))
}

fn status(holds: bool) -> ExitCode {
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

#[derive(Serialize)]
struct CheckOutput {
    property: Property,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<surface_rigidity::sparsity::SparsityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    circuit_edge: Option<(usize, usize)>,
}

fn cmd_check(property: Property, input: &Path, line_vertex: Option<usize>) -> Result<ExitCode> {
    let g = read_graph(input)?;
    let output = match property {
        Property::Laman | Property::Type2 => {
            let k = match property {
                Property::Laman => IndependenceType::Type3,
                _ => IndependenceType::Type2,
            };
            let verdict = check_type(&g, k);
            CheckOutput { property, holds: verdict.maximal, verdict: Some(verdict), circuit_edge: None }
        }
        Property::LamanPlusOne => {
            let edge = is_laman_plus_one(&g);
            let verdict = check_type(&g, IndependenceType::Type3);
            CheckOutput { property, holds: edge.is_some(), verdict: Some(verdict), circuit_edge: edge }
        }
        Property::Tight36 => CheckOutput { property, holds: check_tight_3_6(&g), verdict: None, circuit_edge: None },
        Property::PointLine => {
            let apex = line_vertex.unwrap_or(g.vertex_count() - 1);
            let holds = check_point_line(&g, apex)?;
            CheckOutput { property, holds, verdict: None, circuit_edge: None }
        }
    };
    let holds = output.holds;
    emit(output)?;
    Ok(status(holds))
}

#[derive(Serialize)]
struct DeriveOutput {
    class: Class,
    derivation: surface_rigidity::moves::DerivationSequence,
    /// `labels[r]` is the input vertex built as replay vertex `r`.
    labels: Vec<usize>,
}

fn cmd_derive(class: Class, input: &Path) -> Result<ExitCode> {
    let g = read_graph(input)?;
    let derived = match class {
        Class::Laman => derive_laman_labeled(&g),
        Class::LamanPlusOne => derive_laman_plus_one_labeled(&g),
        Class::Type2 => derive_type2_labeled(&g),
    };
    let derived = match derived {
        Ok(d) => d,
        Err(e @ (MoveError::NotLaman | MoveError::NotLamanPlusOne | MoveError::NotType2Maximal)) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(EXIT_FALSE));
        }
        Err(e) => return Err(e.into()),
    };
    if derived.relabeled_replay()? != g {
        bail!("internal error: derivation does not replay to the input graph");
    }
    emit(DeriveOutput { class, derivation: derived.sequence, labels: derived.labels })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RankOutput {
    #[serde(flatten)]
    report: surface_rigidity::rigidity::RigidityReport,
    framework: Framework,
}

struct RankArgs {
    input: Option<PathBuf>,
    framework: Option<PathBuf>,
    surface: Option<SurfaceKind>,
    params: Vec<String>,
    assignment: Vec<usize>,
    trials: usize,
    seed: u64,
    float: bool,
    matrix_csv: Option<PathBuf>,
}

fn cmd_rank(args: RankArgs) -> Result<ExitCode> {
    let tol = surface_rigidity::linalg::DEFAULT_TOL_REL;
    let (report, framework) = match (&args.framework, &args.input) {
        (Some(path), _) => {
            let f = read_framework(path)?;
            (if args.float { analyze_float(&f, tol)? } else { analyze(&f)? }, f)
        }
        (None, Some(path)) => {
            let g = read_graph(path)?;
            let kind = args.surface.context("--surface is required with --in")?;
            let params: Vec<&str> = args.params.iter().map(String::as_str).collect();
            let surface = SurfaceFamily::parse(kind, &params)?;
            let assignment = if args.assignment.is_empty() { vec![0; g.vertex_count()] } else { args.assignment.clone() };
            let (report, f) = generic_analyze_with_framework(&g, &surface, &assignment, args.trials, args.seed)?;
            (if args.float { analyze_float(&f, tol)? } else { report }, f)
        }
        (None, None) => bail!("either --in or --framework is required"),
    };
    if let Some(path) = &args.matrix_csv {
        fs::write(path, relative_rigidity_matrix(&framework)?.to_csv()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    emit(RankOutput { report, framework })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(theorem: Theorem, max_n: usize, options: VerifyOptions, graphs: Option<&Path>) -> Result<ExitCode> {
    let summary = match graphs {
        Some(path) => {
            let list = read(path)?
                .lines()
                .map(|l| l.trim().trim_start_matches(">>graph6<<"))
                .filter(|l| !l.is_empty())
                .map(|l| Graph::parse_auto(l).with_context(|| format!("bad graph line {l:?}")))
                .collect::<Result<Vec<_>>>()?;
            verify_graphs(theorem, &list, options)?
        }
        None => verify(theorem, max_n, options)?,
    };
    let clean = summary.disagreements.is_empty();
    emit(summary)?;
    Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DISAGREEMENT) })
}

#[derive(Serialize)]
struct FlexOutput {
    path: surface_rigidity::flexes::FlexPath,
    witness: Option<surface_rigidity::flexes::NoncongruenceWitness>,
}

fn cmd_flex(path: &Path, steps: usize, step_size: Option<f64>, seed: i64, format: FlexFormat, out: Option<&Path>) -> Result<ExitCode> {
    let framework = read_framework(path)?;
    let h = step_size.unwrap_or_else(|| default_step_size(&framework.surface));
    let flex = match trace_flex(&framework, steps, h, seed) {
        Ok(p) => p,
        Err(FlexError::NoNontrivialFlex) => {
            eprintln!("{}", FlexError::NoNontrivialFlex);
            return Ok(ExitCode::from(EXIT_FALSE));
        }
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        FlexFormat::Csv => flex.to_csv(),
        FlexFormat::Json => {
            let witness = noncongruence_witness(&flex, &framework);
            let body = Envelope { schema: SCHEMA, body: FlexOutput { path: flex, witness } };
            serde_json::to_string_pretty(&body)? + "\n"
        }
    };
    match out {
        Some(file) => fs::write(file, text).with_context(|| format!("cannot write {}", file.display()))?,
        None => write_stdout(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_VAR) {
        let threads: usize = value.trim().parse().with_context(|| format!("{THREADS_VAR} must be a positive integer"))?;
        if threads == 0 {
            bail!("{THREADS_VAR} must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Check { property, input, line_vertex } => cmd_check(property, &input, line_vertex),
        Command::Derive { class, input } => cmd_derive(class, &input),
        Command::Rank { input, framework, surface, params, assignment, trials, seed, float, matrix_csv } => {
            cmd_rank(RankArgs { input, framework, surface, params, assignment, trials, seed, float, matrix_csv })
        }
        Command::Verify { theorem, max_n, seed, trials, graphs } => {
            cmd_verify(theorem.into(), max_n, VerifyOptions { seed, trials }, graphs.as_deref())
        }
        Command::Flex { framework, steps, step_size, seed, format, out } => {
            cmd_flex(&framework, steps, step_size, seed, format, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
