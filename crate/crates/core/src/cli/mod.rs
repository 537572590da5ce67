//! Problem files, commands and reports behind the `eddeg` binary.
//!
//! Each command returns its output and exit code instead of printing, so the
//! binary is a thin wrapper and the commands can be tested in-process.

mod file;
mod report;

use std::fmt::Write as _;
use std::path::Path;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::ed::{
    build_lagrange_system, ed_polytopes, face_profile, facial_system, EDProblem, EdError,
};
use crate::geometry::Polytope;
use crate::mixed_volume::{Algorithm, NORMALIZATION};
use crate::numeric::{count_ed_critical_points, facial_solution_probe, ProbeVerdict, SolverError};

pub use file::{load_problem, parse_rational, LoadError, ProblemFile};
pub use report::{
    rerun_report, verify_problem, without_timings, BoundReport, Counts, FaceDiagnostics,
    ProblemEcho, Seeds, SolutionReport, Timings, VerificationReport, Verdict, RANK_POLICY,
};

/// Environment variable capping the worker count; `0` means automatic.
pub const THREADS_ENV: &str = "EDDEG_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Ed(#[from] EdError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Report(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        CommandOutput { stdout, code: 0 }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn open(path: &Path, seed: Option<u64>) -> Result<(ProblemFile, EDProblem, u64), CliError> {
    let file = ProblemFile::read(path)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let problem = file.problem(seed)?;
    Ok((file, problem, seed))
}

/// Worker count from [`THREADS_ENV`]; `None` when unset or `0`.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(k) => Ok(Some(k)),
            Err(_) => Err(CliError::Argument(format!("{THREADS_ENV}={s} is not a count"))),
        },
    }
}

/// Runs `f` on a pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool builds")
            .install(f),
    }
}

#[derive(Serialize)]
struct BoundOutput {
    value: u64,
    algorithm: Algorithm,
    normalization: &'static str,
    lifting_seeds: Vec<u64>,
}

pub fn cmd_bound(
    path: &Path,
    algorithm: Algorithm,
    seed: Option<u64>,
    json: bool,
) -> Result<CommandOutput, CliError> {
    let (_, problem, seed) = open(path, seed)?;
    let (value, lifting_seeds) = report::bound_value(&problem, algorithm, seed)?;
    Ok(CommandOutput::ok(if json {
        to_json(&BoundOutput {
            value,
            algorithm,
            normalization: NORMALIZATION,
            lifting_seeds,
        })
    } else {
        format!("{value}\n")
    }))
}

#[derive(Serialize)]
struct CountOutput {
    problem: ProblemEcho,
    counts: Counts,
    paths: crate::numeric::PathSummary,
    solutions: Vec<SolutionReport>,
    unreliable_reasons: Vec<String>,
    seed: u64,
    tolerances: crate::numeric::SolverOptions,
    rank_policy: &'static str,
}

/// `tol` overrides the residual tolerance.
pub fn cmd_count(
    path: &Path,
    seed: Option<u64>,
    tol: Option<f64>,
    json: bool,
) -> Result<CommandOutput, CliError> {
    let (file, problem, seed) = open(path, seed)?;
    let mut options = file.options.clone();
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Argument(format!("tolerance {t} must be positive")));
        }
        options.residual_tol = t;
    }
    let count = count_ed_critical_points(&problem, seed, &options)?;
    let code = if count.solutions.is_reliable() { 0 } else { 3 };
    let stdout = if json {
        to_json(&CountOutput {
            problem: ProblemEcho::new(&problem),
            counts: Counts {
                total: count.total,
                torus: count.torus,
                regular: count.regular,
            },
            paths: count.solutions.summary(),
            solutions: report::solution_reports(&count),
            unreliable_reasons: count.solutions.unreliable.clone(),
            seed,
            tolerances: options,
            rank_policy: RANK_POLICY,
        })
    } else {
        let mut s = String::new();
        let p = count.solutions.summary();
        writeln!(s, "regular: {}", count.regular).unwrap();
        writeln!(s, "torus: {}", count.torus).unwrap();
        writeln!(s, "total: {}", count.total).unwrap();
        writeln!(
            s,
            "paths: {} tracked, {} converged, {} diverged, {} failed",
            p.total, p.converged, p.diverged, p.failed
        )
        .unwrap();
        for r in &count.solutions.unreliable {
            writeln!(s, "warning: {r}").unwrap();
        }
        s
    };
    Ok(CommandOutput { stdout, code })
}

pub fn cmd_verify(path: &Path, seed: Option<u64>, json: bool) -> Result<CommandOutput, CliError> {
    let (file, problem, seed) = open(path, seed)?;
    let seeds = Seeds {
        solver: seed,
        lifting: seed,
        probe: seed,
    };
    let report = verify_problem(&problem, &seeds, &file.options)?;
    let stdout = if json {
        report.to_json()
    } else {
        let mut s = String::new();
        writeln!(s, "bound: {} ({})", report.bound.value, report.bound.normalization).unwrap();
        writeln!(
            s,
            "count: regular {}, torus {}, total {}",
            report.counts.regular, report.counts.torus, report.counts.total
        )
        .unwrap();
        writeln!(
            s,
            "faces: {} candidate directions, {} with a torus point found",
            report.faces.candidates,
            report.faces.facial_solutions.len()
        )
        .unwrap();
        for r in &report.unreliable_reasons {
            writeln!(s, "warning: {r}").unwrap();
        }
        writeln!(s, "verdict: {}", report.verdict.as_str()).unwrap();
        s
    };
    Ok(CommandOutput {
        stdout,
        code: report.verdict.exit_code(),
    })
}

/// Parses `"w1,..,wn,v1,..,vm"`.
pub fn parse_direction(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Argument(format!("`{}` is not an integer", t.trim())))
        })
        .collect()
}

#[derive(Serialize)]
struct FaceEntry {
    i: usize,
    case: String,
    formula: &'static str,
    e_i: Option<i64>,
    s_i: Vec<usize>,
    predicted: String,
    actual: String,
}

#[derive(Serialize)]
struct FacesOutput {
    w: Vec<i64>,
    h: Vec<i64>,
    h_partial: Vec<Vec<Option<i64>>>,
    e: i64,
    s: Vec<usize>,
    faces: Vec<FaceEntry>,
    facial_system: Vec<String>,
    probe: ProbeVerdict,
}

pub fn cmd_faces(
    path: &Path,
    w: &[i64],
    seed: Option<u64>,
    json: bool,
) -> Result<CommandOutput, CliError> {
    let (_, problem, seed) = open(path, seed)?;
    let prof = face_profile(&problem, w)?;
    let names = problem.all_var_names();
    let lagrange = build_lagrange_system(&problem);
    let faces = prof
        .cases
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(FaceEntry {
                i,
                case: c.to_string(),
                formula: c.formula(),
                e_i: prof.e_partial[i],
                s_i: prof.s_partial[i].clone(),
                predicted: prof.predicted_face(&problem, i).to_text(&names),
                actual: lagrange.l[i]
                    .face_polynomial(w)
                    .map_err(EdError::from)?
                    .to_text(&names),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let out = FacesOutput {
        w: w.to_vec(),
        h: prof.h.clone(),
        h_partial: prof.h_partial.clone(),
        e: prof.e,
        s: prof.s.clone(),
        faces,
        facial_system: facial_system(&problem, w)?
            .iter()
            .map(|p| p.to_text(&names))
            .collect(),
        probe: facial_solution_probe(&problem, w, seed)?,
    };
    if json {
        return Ok(CommandOutput::ok(to_json(&out)));
    }
    let mut s = String::new();
    let show = |v: &[usize]| v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
    writeln!(s, "w = {:?}", out.w).unwrap();
    writeln!(s, "h = {:?}, e = {}, S = {{{}}}", out.h, out.e, show(&out.s)).unwrap();
    for f in &out.faces {
        let e = f.e_i.map_or("inf".to_string(), |e| e.to_string());
        writeln!(
            s,
            "L{}: {} [{}] e_i = {}, S_i = {{{}}}: {}{}",
            f.i + 1,
            f.case,
            f.formula,
            e,
            show(&f.s_i),
            f.predicted,
            if f.predicted == f.actual { "" } else { "  (MISMATCH)" }
        )
        .unwrap();
    }
    writeln!(s, "facial system:").unwrap();
    for p in &out.facial_system {
        writeln!(s, "  {p}").unwrap();
    }
    match &out.probe {
        ProbeVerdict::SolutionFound { residual, .. } => {
            writeln!(s, "probe: torus solution found (residual {residual:.2e})").unwrap()
        }
        ProbeVerdict::NoneFoundHeuristic { reason } => {
            writeln!(s, "probe: none found ({reason})").unwrap()
        }
    }
    Ok(CommandOutput::ok(s))
}

fn lattice_vertices(p: &Polytope) -> Vec<Vec<i64>> {
    p.vertices()
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| x.to_integer().to_i64().expect("lattice coordinate fits i64"))
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct PolytopesOutput {
    variables: Vec<String>,
    p: Vec<Vec<Vec<i64>>>,
    p_prime: Vec<Vec<Vec<i64>>>,
    support_warnings: Vec<String>,
}

pub fn cmd_polytopes(path: &Path, json: bool) -> Result<CommandOutput, CliError> {
    let (_, problem, _) = open(path, None)?;
    let polys = ed_polytopes(&problem)?;
    let out = PolytopesOutput {
        variables: problem.all_var_names(),
        p: polys.p.iter().map(lattice_vertices).collect(),
        p_prime: polys.p_prime.iter().map(lattice_vertices).collect(),
        support_warnings: polys
            .support_mismatches
            .iter()
            .map(|i| format!("expanded L{} has a smaller support than its structural one", i + 1))
            .collect(),
    };
    if json {
        return Ok(CommandOutput::ok(to_json(&out)));
    }
    let mut s = String::new();
    writeln!(s, "coordinates: ({})", out.variables.join(", ")).unwrap();
    let fmt = |vs: &[Vec<i64>]| {
        vs.iter()
            .map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (j, p) in out.p.iter().enumerate() {
        writeln!(s, "P{}: {}", j + 1, fmt(p)).unwrap();
    }
    for (i, p) in out.p_prime.iter().enumerate() {
        writeln!(s, "P'{}: {}", i + 1, fmt(p)).unwrap();
    }
    for w in &out.support_warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    Ok(CommandOutput::ok(s))
}
