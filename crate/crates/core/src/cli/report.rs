//! The JSON verification report and the workflow that fills it.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::file::parse_rational;
use super::CliError;
use crate::ed::{candidate_directions, ed_degree_bound, face_profile, EDProblem};
use crate::mixed_volume::{Algorithm, NORMALIZATION};
use crate::numeric::{
    count_ed_critical_points, facial_solution_probe, EdCount, PathSummary, ProbeVerdict,
    SolverOptions,
};
use crate::poly::parse_polynomial;

pub const RANK_POLICY: &str =
    "x is regular on X when the Jacobian of f has m singular values above rank_tol * sigma_max";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equal,
    CountBelowBound,
    Unreliable,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Equal => 0,
            Verdict::CountBelowBound => 2,
            Verdict::Unreliable => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "EQUAL",
            Verdict::CountBelowBound => "COUNT_BELOW_BOUND",
            Verdict::Unreliable => "UNRELIABLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub vars: Vec<String>,
    /// The equations actually solved, after any coefficient sampling.
    pub polynomials: Vec<String>,
    pub u: Vec<String>,
}

impl ProblemEcho {
    pub fn new(p: &EDProblem) -> Self {
        ProblemEcho {
            vars: p.vars().to_vec(),
            polynomials: p.polys().iter().map(|f| f.to_text(p.vars())).collect(),
            u: p.u().iter().map(|x| x.to_string()).collect(),
        }
    }

    pub fn to_problem(&self) -> Result<EDProblem, CliError> {
        let polys = self
            .polynomials
            .iter()
            .map(|t| parse_polynomial(t, &self.vars))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Report(e.to_string()))?;
        let u = self
            .u
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| CliError::Report(format!("bad u entry `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EDProblem::new(self.vars.clone(), polys, u)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: u64,
    pub algorithm: Algorithm,
    pub normalization: String,
    /// The other algorithm's value, when it was run.
    pub cross_check: Option<u64>,
    pub lifting_seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub total: usize,
    pub torus: usize,
    pub regular: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    /// `(re, im)` per coordinate, `x` block then `λ` block.
    pub point: Vec<[f64; 2]>,
    pub multiplicity: usize,
    pub residual: f64,
    pub torus: bool,
    pub real: bool,
    pub regular: bool,
    pub nonsingular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceDiagnostics {
    pub candidates: usize,
    /// Directions whose predicted face functions disagree with the direct
    /// computation; always empty unless something is broken.
    pub classifier_mismatches: Vec<Vec<i64>>,
    /// Directions where a torus point of the facial system was found.
    pub facial_solutions: Vec<Vec<i64>>,
    pub case_counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub solver: u64,
    pub lifting: u64,
    pub probe: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub bound_ms: f64,
    pub count_ms: f64,
    pub faces_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub problem: ProblemEcho,
    pub bound: BoundReport,
    pub counts: Counts,
    pub paths: PathSummary,
    pub solutions: Vec<SolutionReport>,
    pub faces: FaceDiagnostics,
    pub verdict: Verdict,
    pub unreliable_reasons: Vec<String>,
    pub seeds: Seeds,
    pub tolerances: SolverOptions,
    pub rank_policy: String,
    pub timings: Timings,
}

impl VerificationReport {
    /// Pretty-printed JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub(crate) fn bound_value(problem: &EDProblem, algorithm: Algorithm, seed: u64) -> Result<(u64, Vec<u64>), CliError> {
    let r = ed_degree_bound(problem, algorithm, seed)?;
    let v = r
        .as_u64()
        .ok_or_else(|| CliError::Report(format!("mixed volume {} is not an integer", r.value)))?;
    Ok((v, r.seeds))
}

pub(crate) fn solution_reports(count: &EdCount) -> Vec<SolutionReport> {
    count
        .solutions
        .solutions
        .iter()
        .map(|s| SolutionReport {
            point: s.point.iter().map(|z| [z.re, z.im]).collect(),
            multiplicity: s.multiplicity,
            residual: s.residual,
            torus: s.torus,
            real: s.real,
            regular: s.regular.unwrap_or(false),
            nonsingular: s.nonsingular,
        })
        .collect()
}

fn face_diagnostics(problem: &EDProblem, seed: u64) -> Result<FaceDiagnostics, CliError> {
    let dirs = candidate_directions(problem)?;
    let lagrange = crate::ed::build_lagrange_system(problem);
    let mut diag = FaceDiagnostics {
        candidates: dirs.len(),
        classifier_mismatches: Vec::new(),
        facial_solutions: Vec::new(),
        case_counts: BTreeMap::new(),
    };
    for w in &dirs {
        let prof = face_profile(problem, w)?;
        for (i, case) in prof.cases.iter().enumerate() {
            *diag.case_counts.entry(case.to_string()).or_default() += 1;
            let actual = lagrange.l[i].face_polynomial(w).map_err(crate::ed::EdError::from)?;
            if prof.predicted_face(problem, i) != actual
                && !diag.classifier_mismatches.contains(w)
            {
                diag.classifier_mismatches.push(w.clone());
            }
        }
        if let ProbeVerdict::SolutionFound { .. } = facial_solution_probe(problem, w, seed)? {
            diag.facial_solutions.push(w.clone());
        }
    }
    Ok(diag)
}

/// Bound with both algorithms, numerical count, face diagnostics and the
/// verdict comparing them.
pub fn verify_problem(
    problem: &EDProblem,
    seeds: &Seeds,
    options: &SolverOptions,
) -> Result<VerificationReport, CliError> {
    let start = Instant::now();
    let (value, _) = bound_value(problem, Algorithm::Ie, seeds.lifting)?;
    let (cells, lifting_seeds) = bound_value(problem, Algorithm::Cells, seeds.lifting)?;
    let bound_ms = start.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let count = count_ed_critical_points(problem, seeds.solver, options)?;
    let count_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let faces = face_diagnostics(problem, seeds.probe)?;
    let faces_ms = t.elapsed().as_secs_f64() * 1e3;

    let mut reasons = count.solutions.unreliable.clone();
    if cells != value {
        reasons.push(format!("mixed-volume algorithms disagree: ie {value}, cells {cells}"));
    }
    if count.torus as u64 > value {
        reasons.push(format!("torus count {} exceeds the bound {value}", count.torus));
    }
    if count.regular as u64 > value {
        reasons.push(format!("regular count {} exceeds the bound {value}", count.regular));
    }
    let summary = count.solutions.summary();
    if summary.failed > 0 && reasons.is_empty() {
        reasons.push(format!("{} path(s) failed", summary.failed));
    }
    let verdict = if !reasons.is_empty() {
        Verdict::Unreliable
    } else if count.regular as u64 == value {
        Verdict::Equal
    } else {
        Verdict::CountBelowBound
    };

    Ok(VerificationReport {
        problem: ProblemEcho::new(problem),
        bound: BoundReport {
            value,
            algorithm: Algorithm::Ie,
            normalization: NORMALIZATION.to_string(),
            cross_check: Some(cells),
            lifting_seeds,
        },
        counts: Counts {
            total: count.total,
            torus: count.torus,
            regular: count.regular,
        },
        paths: summary,
        solutions: solution_reports(&count),
        faces,
        verdict,
        unreliable_reasons: reasons,
        seeds: seeds.clone(),
        tolerances: options.clone(),
        rank_policy: RANK_POLICY.to_string(),
        timings: Timings {
            bound_ms,
            count_ms,
            faces_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

/// Runs the verification again from a report's problem echo, seeds and
/// tolerances.
pub fn rerun_report(report: &VerificationReport) -> Result<VerificationReport, CliError> {
    verify_problem(&report.problem.to_problem()?, &report.seeds, &report.tolerances)
}

/// The report as pretty JSON with the `timings` object removed, for
/// comparing runs.
pub fn without_timings(json: &str) -> Result<String, serde_json::Error> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timings");
    }
    serde_json::to_string_pretty(&v)
}
