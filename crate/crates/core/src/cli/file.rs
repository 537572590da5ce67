//! The line-oriented problem file.
//!
//! ```text
//! # unit circle
//! vars = x, y
//! f1 = x^2 + y^2 - 1
//! u = 3, 4
//! seed = 7
//! ```
//!
//! Recognised keys: `vars`, `f1`…`fm`, `u`, `seed`, `random_coefficients`
//! and the solver tolerances `residual_tol`, `dedup_radius`, `torus_tol`,
//! `rank_tol`, `min_step`, `max_failed_paths`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use thiserror::Error;

use crate::ed::{sample_u, EDProblem};
use crate::numeric::SolverOptions;
use crate::poly::{parse_polynomial, ExactPoly, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("line {line}, column {column}: {message}")]
    At {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn at(line: usize, column: usize, message: impl Into<String>) -> LoadError {
    LoadError::At {
        line,
        column,
        message: message.into(),
    }
}

/// A value together with where it was written.
#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    /// 1-based column where the value starts.
    column: usize,
    value: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub vars: Vec<String>,
    pub polynomials: Vec<String>,
    pub parsed: Vec<ExactPoly>,
    pub u: Option<Vec<BigRational>>,
    pub seed: Option<u64>,
    /// Replace the written coefficients by seeded random ones.
    pub random_coefficients: bool,
    pub options: SolverOptions,
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars = {}", self.vars.join(", "))?;
        for (j, p) in self.polynomials.iter().enumerate() {
            writeln!(f, "f{} = {}", j + 1, p)?;
        }
        if let Some(u) = &self.u {
            let u: Vec<String> = u.iter().map(|x| x.to_string()).collect();
            writeln!(f, "u = {}", u.join(", "))?;
        }
        if let Some(s) = self.seed {
            writeln!(f, "seed = {s}")?;
        }
        if self.random_coefficients {
            writeln!(f, "random_coefficients = true")?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads `3`, `-3/4` or `1.25` as an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        let digits: BigInt = format!("{}{}", if int.is_empty() { "0" } else { int }, frac)
            .parse()
            .ok()?;
        let q = BigRational::new(digits, BigInt::from(10).pow(frac.len()));
        return Some(if negative { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

fn parse_message(err: &ParseError) -> String {
    match err {
        ParseError::Syntax { msg, .. } => msg.clone(),
        ParseError::UnknownVariable { name, .. } => format!("unknown variable `{name}`"),
        ParseError::NegativeExponent { .. } => "negative exponent".to_string(),
    }
}

/// Splits a comma list, keeping the 1-based column of each item.
fn split_list(e: &Entry) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in e.value.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push((e.column + offset + lead, part.trim()));
        offset += part.len() + 1;
    }
    out
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(at(line, col, "expected `key = value`"));
            };
            let key = content[..eq].trim();
            let key_col = content.len() - content.trim_start().len() + 1;
            let rest = &content[eq + 1..];
            let lead = rest.len() - rest.trim_start().len();
            let entry = Entry {
                line,
                column: eq + 2 + lead,
                value: rest.trim().to_string(),
            };
            if entry.value.is_empty() {
                return Err(at(line, entry.column, format!("missing value for `{key}`")));
            }
            if entries.contains_key(key) {
                return Err(at(line, key_col, format!("duplicate key `{key}`")));
            }
            entries.insert(key.to_string(), entry);
        }
        Self::from_entries(entries)
    }

    fn from_entries(mut entries: BTreeMap<String, Entry>) -> Result<Self, LoadError> {
        let vars_entry = entries
            .remove("vars")
            .ok_or_else(|| LoadError::Invalid("missing `vars` line".into()))?;
        let mut vars: Vec<String> = Vec::new();
        for (col, name) in split_list(&vars_entry) {
            if !is_identifier(name) {
                return Err(at(vars_entry.line, col, format!("invalid variable name `{name}`")));
            }
            if vars.iter().any(|v| v == name) {
                return Err(at(vars_entry.line, col, format!("duplicate variable `{name}`")));
            }
            vars.push(name.to_string());
        }

        let mut polys: BTreeMap<usize, Entry> = BTreeMap::new();
        let mut u = None;
        let mut seed = None;
        let mut random_coefficients = false;
        let mut options = SolverOptions::default();
        for (key, e) in entries {
            let float = |e: &Entry| {
                e.value
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite() && *x > 0.0)
                    .ok_or_else(|| at(e.line, e.column, "expected a positive number"))
            };
            match key.as_str() {
                "u" => {
                    let mut vals = Vec::new();
                    for (col, s) in split_list(&e) {
                        vals.push(
                            parse_rational(s)
                                .ok_or_else(|| at(e.line, col, format!("invalid rational `{s}`")))?,
                        );
                    }
                    u = Some(vals);
                }
                "seed" => {
                    seed = Some(
                        e.value
                            .parse()
                            .map_err(|_| at(e.line, e.column, "expected a nonnegative integer"))?,
                    )
                }
                "random_coefficients" => {
                    random_coefficients = e
                        .value
                        .parse()
                        .map_err(|_| at(e.line, e.column, "expected `true` or `false`"))?
                }
                "residual_tol" => options.residual_tol = float(&e)?,
                "dedup_radius" => options.dedup_radius = float(&e)?,
                "torus_tol" => options.torus_tol = float(&e)?,
                "rank_tol" => options.rank_tol = float(&e)?,
                "min_step" => options.min_step = float(&e)?,
                "max_failed_paths" => {
                    options.max_failed_paths = e
                        .value
                        .parse()
                        .map_err(|_| at(e.line, e.column, "expected a nonnegative integer"))?
                }
                k => match k.strip_prefix('f').and_then(|d| d.parse::<usize>().ok()) {
                    Some(j) if j >= 1 => {
                        polys.insert(j, e);
                    }
                    _ => {
                        return Err(at(e.line, 1, format!("unknown key `{k}`")));
                    }
                },
            }
        }

        let m = polys.len();
        if let Some((&j, e)) = polys.iter().find(|(&j, _)| j > m) {
            return Err(at(e.line, 1, format!("f{j} given but equations must be numbered f1..f{m}")));
        }
        if m == 0 {
            return Err(LoadError::Invalid("no equations (expected f1 = ...)".into()));
        }
        if m >= vars.len() {
            return Err(LoadError::Invalid(format!(
                "need fewer equations than variables, got {m} equations in {} variables",
                vars.len()
            )));
        }
        let mut parsed = Vec::with_capacity(m);
        let mut texts = Vec::with_capacity(m);
        for e in polys.values() {
            let p = parse_polynomial(&e.value, &vars)
                .map_err(|err| at(e.line, e.column + err.column() - 1, parse_message(&err)))?;
            if p.is_constant() {
                return Err(at(e.line, e.column, "equation is constant"));
            }
            parsed.push(p);
            texts.push(e.value.clone());
        }
        if let Some(u) = &u {
            if u.len() != vars.len() {
                return Err(LoadError::Invalid(format!(
                    "u has {} entries for {} variables",
                    u.len(),
                    vars.len()
                )));
            }
        }
        Ok(ProblemFile {
            vars,
            polynomials: texts,
            parsed,
            u,
            seed,
            random_coefficients,
            options,
        })
    }

    pub fn read(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// The problem for `seed`: random coefficients if requested, and `u`
    /// sampled when the file has none.
    pub fn problem(&self, seed: u64) -> Result<EDProblem, LoadError> {
        let u = self
            .u
            .clone()
            .unwrap_or_else(|| sample_u(self.vars.len(), seed));
        let p = EDProblem::new(self.vars.clone(), self.parsed.clone(), u)
            .map_err(|e| LoadError::Invalid(e.to_string()))?;
        Ok(if self.random_coefficients {
            p.with_random_coefficients(seed)
        } else {
            p
        })
    }
}

/// Reads a problem file, using its own seed (or 0) for anything random.
pub fn load_problem(path: &Path) -> Result<EDProblem, LoadError> {
    let file = ProblemFile::read(path)?;
    file.problem(file.seed.unwrap_or(0))
}
