//! Mixed-cell enumeration for a random integer lifting.
//!
//! Each point `a` of the `i`-th configuration is lifted to `(a, ω_i(a))`. A
//! choice of one edge `{a_i, b_i}` per configuration is a mixed cell when some
//! `α` makes every chosen edge the unique minimizer of `⟨α, ·⟩ + ω_i` on its
//! configuration. Candidates are explored depth first, pruning with exact
//! feasibility checks. Ties at a leaf, or a feasible choice of linearly
//! dependent edges, mean the lifting is not generic; the enumeration then
//! restarts with a fresh seed and a wider lifting range.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::lp::System;
use super::MixedVolumeError;

const MAX_ATTEMPTS: u32 = 8;

/// One edge per polytope; the cell is the Minkowski sum of the edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MixedCell {
    pub edges: Vec<[Vec<i64>; 2]>,
    /// `|det|` of the edge vectors.
    pub volume: u64,
}

struct NonGeneric;

struct Lifted<'a> {
    pts: &'a [Vec<Vec<i64>>],
    lift: Vec<Vec<i64>>,
    dim: usize,
}

/// An edge `{a, b}` of configuration `poly`, by point indices.
#[derive(Clone, Copy, Debug)]
struct Edge {
    poly: usize,
    a: usize,
    b: usize,
}

pub(super) fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub(super) fn enumerate(
    pts: &[Vec<Vec<i64>>],
    seed: u64,
) -> Result<(Vec<MixedCell>, Vec<u64>), MixedVolumeError> {
    let dim = pts.len();
    let mut seeds = Vec::new();
    for attempt in 0..MAX_ATTEMPTS {
        let s = attempt_seed(seed, attempt);
        seeds.push(s);
        let range = 1i64 << (16 + 4 * attempt).min(40);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let lift = pts
            .iter()
            .map(|conf| conf.iter().map(|_| rng.gen_range(0..range)).collect())
            .collect();
        let lifted = Lifted { pts, lift, dim };
        if let Ok(mut cells) = lifted.cells() {
            cells.sort();
            return Ok((cells, seeds));
        }
    }
    Err(MixedVolumeError::NonGenericLifting { seeds })
}

impl Lifted<'_> {
    fn diff(&self, poly: usize, c: usize, a: usize) -> Vec<i64> {
        self.pts[poly][c]
            .iter()
            .zip(&self.pts[poly][a])
            .map(|(x, y)| x - y)
            .collect()
    }

    /// Adds the constraints saying edge `e` is a lower edge of its lifted
    /// configuration under `α`.
    fn constrain(&self, sys: &mut System, e: Edge) {
        let w = &self.lift[e.poly];
        sys.equalities.push((self.diff(e.poly, e.b, e.a), w[e.a] - w[e.b]));
        for c in 0..self.pts[e.poly].len() {
            if c != e.a && c != e.b {
                sys.inequalities.push((self.diff(e.poly, c, e.a), w[e.a] - w[c]));
            }
        }
    }

    fn lower_edges(&self, poly: usize) -> Vec<Edge> {
        let n = self.pts[poly].len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let e = Edge { poly, a, b };
                let mut sys = System {
                    dim: self.dim,
                    ..Default::default()
                };
                self.constrain(&mut sys, e);
                if sys.feasible() {
                    out.push(e);
                }
            }
        }
        out
    }

    fn cells(&self) -> Result<Vec<MixedCell>, NonGeneric> {
        let candidates: Vec<Vec<Edge>> = (0..self.dim).map(|i| self.lower_edges(i)).collect();
        if candidates.iter().any(|c| c.is_empty()) {
            return Ok(Vec::new());
        }
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by_key(|&i| candidates[i].len());
        let ordered: Vec<&[Edge]> = order.iter().map(|&i| candidates[i].as_slice()).collect();

        let per_root: Vec<Result<Vec<MixedCell>, NonGeneric>> = ordered[0]
            .par_iter()
            .map(|&root| {
                let mut found = Vec::new();
                let mut sys = System {
                    dim: self.dim,
                    ..Default::default()
                };
                self.constrain(&mut sys, root);
                let mut chosen = vec![root];
                self.extend(&ordered, &mut chosen, &sys, &mut found)?;
                Ok(found)
            })
            .collect();
        let mut cells = Vec::new();
        for r in per_root {
            cells.extend(r?);
        }
        Ok(cells)
    }

    fn extend(
        &self,
        ordered: &[&[Edge]],
        chosen: &mut Vec<Edge>,
        sys: &System,
        found: &mut Vec<MixedCell>,
    ) -> Result<(), NonGeneric> {
        let level = chosen.len();
        if level == self.dim {
            if let Some(cell) = self.leaf(chosen)? {
                found.push(cell);
            }
            return Ok(());
        }
        for &e in ordered[level] {
            let mut next = sys.clone();
            self.constrain(&mut next, e);
            let independent = next.equality_rank() == level + 1;
            if level + 1 == self.dim && independent {
                chosen.push(e);
                let r = self.extend(ordered, chosen, &next, found);
                chosen.pop();
                r?;
                continue;
            }
            if !next.feasible() {
                continue;
            }
            if !independent {
                return Err(NonGeneric);
            }
            chosen.push(e);
            let r = self.extend(ordered, chosen, &next, found);
            chosen.pop();
            r?;
        }
        Ok(())
    }

    /// Solves for the unique `α` of a full choice of independent edges and
    /// checks that every other point lies strictly above; a tie only matters
    /// when no point lies below.
    fn leaf(&self, chosen: &[Edge]) -> Result<Option<MixedCell>, NonGeneric> {
        let d = self.dim;
        let q = |x: i64| BigRational::from_integer(BigInt::from(x));
        let mut rows: Vec<Vec<BigRational>> = chosen
            .iter()
            .map(|&e| {
                let mut r: Vec<BigRational> =
                    self.diff(e.poly, e.b, e.a).into_iter().map(q).collect();
                r.push(q(self.lift[e.poly][e.a] - self.lift[e.poly][e.b]));
                r
            })
            .collect();
        let det = gauss_jordan(&mut rows, d);
        let alpha: Vec<BigRational> = rows.iter().map(|r| r[d].clone()).collect();
        let mut tie = false;
        for &e in chosen {
            let w = &self.lift[e.poly];
            for c in 0..self.pts[e.poly].len() {
                if c == e.a || c == e.b {
                    continue;
                }
                let diff = self.diff(e.poly, c, e.a);
                let lhs: BigRational = diff.iter().zip(&alpha).map(|(&x, a)| q(x) * a).sum();
                let slack = lhs - q(w[e.a] - w[c]);
                if slack.is_negative() {
                    return Ok(None);
                }
                tie |= slack.is_zero();
            }
        }
        if tie {
            return Err(NonGeneric);
        }
        let mut edges = vec![[Vec::new(), Vec::new()]; d];
        for &e in chosen {
            edges[e.poly] = [self.pts[e.poly][e.a].clone(), self.pts[e.poly][e.b].clone()];
        }
        let volume = det.abs().to_integer().to_u64().expect("cell volume fits u64");
        Ok(Some(MixedCell { edges, volume }))
    }
}

/// Reduces an augmented `d × (d+1)` system with independent rows to
/// `[I | x]` in place and returns the determinant of the coefficient part.
fn gauss_jordan(rows: &mut [Vec<BigRational>], d: usize) -> BigRational {
    let mut det = BigRational::from_integer(BigInt::from(1));
    for c in 0..d {
        let p = (c..d)
            .find(|&i| !rows[i][c].is_zero())
            .expect("independent edges give a nonsingular system");
        if p != c {
            rows.swap(p, c);
            det = -det;
        }
        let pv = rows[c][c].clone();
        det *= &pv;
        for x in rows[c].iter_mut() {
            *x /= &pv;
        }
        for i in 0..d {
            if i != c && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[c].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}
