//! Normalized mixed volume of `d` polytopes in `R^d`.
//!
//! Normalization: `MV(P, …, P) = d! · vol(P)`, so that for lattice polytopes
//! the value is the generic number of torus solutions of a system with those
//! Newton polytopes.
//!
//! Two independent algorithms are provided. [`mixed_volume_ie`] evaluates the
//! polarization formula over all `2^d - 1` partial Minkowski sums and is the
//! reference. [`mixed_volume_cells`] sums `|det|` over the mixed cells of the
//! fine mixed subdivision induced by a seeded random lifting.

mod cells;
mod lp;

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{GeometryError, Polytope};

pub use cells::MixedCell;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MixedVolumeError {
    #[error("expected {expected} polytopes for ambient dimension {expected}, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("polytope {index} lives in dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("lifting stayed non-generic after {} attempts (seeds {seeds:?})", seeds.len())]
    NonGenericLifting { seeds: Vec<u64> },
    #[error("lattice coordinates too large for cell enumeration")]
    CoordinateOverflow,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Inclusion–exclusion over Minkowski sums.
    Ie,
    /// Mixed cells of a random regular fine mixed subdivision.
    Cells,
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ie" => Ok(Algorithm::Ie),
            "cells" => Ok(Algorithm::Cells),
            other => Err(format!("unknown algorithm `{other}` (expected ie or cells)")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Ie => "ie",
            Algorithm::Cells => "cells",
        })
    }
}

pub const NORMALIZATION: &str = "MV(P,...,P) = d! * vol(P)";

#[derive(Clone, Debug)]
pub struct MixedVolumeResult {
    pub value: BigRational,
    pub algorithm: Algorithm,
    /// Mixed cells, for the cell algorithm.
    pub cells: Option<Vec<MixedCell>>,
    /// Seeds tried by the cell algorithm, last one successful.
    pub seeds: Vec<u64>,
    pub elapsed_ms: f64,
}

impl MixedVolumeResult {
    /// The value as a machine integer, when it is one.
    pub fn as_u64(&self) -> Option<u64> {
        if self.value.is_integer() {
            self.value.to_integer().to_u64()
        } else {
            None
        }
    }
}

fn validate(polytopes: &[Polytope]) -> Result<usize, MixedVolumeError> {
    let d = polytopes.first().map(|p| p.ambient_dim()).unwrap_or(0);
    if polytopes.len() != d || d == 0 {
        return Err(MixedVolumeError::CountMismatch {
            expected: d,
            got: polytopes.len(),
        });
    }
    for (index, p) in polytopes.iter().enumerate() {
        if p.ambient_dim() != d {
            return Err(MixedVolumeError::DimensionMismatch {
                index,
                expected: d,
                got: p.ambient_dim(),
            });
        }
    }
    Ok(d)
}

/// `MV = Σ_{∅≠S⊆[d]} (−1)^{d−|S|} vol(Σ_{i∈S} P_i)`.
pub fn mixed_volume_ie(polytopes: &[Polytope]) -> Result<MixedVolumeResult, MixedVolumeError> {
    let start = Instant::now();
    let d = validate(polytopes)?;
    let full = 1usize << d;
    // sums[S] built from sums[S without its highest element]
    let mut sums: Vec<Option<Polytope>> = vec![None; full];
    let mut total = BigRational::zero();
    for mask in 1..full {
        let high = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << high);
        let sum = match &sums[rest] {
            None => polytopes[high].clone(),
            Some(prev) => prev.minkowski_sum(&polytopes[high])?,
        };
        let vol = sum.volume();
        if (d - mask.count_ones() as usize) % 2 == 0 {
            total += vol;
        } else {
            total -= vol;
        }
        sums[mask] = Some(sum);
    }
    Ok(MixedVolumeResult {
        value: total,
        algorithm: Algorithm::Ie,
        cells: None,
        seeds: Vec::new(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Lattice images of the vertex sets together with the uniform scale that
/// made them integral.
fn lattice_points(polytopes: &[Polytope]) -> Result<(Vec<Vec<Vec<i64>>>, BigInt), MixedVolumeError> {
    let scale = polytopes
        .iter()
        .flat_map(|p| p.vertices().iter().flatten())
        .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let s = BigRational::from_integer(scale.clone());
    let pts = polytopes
        .iter()
        .map(|p| {
            p.vertices()
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|x| (x * &s).to_integer().to_i64().filter(|c| c.abs() < 1 << 20))
                        .collect::<Option<Vec<i64>>>()
                        .ok_or(MixedVolumeError::CoordinateOverflow)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((pts, scale))
}

/// Mixed volume as the sum of mixed-cell volumes.
pub fn mixed_volume_cells(
    polytopes: &[Polytope],
    seed: u64,
) -> Result<MixedVolumeResult, MixedVolumeError> {
    let start = Instant::now();
    let d = validate(polytopes)?;
    let (pts, scale) = lattice_points(polytopes)?;
    let (cells, seeds) = cells::enumerate(&pts, seed)?;
    let sum: BigInt = cells.iter().map(|c| BigInt::from(c.volume)).sum();
    // MV is homogeneous of degree d under uniform scaling
    let value = BigRational::new(sum, num_traits::pow(scale, d));
    Ok(MixedVolumeResult {
        value,
        algorithm: Algorithm::Cells,
        cells: Some(cells),
        seeds,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// The mixed cells backing [`mixed_volume_cells`], in the lattice obtained by
/// clearing denominators.
pub fn mixed_cells(polytopes: &[Polytope], seed: u64) -> Result<Vec<MixedCell>, MixedVolumeError> {
    validate(polytopes)?;
    let (pts, _) = lattice_points(polytopes)?;
    Ok(cells::enumerate(&pts, seed)?.0)
}

pub fn mixed_volume(
    polytopes: &[Polytope],
    algorithm: Algorithm,
    seed: u64,
) -> Result<MixedVolumeResult, MixedVolumeError> {
    match algorithm {
        Algorithm::Ie => mixed_volume_ie(polytopes),
        Algorithm::Cells => mixed_volume_cells(polytopes, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[&[i64]]) -> Polytope {
        Polytope::from_int_points(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn simplex(d: usize, k: i64) -> Polytope {
        let mut pts = vec![vec![0; d]];
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = k;
            pts.push(e);
        }
        Polytope::from_int_points(&pts).unwrap()
    }

    fn both(ps: &[Polytope]) -> (u64, u64) {
        let a = mixed_volume_ie(ps).unwrap().as_u64().unwrap();
        let b = mixed_volume_cells(ps, 7).unwrap().as_u64().unwrap();
        (a, b)
    }

    #[test]
    fn unit_segments() {
        let e1 = poly(&[&[0, 0], &[1, 0]]);
        let e2 = poly(&[&[0, 0], &[0, 1]]);
        assert_eq!(both(&[e1.clone(), e2.clone()]), (1, 1));
        let cells = mixed_cells(&[e1, e2], 3).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].volume, 1);
    }

    #[test]
    fn doubled_triangles() {
        let t = simplex(2, 2);
        assert_eq!(both(&[t.clone(), t]), (4, 4));
    }

    #[test]
    fn unit_simplex_in_three_dimensions() {
        let t = simplex(3, 1);
        assert_eq!(both(&[t.clone(), t.clone(), t]), (1, 1));
    }

    #[test]
    fn point_summand_gives_zero() {
        let p = poly(&[&[0, 0], &[3, 1], &[1, 2]]);
        let pt = poly(&[&[2, 2]]);
        assert_eq!(both(&[p, pt]), (0, 0));
    }

    #[test]
    fn rational_input_scales() {
        let half = Polytope::convex_hull(&[
            vec![BigRational::zero(), BigRational::zero()],
            vec![BigRational::new(1.into(), 2.into()), BigRational::zero()],
            vec![BigRational::zero(), BigRational::new(1.into(), 2.into())],
        ])
        .unwrap();
        let ie = mixed_volume_ie(&[half.clone(), half.clone()]).unwrap();
        let cells = mixed_volume_cells(&[half.clone(), half], 1).unwrap();
        assert_eq!(ie.value, BigRational::new(1.into(), 4.into()));
        assert_eq!(cells.value, ie.value);
        assert_eq!(ie.as_u64(), None);
    }

    #[test]
    fn count_mismatch() {
        let t = simplex(2, 1);
        assert!(matches!(
            mixed_volume_ie(&[t.clone()]),
            Err(MixedVolumeError::CountMismatch { .. })
        ));
        let s3 = simplex(3, 1);
        assert!(matches!(
            mixed_volume_ie(&[t, s3]),
            Err(MixedVolumeError::DimensionMismatch { .. })
        ));
    }
}
