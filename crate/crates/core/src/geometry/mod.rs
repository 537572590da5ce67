//! Exact rational polytopes given by their vertices.
//!
//! All predicates are decided in exact arithmetic: coordinates are rationals,
//! and the hull kernel works on integer images of the points.

mod exact;
mod hull;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;


#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("cannot take the convex hull of an empty point set")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction vector must be nonzero")]
    ZeroDirection,
}

pub type Point = Vec<BigRational>;

pub fn int_point(coords: &[i64]) -> Point {
    coords
        .iter()
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect()
}

/// Convex polytope in `Q^d` stored by its irredundant vertex set, sorted
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<Point>,
}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                let c: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", c.join(","))
            })
            .collect();
        write!(f, "Polytope[{}]{{{}}}", self.ambient_dim, vs.join(" "))
    }
}

/// Simplices of a triangulation, as index sets into [`Polytope::vertices`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub simplices: Vec<Vec<usize>>,
}

impl Polytope {
    /// Convex hull of a finite point set.
    pub fn convex_hull(points: &[Point]) -> Result<Polytope, GeometryError> {
        let first = points.first().ok_or(GeometryError::Empty)?;
        let d = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        let unique: Vec<Point> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if unique.len() == 1 {
            return Ok(Polytope {
                ambient_dim: d,
                vertices: unique,
            });
        }
        let data = hull::hull(&unique);
        let vertices = data.vertices.iter().map(|&i| unique[i].clone()).collect();
        Ok(Polytope {
            ambient_dim: d,
            vertices,
        })
    }

    /// Hull of integer points.
    pub fn from_int_points(points: &[Vec<i64>]) -> Result<Polytope, GeometryError> {
        let pts: Vec<Point> = points.iter().map(|p| int_point(p)).collect();
        Self::convex_hull(&pts)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        if self.vertices.len() == 1 {
            return 0;
        }
        hull::reduce(&self.vertices).dim
    }

    /// Whether every vertex has integer coordinates.
    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().flatten().all(|x| x.is_integer())
    }

    fn check_direction(&self, w: &[BigRational]) -> Result<(), GeometryError> {
        if w.len() != self.ambient_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.ambient_dim,
                got: w.len(),
            });
        }
        if w.iter().all(|x| x.is_zero()) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(())
    }

    /// `min ⟨w, x⟩` over the polytope.
    pub fn support_value(&self, w: &[BigRational]) -> Result<BigRational, GeometryError> {
        self.check_direction(w)?;
        Ok(self
            .vertices
            .iter()
            .map(|v| rational_dot(w, v))
            .min()
            .expect("polytopes are nonempty"))
    }

    /// The face on which `⟨w, ·⟩` attains its minimum.
    pub fn face(&self, w: &[BigRational]) -> Result<Polytope, GeometryError> {
        let min = self.support_value(w)?;
        Ok(Polytope {
            ambient_dim: self.ambient_dim,
            vertices: self
                .vertices
                .iter()
                .filter(|v| rational_dot(w, v) == min)
                .cloned()
                .collect(),
        })
    }

    pub fn face_int(&self, w: &[i64]) -> Result<Polytope, GeometryError> {
        self.face(&int_point(w))
    }

    /// Vertex-sum Minkowski sum, reduced to its vertices.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope, GeometryError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        let sums: BTreeSet<Point> = self
            .vertices
            .iter()
            .flat_map(|a| {
                other
                    .vertices
                    .iter()
                    .map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect::<Point>())
            })
            .collect();
        let pts: Vec<Point> = sums.into_iter().collect();
        Self::convex_hull(&pts)
    }

    pub fn translate(&self, v: &[BigRational]) -> Polytope {
        let mut vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
            .collect();
        vertices.sort();
        Polytope {
            ambient_dim: self.ambient_dim,
            vertices,
        }
    }

    /// Homothety `k·P` for a positive scale.
    pub fn scale(&self, k: &BigRational) -> Polytope {
        assert!(k.is_positive());
        Polytope {
            ambient_dim: self.ambient_dim,
            vertices: self
                .vertices
                .iter()
                .map(|p| p.iter().map(|x| x * k).collect())
                .collect(),
        }
    }

    /// Placing triangulation of the vertex set in canonical order.
    pub fn triangulate(&self) -> Triangulation {
        if self.vertices.len() == 1 {
            return Triangulation {
                simplices: vec![vec![0]],
            };
        }
        Triangulation {
            simplices: hull::placing(&self.vertices).simplices,
        }
    }

    /// Euclidean volume in the ambient space; zero unless full-dimensional.
    pub fn volume(&self) -> BigRational {
        if self.vertices.len() <= self.ambient_dim {
            return BigRational::zero();
        }
        let data = hull::placing(&self.vertices);
        if data.dim < self.ambient_dim {
            BigRational::zero()
        } else {
            data.volume
        }
    }

    /// Primitive integer inner facet normals, sorted. For a polytope that is
    /// not full-dimensional the normals are taken inside its affine hull and
    /// padded with zeros on the coordinates the hull projects away.
    pub fn facet_normals(&self) -> Vec<Vec<BigInt>> {
        if self.vertices.len() == 1 {
            return Vec::new();
        }
        let data = hull::hull(&self.vertices);
        let mut normals: Vec<Vec<BigInt>> = data
            .facet_normals
            .iter()
            .map(|n| {
                let mut full = vec![BigInt::zero(); self.ambient_dim];
                for (&c, x) in data.coords.iter().zip(n) {
                    full[c] = x.clone();
                }
                full
            })
            .collect();
        normals.sort();
        normals
    }
}

/// Rank of a rational matrix given by rows.
pub(crate) fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    exact::greedy_independent(rows).0.len()
}

pub fn rational_dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[i64]]) -> Vec<Point> {
        v.iter().map(|p| int_point(p)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn square() -> Polytope {
        Polytope::from_int_points(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    fn triangle(k: i64) -> Polytope {
        Polytope::from_int_points(&[vec![0, 0], vec![k, 0], vec![0, k]]).unwrap()
    }

    #[test]
    fn hull_drops_interior_and_edge_points() {
        let mut input = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        input.push(vec![q(1, 2), q(1, 2)]);
        let p = Polytope::convex_hull(&input).unwrap();
        assert_eq!(p.vertices(), square().vertices());

        let single = Polytope::from_int_points(&[vec![0, 0]]).unwrap();
        assert_eq!(single.vertices().len(), 1);

        let t = Polytope::from_int_points(&[vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 1]]).unwrap();
        assert_eq!(t.vertices(), &pts(&[&[0, 0], &[0, 2], &[2, 0]])[..]);
    }

    #[test]
    fn hull_errors() {
        assert_eq!(Polytope::convex_hull(&[]), Err(GeometryError::Empty));
        assert!(matches!(
            Polytope::convex_hull(&pts(&[&[0, 0], &[1]])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn faces() {
        let t = triangle(2);
        assert_eq!(t.face_int(&[1, 1]).unwrap().vertices(), &pts(&[&[0, 0]])[..]);
        assert_eq!(t.face_int(&[0, -1]).unwrap().vertices(), &pts(&[&[0, 2]])[..]);
        assert_eq!(
            square().face_int(&[-1, 0]).unwrap().vertices(),
            &pts(&[&[1, 0], &[1, 1]])[..]
        );
        assert_eq!(t.face_int(&[0, 0]), Err(GeometryError::ZeroDirection));
    }

    #[test]
    fn minkowski_examples() {
        let e1 = Polytope::from_int_points(&[vec![0, 0], vec![1, 0]]).unwrap();
        let e2 = Polytope::from_int_points(&[vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(e1.minkowski_sum(&e2).unwrap(), square());
        let v = Polytope::from_int_points(&[vec![3, -1]]).unwrap();
        assert_eq!(square().minkowski_sum(&v).unwrap(), square().translate(&int_point(&[3, -1])));
        assert_eq!(triangle(1).minkowski_sum(&triangle(1)).unwrap(), triangle(2));
        let p3 = Polytope::from_int_points(&[vec![0, 0, 0]]).unwrap();
        assert!(matches!(
            square().minkowski_sum(&p3),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn volumes() {
        assert_eq!(square().volume(), q(1, 1));
        assert_eq!(triangle(1).volume(), q(1, 2));
        let seg = Polytope::from_int_points(&[vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(seg.volume(), q(0, 1));
        let half = Polytope::convex_hull(&[
            vec![q(0, 1), q(0, 1), q(0, 1)],
            vec![q(1, 2), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(1, 3), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(3, 1)],
        ])
        .unwrap();
        assert_eq!(half.volume(), q(1, 12));
    }

    #[test]
    fn normals() {
        let n = |p: &Polytope| -> Vec<Vec<i64>> {
            p.facet_normals()
                .iter()
                .map(|v| v.iter().map(|x| i64::try_from(x).unwrap()).collect())
                .collect()
        };
        assert_eq!(n(&square()), vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
        assert_eq!(n(&triangle(1)), vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
        let seg = Polytope::from_int_points(&[vec![0], vec![1]]).unwrap();
        assert_eq!(n(&seg), vec![vec![-1], vec![1]]);
    }

    #[test]
    fn triangulation_covers_cube() {
        let mut cube = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    cube.push(vec![x, y, z]);
                }
            }
        }
        let c = Polytope::from_int_points(&cube).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.volume(), q(1, 1));
        let t = c.triangulate();
        assert!(t.simplices.iter().all(|s| s.len() == 4));
        assert_eq!(c.facet_normals().len(), 6);
    }
}
