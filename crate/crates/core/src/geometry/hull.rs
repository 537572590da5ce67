//! Beneath-beyond placing kernel.
//!
//! Points are first reduced to their affine hull: a set of coordinates on
//! which the projection is injective is selected, and the projected points are
//! scaled to integers. The kernel then places points one at a time,
//! maintaining a triangulation of the current hull together with a
//! triangulated boundary whose simplices carry primitive inner normals.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exact::{
    determinant, dot, greedy_independent, hadamard_bits, primitive_normal, rank, ExactInt,
};

/// Points expressed in integer coordinates on their affine hull.
pub(crate) struct Reduced {
    /// Affine dimension.
    pub dim: usize,
    /// Ambient coordinates kept by the projection.
    pub coords: Vec<usize>,
    /// Common denominator the projected coordinates were multiplied by.
    pub scale: BigInt,
    pub points: Vec<Vec<BigInt>>,
    /// Indices of `dim + 1` affinely independent points.
    pub initial: Vec<usize>,
}

pub(crate) fn reduce(points: &[Vec<BigRational>]) -> Reduced {
    let origin = &points[0];
    let diffs: Vec<Vec<BigRational>> = points
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    let (picked, mut coords) = greedy_independent(&diffs);
    coords.sort_unstable();
    let dim = coords.len();
    let mut initial = vec![0];
    initial.extend(picked);
    initial.dedup();

    let scale = diffs
        .iter()
        .flat_map(|d| coords.iter().map(move |&c| d[c].denom().clone()))
        .fold(BigInt::one(), |l, d| l.lcm(&d));
    let points = diffs
        .iter()
        .map(|d| {
            coords
                .iter()
                .map(|&c| (d[c].clone() * BigRational::from_integer(scale.clone())).to_integer())
                .collect()
        })
        .collect();
    Reduced {
        dim,
        coords,
        scale,
        points,
        initial,
    }
}

impl Reduced {
    /// Whether the kernel may run on `i128` without overflow.
    fn fits_i128(&self) -> bool {
        let max = self
            .points
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        // entries of edge vectors are bounded by 2*max; products of two minors
        // appear inside Bareiss elimination
        let bits = hadamard_bits(self.dim, &(max * 2u32));
        2.0 * bits + 16.0 < 126.0
    }
}

struct BoundaryFacet<T> {
    verts: Vec<usize>,
    normal: Vec<T>,
    offset: T,
}

struct Kernel<'a, T> {
    pts: &'a [Vec<T>],
    k: usize,
    /// Sum of the initial simplex vertices; `interior / (k + 1)` is interior.
    interior: Vec<T>,
    boundary: Vec<BoundaryFacet<T>>,
    simplices: Vec<Vec<usize>>,
}

impl<'a, T: ExactInt> Kernel<'a, T> {
    fn new(pts: &'a [Vec<T>], initial: &[usize]) -> Self {
        let k = initial.len() - 1;
        let mut interior = vec![T::zero(); k];
        for &i in initial {
            for (s, x) in interior.iter_mut().zip(&pts[i]) {
                *s = s.clone() + x.clone();
            }
        }
        let mut kernel = Kernel {
            pts,
            k,
            interior,
            boundary: Vec::new(),
            simplices: vec![sorted(initial.to_vec())],
        };
        for skip in 0..initial.len() {
            let verts: Vec<usize> = initial
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            let f = kernel.make_facet(sorted(verts));
            kernel.boundary.push(f);
        }
        kernel
    }

    fn make_facet(&self, verts: Vec<usize>) -> BoundaryFacet<T> {
        let base = &self.pts[verts[0]];
        let rows: Vec<Vec<T>> = verts[1..]
            .iter()
            .map(|&v| {
                self.pts[v]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect()
            })
            .collect();
        let mut normal = primitive_normal(&rows, self.k);
        let mut offset = dot(&normal, base);
        let kk = T::from_big(&BigInt::from(self.k + 1));
        if dot(&normal, &self.interior) < offset.clone() * kk {
            for x in normal.iter_mut() {
                *x = -x.clone();
            }
            offset = -offset;
        }
        BoundaryFacet {
            verts,
            normal,
            offset,
        }
    }

    fn insert(&mut self, p: usize) {
        let point = &self.pts[p];
        let visible: Vec<usize> = self
            .boundary
            .iter()
            .enumerate()
            .filter(|(_, f)| dot(&f.normal, point) < f.offset)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            return;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for &fi in &visible {
            let verts = &self.boundary[fi].verts;
            let mut simplex = verts.clone();
            simplex.push(p);
            self.simplices.push(sorted(simplex));
            for skip in 0..verts.len() {
                let ridge: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut keep = vec![true; self.boundary.len()];
        for &fi in &visible {
            keep[fi] = false;
        }
        let mut it = keep.iter();
        self.boundary.retain(|_| *it.next().unwrap());
        let mut horizon: Vec<Vec<usize>> = ridges
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort_unstable();
        for mut ridge in horizon {
            ridge.push(p);
            let f = self.make_facet(sorted(ridge));
            self.boundary.push(f);
        }
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn to_kernel_points<T: ExactInt>(points: &[Vec<BigInt>]) -> Vec<Vec<T>> {
    points
        .iter()
        .map(|p| p.iter().map(T::from_big).collect())
        .collect()
}

/// Output of a full hull pass.
pub(crate) struct HullData {
    pub coords: Vec<usize>,
    /// Indices of input points that are vertices, ascending.
    pub vertices: Vec<usize>,
    /// Primitive inner facet normals in the projected coordinates.
    pub facet_normals: Vec<Vec<BigInt>>,
}

pub(crate) fn hull(points: &[Vec<BigRational>]) -> HullData {
    let red = reduce(points);
    if red.dim == 0 {
        return HullData {
            coords: Vec::new(),
            vertices: vec![0],
            facet_normals: Vec::new(),
        };
    }
    if red.fits_i128() {
        hull_with::<i128>(&red)
    } else {
        hull_with::<BigInt>(&red)
    }
}

fn hull_with<T: ExactInt>(red: &Reduced) -> HullData {
    let pts: Vec<Vec<T>> = to_kernel_points(&red.points);
    let mut kernel = Kernel::new(&pts, &red.initial);
    for i in 0..pts.len() {
        if !red.initial.contains(&i) {
            kernel.insert(i);
        }
    }
    // merge coplanar boundary simplices into facets
    let mut facets: Vec<(Vec<T>, T)> = kernel
        .boundary
        .iter()
        .map(|f| (f.normal.clone(), f.offset.clone()))
        .collect();
    facets.sort();
    facets.dedup();

    let mut candidates: Vec<usize> = kernel
        .boundary
        .iter()
        .flat_map(|f| f.verts.iter().copied())
        .collect();
    candidates.sort_unstable();
    candidates.dedup();

    let k = red.dim;
    let vertices = candidates
        .into_iter()
        .filter(|&c| {
            let tight: Vec<Vec<T>> = facets
                .iter()
                .filter(|(n, o)| dot(n, &pts[c]) == *o)
                .map(|(n, _)| n.clone())
                .collect();
            tight.len() >= k && rank(tight) == k
        })
        .collect();
    HullData {
        coords: red.coords.clone(),
        vertices,
        facet_normals: facets.into_iter().map(|(n, _)| n.iter().map(|x| x.to_big()).collect()).collect(),
    }
}

/// Placing triangulation of `points`, inserted in the given order after an
/// initial simplex chosen greedily in that order.
pub(crate) struct PlacingData {
    pub dim: usize,
    pub simplices: Vec<Vec<usize>>,
    /// Euclidean `dim`-volume of the hull measured in the projected
    /// coordinates (equal to the ambient volume when full-dimensional).
    pub volume: BigRational,
}

pub(crate) fn placing(points: &[Vec<BigRational>]) -> PlacingData {
    let red = reduce(points);
    if red.dim == 0 {
        return PlacingData {
            dim: 0,
            simplices: vec![vec![0]],
            volume: BigRational::zero(),
        };
    }
    let (simplices, det_sum) = if red.fits_i128() {
        placing_with::<i128>(&red)
    } else {
        placing_with::<BigInt>(&red)
    };
    let k = red.dim;
    let factorial: BigInt = (1..=k).map(BigInt::from).product();
    let denom = factorial * num_traits::pow(red.scale.clone(), k);
    PlacingData {
        dim: k,
        simplices,
        volume: BigRational::new(det_sum, denom),
    }
}

fn placing_with<T: ExactInt>(red: &Reduced) -> (Vec<Vec<usize>>, BigInt) {
    let pts: Vec<Vec<T>> = to_kernel_points(&red.points);
    let mut kernel = Kernel::new(&pts, &red.initial);
    for i in 0..pts.len() {
        if !red.initial.contains(&i) {
            kernel.insert(i);
        }
    }
    let mut total = BigInt::zero();
    for s in &kernel.simplices {
        let base = &pts[s[0]];
        let m: Vec<Vec<T>> = s[1..]
            .iter()
            .map(|&v| {
                pts[v]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect()
            })
            .collect();
        total += determinant(m).abs().to_big();
    }
    let mut simplices = kernel.simplices;
    simplices.sort();
    (simplices, total)
}
