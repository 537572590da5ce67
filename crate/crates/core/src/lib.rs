//! Euclidean distance degree of complete intersections.
//!
//! The crate computes the mixed-volume bound on the number of critical points
//! of the squared distance function restricted to `X = {f_1 = … = f_m = 0}`
//! and checks it against a numerical count obtained by homotopy continuation.

pub mod poly;
pub mod geometry;
pub mod mixed_volume;
pub mod ed;
pub mod numeric;
pub mod cli;
