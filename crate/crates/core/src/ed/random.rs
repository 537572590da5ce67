//! Seeded sampling of data points and generic coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::ExactPoly;

const U_RANGE: i64 = 10;
const U_MAX_DENOM: i64 = 64;
const COEFF_RANGE: i64 = 10;
const COEFF_MAX_DENOM: i64 = 16;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational in `[-range, range]` with denominator at most `max_denom`.
fn nonzero_rational<R: Rng>(rng: &mut R, range: i64, max_denom: i64) -> BigRational {
    loop {
        let q = rng.gen_range(1..=max_denom);
        let p = rng.gen_range(-range * q..=range * q);
        if p != 0 {
            return BigRational::new(BigInt::from(p), BigInt::from(q));
        }
    }
}

/// Data point with coordinates in `[-10, 10]`, denominators at most 64 and
/// no zero coordinate.
pub fn sample_u(n: usize, seed: u64) -> Vec<BigRational> {
    let mut r = rng(seed ^ 0x5eed_0000_0000_0001);
    (0..n)
        .map(|_| nonzero_rational(&mut r, U_RANGE, U_MAX_DENOM))
        .collect()
}

pub fn random_coefficient<R: Rng>(rng: &mut R) -> BigRational {
    nonzero_rational(rng, COEFF_RANGE, COEFF_MAX_DENOM)
}

/// Keeps the support of `f`, drawing every coefficient afresh.
pub fn randomize_coefficients<R: Rng>(f: &ExactPoly, rng: &mut R) -> ExactPoly {
    ExactPoly::from_terms(
        f.arity(),
        f.terms()
            .map(|(e, _)| (e.clone(), random_coefficient(rng)))
            .collect::<Vec<_>>(),
    )
}
