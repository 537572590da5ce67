//! Exact linear feasibility for small systems.
//!
//! Decides whether `{α ∈ Q^d : E α = g, A α ≥ b}` is nonempty. Equalities are
//! eliminated by exact Gaussian elimination; the remaining inequality system
//! in free parameters goes through a phase-one dictionary simplex with Bland's
//! rule. Arithmetic first runs on `i128` rationals with overflow checks and
//! falls back to big rationals when a value does not fit.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub(crate) trait Field: Clone + Debug {
    fn zero() -> Self;
    fn from_i64(x: i64) -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> Ordering;
    fn compare(&self, o: &Self) -> Option<Ordering>;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> Ordering {
        if self.is_negative() {
            Ordering::Less
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
    fn compare(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Reduced fraction over `i128`; every operation reports overflow as `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Q128 {
    num: i128,
    den: i128,
}

impl Q128 {
    fn new(num: i128, den: i128) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(Q128 { num: n, den: d })
    }
}

impl Field for Q128 {
    fn zero() -> Self {
        Q128 { num: 0, den: 1 }
    }
    fn from_i64(x: i64) -> Self {
        Q128 {
            num: x as i128,
            den: 1,
        }
    }
    fn add(&self, o: &Self) -> Option<Self> {
        let g = self.den.gcd(&o.den);
        let l = (self.den / g).checked_mul(o.den)?;
        let a = self.num.checked_mul(l / self.den)?;
        let b = o.num.checked_mul(l / o.den)?;
        Q128::new(a.checked_add(b)?, l)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.add(&Q128 {
            num: o.num.checked_neg()?,
            den: o.den,
        })
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        let g1 = self.num.gcd(&o.den).max(1);
        let g2 = o.num.gcd(&self.den).max(1);
        let n = (self.num / g1).checked_mul(o.num / g2)?;
        let d = (self.den / g2).checked_mul(o.den / g1)?;
        Q128::new(n, d)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.num == 0 {
            return None;
        }
        self.mul(&Q128::new(o.den, o.num)?)
    }
    fn is_zero(&self) -> bool {
        self.num == 0
    }
    fn signum(&self) -> Ordering {
        self.num.cmp(&0)
    }
    fn compare(&self, o: &Self) -> Option<Ordering> {
        Some(self.sub(o)?.signum())
    }
}

/// Integer data of a feasibility problem.
#[derive(Clone, Debug, Default)]
pub(crate) struct System {
    pub dim: usize,
    /// Rows `(e, g)` meaning `⟨e, α⟩ = g`.
    pub equalities: Vec<(Vec<i64>, i64)>,
    /// Rows `(a, b)` meaning `⟨a, α⟩ ≥ b`.
    pub inequalities: Vec<(Vec<i64>, i64)>,
}

impl System {
    pub fn feasible(&self) -> bool {
        match feasible_in::<Q128>(self) {
            Some(ans) => ans,
            None => feasible_in::<BigRational>(self).expect("big rationals never overflow"),
        }
    }

    /// Rank of the equality rows.
    pub fn equality_rank(&self) -> usize {
        let rows: Vec<Vec<BigRational>> = self
            .equalities
            .iter()
            .map(|(e, _)| e.iter().map(|&x| BigRational::from_i64(x)).collect())
            .collect();
        crate::geometry::rational_rank(&rows)
    }
}

fn feasible_in<F: Field>(sys: &System) -> Option<bool> {
    let d = sys.dim;
    // eliminate equalities: α = α0 + N t
    let mut rows: Vec<Vec<F>> = sys
        .equalities
        .iter()
        .map(|(e, g)| {
            let mut r: Vec<F> = e.iter().map(|&x| F::from_i64(x)).collect();
            r.push(F::from_i64(*g));
            r
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.div(&pv)?;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=d {
                    let v = rows[i][j].sub(&f.mul(&rows[r][j])?)?;
                    rows[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    // leftover rows are 0 = g
    if rows[r..].iter().any(|row| !row[d].is_zero()) {
        return Some(false);
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    // α_pivot = g' - Σ_free a_f t_f; α_free = t_f
    let mut base = vec![F::zero(); d];
    let mut dirs = vec![vec![F::zero(); free.len()]; d];
    for (ri, &pc) in pivots.iter().enumerate() {
        base[pc] = rows[ri][d].clone();
        for (fi, &fc) in free.iter().enumerate() {
            dirs[pc][fi] = F::zero().sub(&rows[ri][fc])?;
        }
    }
    for (fi, &fc) in free.iter().enumerate() {
        dirs[fc][fi] = F::from_i64(1);
    }
    // A α ≥ b  →  (A N) t ≥ b − A α0
    let mut g = Vec::with_capacity(sys.inequalities.len());
    let mut h = Vec::with_capacity(sys.inequalities.len());
    for (a, b) in &sys.inequalities {
        let mut rhs = F::from_i64(*b);
        let mut row = vec![F::zero(); free.len()];
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            let fa = F::from_i64(aj);
            rhs = rhs.sub(&fa.mul(&base[j])?)?;
            for (fi, slot) in row.iter_mut().enumerate() {
                if !dirs[j][fi].is_zero() {
                    *slot = slot.add(&fa.mul(&dirs[j][fi])?)?;
                }
            }
        }
        g.push(row);
        h.push(rhs);
    }
    phase_one(&g, &h)
}

/// Is `{t : G t ≥ h}` nonempty, `t` free?
fn phase_one<F: Field>(g: &[Vec<F>], h: &[F]) -> Option<bool> {
    let rows = g.len();
    if rows == 0 {
        return Some(true);
    }
    let r = g[0].len();
    if r == 0 {
        return Some(h.iter().all(|x| x.signum() != Ordering::Greater));
    }
    if h.iter().all(|x| x.signum() != Ordering::Greater) {
        return Some(true);
    }
    // variables: 0..r t⁺, r..2r t⁻, 2r s, 2r+1.. slacks
    let s_var = 2 * r;
    let ncols = 2 * r + 1;
    let mut nonbasic: Vec<usize> = (0..ncols).collect();
    let mut basic: Vec<usize> = (0..rows).map(|i| ncols + i).collect();
    // dict[i] = [const, coef per nonbasic column]
    let mut dict: Vec<Vec<F>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = Vec::with_capacity(ncols + 1);
        row.push(F::zero().sub(&h[i])?);
        for x in &g[i] {
            row.push(x.clone());
        }
        for x in &g[i] {
            row.push(F::zero().sub(x)?);
        }
        row.push(F::from_i64(1));
        dict.push(row);
    }
    let mut obj: Vec<F> = vec![F::zero(); ncols + 1];
    obj[1 + s_var] = F::from_i64(-1);

    // s enters at the most violated row
    let mut leave = 0;
    for i in 1..rows {
        if dict[i][0].compare(&dict[leave][0])? == Ordering::Less {
            leave = i;
        }
    }
    pivot(&mut dict, &mut obj, &mut basic, &mut nonbasic, leave, s_var)?;

    loop {
        match basic.iter().position(|&b| b == s_var) {
            None => return Some(true),
            Some(row) if dict[row][0].is_zero() => return Some(true),
            _ => {}
        }
        // Bland: smallest-index improving variable
        let entering = (0..ncols)
            .filter(|&c| obj[1 + c].signum() == Ordering::Greater)
            .min_by_key(|&c| nonbasic[c]);
        let Some(col) = entering else {
            return Some(false);
        };
        let mut best: Option<(usize, F)> = None;
        for i in 0..rows {
            let a = &dict[i][1 + col];
            if a.signum() != Ordering::Less {
                continue;
            }
            let ratio = dict[i][0].div(&F::zero().sub(a)?)?;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => match ratio.compare(&br)? {
                    Ordering::Less => Some((i, ratio)),
                    Ordering::Equal if basic[i] < basic[bi] => Some((i, ratio)),
                    _ => Some((bi, br)),
                },
            };
        }
        // the objective −s is bounded above by 0, so a leaving row exists
        let (row, _) = best?;
        let var = nonbasic[col];
        pivot(&mut dict, &mut obj, &mut basic, &mut nonbasic, row, var)?;
    }
}

fn pivot<F: Field>(
    dict: &mut [Vec<F>],
    obj: &mut [F],
    basic: &mut [usize],
    nonbasic: &mut [usize],
    row: usize,
    entering_var: usize,
) -> Option<()> {
    let col = nonbasic.iter().position(|&v| v == entering_var)?;
    let a = dict[row][1 + col].clone();
    // x_b = c + Σ a_j x_j  →  x_e = (x_b − c − Σ_{j≠e} a_j x_j) / a_e
    let mut new_row = Vec::with_capacity(dict[row].len());
    for (j, x) in dict[row].iter().enumerate() {
        if j == 1 + col {
            new_row.push(F::from_i64(1).div(&a)?);
        } else {
            new_row.push(F::zero().sub(&x.div(&a)?)?);
        }
    }
    let substitute = |target: &mut Vec<F>| -> Option<()> {
        let f = target[1 + col].clone();
        if f.is_zero() {
            return Some(());
        }
        for j in 0..target.len() {
            if j == 1 + col {
                target[j] = f.mul(&new_row[j])?;
            } else {
                target[j] = target[j].add(&f.mul(&new_row[j])?)?;
            }
        }
        Some(())
    };
    for (i, r) in dict.iter_mut().enumerate() {
        if i != row {
            substitute(r)?;
        }
    }
    let mut o = obj.to_vec();
    substitute(&mut o)?;
    obj.clone_from_slice(&o);
    dict[row] = new_row;
    std::mem::swap(&mut basic[row], &mut nonbasic[col]);
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(dim: usize, eq: &[(&[i64], i64)], ineq: &[(&[i64], i64)]) -> System {
        System {
            dim,
            equalities: eq.iter().map(|(e, g)| (e.to_vec(), *g)).collect(),
            inequalities: ineq.iter().map(|(a, b)| (a.to_vec(), *b)).collect(),
        }
    }

    #[test]
    fn boxes() {
        // 1 ≤ x ≤ 2, 1 ≤ y ≤ 2
        let s = sys(2, &[], &[(&[1, 0], 1), (&[-1, 0], -2), (&[0, 1], 1), (&[0, -1], -2)]);
        assert!(s.feasible());
        // x ≥ 3, x ≤ 2
        let s = sys(2, &[], &[(&[1, 0], 3), (&[-1, 0], -2)]);
        assert!(!s.feasible());
    }

    #[test]
    fn with_equalities() {
        // x + y = 1, x ≥ 2, y ≥ 0 infeasible
        let s = sys(2, &[(&[1, 1], 1)], &[(&[1, 0], 2), (&[0, 1], 0)]);
        assert!(!s.feasible());
        // x + y = 3 works
        let s = sys(2, &[(&[1, 1], 3)], &[(&[1, 0], 2), (&[0, 1], 0)]);
        assert!(s.feasible());
        // inconsistent equalities
        let s = sys(2, &[(&[1, 1], 1), (&[2, 2], 3)], &[]);
        assert!(!s.feasible());
        // fully determined point, touching inequality
        let s = sys(2, &[(&[1, 0], 1), (&[0, 1], 1)], &[(&[1, 1], 2)]);
        assert!(s.feasible());
        let s = sys(2, &[(&[1, 0], 1), (&[0, 1], 1)], &[(&[1, 1], 3)]);
        assert!(!s.feasible());
    }

    #[test]
    fn degenerate_cycling_candidate() {
        // many redundant constraints through the origin plus one shift
        let s = sys(
            3,
            &[],
            &[
                (&[1, -1, 0], 0),
                (&[-1, 1, 0], 0),
                (&[0, 1, -1], 0),
                (&[0, -1, 1], 0),
                (&[1, 1, 1], 3),
                (&[-1, -1, -1], -3),
            ],
        );
        assert!(s.feasible());
        let mut s2 = s.clone();
        s2.inequalities.push((vec![-1, 0, 0], 0));
        assert!(!s2.feasible());
    }

    #[test]
    fn q128_overflow_is_reported() {
        let big = Q128::from_i64(i64::MAX);
        let sq = big.mul(&big).unwrap();
        assert!(sq.mul(&sq).is_none());
    }
}
