//! Exact determinants: Bareiss over `Z`, evaluation-interpolation over `Z[x]`,
//! and a division-free routine for arbitrary commutative rings.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::cyclotomic::{CycElem, CycPoly, CyclotomicRing};
use super::poly::IntPoly;
use crate::error::{domain, Error, Result};

/// Minimal commutative-ring interface for the division-free determinant.
pub trait RingElem: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn r_add(&self, other: &Self) -> Self;
    fn r_sub(&self, other: &Self) -> Self;
    fn r_mul(&self, other: &Self) -> Self;
    fn r_neg(&self) -> Self;
}

impl RingElem for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_neg(&self) -> Self {
        -self
    }
}

impl RingElem for IntPoly {
    fn zero_like(&self) -> Self {
        IntPoly::zero()
    }
    fn one_like(&self) -> Self {
        IntPoly::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_neg(&self) -> Self {
        -self
    }
}

impl RingElem for CycElem {
    fn zero_like(&self) -> Self {
        CycElem::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        CycElem::one(self.ring())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_neg(&self) -> Self {
        self.neg()
    }
}

impl RingElem for CycPoly {
    fn zero_like(&self) -> Self {
        CycPoly::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        CycPoly::one(self.ring())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_neg(&self) -> Self {
        self.neg()
    }
}

fn check_square<T>(m: &[Vec<T>]) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return domain("determinant of a non-square matrix");
    }
    Ok(n)
}

/// Division-free determinant (Bird's iteration), `O(n^4)` ring operations.
///
/// `X_1 = A`, `X_{k+1} = mu(X_k) A`, `det A = (-1)^{n-1} (X_n)_{00}`, where `mu` keeps the
/// strict upper triangle and puts `-sum_{j>i} X_jj` on the diagonal.
pub fn division_free_det<T: RingElem>(a: &[Vec<T>]) -> Result<T> {
    let n = check_square(a)?;
    if n == 0 {
        return domain("determinant of an empty matrix needs a ring witness");
    }
    let zero = a[0][0].zero_like();
    let mut x: Vec<Vec<T>> = a.to_vec();
    for _ in 1..n {
        let mut mu = vec![vec![zero.clone(); n]; n];
        let mut tail = zero.clone();
        for i in (0..n).rev() {
            mu[i][i] = tail.r_neg();
            tail = tail.r_add(&x[i][i]);
            for j in i + 1..n {
                mu[i][j] = x[i][j].clone();
            }
        }
        x = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = zero.clone();
                        for (k, m) in mu[i].iter().enumerate().skip(i) {
                            if !m.is_zero_elem() && !a[k][j].is_zero_elem() {
                                acc = acc.r_add(&m.r_mul(&a[k][j]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
    }
    let d = x[0][0].clone();
    Ok(if n % 2 == 0 { d.r_neg() } else { d })
}

/// Fraction-free Gaussian elimination over `Z`.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> Result<BigInt> {
    let n = check_square(&m)?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(sign * &m[n - 1][n - 1])
}

/// Exact determinant of a polynomial matrix: evaluate at `0..=D` with `D` the sum of
/// row degrees, then interpolate through forward differences.
pub fn poly_matrix_det(m: &[Vec<IntPoly>]) -> Result<IntPoly> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(IntPoly::one());
    }
    let bound: usize = m
        .iter()
        .map(|row| row.iter().filter_map(IntPoly::degree).max().unwrap_or(0))
        .sum();
    if m.iter().any(|row| row.iter().all(IntPoly::is_zero)) {
        return Ok(IntPoly::zero());
    }
    let values: Vec<BigInt> = (0..=bound)
        .into_par_iter()
        .map(|t| {
            let x = BigInt::from(t);
            let mat = m
                .iter()
                .map(|row| row.iter().map(|p| p.eval(&x)).collect())
                .collect();
            bareiss_det(mat)
        })
        .collect::<Result<_>>()?;
    interpolate_consecutive(&values)
}

/// Integer polynomial through `(t, values[t])` for `t = 0..len`, or an error if it is not integral.
pub fn interpolate_consecutive(values: &[BigInt]) -> Result<IntPoly> {
    let d = values.len().saturating_sub(1);
    // forward differences at 0
    let mut diffs = Vec::with_capacity(values.len());
    let mut row = values.to_vec();
    while !row.is_empty() {
        diffs.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    // p(x) = sum_k diff_k * x(x-1)...(x-k+1) / k!, scaled by d! to stay integral
    let mut fact = vec![BigInt::one(); d + 1];
    for k in 1..=d {
        fact[k] = &fact[k - 1] * k;
    }
    let mut acc = IntPoly::zero();
    let mut falling = IntPoly::one();
    for (k, dk) in diffs.iter().enumerate() {
        if !dk.is_zero() {
            let scale = dk * (&fact[d] / &fact[k]);
            acc = &acc + &falling.scale(&scale);
        }
        falling = &falling * &IntPoly::new(vec![-BigInt::from(k), BigInt::one()]);
    }
    let coeffs = acc
        .coeffs()
        .iter()
        .map(|c| {
            let (q, r) = c.div_rem(&fact[d]);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(Error::Internal(
                    "interpolated determinant is not integral".into(),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPoly::new(coeffs))
}

/// Convenience: an identity-shaped matrix of `CycPoly` entries.
pub fn cyc_poly_identity(ring: &Arc<CyclotomicRing>, n: usize) -> Vec<Vec<CycPoly>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        CycPoly::one(ring)
                    } else {
                        CycPoly::zero(ring)
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplace<T: RingElem>(m: &[Vec<T>]) -> T {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = m[0][0].zero_like();
        for c in 0..n {
            let minor: Vec<Vec<T>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = m[0][c].r_mul(&laplace(&minor));
            acc = if c % 2 == 0 {
                acc.r_add(&term)
            } else {
                acc.r_sub(&term)
            };
        }
        acc
    }

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn small_examples() {
        let one = vec![vec![p(&[3, 0, 2])]];
        assert_eq!(poly_matrix_det(&one).unwrap(), p(&[3, 0, 2]));
        let two = vec![vec![p(&[0, 1]), p(&[1])], vec![p(&[1]), p(&[0, 1])]];
        assert_eq!(poly_matrix_det(&two).unwrap(), p(&[-1, 0, 1]));
        assert_eq!(division_free_det(&two).unwrap(), p(&[-1, 0, 1]));
        let zero = vec![vec![IntPoly::zero(); 3]; 3];
        assert!(poly_matrix_det(&zero).unwrap().is_zero());
    }

    #[test]
    fn random_polynomial_matrices_match_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let m: Vec<Vec<IntPoly>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let deg = rng.gen_range(0..=3);
                            IntPoly::new(
                                (0..=deg)
                                    .map(|_| BigInt::from(rng.gen_range(-5..=5)))
                                    .collect(),
                            )
                        })
                        .collect()
                })
                .collect();
            let expect = laplace(&m);
            assert_eq!(poly_matrix_det(&m).unwrap(), expect);
            assert_eq!(division_free_det(&m).unwrap(), expect);
        }
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let m: Vec<Vec<BigInt>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| BigInt::from(rng.gen_range(-3..=3)))
                        .collect()
                })
                .collect();
            assert_eq!(bareiss_det(m.clone()).unwrap(), laplace(&m));
        }
    }

    #[test]
    fn cyclotomic_division_free() {
        let ring = CyclotomicRing::get(7).unwrap();
        let z = CycElem::root_power(&ring, 1);
        let m = vec![
            vec![z.clone(), CycElem::one(&ring)],
            vec![CycElem::one(&ring), z.pow(6)],
        ];
        // z * z^6 - 1 = 0
        assert!(division_free_det(&m).unwrap().is_zero());
    }

    #[test]
    fn non_square_is_rejected() {
        let m = vec![vec![p(&[1]), p(&[1])]];
        assert!(poly_matrix_det(&m).is_err());
    }
}
