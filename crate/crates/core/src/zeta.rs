//! Reciprocal zeta polynomials of the lattice skeleta, the divisor-product
//! factorization, and the thermodynamic limit.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::algebra::{
    descend_to_integers, division_free_det, product_of_sparse_linear_factors, CycElem, CycPoly,
    CyclotomicRing, IntPoly, SparseCyc,
};
use crate::error::{domain, Error, Result};
use crate::lattice::{subsets, Direction, LatticeSpec};
use crate::limits::Limits;
use crate::numtheory::{binomial, divisors, lcm_all};
use crate::orbits::DVec;
use crate::psi::{homogenize, psi_multi_with};

/// One factor `Psi_d(1 + (2q-1)u^2, u)^exponent` of the top-dimensional zeta.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiFactor {
    pub dvec: Vec<u64>,
    pub exponent: u64,
    /// `Psi_d(x)` in one variable, low to high.
    pub psi: IntPoly,
}

/// `(1-u^2)^a (1-u)^b (1+c u)^e`; exponents may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prefactors {
    #[serde(rename = "(1-u^2)")]
    pub one_minus_u2: i64,
    #[serde(rename = "(1-u)")]
    pub one_minus_u: i64,
    #[serde(rename = "(1+bu)")]
    pub one_plus_bu: (i64, i64),
}

impl Prefactors {
    /// `(numerator, denominator)` polynomials.
    pub fn expand(&self) -> (IntPoly, IntPoly) {
        let parts = [
            (IntPoly::from_i64s(&[1, 0, -1]), self.one_minus_u2),
            (IntPoly::from_i64s(&[1, -1]), self.one_minus_u),
            (
                IntPoly::from_i64s(&[1, self.one_plus_bu.0]),
                self.one_plus_bu.1,
            ),
        ];
        let mut num = IntPoly::one();
        let mut den = IntPoly::one();
        for (p, e) in parts {
            if e > 0 {
                num = &num * &p.pow(e as u64);
            } else if e < 0 {
                den = &den * &p.pow(e.unsigned_abs());
            }
        }
        (num, den)
    }

    /// `self * core`, dividing exactly where exponents are negative.
    pub fn apply(&self, core: &IntPoly) -> Result<IntPoly> {
        let (num, den) = self.expand();
        (&num * core)
            .div_exact(&den)
            .map_err(|e| Error::Internal(format!("negative prefactor did not cancel: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaInverse {
    pub n: Vec<u64>,
    pub d: usize,
    #[serde(rename = "zeta_inverse")]
    pub poly: IntPoly,
    pub factors: Vec<PsiFactor>,
    pub prefactors: Prefactors,
}

impl ZetaInverse {
    pub fn spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.n.clone())
    }

    /// Multiplies the factored form back out. Only available when `factors` is non-empty.
    pub fn expand_factored(&self) -> Result<IntPoly> {
        if self.factors.is_empty() {
            return domain("no factored form recorded");
        }
        let q = self.n.len() as i64;
        let core = psi_factor_product(q, &self.factors);
        self.prefactors.apply(&core)
    }
}

/// `alpha_d, beta_d, gamma_d, kappa_d` for the `d`-skeleton of a `q`-dimensional lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SkeletonExponents {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub kappa: i64,
}

pub fn skeleton_exponents(q: usize, d: usize) -> Result<SkeletonExponents> {
    if d < 1 || d > q {
        return domain(format!("skeleton dimension {d} outside [1, {q}]"));
    }
    let (qi, di) = (q as i64, d as i64);
    let c = |k: i64| binomial(qi, k) as i64;
    Ok(SkeletonExponents {
        alpha: 2 * qi - 2 * di + 1,
        beta: 2 * di - 1,
        gamma: c(di) - c(di - 1),
        kappa: (qi - di) * c(di - 1) + (di - 1) * c(di),
    })
}

fn checked_exp(a: i64, vol: u64) -> Result<i64> {
    i64::try_from(vol)
        .ok()
        .and_then(|v| a.checked_mul(v))
        .ok_or_else(|| Error::Resource(format!("exponent {a} * {vol} overflows")))
}

/// `1 + (2q-1)u^2`
fn x_of_u(q: i64) -> IntPoly {
    IntPoly::from_i64s(&[1, 0, 2 * q - 1])
}

fn psi_factor_value(q: i64, f: &PsiFactor) -> IntPoly {
    homogenize(&f.psi)
        .eval(&x_of_u(q), &IntPoly::x())
        .pow(f.exponent)
}

fn psi_factor_product(q: i64, factors: &[PsiFactor]) -> IntPoly {
    let vals: Vec<IntPoly> = factors.par_iter().map(|f| psi_factor_value(q, f)).collect();
    tree_product_int(vals)
}

fn tree_product_int(mut v: Vec<IntPoly>) -> IntPoly {
    if v.is_empty() {
        return IntPoly::one();
    }
    while v.len() > 1 {
        v = v
            .par_chunks(2)
            .map(|c| {
                if c.len() == 2 {
                    &c[0] * &c[1]
                } else {
                    c[0].clone()
                }
            })
            .collect();
    }
    v.pop().unwrap()
}

fn tree_product_cyc(mut v: Vec<CycPoly>, ring: &Arc<CyclotomicRing>) -> CycPoly {
    if v.is_empty() {
        return CycPoly::one(ring);
    }
    while v.len() > 1 {
        v = v
            .par_chunks(2)
            .map(|c| {
                if c.len() == 2 {
                    c[0].mul(&c[1])
                } else {
                    c[0].clone()
                }
            })
            .collect();
    }
    v.pop().unwrap()
}

/// All `d` with `d_i | n_i`, lexicographic.
pub fn divisor_tuples(n: &[u64]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![vec![]];
    for &ni in n {
        let ds = divisors(ni);
        out = out
            .into_iter()
            .flat_map(|t| {
                ds.iter().map(move |&d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

/// The divisor-product factorization without expanding it.
pub fn zeta_top_factors(
    spec: &LatticeSpec,
    limits: &Limits,
) -> Result<(Vec<PsiFactor>, Prefactors)> {
    let q = spec.q() as i64;
    let factors = divisor_tuples(spec.sides())
        .into_par_iter()
        .map(|t| {
            let dvec = DVec::new(t.clone())?;
            let psi = psi_multi_with(&dvec, limits)?.poly;
            let big = t.iter().filter(|&&d| d >= 3).count() as u32;
            Ok(PsiFactor {
                dvec: t,
                exponent: 1u64 << big,
                psi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let prefactors = Prefactors {
        one_minus_u2: checked_exp(q - 1, spec.volume())?,
        one_minus_u: 0,
        one_plus_bu: (0, 0),
    };
    Ok((factors, prefactors))
}

/// `zeta_Y(u)^{-1}` for the full lattice, as the divisor product of homogenized `Psi_d`.
pub fn zeta_top(spec: &LatticeSpec) -> Result<ZetaInverse> {
    zeta_top_with(spec, &Limits::from_env())
}

pub fn zeta_top_with(spec: &LatticeSpec, limits: &Limits) -> Result<ZetaInverse> {
    let (factors, prefactors) = zeta_top_factors(spec, limits)?;
    let core = psi_factor_product(spec.q() as i64, &factors);
    let poly = prefactors.apply(&core)?;
    Ok(ZetaInverse {
        n: spec.sides().to_vec(),
        d: spec.q(),
        poly,
        factors,
        prefactors,
    })
}

/// `(1-u^2)^{(q-1)|n|} F_n(1 + (2q-1)u^2, u)` with `F_n(x, 1) = prod_k (x - sum 2cos(2 pi k_i/n_i))`
/// formed over all characters at once in `Z[zeta_N]`, `N = lcm n`.
pub fn zeta_top_direct(spec: &LatticeSpec, limits: &Limits) -> Result<IntPoly> {
    Limits::check(spec.volume(), limits.psi_degree, "number of characters")?;
    let n = lcm_all(spec.sides());
    let roots = spec
        .characters()
        .iter()
        .map(|chi| {
            let mut acc = SparseCyc::new(n, vec![]);
            for (&k, &ni) in chi.k().iter().zip(spec.sides()) {
                acc = acc.add(&SparseCyc::two_cos(n, ni, k)?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let f = descend_to_integers(&product_of_sparse_linear_factors(n, &roots)?)?;
    let q = spec.q() as i64;
    let core = homogenize(&f).eval(&x_of_u(q), &IntPoly::x());
    Prefactors {
        one_minus_u2: checked_exp(q - 1, spec.volume())?,
        one_minus_u: 0,
        one_plus_bu: (0, 0),
    }
    .apply(&core)
}

struct CharRoots {
    z: Vec<CycElem>,
    zinv: Vec<CycElem>,
}

fn char_roots(spec: &LatticeSpec, ring: &Arc<CyclotomicRing>, k: &[u64]) -> CharRoots {
    let n = ring.modulus();
    let mut z = Vec::new();
    let mut zinv = Vec::new();
    for (&ki, &ni) in k.iter().zip(spec.sides()) {
        let e = ki * (n / ni) % n;
        z.push(CycElem::root_power(ring, e));
        zinv.push(CycElem::root_power(ring, (n - e) % n));
    }
    CharRoots { z, zinv }
}

/// The twisted adjacency block over `Z[zeta_N]` (same entry formulas as the floating-point one).
fn adjacency_exact(q: usize, d: usize, r: &CharRoots, dir: Direction) -> Vec<Vec<CycElem>> {
    let ring = r.z[0].ring().clone();
    let one = CycElem::one(&ring);
    let w: Vec<CycElem> = (0..q)
        .map(|i| one.add(&r.zinv[i]).mul(&one.add(&r.z[i])))
        .collect();
    let s = subsets(q, d);
    let full: u32 = if q == 32 { u32::MAX } else { (1u32 << q) - 1 };
    let mut m = vec![vec![CycElem::zero(&ring); s.len()]; s.len()];
    for (a, &sa) in s.iter().enumerate() {
        for (b, &sb) in s.iter().enumerate() {
            if a == b {
                let pool = match dir {
                    Direction::Up => full & !sa,
                    Direction::Down => sa,
                };
                for (i, wi) in w.iter().enumerate() {
                    if pool >> i & 1 == 1 {
                        m[a][b] = m[a][b].add(wi);
                    }
                }
            } else if (sa & !sb).count_ones() == 1 {
                let i = (sa & !sb).trailing_zeros() as usize;
                let j = (sb & !sa).trailing_zeros() as usize;
                m[a][b] = one.add(&r.zinv[j]).mul(&one.add(&r.z[i]));
            }
        }
    }
    m
}

/// `det((1 + alpha u)(1 + beta u) I - u A)` over `Z[zeta_N][u]`.
fn skeleton_block_det(
    a: &[Vec<CycElem>],
    ex: &SkeletonExponents,
    ring: &Arc<CyclotomicRing>,
) -> Result<CycPoly> {
    let int = |c: i64| CycElem::from_int(ring, BigInt::from(c));
    let t = [int(1), int(ex.alpha + ex.beta), int(ex.alpha * ex.beta)];
    let zero = CycElem::zero(ring);
    let m: Vec<Vec<CycPoly>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, x)| {
                    let mut c = if i == j {
                        t.to_vec()
                    } else {
                        vec![zero.clone(); 3]
                    };
                    c[1] = c[1].sub(x);
                    CycPoly::new(ring, c)
                })
                .collect()
        })
        .collect();
    division_free_det(&m)
}

/// `zeta_{Y^(d)}(u)^{-1}` from the twisted determinant form, up-form when `gamma_d >= 0`.
pub fn zeta_general_d(spec: &LatticeSpec, d: usize) -> Result<ZetaInverse> {
    zeta_general_d_with(spec, d, &Limits::from_env())
}

pub fn zeta_general_d_with(spec: &LatticeSpec, d: usize, limits: &Limits) -> Result<ZetaInverse> {
    let q = spec.q();
    let ex = skeleton_exponents(q, d)?;
    let vol = spec.volume();
    let block = if ex.gamma >= 0 {
        binomial(q as i64, d as i64 - 1)
    } else {
        binomial(q as i64, d as i64)
    };
    Limits::check(
        vol.saturating_mul(2 * block),
        limits.psi_degree,
        "degree of the determinant product",
    )?;
    let ring = CyclotomicRing::get(lcm_all(spec.sides()))?;
    let dets = spec
        .characters()
        .par_iter()
        .map(|chi| {
            let roots = char_roots(spec, &ring, chi.k());
            let a = if ex.gamma >= 0 {
                adjacency_exact(q, d - 1, &roots, Direction::Up)
            } else {
                adjacency_exact(q, d, &roots, Direction::Down)
            };
            skeleton_block_det(&a, &ex, &ring)
        })
        .collect::<Result<Vec<_>>>()?;
    let core = descend_to_integers(&tree_product_cyc(dets, &ring))?;
    let prefactors = if ex.gamma >= 0 {
        Prefactors {
            one_minus_u2: 0,
            one_minus_u: checked_exp(ex.kappa, vol)?,
            one_plus_bu: (ex.beta, checked_exp(ex.gamma, vol)?),
        }
    } else {
        Prefactors {
            one_minus_u2: 0,
            one_minus_u: checked_exp(ex.kappa, vol)?,
            one_plus_bu: (ex.alpha, checked_exp(-ex.gamma, vol)?),
        }
    };
    let poly = prefactors.apply(&core)?;
    Ok(ZetaInverse {
        n: spec.sides().to_vec(),
        d,
        poly,
        factors: Vec::new(),
        prefactors,
    })
}

/// `sum_l (2-l) 2^(l-1) e_l(w) (1 - u s + 3(2q-3)u^2)^(q-l) u^l` over `Z[zeta_N][u]`,
/// with `w_i = 2 + z_i + 1/z_i` and `s = sum (z_i + 1/z_i)`.
fn f1_up(q: usize, r: &CharRoots, ring: &Arc<CyclotomicRing>) -> CycPoly {
    let int = |c: i64| CycElem::from_int(ring, BigInt::from(c));
    let zero = CycElem::zero(ring);
    let s = (0..q).fold(zero.clone(), |acc, i| acc.add(&r.z[i]).add(&r.zinv[i]));
    let w: Vec<CycElem> = (0..q)
        .map(|i| int(2).add(&r.z[i]).add(&r.zinv[i]))
        .collect();
    let mut e = vec![int(1)];
    for wi in &w {
        let mut next = vec![zero.clone(); e.len() + 1];
        for (k, a) in e.iter().enumerate() {
            next[k] = next[k].add(a);
            next[k + 1] = next[k + 1].add(&a.mul(wi));
        }
        e = next;
    }
    let base = CycPoly::new(ring, vec![int(1), s.neg(), int(3 * (2 * q as i64 - 3))]);
    let mut powers = vec![CycPoly::one(ring)];
    for _ in 0..q {
        powers.push(powers.last().unwrap().mul(&base));
    }
    let mut acc = CycPoly::zero(ring);
    for (l, el) in e.iter().enumerate() {
        // (2 - l) 2^(l-1), with l = 0 giving 1
        let c: i64 = if l == 0 { 1 } else { (2 - l as i64) << (l - 1) };
        if c == 0 {
            continue;
        }
        let mut coeffs = vec![zero.clone(); l];
        coeffs.push(el.scale(&BigInt::from(c)));
        acc = acc.add(&powers[q - l].mul(&CycPoly::new(ring, coeffs)));
    }
    acc
}

/// `zeta_{Y^(q-1)}(u)^{-1} = (1-u)^{kappa|n|} (1+3u)^{gamma|n|} prod_k F_1^up(u, k)`.
pub fn zeta_codim1(spec: &LatticeSpec) -> Result<ZetaInverse> {
    zeta_codim1_with(spec, &Limits::from_env())
}

pub fn zeta_codim1_with(spec: &LatticeSpec, limits: &Limits) -> Result<ZetaInverse> {
    let q = spec.q();
    if q < 2 {
        return domain("the codimension-one skeleton needs q >= 2");
    }
    let vol = spec.volume();
    Limits::check(
        vol.saturating_mul(2 * q as u64),
        limits.psi_degree,
        "degree of the F1 product",
    )?;
    let ring = CyclotomicRing::get(lcm_all(spec.sides()))?;
    let parts: Vec<CycPoly> = spec
        .characters()
        .par_iter()
        .map(|chi| f1_up(q, &char_roots(spec, &ring, chi.k()), &ring))
        .collect();
    let core = descend_to_integers(&tree_product_cyc(parts, &ring))?;
    let qi = q as i64;
    let prefactors = Prefactors {
        one_minus_u2: 0,
        one_minus_u: checked_exp(qi * (3 * qi - 5) / 2, vol)?,
        one_plus_bu: (3, checked_exp(qi * (qi - 3) / 2, vol)?),
    };
    let poly = prefactors.apply(&core)?;
    Ok(ZetaInverse {
        n: spec.sides().to_vec(),
        d: q - 1,
        poly,
        factors: Vec::new(),
        prefactors,
    })
}

/// Largest number of quadrature nodes in one refinement level.
pub const MAHLER_MAX_NODES: u32 = 24;

fn midpoint_level(q: usize, u: f64, k: u32) -> f64 {
    let m = 1usize << k;
    let h = 1.0 / m as f64;
    let cosines: Vec<f64> = (0..m)
        .map(|i| (2.0 * PI * (i as f64 + 0.5) * h).cos())
        .collect();
    let c0 = 1.0 + (2.0 * q as f64 - 1.0) * u * u;
    let total = m.pow(q as u32);
    let sum: f64 = (0..total)
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(|mut idx| {
            let mut s = 0.0;
            for _ in 0..q {
                s += cosines[idx % m];
                idx /= m;
            }
            (c0 - 2.0 * u * s).abs().ln()
        })
        .sum();
    sum / total as f64
}

/// `int_{[0,1]^q} log|1 - 2u sum cos(2 pi t_i) + (2q-1)u^2| dt`, midpoint rule on a `2^k` grid
/// per axis with one Richardson step between the two finest levels.
pub fn mahler_limit_integral(q: usize, u: f64) -> Result<f64> {
    if q == 0 {
        return domain("q must be at least 1");
    }
    if !u.is_finite() || u.abs() > 1.0 {
        return domain(format!("u = {u} outside [-1, 1]"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let kmax = (MAHLER_MAX_NODES / q as u32).clamp(1, 20);
    let fine = midpoint_level(q, u, kmax);
    let coarse = midpoint_level(q, u, kmax - 1);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `(q-1) log(1-u^2) + mahler_limit_integral(q, u)`.
pub fn free_energy_limit(q: usize, u: f64) -> Result<f64> {
    if !(u.abs() < 1.0) {
        return domain(format!("|u| = {} must be < 1", u.abs()));
    }
    Ok((q as f64 - 1.0) * (1.0 - u * u).ln() + mahler_limit_integral(q, u)?)
}

fn ln_abs_bigint(b: &BigInt) -> f64 {
    let b = b.abs();
    let bits = b.bits();
    let shift = bits.saturating_sub(60);
    let top = (&b >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * LN_2
}

fn ln_abs_rational(r: &BigRational) -> Result<f64> {
    if r.is_zero() {
        return Err(Error::Domain("zeta has a pole at this u".into()));
    }
    Ok(ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom()))
}

/// `-log zeta_Y(u) / |n|`, each factor of the divisor product evaluated exactly at `u`.
pub fn free_energy_check(spec: &LatticeSpec, u: f64) -> Result<f64> {
    if !(u.abs() < 1.0) {
        return domain(format!("|u| = {} must be < 1", u.abs()));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let ur = BigRational::from_float(u).ok_or_else(|| Error::Domain(format!("u = {u}")))?;
    let (factors, pre) = zeta_top_factors(spec, &Limits::from_env())?;
    let q = spec.q() as i64;
    let one = BigRational::one();
    let x = &one + BigRational::from_integer(BigInt::from(2 * q - 1)) * &ur * &ur;
    let xu = &x / &ur;
    let logs: Vec<f64> = factors
        .par_iter()
        .map(|f| {
            let deg = f.psi.degree().unwrap_or(0) as i32;
            let v = f.psi.eval_rational(&xu) * num_traits::pow(ur.clone(), deg as usize);
            Ok(ln_abs_rational(&v)? * f.exponent as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = pre.one_minus_u2 as f64 * (1.0 - u * u).ln() + logs.iter().sum::<f64>();
    Ok(total / spec.volume() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: &[u64]) -> LatticeSpec {
        LatticeSpec::new(n.to_vec()).unwrap()
    }

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn cycle(n: usize) -> IntPoly {
        let mut c = vec![0i64; n + 1];
        c[0] = 1;
        c[n] = -1;
        p(&c).pow(2)
    }

    /// `prod_k (1 - 2u sum cos + (2q-1) u^2)` by floating-point root expansion, rounded.
    fn numeric_top(n: &[u64]) -> IntPoly {
        let s = lat(n);
        let q = s.q() as f64;
        let mut c = vec![1.0f64];
        for chi in s.characters() {
            let sum: f64 = chi.w(&s).iter().map(|w| w - 2.0).sum();
            let f = [1.0, -sum, 2.0 * q - 1.0];
            let mut next = vec![0.0; c.len() + 2];
            for (i, a) in c.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            c = next;
        }
        let core = IntPoly::new(c.iter().map(|x| BigInt::from(x.round() as i64)).collect());
        &core * &p(&[1, 0, -1]).pow((s.q() as u64 - 1) * s.volume())
    }

    #[test]
    fn exponents() {
        let e = skeleton_exponents(2, 2).unwrap();
        assert_eq!((e.alpha, e.beta, e.gamma, e.kappa), (1, 3, -1, 1));
        for q in 1..=8usize {
            let top = skeleton_exponents(q, q).unwrap();
            assert_eq!((top.alpha, top.beta), (1, 2 * q as i64 - 1));
            assert_eq!((top.kappa, top.gamma), (q as i64 - 1, 1 - q as i64));
            for d in 1..=q {
                let a = skeleton_exponents(q, d).unwrap();
                let b = skeleton_exponents(q, q - d + 1).unwrap();
                assert_eq!((a.alpha, a.beta, a.kappa), (b.beta, b.alpha, b.kappa));
                assert_eq!(a.gamma, -b.gamma);
            }
            if q >= 2 {
                let c = skeleton_exponents(q, q - 1).unwrap();
                let qi = q as i64;
                assert_eq!(c.kappa, qi * (3 * qi - 5) / 2);
                assert_eq!(-c.gamma, qi * (qi - 3) / 2);
            }
        }
        assert!(skeleton_exponents(3, 0).is_err());
        assert!(skeleton_exponents(3, 4).is_err());
    }

    #[test]
    fn top_cycle_graphs() {
        for n in 2..=9u64 {
            let z = zeta_top(&lat(&[n])).unwrap();
            assert_eq!(z.poly, cycle(n as usize), "n = {n}");
            assert_eq!(z.expand_factored().unwrap(), z.poly);
        }
        let z = zeta_top(&lat(&[2])).unwrap();
        let vals: Vec<IntPoly> = z.factors.iter().map(|f| psi_factor_value(1, f)).collect();
        assert_eq!(vals, vec![p(&[1, -2, 1]), p(&[1, 2, 1])]);
    }

    #[test]
    fn top_two_by_two() {
        let z = zeta_top(&lat(&[2, 2])).unwrap();
        let expect =
            &(&(&p(&[1, 0, -1]).pow(4) * &p(&[1, -4, 3])) * &p(&[1, 0, 3]).pow(2)) * &p(&[1, 4, 3]);
        assert_eq!(z.poly, expect);
        assert_eq!(z.factors.len(), 4);
        assert!(z.factors.iter().all(|f| f.exponent == 1));
    }

    #[test]
    fn top_matches_numeric_product() {
        for n in [vec![3u64, 4], vec![5, 2], vec![3, 3], vec![2, 2, 3]] {
            let z = zeta_top(&lat(&n)).unwrap();
            assert_eq!(z.poly, numeric_top(&n), "{n:?}");
            assert_eq!(z.poly.coeff(0), BigInt::one());
        }
    }

    #[test]
    fn top_direct_route() {
        for n in [
            vec![6u64],
            vec![2, 3],
            vec![4, 4],
            vec![3, 5],
            vec![2, 2, 3],
        ] {
            let s = lat(&n);
            assert_eq!(
                zeta_top(&s).unwrap().poly,
                zeta_top_direct(&s, &Limits::default()).unwrap()
            );
        }
    }

    #[test]
    fn general_d_top_and_symmetry() {
        for n in [
            vec![5u64],
            vec![2, 2],
            vec![3, 3],
            vec![2, 3],
            vec![2, 2, 2],
        ] {
            let s = lat(&n);
            let q = s.q();
            assert_eq!(
                zeta_general_d(&s, q).unwrap().poly,
                zeta_top(&s).unwrap().poly
            );
            for d in 1..=q {
                assert_eq!(
                    zeta_general_d(&s, d).unwrap().poly,
                    zeta_general_d(&s, q - d + 1).unwrap().poly,
                    "{n:?} d = {d}"
                );
            }
        }
        assert!(zeta_general_d(&lat(&[3, 3]), 3).is_err());
    }

    #[test]
    fn codim1_agrees() {
        for n in [vec![2u64, 2], vec![3, 3], vec![2, 5], vec![4, 3]] {
            let s = lat(&n);
            assert_eq!(zeta_codim1(&s).unwrap().poly, zeta_top(&s).unwrap().poly);
        }
        let s = lat(&[2, 2, 2]);
        assert_eq!(
            zeta_codim1(&s).unwrap().poly,
            zeta_general_d(&s, 2).unwrap().poly
        );
        let s = lat(&[3, 2, 2]);
        assert_eq!(
            zeta_codim1(&s).unwrap().poly,
            zeta_general_d(&s, 2).unwrap().poly
        );
        assert!(zeta_codim1(&lat(&[4])).is_err());
    }

    #[test]
    fn f1_at_q2_factors() {
        let s = lat(&[2, 2]);
        let ring = CyclotomicRing::get(2).unwrap();
        for chi in s.characters() {
            let f = descend_to_integers(&f1_up(2, &char_roots(&s, &ring, chi.k()), &ring)).unwrap();
            let sum: i64 = chi.w(&s).iter().map(|w| (w - 2.0).round() as i64).sum();
            let expect = &(&p(&[1, 1]) * &p(&[1, 3])) * &p(&[1, -sum, 3]);
            assert_eq!(f, expect);
        }
    }

    #[test]
    fn mahler_values() {
        let g: f64 = (0..200_000i32)
            .map(|k| (-1f64).powi(k) / f64::from(2 * k + 1).powi(2))
            .sum();
        assert!((mahler_limit_integral(2, 1.0).unwrap() - 4.0 * g / PI).abs() < 1e-3);
        assert!(mahler_limit_integral(1, 0.999).unwrap().abs() < 1e-2);
        assert_eq!(mahler_limit_integral(1, 0.0).unwrap(), 0.0);
        assert!(mahler_limit_integral(1, 0.5).unwrap().abs() < 1e-9);
        assert!(mahler_limit_integral(2, 1.5).is_err());
    }

    #[test]
    fn free_energy_small() {
        let f = free_energy_check(&lat(&[64]), 0.5).unwrap();
        let exact = 2.0 * (1.0 - 0.5f64.powi(64)).ln() / 64.0;
        assert!((f - exact).abs() < 1e-12);
        assert!(f.abs() < 1e-6);
        assert_eq!(free_energy_check(&lat(&[3, 3]), 0.0).unwrap(), 0.0);
        assert!(free_energy_check(&lat(&[3]), 1.0).is_err());
        let z = zeta_top(&lat(&[3, 4])).unwrap();
        let direct = z.poly.eval_f64(0.3).ln() / 12.0;
        assert!((free_energy_check(&lat(&[3, 4]), 0.3).unwrap() - direct).abs() < 1e-12);
    }
}
