//! Cyclotomic polynomials and the ring `Z[zeta_N] = Z[x]/Phi_N(x)` in the power basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::poly::IntPoly;
use crate::error::{domain, Error, Result};
use crate::numtheory::divisors;

static CYCLOTOMIC_CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();

/// `Phi_d`, obtained from `x^d - 1` by exact division by `Phi_e` for every proper divisor `e`.
pub fn cyclotomic_poly(d: u64) -> Result<IntPoly> {
    if d == 0 {
        return domain("cyclotomic_poly requires d >= 1");
    }
    let cache = CYCLOTOMIC_CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return Ok(p.clone());
    }
    let mut p = &IntPoly::monomial(BigInt::one(), d as usize) - &IntPoly::one();
    for e in divisors(d) {
        if e < d {
            p = p.div_exact(&cyclotomic_poly(e)?)?;
        }
    }
    cache.lock().unwrap().insert(d, p.clone());
    Ok(p)
}

/// The ring `Z[zeta_N]`, with a table of `x^k mod Phi_N` for `dim <= k < N`.
pub struct CyclotomicRing {
    n: u64,
    dim: usize,
    table: Vec<Vec<i64>>,
}

impl fmt::Debug for CyclotomicRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[zeta_{}]", self.n)
    }
}

/// Cap on `(N - phi(N)) * phi(N)`, the size of the reduction table.
pub const MAX_TABLE_ENTRIES: u64 = 40_000_000;

static RING_CACHE: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicRing>>>> = OnceLock::new();

impl CyclotomicRing {
    pub fn get(n: u64) -> Result<Arc<CyclotomicRing>> {
        if n == 0 {
            return domain("cyclotomic ring requires N >= 1");
        }
        let cache = RING_CACHE.get_or_init(Default::default);
        if let Some(r) = cache.lock().unwrap().get(&n) {
            return Ok(r.clone());
        }
        let ring = Arc::new(Self::build(n)?);
        cache.lock().unwrap().insert(n, ring.clone());
        Ok(ring)
    }

    fn build(n: u64) -> Result<CyclotomicRing> {
        let phi = cyclotomic_poly(n)?;
        let dim = phi.degree().unwrap();
        let entries = (n as usize - dim) as u64 * dim as u64;
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::Resource(format!(
                "reduction table for Z[zeta_{n}] needs {entries} entries"
            )));
        }
        let overflow = || Error::Resource(format!("reduction table for Z[zeta_{n}] overflows"));
        let low: Vec<i64> = phi.coeffs()[..dim]
            .iter()
            .map(|c| c.to_i64().map(|v| -v).ok_or_else(overflow))
            .collect::<Result<_>>()?;
        let mut table = Vec::with_capacity(n as usize - dim);
        if (dim as u64) < n {
            table.push(low.clone());
            for _ in dim + 1..n as usize {
                let prev = table.last().unwrap();
                let top = prev[dim - 1];
                let mut next = vec![0i64; dim];
                for i in 0..dim {
                    let shifted = if i == 0 { 0 } else { prev[i - 1] };
                    next[i] = top
                        .checked_mul(low[i])
                        .and_then(|t| t.checked_add(shifted))
                        .ok_or_else(overflow)?;
                }
                table.push(next);
            }
        }
        Ok(CyclotomicRing { n, dim, table })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// `phi(N)`, the rank of the power basis.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduce a vector indexed by exponents mod `N` to the power basis.
    pub fn reduce_cyclic(&self, v: &[BigInt]) -> Vec<BigInt> {
        debug_assert_eq!(v.len(), self.n as usize);
        let mut out: Vec<BigInt> = v[..self.dim].to_vec();
        for (k, c) in v.iter().enumerate().skip(self.dim) {
            if c.is_zero() {
                continue;
            }
            for (o, &t) in out.iter_mut().zip(&self.table[k - self.dim]) {
                if t != 0 {
                    *o += c * t;
                }
            }
        }
        out
    }
}

/// Element of `Z[zeta_N]`, always reduced modulo `Phi_N`.
#[derive(Clone)]
pub struct CycElem {
    ring: Arc<CyclotomicRing>,
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElem(N={}; ", self.ring.n)?;
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{})", parts.join(" "))
    }
}

impl PartialEq for CycElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring.n == other.ring.n && self.coeffs == other.coeffs
    }
}

impl Eq for CycElem {}

impl std::hash::Hash for CycElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ring.n.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for CycElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CycElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ring.n, &self.coeffs).cmp(&(other.ring.n, &other.coeffs))
    }
}

impl CycElem {
    pub fn zero(ring: &Arc<CyclotomicRing>) -> Self {
        CycElem {
            ring: ring.clone(),
            coeffs: vec![BigInt::zero(); ring.dim],
        }
    }

    pub fn from_int(ring: &Arc<CyclotomicRing>, c: BigInt) -> Self {
        let mut e = Self::zero(ring);
        e.coeffs[0] = c;
        e
    }

    pub fn one(ring: &Arc<CyclotomicRing>) -> Self {
        Self::from_int(ring, BigInt::one())
    }

    /// `zeta_N^k`
    pub fn root_power(ring: &Arc<CyclotomicRing>, k: u64) -> Self {
        SparseCyc::new(ring.n, vec![(k, 1)]).to_elem(ring)
    }

    /// From a vector indexed by exponents mod `N`.
    pub fn from_cyclic(ring: &Arc<CyclotomicRing>, v: &[BigInt]) -> Self {
        CycElem {
            ring: ring.clone(),
            coeffs: ring.reduce_cyclic(v),
        }
    }

    pub fn ring(&self) -> &Arc<CyclotomicRing> {
        &self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.ring.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.ring.n, other.ring.n,
            "mixing elements of different cyclotomic rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        CycElem {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        CycElem {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CycElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        CycElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut acc = vec![BigInt::zero(); self.ring.n as usize];
        self.mul_into_cyclic(other, &mut acc);
        Self::from_cyclic(&self.ring, &acc)
    }

    /// Add `self * other` into a cyclic accumulator of length `N`.
    pub(crate) fn mul_into_cyclic(&self, other: &Self, acc: &mut [BigInt]) {
        let n = self.ring.n as usize;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    acc[(i + j) % n] += a * b;
                }
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Image under the complex embedding `zeta_N -> exp(2 pi i / N)`.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.ring.n as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n)
                    * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }

    /// Evaluate an integer polynomial at this element.
    pub fn eval_poly(&self, p: &IntPoly) -> Self {
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(&self.ring), |acc, c| {
                acc.mul(self).add(&Self::from_int(&self.ring, c.clone()))
            })
    }
}

/// A sparse element `sum c_k zeta_N^{e_k}`, not reduced. Cheap to multiply into cyclic buffers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCyc {
    pub n: u64,
    pub terms: Vec<(u64, i64)>,
}

impl SparseCyc {
    pub fn new(n: u64, terms: Vec<(u64, i64)>) -> Self {
        let mut merged: Vec<(u64, i64)> = Vec::new();
        let mut t: Vec<(u64, i64)> = terms.into_iter().map(|(e, c)| (e % n, c)).collect();
        t.sort_unstable();
        for (e, c) in t {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        SparseCyc { n, terms: merged }
    }

    /// `2 cos(2 pi j / d)` as `zeta_N^{jN/d} + zeta_N^{-jN/d}`.
    pub fn two_cos(n: u64, d: u64, j: u64) -> Result<Self> {
        if d == 0 || !n.is_multiple_of(d) {
            return domain(format!("2cos(2pi j/{d}) needs {d} | {n}"));
        }
        let e = (j % d) * (n / d) % n;
        Ok(Self::new(n, vec![(e, 1), ((n - e) % n, 1)]))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut t = self.terms.clone();
        t.extend_from_slice(&other.terms);
        Self::new(self.n, t)
    }

    pub fn to_cyclic(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.n as usize];
        for &(e, c) in &self.terms {
            v[e as usize] += c;
        }
        v
    }

    pub fn to_elem(&self, ring: &Arc<CyclotomicRing>) -> CycElem {
        assert_eq!(self.n, ring.n);
        CycElem::from_cyclic(ring, &self.to_cyclic())
    }

    /// `out += self * v` in `Z[X]/(X^N - 1)`.
    fn mul_add_into(&self, v: &[BigInt], out: &mut [BigInt]) {
        let n = self.n as usize;
        for &(e, c) in &self.terms {
            let e = e as usize;
            for (t, a) in v.iter().enumerate() {
                if !a.is_zero() {
                    out[(t + e) % n] += a * c;
                }
            }
        }
    }
}

/// `2 cos(2 pi j / d)` as a reduced element of `Z[zeta_N]`.
pub fn embed_two_cos(n: u64, d: u64, j: u64) -> Result<CycElem> {
    if j == 0 {
        return domain("embed_two_cos requires j >= 1");
    }
    let s = SparseCyc::two_cos(n, d, j)?;
    Ok(s.to_elem(&CyclotomicRing::get(n)?))
}

/// Polynomial in one variable with coefficients in `Z[zeta_N]`, low-to-high.
#[derive(Clone)]
pub struct CycPoly {
    ring: Arc<CyclotomicRing>,
    coeffs: Vec<CycElem>,
}

impl PartialEq for CycPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ring.n == other.ring.n && self.coeffs == other.coeffs
    }
}

impl Eq for CycPoly {}

impl fmt::Debug for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

impl CycPoly {
    pub fn new(ring: &Arc<CyclotomicRing>, mut coeffs: Vec<CycElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CycPoly {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn constant(c: CycElem) -> Self {
        let ring = c.ring.clone();
        Self::new(&ring, vec![c])
    }

    pub fn zero(ring: &Arc<CyclotomicRing>) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn one(ring: &Arc<CyclotomicRing>) -> Self {
        Self::constant(CycElem::one(ring))
    }

    pub fn from_int_poly(ring: &Arc<CyclotomicRing>, p: &IntPoly) -> Self {
        Self::new(
            ring,
            p.coeffs()
                .iter()
                .map(|c| CycElem::from_int(ring, c.clone()))
                .collect(),
        )
    }

    pub fn ring(&self) -> &Arc<CyclotomicRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[CycElem] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let z = CycElem::zero(&self.ring);
        let v = (0..len)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&z)
                    .add(other.coeffs.get(i).unwrap_or(&z))
            })
            .collect();
        Self::new(&self.ring, v)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(CycElem::neg).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Schoolbook product; each output coefficient is reduced once.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ring);
        }
        let n = self.ring.n as usize;
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let v: Vec<CycElem> = (0..len)
            .into_par_iter()
            .map(|k| {
                let mut acc = vec![BigInt::zero(); n];
                let lo = k.saturating_sub(other.coeffs.len() - 1);
                let hi = k.min(self.coeffs.len() - 1);
                for i in lo..=hi {
                    self.coeffs[i].mul_into_cyclic(&other.coeffs[k - i], &mut acc);
                }
                CycElem::from_cyclic(&self.ring, &acc)
            })
            .collect();
        Self::new(&self.ring, v)
    }

    pub fn scale(&self, c: &CycElem) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }
}

/// Monic `prod (x - r_i)` over `Z[zeta_N]`.
pub fn product_of_linear_factors(roots: &[CycElem]) -> Result<CycPoly> {
    let Some(first) = roots.first() else {
        return Ok(CycPoly::one(&CyclotomicRing::get(1)?));
    };
    let ring = first.ring.clone();
    if roots.iter().any(|r| r.ring.n != ring.n) {
        return domain("roots live in different cyclotomic rings");
    }
    let mut acc = CycPoly::one(&ring);
    for r in roots {
        let lin = CycPoly::new(&ring, vec![r.neg(), CycElem::one(&ring)]);
        acc = acc.mul(&lin);
    }
    Ok(acc)
}

/// Polynomial whose coefficients live in `Z[X]/(X^N - 1)`, reduced modulo `Phi_N` only on output.
#[derive(Debug, Clone)]
pub struct CyclicPoly {
    n: u64,
    coeffs: Vec<Vec<BigInt>>,
}

impl CyclicPoly {
    pub fn constant(n: u64, c: BigInt) -> Self {
        let mut v = vec![BigInt::zero(); n as usize];
        v[0] = c;
        CyclicPoly { n, coeffs: vec![v] }
    }

    pub fn one(n: u64) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `self * (x - r)`
    pub fn mul_linear(&mut self, r: &SparseCyc) {
        assert_eq!(r.n, self.n);
        let len = self.n as usize;
        let prev = &self.coeffs;
        let next: Vec<Vec<BigInt>> = (0..=prev.len())
            .into_par_iter()
            .map(|i| {
                let mut out = if i > 0 {
                    prev[i - 1].clone()
                } else {
                    vec![BigInt::zero(); len]
                };
                if i < prev.len() {
                    let mut t = vec![BigInt::zero(); len];
                    r.mul_add_into(&prev[i], &mut t);
                    for (o, x) in out.iter_mut().zip(t) {
                        *o -= x;
                    }
                }
                out
            })
            .collect();
        self.coeffs = next;
    }

    pub fn add_constant(&mut self, c: &BigInt) {
        self.coeffs[0][0] += c;
    }

    /// `p(x - r)` by Horner's rule.
    pub fn shift(p: &IntPoly, r: &SparseCyc) -> Self {
        let mut acc = Self::constant(r.n, BigInt::zero());
        for c in p.coeffs().iter().rev() {
            acc.mul_linear(r);
            acc.add_constant(c);
        }
        acc.trim();
        acc
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().iter().all(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn reduce(&self, ring: &Arc<CyclotomicRing>) -> CycPoly {
        assert_eq!(ring.n, self.n);
        let coeffs = self
            .coeffs
            .par_iter()
            .map(|v| CycElem::from_cyclic(ring, v))
            .collect();
        CycPoly::new(ring, coeffs)
    }
}

/// Monic `prod (x - r_i)` for sparse roots, accumulated in `Z[X]/(X^N - 1)` and reduced at the end.
pub fn product_of_sparse_linear_factors(n: u64, roots: &[SparseCyc]) -> Result<CycPoly> {
    if roots.iter().any(|r| r.n != n) {
        return domain("roots live in different cyclotomic rings");
    }
    let ring = CyclotomicRing::get(n)?;
    let mut acc = CyclicPoly::one(n);
    for r in roots {
        acc.mul_linear(r);
    }
    Ok(acc.reduce(&ring))
}

/// Read off integer coefficients; fails if some coefficient is not a rational integer.
pub fn descend_to_integers(p: &CycPoly) -> Result<IntPoly> {
    p.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.as_integer().ok_or_else(|| {
                Error::NotGaloisStable(format!(
                    "coefficient of x^{i} is not a rational integer in Z[zeta_{}]",
                    p.ring.n
                ))
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(IntPoly::new)
}
