//! Cubes, twisted operators and spectra of the periodic cubical lattice.
//!
//! A `d`-cube is a pair `(sigma, v)` with `sigma` a `d`-subset of the
//! coordinate directions and `v` a vertex of the discrete torus. Subsets are
//! stored as bitmasks and always listed in lexicographic order of their
//! sorted elements.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::limits::Limits;
use crate::numtheory::binomial;

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 32;

/// Eigenvalues closer than this are merged into one multiplicity class.
pub const SPECTRUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeSpec {
    sides: Vec<u64>,
}

impl LatticeSpec {
    pub fn new(sides: Vec<u64>) -> Result<LatticeSpec> {
        if sides.is_empty() {
            return domain("lattice needs at least one side");
        }
        if sides.len() > MAX_DIM {
            return domain(format!("dimension {} exceeds {MAX_DIM}", sides.len()));
        }
        if let Some(n) = sides.iter().find(|&&n| n < 2) {
            return domain(format!("side length {n} < 2"));
        }
        Ok(LatticeSpec { sides })
    }

    pub fn sides(&self) -> &[u64] {
        &self.sides
    }

    pub fn q(&self) -> usize {
        self.sides.len()
    }

    /// `|n| = n_1 ... n_q`, saturating.
    pub fn volume(&self) -> u64 {
        self.sides.iter().fold(1u64, |a, &n| a.saturating_mul(n))
    }

    /// All characters in lexicographic order of `k`.
    pub fn characters(&self) -> Vec<Character> {
        let total = self.volume() as usize;
        let mut out = Vec::with_capacity(total);
        let mut k = vec![0u64; self.q()];
        for _ in 0..total {
            out.push(Character { k: k.clone() });
            for i in (0..k.len()).rev() {
                k[i] += 1;
                if k[i] < self.sides[i] {
                    break;
                }
                k[i] = 0;
            }
        }
        out
    }
}

/// A character of the torus, `z_j = exp(2 pi i k_j / n_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character {
    k: Vec<u64>,
}

impl Character {
    pub fn new(spec: &LatticeSpec, k: Vec<u64>) -> Result<Character> {
        if k.len() != spec.q() {
            return domain(format!(
                "character has {} components, lattice has {}",
                k.len(),
                spec.q()
            ));
        }
        for (j, (&kj, &nj)) in k.iter().zip(spec.sides()).enumerate() {
            if kj >= nj {
                return domain(format!("k[{j}] = {kj} not in [0, {nj})"));
            }
        }
        Ok(Character { k })
    }

    pub fn trivial(spec: &LatticeSpec) -> Character {
        Character {
            k: vec![0; spec.q()],
        }
    }

    pub fn k(&self) -> &[u64] {
        &self.k
    }

    pub fn is_trivial(&self) -> bool {
        self.k.iter().all(|&x| x == 0)
    }

    pub fn z(&self, spec: &LatticeSpec) -> Vec<Complex64> {
        self.k
            .iter()
            .zip(spec.sides())
            .map(|(&k, &n)| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect()
    }

    /// `w_j = 2 + z_j + 1/z_j`.
    pub fn w(&self, spec: &LatticeSpec) -> Vec<f64> {
        self.k
            .iter()
            .zip(spec.sides())
            .map(|(&k, &n)| 2.0 + 2.0 * (2.0 * PI * k as f64 / n as f64).cos())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Incidence,
    IncidenceDual,
    Coboundary,
    CoboundaryDual,
    AdjacencyUp,
    AdjacencyDown,
    LaplacianUp,
    LaplacianDown,
}

/// A twisted operator restricted to one character, rows and columns indexed by
/// subsets of the directions.
#[derive(Debug, Clone)]
pub struct TwistedMatrix {
    pub kind: MatrixKind,
    pub d: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    matrix: DMatrix<Complex64>,
}

impl TwistedMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Row labels as 1-based sorted direction lists.
    pub fn row_labels(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|&m| mask_elements(m)).collect()
    }

    pub fn col_labels(&self) -> Vec<Vec<usize>> {
        self.cols.iter().map(|&m| mask_elements(m)).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.is_square() && (&self.matrix - self.matrix.adjoint()).camax() <= tol
    }

    /// Sorted eigenvalues; only meaningful for the Hermitian kinds.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.matrix.is_square() {
            return domain("eigenvalues of a non-square matrix");
        }
        Ok(hermitian_eigenvalues(&self.matrix))
    }

    /// Number of singular values at most `tol`, counted against the column count.
    pub fn kernel_dim(&self, tol: f64) -> usize {
        kernel_dim(&self.matrix, tol)
    }
}

fn mask_elements(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect()
}

/// `d`-subsets of `{0,...,q-1}` as bitmasks, lexicographic in sorted elements.
pub(crate) fn subsets(q: usize, d: usize) -> Vec<u32> {
    fn rec(start: usize, q: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=q - left {
            rec(i + 1, q, left - 1, acc | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    if d <= q {
        rec(0, q, d, 0, &mut out);
    }
    out
}

/// `sgn(eta, eta \ {i})`: `(-1)^(j-1)` where `i` is the `j`th element of `eta`.
fn sgn(eta: u32, i: usize) -> f64 {
    if (eta & ((1u32 << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn single(m: u32) -> usize {
    m.trailing_zeros() as usize
}

fn check_d(spec: &LatticeSpec, d: usize, lo: usize, hi: usize, what: &str) -> Result<()> {
    if d < lo || d > hi {
        return domain(format!(
            "{what}: d = {d} outside [{lo}, {hi}] for q = {}",
            spec.q()
        ));
    }
    Ok(())
}

fn check_char(spec: &LatticeSpec, chi: &Character) -> Result<()> {
    Character::new(spec, chi.k.clone()).map(|_| ())
}

/// `|Y_d| = C(q,d) |n|`.
pub fn cube_count(spec: &LatticeSpec, d: usize) -> Result<u64> {
    check_d(spec, d, 0, spec.q(), "cube_count")?;
    Ok(binomial(spec.q() as i64, d as i64).saturating_mul(spec.volume()))
}

fn incidence_like(
    q: usize,
    d: usize,
    entry: impl Fn(u32, usize) -> Complex64,
) -> (Vec<u32>, Vec<u32>, DMatrix<Complex64>) {
    let rows = subsets(q, d + 1);
    let cols = subsets(q, d);
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (r, &eta) in rows.iter().enumerate() {
        for (c, &sigma) in cols.iter().enumerate() {
            if sigma & !eta == 0 {
                m[(r, c)] = entry(eta, single(eta & !sigma));
            }
        }
    }
    (rows, cols, m)
}

/// `M_d(z)`, of size `C(q,d+1) x C(q,d)`, entries `1 + z_{eta \ sigma}`.
pub fn twisted_incidence(spec: &LatticeSpec, d: usize, chi: &Character) -> Result<TwistedMatrix> {
    check_d(spec, d, 0, spec.q() - 1, "twisted_incidence")?;
    check_char(spec, chi)?;
    let z = chi.z(spec);
    let one = Complex64::new(1.0, 0.0);
    let (rows, cols, matrix) = incidence_like(spec.q(), d, |_, i| one + z[i]);
    Ok(TwistedMatrix {
        kind: MatrixKind::Incidence,
        d,
        rows,
        cols,
        matrix,
    })
}

/// `M_d^*(z)`, the adjoint of [`twisted_incidence`].
pub fn twisted_incidence_dual(
    spec: &LatticeSpec,
    d: usize,
    chi: &Character,
) -> Result<TwistedMatrix> {
    let m = twisted_incidence(spec, d, chi)?;
    Ok(TwistedMatrix {
        kind: MatrixKind::IncidenceDual,
        d,
        rows: m.cols,
        cols: m.rows,
        matrix: m.matrix.adjoint(),
    })
}

/// `delta_d(z)`, entries `sgn(eta, sigma) (z_{eta \ sigma} - 1)`.
pub fn twisted_coboundary(spec: &LatticeSpec, d: usize, chi: &Character) -> Result<TwistedMatrix> {
    check_d(spec, d, 0, spec.q() - 1, "twisted_coboundary")?;
    check_char(spec, chi)?;
    let z = chi.z(spec);
    let one = Complex64::new(1.0, 0.0);
    let (rows, cols, matrix) = incidence_like(spec.q(), d, |eta, i| (z[i] - one) * sgn(eta, i));
    Ok(TwistedMatrix {
        kind: MatrixKind::Coboundary,
        d,
        rows,
        cols,
        matrix,
    })
}

pub fn twisted_coboundary_dual(
    spec: &LatticeSpec,
    d: usize,
    chi: &Character,
) -> Result<TwistedMatrix> {
    let m = twisted_coboundary(spec, d, chi)?;
    Ok(TwistedMatrix {
        kind: MatrixKind::CoboundaryDual,
        d,
        rows: m.cols,
        cols: m.rows,
        matrix: m.matrix.adjoint(),
    })
}

/// Entry formulas for the up/down adjacency blocks on `d`-subsets, with no
/// range check (out-of-range blocks come out as the zero operator).
pub(crate) fn adjacency_block(
    q: usize,
    d: usize,
    z: &[Complex64],
    dir: Direction,
) -> DMatrix<Complex64> {
    let s = subsets(q, d);
    let one = Complex64::new(1.0, 0.0);
    let w = |i: usize| (one + z[i].conj()) * (one + z[i]);
    let full: u32 = if q == 32 { u32::MAX } else { (1u32 << q) - 1 };
    let mut m = DMatrix::zeros(s.len(), s.len());
    for (a, &sa) in s.iter().enumerate() {
        for (b, &sb) in s.iter().enumerate() {
            if a == b {
                let pool = match dir {
                    Direction::Up => full & !sa,
                    Direction::Down => sa,
                };
                let admissible = match dir {
                    Direction::Up => d < q,
                    Direction::Down => d >= 1,
                };
                if admissible {
                    m[(a, b)] = (0..q).filter(|&i| pool >> i & 1 == 1).map(w).sum();
                }
            } else if (sa & !sb).count_ones() == 1 {
                let i = single(sa & !sb);
                let j = single(sb & !sa);
                m[(a, b)] = (one + z[j].conj()) * (one + z[i]);
            }
        }
    }
    m
}

/// `A^up_d(z)` (`0 <= d <= q-1`) or `A^down_d(z)` (`1 <= d <= q`).
pub fn twisted_adjacency(
    spec: &LatticeSpec,
    d: usize,
    chi: &Character,
    dir: Direction,
) -> Result<TwistedMatrix> {
    let q = spec.q();
    let kind = match dir {
        Direction::Up => {
            check_d(spec, d, 0, q - 1, "twisted_adjacency up")?;
            MatrixKind::AdjacencyUp
        }
        Direction::Down => {
            check_d(spec, d, 1, q, "twisted_adjacency down")?;
            MatrixKind::AdjacencyDown
        }
    };
    check_char(spec, chi)?;
    let z = chi.z(spec);
    let s = subsets(q, d);
    Ok(TwistedMatrix {
        kind,
        d,
        rows: s.clone(),
        cols: s,
        matrix: adjacency_block(q, d, &z, dir),
    })
}

/// `L^up_d(z)` or `L^down_d(z)` for `0 <= d <= q`. `L^up_q` and `L^down_0`
/// are the zero operator.
pub fn twisted_laplacian(
    spec: &LatticeSpec,
    d: usize,
    chi: &Character,
    dir: Direction,
) -> Result<TwistedMatrix> {
    let q = spec.q();
    check_d(spec, d, 0, q, "twisted_laplacian")?;
    check_char(spec, chi)?;
    let z = chi.z(spec);
    let one = Complex64::new(1.0, 0.0);
    let full: u32 = if q == 32 { u32::MAX } else { (1u32 << q) - 1 };
    let s = subsets(q, d);
    let mut m = DMatrix::zeros(s.len(), s.len());
    for (a, &sa) in s.iter().enumerate() {
        for (b, &sb) in s.iter().enumerate() {
            if a == b {
                let pool = match dir {
                    Direction::Up => full & !sa,
                    Direction::Down => sa,
                };
                m[(a, b)] = (0..q)
                    .filter(|&i| pool >> i & 1 == 1)
                    .map(|i| (z[i].conj() - one) * (z[i] - one))
                    .sum();
            } else if (sa & !sb).count_ones() == 1 {
                let i = single(sa & !sb);
                let j = single(sb & !sa);
                m[(a, b)] = match dir {
                    Direction::Up => {
                        let eta = sa | sb;
                        (z[j].conj() - one) * (z[i] - one) * (sgn(eta, j) * sgn(eta, i))
                    }
                    Direction::Down => {
                        (z[i] - one) * (z[j].conj() - one) * (sgn(sa, i) * sgn(sb, j))
                    }
                };
            }
        }
    }
    let kind = match dir {
        Direction::Up => MatrixKind::LaplacianUp,
        Direction::Down => MatrixKind::LaplacianDown,
    };
    Ok(TwistedMatrix {
        kind,
        d,
        rows: s.clone(),
        cols: s,
        matrix: m,
    })
}

pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn kernel_dim(m: &DMatrix<Complex64>, tol: f64) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    if m.nrows() == 0 {
        return m.ncols();
    }
    let rank = m
        .clone()
        .singular_values()
        .iter()
        .filter(|&&s| s > tol)
        .count();
    m.ncols() - rank
}

/// Groups a sorted list into `(value, multiplicity)` classes.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, u64)> {
    let mut out: Vec<(f64, u64, f64)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((v, c, first)) if (x - *first).abs() <= tol => {
                *v += x;
                *c += 1;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter()
        .map(|(s, c, _)| {
            let v = s / c as f64;
            (if v.abs() <= tol { 0.0 } else { v }, c)
        })
        .collect()
}

/// `{ sum_j 2(1 + cos(2 pi k_j / n_j)) }` over all `k`, sorted ascending.
pub fn spectrum_adown_q(spec: &LatticeSpec) -> Vec<f64> {
    let mut out: Vec<f64> = spec
        .characters()
        .iter()
        .map(|c| c.w(spec).iter().sum())
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Closed-form spectrum of `L^up_d`: `2q - 2 sum cos(2 pi k_i/n_i)` with
/// multiplicity `C(q-1,d)` for every `k`, plus `C(q-1,d-1)|n|` extra zeros.
pub fn laplacian_spectrum(spec: &LatticeSpec, d: usize) -> Result<Vec<(f64, u64)>> {
    check_d(spec, d, 0, spec.q(), "laplacian_spectrum")?;
    let q = spec.q() as i64;
    let mult = binomial(q - 1, d as i64);
    let extra = binomial(q - 1, d as i64 - 1).saturating_mul(spec.volume());
    let mut all = Vec::new();
    if mult > 0 {
        for chi in spec.characters() {
            let v = 2.0 * q as f64 - chi.w(spec).iter().map(|w| w - 2.0).sum::<f64>();
            all.extend(std::iter::repeat_n(v, mult as usize));
        }
    }
    all.extend(std::iter::repeat_n(0.0, extra as usize));
    all.sort_by(f64::total_cmp);
    Ok(cluster(&all, SPECTRUM_TOL))
}

/// Union of the eigenvalues of the twisted blocks over all characters.
pub fn twisted_spectrum(spec: &LatticeSpec, d: usize, kind: MatrixKind) -> Result<Vec<f64>> {
    let chars = spec.characters();
    let blocks: Result<Vec<Vec<f64>>> = chars
        .par_iter()
        .map(|chi| {
            let m = match kind {
                MatrixKind::AdjacencyUp => twisted_adjacency(spec, d, chi, Direction::Up)?,
                MatrixKind::AdjacencyDown => twisted_adjacency(spec, d, chi, Direction::Down)?,
                MatrixKind::LaplacianUp => twisted_laplacian(spec, d, chi, Direction::Up)?,
                MatrixKind::LaplacianDown => twisted_laplacian(spec, d, chi, Direction::Down)?,
                _ => return domain("twisted_spectrum needs an adjacency or Laplacian kind"),
            };
            m.eigenvalues()
        })
        .collect();
    let mut all: Vec<f64> = blocks?.into_iter().flatten().collect();
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// Untwisted operators on the explicit cell complex, for oracle-sized lattices.
pub struct Assembled {
    spec: LatticeSpec,
}

impl Assembled {
    pub fn new(spec: &LatticeSpec, limits: &Limits) -> Result<Assembled> {
        let worst = (0..=spec.q())
            .map(|d| cube_count(spec, d))
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        Limits::check(worst, limits.assembled_cells, "cells in one dimension")?;
        Ok(Assembled { spec: spec.clone() })
    }

    fn vertex_shift(&self, v: usize, i: usize) -> usize {
        let n = self.spec.sides();
        let stride: usize = n[i + 1..].iter().map(|&x| x as usize).product();
        let digit = v / stride % n[i] as usize;
        let next = (digit + 1) % n[i] as usize;
        v - digit * stride + next * stride
    }

    fn coupling(&self, d: usize, signed: bool) -> Result<DMatrix<f64>> {
        let q = self.spec.q();
        if d >= q {
            return domain(format!("d = {d} has no coboundary for q = {q}"));
        }
        let vol = self.spec.volume() as usize;
        let rows = subsets(q, d + 1);
        let cols = subsets(q, d);
        let mut m = DMatrix::zeros(rows.len() * vol, cols.len() * vol);
        for (r, &eta) in rows.iter().enumerate() {
            for (c, &sigma) in cols.iter().enumerate() {
                if sigma & !eta != 0 {
                    continue;
                }
                let i = single(eta & !sigma);
                let s = if signed { sgn(eta, i) } else { 1.0 };
                for v in 0..vol {
                    let row = r * vol + v;
                    m[(row, c * vol + self.vertex_shift(v, i))] += s;
                    m[(row, c * vol + v)] += if signed { -s } else { 1.0 };
                }
            }
        }
        Ok(m)
    }

    /// The incidence matrix `M_d` between `Y_{d+1}` and `Y_d`.
    pub fn incidence(&self, d: usize) -> Result<DMatrix<f64>> {
        self.coupling(d, false)
    }

    /// The coboundary `delta_d`.
    pub fn coboundary(&self, d: usize) -> Result<DMatrix<f64>> {
        self.coupling(d, true)
    }

    pub fn adjacency(&self, d: usize, dir: Direction) -> Result<DMatrix<f64>> {
        match dir {
            Direction::Up => {
                let m = self.incidence(d)?;
                Ok(m.transpose() * m)
            }
            Direction::Down => {
                if d == 0 {
                    return domain("A^down_0 is undefined");
                }
                let m = self.incidence(d - 1)?;
                Ok(&m * m.transpose())
            }
        }
    }

    pub fn laplacian(&self, d: usize, dir: Direction) -> Result<DMatrix<f64>> {
        let q = self.spec.q();
        let size = cube_count(&self.spec, d)? as usize;
        match dir {
            Direction::Up if d == q => Ok(DMatrix::zeros(size, size)),
            Direction::Down if d == 0 => Ok(DMatrix::zeros(size, size)),
            Direction::Up => {
                let m = self.coboundary(d)?;
                Ok(m.transpose() * m)
            }
            Direction::Down => {
                let m = self.coboundary(d - 1)?;
                Ok(&m * m.transpose())
            }
        }
    }
}

/// JSON spectrum dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDump {
    pub n: Vec<u64>,
    pub d: usize,
    pub eigenvalues: Vec<(f64, u64)>,
}

pub fn spectrum_dump(spec: &LatticeSpec, d: usize) -> Result<SpectrumDump> {
    Ok(SpectrumDump {
        n: spec.sides().to_vec(),
        d,
        eigenvalues: laplacian_spectrum(spec, d)?,
    })
}

fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    c
}

fn elementary_symmetric(t: &[f64]) -> Vec<f64> {
    let mut e = vec![1.0];
    for &x in t {
        let mut next = vec![0.0; e.len() + 1];
        for (k, &a) in e.iter().enumerate() {
            next[k] += a;
            next[k + 1] += a * x;
        }
        e = next;
    }
    e
}

/// Coefficients in `t` (low to high) of
/// `sum_k (2-k) 2^(k-1) e_k(w) (t - u e_1(w))^(q-k) u^k`.
pub fn charpoly_aup1_closed_coeffs(w: &[f64], u: f64) -> Vec<f64> {
    let q = w.len();
    let e = elementary_symmetric(w);
    let shift = -u * e[1];
    let mut out = vec![0.0; q + 1];
    for k in 0..=q {
        let c = (2.0 - k as f64) * 2f64.powi(k as i32 - 1) * e[k] * u.powi(k as i32);
        let p = q - k;
        for j in 0..=p {
            out[j] += c * binomial(p as i64, j as i64) as f64 * shift.powi((p - j) as i32);
        }
    }
    out
}

/// Largest discrepancy between `det(t - u A^up_1(z))` and its closed form,
/// both coefficientwise in `t` and at a few sample values of `t`.
pub fn charpoly_aup1_closed(spec: &LatticeSpec, chi: &Character, u: f64) -> Result<f64> {
    check_char(spec, chi)?;
    let q = spec.q();
    let z = chi.z(spec);
    let a = adjacency_block(q, 1, &z, Direction::Up) * Complex64::new(u, 0.0);
    let lhs = poly_from_roots(
        &hermitian_eigenvalues(&a)
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>(),
    );
    let rhs = charpoly_aup1_closed_coeffs(&chi.w(spec), u);
    let mut worst = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, &r)| (l - r).norm())
        .fold(0.0, f64::max);
    for t in [-1.5, 0.25, 2.0] {
        let tm = DMatrix::<Complex64>::identity(q, q) * Complex64::new(t, 0.0) - &a;
        let direct = tm.determinant();
        let closed: f64 = rhs.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        worst = worst.max((direct - closed).norm());
    }
    Ok(worst)
}
