//! Brute-force checks on the explicit cell complex: the bipartite incidence
//! graph of `(Y_{d-1}, Y_d)`, its determinant zeta, and closed geodesic counts.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{poly_matrix_det, IntPoly};
use crate::error::{domain, Error, Result};
use crate::lattice::LatticeSpec;
use crate::limits::Limits;
use crate::numtheory::binomial;

/// Largest supported `m` for geodesic counts.
pub const MAX_GEODESIC_LENGTH: usize = 12;

/// A cube `(sigma, v)`: direction bitmask and torus coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cube {
    pub directions: Vec<usize>,
    pub base: Vec<u64>,
}

/// `B_H` for `V = Y_{d-1}`, `E = Y_d`.
#[derive(Debug, Clone, Serialize)]
pub struct BipartiteIncidence {
    pub v_side: Vec<Cube>,
    pub e_side: Vec<Cube>,
    /// For each hyperedge, the indices of the hypervertices it contains.
    pub members: Vec<Vec<usize>>,
}

impl BipartiteIncidence {
    pub fn v_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.v_side.len()];
        for m in &self.members {
            for &v in m {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn e_degrees(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn incidences(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    pub fn node_count(&self) -> usize {
        self.v_side.len() + self.e_side.len()
    }

    /// Euler characteristic of the graph `B_H`: nodes minus edges.
    pub fn euler_characteristic(&self) -> i64 {
        self.node_count() as i64 - self.incidences() as i64
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.v_side.len();
        let mut parent: Vec<usize> = (0..self.node_count()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (e, m) in self.members.iter().enumerate() {
            for &v in m {
                let (a, b) = (find(&mut parent, nv + e), find(&mut parent, v));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.node_count()).all(|x| find(&mut parent, x) == root)
    }
}

fn cubes_of_dim(spec: &LatticeSpec, d: usize) -> Vec<Cube> {
    let q = spec.q();
    let mut dirs: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, q: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=q - left {
            cur.push(i);
            rec(i + 1, q, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, q, d, &mut cur, &mut dirs);
    let mut out = Vec::new();
    for s in dirs {
        let mut v = vec![0u64; q];
        loop {
            out.push(Cube {
                directions: s.clone(),
                base: v.clone(),
            });
            let mut i = q;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                v[i] += 1;
                if v[i] < spec.sides()[i] {
                    break;
                }
                v[i] = 0;
            }
            if v.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    out
}

/// Faces of `(eta, v)` of one dimension lower: for each `i in eta`, `(eta - i, v)` and
/// `(eta - i, v + e_i)`.
fn faces(spec: &LatticeSpec, c: &Cube) -> Vec<Cube> {
    let mut out = Vec::new();
    for &i in &c.directions {
        let dirs: Vec<usize> = c.directions.iter().copied().filter(|&j| j != i).collect();
        out.push(Cube {
            directions: dirs.clone(),
            base: c.base.clone(),
        });
        let mut shifted = c.base.clone();
        shifted[i] = (shifted[i] + 1) % spec.sides()[i];
        out.push(Cube {
            directions: dirs,
            base: shifted,
        });
    }
    out
}

pub fn build_bh(spec: &LatticeSpec, d: usize) -> Result<BipartiteIncidence> {
    build_bh_with(spec, d, &Limits::from_env())
}

pub fn build_bh_with(spec: &LatticeSpec, d: usize, limits: &Limits) -> Result<BipartiteIncidence> {
    let q = spec.q();
    if d < 1 || d > q {
        return domain(format!("skeleton dimension {d} outside [1, {q}]"));
    }
    let vol = spec.volume();
    let size =
        (binomial(q as i64, d as i64 - 1) + binomial(q as i64, d as i64)).saturating_mul(vol);
    Limits::check(size, limits.assembled_cells, "cells of B_H")?;
    let v_side = cubes_of_dim(spec, d - 1);
    let e_side = cubes_of_dim(spec, d);
    let index: std::collections::HashMap<&Cube, usize> =
        v_side.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let members = e_side
        .iter()
        .map(|e| {
            let mut m: Vec<usize> = faces(spec, e).iter().map(|f| index[f]).collect();
            m.sort_unstable();
            m
        })
        .collect();
    Ok(BipartiteIncidence {
        v_side,
        e_side,
        members,
    })
}

fn check_hypergraph(bh: &BipartiteIncidence) -> Result<()> {
    if bh.v_degrees().iter().any(|&x| x < 2) {
        return domain("a hypervertex has degree < 2");
    }
    if bh
        .members
        .iter()
        .any(|m| m.windows(2).any(|w| w[0] == w[1]))
    {
        return domain("a hyperedge repeats a hypervertex");
    }
    if !bh.is_connected() {
        return domain("the hypergraph is disconnected");
    }
    Ok(())
}

/// `det(I - v A + v^2 Q)` over `Z[v]` for the adjacency `A` and `Q = D - I` of `B_H`.
pub fn bass_determinant(bh: &BipartiteIncidence) -> Result<IntPoly> {
    let nv = bh.v_side.len();
    let n = bh.node_count();
    let zero = IntPoly::zero();
    let mut m = vec![vec![zero.clone(); n]; n];
    let vdeg = bh.v_degrees();
    for (i, row) in m.iter_mut().enumerate() {
        let deg = if i < nv {
            vdeg[i]
        } else {
            bh.members[i - nv].len()
        } as i64;
        row[i] = IntPoly::from_i64s(&[1, 0, deg - 1]);
    }
    let minus_v = IntPoly::from_i64s(&[0, -1]);
    for (e, mem) in bh.members.iter().enumerate() {
        for &v in mem {
            m[v][nv + e] = &m[v][nv + e] + &minus_v;
            m[nv + e][v] = &m[nv + e][v] + &minus_v;
        }
    }
    poly_matrix_det(&m)
}

/// `zeta_H(u)^{-1} = (1-u)^{-chi(B_H)} det(I - sqrt(u) A + u Q)`.
pub fn bass_zeta(spec: &LatticeSpec, d: usize) -> Result<IntPoly> {
    bass_zeta_with(spec, d, &Limits::from_env())
}

pub fn bass_zeta_with(spec: &LatticeSpec, d: usize, limits: &Limits) -> Result<IntPoly> {
    let bh = build_bh_with(spec, d, limits)?;
    check_hypergraph(&bh)?;
    let det = bass_determinant(&bh)?;
    let mut even = Vec::new();
    for (i, c) in det.coeffs().iter().enumerate() {
        if i % 2 == 1 {
            if !c.is_zero() {
                return Err(Error::Internal(format!("odd coefficient of v^{i} is {c}")));
            }
        } else {
            even.push(c.clone());
        }
    }
    let det_u = IntPoly::new(even);
    let chi = bh.euler_characteristic();
    let one_minus_u = IntPoly::from_i64s(&[1, -1]);
    if chi <= 0 {
        Ok(&det_u * &one_minus_u.pow(chi.unsigned_abs()))
    } else {
        det_u.div_exact(&one_minus_u.pow(chi as u64))
    }
}

/// Directed edges of `B_H` and the non-backtracking successor lists.
pub struct NonBacktracking {
    /// `(tail, head)` over node ids; hypervertices first, then hyperedges.
    pub arcs: Vec<(usize, usize)>,
    pub successors: Vec<Vec<usize>>,
}

impl NonBacktracking {
    pub fn new(bh: &BipartiteIncidence) -> Self {
        let nv = bh.v_side.len();
        let mut arcs = Vec::new();
        for (e, mem) in bh.members.iter().enumerate() {
            for &v in mem {
                arcs.push((v, nv + e));
                arcs.push((nv + e, v));
            }
        }
        arcs.sort_unstable();
        let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); bh.node_count()];
        for (i, &(t, _)) in arcs.iter().enumerate() {
            out_of[t].push(i);
        }
        let successors = arcs
            .iter()
            .map(|&(t, h)| {
                out_of[h]
                    .iter()
                    .copied()
                    .filter(|&j| arcs[j].1 != t)
                    .collect()
            })
            .collect();
        NonBacktracking { arcs, successors }
    }

    /// `trace(T^k)` for `k = 1..=kmax`.
    pub fn traces(&self, kmax: usize) -> Result<Vec<BigInt>> {
        let n = self.arcs.len();
        let mut out = vec![BigInt::zero(); kmax];
        // row a of T^k, one start arc at a time
        for a in 0..n {
            let mut row = vec![0i128; n];
            row[a] = 1;
            for slot in out.iter_mut() {
                let mut next = vec![0i128; n];
                for (i, &x) in row.iter().enumerate() {
                    if x != 0 {
                        for &j in &self.successors[i] {
                            next[j] = next[j]
                                .checked_add(x)
                                .ok_or_else(|| Error::Resource("walk count overflow".into()))?;
                        }
                    }
                }
                row = next;
                *slot += row[a];
            }
        }
        Ok(out)
    }
}

/// `N_m` for `m = 1..=mmax`: based, oriented closed geodesics of hypergraph length `m`,
/// read off as `trace(T^{2m}) / 2` (each such geodesic is a closed non-backtracking walk of
/// length `2m` in `B_H`, counted once from a hypervertex start and once from a hyperedge start).
pub fn geodesic_counts(spec: &LatticeSpec, d: usize, mmax: usize) -> Result<Vec<BigInt>> {
    let bh = build_bh(spec, d)?;
    geodesic_counts_bh(&bh, mmax)
}

/// Raw `trace(T^{2m})` for `m = 1..=mmax`.
pub fn nonbacktracking_traces(bh: &BipartiteIncidence, mmax: usize) -> Result<Vec<BigInt>> {
    if mmax > MAX_GEODESIC_LENGTH {
        return Err(Error::Resource(format!(
            "m = {mmax} exceeds {MAX_GEODESIC_LENGTH}"
        )));
    }
    let t = NonBacktracking::new(bh).traces(2 * mmax)?;
    Ok(t.into_iter().skip(1).step_by(2).collect())
}

pub fn geodesic_counts_bh(bh: &BipartiteIncidence, mmax: usize) -> Result<Vec<BigInt>> {
    check_hypergraph(bh)?;
    let two = BigInt::from(2);
    nonbacktracking_traces(bh, mmax)?
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            if (&t % &two).is_zero() {
                Ok(t / &two)
            } else {
                Err(Error::Internal(format!(
                    "trace of T^{} is odd",
                    2 * (i + 1)
                )))
            }
        })
        .collect()
}

/// Closed geodesics `(v_0, e_0, ..., v_{m-1}, e_{m-1})` enumerated directly.
pub fn geodesic_counts_dfs(bh: &BipartiteIncidence, mmax: usize) -> Result<Vec<u64>> {
    if mmax > 8 {
        return Err(Error::Resource(format!(
            "DFS enumeration limited to m <= 8, got {mmax}"
        )));
    }
    let mut edges_of: Vec<Vec<usize>> = vec![Vec::new(); bh.v_side.len()];
    for (e, mem) in bh.members.iter().enumerate() {
        for &v in mem {
            edges_of[v].push(e);
        }
    }
    let mut counts = vec![0u64; mmax];
    struct Walk<'a> {
        bh: &'a BipartiteIncidence,
        edges_of: &'a [Vec<usize>],
        v0: usize,
        e0: usize,
        mmax: usize,
    }
    fn step(w: &Walk, v: usize, e: usize, len: usize, counts: &mut [u64]) {
        // at hyperedge e (the len-th), arrived from v; pick the next hypervertex
        for &v2 in &w.bh.members[e] {
            if v2 == v {
                continue;
            }
            if v2 == w.v0 && e != w.e0 {
                counts[len - 1] += 1;
            }
            if len < w.mmax {
                for &e2 in &w.edges_of[v2] {
                    if e2 != e {
                        step(w, v2, e2, len + 1, counts);
                    }
                }
            }
        }
    }
    for v0 in 0..bh.v_side.len() {
        for &e0 in &edges_of[v0] {
            let w = Walk {
                bh,
                edges_of: &edges_of,
                v0,
                e0,
                mmax,
            };
            step(&w, v0, e0, 1, &mut counts);
        }
    }
    Ok(counts)
}

/// Coefficients `N_1..N_mmax` of `u d/du log zeta(u) = -u Z'(u) / Z(u)` for `Z = zinv`.
pub fn log_derivative_series(zinv: &IntPoly, mmax: usize) -> Result<Vec<BigInt>> {
    if zinv.coeff(0) != BigInt::one() {
        return domain("constant term of the reciprocal zeta must be 1");
    }
    // s = -u Z' ; solve N * Z = s term by term
    let z: Vec<BigInt> = (0..=mmax).map(|i| zinv.coeff(i)).collect();
    let s: Vec<BigInt> = (0..=mmax)
        .map(|i| -(zinv.coeff(i) * BigInt::from(i)))
        .collect();
    let mut n = vec![BigInt::zero(); mmax + 1];
    for m in 1..=mmax {
        let mut acc = s[m].clone();
        for k in 1..m {
            acc -= &n[k] * &z[m - k];
        }
        n[m] = acc;
    }
    Ok(n.into_iter().skip(1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: &[u64]) -> LatticeSpec {
        LatticeSpec::new(n.to_vec()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn bh_shapes() {
        let b = build_bh(&lat(&[3]), 1).unwrap();
        assert_eq!((b.v_side.len(), b.e_side.len()), (3, 3));
        let b = build_bh(&lat(&[2, 2]), 1).unwrap();
        assert_eq!((b.v_side.len(), b.e_side.len()), (4, 8));
        assert!(b.v_degrees().iter().all(|&x| x == 4));
        assert!(b.e_degrees().iter().all(|&x| x == 2));
        let b = build_bh(&lat(&[3, 3]), 2).unwrap();
        assert_eq!((b.v_side.len(), b.e_side.len()), (18, 9));
        assert!(b.v_degrees().iter().all(|&x| x == 2));
        assert!(b.e_degrees().iter().all(|&x| x == 4));
        assert!(b.is_connected());
        assert!(matches!(
            build_bh(&lat(&[100, 100]), 2),
            Err(Error::Resource(_))
        ));
        assert!(build_bh(&lat(&[3, 3]), 0).is_err());
    }

    #[test]
    fn euler_characteristic_regular() {
        for (n, d) in [
            (vec![2u64, 2], 1usize),
            (vec![2, 2], 2),
            (vec![3, 4], 1),
            (vec![2, 2, 2], 2),
        ] {
            let b = build_bh(&lat(&n), d).unwrap();
            let q = n.len() as i64;
            let beta = 2 * d as i64 - 1;
            let alpha = 2 * (q - d as i64 + 1) - 1;
            let (v, e) = (b.v_side.len() as i64, b.e_side.len() as i64);
            assert_eq!(b.euler_characteristic(), v - beta * e);
            assert_eq!(b.euler_characteristic(), e - alpha * v);
        }
    }

    #[test]
    fn bass_cycle() {
        let expect = IntPoly::from_i64s(&[1, 0, 0, 0, -1]).pow(2);
        assert_eq!(bass_zeta(&lat(&[4]), 1).unwrap(), expect);
        let expect = IntPoly::from_i64s(&[1, 0, -1]).pow(2);
        assert_eq!(bass_zeta(&lat(&[2]), 1).unwrap(), expect);
    }

    #[test]
    fn log_derivative_examples() {
        let z = IntPoly::from_i64s(&[1, 0, 0, -1]).pow(2);
        assert_eq!(
            log_derivative_series(&z, 8).unwrap(),
            ints(&[0, 0, 6, 0, 0, 6, 0, 0])
        );
        assert_eq!(
            log_derivative_series(&IntPoly::one(), 5).unwrap(),
            ints(&[0; 5])
        );
        assert!(log_derivative_series(&IntPoly::from_i64s(&[2, 1]), 3).is_err());
    }

    #[test]
    fn triangle_geodesics() {
        let b = build_bh(&lat(&[3]), 1).unwrap();
        assert_eq!(
            geodesic_counts_bh(&b, 6).unwrap(),
            ints(&[0, 0, 6, 0, 0, 6])
        );
        assert_eq!(geodesic_counts_dfs(&b, 6).unwrap(), vec![0, 0, 6, 0, 0, 6]);
    }

    #[test]
    fn traces_dfs_and_series_agree() {
        for (n, d) in [(vec![2u64, 2], 1usize), (vec![2, 2], 2), (vec![3, 2], 1)] {
            let s = lat(&n);
            let b = build_bh(&s, d).unwrap();
            let tr = geodesic_counts_bh(&b, 6).unwrap();
            let dfs: Vec<BigInt> = geodesic_counts_dfs(&b, 6)
                .unwrap()
                .into_iter()
                .map(BigInt::from)
                .collect();
            assert_eq!(tr, dfs, "{n:?} d={d}");
            let series = log_derivative_series(&bass_zeta(&s, d).unwrap(), 6).unwrap();
            assert_eq!(tr, series, "{n:?} d={d}");
        }
    }
}
