//! Galois action of `(Z/N'Z)^x` on `J_{d_1} x ... x J_{d_q}`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::limits::Limits;
use crate::numtheory::{
    factorize, fold_into_j, gcd, j_set, lcm_all, phi_tilde, unit_generators, unit_group, JSet,
};

/// A tuple `(d_1, ..., d_q)` of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DVec {
    entries: Vec<u64>,
}

impl DVec {
    pub fn new(entries: Vec<u64>) -> Result<DVec> {
        if entries.is_empty() {
            return domain("a d-vector needs at least one entry");
        }
        if entries.contains(&0) {
            return domain("d-vector entries must be >= 1");
        }
        Ok(DVec { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn q(&self) -> usize {
        self.entries.len()
    }

    /// `N = prod d_i`, saturating.
    pub fn n(&self) -> u64 {
        self.entries.iter().fold(1u64, |a, &d| a.saturating_mul(d))
    }

    /// `N' = lcm(d_1, ..., d_q)`
    pub fn nprime(&self) -> u64 {
        lcm_all(&self.entries)
    }

    /// `prod phi~(d_i)`, the size of the index box, saturating.
    pub fn box_size(&self) -> u64 {
        self.entries
            .iter()
            .fold(1u64, |a, &d| a.saturating_mul(phi_tilde(d).unwrap()))
    }

    pub fn j_sets(&self) -> Vec<JSet> {
        self.entries.iter().map(|&d| j_set(d).unwrap()).collect()
    }

    /// The entries with every `1` and `2` removed.
    pub fn strip_small(&self) -> Vec<u64> {
        self.entries.iter().copied().filter(|&d| d >= 3).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdGraph {
    /// Indices (0-based) of entries with `d_i >= 3`.
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<Vec<usize>>,
}

impl GcdGraph {
    /// `beta_0`, the number of components.
    pub fn betti0(&self) -> usize {
        self.components.len()
    }

    /// Reduced Betti number, `0` for the empty graph.
    pub fn reduced_betti0(&self) -> usize {
        self.components.len().saturating_sub(1)
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn gcd_graph(dvec: &DVec) -> GcdGraph {
    let d = dvec.entries();
    let vertices: Vec<usize> = (0..d.len()).filter(|&i| d[i] >= 3).collect();
    let mut edges = Vec::new();
    let mut parent: Vec<usize> = (0..d.len()).collect();
    for (a, &i) in vertices.iter().enumerate() {
        for &j in &vertices[a + 1..] {
            if gcd(d[i], d[j]) >= 3 {
                edges.push((i, j));
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; d.len()];
    for &v in &vertices {
        let r = find(&mut parent, v);
        match root_of[r] {
            Some(c) => components[c].push(v),
            None => {
                root_of[r] = Some(components.len());
                components.push(vec![v]);
            }
        }
    }
    GcdGraph {
        vertices,
        edges,
        components,
    }
}

/// `a . (j_1, ..., j_q)`, each coordinate folded back into `J_{d_i}`.
pub fn act(a: u64, tuple: &[u64], dvec: &DVec) -> Vec<u64> {
    tuple
        .iter()
        .zip(dvec.entries())
        .map(|(&j, &d)| fold_into_j((a % d) * (j % d), d))
        .collect()
}

/// One orbit, members sorted lexicographically; the first member is the representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Orbit {
    members: Vec<Vec<u64>>,
}

impl Orbit {
    pub fn from_members(mut members: Vec<Vec<u64>>) -> Orbit {
        members.sort();
        members.dedup();
        Orbit { members }
    }

    pub fn members(&self) -> &[Vec<u64>] {
        &self.members
    }

    pub fn representative(&self) -> &[u64] {
        &self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, tuple: &[u64]) -> bool {
        self.members
            .binary_search_by(|m| m.as_slice().cmp(tuple))
            .is_ok()
    }

    /// Closed under the action of every unit.
    pub fn is_stable(&self, dvec: &DVec) -> bool {
        let gens = unit_generators(dvec.nprime());
        self.members
            .iter()
            .all(|m| gens.iter().all(|&g| self.contains(&act(g, m, dvec))))
    }

    /// Image under a permutation of coordinates: new coordinate `k` is old coordinate `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Orbit {
        Orbit::from_members(
            self.members
                .iter()
                .map(|m| perm.iter().map(|&p| m[p]).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    pub dvec: DVec,
    /// Sorted by representative.
    pub orbits: Vec<Orbit>,
}

impl OrbitDecomposition {
    pub fn representatives(&self) -> Vec<Vec<u64>> {
        self.orbits
            .iter()
            .map(|o| o.representative().to_vec())
            .collect()
    }

    /// The orbit containing `tuple`.
    pub fn orbit_of(&self, tuple: &[u64]) -> Option<&Orbit> {
        self.orbits.iter().find(|o| o.contains(tuple))
    }
}

struct BoxIndex {
    sets: Vec<JSet>,
    pos: Vec<Vec<usize>>,
}

impl BoxIndex {
    fn new(dvec: &DVec) -> BoxIndex {
        let sets = dvec.j_sets();
        let pos = sets
            .iter()
            .map(|s| {
                let mut p = vec![usize::MAX; s.d as usize + 1];
                for (i, &j) in s.members.iter().enumerate() {
                    p[j as usize] = i;
                }
                p
            })
            .collect();
        BoxIndex { sets, pos }
    }

    fn encode(&self, t: &[u64]) -> usize {
        t.iter()
            .zip(&self.sets)
            .zip(&self.pos)
            .fold(0, |acc, ((&j, s), p)| acc * s.len() + p[j as usize])
    }

    fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.sets.len()];
        for (k, s) in self.sets.iter().enumerate().rev() {
            out[k] = s.members[idx % s.len()];
            idx /= s.len();
        }
        out
    }
}

pub fn orbit_decompose(dvec: &DVec) -> Result<OrbitDecomposition> {
    orbit_decompose_with(dvec, &Limits::from_env())
}

/// Partition of the index box by closing each unvisited tuple (in lex order) under the generators.
pub fn orbit_decompose_with(dvec: &DVec, limits: &Limits) -> Result<OrbitDecomposition> {
    let size = dvec.box_size();
    Limits::check(size, limits.orbit_box, "index box size")?;
    let index = BoxIndex::new(dvec);
    let gens = unit_generators(dvec.nprime());
    let mut seen = vec![false; size as usize];
    let mut orbits = Vec::new();
    for start in 0..size as usize {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![index.decode(start)];
        let mut k = 0;
        while k < members.len() {
            for &g in &gens {
                let image = act(g, &members[k], dvec);
                let code = index.encode(&image);
                if !seen[code] {
                    seen[code] = true;
                    members.push(image);
                }
            }
            k += 1;
        }
        orbits.push(Orbit::from_members(members));
    }
    Ok(OrbitDecomposition {
        dvec: dvec.clone(),
        orbits,
    })
}

/// `prod phi~(d_i) / phi~(lcm) * 2^{reduced beta_0}`
pub fn orb_count_formula(dvec: &DVec) -> u64 {
    let num: u128 = dvec
        .entries()
        .iter()
        .map(|&d| phi_tilde(d).unwrap() as u128)
        .product();
    let den = phi_tilde(dvec.nprime()).unwrap() as u128;
    let b = gcd_graph(dvec).reduced_betti0();
    let num = num << b;
    debug_assert_eq!(num % den, 0);
    (num / den) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupH {
    pub dvec: DVec,
    pub elements: Vec<u64>,
    pub betti0: usize,
}

/// Units `g mod N'` with `g = +-1 mod d_i` for every `i`.
pub fn subgroup_h(dvec: &DVec) -> Result<SubgroupH> {
    if dvec.entries().iter().any(|&d| d <= 2) {
        return domain("subgroup_h requires every d_i >= 3");
    }
    let nprime = dvec.nprime();
    let elements = unit_group(nprime)?
        .elements
        .into_iter()
        .filter(|&g| dvec.entries().iter().all(|&d| g % d == 1 || g % d == d - 1))
        .collect();
    Ok(SubgroupH {
        dvec: dvec.clone(),
        elements,
        betti0: gcd_graph(dvec).betti0(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IotaAnalysis {
    pub m: u64,
    pub invariant_orbit_count: u64,
    pub formula_a: u64,
    pub f1: u32,
    pub f2: u32,
    pub f3: u32,
    /// The closed form is stated only when `phi~(m)` is even.
    pub formula_applicable: bool,
}

impl IotaAnalysis {
    pub fn agrees(&self) -> bool {
        self.invariant_orbit_count == self.formula_a
    }
}

/// Brute-force count of swap-invariant orbits of `(m, m)` beside `2^{f1+f2+f3-1}`.
pub fn iota_orbit_analysis(m: u64) -> Result<IotaAnalysis> {
    if m < 3 {
        return domain("iota_orbit_analysis requires m >= 3");
    }
    let dvec = DVec::new(vec![m, m])?;
    let dec = orbit_decompose(&dvec)?;
    let invariant = dec
        .orbits
        .iter()
        .filter(|o| {
            let r = o.representative();
            o.contains(&[r[1], r[0]])
        })
        .count() as u64;
    let f1 = if m.is_multiple_of(8) {
        2
    } else if m.is_multiple_of(4) {
        1
    } else {
        0
    };
    let odd: Vec<u64> = factorize(m)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != 2)
        .collect();
    let f2 = odd.len() as u32;
    let f3 = u32::from(!m.is_multiple_of(4) && f2 >= 1 && odd.iter().all(|&p| p % 4 == 1));
    let exp = (f1 + f2 + f3) as i64 - 1;
    let formula_a = if exp >= 0 { 1u64 << exp } else { 0 };
    Ok(IotaAnalysis {
        m,
        invariant_orbit_count: invariant,
        formula_a,
        f1,
        f2,
        f3,
        formula_applicable: phi_tilde(m)? % 2 == 0,
    })
}

/// Which of the three `q = 2` families a pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Q2Family {
    /// `(m, 2m)`
    Double,
    /// `(m, m)`
    Equal,
    /// `phi~(d_2) = 2`
    SmallSecond,
}

pub fn q2_family(d1: u64, d2: u64) -> Option<Q2Family> {
    if d1 == 0 || d2 == 0 {
        None
    } else if d2 == 2 * d1 {
        Some(Q2Family::Double)
    } else if d1 == d2 {
        Some(Q2Family::Equal)
    } else if phi_tilde(d2).ok() == Some(2) {
        Some(Q2Family::SmallSecond)
    } else {
        None
    }
}

/// Orbit representatives predicted for the three families, sorted.
pub fn q2_family_representatives(d1: u64, d2: u64) -> Result<Vec<Vec<u64>>> {
    let Some(family) = q2_family(d1, d2) else {
        return domain(format!(
            "({d1},{d2}) is outside the (m,2m), (m,m), phi~(d2)=2 families"
        ));
    };
    let pairs = |seconds: Vec<u64>| seconds.into_iter().map(|a| vec![1, a]).collect::<Vec<_>>();
    let mut reps = match family {
        Q2Family::Double => {
            let m = d1;
            if m.is_multiple_of(2) {
                pairs(j_set(m)?.members)
            } else {
                pairs(j_set(2 * m)?.members)
            }
        }
        Q2Family::Equal => pairs(j_set(d1)?.members),
        Q2Family::SmallSecond => {
            let split = if d2 == 10 {
                d1.is_multiple_of(5)
            } else {
                d1.is_multiple_of(d2)
            };
            if split {
                pairs(j_set(d2)?.members)
            } else {
                vec![vec![1, 1]]
            }
        }
    };
    reps.sort();
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(d: &[u64]) -> DVec {
        DVec::new(d.to_vec()).unwrap()
    }

    #[test]
    fn gcd_graph_examples() {
        let g = gcd_graph(&dv(&[1, 2]));
        assert!(g.vertices.is_empty());
        assert_eq!(g.reduced_betti0(), 0);
        let g = gcd_graph(&dv(&[5, 7]));
        assert_eq!(g.vertices, vec![0, 1]);
        assert!(g.edges.is_empty());
        assert_eq!(g.reduced_betti0(), 1);
        let g = gcd_graph(&dv(&[6, 9, 4]));
        assert_eq!(g.edges, vec![(0, 1)]);
        assert_eq!(g.reduced_betti0(), 1);
    }

    #[test]
    fn decomposition_examples() {
        let d = orbit_decompose(&dv(&[5, 5])).unwrap();
        assert_eq!(d.orbits.len(), 2);
        assert_eq!(d.orbits[0].members(), &[vec![1, 1], vec![2, 2]]);
        assert_eq!(d.orbits[1].members(), &[vec![1, 2], vec![2, 1]]);
        let d = orbit_decompose(&dv(&[3, 5])).unwrap();
        assert_eq!(d.orbits.len(), 1);
        assert_eq!(d.orbits[0].len(), 2);
        let d = orbit_decompose(&dv(&[1, 2])).unwrap();
        assert_eq!(d.orbits[0].members(), &[vec![1, 1]]);
    }

    #[test]
    fn decomposition_respects_the_box_bound() {
        let tight = Limits {
            orbit_box: 3,
            ..Limits::default()
        };
        assert!(matches!(
            orbit_decompose_with(&dv(&[7, 7]), &tight),
            Err(crate::Error::Resource(_))
        ));
    }

    #[test]
    fn formula_examples() {
        assert_eq!(orb_count_formula(&dv(&[8, 12])), phi_tilde(4).unwrap());
        assert_eq!(orb_count_formula(&dv(&[7, 7, 7])), 9);
        assert_eq!(orb_count_formula(&dv(&[9, 18])), 3);
    }

    #[test]
    fn subgroup_examples() {
        let h = subgroup_h(&dv(&[5, 5])).unwrap();
        assert_eq!(h.elements, vec![1, 4]);
        assert_eq!(h.betti0, 1);
        let h = subgroup_h(&dv(&[3, 5])).unwrap();
        assert_eq!(h.elements.len(), 4);
        assert_eq!(h.betti0, 2);
        let h = subgroup_h(&dv(&[9, 3])).unwrap();
        assert_eq!(h.elements.len(), 2);
        assert_eq!(h.betti0, 1);
        assert!(subgroup_h(&dv(&[2, 5])).is_err());
    }

    #[test]
    fn subgroup_order_is_two_to_the_components() {
        for a in 3..=15u64 {
            for b in 3..=15u64 {
                for c in [3u64, 4, 7, 10] {
                    let d = dv(&[a, b, c]);
                    let h = subgroup_h(&d).unwrap();
                    assert_eq!(h.elements.len(), 1 << h.betti0, "{d:?}");
                }
            }
        }
    }

    #[test]
    fn iota_examples() {
        let r = iota_orbit_analysis(5).unwrap();
        assert_eq!(r.invariant_orbit_count, 2);
        assert_eq!((r.f1, r.f2, r.f3), (0, 1, 1));
        assert_eq!(r.formula_a, 2);
        let r = iota_orbit_analysis(8).unwrap();
        assert_eq!(r.invariant_orbit_count, 2);
        assert_eq!((r.f1, r.f2, r.f3), (2, 0, 0));
        assert_eq!(r.formula_a, 2);
        let r = iota_orbit_analysis(12).unwrap();
        assert_eq!((r.f1, r.f2, r.f3), (1, 1, 0));
        assert_eq!(r.formula_a, 2);
        assert_eq!(r.invariant_orbit_count, 2);
        assert!(iota_orbit_analysis(2).is_err());
    }

    #[test]
    fn family_representative_examples() {
        assert_eq!(
            q2_family_representatives(7, 7).unwrap(),
            vec![vec![1, 1], vec![1, 2], vec![1, 3]]
        );
        assert_eq!(
            q2_family_representatives(16, 8).unwrap(),
            vec![vec![1, 1], vec![1, 3]]
        );
        assert_eq!(q2_family_representatives(7, 5).unwrap(), vec![vec![1, 1]]);
        assert!(q2_family_representatives(7, 9).is_err());
    }

    #[test]
    fn family_representatives_match_decomposition() {
        for d1 in 1..=40u64 {
            for d2 in 1..=40u64 {
                if let Ok(reps) = q2_family_representatives(d1, d2) {
                    let dec = orbit_decompose(&dv(&[d1, d2])).unwrap();
                    assert_eq!(reps, dec.representatives(), "({d1},{d2})");
                }
            }
        }
    }

    #[test]
    fn orbits_are_stable_and_sized_by_lemma() {
        for d in [[5u64, 5, 5], [12, 8, 9], [7, 14, 3], [10, 15, 6]] {
            let d = dv(&d);
            let dec = orbit_decompose(&d).unwrap();
            let expected = phi_tilde(d.nprime()).unwrap() >> gcd_graph(&d).reduced_betti0();
            for o in &dec.orbits {
                assert!(o.is_stable(&d));
                assert_eq!(o.len() as u64, expected);
            }
        }
    }
}
