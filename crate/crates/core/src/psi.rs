//! Cyclotomic-like polynomials `Psi_d(x)`, their per-orbit factors, and the degree-one classifier.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::poly::bigint_serialize;
use crate::algebra::{
    descend_to_integers, product_of_sparse_linear_factors, psi_univariate, CycElem, CycPoly,
    CyclicPoly, CyclotomicRing, IntPoly, SparseCyc,
};
use crate::error::{domain, Error, Result};
use crate::limits::Limits;
use crate::numtheory::{factorize, gcd, j_set, phi_tilde};
use crate::orbits::{orbit_decompose_with, DVec, Orbit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiPolynomial {
    pub dvec: DVec,
    pub poly: IntPoly,
}

impl PsiPolynomial {
    pub fn homogenize(&self) -> Homogeneous {
        homogenize(&self.poly)
    }
}

/// `y^deg p(x/y)`, stored as `(i, deg - i, c_i)` triples with `c_i != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homogeneous {
    pub degree: usize,
    #[serde(serialize_with = "terms_serialize")]
    pub terms: Vec<(usize, usize, BigInt)>,
}

fn terms_serialize<S: serde::Serializer>(
    terms: &[(usize, usize, BigInt)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct Term<'a>(
        usize,
        usize,
        #[serde(serialize_with = "bigint_serialize")] &'a BigInt,
    );
    let mut seq = s.serialize_seq(Some(terms.len()))?;
    for (i, j, c) in terms {
        seq.serialize_element(&Term(*i, *j, c))?;
    }
    seq.end()
}

impl Homogeneous {
    /// Substitute polynomials for `x` and `y`.
    pub fn eval(&self, x: &IntPoly, y: &IntPoly) -> IntPoly {
        let mut xp = vec![IntPoly::one()];
        let mut yp = vec![IntPoly::one()];
        for _ in 0..self.degree {
            xp.push(xp.last().unwrap() * x);
            yp.push(yp.last().unwrap() * y);
        }
        self.terms.iter().fold(IntPoly::zero(), |acc, (i, j, c)| {
            &acc + &(&xp[*i] * &yp[*j]).scale(c)
        })
    }

    /// Back to one variable by `y = 1`.
    pub fn dehomogenize(&self) -> IntPoly {
        let mut v = vec![BigInt::zero(); self.degree + 1];
        for (i, _, c) in &self.terms {
            v[*i] += c;
        }
        IntPoly::new(v)
    }

    pub fn pretty(&self) -> String {
        let mono = |v: &str, e: usize| match e {
            0 => String::new(),
            1 => v.to_string(),
            _ => format!("{v}^{e}"),
        };
        let mut out = String::new();
        for (i, j, c) in self.terms.iter().rev() {
            let neg = c < &BigInt::zero();
            let abs = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let m = format!("{}{}", mono("x", *i), mono("y", *j));
            if m.is_empty() || !abs.is_one() {
                out.push_str(&abs.to_string());
            }
            out.push_str(&m);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

pub fn homogenize(p: &IntPoly) -> Homogeneous {
    let degree = p.degree().unwrap_or(0);
    let terms = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, degree - i, c.clone()))
        .collect();
    Homogeneous { degree, terms }
}

/// `c(j) = sum_i 2 cos(2 pi j_i / d_i)` as a sparse element of `Z[zeta_N]`, `N` a multiple of `lcm d`.
pub fn c_value(n: u64, dvec: &DVec, tuple: &[u64]) -> Result<SparseCyc> {
    let mut acc = SparseCyc::new(n, vec![]);
    for (&d, &j) in dvec.entries().iter().zip(tuple) {
        acc = acc.add(&SparseCyc::two_cos(n, d, j)?);
    }
    Ok(acc)
}

pub fn psi_multi(dvec: &DVec) -> Result<PsiPolynomial> {
    psi_multi_with(dvec, &Limits::from_env())
}

/// Coordinate by coordinate: `P_k(x) = prod_{j in J_{d_k}} P_{k-1}(x - 2cos(2 pi j/d_k))`, each
/// product formed in `Z[zeta_{d_k}]` and brought back to `Z[x]`.
pub fn psi_multi_with(dvec: &DVec, limits: &Limits) -> Result<PsiPolynomial> {
    Limits::check(dvec.box_size(), limits.psi_degree, "degree of Psi")?;
    let d = dvec.entries();
    let mut p = psi_univariate(d[0])?;
    for &dk in &d[1..] {
        p = if dk <= 2 {
            let c = if dk == 1 { 2 } else { -2 };
            p.compose(&IntPoly::from_i64s(&[-c, 1]))
        } else {
            let ring = CyclotomicRing::get(dk)?;
            let shifts: Vec<CycPoly> = j_set(dk)?
                .members
                .par_iter()
                .map(|&j| {
                    let r = SparseCyc::two_cos(dk, dk, j)?;
                    Ok(CyclicPoly::shift(&p, &r).reduce(&ring))
                })
                .collect::<Result<_>>()?;
            let prod = shifts
                .iter()
                .skip(1)
                .fold(shifts[0].clone(), |acc, s| acc.mul(s));
            descend_to_integers(&prod)
                .map_err(|e| Error::Internal(format!("Psi{d:?} failed to descend: {e}")))?
        };
    }
    Ok(PsiPolynomial {
        dvec: dvec.clone(),
        poly: p,
    })
}

/// Same polynomial, as one product of linear factors over `Z[zeta_{N'}]`.
pub fn psi_multi_direct(dvec: &DVec) -> Result<PsiPolynomial> {
    let limits = Limits::from_env();
    Limits::check(dvec.box_size(), limits.psi_degree, "degree of Psi")?;
    let n = dvec.nprime();
    let sets = dvec.j_sets();
    let mut tuples: Vec<Vec<u64>> = vec![vec![]];
    for s in &sets {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                s.members.iter().map(move |&j| {
                    let mut t = t.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    let roots = tuples
        .iter()
        .map(|t| c_value(n, dvec, t))
        .collect::<Result<Vec<_>>>()?;
    let poly = descend_to_integers(&product_of_sparse_linear_factors(n, &roots)?)
        .map_err(|e| Error::Internal(format!("Psi{:?} failed to descend: {e}", dvec.entries())))?;
    Ok(PsiPolynomial {
        dvec: dvec.clone(),
        poly,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPolynomial {
    pub dvec: DVec,
    pub orbit: Orbit,
    pub poly: IntPoly,
    pub irr_core: IntPoly,
    pub multiplicity: u64,
    /// The map `c` is injective on the orbit.
    pub values_distinct: bool,
}

/// `Psi(x; O) = prod_{j in O} (x - c(j))` together with its irreducible core and multiplicity.
pub fn psi_orbit(dvec: &DVec, orbit: &Orbit) -> Result<OrbitPolynomial> {
    if orbit.is_empty() {
        return domain("empty orbit");
    }
    if orbit.members().iter().any(|m| m.len() != dvec.q()) {
        return domain("orbit tuples do not match the d-vector length");
    }
    let n = dvec.nprime();
    let ring = CyclotomicRing::get(n)?;
    let sparse = orbit
        .members()
        .iter()
        .map(|t| c_value(n, dvec, t))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<CycElem> = sparse.par_iter().map(|s| s.to_elem(&ring)).collect();

    let full_box = orbit.len() as u64 == dvec.box_size();
    let poly = if full_box {
        psi_multi(dvec)?.poly
    } else {
        descend_to_integers(&product_of_sparse_linear_factors(n, &sparse)?)?
    };

    let mut fibers: BTreeMap<&CycElem, (usize, usize)> = BTreeMap::new();
    for (i, v) in values.iter().enumerate() {
        fibers.entry(v).or_insert((i, 0)).1 += 1;
    }
    let sizes: Vec<usize> = fibers.values().map(|&(_, c)| c).collect();
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(Error::NotGaloisStable(format!(
            "fibers of c over {:?} have unequal sizes",
            orbit.representative()
        )));
    }
    let multiplicity = sizes[0] as u64;
    let irr_core = if multiplicity == 1 {
        poly.clone()
    } else {
        let distinct: Vec<SparseCyc> = fibers.values().map(|&(i, _)| sparse[i].clone()).collect();
        descend_to_integers(&product_of_sparse_linear_factors(n, &distinct)?)?
    };
    if irr_core.pow(multiplicity) != poly {
        return Err(Error::Internal(format!(
            "Psi(x; O) for {:?} is not a power of its core",
            orbit.representative()
        )));
    }
    Ok(OrbitPolynomial {
        dvec: dvec.clone(),
        orbit: orbit.clone(),
        poly,
        irr_core,
        multiplicity,
        values_distinct: sizes[0] == 1,
    })
}

/// Irreducible over `Q` exactly when `c` is injective on the orbit.
pub fn is_irreducible(op: &OrbitPolynomial) -> bool {
    op.multiplicity == 1 && op.values_distinct
}

/// Orbit polynomials for every orbit of `dvec`, in representative order.
pub fn psi_orbits(dvec: &DVec) -> Result<Vec<OrbitPolynomial>> {
    let dec = orbit_decompose_with(dvec, &Limits::from_env())?;
    dec.orbits.par_iter().map(|o| psi_orbit(dvec, o)).collect()
}

/// Square root of `Psi_{m,m}(x; O)` for a swap-invariant, non-diagonal orbit.
pub fn half_polynomial(m: u64, orbit: &Orbit) -> Result<IntPoly> {
    if m < 3 {
        return domain("half_polynomial requires m >= 3");
    }
    let dvec = DVec::new(vec![m, m])?;
    if orbit.members().iter().any(|t| t.len() != 2) {
        return domain("half_polynomial needs pairs");
    }
    if !orbit.is_stable(&dvec) {
        return domain("orbit is not stable under the unit action");
    }
    let rep = orbit.representative();
    if rep[0] == rep[1] {
        return domain("the diagonal orbit has no half polynomial");
    }
    if !orbit.contains(&[rep[1], rep[0]]) {
        return domain("orbit is not invariant under the coordinate swap");
    }
    if phi_tilde(m)? % 2 == 1 {
        return domain("phi~(m) is odd");
    }
    let full = psi_orbit(&dvec, orbit)?.poly;
    let half = full.sqrt_exact()?;
    debug_assert_eq!(half.degree().unwrap() as u64, phi_tilde(m)? / 2);
    Ok(half)
}

/// Rows of the table of orbits with a linear irreducible core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LinearFamily {
    /// Both entries in `{1, 2, 3, 4, 6}`; core `x - lambda`.
    #[serde(rename = "x-lambda")]
    SmallEntries,
    /// `(m, m)` with `4 | m`, orbit of `(1, m/2 - 1)`; core `x`.
    #[serde(rename = "(m,m) 4|m O(1,m/2-1)")]
    QuarterSplit,
    /// `(m, 2m)` with `m` odd, orbit of `(1, m - 2)`; core `x`.
    #[serde(rename = "(m,2m) m odd O(1,m-2)")]
    OddDouble,
    /// `(5, 5)`, orbit of `(1, 2)`; core `x + 1`.
    #[serde(rename = "(5,5) O(1,2)")]
    FiveFive,
    /// `(10, 10)`, orbit of `(1, 3)`; core `x - 1`.
    #[serde(rename = "(10,10) O(1,3)")]
    TenTen,
    /// Matches no row.
    #[serde(rename = "unmatched")]
    Unmatched,
}

impl LinearFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            LinearFamily::SmallEntries => "x-lambda",
            LinearFamily::QuarterSplit => "(m,m) 4|m O(1,m/2-1)",
            LinearFamily::OddDouble => "(m,2m) m odd O(1,m-2)",
            LinearFamily::FiveFive => "(5,5) O(1,2)",
            LinearFamily::TenTen => "(10,10) O(1,3)",
            LinearFamily::Unmatched => "unmatched",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearCase {
    pub dvec: DVec,
    pub orbit_rep: Vec<u64>,
    pub orbit_size: usize,
    #[serde(serialize_with = "bigint_serialize")]
    pub lambda: BigInt,
    pub irr_core: IntPoly,
    pub family: LinearFamily,
}

fn table_row(d1: u64, d2: u64, orbit: &Orbit, lambda: &BigInt) -> LinearFamily {
    let small = |d: u64| [1, 2, 3, 4, 6].contains(&d);
    let zero = lambda.is_zero();
    if small(d1) && small(d2) {
        LinearFamily::SmallEntries
    } else if d1 == d2 && d1.is_multiple_of(4) && zero && orbit.contains(&[1, d1 / 2 - 1]) {
        LinearFamily::QuarterSplit
    } else if zero
        && ((d2 == 2 * d1 && d1 % 2 == 1 && d1 >= 3 && orbit.contains(&[1, d1 - 2]))
            || (d1 == 2 * d2 && d2 % 2 == 1 && d2 >= 3 && orbit.contains(&[d2 - 2, 1])))
    {
        LinearFamily::OddDouble
    } else if (d1, d2) == (5, 5) && orbit.contains(&[1, 2]) && *lambda == BigInt::from(-1) {
        LinearFamily::FiveFive
    } else if (d1, d2) == (10, 10) && orbit.contains(&[1, 3]) && lambda.is_one() {
        LinearFamily::TenTen
    } else {
        LinearFamily::Unmatched
    }
}

/// Orbits of `(d1, d2)` on which `c` is constant, each matched against the table rows.
pub fn linear_case_classify(d1: u64, d2: u64) -> Result<Vec<LinearCase>> {
    let dvec = DVec::new(vec![d1, d2])?;
    let dec = orbit_decompose_with(&dvec, &Limits::from_env())?;
    let n = dvec.nprime();
    let ring = CyclotomicRing::get(n)?;
    let mut out = Vec::new();
    for orbit in &dec.orbits {
        let c = c_value(n, &dvec, orbit.representative())?.to_elem(&ring);
        if let Some(lambda) = c.as_integer() {
            out.push(LinearCase {
                dvec: dvec.clone(),
                orbit_rep: orbit.representative().to_vec(),
                orbit_size: orbit.len(),
                irr_core: IntPoly::new(vec![-lambda.clone(), BigInt::one()]),
                family: table_row(d1, d2, orbit, &lambda),
                lambda,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearNecessary {
    pub g: u64,
    pub g1: u64,
    pub g2: u64,
    pub m1: u64,
    pub m2: u64,
    pub passes: bool,
}

/// The three necessary conditions for a linear core, with `g_i = prod_{p | g} p^{v_p(d_i)}`.
pub fn check_linear_necessary(d1: u64, d2: u64) -> Result<LinearNecessary> {
    if d1 == 0 || d2 == 0 {
        return domain("entries must be >= 1");
    }
    let g = gcd(d1, d2);
    let part = |d: u64| -> u64 {
        factorize(g)
            .into_iter()
            .map(|(p, _)| {
                let mut pe = 1;
                let mut x = d;
                while x.is_multiple_of(p) {
                    x /= p;
                    pe *= p;
                }
                pe
            })
            .product()
    };
    let (g1, g2) = (part(d1), part(d2));
    let (m1, m2) = (d1 / g1, d2 / g2);
    let small = |m: u64| [1, 2, 3, 4, 6].contains(&m);
    let cond1 = (g1 <= 2 || m1 <= 2) && (g2 <= 2 || m2 <= 2);
    let cond2 = small(m1) && small(m2);
    let cond3 = g1 == g2 || (g1, g2) == (2, 4) || (g1, g2) == (4, 2);
    Ok(LinearNecessary {
        g,
        g1,
        g2,
        m1,
        m2,
        passes: cond1 && cond2 && cond3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::orbit_decompose;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn dv(d: &[u64]) -> DVec {
        DVec::new(d.to_vec()).unwrap()
    }

    #[test]
    fn psi_multi_examples() {
        assert_eq!(psi_multi(&dv(&[1])).unwrap().poly, p(&[-2, 1]));
        let psi5 = psi_univariate(5).unwrap();
        let expect = psi5.compose(&p(&[-1, 1]));
        assert_eq!(expect, p(&[-1, -1, 1]));
        assert_eq!(psi_multi(&dv(&[6, 5])).unwrap().poly, expect);
        let expect55 = &p(&[-4, 2, 1]) * &p(&[1, 2, 1]);
        assert_eq!(expect55, p(&[-4, -6, 1, 4, 1]));
        assert_eq!(psi_multi(&dv(&[5, 5])).unwrap().poly, expect55);
    }

    #[test]
    fn tower_and_direct_products_agree() {
        for d in [
            vec![5u64, 7],
            vec![8, 12],
            vec![9, 2, 5],
            vec![7, 7, 3],
            vec![11, 4],
            vec![13],
            vec![10, 15],
        ] {
            let d = dv(&d);
            assert_eq!(
                psi_multi(&d).unwrap(),
                psi_multi_direct(&d).unwrap(),
                "{d:?}"
            );
        }
    }

    #[test]
    fn psi_multi_respects_bound() {
        let tight = Limits {
            psi_degree: 4,
            ..Limits::default()
        };
        assert!(matches!(
            psi_multi_with(&dv(&[7, 7]), &tight),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn five_five_orbits() {
        let d = dv(&[5, 5]);
        let dec = orbit_decompose(&d).unwrap();
        let diag = psi_orbit(&d, &dec.orbits[0]).unwrap();
        assert_eq!(diag.poly, p(&[-4, 2, 1]));
        assert_eq!(diag.multiplicity, 1);
        assert!(is_irreducible(&diag));
        let off = psi_orbit(&d, &dec.orbits[1]).unwrap();
        assert_eq!(off.poly, p(&[1, 2, 1]));
        assert_eq!(off.irr_core, p(&[1, 1]));
        assert_eq!(off.multiplicity, 2);
        assert!(!is_irreducible(&off));
    }

    #[test]
    fn eight_eight_quarter_orbit() {
        let d = dv(&[8, 8]);
        let dec = orbit_decompose(&d).unwrap();
        let o = dec.orbit_of(&[1, 3]).unwrap();
        let op = psi_orbit(&d, o).unwrap();
        assert_eq!(op.poly, p(&[0, 0, 1]));
        assert_eq!(op.irr_core, p(&[0, 1]));
        assert_eq!(half_polynomial(8, o).unwrap(), p(&[0, 1]));
    }

    #[test]
    fn three_five_is_irreducible() {
        let d = dv(&[3, 5]);
        let dec = orbit_decompose(&d).unwrap();
        assert!(is_irreducible(&psi_orbit(&d, &dec.orbits[0]).unwrap()));
    }

    #[test]
    fn unstable_subset_does_not_descend() {
        let d = dv(&[5, 5]);
        let o = Orbit::from_members(vec![vec![1, 1]]);
        assert!(matches!(psi_orbit(&d, &o), Err(Error::NotGaloisStable(_))));
    }

    #[test]
    fn half_polynomials() {
        for m in [12u64, 16] {
            let d = dv(&[m, m]);
            let dec = orbit_decompose(&d).unwrap();
            let o = dec.orbit_of(&[1, m / 2 - 1]).unwrap();
            let h = half_polynomial(m, o).unwrap();
            assert_eq!(h.degree().unwrap() as u64, phi_tilde(m).unwrap() / 2);
            assert_eq!(&h * &h, psi_orbit(&d, o).unwrap().poly);
        }
        let d = dv(&[5, 5]);
        let dec = orbit_decompose(&d).unwrap();
        assert_eq!(half_polynomial(5, &dec.orbits[1]).unwrap(), p(&[1, 1]));
        assert!(half_polynomial(5, &dec.orbits[0]).is_err());
        let d7 = orbit_decompose(&dv(&[7, 7])).unwrap();
        assert!(half_polynomial(7, &d7.orbits[1]).is_err());
    }

    #[test]
    fn classifier_examples() {
        let r = linear_case_classify(3, 4).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].irr_core, p(&[1, 1]));
        assert_eq!(r[0].family, LinearFamily::SmallEntries);
        let r = linear_case_classify(5, 5).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].orbit_rep, vec![1, 2]);
        assert_eq!(r[0].irr_core, p(&[1, 1]));
        assert_eq!(r[0].family, LinearFamily::FiveFive);
        let r = linear_case_classify(7, 14).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].orbit_size >= 1);
        assert_eq!(r[0].irr_core, p(&[0, 1]));
        assert_eq!(r[0].family, LinearFamily::OddDouble);
        let o = orbit_decompose(&dv(&[7, 14])).unwrap();
        assert!(o.orbit_of(&[1, 5]).unwrap().contains(&r[0].orbit_rep));
    }

    #[test]
    fn necessary_conditions_examples() {
        assert!(check_linear_necessary(5, 5).unwrap().passes);
        let r = check_linear_necessary(7, 9).unwrap();
        assert!(!r.passes);
        assert_eq!((r.m1, r.m2), (7, 9));
        let r = check_linear_necessary(12, 12).unwrap();
        assert!(r.passes);
        assert_eq!((r.g1, r.m1), (12, 1));
    }

    #[test]
    fn homogenize_examples() {
        let h = homogenize(&p(&[0, 1]));
        assert_eq!(h.terms, vec![(1, 0, BigInt::one())]);
        let h = homogenize(&p(&[-1, 1, 1]));
        assert_eq!(h.pretty(), "x^2 + xy - y^2");
        let h = homogenize(&p(&[-2, 1]));
        assert_eq!(h.pretty(), "x - 2y");
        assert_eq!(h.dehomogenize(), p(&[-2, 1]));
        assert_eq!(h.eval(&p(&[1, 0, 1]), &p(&[0, 1])), p(&[1, -2, 1]));
    }
}
