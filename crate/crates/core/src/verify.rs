//! Verification sweeps: every closed form checked against an independent route.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{cyclotomic_poly, psi_univariate, IntPoly};
use crate::error::{Error, Result};
use crate::lattice::{
    charpoly_aup1_closed, cluster, laplacian_spectrum, spectrum_adown_q, symmetric_eigenvalues,
    twisted_coboundary, twisted_coboundary_dual, Assembled, Direction, LatticeSpec, SPECTRUM_TOL,
};
use crate::limits::Limits;
use crate::numtheory::{binomial, gcd, phi_tilde};
use crate::oracle::{
    bass_zeta, build_bh, geodesic_counts_bh, geodesic_counts_dfs, log_derivative_series,
    nonbacktracking_traces,
};
use crate::orbits::{orb_count_formula, orbit_decompose, DVec, Orbit};
use crate::psi::{
    check_linear_necessary, half_polynomial, is_irreducible, linear_case_classify, psi_orbit,
    LinearFamily, OrbitPolynomial,
};
use crate::zeta::{zeta_codim1, zeta_general_d, zeta_top, zeta_top_direct};

type Job = (String, Box<dyn Fn() -> Result<CaseResult> + Send + Sync>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Orbits,
    Cor13,
    Bass,
    Geodesics,
    Spectra,
    LinearTable,
    Observations,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Orbits,
        Suite::Cor13,
        Suite::Bass,
        Suite::Geodesics,
        Suite::Spectra,
        Suite::LinearTable,
        Suite::Observations,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Orbits => "orbits",
            Suite::Cor13 => "cor13",
            Suite::Bass => "bass",
            Suite::Geodesics => "geodesics",
            Suite::Spectra => "spectra",
            Suite::LinearTable => "linear-table",
            Suite::Observations => "observations",
        }
    }

    /// Observation suites print counterexamples but never fail.
    pub fn reporting_only(&self) -> bool {
        matches!(self, Suite::Observations)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseSet {
    #[default]
    Default,
    Extended,
}

impl FromStr for CaseSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<CaseSet> {
        match s {
            "default" => Ok(CaseSet::Default),
            "extended" => Ok(CaseSet::Extended),
            _ => Err(Error::Domain(format!("unknown case set '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Largest `q` in the orbit sweep (default 3).
    pub qmax: Option<usize>,
    /// Largest entry / modulus; the default depends on the suite.
    pub dmax: Option<u64>,
    pub cases: CaseSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub label: String,
    pub pass: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl CaseResult {
    fn new(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CaseResult {
            label: label.into(),
            pass,
            detail: detail.into(),
            data: None,
        }
    }

    fn with_data(mut self, data: Value) -> Self {
        self.data = Some(data);
        self
    }

    fn from_result(label: String, r: Result<CaseResult>) -> Self {
        r.unwrap_or_else(|e| CaseResult::new(label, false, format!("error: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub reporting_only: bool,
    pub cases: Vec<CaseResult>,
    pub all_pass: bool,
}

impl VerifyReport {
    fn new(suite: Suite, cases: Vec<CaseResult>) -> Self {
        VerifyReport {
            suite: suite.name().to_string(),
            reporting_only: suite.reporting_only(),
            all_pass: cases.iter().all(|c| c.pass),
            cases,
        }
    }

    /// Whether the run counts as a success for the exit code.
    pub fn ok(&self) -> bool {
        self.reporting_only || self.all_pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let cases = match suite {
        Suite::Orbits => orbits_suite(opts.qmax.unwrap_or(3), opts.dmax.unwrap_or(20))?,
        Suite::Cor13 => cor13_suite(opts.cases),
        Suite::Bass => bass_suite(opts.cases),
        Suite::Geodesics => geodesics_suite(opts.cases),
        Suite::Spectra => spectra_suite(opts.cases),
        Suite::LinearTable => linear_table_suite(opts.dmax.unwrap_or(50))?,
        Suite::Observations => observations_suite(opts.dmax.unwrap_or(30)),
    };
    Ok(VerifyReport::new(suite, cases))
}

fn tuples(q: usize, dmax: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..q {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=dmax).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

fn fmt_tuple(t: &[u64]) -> String {
    let parts: Vec<String> = t.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

// ---- orbits ----

pub fn orbits_suite(qmax: usize, dmax: u64) -> Result<Vec<CaseResult>> {
    if qmax == 0 || dmax == 0 {
        return Err(Error::Domain("qmax and dmax must be positive".into()));
    }
    let mut all = Vec::new();
    for q in 1..=qmax {
        all.extend(tuples(q, dmax));
    }
    let mut out: Vec<CaseResult> = all
        .par_iter()
        .map(|t| {
            let label = format!("orbit count {}", fmt_tuple(t));
            CaseResult::from_result(
                label.clone(),
                (|| {
                    let dv = DVec::new(t.clone())?;
                    let brute = orbit_decompose(&dv)?.orbits.len() as u64;
                    let formula = orb_count_formula(&dv);
                    let mut pass = brute == formula;
                    let mut detail = format!("enumerated {brute}, formula {formula}");
                    if t.len() == 2 {
                        let g = phi_tilde(gcd(t[0], t[1]))?;
                        pass &= brute == g;
                        detail.push_str(&format!(", phi~(gcd) {g}"));
                    }
                    if t.len() >= 2 && t.iter().all(|&d| d == t[0]) {
                        let p = phi_tilde(t[0])?.pow(t.len() as u32 - 1);
                        pass &= brute == p;
                        detail.push_str(&format!(", phi~(d)^(q-1) {p}"));
                    }
                    Ok(CaseResult::new(label, pass, detail))
                })(),
            )
        })
        .collect();
    // larger pair and diagonal cases outside the box
    let extra: Vec<Vec<u64>> = vec![vec![8, 12], vec![7, 7, 7], vec![30, 42], vec![11, 11, 11]];
    out.extend(
        extra
            .par_iter()
            .map(|t| {
                let label = format!("specialization {}", fmt_tuple(t));
                CaseResult::from_result(
                    label.clone(),
                    (|| {
                        let dv = DVec::new(t.clone())?;
                        let brute = orbit_decompose(&dv)?.orbits.len() as u64;
                        let expect = if t.len() == 2 {
                            phi_tilde(gcd(t[0], t[1]))?
                        } else {
                            phi_tilde(t[0])?.pow(t.len() as u32 - 1)
                        };
                        Ok(CaseResult::new(
                            label,
                            brute == expect && brute == orb_count_formula(&dv),
                            format!("enumerated {brute}, expected {expect}"),
                        ))
                    })(),
                )
            })
            .collect::<Vec<_>>(),
    );
    Ok(out)
}

// ---- divisor-product identity ----

pub fn cor13_cases(set: CaseSet) -> Vec<Vec<u64>> {
    let mut v: Vec<Vec<u64>> = vec![
        vec![5],
        vec![6],
        vec![8],
        vec![2, 3],
        vec![4, 4],
        vec![3, 5],
        vec![4, 6],
        vec![2, 2, 3],
    ];
    if set == CaseSet::Extended {
        v.extend([
            vec![7],
            vec![9],
            vec![12],
            vec![5, 5],
            vec![3, 4],
            vec![6, 6],
            vec![2, 3, 4],
        ]);
    }
    v
}

fn cor13_suite(set: CaseSet) -> Vec<CaseResult> {
    cor13_cases(set)
        .par_iter()
        .map(|n| {
            let label = format!("divisor product {}", fmt_tuple(n));
            CaseResult::from_result(
                label.clone(),
                (|| {
                    let spec = LatticeSpec::new(n.clone())?;
                    let factored = zeta_top(&spec)?;
                    let direct = zeta_top_direct(&spec, &Limits::from_env())?;
                    let expanded = factored.expand_factored()?;
                    let pass = factored.poly == direct && expanded == direct;
                    Ok(CaseResult::new(
                        label,
                        pass,
                        format!(
                            "{} factors, degree {}",
                            factored.factors.len(),
                            direct.degree().unwrap_or(0)
                        ),
                    ))
                })(),
            )
        })
        .collect()
}

// ---- determinant routes ----

/// `(n, d)` pairs for the zeta route comparison.
pub fn bass_cases(set: CaseSet) -> Vec<(Vec<u64>, usize)> {
    let mut v = Vec::new();
    for n in 3..=6 {
        v.push((vec![n], 1));
    }
    for n in [[2, 2], [2, 3], [3, 3], [2, 4]] {
        for d in 1..=2 {
            v.push((n.to_vec(), d));
        }
    }
    for d in 1..=3 {
        v.push((vec![2, 2, 2], d));
    }
    if set == CaseSet::Extended {
        v.push((vec![2], 1));
        for a in 2..=4u64 {
            for b in 2..=4u64 {
                if [[2, 2], [2, 3], [3, 3], [2, 4]].contains(&[a, b]) {
                    continue;
                }
                for d in 1..=2 {
                    v.push((vec![a, b], d));
                }
            }
        }
    }
    v
}

fn zeta_routes(n: &[u64], d: usize) -> Result<CaseResult> {
    let label = format!("zeta routes {} d={d}", fmt_tuple(n));
    let spec = LatticeSpec::new(n.to_vec())?;
    let q = spec.q();
    let general = zeta_general_d(&spec, d)?.poly;
    let bass = bass_zeta(&spec, d)?;
    let mut pass = general == bass;
    let mut routes = vec!["general", "determinant"];
    if d == q {
        pass &= zeta_top(&spec)?.poly == bass;
        routes.push("divisor-product");
    }
    if q >= 2 && d == q - 1 {
        pass &= zeta_codim1(&spec)?.poly == bass;
        routes.push("codim-1");
    }
    let sym = zeta_general_d(&spec, q - d + 1)?.poly;
    let symmetric = sym == general;
    pass &= symmetric;
    let nseries = log_derivative_series(&bass, 6)?;
    let data = json!({
        "case": {"n": n, "d": d},
        "bass_poly": bass,
        "closed_form_poly": general,
        "equal": general == bass,
        "N": nseries.iter().map(BigInt::to_string).collect::<Vec<_>>(),
    });
    Ok(CaseResult::new(
        label,
        pass,
        format!(
            "routes {} agree: {}, d <-> q-d+1 symmetric: {symmetric}",
            routes.join("/"),
            pass
        ),
    )
    .with_data(data))
}

fn bass_suite(set: CaseSet) -> Vec<CaseResult> {
    bass_cases(set)
        .par_iter()
        .map(|(n, d)| {
            CaseResult::from_result(
                format!("zeta routes {} d={d}", fmt_tuple(n)),
                zeta_routes(n, *d),
            )
        })
        .collect()
}

// ---- geodesics ----

pub struct GeodesicCheck {
    pub series: Vec<BigInt>,
    pub counts: Vec<BigInt>,
    pub traces: Vec<BigInt>,
    pub dfs: Vec<u64>,
}

/// Series of the closed-form zeta, trace counts up to `mmax`, DFS up to `dfs_max`.
pub fn geodesic_check(n: &[u64], d: usize, mmax: usize, dfs_max: usize) -> Result<GeodesicCheck> {
    let spec = LatticeSpec::new(n.to_vec())?;
    let z = zeta_general_d(&spec, d)?.poly;
    let bh = build_bh(&spec, d)?;
    Ok(GeodesicCheck {
        series: log_derivative_series(&z, mmax)?,
        counts: geodesic_counts_bh(&bh, mmax)?,
        traces: nonbacktracking_traces(&bh, mmax)?,
        dfs: geodesic_counts_dfs(&bh, dfs_max)?,
    })
}

impl GeodesicCheck {
    pub fn series_matches_counts(&self) -> bool {
        self.series == self.counts
    }

    pub fn dfs_matches_counts(&self) -> bool {
        self.dfs
            .iter()
            .zip(&self.counts)
            .all(|(a, b)| BigInt::from(*a) == *b)
    }

    pub fn traces_double_counts(&self) -> bool {
        self.traces
            .iter()
            .zip(&self.counts)
            .all(|(t, c)| *t == c * 2)
    }

    pub fn parity_ok(&self) -> bool {
        let two = BigInt::from(2);
        self.counts.iter().enumerate().all(|(i, c)| {
            c.sign() != num_bigint::Sign::Minus && (i + 1 < 3 || (c % &two) == BigInt::from(0))
        })
    }
}

pub fn geodesic_cases(set: CaseSet) -> Vec<(Vec<u64>, usize)> {
    let mut v = vec![
        (vec![3], 1),
        (vec![2, 2], 1),
        (vec![2, 2], 2),
        (vec![3, 3], 1),
        (vec![3, 3], 2),
    ];
    if set == CaseSet::Extended {
        v.extend([
            (vec![2, 3], 1),
            (vec![2, 3], 2),
            (vec![2, 4], 1),
            (vec![2, 2, 2], 2),
        ]);
    }
    v
}

fn geodesics_suite(set: CaseSet) -> Vec<CaseResult> {
    geodesic_cases(set)
        .par_iter()
        .map(|(n, d)| {
            let label = format!("geodesics {} d={d}", fmt_tuple(n));
            CaseResult::from_result(
                label.clone(),
                (|| {
                    let g = geodesic_check(n, *d, 8, 6)?;
                    let (a, b, c, p) = (
                        g.series_matches_counts(),
                        g.dfs_matches_counts(),
                        g.traces_double_counts(),
                        g.parity_ok(),
                    );
                    let strs = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect::<Vec<_>>();
                    Ok(CaseResult::new(
                        label,
                        a && b && c && p,
                        format!("series=counts {a}, dfs=counts {b}, trace=2N {c}, parity {p}"),
                    )
                    .with_data(json!({
                        "N": strs(&g.counts),
                        "traces": strs(&g.traces),
                        "dfs": g.dfs,
                    })))
                })(),
            )
        })
        .collect()
}

// ---- spectra ----

fn expand(cl: &[(f64, u64)]) -> Vec<f64> {
    cl.iter()
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m as usize))
        .collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    })
}

fn gap_detail(g: Option<f64>) -> (bool, String) {
    match g {
        Some(g) => (g < SPECTRUM_TOL, format!("max |diff| {g:.3e}")),
        None => (false, "length mismatch".into()),
    }
}

pub fn adown_case(n: &[u64]) -> Result<CaseResult> {
    let spec = LatticeSpec::new(n.to_vec())?;
    let asm = Assembled::new(&spec, &Limits::from_env())?;
    let ev = symmetric_eigenvalues(&asm.adjacency(spec.q(), Direction::Down)?);
    let (pass, detail) = gap_detail(max_gap(&ev, &spectrum_adown_q(&spec)));
    Ok(CaseResult::new(
        format!("top down-adjacency {}", fmt_tuple(n)),
        pass,
        detail,
    ))
}

pub fn laplacian_case(n: &[u64], d: usize) -> Result<CaseResult> {
    let spec = LatticeSpec::new(n.to_vec())?;
    let asm = Assembled::new(&spec, &Limits::from_env())?;
    let ev = symmetric_eigenvalues(&asm.laplacian(d, Direction::Up)?);
    let closed = laplacian_spectrum(&spec, d)?;
    let (mut pass, mut detail) = gap_detail(max_gap(&ev, &expand(&closed)));
    let q = spec.q() as i64;
    let zeros = cluster(&ev, SPECTRUM_TOL)
        .iter()
        .find(|x| x.0 == 0.0)
        .map_or(0, |x| x.1);
    // one zero per character from the multiplicity-C(q-1,d) family at k = 0
    let expect_zeros = binomial(q - 1, d as i64 - 1) * spec.volume() + binomial(q - 1, d as i64);
    pass &= zeros == expect_zeros;
    detail.push_str(&format!(", zeros {zeros} (expected {expect_zeros})"));
    Ok(CaseResult::new(
        format!("laplacian {} d={d}", fmt_tuple(n)),
        pass,
        detail,
    ))
}

/// `delta delta = 0` and the kernel dimensions of `delta_d`, `delta*_d` for every
/// nontrivial character.
pub fn coboundary_case(n: &[u64]) -> Result<CaseResult> {
    let spec = LatticeSpec::new(n.to_vec())?;
    let q = spec.q();
    let qi = q as i64;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for chi in spec.characters() {
        for d in 0..q {
            let del = twisted_coboundary(&spec, d, &chi)?;
            if d + 1 < q {
                let next = twisted_coboundary(&spec, d + 1, &chi)?;
                worst = worst.max((next.matrix() * del.matrix()).camax());
            }
            if chi.is_trivial() {
                continue;
            }
            let k = del.kernel_dim(SPECTRUM_TOL) as u64;
            let kd = twisted_coboundary_dual(&spec, d, &chi)?.kernel_dim(SPECTRUM_TOL) as u64;
            if k != binomial(qi - 1, d as i64 - 1) || kd != binomial(qi - 1, d as i64 + 1) {
                bad.push(format!("k={:?} d={d}: ker {k}, ker* {kd}", chi.k()));
            }
        }
    }
    let pass = worst < SPECTRUM_TOL && bad.is_empty();
    Ok(CaseResult::new(
        format!("coboundary {}", fmt_tuple(n)),
        pass,
        format!(
            "max |delta delta| {worst:.3e}; kernel mismatches {}",
            if bad.is_empty() {
                "none".into()
            } else {
                bad.join("; ")
            }
        ),
    ))
}

pub fn charpoly_case(n: &[u64], us: &[f64]) -> Result<CaseResult> {
    let spec = LatticeSpec::new(n.to_vec())?;
    let mut worst = 0.0f64;
    for chi in spec.characters() {
        for &u in us {
            worst = worst.max(charpoly_aup1_closed(&spec, &chi, u)?);
        }
    }
    Ok(CaseResult::new(
        format!("up-adjacency charpoly {}", fmt_tuple(n)),
        worst < SPECTRUM_TOL,
        format!("max discrepancy {worst:.3e}"),
    ))
}

pub fn spectra_cases(set: CaseSet) -> (Vec<Vec<u64>>, Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let mut adown: Vec<Vec<u64>> = (2..=4).map(|n| vec![n]).collect();
    adown.extend(
        tuples(2, 4)
            .into_iter()
            .filter(|t| t.iter().all(|&x| x >= 2)),
    );
    let mut lap: Vec<Vec<u64>> = vec![vec![2], vec![3], vec![4], vec![5]];
    lap.extend(adown.iter().filter(|t| t.len() == 2).cloned());
    lap.extend([vec![2, 2, 2], vec![2, 2, 3], vec![2, 3, 3]]);
    let mut small: Vec<Vec<u64>> = vec![vec![5], vec![5, 4], vec![3, 4, 5]];
    if set == CaseSet::Extended {
        lap.extend([vec![3, 3, 3], vec![2, 2, 2, 2]]);
        small.extend([vec![7, 7], vec![2, 2, 2, 3]]);
    }
    (adown, lap, small)
}

fn spectra_suite(set: CaseSet) -> Vec<CaseResult> {
    let (adown, lap, small) = spectra_cases(set);
    let mut jobs: Vec<Job> = Vec::new();
    for n in adown {
        jobs.push((
            format!("top down-adjacency {}", fmt_tuple(&n)),
            Box::new(move || adown_case(&n)),
        ));
    }
    for n in lap {
        for d in 0..=n.len() {
            let n = n.clone();
            jobs.push((
                format!("laplacian {} d={d}", fmt_tuple(&n)),
                Box::new(move || laplacian_case(&n, d)),
            ));
        }
    }
    for n in small {
        let m = n.clone();
        jobs.push((
            format!("coboundary {}", fmt_tuple(&n)),
            Box::new(move || coboundary_case(&m)),
        ));
        jobs.push((
            format!("up-adjacency charpoly {}", fmt_tuple(&n)),
            Box::new(move || charpoly_case(&n, &[0.3, -0.7, 1.0])),
        ));
    }
    jobs.par_iter()
        .map(|(l, f)| CaseResult::from_result(l.clone(), f()))
        .collect()
}

// ---- linear table ----

/// Orbit representatives the table predicts for `(d1, d2)`.
pub fn predicted_linear(d1: u64, d2: u64) -> Result<Vec<(LinearFamily, Vec<u64>)>> {
    let small = |d: u64| [1, 2, 3, 4, 6].contains(&d);
    let mut out = Vec::new();
    if small(d1) && small(d2) {
        let dec = orbit_decompose(&DVec::new(vec![d1, d2])?)?;
        for r in dec.representatives() {
            out.push((LinearFamily::SmallEntries, r));
        }
        return Ok(out);
    }
    if d1 == d2 && d1.is_multiple_of(4) {
        out.push((LinearFamily::QuarterSplit, vec![1, d1 / 2 - 1]));
    }
    if d2 == 2 * d1 && d1 % 2 == 1 {
        out.push((LinearFamily::OddDouble, vec![1, d1 - 2]));
    }
    if d1 == 2 * d2 && d2 % 2 == 1 {
        out.push((LinearFamily::OddDouble, vec![d2 - 2, 1]));
    }
    if (d1, d2) == (5, 5) {
        out.push((LinearFamily::FiveFive, vec![1, 2]));
    }
    if (d1, d2) == (10, 10) {
        out.push((LinearFamily::TenTen, vec![1, 3]));
    }
    Ok(out)
}

pub fn linear_table_case(d1: u64, d2: u64) -> Result<(CaseResult, Vec<(LinearFamily, Vec<u64>)>)> {
    let label = format!("linear scan {}", fmt_tuple(&[d1, d2]));
    let hits = linear_case_classify(d1, d2)?;
    let dec = orbit_decompose(&DVec::new(vec![d1, d2])?)?;
    let found: BTreeSet<(LinearFamily, Vec<u64>)> = hits
        .iter()
        .map(|h| (h.family, h.orbit_rep.clone()))
        .collect();
    let mut predicted = BTreeSet::new();
    for (f, r) in predicted_linear(d1, d2)? {
        let orbit = dec
            .orbit_of(&r)
            .ok_or_else(|| Error::Internal(format!("{r:?} is not in J x J")))?;
        predicted.insert((f, orbit.representative().to_vec()));
    }
    let necessary = hits.is_empty() || check_linear_necessary(d1, d2)?.passes;
    let unmatched = hits.iter().any(|h| h.family == LinearFamily::Unmatched);
    let pass = found == predicted && necessary && !unmatched;
    let detail = if hits.is_empty() {
        "no linear orbits".to_string()
    } else {
        let items: Vec<String> = hits
            .iter()
            .map(|h| {
                format!(
                    "{} core {} [{}]",
                    fmt_tuple(&h.orbit_rep),
                    h.irr_core.pretty("x"),
                    h.family.tag()
                )
            })
            .collect();
        let mut s = items.join("; ");
        if found != predicted {
            s.push_str(&format!("; predicted {predicted:?}"));
        }
        if !necessary {
            s.push_str("; necessary conditions fail");
        }
        s
    };
    Ok((
        CaseResult::new(label, pass, detail),
        found.into_iter().collect(),
    ))
}

fn linear_table_suite(dmax: u64) -> Result<Vec<CaseResult>> {
    if dmax == 0 {
        return Err(Error::Domain("dmax must be positive".into()));
    }
    let pairs = tuples(2, dmax);
    let results: Vec<(CaseResult, Vec<(LinearFamily, Vec<u64>)>)> = pairs
        .par_iter()
        .map(|t| {
            linear_table_case(t[0], t[1]).unwrap_or_else(|e| {
                (
                    CaseResult::new(
                        format!("linear scan {}", fmt_tuple(t)),
                        false,
                        format!("error: {e}"),
                    ),
                    vec![],
                )
            })
        })
        .collect();
    let mut families: BTreeSet<LinearFamily> = BTreeSet::new();
    let mut out = Vec::new();
    for (c, f) in results {
        families.extend(f.into_iter().map(|x| x.0));
        if !c.pass || c.detail != "no linear orbits" {
            out.push(c);
        }
    }
    let expected: BTreeSet<LinearFamily> = [
        LinearFamily::SmallEntries,
        LinearFamily::QuarterSplit,
        LinearFamily::OddDouble,
        LinearFamily::FiveFive,
        LinearFamily::TenTen,
    ]
    .into_iter()
    .filter(|f| match f {
        LinearFamily::QuarterSplit => dmax >= 8,
        LinearFamily::OddDouble => dmax >= 10,
        LinearFamily::FiveFive => dmax >= 5,
        LinearFamily::TenTen => dmax >= 10,
        _ => true,
    })
    .collect();
    let tags: Vec<&str> = families.iter().map(LinearFamily::tag).collect();
    out.push(CaseResult::new(
        format!("families found up to {dmax}"),
        families == expected,
        tags.join(", "),
    ));
    Ok(out)
}

// ---- observations ----

fn swap(o: &Orbit) -> Orbit {
    o.permuted(&[1, 0])
}

fn orbit_polys(d1: u64, d2: u64) -> Result<Vec<OrbitPolynomial>> {
    let dv = DVec::new(vec![d1, d2])?;
    orbit_decompose(&dv)?
        .orbits
        .par_iter()
        .map(|o| psi_orbit(&dv, o))
        .collect()
}

fn reps_string(items: &[String]) -> String {
    if items.is_empty() {
        "none".into()
    } else {
        items.join("; ")
    }
}

/// Double family `(m, 2m)`: irreducible away from `O(1, m-2)` for odd `m`, and
/// distinct orbits give distinct polynomials.
pub fn observation_double(m: u64) -> Result<CaseResult> {
    let ops = orbit_polys(m, 2 * m)?;
    let mut reducible = Vec::new();
    for op in &ops {
        let excepted = m % 2 == 1 && m >= 3 && op.orbit.contains(&[1, m - 2]);
        if !excepted && !is_irreducible(op) {
            reducible.push(fmt_tuple(op.orbit.representative()));
        }
    }
    let mut coincide = Vec::new();
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            if a.poly == b.poly {
                coincide.push(format!(
                    "{}={}",
                    fmt_tuple(a.orbit.representative()),
                    fmt_tuple(b.orbit.representative())
                ));
            }
        }
    }
    Ok(CaseResult::new(
        format!("double family ({m},{})", 2 * m),
        reducible.is_empty() && coincide.is_empty(),
        format!(
            "reducible: {}; equal polynomials: {}",
            reps_string(&reducible),
            reps_string(&coincide)
        ),
    ))
}

/// Equal family `(m, m)`.
pub fn observation_equal(m: u64) -> Result<CaseResult> {
    let ops = orbit_polys(m, m)?;
    let mut reducible = Vec::new();
    let mut half_bad = Vec::new();
    for op in &ops {
        let rep = op.orbit.representative();
        let invariant = op.orbit.contains(&[rep[1], rep[0]]);
        if !invariant {
            if !is_irreducible(op) {
                reducible.push(fmt_tuple(rep));
            }
            continue;
        }
        let diagonal = rep[0] == rep[1];
        let excepted = m.is_multiple_of(4) && op.orbit.contains(&[1, m / 2 - 1]);
        if diagonal || excepted {
            continue;
        }
        // the half polynomial is the core exactly when the multiplicity is 2
        let ok = op.multiplicity == 2 && half_polynomial(m, &op.orbit)? == op.irr_core;
        if !ok {
            half_bad.push(format!("{} m_O={}", fmt_tuple(rep), op.multiplicity));
        }
    }
    let mut coincide = Vec::new();
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            if a.poly == b.poly && b.orbit != swap(&a.orbit) {
                coincide.push(format!(
                    "{}={}",
                    fmt_tuple(a.orbit.representative()),
                    fmt_tuple(b.orbit.representative())
                ));
            }
        }
    }
    Ok(CaseResult::new(
        format!("equal family ({m},{m})"),
        reducible.is_empty() && half_bad.is_empty() && coincide.is_empty(),
        format!(
            "reducible non-invariant: {}; reducible half: {}; unexpected equal polynomials: {}",
            reps_string(&reducible),
            reps_string(&half_bad),
            reps_string(&coincide)
        ),
    ))
}

/// `phi~(d2) = 2`: irreducible except the linear cases.
pub fn observation_small_second(d1: u64, d2: u64) -> Result<CaseResult> {
    let ops = orbit_polys(d1, d2)?;
    let bad: Vec<String> = ops
        .iter()
        .filter(|op| !is_irreducible(op) && op.irr_core.degree() != Some(1))
        .map(|op| fmt_tuple(op.orbit.representative()))
        .collect();
    Ok(CaseResult::new(
        format!("small second entry ({d1},{d2})"),
        bad.is_empty(),
        format!("reducible: {}", reps_string(&bad)),
    ))
}

fn observations_suite(dmax: u64) -> Vec<CaseResult> {
    let mut jobs: Vec<Job> = Vec::new();
    for m in 3..=dmax {
        jobs.push((
            format!("double family ({m},{})", 2 * m),
            Box::new(move || observation_double(m)),
        ));
        jobs.push((
            format!("equal family ({m},{m})"),
            Box::new(move || observation_equal(m)),
        ));
    }
    for d2 in [5u64, 8, 10, 12] {
        for d1 in 1..=dmax {
            jobs.push((
                format!("small second entry ({d1},{d2})"),
                Box::new(move || observation_small_second(d1, d2)),
            ));
        }
    }
    jobs.par_iter()
        .map(|(l, f)| CaseResult::from_result(l.clone(), f()))
        .collect()
}

/// `psi_univariate(d)` and `Phi_d` for `d <= dmax`, as plain coefficient lists.
pub fn psi_table(dmax: u64) -> Result<Vec<(u64, IntPoly, IntPoly)>> {
    (1..=dmax)
        .map(|d| Ok((d, psi_univariate(d)?, cyclotomic_poly(d)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_orbit_sweep_passes() {
        let r = run_suite(
            Suite::Orbits,
            &VerifyOptions {
                qmax: Some(2),
                dmax: Some(12),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.all_pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.cases.len(), 12 + 144 + 4);
    }

    #[test]
    fn predicted_rows() {
        let p = predicted_linear(8, 8).unwrap();
        assert_eq!(p, vec![(LinearFamily::QuarterSplit, vec![1, 3])]);
        let p = predicted_linear(10, 5).unwrap();
        assert_eq!(p, vec![(LinearFamily::OddDouble, vec![3, 1])]);
        assert!(predicted_linear(7, 9).unwrap().is_empty());
        let (c, f) = linear_table_case(5, 5).unwrap();
        assert!(c.pass, "{}", c.detail);
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn linear_scan_small() {
        let r = run_suite(
            Suite::LinearTable,
            &VerifyOptions {
                dmax: Some(12),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.all_pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn observation_examples() {
        assert!(observation_double(5).unwrap().pass);
        assert!(observation_equal(8).unwrap().pass);
        assert!(observation_small_second(7, 5).unwrap().pass);
    }

    #[test]
    fn route_and_spectra_cases() {
        assert!(zeta_routes(&[2, 3], 1).unwrap().pass);
        assert!(adown_case(&[3, 4]).unwrap().pass);
        assert!(laplacian_case(&[2, 3], 1).unwrap().pass);
        assert!(coboundary_case(&[5, 4]).unwrap().pass);
        assert!(charpoly_case(&[5, 4], &[0.3]).unwrap().pass);
        let g = geodesic_check(&[3, 3], 2, 6, 4).unwrap();
        assert!(g.series_matches_counts() && g.dfs_matches_counts() && g.traces_double_counts());
    }
}
