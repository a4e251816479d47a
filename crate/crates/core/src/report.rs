//! Plain output records for the front end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::IntPoly;
use crate::error::Result;
use crate::limits::Limits;
use crate::orbits::{orb_count_formula, orbit_decompose_with, DVec};
use crate::psi::{is_irreducible, psi_multi_with, psi_orbit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub representative: Vec<u64>,
    pub size: usize,
    pub poly: IntPoly,
    pub irr_core: IntPoly,
    pub multiplicity: u64,
    pub irreducible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiReport {
    pub d: Vec<u64>,
    pub psi: IntPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<Vec<OrbitReport>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitsReport {
    pub d: Vec<u64>,
    pub count: u64,
    pub formula: u64,
    pub orbits: Vec<Vec<Vec<u64>>>,
}

pub fn psi_report(d: &[u64], orbit_split: bool, limits: &Limits) -> Result<PsiReport> {
    let dvec = DVec::new(d.to_vec())?;
    let psi = psi_multi_with(&dvec, limits)?.poly;
    let orbits = if orbit_split {
        let dec = orbit_decompose_with(&dvec, limits)?;
        let ops = dec
            .orbits
            .par_iter()
            .map(|o| psi_orbit(&dvec, o))
            .collect::<Result<Vec<_>>>()?;
        Some(
            ops.into_iter()
                .map(|op| OrbitReport {
                    representative: op.orbit.representative().to_vec(),
                    size: op.orbit.len(),
                    irreducible: is_irreducible(&op),
                    poly: op.poly,
                    irr_core: op.irr_core,
                    multiplicity: op.multiplicity,
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(PsiReport {
        d: d.to_vec(),
        psi,
        orbits,
    })
}

pub fn orbits_report(d: &[u64], limits: &Limits) -> Result<OrbitsReport> {
    let dvec = DVec::new(d.to_vec())?;
    let dec = orbit_decompose_with(&dvec, limits)?;
    Ok(OrbitsReport {
        d: d.to_vec(),
        count: dec.orbits.len() as u64,
        formula: orb_count_formula(&dvec),
        orbits: dec.orbits.iter().map(|o| o.members().to_vec()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_five_split() {
        let r = psi_report(&[5, 5], true, &Limits::default()).unwrap();
        let o = r.orbits.unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].poly, IntPoly::from_i64s(&[-4, 2, 1]));
        assert!(o[0].irreducible);
        assert_eq!(o[1].poly, IntPoly::from_i64s(&[1, 2, 1]));
        assert_eq!(o[1].irr_core, IntPoly::from_i64s(&[1, 1]));
        assert_eq!(o[1].multiplicity, 2);
        assert!(!o[1].irreducible);
        let r = orbits_report(&[8, 12], &Limits::default()).unwrap();
        assert_eq!((r.count, r.formula), (1, 1));
    }
}
