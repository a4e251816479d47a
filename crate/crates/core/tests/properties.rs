use std::collections::BTreeSet;

use cubezeta::algebra::IntPoly;
use cubezeta::lattice::{twisted_laplacian, Character, Direction, LatticeSpec};
use cubezeta::oracle::log_derivative_series;
use cubezeta::orbits::{orb_count_formula, orbit_decompose, DVec};
use cubezeta::psi::{psi_multi, psi_multi_direct, psi_orbit};
use cubezeta::zeta::{zeta_general_d, zeta_top, zeta_top_direct};
use cubezeta::Limits;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-20i64..=20, 0..8).prop_map(|c| IntPoly::from_i64s(&c))
}

fn monic_poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-9i64..=9, 0..5).prop_map(|mut c| {
        c.push(1);
        IntPoly::from_i64s(&c)
    })
}

fn unit_constant_poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-9i64..=9, 0..6).prop_map(|mut c| {
        c.insert(0, 1);
        IntPoly::from_i64s(&c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_division_inverts_product(a in small_poly(), b in monic_poly()) {
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }

    #[test]
    fn text_round_trip(a in small_poly()) {
        prop_assert_eq!(IntPoly::parse_text(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn orbit_formula_matches_enumeration(d in prop::collection::vec(1u64..=36, 1..=3)) {
        let dv = DVec::new(d).unwrap();
        let dec = orbit_decompose(&dv).unwrap();
        prop_assert_eq!(dec.orbits.len() as u64, orb_count_formula(&dv));
        let total: u64 = dec.orbits.iter().map(|o| o.len() as u64).sum();
        prop_assert_eq!(total, dv.box_size());
        let members: BTreeSet<Vec<u64>> = dec.orbits.iter().flat_map(|o| o.members().to_vec()).collect();
        prop_assert_eq!(members.len() as u64, total);
    }

    #[test]
    fn orbit_factors_multiply_to_psi(d in prop::collection::vec(1u64..=15, 1..=2)) {
        let dv = DVec::new(d).unwrap();
        let psi = psi_multi(&dv).unwrap().poly;
        prop_assert_eq!(&psi, &psi_multi_direct(&dv).unwrap().poly);
        let mut prod = IntPoly::one();
        for o in orbit_decompose(&dv).unwrap().orbits {
            let op = psi_orbit(&dv, &o).unwrap();
            prop_assert!(op.poly.is_monic());
            prod = &prod * &op.poly;
        }
        prop_assert_eq!(prod, psi);
    }

    #[test]
    fn zeta_routes_agree(n in prop::collection::vec(2u64..=5, 1..=2)) {
        let s = LatticeSpec::new(n).unwrap();
        let top = zeta_top(&s).unwrap();
        prop_assert_eq!(&top.poly, &zeta_top_direct(&s, &Limits::default()).unwrap());
        prop_assert_eq!(&top.poly, &zeta_general_d(&s, s.q()).unwrap().poly);
        prop_assert_eq!(top.poly.coeff(0), 1.into());
    }

    #[test]
    fn log_derivative_is_additive(a in unit_constant_poly(), b in unit_constant_poly()) {
        let sa = log_derivative_series(&a, 10).unwrap();
        let sb = log_derivative_series(&b, 10).unwrap();
        let sab = log_derivative_series(&(&a * &b), 10).unwrap();
        let sum: Vec<_> = sa.iter().zip(&sb).map(|(x, y)| x + y).collect();
        prop_assert_eq!(sab, sum);
    }

    #[test]
    fn laplacians_sum_to_scalar(
        n in prop::collection::vec(2u64..=7, 1..=4),
        seed in any::<u64>(),
        dsel in 0usize..5,
    ) {
        let s = LatticeSpec::new(n.clone()).unwrap();
        let k: Vec<u64> = n.iter().enumerate().map(|(i, &m)| (seed >> (8 * i)) % m).collect();
        let chi = Character::new(&s, k).unwrap();
        let d = dsel % (s.q() + 1);
        let up = twisted_laplacian(&s, d, &chi, Direction::Up).unwrap();
        let down = twisted_laplacian(&s, d, &chi, Direction::Down).unwrap();
        let scalar: f64 = chi.w(&s).iter().map(|w| 4.0 - w).sum();
        let total = up.matrix() + down.matrix();
        let dim = total.nrows();
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { Complex64::new(scalar, 0.0) } else { Complex64::new(0.0, 0.0) };
                prop_assert!((total[(i, j)] - want).norm() < 1e-9);
            }
        }
    }
}
