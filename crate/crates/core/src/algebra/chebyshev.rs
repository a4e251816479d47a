//! Minimal polynomial of `2 cos(2 pi / d)` via the basis change `x^k -> (z + 1/z)^k`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cyclotomic::cyclotomic_poly;
use super::poly::IntPoly;
use crate::error::{domain, Error, Result};
use crate::numtheory::phi_tilde;

static PSI_CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();

/// `Psi_d`, monic of degree `phi~(d)`, with `z^m Psi_d(z + 1/z)` equal to `Phi_d` (or `Phi_d^2` for `d <= 2`).
pub fn psi_univariate(d: u64) -> Result<IntPoly> {
    if d == 0 {
        return domain("psi_univariate requires d >= 1");
    }
    let cache = PSI_CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return Ok(p.clone());
    }
    let phi = cyclotomic_poly(d)?;
    let target = if d <= 2 { &phi * &phi } else { phi };
    let psi = palindromic_to_trace_form(&target, phi_tilde(d)? as usize)?;
    cache.lock().unwrap().insert(d, psi.clone());
    Ok(psi)
}

/// Solve `z^m P(z + 1/z) = target` for `P`, peeling the leading term off at each step.
pub fn palindromic_to_trace_form(target: &IntPoly, m: usize) -> Result<IntPoly> {
    if target.degree() != Some(2 * m) {
        return Err(Error::Internal(format!(
            "{target:?} does not have degree {}",
            2 * m
        )));
    }
    let z2_plus_1 = IntPoly::from_i64s(&[1, 0, 1]);
    let mut rem = target.clone();
    let mut out = vec![BigInt::zero(); m + 1];
    for k in (0..=m).rev() {
        let c = rem.coeff(m + k);
        if c.is_zero() {
            continue;
        }
        // z^m (z + 1/z)^k = z^{m-k} (z^2 + 1)^k
        let basis = &IntPoly::monomial(BigInt::one(), m - k) * &z2_plus_1.pow(k as u64);
        rem = &rem - &basis.scale(&c);
        out[k] = c;
    }
    if !rem.is_zero() {
        return Err(Error::Internal(format!(
            "{target:?} is not palindromic of degree {}",
            2 * m
        )));
    }
    Ok(IntPoly::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn small_psi_values() {
        assert_eq!(psi_univariate(1).unwrap(), p(&[-2, 1]));
        assert_eq!(psi_univariate(2).unwrap(), p(&[2, 1]));
        assert_eq!(psi_univariate(4).unwrap(), p(&[0, 1]));
        assert_eq!(psi_univariate(9).unwrap(), p(&[1, -3, 0, 1]));
        assert!(psi_univariate(0).is_err());
    }

    #[test]
    fn substitution_recovers_cyclotomic() {
        for d in 3..=120u64 {
            let psi = psi_univariate(d).unwrap();
            let m = psi.degree().unwrap();
            // z^m psi(z + 1/z) = sum c_k z^{m-k} (z^2+1)^k
            let mut back = IntPoly::zero();
            for (k, c) in psi.coeffs().iter().enumerate() {
                let basis = &IntPoly::monomial(BigInt::one(), m - k) * &p(&[1, 0, 1]).pow(k as u64);
                back = &back + &basis.scale(c);
            }
            assert_eq!(back, cyclotomic_poly(d).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn monic_integer_up_to_500() {
        for d in 1..=500u64 {
            let psi = psi_univariate(d).unwrap();
            assert!(psi.is_monic());
            assert_eq!(psi.degree().unwrap() as u64, phi_tilde(d).unwrap());
        }
    }

    #[test]
    fn roots_are_two_cosines() {
        for d in 3..40u64 {
            let psi = psi_univariate(d).unwrap();
            for j in crate::numtheory::j_set(d).unwrap().members {
                let x = 2.0 * (2.0 * std::f64::consts::PI * j as f64 / d as f64).cos();
                assert!(psi.eval_f64(x).abs() < 1e-8, "d={d} j={j}");
            }
        }
    }
}
