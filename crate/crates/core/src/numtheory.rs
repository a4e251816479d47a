//! Totients, the Möbius function, the index sets `J_d` and unit groups of `Z/NZ`.

use serde::Serialize;

use crate::error::{domain, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn lcm_all(values: &[u64]) -> u64 {
    values.iter().fold(1, |acc, &v| lcm(acc, v))
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn require_positive(n: u64, what: &str) -> Result<()> {
    if n == 0 {
        domain(format!("{what} requires an argument >= 1"))
    } else {
        Ok(())
    }
}

pub fn euler_phi(n: u64) -> Result<u64> {
    require_positive(n, "euler_phi")?;
    Ok(factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1)))
}

/// `phi(d)/2` for `d >= 3`, and `1` for `d` in `{1, 2}`; this is `|J_d|`.
pub fn phi_tilde(d: u64) -> Result<u64> {
    require_positive(d, "phi_tilde")?;
    if d <= 2 {
        Ok(1)
    } else {
        Ok(euler_phi(d)? / 2)
    }
}

pub fn mobius(d: u64) -> Result<i64> {
    require_positive(d, "mobius")?;
    let f = factorize(d);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len().is_multiple_of(2) {
        Ok(1)
    } else {
        Ok(-1)
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Representatives of `(Z/dZ)^x` modulo negation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JSet {
    pub d: u64,
    pub members: Vec<u64>,
}

impl JSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, j: u64) -> bool {
        self.members.binary_search(&j).is_ok()
    }
}

pub fn j_set(d: u64) -> Result<JSet> {
    require_positive(d, "j_set")?;
    let members = if d <= 2 {
        vec![1]
    } else {
        (1..)
            .take_while(|&j| 2 * j < d)
            .filter(|&j| gcd(j, d) == 1)
            .collect()
    };
    Ok(JSet { d, members })
}

/// Fold a residue into `J_d`: `k mod d -> min(k, d - k)`, everything to `1` for `d <= 2`.
pub fn fold_into_j(k: u64, d: u64) -> u64 {
    if d <= 2 {
        return 1;
    }
    let r = k % d;
    r.min(d - r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroup {
    pub modulus: u64,
    pub elements: Vec<u64>,
}

impl UnitGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// A small generating set; see [`unit_generators`].
    pub fn generators(&self) -> Vec<u64> {
        unit_generators(self.modulus)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Generators of `(Z/pZ)^x` lifted to a generator of `(Z/p^eZ)^x`, `p` odd.
fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let order = p - 1;
    let qs: Vec<u64> = factorize(order).into_iter().map(|(q, _)| q).collect();
    let g = (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .unwrap_or(1);
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// Generators of `(Z/nZ)^x`, one per cyclic factor of each prime-power part, glued by CRT.
pub fn unit_generators(n: u64) -> Vec<u64> {
    if n <= 2 {
        return vec![1];
    }
    let mut gens = Vec::new();
    for (p, e) in factorize(n) {
        let pe = p.pow(e);
        let rest = n / pe;
        let local: Vec<u64> = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![3],
                _ => vec![pe - 1, 5],
            }
        } else {
            vec![primitive_root_prime_power(p, e)]
        };
        for g in local {
            // x = g mod p^e, x = 1 mod rest
            let x = if rest == 1 {
                g
            } else {
                let k = mul_mod((g + pe - 1) % pe, inv_mod(rest % pe, pe).unwrap(), pe);
                (1 + mul_mod(k, rest, n)) % n
            };
            gens.push(x);
        }
    }
    if gens.is_empty() {
        gens.push(1);
    }
    gens
}

pub fn unit_group(n: u64) -> Result<UnitGroup> {
    require_positive(n, "unit_group")?;
    let elements = if n == 1 {
        vec![1]
    } else {
        (1..=n).filter(|&a| gcd(a, n) == 1).collect()
    };
    Ok(UnitGroup {
        modulus: n,
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_by_loop(n: u64) -> u64 {
        (1..=n).filter(|&j| gcd(j, n) == 1).count() as u64
    }

    #[test]
    fn euler_phi_examples() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(phi_by_loop(12), 4);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(phi_by_loop(5), 4);
        assert_eq!(euler_phi(5).unwrap(), 4);
        assert!(euler_phi(0).is_err());
    }

    #[test]
    fn phi_tilde_examples() {
        assert_eq!(phi_tilde(2).unwrap(), 1);
        assert_eq!(phi_tilde(5).unwrap(), 2);
        assert_eq!(phi_by_loop(12) / 2, 2);
        assert_eq!(phi_tilde(12).unwrap(), 2);
        assert!(phi_tilde(0).is_err());
    }

    #[test]
    fn j_set_examples() {
        assert_eq!(j_set(1).unwrap().members, vec![1]);
        assert_eq!(j_set(2).unwrap().members, vec![1]);
        assert_eq!(j_set(5).unwrap().members, vec![1, 2]);
        assert_eq!(j_set(12).unwrap().members, vec![1, 5]);
        assert!(j_set(0).is_err());
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(10).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn unit_group_examples() {
        assert_eq!(unit_group(1).unwrap().elements, vec![1]);
        assert_eq!(unit_group(8).unwrap().elements, vec![1, 3, 5, 7]);
        assert_eq!(unit_group(25).unwrap().order() as u64, phi_by_loop(25));
        assert_eq!(unit_group(25).unwrap().order(), 20);
        assert!(unit_group(0).is_err());
    }

    #[test]
    fn generators_generate() {
        for n in 1..2000u64 {
            let g = unit_group(n).unwrap();
            let gens = g.generators();
            let mut seen = std::collections::BTreeSet::from([1 % n.max(2)]);
            let mut stack = vec![1 % n.max(2)];
            while let Some(x) = stack.pop() {
                for &h in &gens {
                    let y = x * h % n.max(2);
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if n > 2 {
                assert_eq!(seen.len(), g.order(), "n = {n}");
            }
        }
    }

    #[test]
    fn totient_and_mobius_sums_over_divisors() {
        for n in 1..=10_000u64 {
            let divs = divisors(n);
            let phi_sum: u64 = divs.iter().map(|&d| euler_phi(d).unwrap()).sum();
            assert_eq!(phi_sum, n);
            let mu_sum: i64 = divs.iter().map(|&d| mobius(d).unwrap()).sum();
            assert_eq!(mu_sum, i64::from(n == 1));
        }
    }

    #[test]
    fn phi_tilde_is_half_phi_and_j_set_splits_units() {
        for d in 3..500u64 {
            assert_eq!(2 * phi_tilde(d).unwrap(), euler_phi(d).unwrap());
            let j = j_set(d).unwrap();
            assert_eq!(j.len() as u64, phi_tilde(d).unwrap());
            assert!(j.members.windows(2).all(|w| w[0] < w[1]));
            let mut all: Vec<u64> = j
                .members
                .iter()
                .copied()
                .chain(j.members.iter().map(|&x| d - x))
                .collect();
            all.sort_unstable();
            let units: Vec<u64> = (1..d).filter(|&k| gcd(k, d) == 1).collect();
            assert_eq!(all, units);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, -1), 0);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
