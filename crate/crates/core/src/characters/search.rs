use std::collections::{BTreeSet, HashMap};
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirichlet::{format_fractions, unit_group_generators, DirichletCharacter};
use crate::arith::{euler_phi, inv_mod, is_prime, max_precision, mul_mod, pow_mod, primitive_root};
use crate::padic::{ExtRing, ExtScalar, PadicScalar};

/// One Galois orbit of characters `theta` mod `Np` passing the filters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinPair {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    /// generator images `k/o` of the orbit representative mod `Np`
    pub theta: String,
    pub conductor: u64,
    pub order: u64,
    pub orbit_size: usize,
    /// residue degree of the ring generated by the values
    pub residue_degree: usize,
    /// `v_p(B_{2,theta^-1})`, a lower bound when `b2_exact` is false
    pub b2_valuation: u32,
    pub b2_exact: bool,
}

impl EisensteinPair {
    pub fn character(&self) -> DirichletCharacter {
        let fr = super::parse_fractions(&self.theta).expect("stored fractions parse");
        DirichletCharacter::from_fractions(self.p * self.n, &fr).expect("stored character")
    }
}

/// The cyclotomic ring hosting `theta`, `omega` and their products.
pub fn fixture_ring(p: u64, theta: &DirichletCharacter, cap: u32) -> Arc<ExtRing> {
    let l = (p - 1).lcm(&theta.char_order());
    ExtRing::cyclotomic(p, l, cap)
}

/// All Galois orbits of even `theta` mod `Np` with conductor `N` or `Np`,
/// `theta != 1, omega^2`, the condition at `p` on `theta omega^-1` and
/// `theta_N(p)`, and `p | B_{2,theta^-1}`.
///
/// Pairs with `p < 5`, `p | N` or `p | phi(N)` are skipped.
pub fn find_eisenstein_pairs(
    p_range: RangeInclusive<u64>,
    n_range: RangeInclusive<u64>,
) -> Vec<EisensteinPair> {
    let pairs: Vec<(u64, u64)> = p_range
        .filter(|&p| p >= 5 && is_prime(p))
        .flat_map(|p| n_range.clone().map(move |n| (p, n)))
        .filter(|&(p, n)| n >= 1 && n % p != 0 && !euler_phi(n).is_multiple_of(p))
        .collect();
    pairs
        .par_iter()
        .map(|&(p, n)| search_level(p, n))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Primitive characters mod `n`, one per Frobenius orbit, normalized.
pub(crate) fn primitive_orbit_reps(n: u64, p: u64) -> Vec<DirichletCharacter> {
    let gens = unit_group_generators(n);
    let k = gens.iter().fold(1u64, |acc, g| acc.lcm(&g.1));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut idx = vec![0u64; gens.len()];
    loop {
        let images: Vec<u64> = idx.iter().zip(&gens).map(|(&i, g)| i * (k / g.1)).collect();
        let chi = DirichletCharacter::from_images(n, k, &images).expect("enumerated character");
        if chi.is_primitive() {
            let rep = chi.orbit_representative(p).normalized();
            if seen.insert(rep.fractions()) {
                out.push(rep);
            }
        }
        let mut i = 0;
        loop {
            if i == gens.len() {
                return out;
            }
            idx[i] += 1;
            if idx[i] < gens[i].1 {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

const SEARCH_PRECISION: u32 = 4;

fn search_level(p: u64, n: u64) -> Vec<EisensteinPair> {
    let m = SEARCH_PRECISION.min(max_precision(p) - 1);
    let q = p.pow(m + 1);
    let np = n * p;
    let g = primitive_root(p);
    let tau = PadicScalar::new(g as i64, p, m + 1)
        .teichmuller()
        .expect("unit")
        .value();
    // discrete logs mod p and squares mod p^(m+1) for a in [1, Np]
    let mut log_p = vec![0u64; p as usize];
    let mut x = 1u64;
    for y in 0..p - 1 {
        log_p[x as usize] = y;
        x = x * g % p;
    }
    let mut rings: HashMap<u64, Arc<ExtRing>> = HashMap::new();
    let mut out = Vec::new();
    for theta_n in primitive_orbit_reps(n, p) {
        let kn = theta_n.root_order();
        let l = (p - 1).lcm(&kn);
        let ring = rings
            .entry(l)
            .or_insert_with(|| ExtRing::cyclotomic(p, l, m + 1))
            .clone();
        let omega = DirichletCharacter::teichmuller(&ring).expect("ring hosts omega");
        let inv_n = theta_n.inv();
        let par_n = theta_n.parity();
        let theta_n_at_p = theta_n.exponent(p as i64);
        // S[e][y] = sum of a^2 over a in [1, Np] with theta_N^-1(a) = zeta^e, log_g(a mod p) = y
        let mut s = vec![vec![0u64; (p - 1) as usize]; kn as usize];
        let mut s_n = vec![0u64; kn as usize];
        for a in 1..=np {
            let Some(e) = inv_n.exponent(a as i64) else {
                continue;
            };
            if a <= n {
                s_n[e as usize] = (s_n[e as usize] + mul_mod(a, a, q)) % q;
            }
            if a % p == 0 {
                continue;
            }
            let y = log_p[(a % p) as usize] as usize;
            s[e as usize][y] = (s[e as usize][y] + mul_mod(a, a, q)) % q;
        }
        let scale = (l / kn) as i64;
        for k in 0..p - 1 {
            let parity = if k % 2 == 0 { par_n } else { -par_n };
            if parity != 1 {
                continue;
            }
            if theta_n.is_trivial() && (k == 0 || k == 2) {
                continue;
            }
            if k == 1 && theta_n_at_p == Some(0) {
                continue;
            }
            let b = if k == 0 {
                // theta^-1 is primitive mod N
                let mut acc = ExtScalar::zero(&ring, m + 1);
                for (e, &c) in s_n.iter().enumerate() {
                    acc = acc.add(
                        &ExtScalar::root_of_unity(&ring, e as i64 * scale, m + 1).mul_int(c as i64),
                    );
                }
                acc.reduce(m).mul_int(inv_mod(n % q, q).unwrap() as i64)
            } else {
                let tk = pow_mod(inv_mod(tau, q).unwrap(), k, q);
                let mut acc = ExtScalar::zero(&ring, m + 1);
                for (e, row) in s.iter().enumerate() {
                    let mut t = 0u64;
                    let mut w = 1u64;
                    for &c in row {
                        t = (t + mul_mod(c, w, q)) % q;
                        w = mul_mod(w, tk, q);
                    }
                    acc = acc.add(
                        &ExtScalar::root_of_unity(&ring, e as i64 * scale, m + 1).mul_int(t as i64),
                    );
                }
                match acc.div_p_pow(1) {
                    Ok(v) => v.mul_int(inv_mod(n % q, q).unwrap() as i64),
                    Err(_) => continue,
                }
            };
            if b.valuation() == 0 {
                continue;
            }
            let theta = theta_n
                .induce(np)
                .mul(&omega.pow(k as i64).induce(np))
                .normalized();
            let rep = theta.orbit_representative(p);
            out.push(EisensteinPair {
                p,
                n,
                theta: format_fractions(&rep.fractions()),
                conductor: rep.conductor(),
                order: rep.char_order(),
                orbit_size: rep.galois_orbit(p).len(),
                residue_degree: fixture_ring(p, &rep, 1).degree(),
                b2_valuation: b.valuation().min(b.precision()),
                b2_exact: !b.is_zero(),
            });
        }
    }
    out.sort_by(|a, b| a.theta.cmp(&b.theta));
    out
}

/// `B_{2,theta^-1}` for a fixture, through the generic formula.
#[cfg(test)]
pub(crate) fn b2_inverse(
    theta: &DirichletCharacter,
    ring: &Arc<ExtRing>,
    m: u32,
) -> crate::error::Result<ExtScalar> {
    super::generalized_bernoulli(2, &theta.inv().primitive(), ring, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_path_agrees_with_generic_formula() {
        let hits = find_eisenstein_pairs(5..=13, 1..=30);
        assert!(!hits.is_empty());
        for h in &hits {
            let theta = h.character();
            assert!(theta.is_even());
            assert!(theta.conductor() == h.n || theta.conductor() == h.n * h.p);
            let ring = fixture_ring(h.p, &theta, 6);
            let b = b2_inverse(&theta, &ring, 4).unwrap();
            assert!(b.valuation() >= 1, "{h:?}");
            if h.b2_exact {
                assert_eq!(b.valuation(), h.b2_valuation, "{h:?}");
            }
        }
    }

    #[test]
    fn misses_are_not_divisible() {
        // every even primitive theta mod 13 * 5 not reported has B_{2,theta^-1} a unit
        let hits = find_eisenstein_pairs(5..=5, 13..=13);
        let reported: Vec<DirichletCharacter> = hits.iter().map(|h| h.character()).collect();
        let gens = unit_group_generators(65);
        let k = gens.iter().fold(1u64, |acc, g| acc.lcm(&g.1));
        for i in 0..gens[0].1 {
            for j in 0..gens[1].1 {
                let theta = DirichletCharacter::from_images(
                    65,
                    k,
                    &[i * (k / gens[0].1), j * (k / gens[1].1)],
                )
                .unwrap()
                .normalized();
                if !theta.is_even() || theta.component(13).conductor() != 13 {
                    continue;
                }
                let ring = fixture_ring(5, &theta, 6);
                let b = b2_inverse(&theta, &ring, 3).unwrap();
                let listed = reported.iter().any(|r| r.galois_orbit(5).contains(&theta));
                let omega = DirichletCharacter::teichmuller(&ring).unwrap();
                let excluded_d =
                    theta.component(5) == omega && theta.component(13).exponent(5) == Some(0);
                assert_eq!(listed, b.valuation() >= 1 && !excluded_d, "{theta}");
            }
        }
    }
}
