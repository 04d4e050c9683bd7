//! Dirichlet characters with values in unramified rings, generalized
//! Bernoulli numbers and the interpolation values of `p`-adic L-functions.

mod bernoulli;
mod dirichlet;
pub(crate) mod search;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use bernoulli::{
    bernoulli_number, bernoulli_number_bounded, bernoulli_poly, rational_mod_pm,
    rational_valuation, BernoulliCache, RationalBig, DEFAULT_BOUND,
};
pub use dirichlet::{format_fractions, parse_fractions, unit_group_generators, DirichletCharacter};
pub use search::{find_eisenstein_pairs, fixture_ring, EisensteinPair};

use crate::arith::val;
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar};

/// `B_{n,chi} = f^(n-1) sum_{a=1}^f chi(a) B_n(a/f)` over the modulus `f` of
/// `chi` as given, split by value: entry `e` is the rational coefficient of
/// `zeta_K^e`.
pub fn generalized_bernoulli_classes(
    n: usize,
    chi: &DirichletCharacter,
) -> Result<Vec<BigRational>> {
    let f = chi.modulus();
    let k = chi.root_order() as usize;
    // power sums P[e][i] = sum_{a in class e} a^i
    let mut sums = vec![vec![BigInt::zero(); n + 1]; k];
    for a in 1..=f {
        let Some(e) = chi.exponent(a as i64) else {
            continue;
        };
        let mut pw = BigInt::one();
        let row = &mut sums[e as usize];
        for slot in row.iter_mut() {
            *slot += &pw;
            pw *= a;
        }
    }
    let fb = BigRational::from_integer(BigInt::from(f));
    let mut coeff = Vec::with_capacity(n + 1);
    let mut binom = BigInt::one();
    for j in 0..=n {
        // C(n, j) B_j f^(j-1)
        let mut c = BigRational::from_integer(binom.clone()) * bernoulli_number(j)?;
        c /= &fb;
        for _ in 0..j {
            c *= &fb;
        }
        coeff.push(c);
        binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Ok(sums
        .iter()
        .map(|row| {
            let mut acc = BigRational::zero();
            for (j, c) in coeff.iter().enumerate() {
                if !row[n - j].is_zero() {
                    acc += c * BigRational::from_integer(row[n - j].clone());
                }
            }
            acc
        })
        .collect())
}

/// `sum_e r_e zeta^e` in a cyclotomic ring at precision `m`.
///
/// Classes with `p` in the denominator are scaled by `p^k` and the sum is
/// divided back; precision is capped by the ring.
pub fn classes_to_ring(
    classes: &[BigRational],
    chi_order: u64,
    ring: &Arc<ExtRing>,
    m: u32,
) -> Result<ExtScalar> {
    let p = ring.prime();
    let l = ring.root_order().expect("cyclotomic ring");
    assert_eq!(
        l % chi_order,
        0,
        "ring order {l} cannot host values of order {chi_order}"
    );
    let scale = l / chi_order;
    let k = classes
        .iter()
        .filter(|r| !r.is_zero())
        .map(|r| -rational_valuation(r, p))
        .max()
        .unwrap_or(0)
        .max(0) as u32;
    let work = (m + k).min(ring.cap());
    if work <= k {
        return Err(Error::PrecisionExhausted(format!(
            "denominator p^{k} leaves no precision in the ring"
        )));
    }
    let pk = BigRational::from_integer(BigInt::from(p).pow(k));
    let mut acc = ExtScalar::zero(ring, work);
    for (e, r) in classes.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let c = rational_mod_pm(&(r * &pk), p, work)?;
        let z = ExtScalar::root_of_unity(ring, (e as u64 * scale) as i64, work);
        acc = acc.add(&z.mul_int(c as i64));
    }
    acc.div_p_pow(k)
}

/// `B_{n,chi}` reduced into `ring` at precision `m`, for `chi` as given.
pub fn generalized_bernoulli(
    n: usize,
    chi: &DirichletCharacter,
    ring: &Arc<ExtRing>,
    m: u32,
) -> Result<ExtScalar> {
    if n == 0 {
        return Err(Error::Invalid(
            "generalized Bernoulli numbers start at n = 1".into(),
        ));
    }
    let classes = generalized_bernoulli_classes(n, chi)?;
    classes_to_ring(&classes, chi.root_order(), ring, m)
}

/// `L_p(chi, 1-n) = -(1 - psi(p) p^(n-1)) B_{n,psi} / n` with `psi` the
/// primitive character attached to `chi omega^(-n)`.
///
/// The division by `n` costs `v_p(n)` digits of precision.
pub fn lp_value(
    chi: &DirichletCharacter,
    n: usize,
    ring: &Arc<ExtRing>,
    m: u32,
) -> Result<ExtScalar> {
    if !chi.is_even() {
        return Err(Error::OddCharacter);
    }
    if n == 0 {
        return Err(Error::Invalid(
            "interpolation points are 1 - n with n >= 1".into(),
        ));
    }
    let p = ring.prime();
    let omega = DirichletCharacter::teichmuller(ring)?;
    let twist = chi.mul(&omega.pow(-(n as i64)));
    debug_assert_eq!(
        twist.parity() as i64 * if n.is_multiple_of(2) { 1 } else { -1 },
        1
    );
    let psi = twist.primitive();
    let b = generalized_bernoulli(n, &psi, ring, m)?;
    let prec = b.precision();
    let psi_p = psi.value(ring, p as i64, prec);
    let pn = if (n - 1) as u32 >= prec {
        ExtScalar::zero(ring, prec)
    } else {
        ExtScalar::from_int(ring, p.pow((n - 1) as u32) as i64, prec)
    };
    let euler = ExtScalar::one(ring, prec).sub(&psi_p.mul(&pn));
    euler.mul(&b).neg().div_int(n as i64)
}

/// Precision lost by [`lp_value`] to the division by `n`.
pub fn lp_value_loss(p: u64, n: usize) -> u32 {
    val(n as u64, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicScalar;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn trivial_character_mod_one() {
        let chi = DirichletCharacter::trivial(1);
        let c = generalized_bernoulli_classes(2, &chi).unwrap();
        assert_eq!(c, vec![rat(1, 6)]);
        // the classical n = 1 exception: B_1(1) = +1/2
        assert_eq!(
            generalized_bernoulli_classes(1, &chi).unwrap(),
            vec![rat(1, 2)]
        );
    }

    #[test]
    fn trivial_mod_p_two_ways() {
        // formula over the imprimitive modulus vs a direct sum of B_1(a/p)
        let p = 7u64;
        let chi = DirichletCharacter::trivial(p);
        let formula = generalized_bernoulli_classes(1, &chi).unwrap()[0].clone();
        let mut direct = rat(0, 1);
        for a in 1..p as i64 {
            direct += bernoulli_poly(1, &rat(a, p as i64)).unwrap();
        }
        assert_eq!(formula, direct);
        // and the Euler factor relation with the primitive character mod 1
        let prim = generalized_bernoulli_classes(1, &chi.primitive()).unwrap()[0].clone();
        assert_eq!(formula, prim * (rat(1, 1) - rat(1, 1)));
    }

    #[test]
    fn odd_characters_have_vanishing_even_bernoulli() {
        let ring = ExtRing::cyclotomic(5, 12, 6);
        let chi = DirichletCharacter::from_images(13, 12, &[1]).unwrap();
        assert_eq!(chi.parity(), -1);
        assert!(generalized_bernoulli(2, &chi, &ring, 5).unwrap().is_zero());
        assert!(!generalized_bernoulli(1, &chi, &ring, 5).unwrap().is_zero());
    }

    #[test]
    fn b1_omega_mod_5() {
        let ring = ExtRing::cyclotomic(5, 4, 8);
        let w = DirichletCharacter::teichmuller(&ring).unwrap();
        let b = generalized_bernoulli(1, &w, &ring, 4).unwrap();
        // direct sum (1/5) sum omega(a) a with Teichmueller lifts mod 5^5
        let mut s = PadicScalar::zero(5, 5);
        for a in 1..5i64 {
            let t = PadicScalar::new(a, 5, 5).teichmuller().unwrap();
            s = s.add(&t.mul_int(a));
        }
        let oracle = s.div_p_pow(1).unwrap();
        assert!(b.agrees(&ExtScalar::from_padic(&ring, &oracle)));
        assert!(b.reduce(1).agrees(&ExtScalar::from_int(&ring, 3, 1)));
    }

    #[test]
    fn lp_at_omega_squared() {
        let ring = ExtRing::cyclotomic(5, 4, 8);
        let w = DirichletCharacter::teichmuller(&ring).unwrap();
        let v = lp_value(&w.pow(2), 1, &ring, 5).unwrap();
        assert!(v.reduce(1).agrees(&ExtScalar::from_int(&ring, 2, 1)));
        assert!(matches!(
            lp_value(&w, 1, &ring, 5),
            Err(Error::OddCharacter)
        ));
    }

    #[test]
    fn lp_precision_loss_is_v_p_n() {
        let ring = ExtRing::cyclotomic(5, 12, 10);
        let theta = DirichletCharacter::from_images(13, 12, &[2]).unwrap();
        for n in [1usize, 2, 5, 10] {
            let b_prec = {
                let omega = DirichletCharacter::teichmuller(&ring).unwrap();
                let psi = theta.mul(&omega.pow(-(n as i64))).primitive();
                generalized_bernoulli(n, &psi, &ring, 6)
                    .unwrap()
                    .precision()
            };
            let v = lp_value(&theta, n, &ring, 6).unwrap();
            assert_eq!(v.precision(), b_prec - lp_value_loss(5, n), "n = {n}");
        }
    }

    #[test]
    fn imprimitive_formula_carries_euler_factor() {
        // B_{2, chi induced to 5*13} = (1 - chi(5) 5) B_{2, chi}
        let ring = ExtRing::cyclotomic(5, 12, 10);
        let chi = DirichletCharacter::from_images(13, 12, &[2]).unwrap();
        let big = chi.induce(65);
        let lhs = generalized_bernoulli(2, &big, &ring, 6).unwrap();
        let rhs = generalized_bernoulli(2, &chi, &ring, 6).unwrap();
        let factor = ExtScalar::one(&ring, 6).sub(&chi.value(&ring, 5, 6).mul_int(5));
        assert!(lhs.agrees(&rhs.mul(&factor)));
    }
}
