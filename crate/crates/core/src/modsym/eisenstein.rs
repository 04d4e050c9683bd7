use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::heilbronn::HeilbronnCache;
use super::oracle::gamma0_index;
use super::space::{Cuspidal, Sign, SymbolRing, SymbolSpace, Twist};
use crate::arith::{factor, is_prime, max_precision, primes_in};
use crate::characters::{fixture_ring, lp_value, DirichletCharacter};
use crate::error::{Error, Result};
use crate::presentation::{mulq, reduce_tracked, ModulePresentation, Track};

/// The `theta`-part of `S^+ / I S^+` at level `Np`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinQuotient {
    pub p: u64,
    pub level: u64,
    /// rank of `Z_p[theta]` over `Z_p`
    pub degree: usize,
    /// rank of the cuspidal plus part over `Z_p`
    pub cuspidal_rank: usize,
    /// largest prime whose Hecke operator was used
    pub sturm_bound: u64,
    /// precision `p^m` of the quotient
    pub precision: u32,
    /// `log_p` of the order
    pub order_exp: u32,
    /// nonzero exponents of the Fitting diagonal
    pub fitting: Vec<u32>,
}

/// Current quotient `Z^g / relations` with lifts of its generators to the
/// cuspidal subspace and the projection onto it in cuspidal coordinates.
struct Quotient {
    lifts: Vec<Vec<u64>>,
    projection: Vec<Vec<u64>>,
    relations: Vec<Vec<u64>>,
}

impl Quotient {
    fn project(&self, cusp: &Cuspidal, x: &[u64], q: u64) -> Vec<u64> {
        let c = cusp.coordinates(x);
        let g = self.lifts.len();
        let mut out = vec![0u64; g];
        for (&a, row) in c.iter().zip(&self.projection) {
            if a != 0 {
                for (o, &y) in out.iter_mut().zip(row) {
                    *o = (*o + mulq(a % q, y, q)) % q;
                }
            }
        }
        out
    }

    /// Diagonalize and drop the trivial generators.
    fn simplify(&mut self, p: u64, m: u32) {
        let q = p.pow(m);
        let g = self.lifts.len();
        let red = reduce_tracked(
            &self.relations,
            g,
            p,
            m,
            Track {
                u: false,
                v: true,
                v_inv: true,
            },
        );
        let rank = red.exps.len();
        let live: Vec<usize> = (0..g).filter(|&t| t >= rank || red.exps[t] > 0).collect();
        let lifts = live
            .iter()
            .map(|&t| {
                let mut out = vec![0u64; self.lifts[0].len()];
                for (i, l) in self.lifts.iter().enumerate() {
                    let f = red.v_inv[t][i];
                    if f != 0 {
                        for (o, &y) in out.iter_mut().zip(l) {
                            *o = (*o + mulq(f, y, q)) % q;
                        }
                    }
                }
                out
            })
            .collect();
        let projection = self
            .projection
            .iter()
            .map(|row| {
                live.iter()
                    .map(|&t| {
                        row.iter()
                            .enumerate()
                            .fold(0, |acc, (i, &x)| (acc + mulq(x, red.v[i][t], q)) % q)
                    })
                    .collect()
            })
            .collect();
        let relations = live
            .iter()
            .enumerate()
            .filter(|(_, &t)| t < rank)
            .map(|(i, &t)| {
                let mut r = vec![0u64; live.len()];
                r[i] = p.pow(red.exps[t]);
                r
            })
            .collect();
        *self = Quotient {
            lifts,
            projection,
            relations,
        };
    }
}

/// Order of the `theta`-Eisenstein quotient of the cuspidal plus part of
/// weight-2 modular symbols of level `Np`, computed modulo `p^m`.
///
/// The Eisenstein ideal is generated by `T_l - 1 - l<l>` for primes `l`
/// not dividing `Np` and `U_l - 1` for `l | Np`, over all primes up to the
/// Sturm bound. The symbols are built with nebentypus `theta^-1` at
/// precision `p^{2m}` so that the cuspidal subspace survives the boundary
/// map with at least `m` digits.
pub fn eisenstein_quotient(
    p: u64,
    theta: &DirichletCharacter,
    m: u32,
    cache: Option<&HeilbronnCache>,
) -> Result<EisensteinQuotient> {
    let level = theta.modulus();
    if !is_prime(p) || p < 5 || !level.is_multiple_of(p) {
        return Err(Error::Invalid(format!(
            "the level {level} must be Np with p = {p} >= 5 prime"
        )));
    }
    let k = 2 * m;
    if m == 0 || k > max_precision(p) {
        return Err(Error::Invalid(format!("precision p^{k} out of range")));
    }
    let eps = theta.inv().normalized();
    let ring = SymbolRing::local(p, k, eps.root_order())?;
    let degree = ring.degree();
    let space = SymbolSpace::build(level, Twist::Character(eps), ring, Sign::Plus)?;
    let cusp = space.cuspidal()?;
    if cusp.precision < m {
        return Err(Error::Indeterminate(format!(
            "the boundary map loses {} digits; the cuspidal subspace is known to p^{} only",
            k - cusp.precision,
            cusp.precision
        )));
    }
    let q = p.pow(m);
    let s = cusp.rank();
    let mut quo = Quotient {
        lifts: cusp
            .basis
            .iter()
            .map(|b| b.iter().map(|x| x % q).collect())
            .collect(),
        projection: (0..s)
            .map(|i| (0..s).map(|j| (i == j) as u64).collect())
            .collect(),
        relations: Vec::new(),
    };
    let bound = gamma0_index(level) / 6;
    let mut primes = primes_in(2, bound);
    primes.extend(
        factor(level)
            .into_iter()
            .map(|(l, _)| l)
            .filter(|&l| l > bound),
    );
    let qk = space.ring().modulus();
    for &l in &primes {
        if quo.lifts.is_empty() {
            break;
        }
        let mats = match cache {
            Some(c) => c.get(l)?,
            None => super::heilbronn::merel(l),
        };
        let mm = level;
        let unramified = !level.is_multiple_of(l);
        let gen = |u: u64, v: u64| {
            let mut t: Vec<(i64, u32, u64, u64)> = space
                .heilbronn_terms(&mats, u, v)
                .into_iter()
                .map(|(x, y)| (1, 0, x, y))
                .collect();
            t.push((-1, 0, u, v));
            if unramified {
                t.push((-(l as i64), 0, l % mm * u % mm, l % mm * v % mm));
            }
            t
        };
        let rows: Vec<Vec<u64>> = quo
            .lifts
            .par_iter()
            .map(|x| {
                let lifted: Vec<u64> = x.iter().map(|&a| a % qk).collect();
                let img: Vec<u64> = space
                    .apply_pairs(&lifted, &gen)
                    .iter()
                    .map(|&a| a % q)
                    .collect();
                quo.project(&cusp, &img, q)
            })
            .collect();
        quo.relations.extend(rows);
        quo.simplify(p, m);
    }
    let fitting =
        ModulePresentation::new(p, m, quo.lifts.len(), quo.relations.clone()).fitting_diagonal();
    if fitting.iter().any(|&e| e >= m) {
        return Err(Error::Indeterminate(format!(
            "the Eisenstein quotient is not killed by p^{}",
            m - 1
        )));
    }
    Ok(EisensteinQuotient {
        p,
        level,
        degree,
        cuspidal_rank: s,
        sturm_bound: bound,
        precision: m,
        order_exp: fitting.iter().sum(),
        fitting: fitting.into_iter().filter(|&e| e > 0).collect(),
    })
}

/// `log_p |R / xi(0) R|` for `xi(0) = L_p(omega^2 theta^-1, -1)` and
/// `R = Z_p[theta]`, or `None` if `xi(0)` vanishes modulo `p^m`.
pub fn xi_zero_order(p: u64, theta: &DirichletCharacter, m: u32) -> Result<Option<u32>> {
    let ring = fixture_ring(p, theta, m + 1);
    let omega = DirichletCharacter::teichmuller(&ring)?;
    let xi0 = lp_value(&omega.pow(2).mul(&theta.inv()), 2, &ring, m + 1)?;
    if xi0.is_zero() {
        return Ok(None);
    }
    Ok(Some(ring.degree() as u32 * xi0.valuation()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{find_eisenstein_pairs, parse_fractions};

    #[test]
    fn small_fixtures_match_xi_zero() {
        for f in find_eisenstein_pairs(5..=19, 1..=9) {
            let theta = f.character();
            let e = eisenstein_quotient(f.p, &theta, 3, None).unwrap();
            assert_eq!(
                Some(e.order_exp),
                xi_zero_order(f.p, &theta, 4).unwrap(),
                "{} {} {}",
                f.p,
                f.n,
                f.theta
            );
            assert!(e.order_exp > 0);
            for conj in theta.galois_orbit(f.p) {
                assert_eq!(
                    eisenstein_quotient(f.p, &conj, 3, None).unwrap().order_exp,
                    e.order_exp
                );
            }
        }
    }

    #[test]
    fn regular_character_has_trivial_quotient() {
        let theta =
            DirichletCharacter::from_fractions(35, &parse_fractions("1/2,1/3").unwrap()).unwrap();
        assert_eq!(xi_zero_order(7, &theta, 4).unwrap(), Some(0));
        let e = eisenstein_quotient(7, &theta, 3, None).unwrap();
        assert_eq!(e.order_exp, 0);
        assert!(e.fitting.is_empty());
    }

    #[test]
    fn odd_character_is_rejected() {
        let theta =
            DirichletCharacter::from_fractions(33, &parse_fractions("1/2,1/5").unwrap()).unwrap();
        assert!(matches!(
            eisenstein_quotient(11, &theta, 3, None),
            Err(Error::OddCharacter)
        ));
    }
}
