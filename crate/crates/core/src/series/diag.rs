use super::{BiSeries, PowerSeries};
use crate::error::Result;
use crate::padic::ExtScalar;

/// Substitute `X -> X + V + XV` in `f`.
///
/// Only entries with `deg_X + deg_V < n` are determined by `f mod X^n`;
/// the rest of the box is returned with precision 0.
pub fn diagonalize(f: &PowerSeries) -> BiSeries {
    let n = f.trunc();
    let ring = f.ring();
    let z = BiSeries::diagonal_variable(ring, n);
    let mut acc = BiSeries::zero(ring, n);
    for k in (0..n).rev() {
        acc = acc.mul(&z);
        let c = acc.get(0, 0).add(f.coeff(k));
        acc.set(0, 0, c);
    }
    acc.forget_outside_total_degree(n)
}

/// `(X+1)^k (1/k!) d^k f/dX^k`; `xi_n(f, 0) = f`.
pub fn xi_n(f: &PowerSeries, k: usize) -> PowerSeries {
    let d = f.divided_derivative(k);
    let ring = f.ring();
    let binom: Vec<ExtScalar> = (0..d.trunc())
        .map(|j| {
            ExtScalar::from_int(
                ring,
                super::power::binomial_i64(k as u64, j as u64),
                ring.cap(),
            )
        })
        .collect();
    PowerSeries::from_coeffs(ring, binom).mul(&d)
}

/// `X^(-1)(diagonalize(f) - 1 (x) f)`.
pub fn tilde_xi_1(f: &PowerSeries) -> Result<BiSeries> {
    let n = f.trunc();
    let d = diagonalize(f).sub(&BiSeries::from_v(f, n));
    d.div_x()
}

/// `sum_k X^k (x) xi_n(f, k)`, the right-hand side of the diagonal expansion.
pub fn diagonal_expansion(f: &PowerSeries) -> BiSeries {
    let n = f.trunc();
    let mut acc = BiSeries::zero(f.ring(), n);
    for k in 0..n {
        acc = acc.add(&BiSeries::x_pow_tensor(k, &xi_n(f, k), n));
    }
    acc.forget_outside_total_degree(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ExtRing;

    fn ser(c: &[i64], n: usize) -> PowerSeries {
        PowerSeries::from_ints(&ExtRing::zp(5, 8), c, n, 6)
    }

    #[test]
    fn diagonalize_examples() {
        let c = ser(&[7], 4);
        let d = diagonalize(&c);
        assert_eq!(d.get(0, 0).to_padic().unwrap().value(), 7);
        assert!(d.get(1, 0).is_zero() && d.get(0, 1).is_zero());
        let x = ser(&[0, 1], 4);
        let d = diagonalize(&x);
        for &(i, j) in &[(1, 0), (0, 1), (1, 1)] {
            assert_eq!(d.get(i, j).to_padic().unwrap().value(), 1);
        }
        assert!(d.get(2, 0).is_zero());
        // (X+V+XV)^2 = X^2 + 2XV + V^2 + 2X^2V + 2XV^2 + X^2V^2
        let d = diagonalize(&ser(&[0, 0, 1], 6));
        let want = [
            ((2, 0), 1),
            ((1, 1), 2),
            ((0, 2), 1),
            ((2, 1), 2),
            ((1, 2), 2),
            ((2, 2), 1),
        ];
        for &((i, j), v) in &want {
            if i + j < 6 {
                assert_eq!(d.get(i, j).to_padic().unwrap().value(), v, "entry {i},{j}");
            }
        }
    }

    #[test]
    fn xi_n_examples() {
        assert!(xi_n(&ser(&[0, 1], 5), 1).agrees(&ser(&[1, 1], 4)));
        assert!(xi_n(&ser(&[3], 5), 1).agrees(&ser(&[], 4)));
        assert!(xi_n(&ser(&[0, 0, 1], 5), 2).agrees(&ser(&[1, 2, 1], 3)));
        assert!(xi_n(&ser(&[1, 2, 3], 5), 0).agrees(&ser(&[1, 2, 3], 5)));
    }

    #[test]
    fn tilde_xi_1_examples() {
        let t = tilde_xi_1(&ser(&[0, 1], 5)).unwrap();
        assert!(t.at_x_zero().agrees(&ser(&[1, 1], 4)));
        assert_eq!(t.get(0, 0).to_padic().unwrap().value(), 1);
        assert_eq!(t.get(0, 1).to_padic().unwrap().value(), 1);
        assert!(t.get(1, 0).is_zero());
        let t = tilde_xi_1(&ser(&[4], 5)).unwrap();
        assert!(t.at_x_zero().agrees(&ser(&[], 4)));
        // f = X^2: restriction to X = 0 is 2V(V+1)
        let t = tilde_xi_1(&ser(&[0, 0, 1], 5)).unwrap();
        assert!(t.at_x_zero().agrees(&ser(&[0, 2, 2], 4)));
        assert!(t.at_x_zero().agrees(&xi_n(&ser(&[0, 0, 1], 5), 1)));
    }

    #[test]
    fn expansion_matches_on_a_fixed_series() {
        let f = ser(&[3, -1, 4, 1, -5, 9], 6);
        assert!(diagonalize(&f).agrees(&diagonal_expansion(&f)));
    }
}
