use super::PowerSeries;
use crate::error::{Error, Result};
use crate::padic::ExtScalar;

/// `f = p^mu * P * U` with `P` distinguished of degree `lambda` and `U` a unit.
#[derive(Clone, Debug)]
pub struct WeierstrassData {
    pub mu: u32,
    pub lambda: usize,
    pub distinguished: PowerSeries,
    pub unit: PowerSeries,
}

/// Weierstrass preparation of a truncated series.
///
/// `mu` and `lambda` are read off the visible coefficients, which must
/// certify them: every coefficient up to `X^lambda` is known beyond `p^mu`.
/// `mu = 0` is then a statement about the whole series; a positive `mu` only
/// about the truncation.
pub fn weierstrass_data(f: &PowerSeries) -> Result<WeierstrassData> {
    let cs = f.coeffs();
    let mu = cs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.valuation())
        .min()
        .ok_or_else(|| {
            Error::Indeterminate("every visible coefficient vanishes at its precision".into())
        })?;
    let lambda = cs
        .iter()
        .position(|c| !c.is_zero() && c.valuation() == mu)
        .unwrap();
    for (j, c) in cs.iter().enumerate() {
        if c.is_zero() && (c.precision() < mu || (j < lambda && c.precision() <= mu)) {
            return Err(Error::Indeterminate(format!(
                "coefficient of X^{j} is only known mod p^{}, cannot separate it from p^{mu}",
                c.precision()
            )));
        }
    }
    let g = f.map(|c| {
        if c.precision() > mu {
            c.div_p_pow(mu).unwrap()
        } else {
            c.reduce(0)
        }
    });
    let n = g.trunc();
    let ring = g.ring().clone();
    let exact = ring.cap();
    if lambda == 0 {
        return Ok(WeierstrassData {
            mu,
            lambda,
            distinguished: PowerSeries::one(&ring, n, exact),
            unit: g,
        });
    }
    // g = (X^lambda + c) U with deg c < lambda; iterate
    //   c = g U^{-1} mod X^lambda,   U = (g - cU) / X^lambda
    let low = g.truncate(lambda);
    let mut u: Vec<ExtScalar> = (0..n - lambda)
        .map(|j| g.coeff(j + lambda).clone())
        .collect();
    let mut c: Vec<ExtScalar> = vec![ExtScalar::zero(&ring, exact); lambda];
    let unknown = ExtScalar::zero(&ring, 0);
    for _ in 0..=exact {
        let u_head: Vec<ExtScalar> = (0..lambda)
            .map(|j| u.get(j).cloned().unwrap_or_else(|| unknown.clone()))
            .collect();
        let uinv = PowerSeries::from_coeffs(&ring, u_head).inverse()?;
        let c_new = low.mul(&uinv).coeffs().to_vec();
        let u_new: Vec<ExtScalar> = (0..n - lambda)
            .map(|j| {
                let mut acc = g.coeff(j + lambda).clone();
                for (i, ci) in c_new.iter().enumerate() {
                    let k = j + lambda - i;
                    let uk = u.get(k).cloned().unwrap_or_else(|| unknown.clone());
                    acc = acc.sub(&ci.mul(&uk));
                }
                acc
            })
            .collect();
        let done = c_new == c && u_new == u;
        c = c_new;
        u = u_new;
        if done {
            break;
        }
    }
    let mut p_coeffs = c;
    p_coeffs.push(ExtScalar::one(&ring, exact));
    while p_coeffs.len() < n {
        p_coeffs.push(ExtScalar::zero(&ring, exact));
    }
    Ok(WeierstrassData {
        mu,
        lambda,
        distinguished: PowerSeries::from_coeffs(&ring, p_coeffs),
        unit: PowerSeries::from_coeffs(&ring, u),
    })
}

impl WeierstrassData {
    /// `p^mu * P * U`, for re-multiplication checks.
    pub fn product(&self) -> PowerSeries {
        let ring = self.unit.ring();
        let pmu = ExtScalar::from_int(ring, ring.prime().pow(self.mu) as i64, ring.cap());
        self.distinguished.mul(&self.unit).scale(&pmu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ExtRing;

    fn ser(c: &[i64]) -> PowerSeries {
        PowerSeries::from_ints(&ExtRing::zp(5, 12), c, 8, 8)
    }

    #[test]
    fn invariants_of_examples() {
        let w = weierstrass_data(&ser(&[5, 1])).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 1));
        let w = weierstrass_data(&ser(&[5, 5])).unwrap();
        assert_eq!((w.mu, w.lambda), (1, 0));
        let w = weierstrass_data(&ser(&[5, 5, 1])).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 2));
        assert!(matches!(
            weierstrass_data(&ser(&[])),
            Err(Error::Indeterminate(_))
        ));
    }

    #[test]
    fn factors_remultiply() {
        let f = ser(&[10, 25, 3, 7, 1, -4, 2, 9]);
        let w = weierstrass_data(&f).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 2));
        assert!(w.product().agrees(&f));
        assert!(w.unit.coeff(0).is_unit());
        assert!(w.distinguished.coeffs()[..2]
            .iter()
            .all(|c| c.valuation() >= 1));
        let f = ser(&[25, 50, 5, 15, 10]);
        let w = weierstrass_data(&f).unwrap();
        assert_eq!((w.mu, w.lambda), (1, 2));
        assert!(w.product().agrees(&f));
    }
}
