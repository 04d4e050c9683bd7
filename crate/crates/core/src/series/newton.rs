use super::PowerSeries;
use crate::error::{Error, Result};
use crate::padic::ExtScalar;

/// Interpolate the integral series `F` with `F(x_i) = y_i`, returning the
/// first `n_out` coefficients with certified precision.
///
/// The Newton form is converted to monomials; coefficient `j` is then capped
/// by the tail bound: `F - P` is `prod (X - x_i)` times an integral series,
/// so its `X^j` coefficient has valuation at least the sum of the `K - j`
/// smallest `v(x_i)`. Divided-difference losses are carried by the scalar
/// precision ledger.
pub fn newton_interpolate(
    nodes: &[ExtScalar],
    values: &[ExtScalar],
    n_out: usize,
) -> Result<PowerSeries> {
    let k = nodes.len();
    assert_eq!(k, values.len());
    assert!(k > 0);
    let ring = nodes[0].ring().clone();
    let unknown = ExtScalar::zero(&ring, 0);
    let mut d: Vec<ExtScalar> = values.to_vec();
    for step in 1..k {
        for i in (step..k).rev() {
            let num = d[i].sub(&d[i - 1]);
            let den = nodes[i].sub(&nodes[i - step]);
            let v = den.valuation();
            if v >= den.precision() {
                return Err(Error::Invalid("repeated interpolation node".into()));
            }
            d[i] = if num.precision() <= v {
                unknown.clone()
            } else if num.valuation() < v {
                return Err(Error::NonDivisible(format!(
                    "divided difference of order {step} is not integral; the data do not come from an integral series"
                )));
            } else {
                num.div(&den)?
            };
        }
    }
    // monomial form of sum d_i prod_{l<i} (X - x_l)
    let exact = ring.cap();
    let mut poly: Vec<ExtScalar> = vec![d[k - 1].clone()];
    for i in (0..k - 1).rev() {
        let mut next = vec![ExtScalar::zero(&ring, exact); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] = next[j + 1].add(c);
            next[j] = next[j].sub(&c.mul(&nodes[i]));
        }
        next[0] = next[0].add(&d[i]);
        poly = next;
    }
    let mut vals: Vec<u32> = nodes.iter().map(|x| x.valuation()).collect();
    vals.sort_unstable();
    let coeffs = (0..n_out)
        .map(|j| {
            let c = poly
                .get(j)
                .cloned()
                .unwrap_or_else(|| ExtScalar::zero(&ring, exact));
            let bound: u32 = if j >= k {
                0
            } else {
                vals[..k - j].iter().fold(0u32, |a, &b| a.saturating_add(b))
            };
            c.reduce(bound)
        })
        .collect();
    Ok(PowerSeries::from_coeffs(&ring, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ExtRing;
    use crate::series::Generator;

    #[test]
    fn recovers_a_polynomial() {
        let r = ExtRing::zp(5, 20);
        let f = PowerSeries::from_ints(&r, &[3, -2, 7, 1], 4, 20);
        let g = Generator::simple(5, 20);
        let nodes: Vec<ExtScalar> = (0..8)
            .map(|s| ExtScalar::from_padic(&r, &g.node(s)))
            .collect();
        let values: Vec<ExtScalar> = nodes
            .iter()
            .map(|x| f.pad(20).eval_at(x).unwrap())
            .collect();
        let h = newton_interpolate(&nodes, &values, 4).unwrap();
        assert!(h.agrees(&f));
        assert!(h.precision() >= 5, "{h:?}");
    }

    #[test]
    fn rejects_non_integral_data() {
        let r = ExtRing::zp(5, 10);
        let nodes = vec![
            ExtScalar::from_int(&r, 0, 10),
            ExtScalar::from_int(&r, 5, 10),
        ];
        let values = vec![
            ExtScalar::from_int(&r, 0, 10),
            ExtScalar::from_int(&r, 1, 10),
        ];
        assert!(matches!(
            newton_interpolate(&nodes, &values, 2),
            Err(Error::NonDivisible(_))
        ));
    }
}
