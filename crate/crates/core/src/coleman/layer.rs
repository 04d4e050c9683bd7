use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar};

/// An element of `W[zeta_{p^r}]` in the basis `x^i`, `i < phi(p^r)`, with
/// `x = zeta_{p^r}` and `zeta_{p^r} = zeta_{p^(r+1)}^p` across layers.
#[derive(Clone, Debug)]
pub struct LayerElement {
    p: u64,
    r: u32,
    coeffs: Vec<ExtScalar>,
}

/// `phi(p^r)`, with `1` at the ground layer.
pub fn layer_dim(p: u64, r: u32) -> usize {
    if r == 0 {
        1
    } else {
        ((p - 1) * p.pow(r - 1)) as usize
    }
}

impl LayerElement {
    /// Reduce an arbitrary coefficient vector in powers of `x`.
    pub fn from_powers(
        p: u64,
        r: u32,
        ring: &Arc<ExtRing>,
        powers: &[ExtScalar],
        precision: u32,
    ) -> Self {
        let pr = p.pow(r) as usize;
        let mut v = vec![ExtScalar::zero(ring, precision); pr];
        for (i, c) in powers.iter().enumerate() {
            v[i % pr] = v[i % pr].add(c);
        }
        if r > 0 {
            // x^((p-1) p^(r-1) + i) = -sum_{j < p-1} x^(j p^(r-1) + i)
            let step = p.pow(r - 1) as usize;
            let dim = layer_dim(p, r);
            for k in (dim..pr).rev() {
                let c = v[k].clone();
                if c.is_zero() {
                    continue;
                }
                let i = k - dim;
                for j in 0..(p as usize - 1) {
                    v[j * step + i] = v[j * step + i].sub(&c);
                }
                v[k] = ExtScalar::zero(ring, precision);
            }
            v.truncate(dim);
        }
        LayerElement { p, r, coeffs: v }
    }

    pub fn constant(p: u64, r: u32, c: &ExtScalar) -> Self {
        Self::from_powers(p, r, c.ring(), std::slice::from_ref(c), c.precision())
    }

    /// `zeta_{p^r}` itself.
    pub fn zeta(p: u64, r: u32, ring: &Arc<ExtRing>, precision: u32) -> Self {
        let powers = [
            ExtScalar::zero(ring, precision),
            ExtScalar::one(ring, precision),
        ];
        Self::from_powers(p, r, ring, &powers, precision)
    }

    pub fn layer(&self) -> u32 {
        self.r
    }

    pub fn coeffs(&self) -> &[ExtScalar] {
        &self.coeffs
    }

    fn ring(&self) -> &Arc<ExtRing> {
        self.coeffs[0].ring()
    }

    pub fn precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(0)
    }

    pub fn reduce(&self, m: u32) -> Self {
        LayerElement {
            p: self.p,
            r: self.r,
            coeffs: self.coeffs.iter().map(|c| c.reduce(m)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.r, o.r);
        LayerElement {
            p: self.p,
            r: self.r,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.r, o.r);
        LayerElement {
            p: self.p,
            r: self.r,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &ExtScalar) -> Self {
        LayerElement {
            p: self.p,
            r: self.r,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.r, o.r);
        let prec = self.precision().min(o.precision());
        let mut prod =
            vec![ExtScalar::zero(self.ring(), prec); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        Self::from_powers(self.p, self.r, self.ring(), &prod, prec)
    }

    /// Frobenius on the `W`-coefficients; `zeta_{p^r}` is fixed.
    pub fn frobenius_pow(&self, k: i64) -> Self {
        LayerElement {
            p: self.p,
            r: self.r,
            coeffs: self.coeffs.iter().map(|c| c.frobenius_pow(k)).collect(),
        }
    }

    /// The automorphism `zeta_{p^r} -> zeta_{p^r}^e`, `p` not dividing `e`.
    pub fn conjugate(&self, e: u64) -> Self {
        let pr = self.p.pow(self.r);
        let prec = self.precision();
        let mut powers = vec![ExtScalar::zero(self.ring(), prec); pr as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (i as u64 * e % pr) as usize;
            powers[k] = powers[k].add(c);
        }
        Self::from_powers(self.p, self.r, self.ring(), &powers, prec)
    }

    /// Norm from layer `r` to layer `r - 1`.
    pub fn norm_down(&self) -> Result<Self> {
        if self.r == 0 {
            return Err(Error::Invalid(
                "the ground layer has no norm below it".into(),
            ));
        }
        let p = self.p;
        let exps: Vec<u64> = if self.r == 1 {
            (1..p).collect()
        } else {
            (0..p).map(|c| 1 + c * p.pow(self.r - 1)).collect()
        };
        let mut acc = self.conjugate(exps[0]);
        for &e in &exps[1..] {
            acc = acc.mul(&self.conjugate(e));
        }
        // the norm lies in W[x^p]
        let prec = acc.precision();
        let mut below = Vec::with_capacity(layer_dim(p, self.r - 1));
        for (i, c) in acc.coeffs.iter().enumerate() {
            if i % p as usize == 0 {
                below.push(c.clone());
            } else if !c.is_zero() {
                return Err(Error::NormFailure(format!(
                    "norm from layer {} left the subfield",
                    self.r
                )));
            }
        }
        below.truncate(layer_dim(p, self.r - 1));
        Ok(LayerElement {
            p,
            r: self.r - 1,
            coeffs: below,
        }
        .reduce(prec))
    }

    pub fn agrees(&self, o: &Self) -> bool {
        self.r == o.r && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.agrees(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_has_the_right_order() {
        let ring = ExtRing::cyclotomic(5, 4, 6);
        for r in 0..=2u32 {
            let z = LayerElement::zeta(5, r, &ring, 6);
            let mut acc = LayerElement::constant(5, r, &ExtScalar::one(&ring, 6));
            for _ in 0..5u64.pow(r) {
                acc = acc.mul(&z);
            }
            assert!(
                acc.agrees(&LayerElement::constant(5, r, &ExtScalar::one(&ring, 6))),
                "r = {r}"
            );
        }
    }

    #[test]
    fn norms_of_cyclotomic_elements() {
        // N(1 - y zeta_{p^(r+1)}) = 1 - y^p zeta_{p^r} for r >= 1
        let ring = ExtRing::cyclotomic(5, 12, 6);
        let y = ExtScalar::root_of_unity(&ring, 1, 6);
        let one = ExtScalar::one(&ring, 6);
        let elt = |r: u32, c: &ExtScalar| {
            LayerElement::constant(5, r, &one).sub(&LayerElement::zeta(5, r, &ring, 6).scale(c))
        };
        let n = elt(2, &y).norm_down().unwrap();
        assert!(n.agrees(&elt(1, &y.pow(5))));
        // over the ground layer: prod_{c=1}^{p-1} (1 - y zeta_p^c) = (1 - y^p) / (1 - y)
        let n0 = elt(1, &y).norm_down().unwrap();
        let want = one.sub(&y.pow(5)).div(&one.sub(&y)).unwrap();
        assert!(n0.coeffs()[0].agrees(&want));
    }
}
