use std::sync::Arc;

use super::{ExtRing, ExtScalar};
use crate::arith::{mul_mod, val};
use crate::error::{Error, Result};

/// `W[zeta_p] = W[pi]/(E(pi))` with `pi = zeta_p - 1` and `E(pi) = Phi_p(1 + pi)`.
///
/// Elements are vectors of `p - 1` coefficients in `W` at one fixed working
/// precision `p^m`; callers account for truncation separately.
#[derive(Debug)]
pub struct RamRing {
    base: Arc<ExtRing>,
    precision: u32,
    /// `pi^(e+k)` in the `pi`-basis (integer entries), `k < e - 1`
    reduction: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamScalar {
    /// `coeffs[i]` is the `W`-coefficient of `pi^i`
    coeffs: Vec<Vec<u64>>,
}

impl RamRing {
    pub fn new(base: &Arc<ExtRing>, precision: u32) -> Arc<RamRing> {
        let p = base.prime();
        assert!(precision <= base.cap());
        let e = (p - 1) as usize;
        let q = base.ppow(precision);
        // pi^e = -sum_{k=1}^{p-1} C(p,k) pi^(k-1)
        let mut binom = vec![1u64; p as usize + 1];
        for k in 1..=p as usize {
            binom[k] = binom[k - 1] * (p as usize + 1 - k) as u64 / k as u64;
        }
        let mut cur: Vec<u64> = (1..p as usize).map(|k| (q - binom[k] % q) % q).collect();
        let mut reduction = Vec::new();
        for _ in 0..e.saturating_sub(1) {
            reduction.push(cur.clone());
            let top = cur[e - 1];
            let mut next = vec![0u64; e];
            next[1..e].copy_from_slice(&cur[..(e - 1)]);
            for i in 0..e {
                next[i] = (next[i] + mul_mod(top, reduction[0][i], q)) % q;
            }
            cur = next;
        }
        Arc::new(RamRing {
            base: base.clone(),
            precision,
            reduction,
        })
    }

    pub fn base(&self) -> &Arc<ExtRing> {
        &self.base
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn e(&self) -> usize {
        (self.base.prime() - 1) as usize
    }

    fn q(&self) -> u64 {
        self.base.ppow(self.precision)
    }

    pub fn zero(&self) -> RamScalar {
        RamScalar {
            coeffs: vec![vec![0; self.base.degree()]; self.e()],
        }
    }

    pub fn one(&self) -> RamScalar {
        self.from_base(&ExtScalar::one(&self.base, self.precision))
    }

    pub fn from_base(&self, a: &ExtScalar) -> RamScalar {
        assert!(
            a.precision() >= self.precision,
            "base element below working precision"
        );
        let mut z = self.zero();
        let q = self.q();
        z.coeffs[0] = a.coeffs().iter().map(|c| c % q).collect();
        z
    }

    pub fn pi(&self) -> RamScalar {
        let mut z = self.zero();
        if self.e() == 1 {
            // p = 2 is excluded elsewhere; keep the formula total
            return z;
        }
        z.coeffs[1][0] = 1;
        z
    }

    /// `zeta_p^c = (1 + pi)^c`.
    pub fn zeta(&self, c: u64) -> RamScalar {
        let base = self.add(&self.one(), &self.pi());
        self.pow(&base, c % self.base.prime())
    }

    pub fn add(&self, a: &RamScalar, b: &RamScalar) -> RamScalar {
        let q = self.q();
        RamScalar {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u + v) % q).collect())
                .collect(),
        }
    }

    pub fn sub(&self, a: &RamScalar, b: &RamScalar) -> RamScalar {
        let q = self.q();
        RamScalar {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u + q - v) % q).collect())
                .collect(),
        }
    }

    pub fn mul(&self, a: &RamScalar, b: &RamScalar) -> RamScalar {
        let e = self.e();
        let d = self.base.degree();
        let q = self.q();
        let mut prod = vec![vec![0u64; d]; 2 * e - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.iter().all(|&c| c == 0) {
                    continue;
                }
                let t = self.base.raw_mul(x, y, q);
                for k in 0..d {
                    prod[i + j][k] = (prod[i + j][k] + t[k]) % q;
                }
            }
        }
        let mut out: Vec<Vec<u64>> = prod[..e].to_vec();
        for k in 0..e.saturating_sub(1) {
            let c = &prod[e + k];
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            for (i, &r) in self.reduction[k].iter().enumerate() {
                if r == 0 {
                    continue;
                }
                for t in 0..d {
                    out[i][t] = (out[i][t] + mul_mod(c[t], r, q)) % q;
                }
            }
        }
        RamScalar { coeffs: out }
    }

    pub fn scale(&self, a: &RamScalar, w: &ExtScalar) -> RamScalar {
        assert!(w.precision() >= self.precision);
        let q = self.q();
        RamScalar {
            coeffs: a
                .coeffs
                .iter()
                .map(|x| self.base.raw_mul(x, w.coeffs(), q))
                .collect(),
        }
    }

    pub fn pow(&self, a: &RamScalar, mut e: u64) -> RamScalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Valuation in units of `1/(p-1)`; `None` for zero.
    pub fn valuation(&self, a: &RamScalar) -> Option<u32> {
        let p = self.base.prime();
        let e = self.e() as u32;
        a.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                c.iter()
                    .filter(|&&x| x != 0)
                    .map(|&x| val(x, p))
                    .min()
                    .map(|v| v * e + i as u32)
            })
            .min()
    }

    /// The element as a member of `W`, if its `pi`-coefficients vanish.
    pub fn to_base(&self, a: &RamScalar) -> Result<ExtScalar> {
        if a.coeffs[1..].iter().any(|c| c.iter().any(|&x| x != 0)) {
            return Err(Error::NonDivisible(
                "element is not in the unramified subring".into(),
            ));
        }
        Ok(ExtScalar::from_raw(
            &self.base,
            a.coeffs[0].clone(),
            self.precision,
        ))
    }

    /// Exact division by `p`; the result is meaningful modulo `p^(m-1)`.
    pub fn div_p(&self, a: &RamScalar) -> Result<RamScalar> {
        let p = self.base.prime();
        if a.coeffs.iter().flatten().any(|&x| x % p != 0) {
            return Err(Error::NonDivisible("not divisible by p".into()));
        }
        Ok(RamScalar {
            coeffs: a
                .coeffs
                .iter()
                .map(|c| c.iter().map(|&x| x / p).collect())
                .collect(),
        })
    }

    pub fn is_zero(&self, a: &RamScalar) -> bool {
        a.coeffs.iter().flatten().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_has_order_p() {
        let w = ExtRing::cyclotomic(5, 3, 6);
        let r = RamRing::new(&w, 6);
        let z = r.zeta(1);
        assert_ne!(z, r.one());
        assert_eq!(r.pow(&z, 5), r.one());
        // 1 + zeta + ... + zeta^4 = 0
        let mut s = r.zero();
        for c in 0..5 {
            s = r.add(&s, &r.zeta(c));
        }
        assert!(r.is_zero(&s));
        assert_eq!(r.valuation(&r.pi()), Some(1));
        // v(p) = p - 1 in these units
        let p = r.from_base(&ExtScalar::from_int(&w, 5, 6));
        assert_eq!(r.valuation(&p), Some(4));
        // pi^4 / p is a unit
        assert_eq!(r.valuation(&r.pow(&r.pi(), 4)), Some(4));
    }
}
