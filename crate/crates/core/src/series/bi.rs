use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PowerSeries;
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar, ScalarJson};

/// A truncated element of `R[[X, V]]` on the box `deg_X < n`, `deg_V < n`.
///
/// Entries carry individual precisions; an entry that is not determined by
/// the inputs has precision 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    ring: Arc<ExtRing>,
    n: usize,
    /// row-major, index `i * n + j` for `X^i V^j`
    coeffs: Vec<ExtScalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiSeriesJson {
    pub trunc: usize,
    pub rows: Vec<Vec<ScalarJson>>,
}

impl BiSeries {
    pub fn zero(ring: &Arc<ExtRing>, n: usize) -> Self {
        BiSeries {
            ring: ring.clone(),
            n,
            coeffs: vec![ExtScalar::zero(ring, ring.cap()); n * n],
        }
    }

    pub fn trunc(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &Arc<ExtRing> {
        &self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &ExtScalar {
        &self.coeffs[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: ExtScalar) {
        self.coeffs[i * self.n + j] = c;
    }

    /// `X^k (x) g`: `g` in the variable `V`, shifted `k` steps in `X`.
    pub fn x_pow_tensor(k: usize, g: &PowerSeries, n: usize) -> Self {
        let mut out = Self::zero(g.ring(), n);
        if k < n {
            for j in 0..n {
                out.set(k, j, g.coeff_or_unknown(j));
            }
        }
        out
    }

    /// `1 (x) g`.
    pub fn from_v(g: &PowerSeries, n: usize) -> Self {
        Self::x_pow_tensor(0, g, n)
    }

    /// `X + V + XV`, the image of `gamma (x) gamma - 1`.
    pub fn diagonal_variable(ring: &Arc<ExtRing>, n: usize) -> Self {
        let mut z = Self::zero(ring, n);
        let one = ExtScalar::one(ring, ring.cap());
        for &(i, j) in &[(1, 0), (0, 1), (1, 1)] {
            if i < n && j < n {
                z.set(i, j, one.clone());
            }
        }
        z
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        BiSeries {
            ring: self.ring.clone(),
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        BiSeries {
            ring: self.ring.clone(),
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &ExtScalar) -> Self {
        BiSeries {
            ring: self.ring.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, o.n);
        let mut out = Self::zero(&self.ring, n);
        for i1 in 0..n {
            for j1 in 0..n {
                let a = self.get(i1, j1);
                if a.is_zero() && a.precision() >= self.ring.cap() {
                    continue;
                }
                for i2 in 0..n - i1 {
                    for j2 in 0..n - j1 {
                        let t = a.mul(o.get(i2, j2));
                        let idx = (i1 + i2) * n + j1 + j2;
                        out.coeffs[idx] = out.coeffs[idx].add(&t);
                    }
                }
            }
        }
        out
    }

    /// Division by `X`: row 0 must vanish; the last row becomes unknown.
    pub fn div_x(&self) -> Result<Self> {
        let n = self.n;
        if (0..n).any(|j| !self.get(0, j).is_zero()) {
            return Err(Error::NonDivisible("X-constant row is nonzero".into()));
        }
        let mut out = Self::zero(&self.ring, n);
        for i in 0..n {
            for j in 0..n {
                let c = if i + 1 < n {
                    self.get(i + 1, j).clone()
                } else {
                    ExtScalar::zero(&self.ring, 0)
                };
                out.set(i, j, c);
            }
        }
        Ok(out)
    }

    /// The coefficient of `X^i` as a series in `V`, cut at the first unknown entry.
    pub fn row(&self, i: usize) -> PowerSeries {
        let known: Vec<ExtScalar> = (0..self.n)
            .map(|j| self.get(i, j).clone())
            .take_while(|c| c.precision() > 0)
            .collect();
        PowerSeries::from_coeffs(&self.ring, known)
    }

    /// Specialise `X = 0`.
    pub fn at_x_zero(&self) -> PowerSeries {
        self.row(0)
    }

    /// Entrywise congruence at common precision.
    pub fn agrees(&self, o: &Self) -> bool {
        self.n == o.n && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.agrees(b))
    }

    /// Forget every entry outside `deg_X + deg_V < k`.
    pub fn forget_outside_total_degree(&self, k: usize) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i + j >= k {
                    out.set(i, j, self.get(i, j).reduce(0));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> BiSeriesJson {
        BiSeriesJson {
            trunc: self.n,
            rows: (0..self.n)
                .map(|i| (0..self.n).map(|j| self.get(i, j).to_json()).collect())
                .collect(),
        }
    }
}
