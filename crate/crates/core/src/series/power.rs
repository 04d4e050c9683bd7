use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{same_ring, ExtRing, ExtScalar, ScalarJson};

/// A truncated element of `R[[X]]`: coefficients of `X^0..X^(n-1)`, each
/// carrying its own absolute precision. Coefficients from `X^n` on are unknown.
///
/// `pole` marks the series as `X^(-1)` times the stored coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSeries {
    ring: Arc<ExtRing>,
    coeffs: Vec<ExtScalar>,
    pole: bool,
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| format!("({c})X^{i}"))
            .collect();
        let pole = if self.pole { "X^-1 * " } else { "" };
        write!(
            f,
            "{pole}[{}] + O(X^{})",
            terms.join(" + "),
            self.coeffs.len()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub ring: String,
    pub precision: u32,
    pub trunc: usize,
    pub pole: bool,
    pub coeffs: Vec<ScalarJson>,
}

impl PowerSeries {
    pub fn from_coeffs(ring: &Arc<ExtRing>, coeffs: Vec<ExtScalar>) -> Self {
        for c in &coeffs {
            assert!(same_ring(c.ring(), ring), "coefficient from another ring");
        }
        PowerSeries {
            ring: ring.clone(),
            coeffs,
            pole: false,
        }
    }

    /// Integer coefficients, each known to precision `m`, truncated at `X^n`.
    pub fn from_ints(ring: &Arc<ExtRing>, ints: &[i64], n: usize, m: u32) -> Self {
        let coeffs = (0..n)
            .map(|i| ExtScalar::from_int(ring, ints.get(i).copied().unwrap_or(0), m))
            .collect();
        PowerSeries {
            ring: ring.clone(),
            coeffs,
            pole: false,
        }
    }

    pub fn zero(ring: &Arc<ExtRing>, n: usize, m: u32) -> Self {
        Self::from_ints(ring, &[], n, m)
    }

    pub fn one(ring: &Arc<ExtRing>, n: usize, m: u32) -> Self {
        Self::from_ints(ring, &[1], n, m)
    }

    /// The variable `X`.
    pub fn x(ring: &Arc<ExtRing>, n: usize, m: u32) -> Self {
        Self::from_ints(ring, &[0, 1], n, m)
    }

    pub fn constant(c: &ExtScalar, n: usize) -> Self {
        let mut s = Self::zero(c.ring(), n, c.ring().cap());
        if n > 0 {
            s.coeffs[0] = c.clone();
        }
        s
    }

    pub fn with_pole(mut self) -> Self {
        self.pole = true;
        self
    }

    pub fn has_pole(&self) -> bool {
        self.pole
    }

    pub fn ring(&self) -> &Arc<ExtRing> {
        &self.ring
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ExtScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ExtScalar {
        &self.coeffs[i]
    }

    /// Coefficient `i`, or an unknown (precision 0) value past the truncation.
    pub fn coeff_or_unknown(&self, i: usize) -> ExtScalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| ExtScalar::zero(&self.ring, 0))
    }

    /// Smallest coefficient precision.
    pub fn precision(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|c| c.precision())
            .min()
            .unwrap_or(self.ring.cap())
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(n);
        s
    }

    pub fn reduce(&self, m: u32) -> Self {
        self.map(|c| c.reduce(m))
    }

    pub fn map(&self, f: impl Fn(&ExtScalar) -> ExtScalar) -> Self {
        PowerSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
            pole: self.pole,
        }
    }

    /// Coefficientwise congruence on the common truncation, at each pair's common precision.
    pub fn agrees(&self, other: &Self) -> bool {
        self.pole == other.pole
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.agrees(b))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::IncompatibleRings);
        }
        if self.pole != other.pole {
            return Err(Error::Invalid("mixing series with and without pole".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).expect("compatible series");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        PowerSeries {
            ring: self.ring.clone(),
            coeffs,
            pole: self.pole,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ExtScalar) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            same_ring(&self.ring, &other.ring),
            "series from different rings"
        );
        assert!(!(self.pole && other.pole), "double pole");
        let n = self.trunc().min(other.trunc());
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = self.coeffs[0].mul(&other.coeffs[k]);
                for i in 1..=k {
                    acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]));
                }
                acc
            })
            .collect();
        PowerSeries {
            ring: self.ring.clone(),
            coeffs,
            pole: self.pole || other.pole,
        }
    }

    /// `d/dX`; the truncation drops by one.
    pub fn derivative(&self) -> Self {
        let coeffs = (1..self.trunc())
            .map(|i| self.coeffs[i].mul_int(i as i64))
            .collect();
        PowerSeries {
            ring: self.ring.clone(),
            coeffs,
            pole: false,
        }
    }

    /// `(1/k!) d^k/dX^k`, computed with binomial coefficients, so no precision is lost.
    pub fn divided_derivative(&self, k: usize) -> Self {
        let n = self.trunc();
        let coeffs = (k..n)
            .map(|j| self.coeffs[j].mul_int(binomial_i64(j as u64, k as u64)))
            .collect();
        PowerSeries {
            ring: self.ring.clone(),
            coeffs,
            pole: false,
        }
    }

    /// Inverse of a series with unit constant term.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.trunc();
        if n == 0 {
            return Ok(self.clone());
        }
        let a0inv = self.coeffs[0].inverse()?;
        let mut out: Vec<ExtScalar> = vec![a0inv.clone()];
        for k in 1..n {
            let mut acc = self.coeffs[1].mul(&out[k - 1]);
            for i in 2..=k {
                acc = acc.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out.push(acc.mul(&a0inv).neg());
        }
        Ok(PowerSeries {
            ring: self.ring.clone(),
            coeffs: out,
            pole: false,
        })
    }

    /// Division by `X`; needs a vanishing constant term.
    pub fn div_x(&self) -> Result<Self> {
        if self.trunc() == 0 {
            return Ok(self.clone());
        }
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonDivisible("constant term is nonzero".into()));
        }
        Ok(PowerSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs[1..].to_vec(),
            pole: self.pole,
        })
    }

    /// Multiplication by `X`; with a pole this clears it instead.
    pub fn mul_x(&self) -> Self {
        if self.pole {
            return PowerSeries {
                ring: self.ring.clone(),
                coeffs: self.coeffs.clone(),
                pole: false,
            };
        }
        let mut coeffs = vec![ExtScalar::zero(&self.ring, self.ring.cap())];
        coeffs.extend(self.coeffs.iter().cloned());
        PowerSeries {
            ring: self.ring.clone(),
            coeffs,
            pole: false,
        }
    }

    /// `self(g(X))` for `g` with `v(g(0)) >= 1`.
    ///
    /// With `g(0) != 0` the unknown tail of `self` reaches `X^i` with
    /// valuation at least `(n - i) v(g(0))`, which caps coefficient `i`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let n = self.trunc().min(g.trunc());
        let shift = match g.coeffs.first() {
            Some(c) if !c.is_zero() => {
                let v = c.valuation();
                if v == 0 {
                    return Err(Error::ConvergenceDomain(
                        "inner series has a unit constant term".into(),
                    ));
                }
                Some(v)
            }
            _ => None,
        };
        let inner = g.truncate(n);
        let mut acc = Self::zero(&self.ring, n, self.ring.cap());
        for k in (0..n).rev() {
            acc = acc.mul(&inner).add(&Self::constant(&self.coeffs[k], n));
        }
        if let Some(v) = shift {
            for (i, c) in acc.coeffs.iter_mut().enumerate() {
                *c = c.reduce(((n - i) as u32).saturating_mul(v));
            }
        }
        Ok(acc)
    }

    /// Extend with exact zeros up to truncation `n` (for polynomials).
    pub fn pad(&self, n: usize) -> Self {
        let mut s = self.clone();
        while s.coeffs.len() < n {
            s.coeffs.push(ExtScalar::zero(&self.ring, self.ring.cap()));
        }
        s
    }

    /// Evaluate at `x` with `v(x) >= 1`; the unknown tail costs precision `n v(x)`.
    pub fn eval_at(&self, x: &ExtScalar) -> Result<ExtScalar> {
        if self.pole {
            return Err(Error::ConvergenceDomain("series has a pole".into()));
        }
        let v = x.valuation();
        if v == 0 {
            return Err(Error::ConvergenceDomain(
                "evaluation point is not in the maximal ideal".into(),
            ));
        }
        let mut acc = ExtScalar::zero(&self.ring, self.ring.cap());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        let tail = (self.trunc() as u32).saturating_mul(v);
        Ok(acc.reduce(tail))
    }

    pub fn to_json(&self, ring_label: &str) -> SeriesJson {
        SeriesJson {
            ring: ring_label.to_string(),
            precision: self.precision(),
            trunc: self.trunc(),
            pole: self.pole,
            coeffs: self.coeffs.iter().map(|c| c.to_json()).collect(),
        }
    }
}

pub(crate) fn binomial_i64(n: u64, k: u64) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    i64::try_from(r).expect("binomial coefficient fits i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<ExtRing> {
        ExtRing::zp(5, 10)
    }

    fn s(c: &[i64]) -> PowerSeries {
        PowerSeries::from_ints(&ring(), c, 5, 6)
    }

    #[test]
    fn arithmetic_examples() {
        let r = ring();
        let a = PowerSeries::from_ints(&r, &[1, 1], 5, 6);
        let b = PowerSeries::from_ints(&r, &[1, -1], 5, 6);
        assert!(a
            .mul(&b)
            .agrees(&PowerSeries::from_ints(&r, &[1, 0, -1], 5, 6)));
        let d = PowerSeries::from_ints(&r, &[0, 0, 1], 5, 6).derivative();
        assert_eq!(d.trunc(), 4);
        assert!(d.agrees(&PowerSeries::from_ints(&r, &[0, 2], 4, 6)));
        let q = s(&[0, 1, 1]).div_x().unwrap();
        assert!(q.agrees(&PowerSeries::from_ints(&r, &[1, 1], 4, 6)));
        assert!(s(&[1, 1]).div_x().is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = s(&[2, 3, -1, 7, 4]);
        let b = a.inverse().unwrap();
        assert!(a.mul(&b).agrees(&s(&[1])));
        assert!(s(&[5, 1]).inverse().is_err());
    }

    #[test]
    fn evaluation() {
        let r = ring();
        let f = PowerSeries::from_ints(&r, &[1, 1], 2, 6);
        let v = f.eval_at(&ExtScalar::from_int(&r, 5, 10)).unwrap();
        assert_eq!(v.to_padic().unwrap().value(), 6);
        assert_eq!(v.precision(), 2);
        assert!(f.eval_at(&ExtScalar::from_int(&r, 2, 10)).is_err());
    }

    #[test]
    fn composition_with_polynomial() {
        let r = ring();
        // (1+X)^2 composed with X -> 2X + X^2 equals (1+X)^4
        let f = PowerSeries::from_ints(&r, &[1, 2, 1], 5, 6);
        let g = PowerSeries::from_ints(&r, &[0, 2, 1], 5, 10);
        let h = f.compose(&g).unwrap();
        assert!(h.agrees(&PowerSeries::from_ints(&r, &[1, 4, 6, 4, 1], 5, 6)));
    }
}
