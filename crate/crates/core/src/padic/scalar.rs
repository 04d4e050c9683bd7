use std::fmt;

use serde::{Deserialize, Serialize};

use super::LocalScalar;
use crate::arith::{checked_pow, inv_mod, max_precision, mul_mod, reduce_i64, val};
use crate::error::{Error, Result};

/// An element of `Z_p` known modulo `p^precision`.
///
/// Precision is absolute. Sums keep the smaller precision; a product `ab`
/// is known to `min(m_a + v(b), m_b + v(a))`; dividing by `p^k` costs `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    value: u64,
    prime: u64,
    precision: u32,
}

fn modulus(p: u64, m: u32) -> u64 {
    checked_pow(p, m).expect("precision within machine range")
}

impl PadicScalar {
    /// Reduce `value` modulo `p^precision`.
    ///
    /// Panics when `p^precision` does not fit the machine representation;
    /// see [`max_precision`].
    pub fn new(value: i64, prime: u64, precision: u32) -> Self {
        assert!(prime >= 3, "odd prime expected");
        assert!(
            precision <= max_precision(prime),
            "precision {precision} too large for p = {prime}"
        );
        let q = modulus(prime, precision);
        PadicScalar {
            value: reduce_i64(value, q),
            prime,
            precision,
        }
    }

    pub fn from_u64(value: u64, prime: u64, precision: u32) -> Self {
        assert!(precision <= max_precision(prime));
        PadicScalar {
            value: value % modulus(prime, precision),
            prime,
            precision,
        }
    }

    /// The rational `num/den` with `p` not dividing `den`.
    pub fn from_ratio(num: i64, den: i64, prime: u64, precision: u32) -> Result<Self> {
        let q = modulus(prime, precision);
        let d = reduce_i64(den, q);
        let di = inv_mod(d, q).ok_or(Error::NonUnitInverse(val(den.unsigned_abs(), prime)))?;
        Ok(PadicScalar {
            value: mul_mod(reduce_i64(num, q), di, q),
            prime,
            precision,
        })
    }

    pub fn zero(prime: u64, precision: u32) -> Self {
        Self::new(0, prime, precision)
    }

    pub fn one(prime: u64, precision: u32) -> Self {
        Self::new(1, prime, precision)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.prime, self.precision)
    }

    /// The representative in `(-p^m/2, p^m/2]`.
    pub fn signed(&self) -> i64 {
        let q = self.modulus();
        if self.value > q / 2 {
            self.value as i64 - q as i64
        } else {
            self.value as i64
        }
    }

    /// `v_p` of the value; equals the precision when the value is zero at that precision.
    pub fn valuation(&self) -> u32 {
        if self.value == 0 {
            self.precision
        } else {
            val(self.value, self.prime).min(self.precision)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.precision > 0 && !self.value.is_multiple_of(self.prime)
    }

    /// Forget precision down to `m`.
    pub fn reduce(&self, m: u32) -> Self {
        let m = m.min(self.precision);
        PadicScalar {
            value: self.value % modulus(self.prime, m),
            prime: self.prime,
            precision: m,
        }
    }

    /// Congruent modulo the smaller of the two precisions.
    pub fn agrees(&self, other: &Self) -> bool {
        let m = self.precision.min(other.precision);
        self.prime == other.prime && self.reduce(m).value == other.reduce(m).value
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "mixed primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let m = self.precision.min(other.precision);
        let q = modulus(self.prime, m);
        PadicScalar {
            value: (self.value % q + other.value % q) % q,
            prime: self.prime,
            precision: m,
        }
    }

    pub fn neg(&self) -> Self {
        let q = self.modulus();
        PadicScalar {
            value: (q - self.value) % q,
            ..*self
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let m = (self.precision + other.valuation())
            .min(other.precision + self.valuation())
            .min(max_precision(self.prime));
        let q = modulus(self.prime, m);
        PadicScalar {
            value: mul_mod(self.value, other.value, q),
            prime: self.prime,
            precision: m,
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let q = self.modulus();
        PadicScalar {
            value: mul_mod(self.value, reduce_i64(k, q), q),
            ..*self
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::one(self.prime, self.precision);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a unit; keeps precision.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnitInverse(self.valuation()));
        }
        let q = self.modulus();
        Ok(PadicScalar {
            value: inv_mod(self.value, q).expect("unit"),
            ..*self
        })
    }

    /// Exact division by `p^k`; the result is known to precision `m - k`.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        if self.precision <= k {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by p^{k} at precision {}",
                self.precision
            )));
        }
        if self.valuation() < k {
            return Err(Error::NonDivisible(format!(
                "valuation {} < {k}",
                self.valuation()
            )));
        }
        let pk = modulus(self.prime, k);
        Ok(PadicScalar {
            value: self.value / pk,
            prime: self.prime,
            precision: self.precision - k,
        })
    }

    /// Exact division `self / other`, charging the valuation of `other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other);
        let v = other.valuation();
        if v >= other.precision {
            return Err(Error::NonDivisible("division by zero".into()));
        }
        let unit = other.div_p_pow(v)?.inverse()?;
        // the unit part of `other` is known to precision m_b - v
        let quotient = self.div_p_pow(v)?;
        let m = quotient
            .precision
            .min(other.precision - v + quotient.valuation());
        Ok(quotient.mul(&unit).reduce(m))
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: i64) -> Result<Self> {
        assert!(k != 0);
        let v = val(k.unsigned_abs(), self.prime);
        let unit = k / self.prime.pow(v) as i64;
        let r = self.div_p_pow(v)?;
        Ok(r.mul(&PadicScalar::new(unit, self.prime, r.precision).inverse()?))
    }

    /// Teichmuller representative: the `(p-1)`-st root of unity congruent to `self` mod `p`.
    pub fn teichmuller(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnitInverse(self.valuation()));
        }
        // x -> x^p contracts towards the fixed point; each step gains one digit
        let mut x = *self;
        for _ in 0..self.precision {
            x = x.pow(self.prime);
        }
        Ok(PadicScalar {
            value: x.value,
            ..*self
        })
    }

    /// `log(u)` for a 1-unit `u`.
    pub fn log(&self) -> Result<Self> {
        super::log_one_unit(self)
    }

    /// Iwasawa logarithm of a unit: `log(u^(p-1)) / (p-1)`.
    pub fn log_unit(&self) -> Result<Self> {
        let w = self.pow(self.prime - 1);
        w.log()?.div_int(self.prime as i64 - 1)
    }

    /// `exp(x)` for `v(x) >= 1`.
    pub fn exp(&self) -> Result<Self> {
        super::exp_series(self)
    }
}

impl LocalScalar for PadicScalar {
    fn prime(&self) -> u64 {
        self.prime
    }
    fn precision(&self) -> u32 {
        self.precision
    }
    fn valuation(&self) -> u32 {
        PadicScalar::valuation(self)
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.prime, self.precision)
    }
    fn one_like(&self) -> Self {
        Self::one(self.prime, self.precision)
    }
    fn add(&self, o: &Self) -> Self {
        PadicScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicScalar::mul(self, o)
    }
    fn div_int(&self, k: i64) -> Result<Self> {
        PadicScalar::div_int(self, k)
    }
    fn reduce(&self, m: u32) -> Self {
        PadicScalar::reduce(self, m)
    }
    fn residue_is_one(&self) -> bool {
        self.precision > 0 && self.value % self.prime == 1
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.value, self.prime, self.precision)
    }
}

/// Wire format shared by all scalars: decimal strings for bit-exact output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub prime: u64,
    pub precision: u32,
    pub coeffs: Vec<String>,
}

impl From<&PadicScalar> for ScalarJson {
    fn from(a: &PadicScalar) -> Self {
        ScalarJson {
            prime: a.prime,
            precision: a.precision,
            coeffs: vec![a.value.to_string()],
        }
    }
}

impl TryFrom<&ScalarJson> for PadicScalar {
    type Error = Error;
    fn try_from(j: &ScalarJson) -> Result<Self> {
        let [c] = j.coeffs.as_slice() else {
            return Err(Error::Invalid("expected one coefficient".into()));
        };
        let v: u64 = c
            .parse()
            .map_err(|_| Error::Invalid(format!("bad integer {c}")))?;
        Ok(PadicScalar::from_u64(v, j.prime, j.precision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> PadicScalar {
        PadicScalar::new(v, 5, 3)
    }

    #[test]
    fn basic_ops() {
        let x = s(2).add(&s(3));
        assert_eq!((x.value(), x.valuation(), x.precision()), (5, 1, 3));
        assert_eq!(s(1).inverse().unwrap(), s(1));
        assert_eq!(s(2).inverse().unwrap().value(), 63);
        assert_eq!(s(5).inverse(), Err(Error::NonUnitInverse(1)));
    }

    #[test]
    fn precision_ledger() {
        let a = s(5);
        let b = s(10);
        // 5 * 10 = 50 known mod 5^4
        let c = a.mul(&b);
        assert_eq!((c.value(), c.precision()), (50, 4));
        let d = c.div_p_pow(2).unwrap();
        assert_eq!((d.value(), d.precision()), (2, 2));
        assert!(matches!(
            s(25).div_p_pow(3),
            Err(Error::PrecisionExhausted(_))
        ));
        assert!(matches!(s(5).div_p_pow(2), Err(Error::NonDivisible(_))));
    }

    #[test]
    fn teichmuller_values() {
        assert_eq!(s(1).teichmuller().unwrap().value(), 1);
        assert_eq!(s(4).teichmuller().unwrap().value(), 124);
        let w = s(2).teichmuller().unwrap();
        assert_eq!(w.value(), 57);
        assert_eq!(w.mul(&w).value(), 124);
    }

    #[test]
    fn log_exp() {
        let p = 5;
        let u = PadicScalar::new(6, p, 10);
        assert!(u.pow(1).log().unwrap().agrees(&u.log().unwrap()));
        assert!(u.pow(2).log().unwrap().agrees(&u.log().unwrap().mul_int(2)));
        let back = u.log().unwrap().exp().unwrap();
        assert!(back.agrees(&u));
        assert_eq!(back.precision(), 10);
        assert!(PadicScalar::one(p, 10).log().unwrap().is_zero());
        assert!(matches!(
            PadicScalar::new(2, p, 5).log(),
            Err(Error::ConvergenceDomain(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let a = PadicScalar::new(-7, 7, 4);
        let j = ScalarJson::from(&a);
        assert_eq!(j.coeffs, vec!["2394".to_string()]);
        assert_eq!(PadicScalar::try_from(&j).unwrap(), a);
    }
}
