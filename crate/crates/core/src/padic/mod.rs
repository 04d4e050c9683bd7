//! Precision-tracked arithmetic in `Z_p`, in unramified extensions
//! `Z_p[zeta_d]` (`p` not dividing `d`), in small custom algebras
//! `Z_p[x]/(h)`, and in the totally ramified `W[zeta_p]`.

mod fpoly;
mod ramified;
mod ring;
mod scalar;

pub use ramified::{RamRing, RamScalar};
pub(crate) use ring::same_ring;
pub use ring::{ExtRing, ExtScalar, RingKind};
pub use scalar::{PadicScalar, ScalarJson};

use crate::error::{Error, Result};

/// Operations shared by [`PadicScalar`] and [`ExtScalar`], enough to run
/// the logarithm and exponential series once for both.
pub trait LocalScalar: Clone + Sized {
    fn prime(&self) -> u64;
    fn precision(&self) -> u32;
    fn valuation(&self) -> u32;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div_int(&self, k: i64) -> Result<Self>;
    fn reduce(&self, m: u32) -> Self;
    /// Congruent to 1 modulo the maximal ideal.
    fn residue_is_one(&self) -> bool;
}

/// `log(u) = sum (-1)^(k+1) x^k / k` with `x = u - 1`.
pub(crate) fn log_one_unit<S: LocalScalar>(u: &S) -> Result<S> {
    if !u.residue_is_one() {
        return Err(Error::ConvergenceDomain("log needs a 1-unit".into()));
    }
    let m = u.precision();
    let x = u.sub(&u.one_like());
    let v = x.valuation();
    if v >= m {
        return Ok(u.zero_like());
    }
    let p = u.prime();
    let mut acc = u.zero_like();
    let mut pw = x.clone();
    let mut k: u64 = 1;
    // beyond this point every term has valuation >= m
    while (k as u32) * v < m + log_p_floor(k, p) {
        let term = pw.div_int(k as i64)?;
        acc = if k % 2 == 1 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
        pw = pw.mul(&x);
        k += 1;
    }
    Ok(acc.reduce(m))
}

/// `exp(x) = sum x^k / k!` for `v(x) >= 1`.
pub(crate) fn exp_series<S: LocalScalar>(x: &S) -> Result<S> {
    let m = x.precision();
    let v = x.valuation();
    if v == 0 {
        return Err(Error::ConvergenceDomain("exp needs v(x) > 1/(p-1)".into()));
    }
    let p = x.prime();
    let mut acc = x.one_like();
    let mut term = x.one_like();
    let mut k: u64 = 1;
    loop {
        // v(x^j/j!) >= j v - (j-1)/(p-1), increasing in j
        if k * v as u64 >= m as u64 && (k * v as u64 - m as u64) * (p - 1) >= k - 1 {
            break;
        }
        term = term.mul(x).div_int(k as i64)?;
        acc = acc.add(&term);
        k += 1;
    }
    Ok(acc.reduce(m))
}

fn log_p_floor(k: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut q = p;
    while q <= k {
        e += 1;
        q *= p;
    }
    e
}
