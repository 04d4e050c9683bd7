//! Dense polynomials over `Z/q`, coefficients low degree first.

use num_bigint::BigUint;

use crate::arith::{inv_mod, mul_mod};

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(a: &mut Poly) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
}

pub(crate) fn is_zero(a: &Poly) -> bool {
    a.iter().all(|&c| c == 0)
}

pub(crate) fn degree(a: &Poly) -> usize {
    a.iter().rposition(|&c| c != 0).unwrap_or(0)
}

pub(crate) fn sub(a: &Poly, b: &Poly, q: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut r = vec![0; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        r[i] = (x + q - y) % q;
    }
    trim(&mut r);
    r
}

pub(crate) fn mul(a: &Poly, b: &Poly, q: u64) -> Poly {
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mul_mod(x, y, q)) % q;
        }
    }
    trim(&mut r);
    r
}

/// Remainder modulo a monic `h`.
pub(crate) fn rem_monic(a: &Poly, h: &Poly, q: u64) -> Poly {
    let d = h.len() - 1;
    let mut r = a.clone();
    if r.len() <= d {
        r.resize(d.max(1), 0);
        return r;
    }
    for i in (d..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        for j in 0..d {
            r[i - d + j] = (r[i - d + j] + q - mul_mod(c, h[j], q)) % q;
        }
        r[i] = 0;
    }
    r.truncate(d.max(1));
    r
}

pub(crate) fn mulmod(a: &Poly, b: &Poly, h: &Poly, q: u64) -> Poly {
    rem_monic(&mul(a, b, q), h, q)
}

pub(crate) fn powmod(a: &Poly, e: &BigUint, h: &Poly, q: u64) -> Poly {
    let mut acc: Poly = vec![1 % q];
    for i in (0..e.bits()).rev() {
        acc = mulmod(&acc, &acc, h, q);
        if e.bit(i) {
            acc = mulmod(&acc, a, h, q);
        }
    }
    rem_monic(&acc, h, q)
}

/// Remainder modulo an arbitrary nonzero `b` over the prime field `F_p`.
fn rem_field(a: &Poly, b: &Poly, p: u64) -> Poly {
    let db = degree(b);
    let lead_inv = inv_mod(b[db], p).expect("nonzero leading coefficient");
    let mut r = a.clone();
    trim(&mut r);
    while !is_zero(&r) && degree(&r) >= db {
        let dr = degree(&r);
        let c = mul_mod(r[dr], lead_inv, p);
        for j in 0..=db {
            r[dr - db + j] = (r[dr - db + j] + p - mul_mod(c, b[j], p)) % p;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn gcd_field(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    trim(&mut x);
    trim(&mut y);
    while !is_zero(&y) {
        let r = rem_field(&x, &y, p);
        x = y;
        y = r;
    }
    let d = degree(&x);
    let li = inv_mod(x[d], p).expect("nonzero");
    x.iter().map(|&c| mul_mod(c, li, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_rem() {
        // (x-1)(x-2) and (x-1)(x-3) over F_7
        let a = mul(&vec![6, 1], &vec![5, 1], 7);
        let b = mul(&vec![6, 1], &vec![4, 1], 7);
        let mut g = gcd_field(&a, &b, 7);
        trim(&mut g);
        assert_eq!(g, vec![6, 1]);
        // x^3 mod x^2 + 1 = -x
        assert_eq!(rem_monic(&vec![0, 0, 0, 1], &vec![1, 0, 1], 7), vec![0, 6]);
    }
}
