//! Machine-integer number theory used throughout: modular powers, valuations,
//! factorisation by trial division, primitive roots, Stirling numbers.

use num_integer::Integer;

/// `p^k`, or `None` on overflow.
pub fn checked_pow(p: u64, k: u32) -> Option<u64> {
    let mut r: u64 = 1;
    for _ in 0..k {
        r = r.checked_mul(p)?;
    }
    Some(r)
}

/// Largest `m` with `p^m < 2^62`, so sums of two residues never overflow.
pub fn max_precision(p: u64) -> u32 {
    let mut m = 0;
    let mut q: u64 = 1;
    while let Some(n) = q.checked_mul(p) {
        if n >= 1 << 62 {
            break;
        }
        q = n;
        m += 1;
    }
    m
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, m)`.
pub fn reduce_i64(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// p-adic valuation of a nonzero integer.
pub fn val(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Prime factorisation as `(prime, exponent)` pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n).iter().fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Multiplicative order of `a` modulo `m`.
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut k = 1;
    let mut x = a % m;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

/// Smallest primitive root of an odd prime power or of 2, 4.
pub fn primitive_root(m: u64) -> u64 {
    let phi = euler_phi(m);
    let qs: Vec<u64> = factor(phi).into_iter().map(|(q, _)| q).collect();
    (1..m)
        .find(|&g| g.gcd(&m) == 1 && qs.iter().all(|&q| pow_mod(g, phi / q, m) != 1))
        .expect("modulus has a primitive root")
}

/// `floor(log_p n)` for `n >= 1`.
pub fn ilog(mut n: u64, p: u64) -> u32 {
    assert!(n >= 1);
    let mut k = 0;
    while n >= p {
        n /= p;
        k += 1;
    }
    k
}

/// Stirling numbers of the second kind `S(n, k)` for `n, k <= bound`, reduced mod `m`.
pub fn stirling2_table(bound: usize, m: u64) -> Vec<Vec<u64>> {
    let mut s = vec![vec![0u64; bound + 1]; bound + 1];
    s[0][0] = 1 % m;
    for n in 1..=bound {
        for k in 1..=n {
            let t = mul_mod(k as u64 % m, s[n - 1][k], m) + s[n - 1][k - 1];
            s[n][k] = t % m;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_facts() {
        assert_eq!(inv_mod(2, 125), Some(63));
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(13), 12);
        assert_eq!(primitive_root(13), 2);
        assert_eq!(primitive_root(25), 2);
        assert_eq!(mult_order(5, 13), 4);
        assert_eq!(max_precision(5), 26);
        let s = stirling2_table(5, 1000);
        assert_eq!(s[5][2], 15);
        assert_eq!(s[4][3], 6);
    }
}
