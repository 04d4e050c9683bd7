use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::fpoly::{self, Poly};
use super::{LocalScalar, PadicScalar, ScalarJson};
use crate::arith::{
    checked_pow, factor, inv_mod, max_precision, mul_mod, mult_order, primitive_root, reduce_i64,
    val,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `Z_p[zeta_d]` with `p` not dividing `d`; the generator is `zeta_d` itself.
    Cyclotomic { order: u64 },
    /// `Z_p[x]/(h)` for an arbitrary monic `h`.
    Custom,
}

/// A finite free `Z_p`-algebra `Z_p[y]/(g)`, with `g` known modulo `p^cap`.
pub struct ExtRing {
    prime: u64,
    cap: u32,
    modulus: Vec<u64>,
    kind: RingKind,
    ppow: Vec<u64>,
    /// `y^(deg+k)` reduced, for `k < deg - 1`
    reduction: Vec<Vec<u64>>,
    /// `zeta^e` for `e < order` (cyclotomic only)
    roots: Vec<Vec<u64>>,
}

impl PartialEq for ExtRing {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime
            && self.cap == other.cap
            && self.modulus == other.modulus
            && self.kind == other.kind
    }
}

impl Eq for ExtRing {}

impl fmt::Debug for ExtRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtRing")
            .field("prime", &self.prime)
            .field("degree", &self.degree())
            .field("kind", &self.kind)
            .field("cap", &self.cap)
            .finish()
    }
}

/// Same ring, by identity or by presentation.
pub(crate) fn same_ring(a: &Arc<ExtRing>, b: &Arc<ExtRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ExtRing {
    /// `Z_p` itself.
    pub fn zp(p: u64, cap: u32) -> Arc<ExtRing> {
        Self::cyclotomic(p, 1, cap)
    }

    /// `Z_p[zeta_d]`, presented by the minimal polynomial of a Teichmuller
    /// lift of a primitive `d`-th root of unity of `F_(p^f)`.
    pub fn cyclotomic(p: u64, d: u64, cap: u32) -> Arc<ExtRing> {
        assert!(!d.is_multiple_of(p), "ramified order");
        assert!(cap >= 1 && cap <= max_precision(p));
        let q = checked_pow(p, cap).unwrap();
        let f = mult_order(p % d.max(1), d) as usize;
        let modulus = if f == 1 {
            let g = primitive_root(p);
            let z = PadicScalar::from_u64(crate::arith::pow_mod(g, (p - 1) / d, p), p, cap)
                .teichmuller()
                .expect("unit");
            vec![(q - z.value()) % q, 1]
        } else {
            let h = irreducible(p, f);
            let b = element_of_order(p, f, d, &h);
            let gbar = min_poly(p, f, &b, &h);
            teichmuller_min_poly(p, f, &gbar, cap)
        };
        let mut ring = Self::bare(p, modulus, cap, RingKind::Cyclotomic { order: d });
        let gen = if f == 1 {
            vec![(q - ring.modulus[0]) % q]
        } else {
            ring.basis_vec(1)
        };
        let mut roots = Vec::with_capacity(d as usize);
        let mut cur = ring.basis_vec(0);
        for _ in 0..d {
            roots.push(cur.clone());
            cur = ring.raw_mul(&cur, &gen, q);
        }
        assert_eq!(cur, ring.basis_vec(0), "generator has the wrong order");
        ring.roots = roots;
        Arc::new(ring)
    }

    /// `Z_p[x]/(h)` for a monic integer polynomial `h` (low degree first).
    pub fn custom(p: u64, h: &[i64], cap: u32) -> Arc<ExtRing> {
        assert_eq!(*h.last().unwrap(), 1, "monic modulus expected");
        assert!(h.len() >= 2);
        let q = checked_pow(p, cap).unwrap();
        let modulus = h.iter().map(|&c| reduce_i64(c, q)).collect();
        Arc::new(Self::bare(p, modulus, cap, RingKind::Custom))
    }

    fn bare(p: u64, modulus: Vec<u64>, cap: u32, kind: RingKind) -> ExtRing {
        let ppow = (0..=cap).map(|k| checked_pow(p, k).unwrap()).collect();
        let deg = modulus.len() - 1;
        let q = checked_pow(p, cap).unwrap();
        let mut reduction = Vec::new();
        if deg >= 2 {
            let mut cur: Vec<u64> = modulus[..deg].iter().map(|&c| (q - c) % q).collect();
            for _ in 0..deg - 1 {
                reduction.push(cur.clone());
                // multiply by y and reduce
                let top = cur[deg - 1];
                let mut next = vec![0u64; deg];
                for i in (1..deg).rev() {
                    next[i] = cur[i - 1];
                }
                for i in 0..deg {
                    next[i] = (next[i] + q - mul_mod(top, modulus[i], q)) % q;
                }
                cur = next;
            }
        }
        ExtRing {
            prime: p,
            cap,
            modulus,
            kind,
            ppow,
            reduction,
            roots: Vec::new(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.modulus
    }

    /// Order of the distinguished root of unity, for cyclotomic rings.
    pub fn root_order(&self) -> Option<u64> {
        match self.kind {
            RingKind::Cyclotomic { order } => Some(order),
            RingKind::Custom => None,
        }
    }

    pub fn is_unramified(&self) -> bool {
        matches!(self.kind, RingKind::Cyclotomic { .. })
    }

    pub(crate) fn ppow(&self, k: u32) -> u64 {
        self.ppow[k as usize]
    }

    fn basis_vec(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.degree()];
        v[i] = 1;
        v
    }

    /// Product of two coefficient vectors modulo `q`, reduced modulo `g`.
    pub(crate) fn raw_mul(&self, a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let d = self.degree();
        if d == 1 {
            return vec![mul_mod(a[0], b[0], q)];
        }
        let mut prod = vec![0u128; 2 * d - 1];
        let qq = q as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % qq;
            }
        }
        let mut out: Vec<u128> = prod[..d].to_vec();
        for k in 0..d - 1 {
            let c = prod[d + k];
            if c == 0 {
                continue;
            }
            for (i, &r) in self.reduction[k].iter().enumerate() {
                out[i] = (out[i] + c * (r as u128 % qq)) % qq;
            }
        }
        out.into_iter().map(|x| x as u64).collect()
    }
}

/// Deterministic search for a monic irreducible polynomial of degree `f` over `F_p`.
fn irreducible(p: u64, f: usize) -> Poly {
    let prime_divs: Vec<usize> = factor(f as u64)
        .into_iter()
        .map(|(q, _)| q as usize)
        .collect();
    let mut counter: u64 = 0;
    loop {
        counter += 1;
        let mut h = vec![0u64; f + 1];
        h[f] = 1;
        let mut c = counter;
        for slot in h.iter_mut().take(f) {
            *slot = c % p;
            c /= p;
        }
        if h[0] == 0 {
            continue;
        }
        // x^(p^j) mod h for j = 0..=f
        let pb = BigUint::from(p);
        let mut xs = vec![fpoly::rem_monic(&vec![0, 1], &h, p)];
        for j in 1..=f {
            let next = fpoly::powmod(&xs[j - 1], &pb, &h, p);
            xs.push(next);
        }
        let x = fpoly::rem_monic(&vec![0, 1], &h, p);
        if xs[f] != x {
            continue;
        }
        let ok = prime_divs.iter().all(|&q| {
            let diff = fpoly::sub(&xs[f / q], &x, p);
            let g = fpoly::gcd_field(&diff, &h, p);
            fpoly::degree(&g) == 0
        });
        if ok {
            return h;
        }
    }
}

fn element_of_order(p: u64, f: usize, d: u64, h: &Poly) -> Poly {
    let group = BigUint::from(p).pow(f as u32) - BigUint::one();
    let cof = &group / BigUint::from(d);
    let qs: Vec<u64> = factor(d).into_iter().map(|(q, _)| q).collect();
    let one = fpoly::rem_monic(&vec![1], h, p);
    let mut counter: u64 = 0;
    loop {
        counter += 1;
        let mut a = vec![0u64; f];
        let mut c = counter;
        for slot in a.iter_mut() {
            *slot = c % p;
            c /= p;
        }
        if fpoly::is_zero(&a) {
            continue;
        }
        let b = fpoly::powmod(&a, &cof, h, p);
        if qs
            .iter()
            .all(|&q| fpoly::powmod(&b, &BigUint::from(d / q), h, p) != one)
        {
            return b;
        }
    }
}

/// Minimal polynomial over `F_p` of `b` in `F_p[x]/(h)`, as the product of its conjugates.
fn min_poly(p: u64, f: usize, b: &Poly, h: &Poly) -> Poly {
    poly_of_conjugates(
        f,
        b,
        |x, y| fpoly::mulmod(x, y, h, p),
        |x| fpoly::powmod(x, &BigUint::from(p), h, p),
        p,
    )
}

fn poly_of_conjugates(
    f: usize,
    root: &[u64],
    mulf: impl Fn(&Poly, &Poly) -> Poly,
    frob: impl Fn(&Poly) -> Poly,
    q: u64,
) -> Poly {
    // coefficients in the algebra, low degree first
    let zero = vec![0u64; root.len()];
    let mut one = zero.clone();
    one[0] = 1;
    let mut coeffs: Vec<Poly> = vec![one];
    let mut conj = root.to_vec();
    for _ in 0..f {
        let mut next = vec![zero.clone(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            let shifted = &mut next[k + 1];
            for i in 0..c.len() {
                shifted[i] = (shifted[i] + c[i]) % q;
            }
            let t = mulf(c, &conj);
            for i in 0..t.len() {
                next[k][i] = (next[k][i] + q - t[i] % q) % q;
            }
        }
        coeffs = next;
        conj = frob(&conj);
    }
    coeffs
        .into_iter()
        .map(|c| {
            assert!(
                c[1..].iter().all(|&x| x == 0),
                "conjugate product is not rational"
            );
            c[0]
        })
        .collect()
}

/// Lift `gbar` to the minimal polynomial over `Z/p^cap` of the Teichmuller
/// lift of its root.
fn teichmuller_min_poly(p: u64, f: usize, gbar: &Poly, cap: u32) -> Poly {
    let q = checked_pow(p, cap).unwrap();
    let g: Poly = gbar.clone();
    let pb = BigUint::from(p);
    let frob = |y: &Poly| fpoly::powmod(y, &pb, &g, q);
    let mut y = fpoly::rem_monic(&vec![0, 1], &g, q);
    for _ in 0..cap {
        for _ in 0..f {
            y = frob(&y);
        }
    }
    poly_of_conjugates(f, &y, |a, b| fpoly::mulmod(a, b, &g, q), frob, q)
}

/// An element of an [`ExtRing`], known modulo `p^precision`.
#[derive(Clone)]
pub struct ExtScalar {
    ring: Arc<ExtRing>,
    coeffs: Vec<u64>,
    precision: u32,
}

impl PartialEq for ExtScalar {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring)
            && self.precision == other.precision
            && self.coeffs == other.coeffs
    }
}

impl Eq for ExtScalar {}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            return write!(
                f,
                "{} + O({}^{})",
                self.coeffs[0], self.ring.prime, self.precision
            );
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*y"),
                _ => format!("{c}*y^{i}"),
            })
            .collect();
        let body = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        write!(f, "{body} + O({}^{})", self.ring.prime, self.precision)
    }
}

impl ExtScalar {
    fn q(&self) -> u64 {
        self.ring.ppow(self.precision)
    }

    /// Build from integer coefficients in the basis `1, y, ..., y^(d-1)`.
    pub fn from_coeffs(ring: &Arc<ExtRing>, coeffs: &[i64], precision: u32) -> Self {
        assert!(precision <= ring.cap, "precision above ring cap");
        let d = ring.degree();
        assert!(coeffs.len() <= d);
        let q = ring.ppow(precision);
        let mut c = vec![0u64; d];
        for (i, &x) in coeffs.iter().enumerate() {
            c[i] = reduce_i64(x, q);
        }
        ExtScalar {
            ring: ring.clone(),
            coeffs: c,
            precision,
        }
    }

    pub(crate) fn from_raw(ring: &Arc<ExtRing>, coeffs: Vec<u64>, precision: u32) -> Self {
        let q = ring.ppow(precision);
        ExtScalar {
            ring: ring.clone(),
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
            precision,
        }
    }

    pub fn zero(ring: &Arc<ExtRing>, precision: u32) -> Self {
        Self::from_coeffs(ring, &[], precision)
    }

    pub fn one(ring: &Arc<ExtRing>, precision: u32) -> Self {
        Self::from_coeffs(ring, &[1], precision)
    }

    pub fn from_int(ring: &Arc<ExtRing>, n: i64, precision: u32) -> Self {
        Self::from_coeffs(ring, &[n], precision)
    }

    pub fn from_padic(ring: &Arc<ExtRing>, a: &PadicScalar) -> Self {
        assert_eq!(ring.prime, a.prime());
        let mut c = vec![0u64; ring.degree()];
        c[0] = a.value();
        Self::from_raw(ring, c, a.precision().min(ring.cap))
    }

    /// `zeta^e` for the distinguished root of unity of a cyclotomic ring.
    pub fn root_of_unity(ring: &Arc<ExtRing>, e: i64, precision: u32) -> Self {
        let d = ring.root_order().expect("cyclotomic ring") as i64;
        let v = ring.roots[e.rem_euclid(d) as usize].clone();
        Self::from_raw(ring, v, precision)
    }

    pub fn ring(&self) -> &Arc<ExtRing> {
        &self.ring
    }

    pub fn prime(&self) -> u64 {
        self.ring.prime
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Minimum coefficient valuation; equals the precision for zero.
    pub fn valuation(&self) -> u32 {
        let p = self.ring.prime;
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| val(c, p))
            .min()
            .unwrap_or(self.precision)
            .min(self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.precision > 0 && self.reduce(1).inverse().is_ok()
    }

    /// The value as an element of `Z_p`, if it lies there.
    pub fn to_padic(&self) -> Option<PadicScalar> {
        if self.coeffs[1..].iter().any(|&c| c != 0) {
            return None;
        }
        Some(PadicScalar::from_u64(
            self.coeffs[0],
            self.ring.prime,
            self.precision,
        ))
    }

    pub fn reduce(&self, m: u32) -> Self {
        let m = m.min(self.precision);
        Self::from_raw(&self.ring, self.coeffs.clone(), m)
    }

    /// Claim a higher precision for a value known to be exact (e.g. an integer).
    pub fn assume_exact(&self, m: u32) -> Self {
        ExtScalar {
            ring: self.ring.clone(),
            coeffs: self.coeffs.clone(),
            precision: m.min(self.ring.cap),
        }
    }

    pub fn agrees(&self, other: &Self) -> bool {
        self.check(other);
        let m = self.precision.min(other.precision);
        self.reduce(m).coeffs == other.reduce(m).coeffs
    }

    fn check(&self, other: &Self) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "operands live in different rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let m = self.precision.min(other.precision);
        let q = self.ring.ppow(m);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a % q + b % q) % q)
            .collect();
        ExtScalar {
            ring: self.ring.clone(),
            coeffs,
            precision: m,
        }
    }

    pub fn neg(&self) -> Self {
        let q = self.q();
        let coeffs = self.coeffs.iter().map(|&a| (q - a) % q).collect();
        ExtScalar {
            ring: self.ring.clone(),
            coeffs,
            precision: self.precision,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let m = (self.precision + other.valuation())
            .min(other.precision + self.valuation())
            .min(self.ring.cap);
        let q = self.ring.ppow(m);
        ExtScalar {
            ring: self.ring.clone(),
            coeffs: self.ring.raw_mul(&self.coeffs, &other.coeffs, q),
            precision: m,
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let q = self.q();
        let kk = reduce_i64(k, q);
        let coeffs = self.coeffs.iter().map(|&a| mul_mod(a, kk, q)).collect();
        ExtScalar {
            ring: self.ring.clone(),
            coeffs,
            precision: self.precision,
        }
    }

    pub fn mul_padic(&self, a: &PadicScalar) -> Self {
        self.mul(&Self::from_padic(&self.ring, a))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring, self.precision);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit, by solving `a z = 1` with unit pivots.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.ring.degree();
        let q = self.q();
        if self.precision == 0 {
            return Err(Error::PrecisionExhausted("inverse at precision 0".into()));
        }
        if d == 1 {
            return inv_mod(self.coeffs[0], q)
                .map(|z| ExtScalar {
                    ring: self.ring.clone(),
                    coeffs: vec![z],
                    precision: self.precision,
                })
                .ok_or(Error::NonUnitInverse(self.valuation()));
        }
        // columns: a * y^j
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            cols.push(self.ring.raw_mul(&self.coeffs, &self.ring.basis_vec(j), q));
        }
        // augmented rows
        let mut rows: Vec<Vec<u64>> = (0..d)
            .map(|i| {
                let mut r: Vec<u64> = (0..d).map(|j| cols[j][i]).collect();
                r.push(if i == 0 { 1 } else { 0 });
                r
            })
            .collect();
        let p = self.ring.prime;
        for c in 0..d {
            let piv = (c..d)
                .find(|&r| !rows[r][c].is_multiple_of(p))
                .ok_or(Error::NonUnitInverse(self.valuation()))?;
            rows.swap(c, piv);
            let inv = inv_mod(rows[c][c], q).unwrap();
            for x in rows[c].iter_mut() {
                *x = mul_mod(*x, inv, q);
            }
            for r in 0..d {
                if r != c && rows[r][c] != 0 {
                    let f = rows[r][c];
                    for k in 0..=d {
                        rows[r][k] = (rows[r][k] + q - mul_mod(f, rows[c][k], q)) % q;
                    }
                }
            }
        }
        let coeffs = rows.iter().map(|r| r[d]).collect();
        Ok(ExtScalar {
            ring: self.ring.clone(),
            coeffs,
            precision: self.precision,
        })
    }

    /// Exact division by `p^k`.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
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
        let pk = self.ring.ppow(k);
        let coeffs = self.coeffs.iter().map(|&c| c / pk).collect();
        Ok(ExtScalar {
            ring: self.ring.clone(),
            coeffs,
            precision: self.precision - k,
        })
    }

    /// Exact division for unramified rings, where every nonzero element is `p^v` times a unit.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other);
        let v = other.valuation();
        if v >= other.precision {
            return Err(Error::NonDivisible("division by zero".into()));
        }
        let unit = other.div_p_pow(v)?.inverse()?;
        let quotient = self.div_p_pow(v)?;
        Ok(quotient.mul(&unit))
    }

    pub fn div_int(&self, k: i64) -> Result<Self> {
        assert!(k != 0);
        let p = self.ring.prime;
        let v = val(k.unsigned_abs(), p);
        let unit = k / p.pow(v) as i64;
        let r = self.div_p_pow(v)?;
        let q = r.q();
        let inv = inv_mod(reduce_i64(unit, q), q).expect("unit");
        Ok(r.mul_int(inv as i64))
    }

    /// Frobenius `zeta -> zeta^p` on a cyclotomic ring.
    pub fn frobenius(&self) -> Self {
        self.frobenius_pow(1)
    }

    pub fn frobenius_pow(&self, k: i64) -> Self {
        let d = self
            .ring
            .root_order()
            .expect("Frobenius needs a cyclotomic ring");
        let f = self.ring.degree() as i64;
        if f == 1 {
            return self.clone();
        }
        let k = k.rem_euclid(f) as u64;
        let q = self.q();
        let e = crate::arith::pow_mod(self.ring.prime, k, d);
        let mut out = vec![0u64; self.ring.degree()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let img = &self.ring.roots[((i as u64 * e) % d) as usize];
            for (j, &r) in img.iter().enumerate() {
                out[j] = (out[j] + mul_mod(c, r % q, q)) % q;
            }
        }
        ExtScalar {
            ring: self.ring.clone(),
            coeffs: out,
            precision: self.precision,
        }
    }

    /// Trace down to `Z_p` (sum of Frobenius conjugates).
    pub fn trace(&self) -> PadicScalar {
        let f = self.ring.degree() as i64;
        let mut acc = self.clone();
        for k in 1..f {
            acc = acc.add(&self.frobenius_pow(k));
        }
        acc.to_padic().expect("trace is rational")
    }

    /// Teichmuller representative of a unit.
    pub fn teichmuller(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnitInverse(self.valuation()));
        }
        let pf = self.ring.prime.pow(self.ring.degree() as u32);
        let mut x = self.clone();
        for _ in 0..self.precision {
            x = x.pow(pf);
        }
        Ok(x.reduce(self.precision).assume_exact(self.precision))
    }

    /// `log` of a 1-unit.
    pub fn log(&self) -> Result<Self> {
        super::log_one_unit(self)
    }

    /// Iwasawa logarithm of a unit of an unramified ring: `log(u^(q-1))/(q-1)`.
    pub fn log_unit(&self) -> Result<Self> {
        let qm1 = self.ring.prime.pow(self.ring.degree() as u32) - 1;
        self.pow(qm1).log()?.div_int(qm1 as i64)
    }

    pub fn exp(&self) -> Result<Self> {
        super::exp_series(self)
    }

    pub fn to_json(&self) -> ScalarJson {
        ScalarJson {
            prime: self.ring.prime,
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(ring: &Arc<ExtRing>, j: &ScalarJson) -> Result<Self> {
        if j.prime != ring.prime || j.coeffs.len() != ring.degree() {
            return Err(Error::IncompatibleRings);
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| {
                c.parse::<u64>()
                    .map_err(|_| Error::Invalid(format!("bad integer {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_raw(ring, coeffs, j.precision.min(ring.cap)))
    }
}

impl LocalScalar for ExtScalar {
    fn prime(&self) -> u64 {
        self.ring.prime
    }
    fn precision(&self) -> u32 {
        self.precision
    }
    fn valuation(&self) -> u32 {
        ExtScalar::valuation(self)
    }
    fn zero_like(&self) -> Self {
        Self::zero(&self.ring, self.precision)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.ring, self.precision)
    }
    fn add(&self, o: &Self) -> Self {
        ExtScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ExtScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ExtScalar::mul(self, o)
    }
    fn div_int(&self, k: i64) -> Result<Self> {
        ExtScalar::div_int(self, k)
    }
    fn reduce(&self, m: u32) -> Self {
        ExtScalar::reduce(self, m)
    }
    fn residue_is_one(&self) -> bool {
        self.precision > 0 && self.sub(&self.one_like()).valuation() >= 1
    }
}

impl std::ops::Add for &ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: &ExtScalar) -> ExtScalar {
        ExtScalar::add(self, o)
    }
}

impl std::ops::Sub for &ExtScalar {
    type Output = ExtScalar;
    fn sub(self, o: &ExtScalar) -> ExtScalar {
        ExtScalar::sub(self, o)
    }
}

impl std::ops::Mul for &ExtScalar {
    type Output = ExtScalar;
    fn mul(self, o: &ExtScalar) -> ExtScalar {
        ExtScalar::mul(self, o)
    }
}

impl std::ops::Neg for &ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        ExtScalar::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_roots_have_exact_order() {
        for &(p, d) in &[(5u64, 3u64), (5, 13), (7, 9), (5, 156), (11, 4), (13, 12)] {
            let r = ExtRing::cyclotomic(p, d, 8);
            assert_eq!(r.degree() as u64, mult_order(p % d, d));
            let z = ExtScalar::root_of_unity(&r, 1, 8);
            assert_eq!(z.pow(d), ExtScalar::one(&r, 8));
            for (q, _) in factor(d) {
                assert_ne!(z.pow(d / q), ExtScalar::one(&r, 8));
            }
        }
    }

    #[test]
    fn frobenius_is_an_automorphism_of_order_f() {
        let r = ExtRing::cyclotomic(5, 13, 6);
        let a = ExtScalar::from_coeffs(&r, &[3, -1, 7, 2], 6);
        let b = ExtScalar::from_coeffs(&r, &[1, 4, 0, -9], 6);
        assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
        assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
        assert_eq!(a.frobenius_pow(4), a);
        assert_ne!(a.frobenius(), a);
        // Frobenius is congruent to the p-th power mod p
        assert!(a.frobenius().reduce(1).agrees(&a.pow(5).reduce(1)));
    }

    #[test]
    fn inverse_and_division() {
        let r = ExtRing::cyclotomic(7, 9, 5);
        let a = ExtScalar::from_coeffs(&r, &[2, 1, 0], 5);
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), ExtScalar::one(&r, 5));
        let b = a.mul_int(49);
        assert_eq!(b.div(&a.mul_int(7)).unwrap().precision(), 4);
        assert!(ExtScalar::from_coeffs(&r, &[7, 14, 0], 5)
            .inverse()
            .is_err());
    }

    #[test]
    fn group_ring_units() {
        // Z_5[x]/(x^5 - 1) is local: units are the elements with augmentation prime to 5
        let r = ExtRing::custom(5, &[-1, 0, 0, 0, 0, 1], 4);
        let u = ExtScalar::from_coeffs(&r, &[1, 1, 0, 0, 0], 4);
        let w = ExtScalar::from_coeffs(&r, &[1, -1, 0, 0, 0], 4);
        assert!(u.is_unit());
        assert!(!w.is_unit());
        assert_eq!(u.mul(&u.inverse().unwrap()), ExtScalar::one(&r, 4));
    }

    #[test]
    fn teichmuller_in_extension() {
        let r = ExtRing::cyclotomic(5, 3, 6);
        let a = ExtScalar::from_coeffs(&r, &[2, 3], 6);
        let w = a.teichmuller().unwrap();
        assert_eq!(w.pow(24), ExtScalar::one(&r, 6));
        assert!(w.reduce(1).agrees(&a.reduce(1)));
    }

    #[test]
    fn extension_log_is_additive() {
        let r = ExtRing::cyclotomic(5, 3, 8);
        let a = ExtScalar::from_coeffs(&r, &[1, 5], 8);
        let b = ExtScalar::from_coeffs(&r, &[6, 10], 8);
        let l = a.mul(&b).log().unwrap();
        assert!(l.agrees(&a.log().unwrap().add(&b.log().unwrap())));
        assert!(a.log().unwrap().exp().unwrap().agrees(&a));
    }
}
