use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::arith::{factor, inv_mod, mul_mod, primitive_root};
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar};

/// Generators of `(Z/fZ)^x` with their orders, one cyclic factor per entry.
///
/// Factors appear in increasing order of the underlying prime; `2^e` with
/// `e >= 3` contributes `-1` and `5`.
pub fn unit_group_generators(f: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for (q, e) in factor(f) {
        let qe = q.pow(e);
        let rest = f / qe;
        let lift = |g: u64| crt_pair(g % qe, qe, 1 % rest, rest);
        if q == 2 {
            match e {
                1 => {}
                2 => out.push((lift(3), 2)),
                _ => {
                    out.push((lift(qe - 1), 2));
                    out.push((lift(5), qe / 4));
                }
            }
        } else {
            out.push((lift(primitive_root(qe)), qe / q * (q - 1)));
        }
    }
    out
}

fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if n == 1 {
        return a % m;
    }
    if m == 1 {
        return b % n;
    }
    // x = a + m * t with m t = b - a mod n
    let mi = inv_mod(m % n, n).expect("coprime moduli");
    let t = mul_mod((b + n - a % n) % n, mi, n);
    a + m * t
}

/// A Dirichlet character modulo `f` with values in `mu_K`.
///
/// The value at the `i`-th generator is `zeta_K^images[i]`; evaluation in a
/// cyclotomic ring of order `L` (with `K | L`) uses `zeta_L^(L/K)` for `zeta_K`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    gens: Vec<(u64, u64)>,
    images: Vec<u64>,
    table: Vec<Option<u64>>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.modulus == o.modulus && self.fractions() == o.fractions()
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    pub fn from_images(modulus: u64, order: u64, images: &[u64]) -> Result<Self> {
        if modulus == 0 || order == 0 {
            return Err(Error::ZeroIndex);
        }
        let gens = unit_group_generators(modulus);
        if gens.len() != images.len() {
            return Err(Error::Invalid(format!(
                "modulus {modulus} has {} generators, got {} images",
                gens.len(),
                images.len()
            )));
        }
        for (&(g, o), &e) in gens.iter().zip(images) {
            if !((e % order) * o).is_multiple_of(order) {
                return Err(Error::Invalid(format!(
                    "image zeta_{order}^{e} of {g} has order not dividing {o}"
                )));
            }
        }
        let images: Vec<u64> = images.iter().map(|e| e % order).collect();
        let table = build_table(modulus, order, &gens, &images);
        Ok(DirichletCharacter {
            modulus,
            order,
            gens,
            images,
            table,
        })
    }

    /// From reduced fractions `k/o`, meaning `chi(g_i) = zeta_o^k`.
    pub fn from_fractions(modulus: u64, fr: &[(u64, u64)]) -> Result<Self> {
        let order = fr.iter().fold(1u64, |acc, &(_, o)| acc.lcm(&o.max(1)));
        let images: Vec<u64> = fr
            .iter()
            .map(|&(k, o)| k % o.max(1) * (order / o.max(1)))
            .collect();
        Self::from_images(modulus, order, &images)
    }

    /// From a full exponent table indexed by residues mod `modulus`.
    pub fn from_table(modulus: u64, order: u64, table: &[Option<u64>]) -> Result<Self> {
        let gens = unit_group_generators(modulus);
        let images: Option<Vec<u64>> = gens.iter().map(|&(g, _)| table[g as usize]).collect();
        let images = images.ok_or_else(|| Error::Invalid("generator mapped to 0".into()))?;
        let chi = Self::from_images(modulus, order, &images)?;
        if chi.table.as_slice() != table {
            return Err(Error::Invalid("table is not multiplicative".into()));
        }
        Ok(chi)
    }

    pub fn trivial(modulus: u64) -> Self {
        let n = unit_group_generators(modulus).len();
        Self::from_images(modulus, 1, &vec![0; n]).expect("trivial character")
    }

    /// The Teichmueller character mod `p` with values in the cyclotomic ring.
    pub fn teichmuller(ring: &Arc<ExtRing>) -> Result<Self> {
        let p = ring.prime();
        let k = ring
            .root_order()
            .ok_or_else(|| Error::Invalid("ring has no distinguished root of unity".into()))?;
        if k % (p - 1) != 0 {
            return Err(Error::Invalid(format!(
                "ring order {k} not divisible by {}",
                p - 1
            )));
        }
        let g = primitive_root(p);
        let target = ExtScalar::from_int(ring, g as i64, 1);
        let step = k / (p - 1);
        let e = (0..p - 1)
            .map(|j| j * step)
            .find(|&e| ExtScalar::root_of_unity(ring, e as i64, 1).agrees(&target))
            .ok_or_else(|| Error::Invalid("no root of unity lifts the primitive root".into()))?;
        Self::from_images(p, k, &[e])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The `K` with values in `mu_K`.
    pub fn root_order(&self) -> u64 {
        self.order
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.gens
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    /// Exponent of `chi(a)`, `None` when `gcd(a, f) > 1`.
    pub fn exponent(&self, a: i64) -> Option<u64> {
        self.table[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn table(&self) -> &[Option<u64>] {
        &self.table
    }

    /// The exact order of the character.
    pub fn char_order(&self) -> u64 {
        let g = self.images.iter().fold(self.order, |acc, &e| acc.gcd(&e));
        self.order / g
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|&e| e == 0)
    }

    /// `chi(-1)` as `+1` or `-1`, read off the table.
    pub fn parity(&self) -> i8 {
        match self.exponent(-1) {
            Some(0) => 1,
            Some(e) if 2 * e == self.order => -1,
            other => panic!("chi(-1) has exponent {other:?}"),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    /// Reduced fractions `k/o` with `chi(g_i) = zeta_o^k`.
    pub fn fractions(&self) -> Vec<(u64, u64)> {
        self.images
            .iter()
            .map(|&e| {
                let g = e.gcd(&self.order);
                (e / g, self.order / g)
            })
            .collect()
    }

    /// The same character with values viewed in `mu_L`, `K | L`.
    pub fn with_root_order(&self, l: u64) -> Self {
        assert_eq!(
            l % self.order,
            0,
            "root order {l} is not a multiple of {}",
            self.order
        );
        let s = l / self.order;
        let images: Vec<u64> = self.images.iter().map(|e| e * s).collect();
        let table = self.table.iter().map(|e| e.map(|e| e * s)).collect();
        DirichletCharacter {
            modulus: self.modulus,
            order: l,
            gens: self.gens.clone(),
            images,
            table,
        }
    }

    /// Same character with the smallest admissible root order.
    pub fn normalized(&self) -> Self {
        let k = self.char_order();
        let s = self.order / k;
        let images: Vec<u64> = self.images.iter().map(|e| e / s).collect();
        let table = self.table.iter().map(|e| e.map(|e| e / s)).collect();
        DirichletCharacter {
            modulus: self.modulus,
            order: k,
            gens: self.gens.clone(),
            images,
            table,
        }
    }

    /// The product character modulo `lcm` of the moduli.
    pub fn mul(&self, o: &Self) -> Self {
        let f = self.modulus.lcm(&o.modulus);
        let k = self.order.lcm(&o.order);
        let (sa, sb) = (k / self.order, k / o.order);
        let table: Vec<Option<u64>> = (0..f)
            .map(|a| {
                let x = self.table[(a % self.modulus) as usize]?;
                let y = o.table[(a % o.modulus) as usize]?;
                Some((x * sa + y * sb) % k)
            })
            .collect();
        Self::from_table(f, k, &table).expect("product of characters")
    }

    pub fn pow(&self, n: i64) -> Self {
        let k = self.order as i64;
        let images: Vec<u64> = self
            .images
            .iter()
            .map(|&e| (e as i64 * n).rem_euclid(k) as u64)
            .collect();
        Self::from_images(self.modulus, self.order, &images).expect("power of a character")
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// The character induced to modulus `m`, a multiple of the current one.
    pub fn induce(&self, m: u64) -> Self {
        assert_eq!(m % self.modulus, 0);
        self.mul(&Self::trivial(m))
    }

    /// Smallest `d | f` such that `chi` factors through `(Z/dZ)^x`.
    pub fn conductor(&self) -> u64 {
        let f = self.modulus;
        for d in crate::arith::divisors(f) {
            let trivial_on_kernel = (0..f)
                .filter(|&a| a % d == 1 % d && a.gcd(&f) == 1)
                .all(|a| self.table[a as usize] == Some(0));
            if trivial_on_kernel {
                return d;
            }
        }
        f
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let d = self.conductor();
        let mut table = vec![None; d as usize];
        for a in 0..self.modulus {
            if let Some(e) = self.table[a as usize] {
                table[(a % d) as usize] = Some(e);
            }
        }
        Self::from_table(d, self.order, &table).expect("primitive character")
    }

    /// The component on `(Z/dZ)^x` for a unitary divisor `d` of the modulus.
    pub fn component(&self, d: u64) -> Self {
        let f = self.modulus;
        assert!(
            f.is_multiple_of(d) && d.gcd(&(f / d)) == 1,
            "{d} is not a unitary divisor of {f}"
        );
        let table: Vec<Option<u64>> = (0..d)
            .map(|a| {
                if a.gcd(&d) != 1 {
                    return None;
                }
                let lift = crt_pair(a, d, 1 % (f / d), f / d);
                self.table[lift as usize]
            })
            .collect();
        Self::from_table(d, self.order, &table).expect("component character")
    }

    /// `chi(a)` in the cyclotomic ring at precision `m`.
    pub fn value(&self, ring: &Arc<ExtRing>, a: i64, m: u32) -> ExtScalar {
        match self.exponent(a) {
            None => ExtScalar::zero(ring, m),
            Some(e) => ExtScalar::root_of_unity(ring, (e * self.ring_scale(ring)) as i64, m),
        }
    }

    pub(crate) fn ring_scale(&self, ring: &ExtRing) -> u64 {
        let l = ring.root_order().expect("cyclotomic ring");
        assert_eq!(
            l % self.order,
            0,
            "ring order {l} cannot host values of order {}",
            self.order
        );
        l / self.order
    }

    /// `chi^(p^i)` for the Frobenius action on values.
    pub fn galois_conjugate(&self, p: u64, i: u32) -> Self {
        let mut c = self.clone();
        for _ in 0..i {
            c = c.pow(p as i64);
        }
        c
    }

    /// The orbit under `chi -> chi^p`, starting with `chi`.
    pub fn galois_orbit(&self, p: u64) -> Vec<Self> {
        let mut out = vec![self.clone()];
        loop {
            let next = out.last().unwrap().pow(p as i64);
            // when p divides the order the powers leave the orbit for good
            if next == *self || out.contains(&next) {
                return out;
            }
            out.push(next);
        }
    }

    /// The member of the Frobenius orbit with the smallest fraction list.
    pub fn orbit_representative(&self, p: u64) -> Self {
        let mut orbit = self.galois_orbit(p);
        orbit.sort_by_key(|c| c.fractions());
        orbit.swap_remove(0)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fractions()
            .iter()
            .map(|(k, o)| format!("{k}/{o}"))
            .collect();
        write!(f, "mod {} [{}]", self.modulus, parts.join(","))
    }
}

fn build_table(f: u64, k: u64, gens: &[(u64, u64)], images: &[u64]) -> Vec<Option<u64>> {
    let mut table = vec![None; f as usize];
    // walk the mixed-radix exponent vectors, tracking element and value
    let mut idx = vec![0u64; gens.len()];
    let mut elem = 1 % f;
    let mut val = 0u64;
    loop {
        table[elem as usize] = Some(val);
        let mut i = 0;
        loop {
            if i == gens.len() {
                return table;
            }
            idx[i] += 1;
            elem = mul_mod(elem, gens[i].0, f);
            val = (val + images[i]) % k;
            if idx[i] < gens[i].1 {
                break;
            }
            // wrapped: g_i^{o_i} = 1 and the value is back to where it started
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Parse a generator-image list such as `"1/3,0/1"`.
pub fn parse_fractions(s: &str) -> Result<Vec<(u64, u64)>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let (k, o) = part.split_once('/').unwrap_or((part, "1"));
            let k: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad image {part:?}")))?;
            let o: u64 = o
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad image {part:?}")))?;
            if o == 0 {
                return Err(Error::ZeroIndex);
            }
            Ok((k % o, o))
        })
        .collect()
}

pub fn format_fractions(fr: &[(u64, u64)]) -> String {
    fr.iter()
        .map(|(k, o)| format!("{k}/{o}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_have_stated_orders() {
        for f in [1u64, 2, 4, 8, 16, 24, 35, 65, 77, 100, 143] {
            let gens = unit_group_generators(f);
            let size: u64 = gens.iter().map(|g| g.1).product();
            assert_eq!(size, crate::arith::euler_phi(f), "f = {f}");
            for &(g, o) in &gens {
                assert_eq!(crate::arith::mult_order(g, f), o);
            }
        }
        assert_eq!(unit_group_generators(65).len(), 2);
    }

    #[test]
    fn table_is_multiplicative() {
        let chi = DirichletCharacter::from_images(65, 12, &[3, 1]).unwrap();
        for a in 0..65i64 {
            for b in 0..65i64 {
                let ab = chi.exponent(a * b);
                match (chi.exponent(a), chi.exponent(b)) {
                    (Some(x), Some(y)) => assert_eq!(ab, Some((x + y) % 12)),
                    _ => assert_eq!(ab, None),
                }
            }
        }
    }

    #[test]
    fn conductor_round_trip() {
        // a primitive quadratic character mod 13, induced to 65
        let chi = DirichletCharacter::from_images(13, 2, &[1]).unwrap();
        assert!(chi.is_primitive());
        let big = chi.induce(65);
        assert_eq!(big.conductor(), 13);
        assert_eq!(big.primitive(), chi);
        assert_eq!(big.component(13), chi);
        assert!(big.component(5).is_trivial());
    }

    #[test]
    fn parity_and_orbits() {
        let chi = DirichletCharacter::from_images(13, 12, &[1]).unwrap();
        assert_eq!(chi.parity(), -1);
        assert_eq!(chi.pow(2).parity(), 1);
        assert_eq!(chi.char_order(), 12);
        // 5^2 = 1 mod 12, so orbits have size 2
        assert_eq!(chi.galois_orbit(5).len(), 2);
        assert_eq!(
            chi.orbit_representative(5),
            chi.pow(5).orbit_representative(5)
        );
        let fr = chi.pow(4).fractions();
        assert_eq!(fr, vec![(1, 3)]);
        assert_eq!(
            DirichletCharacter::from_fractions(13, &fr).unwrap(),
            chi.pow(4)
        );
        assert_eq!(parse_fractions(&format_fractions(&fr)).unwrap(), fr);
    }

    #[test]
    fn teichmuller_reduces_to_identity() {
        let ring = ExtRing::cyclotomic(5, 4, 6);
        let w = DirichletCharacter::teichmuller(&ring).unwrap();
        for a in 1..5i64 {
            let v = w.value(&ring, a, 6);
            assert!(v.agrees(&ExtScalar::from_int(&ring, a, 1)));
            assert!(v.pow(4).agrees(&ExtScalar::one(&ring, 6)));
        }
        assert_eq!(w.parity(), -1);
        // omega values are the Teichmueller lifts computed independently
        let t = crate::padic::PadicScalar::new(2, 5, 6)
            .teichmuller()
            .unwrap();
        assert!(w
            .value(&ring, 2, 6)
            .agrees(&ExtScalar::from_padic(&ring, &t)));
    }
}
