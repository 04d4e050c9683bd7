use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::heilbronn::{merel, HeilbronnCache};
use super::oracle::{cusp_form_dimension, gamma1_genus};
use super::sparse::{FreeQuotient, SparseReducer};
use crate::arith::{inv_mod, is_prime, max_precision, pow_mod, primitive_root};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar};
use crate::presentation::{mulq, reduce_tracked, Track};

/// Largest prime below `2^31` that is `1` modulo `order`.
fn field_prime(order: u64) -> u64 {
    let bound = (1u64 << 31) - 1;
    let mut q = (bound - 1) / order * order + 1;
    while !is_prime(q) {
        q -= order;
    }
    q
}

/// Coefficients `Z/p^k` extended by the values of a character of order
/// `root_order`, written in coordinates over `Z/p^k`.
#[derive(Clone, Debug)]
pub struct SymbolRing {
    p: u64,
    k: u32,
    q: u64,
    degree: usize,
    root_order: u64,
    /// `zeta[e][j]`: coordinates of `b_j zeta^e` for the basis `b_j`
    zeta: Vec<Vec<Vec<u64>>>,
}

impl SymbolRing {
    /// A prime field `F_q` with `q < 2^31` containing the `root_order`-th
    /// roots of unity; ranks over it are the rational ranks unless `q`
    /// divides a torsion order of the presentation.
    pub fn rational(root_order: u64) -> Self {
        let q = field_prime(root_order);
        let z = pow_mod(primitive_root(q), (q - 1) / root_order, q);
        let zeta = (0..root_order)
            .map(|e| vec![vec![pow_mod(z, e, q)]])
            .collect();
        SymbolRing {
            p: q,
            k: 1,
            q,
            degree: 1,
            root_order,
            zeta,
        }
    }

    /// `Z_p[zeta_root_order] / p^k`.
    pub fn local(p: u64, k: u32, root_order: u64) -> Result<Self> {
        if !is_prime(p) || p < 3 || root_order.is_multiple_of(p) {
            return Err(Error::Invalid(format!(
                "p = {p} must be an odd prime not dividing {root_order}"
            )));
        }
        if k == 0 || k > max_precision(p) {
            return Err(Error::Invalid(format!("precision p^{k} out of range")));
        }
        let ring = ExtRing::cyclotomic(p, root_order, k);
        let r = ring.degree();
        let basis: Vec<ExtScalar> = (0..r)
            .map(|j| {
                let mut c = vec![0i64; r];
                c[j] = 1;
                ExtScalar::from_coeffs(&ring, &c, k)
            })
            .collect();
        let q = p.pow(k);
        let zeta = (0..root_order)
            .map(|e| {
                let z = ExtScalar::root_of_unity(&ring, e as i64, k);
                basis
                    .iter()
                    .map(|b| z.mul(b).coeffs().iter().map(|x| x % q).collect())
                    .collect()
            })
            .collect();
        Ok(SymbolRing {
            p,
            k,
            q,
            degree: r,
            root_order,
            zeta,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Rank of the coefficient ring over `Z/p^k`.
    pub fn degree(&self) -> usize {
        self.degree
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Full,
    Plus,
}

/// The group the symbols are taken for.
#[derive(Clone, Debug)]
pub enum Twist {
    /// `Gamma_1(M)`: pairs modulo `+-1`
    Gamma1,
    /// `Gamma_0(M)` with nebentypus: `[lu : lv] = eps(l) [u : v]`
    Character(DirichletCharacter),
}

const NOT_SYMBOL: u32 = u32::MAX;
const KILLED: u32 = u32::MAX - 1;

/// Classes of pairs under the scalar group, with the twist exponent of
/// each pair relative to its class representative.
#[derive(Clone, Debug)]
struct ClassTable {
    index: HashMap<(u64, u64), (u32, u32)>,
    reps: Vec<(u64, u64)>,
}

impl ClassTable {
    fn new() -> Self {
        ClassTable {
            index: HashMap::new(),
            reps: Vec::new(),
        }
    }
}

/// Weight-2 Manin symbols of level `M` modulo the two- and three-term
/// relations (and `[u:v] = [-u:v]` for the plus part), as a free module
/// over the coefficient ring.
///
/// The columns of the presentation are `b_j [rep]` for the class
/// representatives `rep` and the basis `b_j` of the coefficients; the
/// basis of the quotient is a subset of the columns.
#[derive(Clone, Debug)]
pub struct SymbolSpace {
    level: u64,
    sign: Sign,
    ring: SymbolRing,
    character: Option<DirichletCharacter>,
    /// `(lambda, exponent of eps(lambda))` over the scalar group
    scalars: Vec<(u64, u32)>,
    /// per pair `u M + v`: live representative and twist exponent
    lookup: Vec<(u32, u32)>,
    reps: Vec<(u64, u64)>,
    quotient: FreeQuotient,
    cusps: ClassTable,
    boundary: FreeQuotient,
    boundary_images: Vec<Vec<u64>>,
}

/// A linear operator on a [`SymbolSpace`], row `i` being the image of basis vector `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeOperator {
    pub label: String,
    pub modulus: u64,
    pub matrix: Vec<Vec<u64>>,
}

impl HeckeOperator {
    /// `v A`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let q = self.modulus;
        let n = self.matrix.first().map_or(0, |r| r.len());
        let mut out = vec![0u64; n];
        for (&c, row) in v.iter().zip(&self.matrix) {
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row) {
                *o = (*o + mulq(c, x, q)) % q;
            }
        }
        out
    }

    /// `self` followed by `o`.
    pub fn then(&self, o: &HeckeOperator) -> HeckeOperator {
        HeckeOperator {
            label: format!("{} {}", o.label, self.label),
            modulus: self.modulus,
            matrix: self.matrix.iter().map(|r| o.apply(r)).collect(),
        }
    }

    pub fn commutes_with(&self, o: &HeckeOperator) -> bool {
        self.then(o).matrix == o.then(self).matrix
    }

    pub fn is_identity(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == (i == j) as u64))
    }
}

/// The cuspidal subspace `ker(boundary)` in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Cuspidal {
    /// `p`-adic precision at which the basis is certified
    pub precision: u32,
    pub basis: Vec<Vec<u64>>,
    /// column of the leading unit of each basis row
    pub pivots: Vec<usize>,
    /// nonzero elementary divisors of the boundary map, as exponents
    pub boundary_exps: Vec<u32>,
    p: u64,
}

impl Cuspidal {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn q(&self) -> u64 {
        self.p.pow(self.precision)
    }

    /// Coordinates of an element of the cuspidal subspace.
    pub fn coordinates(&self, v: &[u64]) -> Vec<u64> {
        let q = self.q();
        self.pivots.iter().map(|&c| v[c] % q).collect()
    }

    /// Matrix of `op` on the cuspidal subspace; fails if `op` does not preserve it.
    pub fn restrict(&self, op: &HeckeOperator) -> Result<Vec<Vec<u64>>> {
        let q = self.q();
        let mut out = Vec::with_capacity(self.rank());
        for b in &self.basis {
            let img: Vec<u64> = op.apply(b).iter().map(|x| x % q).collect();
            let c = self.coordinates(&img);
            let mut rest = img.clone();
            for (t, &x) in c.iter().enumerate() {
                for (r, &y) in rest.iter_mut().zip(&self.basis[t]) {
                    *r = (*r + q - mulq(x, y, q)) % q;
                }
            }
            if rest.iter().any(|&x| x != 0) {
                return Err(Error::TraceNotZero(format!(
                    "{} does not preserve the cuspidal subspace",
                    op.label
                )));
            }
            out.push(c);
        }
        Ok(out)
    }
}

fn gcd3(u: u64, v: u64, m: u64) -> u64 {
    u.gcd(&v).gcd(&m)
}

impl SymbolSpace {
    pub fn build(level: u64, twist: Twist, ring: SymbolRing, sign: Sign) -> Result<Self> {
        if level < 3 {
            return Err(Error::Invalid(format!("level {level} must be at least 3")));
        }
        let m = level;
        let (character, scalars) = match twist {
            Twist::Gamma1 => (None, vec![(1, 0), (m - 1, 0)]),
            Twist::Character(eps) => {
                if eps.modulus() != m {
                    return Err(Error::Invalid(format!(
                        "character modulus {} is not the level {m}",
                        eps.modulus()
                    )));
                }
                if !eps.is_even() {
                    return Err(Error::OddCharacter);
                }
                let eps = eps.normalized();
                if !ring.root_order.is_multiple_of(eps.root_order()) {
                    return Err(Error::Invalid(
                        "the coefficient ring does not contain the character values".into(),
                    ));
                }
                let scale = ring.root_order / eps.root_order();
                let s = (1..m)
                    .filter_map(|l| eps.exponent(l as i64).map(|e| (l, (e * scale) as u32)))
                    .collect();
                (Some(eps), s)
            }
        };
        let mut space = SymbolSpace {
            level,
            sign,
            ring,
            character,
            scalars,
            lookup: Vec::new(),
            reps: Vec::new(),
            quotient: FreeQuotient {
                basis: Vec::new(),
                expr: Vec::new(),
            },
            cusps: ClassTable::new(),
            boundary: FreeQuotient {
                basis: Vec::new(),
                expr: Vec::new(),
            },
            boundary_images: Vec::new(),
        };
        space.enumerate();
        space.relate()?;
        space.build_boundary()?;
        Ok(space)
    }

    fn enumerate(&mut self) {
        let m = self.level;
        let ro = self.ring.root_order as u32;
        let mut lookup = vec![(NOT_SYMBOL, 0u32); (m * m) as usize];
        let mut killed = Vec::new();
        let mut reps = Vec::new();
        for u in 0..m {
            for v in 0..m {
                let i = (u * m + v) as usize;
                if lookup[i].0 != NOT_SYMBOL || gcd3(u, v, m) != 1 {
                    continue;
                }
                let idx = reps.len() as u32;
                reps.push((u, v));
                let mut dead = false;
                for &(l, e) in &self.scalars {
                    let j = ((l * u % m) * m + l * v % m) as usize;
                    if lookup[j].0 == NOT_SYMBOL {
                        lookup[j] = (idx, e);
                    } else if lookup[j] != (idx, e) && !(lookup[j].1 + ro - e).is_multiple_of(ro) {
                        dead = true;
                    }
                }
                killed.push(dead);
            }
        }
        // renumber the live classes
        let mut live = vec![KILLED; reps.len()];
        let mut out = Vec::new();
        for (i, r) in reps.iter().enumerate() {
            if !killed[i] {
                live[i] = out.len() as u32;
                out.push(*r);
            }
        }
        for x in lookup.iter_mut() {
            if x.0 != NOT_SYMBOL {
                x.0 = live[x.0 as usize];
            }
        }
        self.lookup = lookup;
        self.reps = out;
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn ring(&self) -> &SymbolRing {
        &self.ring
    }

    pub fn character(&self) -> Option<&DirichletCharacter> {
        self.character.as_ref()
    }

    /// Number of classes `[u:v]` not killed by the twist.
    pub fn num_generators(&self) -> usize {
        self.reps.len()
    }

    /// Rank of the relation quotient over `Z/p^k`.
    pub fn dim(&self) -> usize {
        self.quotient.basis.len()
    }

    fn q(&self) -> u64 {
        self.ring.q
    }

    /// Accumulate `coef b_j zeta^shift [u:v]` in the free columns.
    fn add_columns(
        &self,
        acc: &mut BTreeMap<usize, u64>,
        coef: u64,
        j: usize,
        shift: u32,
        u: u64,
        v: u64,
    ) {
        let m = self.level;
        let (rep, e) = self.lookup[((u % m) * m + v % m) as usize];
        if rep >= KILLED {
            return;
        }
        let q = self.q();
        let r = self.ring.degree;
        let z = &self.ring.zeta[((e + shift) as u64 % self.ring.root_order) as usize][j];
        for (i, &x) in z.iter().enumerate() {
            if x != 0 {
                let c = rep as usize * r + i;
                let t = acc.entry(c).or_insert(0);
                *t = (*t + mulq(coef, x, q)) % q;
            }
        }
    }

    /// Accumulate `coef b_j zeta^shift [u:v]` in the quotient basis.
    fn add_symbol(&self, acc: &mut [u64], coef: u64, j: usize, shift: u32, u: u64, v: u64) {
        let m = self.level;
        let (rep, e) = self.lookup[((u % m) * m + v % m) as usize];
        if rep >= KILLED {
            return;
        }
        let q = self.q();
        let r = self.ring.degree;
        let z = &self.ring.zeta[((e + shift) as u64 % self.ring.root_order) as usize][j];
        for (i, &x) in z.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let cx = mulq(coef, x, q);
            for &(pos, y) in &self.quotient.expr[rep as usize * r + i] {
                acc[pos] = (acc[pos] + mulq(cx, y, q)) % q;
            }
        }
    }

    fn reduce_int(&self, c: i64) -> u64 {
        c.rem_euclid(self.q() as i64) as u64
    }

    fn relate(&mut self) -> Result<()> {
        let m = self.level;
        let r = self.ring.degree;
        let mut red = SparseReducer::new(self.reps.len() * r, self.ring.p, self.q());
        let one = 1;
        let minus = self.q() - 1;
        let mut rows: Vec<BTreeMap<usize, u64>> = Vec::new();
        for &(u, v) in &self.reps {
            for j in 0..r {
                let mut row = BTreeMap::new();
                self.add_columns(&mut row, one, j, 0, u, v);
                self.add_columns(&mut row, one, j, 0, m - v % m, u);
                rows.push(row);
            }
        }
        for &(u, v) in &self.reps {
            for j in 0..r {
                let mut row = BTreeMap::new();
                self.add_columns(&mut row, one, j, 0, u, v);
                self.add_columns(&mut row, minus, j, 0, u, u + v);
                self.add_columns(&mut row, minus, j, 0, u + v, v);
                rows.push(row);
            }
        }
        if self.sign == Sign::Plus {
            for &(u, v) in &self.reps {
                for j in 0..r {
                    let mut row = BTreeMap::new();
                    self.add_columns(&mut row, one, j, 0, u, v);
                    self.add_columns(&mut row, minus, j, 0, (m - u) % m, v);
                    rows.push(row);
                }
            }
        }
        for row in rows {
            red.insert(row)?;
        }
        self.quotient = red.finish();
        Ok(())
    }

    /// Class of the cusp `a/c` with `a` taken modulo `gcd(c, M)`.
    fn cusp_class(&mut self, c: u64, a: u64) -> (u32, u32) {
        let m = self.level;
        let key = |c: u64, a: u64| {
            let c = c % m;
            let g = c.gcd(&m);
            (c, a % g)
        };
        let k0 = key(c, a);
        if let Some(&x) = self.cusps.index.get(&k0) {
            return x;
        }
        let ro = self.ring.root_order as u32;
        let idx = self.cusps.reps.len() as u32;
        let mut orbit = Vec::new();
        let mut dead = false;
        for &(l, e) in &self.scalars {
            let li = inv_mod(l, m).expect("unit");
            let k = key(l * k0.0, li * k0.1);
            match self.cusps.index.get(&k) {
                None => {
                    self.cusps.index.insert(k, (idx, e));
                    orbit.push(k);
                }
                Some(&(_, e2)) => {
                    if !(e2 + ro - e).is_multiple_of(ro) {
                        dead = true;
                    }
                }
            }
        }
        if dead {
            for k in orbit {
                self.cusps.index.insert(k, (KILLED, 0));
            }
            return (KILLED, 0);
        }
        self.cusps.reps.push(k0);
        (idx, 0)
    }

    /// The two cusps `g(infinity)` and `g(0)` for `g` with bottom row `(u, v)`.
    fn symbol_cusps(&self, u: u64, v: u64) -> ((u64, u64), (u64, u64)) {
        let m = self.level;
        let gu = u.gcd(&m);
        let gv = v.gcd(&m);
        let a = if gu == 1 {
            0
        } else {
            inv_mod(v % gu, gu).expect("coprime")
        };
        let b = if gv == 1 {
            0
        } else {
            (gv - inv_mod(u % gv, gv).expect("coprime")) % gv
        };
        ((u, a), (v, b))
    }

    fn build_boundary(&mut self) -> Result<()> {
        let m = self.level;
        let r = self.ring.degree;
        let q = self.q();
        let mut terms = Vec::with_capacity(self.reps.len());
        for i in 0..self.reps.len() {
            let (u, v) = self.reps[i];
            let (inf, zero) = self.symbol_cusps(u, v);
            terms.push((
                self.cusp_class(inf.0, inf.1),
                self.cusp_class(zero.0, zero.1),
            ));
        }
        let mut plus_rows = Vec::new();
        if self.sign == Sign::Plus {
            let reps = self.cusps.reps.clone();
            for &(c, a) in &reps {
                let (i0, _) = self.cusp_class(c, a);
                let (i1, e1) = self.cusp_class(c, (m - a) % m);
                plus_rows.push((i0, i1, e1));
            }
        }
        let ncols = self.cusps.reps.len() * r;
        let mut red = SparseReducer::new(ncols, self.ring.p, q);
        for (i0, i1, e1) in plus_rows {
            for j in 0..r {
                let mut row = vec![(i0 as usize * r + j, 1u64)];
                if i1 < KILLED {
                    let z = &self.ring.zeta[e1 as usize][j];
                    row.extend(
                        z.iter()
                            .enumerate()
                            .map(|(i, &x)| (i1 as usize * r + i, (q - x) % q)),
                    );
                }
                red.insert(row)?;
            }
        }
        self.boundary = red.finish();
        // boundary of b_j [rep] = b_j ({g(inf)} - {g(0)})
        let nb = self.boundary.basis.len();
        let mut images = vec![vec![0u64; nb]; self.dim()];
        for (pos, &col) in self.quotient.basis.iter().enumerate() {
            let (rep, j) = (col / r, col % r);
            let (inf, zero) = terms[rep];
            for (cls, sgn) in [(inf, 1u64), (zero, q - 1)] {
                if cls.0 >= KILLED {
                    continue;
                }
                let z = &self.ring.zeta[cls.1 as usize][j];
                for (i, &x) in z.iter().enumerate() {
                    for &(bpos, y) in &self.boundary.expr[cls.0 as usize * r + i] {
                        let t = &mut images[pos][bpos];
                        *t = (*t + mulq(mulq(sgn, x, q), y, q)) % q;
                    }
                }
            }
        }
        self.boundary_images = images;
        Ok(())
    }

    /// Number of cusp classes surviving the twist.
    pub fn num_cusps(&self) -> usize {
        self.cusps
            .index
            .values()
            .filter(|x| x.0 < KILLED)
            .map(|x| x.0)
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }

    /// Rank of the boundary symbols (after the plus relation when signed).
    pub fn boundary_dim(&self) -> usize {
        self.boundary.basis.len()
    }

    /// Boundary images of the basis vectors.
    pub fn boundary_matrix(&self) -> &[Vec<u64>] {
        &self.boundary_images
    }

    /// The element `[u:v]`.
    pub fn symbol(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        let m = self.level;
        if gcd3(u % m, v % m, m) != 1 {
            return Err(Error::Invalid(format!("({u}, {v}) is not in P^1(Z/{m})")));
        }
        let mut acc = vec![0u64; self.dim()];
        self.add_symbol(&mut acc, 1, 0, 0, u, v);
        Ok(acc)
    }

    /// `sum c [u:v]` for integer coefficients.
    pub fn chain(&self, terms: &[(i64, u64, u64)]) -> Result<Vec<u64>> {
        let q = self.q();
        let mut acc = vec![0u64; self.dim()];
        for &(c, u, v) in terms {
            for (a, x) in acc.iter_mut().zip(self.symbol(u, v)?) {
                *a = (*a + mulq(self.reduce_int(c), x, q)) % q;
            }
        }
        Ok(acc)
    }

    pub fn boundary_of(&self, v: &[u64]) -> Vec<u64> {
        let q = self.q();
        let mut out = vec![0u64; self.boundary_dim()];
        for (&c, row) in v.iter().zip(&self.boundary_images) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o = (*o + mulq(c, x, q)) % q;
            }
        }
        out
    }

    /// Image of `x` under the map sending `b_j [u:v]` to `sum c b_j zeta^s [u':v']`
    /// over the terms `(c, s, u', v')` of `f(u, v)`.
    pub fn apply_pairs(
        &self,
        x: &[u64],
        f: &impl Fn(u64, u64) -> Vec<(i64, u32, u64, u64)>,
    ) -> Vec<u64> {
        let (m, q, r) = (self.level, self.q(), self.ring.degree);
        let mut acc = vec![0u64; self.dim()];
        for (&col, &a) in self.quotient.basis.iter().zip(x) {
            if a == 0 {
                continue;
            }
            let (u, v) = self.reps[col / r];
            for (c, s, u2, v2) in f(u, v) {
                if gcd3(u2 % m, v2 % m, m) == 1 {
                    self.add_symbol(&mut acc, mulq(a, self.reduce_int(c), q), col % r, s, u2, v2);
                }
            }
        }
        acc
    }

    /// The operator given by [`SymbolSpace::apply_pairs`].
    pub fn pair_operator(
        &self,
        label: &str,
        f: impl Fn(u64, u64) -> Vec<(i64, u32, u64, u64)>,
    ) -> HeckeOperator {
        let d = self.dim();
        let matrix = (0..d)
            .map(|i| {
                let mut e = vec![0u64; d];
                e[i] = 1;
                self.apply_pairs(&e, &f)
            })
            .collect();
        HeckeOperator {
            label: label.into(),
            modulus: self.q(),
            matrix,
        }
    }

    /// Heilbronn terms of `T_l` applied to `(u, v)`.
    pub(crate) fn heilbronn_terms(&self, mats: &[[i64; 4]], u: u64, v: u64) -> Vec<(u64, u64)> {
        let m = self.level as i64;
        let (u, v) = (u as i64, v as i64);
        mats.iter()
            .map(|&[a, b, c, d]| {
                (
                    (u * a + v * c).rem_euclid(m) as u64,
                    (u * b + v * d).rem_euclid(m) as u64,
                )
            })
            .filter(|&(x, y)| gcd3(x, y, self.level) == 1)
            .collect()
    }

    pub(crate) fn heilbronn(
        &self,
        l: u64,
        cache: Option<&HeilbronnCache>,
    ) -> Result<Vec<[i64; 4]>> {
        if !is_prime(l) {
            return Err(Error::Invalid(format!("{l} is not prime")));
        }
        match cache {
            Some(c) => c.get(l),
            None => Ok(merel(l)),
        }
    }

    /// `T_l` for `l` not dividing the level, `U_l` otherwise.
    pub fn hecke(&self, l: u64, cache: Option<&HeilbronnCache>) -> Result<HeckeOperator> {
        let mats = self.heilbronn(l, cache)?;
        let label = if self.level.is_multiple_of(l) {
            format!("U{l}")
        } else {
            format!("T{l}")
        };
        Ok(self.pair_operator(&label, |u, v| {
            self.heilbronn_terms(&mats, u, v)
                .into_iter()
                .map(|(x, y)| (1, 0, x, y))
                .collect()
        }))
    }

    /// `<d> [u:v] = [du : dv]`.
    pub fn diamond(&self, d: u64) -> Result<HeckeOperator> {
        let m = self.level;
        if d.gcd(&m) != 1 {
            return Err(Error::Invalid(format!("{d} is not a unit mod {m}")));
        }
        let d = d % m;
        Ok(self.pair_operator(&format!("<{d}>"), |u, v| vec![(1, 0, d * u % m, d * v % m)]))
    }

    /// `[u:v] -> [-u:v]`.
    pub fn involution(&self) -> HeckeOperator {
        let m = self.level;
        self.pair_operator("iota", |u, v| vec![(1, 0, (m - u) % m, v)])
    }

    /// The Fricke involution `w`, for `Gamma_1(M)` or a real character.
    pub fn atkin_lehner(&self) -> Result<HeckeOperator> {
        if let Some(eps) = &self.character {
            if eps.char_order() > 2 {
                return Err(Error::Invalid(
                    "w maps eps-symbols to conjugate-eps-symbols".into(),
                ));
            }
        }
        let m = self.level as i64;
        Ok(self.pair_operator("w", |u, v| {
            let [a, b, c, d] = lift_to_sl2z(u as i64, v as i64, m);
            // w g {0 -> inf} = {-d/(M b) -> -c/(M a)}
            let from = (-d, m * b);
            let to = (-c, m * a);
            let mut out: Vec<(i64, u32, u64, u64)> = Vec::new();
            for (x, y, s) in manin_decomposition(to.0, to.1, m) {
                out.push((s, 0, x, y));
            }
            for (x, y, s) in manin_decomposition(from.0, from.1, m) {
                out.push((-s, 0, x, y));
            }
            out
        }))
    }

    /// Expected rank of the cuspidal subspace over `Z/p^k`.
    pub fn expected_cuspidal_rank(&self) -> usize {
        let dim = match &self.character {
            None => gamma1_genus(self.level) as usize,
            Some(eps) => cusp_form_dimension(eps) as usize,
        };
        let mult = if self.sign == Sign::Full { 2 } else { 1 };
        dim * mult * self.ring.degree
    }

    /// Kernel of the boundary map, certified against the dimension formula.
    pub fn cuspidal(&self) -> Result<Cuspidal> {
        let (p, k) = (self.ring.p, self.ring.k);
        let d = self.dim();
        let red = reduce_tracked(
            &self.boundary_images,
            self.boundary_dim(),
            p,
            k,
            Track {
                u: true,
                ..Track::default()
            },
        );
        let t = red.exps.iter().copied().max().unwrap_or(0);
        let s = d - red.exps.len();
        let expected = self.expected_cuspidal_rank();
        if s > expected {
            return Err(Error::Indeterminate(format!(
                "{} boundary divisors vanish modulo p^{k}; need more precision",
                s - expected
            )));
        }
        if s < expected {
            return Err(Error::TraceNotZero(format!(
                "cuspidal rank {s} below the dimension formula {expected}"
            )));
        }
        let precision = k - t;
        let qq = p.pow(precision);
        let mut basis: Vec<Vec<u64>> = red.u[red.exps.len()..]
            .iter()
            .map(|r| r.iter().map(|x| x % qq).collect())
            .collect();
        // reduced echelon form with unit pivots
        let mut pivots = Vec::new();
        for i in 0..basis.len() {
            let Some(c) = (0..d).find(|&c| !basis[i][c].is_multiple_of(p) && !pivots.contains(&c))
            else {
                return Err(Error::Indeterminate(
                    "the cuspidal subspace is not saturated at this precision".into(),
                ));
            };
            let w = inv_mod(basis[i][c], qq).expect("unit");
            for x in basis[i].iter_mut() {
                *x = mulq(*x, w, qq);
            }
            for i2 in 0..basis.len() {
                if i2 != i && basis[i2][c] != 0 {
                    let f = basis[i2][c];
                    let src = basis[i].clone();
                    for (x, y) in basis[i2].iter_mut().zip(&src) {
                        *x = (*x + qq - mulq(f, *y, qq)) % qq;
                    }
                }
            }
            pivots.push(c);
        }
        Ok(Cuspidal {
            precision,
            basis,
            pivots,
            boundary_exps: red.exps,
            p,
        })
    }

    /// `c^2 d^2 [u:v] - c^2 [u:dv] - d^2 [cu:v] + [cu:dv]`.
    pub fn cd_symbol(&self, c: u64, d: u64, u: u64, v: u64) -> Result<Vec<u64>> {
        self.chain(&cd_chain(self.level, c, d, u, v)?)
    }
}

/// The formal combination behind [`SymbolSpace::cd_symbol`].
pub fn cd_chain(level: u64, c: u64, d: u64, u: u64, v: u64) -> Result<Vec<(i64, u64, u64)>> {
    let m = level;
    if c <= 1 || d <= 1 || c.gcd(&(6 * m)) != 1 || d.gcd(&(6 * m)) != 1 {
        return Err(Error::InadmissiblePair(format!(
            "(c, d) = ({c}, {d}) must exceed 1 and be prime to 6M"
        )));
    }
    if gcd3(u % m, v % m, m) != 1 {
        return Err(Error::InadmissiblePair(format!(
            "({u}, {v}) is not in P^1(Z/{m})"
        )));
    }
    let (c2, d2) = ((c * c) as i64, (d * d) as i64);
    let (cu, dv) = (c % m * (u % m) % m, d % m * (v % m) % m);
    Ok(vec![
        (c2 * d2, u % m, v % m),
        (-c2, u % m, dv),
        (-d2, cu, v % m),
        (1, cu, dv),
    ])
}

/// A matrix in `SL_2(Z)` with bottom row congruent to `(u, v)` mod `M`.
pub fn lift_to_sl2z(u: i64, v: i64, m: i64) -> [i64; 4] {
    let c = if u.rem_euclid(m) == 0 {
        m
    } else {
        u.rem_euclid(m)
    };
    let mut d = v.rem_euclid(m);
    while c.gcd(&d) != 1 {
        d += m;
    }
    let e = c.extended_gcd(&d);
    // e.x c + e.y d = 1, so a = e.y, b = -e.x gives a d - b c = 1
    [e.y, -e.x, c, d]
}

/// `{0 -> x/y}` as Manin symbols `(u, v, sign)` through the continued fraction of `x/y`.
pub fn manin_decomposition(x: i64, y: i64, m: i64) -> Vec<(u64, u64, i64)> {
    let (mut x, mut y) = (x, y);
    if y < 0 {
        x = -x;
        y = -y;
    }
    let g = x.gcd(&y);
    if g == 0 {
        return Vec::new();
    }
    let (x, y) = (x / g, y / g);
    if y == 0 {
        return vec![(0, 1, 1)];
    }
    // convergents p_j / q_j, starting from 0/1 and 1/0
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut out = vec![(0u64, 1u64, 1i64)];
    let (mut a, mut b) = (x, y);
    while b != 0 {
        let t = a.div_euclid(b);
        let (p2, q2) = (t * p1 + p0, t * q1 + q0);
        let det = p2 * q1 - p1 * q2;
        out.push(((det * q2).rem_euclid(m) as u64, q1.rem_euclid(m) as u64, 1));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        (a, b) = (b, a - t * b);
    }
    out
}

/// The formal image `[u:v] -> (u, v)` modulo `(u, v) = -(v, u)`; pairs
/// `(u, u)` are 2-torsion and kept with coefficient `0` or `1`.
pub fn varpi_formal(level: u64, chain: &[(i64, u64, u64)]) -> Result<BTreeMap<(u64, u64), i64>> {
    let m = level;
    let mut out: BTreeMap<(u64, u64), i64> = BTreeMap::new();
    for &(c, u, v) in chain {
        let (u, v) = (u % m, v % m);
        if u == 0 || v == 0 {
            return Err(Error::ZeroIndex);
        }
        let (key, s) = if u <= v { ((u, v), c) } else { ((v, u), -c) };
        *out.entry(key).or_insert(0) += s;
    }
    for (k, c) in out.iter_mut() {
        if k.0 == k.1 {
            *c = c.rem_euclid(2);
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::oracle::gamma1_cusps;

    fn gamma1(m: u64, sign: Sign) -> SymbolSpace {
        SymbolSpace::build(m, Twist::Gamma1, SymbolRing::rational(2), sign).unwrap()
    }

    #[test]
    fn gamma1_dimensions() {
        for m in 3..=40 {
            let g = gamma1_genus(m) as usize;
            let full = gamma1(m, Sign::Full);
            assert_eq!(full.num_cusps(), gamma1_cusps(m) as usize, "{m}");
            assert_eq!(full.dim(), 2 * g + full.num_cusps() - 1, "{m}");
            assert_eq!(full.cuspidal().unwrap().rank(), 2 * g, "{m}");
            let plus = gamma1(m, Sign::Plus);
            assert_eq!(plus.cuspidal().unwrap().rank(), g, "{m}");
        }
    }

    #[test]
    fn hecke_eigenvalue_at_eleven() {
        let s = SymbolSpace::build(
            11,
            Twist::Character(DirichletCharacter::trivial(11)),
            SymbolRing::local(5, 3, 1).unwrap(),
            Sign::Plus,
        )
        .unwrap();
        let c = s.cuspidal().unwrap();
        assert_eq!(c.rank(), 1);
        for (l, a) in [(2u64, -2i64), (3, -1), (5, 1), (7, -2), (13, 4)] {
            let t = c.restrict(&s.hecke(l, None).unwrap()).unwrap();
            assert_eq!(t, vec![vec![a.rem_euclid(125) as u64]], "{l}");
        }
    }

    #[test]
    fn character_spaces_match_the_dimension_formula() {
        use crate::characters::unit_group_generators;
        for m in [13u64, 21, 28, 35, 39, 52] {
            let gens = unit_group_generators(m);
            let k = gens.iter().fold(1u64, |acc, g| num_integer::lcm(acc, g.1));
            for first in 0..gens[0].1 {
                let mut images = vec![0u64; gens.len()];
                images[0] = first * (k / gens[0].1);
                let eps = DirichletCharacter::from_images(m, k, &images).unwrap();
                let ring = SymbolRing::rational(eps.normalized().root_order());
                let built = SymbolSpace::build(m, Twist::Character(eps.clone()), ring, Sign::Plus);
                if !eps.is_even() {
                    assert!(matches!(built, Err(Error::OddCharacter)));
                    continue;
                }
                let s = built.unwrap();
                assert_eq!(
                    s.cuspidal().unwrap().rank(),
                    cusp_form_dimension(&eps) as usize,
                    "{m} {images:?}"
                );
            }
        }
    }

    #[test]
    fn operators_commute() {
        let s = gamma1(23, Sign::Full);
        let ops: Vec<HeckeOperator> = vec![
            s.hecke(2, None).unwrap(),
            s.hecke(3, None).unwrap(),
            s.hecke(23, None).unwrap(),
            s.diamond(5).unwrap(),
            s.involution(),
        ];
        for a in &ops {
            for b in &ops {
                assert!(a.commutes_with(b), "{} {}", a.label, b.label);
            }
        }
        assert!(s.diamond(1).unwrap().is_identity());
        assert!(
            s.diamond(2).unwrap().then(&s.diamond(3).unwrap()).matrix
                == s.diamond(6).unwrap().matrix
        );
        let w = s.atkin_lehner().unwrap();
        assert!(w.then(&w).is_identity());
        assert!(!w.is_identity());
    }

    #[test]
    fn fricke_on_gamma0() {
        for m in [11u64, 37, 43] {
            let s = SymbolSpace::build(
                m,
                Twist::Character(DirichletCharacter::trivial(m)),
                SymbolRing::rational(1),
                Sign::Full,
            )
            .unwrap();
            let w = s.atkin_lehner().unwrap();
            assert!(w.then(&w).is_identity());
            assert!(w.commutes_with(&s.hecke(2, None).unwrap()));
            let c = s.cuspidal().unwrap();
            c.restrict(&w).unwrap();
        }
    }

    #[test]
    fn continued_fraction_paths() {
        // {0 -> g r} and {0 -> r} have the same boundary for g in Gamma_1(M)
        let m = 15i64;
        let s = gamma1(m as u64, Sign::Full);
        let path = |x: i64, y: i64| {
            let chain: Vec<(i64, u64, u64)> = manin_decomposition(x, y, m)
                .into_iter()
                .map(|(u, v, c)| (c, u, v))
                .collect();
            s.boundary_of(&s.chain(&chain).unwrap())
        };
        let gens = [
            [1i64, 1, 0, 1],
            [1, 0, m, 1],
            [1 + m, 1, m, 1],
            [1, -2, 0, 1],
        ];
        for (x, y) in [
            (3i64, 7i64),
            (-5, 12),
            (22, 9),
            (0, 1),
            (1, 0),
            (17, 60),
            (2, 5),
        ] {
            let (mut gx, mut gy) = (x, y);
            for [a, b, c, d] in gens.iter().cycle().take(7) {
                (gx, gy) = (a * gx + b * gy, c * gx + d * gy);
            }
            assert_eq!(path(x, y), path(gx, gy), "{x}/{y}");
        }
        // {0 -> inf} is [0:1]
        assert_eq!(manin_decomposition(1, 0, m), vec![(0, 1, 1)]);
        let b = path(1, 3);
        assert!(b.iter().any(|&x| x != 0));
    }

    #[test]
    fn cd_symbols() {
        let s = gamma1(13, Sign::Full);
        let q = s.ring().modulus();
        for (c, d) in [(5u64, 7u64), (11, 17), (19, 23)] {
            for (u, v) in [(1u64, 2u64), (3, 5), (0, 1), (4, 0)] {
                let a = s.cd_symbol(c, d, u, v).unwrap();
                let b = s.cd_symbol(d, c, (13 - v) % 13, u).unwrap();
                assert!(a.iter().zip(&b).all(|(x, y)| (x + y) % q == 0));
            }
        }
        let (c, d) = (79u64, 53u64);
        let k = (c * c * d * d - c * c - d * d + 1) % q;
        let a = s.cd_symbol(c, d, 2, 3).unwrap();
        let b: Vec<u64> = s
            .symbol(2, 3)
            .unwrap()
            .iter()
            .map(|&x| mulq(x, k, q))
            .collect();
        assert_eq!(a, b);
        assert!(matches!(
            s.cd_symbol(3, 5, 1, 1),
            Err(Error::InadmissiblePair(_))
        ));
        assert!(matches!(
            s.cd_symbol(5, 1, 1, 1),
            Err(Error::InadmissiblePair(_))
        ));
        assert!(matches!(
            s.cd_symbol(5, 7, 13, 13),
            Err(Error::InadmissiblePair(_))
        ));
    }

    #[test]
    fn varpi_normal_form() {
        let f = varpi_formal(13, &[(2, 1, 3), (1, 3, 1), (3, 2, 2), (1, 5, 4)]).unwrap();
        assert_eq!(f, BTreeMap::from([((1, 3), 1), ((2, 2), 1), ((4, 5), -1)]));
        assert!(matches!(
            varpi_formal(13, &[(1, 0, 3)]),
            Err(Error::ZeroIndex)
        ));
        assert!(matches!(
            varpi_formal(13, &[(1, 3, 26)]),
            Err(Error::ZeroIndex)
        ));
    }
}
