use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::binomial_table;
use super::layer::{layer_dim, LayerElement};
use crate::characters::{rational_mod_pm, rational_valuation};
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar};
use crate::series::PowerSeries;

#[derive(Clone, Debug)]
pub enum SystemKind {
    /// `u_r = Fr^-r(c) (1 - zeta_N^(a p^-r) zeta_{p^r})` for a Teichmuller constant `c`
    Cyclotomic { n: u64, a: u64, unit: ExtScalar },
    /// `u_r = Fr^-r(c)` for a Teichmuller constant `c`
    Constant { c: ExtScalar },
    /// stored layers `u_0, ..., u_rmax`
    Explicit { layers: Vec<LayerElement> },
}

/// A norm-compatible family `(u_r)` in the tower `W[zeta_{p^r}]`.
///
/// The ground layer carries `u_0 = f(0)`, tied to `u_1` by
/// `Fr(u_0) = u_0 N_{1->0}(Fr(u_1))`; above it `N_{r+1->r}(u_{r+1}) = u_r`.
#[derive(Clone, Debug)]
pub struct NormSystem {
    ring: Arc<ExtRing>,
    kind: SystemKind,
}

fn check_teichmuller(c: &ExtScalar) -> Result<()> {
    let t = c.teichmuller()?;
    if !t.agrees(c) {
        return Err(Error::Invalid(
            "scaling constant is not a Teichmuller representative".into(),
        ));
    }
    Ok(())
}

impl NormSystem {
    /// The cyclotomic system of `1 - zeta_N^a`; `zeta_N` is taken from the ring.
    pub fn cyclotomic(ring: &Arc<ExtRing>, n: u64, a: u64) -> Result<Self> {
        let d = ring
            .root_order()
            .ok_or_else(|| Error::Invalid("the ring has no distinguished root".into()))?;
        if n < 2 || d % n != 0 || n.is_multiple_of(ring.prime()) {
            return Err(Error::Invalid(format!(
                "zeta_{n} is not available in Z_{}[zeta_{d}]",
                ring.prime()
            )));
        }
        let unit = ExtScalar::one(ring, ring.cap());
        Ok(NormSystem {
            ring: ring.clone(),
            kind: SystemKind::Cyclotomic { n, a: a % n, unit },
        })
    }

    pub fn constant(c: &ExtScalar) -> Result<Self> {
        check_teichmuller(c)?;
        Ok(NormSystem {
            ring: c.ring().clone(),
            kind: SystemKind::Constant { c: c.clone() },
        })
    }

    pub fn explicit(ring: &Arc<ExtRing>, layers: Vec<LayerElement>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InsufficientLayers("no layers given".into()));
        }
        for (r, u) in layers.iter().enumerate() {
            if u.layer() != r as u32 {
                return Err(Error::Invalid(format!(
                    "layer {r} is stored at level {}",
                    u.layer()
                )));
            }
        }
        Ok(NormSystem {
            ring: ring.clone(),
            kind: SystemKind::Explicit { layers },
        })
    }

    /// Layers `u_r = Fr^-r(f(zeta_{p^r} - 1))` of an exact polynomial `f`,
    /// for `r <= r_max`. No compatibility is implied; see [`Self::check_norms`].
    pub fn from_polynomial(f: &PowerSeries, r_max: u32) -> Result<Self> {
        let layers = (0..=r_max)
            .map(|r| eval_in_layer(f, r, true).frobenius_pow(-(r as i64)))
            .collect();
        Self::explicit(f.ring(), layers)
    }

    /// Multiply by the constant family of a Teichmuller unit `c`.
    pub fn scaled(&self, c: &ExtScalar) -> Result<Self> {
        check_teichmuller(c)?;
        let kind = match &self.kind {
            SystemKind::Cyclotomic { n, a, unit } => SystemKind::Cyclotomic {
                n: *n,
                a: *a,
                unit: unit.mul(c),
            },
            SystemKind::Constant { c: c0 } => SystemKind::Constant { c: c0.mul(c) },
            SystemKind::Explicit { layers } => SystemKind::Explicit {
                layers: layers
                    .iter()
                    .enumerate()
                    .map(|(r, u)| u.scale(&c.frobenius_pow(-(r as i64))))
                    .collect(),
            },
        };
        Ok(NormSystem {
            ring: self.ring.clone(),
            kind,
        })
    }

    /// The system with `zeta_N^a` replaced by `zeta_N^(ab)`.
    pub fn galois_conjugate(&self, b: u64) -> Result<Self> {
        match &self.kind {
            SystemKind::Cyclotomic { n, a, unit } => Ok(NormSystem {
                ring: self.ring.clone(),
                kind: SystemKind::Cyclotomic {
                    n: *n,
                    a: a * b % n,
                    unit: unit.clone(),
                },
            }),
            _ => Err(Error::Invalid(
                "only cyclotomic systems have named conjugates".into(),
            )),
        }
    }

    pub fn ring(&self) -> &Arc<ExtRing> {
        &self.ring
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// Highest stored layer, `None` for closed forms.
    pub fn r_max(&self) -> Option<u32> {
        match &self.kind {
            SystemKind::Explicit { layers } => Some(layers.len() as u32 - 1),
            _ => None,
        }
    }

    /// The layer element `u_r`.
    pub fn layer(&self, r: u32) -> Result<LayerElement> {
        let p = self.ring.prime();
        let m = self.ring.cap();
        let k = -(r as i64);
        match &self.kind {
            SystemKind::Cyclotomic { n, a, unit } => {
                let z = ExtScalar::root_of_unity(
                    &self.ring,
                    (self.ring.root_order().unwrap() / n * a) as i64,
                    m,
                );
                let one = LayerElement::constant(p, r, &ExtScalar::one(&self.ring, m));
                let u =
                    one.sub(&LayerElement::zeta(p, r, &self.ring, m).scale(&z.frobenius_pow(k)));
                Ok(u.scale(&unit.frobenius_pow(k)))
            }
            SystemKind::Constant { c } => Ok(LayerElement::constant(p, r, &c.frobenius_pow(k))),
            SystemKind::Explicit { layers } => layers.get(r as usize).cloned().ok_or_else(|| {
                Error::InsufficientLayers(format!("layer {r} requested, {} stored", layers.len()))
            }),
        }
    }

    /// Check the norm relations up to layer `r_max`.
    pub fn check_norms(&self, r_max: u32) -> Result<()> {
        let mut upper = self.layer(r_max)?;
        for r in (0..r_max).rev() {
            let lower = self.layer(r)?;
            let ok = if r == 0 {
                let rhs = lower.mul(&upper.frobenius_pow(1).norm_down()?);
                lower.frobenius_pow(1).agrees(&rhs)
            } else {
                upper.norm_down()?.agrees(&lower)
            };
            if !ok {
                return Err(Error::NormFailure(format!(
                    "layers {r} and {} are not norm compatible",
                    r + 1
                )));
            }
            upper = lower;
        }
        Ok(())
    }
}

/// `f(zeta_{p^r} - 1)`; a truncated series contributes an unknown tail of
/// valuation at least `n / phi(p^r)`.
pub fn eval_in_layer(f: &PowerSeries, r: u32, exact_polynomial: bool) -> LayerElement {
    let ring = f.ring();
    let p = ring.prime();
    let m = f.precision();
    let one = LayerElement::constant(p, r, &ExtScalar::one(ring, ring.cap()));
    let t = LayerElement::zeta(p, r, ring, ring.cap()).sub(&one);
    let mut acc = LayerElement::constant(p, r, &ExtScalar::zero(ring, ring.cap()));
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&t).add(&LayerElement::constant(p, r, c));
    }
    if exact_polynomial {
        acc.reduce(m)
    } else {
        acc.reduce(m.min((f.trunc() / layer_dim(p, r)) as u32))
    }
}

/// The Coleman power series `f` of a norm-compatible system, with
/// `f(zeta_{p^r} - 1) = Fr^r(u_r)`.
#[derive(Clone, Debug)]
pub struct ColemanSeries {
    pub f: PowerSeries,
    /// `f(0)` is not a unit
    pub pole: bool,
    /// for explicit systems: the layer count and the residue of `f(Y - 1)`
    /// modulo `Y^(p^R) - 1` in the powers of `Y = 1 + T`
    pub residue: Option<(u32, Vec<ExtScalar>)>,
    /// layers on which `f(zeta_{p^r} - 1) = Fr^r(u_r)` was checked
    pub audited_layers: u32,
}

/// Layers audited for the closed forms.
pub const AUDIT_LAYERS: u32 = 2;

/// The Coleman series modulo `T^n`.
pub fn coleman_series(sys: &NormSystem, n: usize) -> Result<ColemanSeries> {
    let ring = sys.ring();
    let m = ring.cap();
    let (f, residue, top) = match sys.kind() {
        SystemKind::Cyclotomic { n: big_n, a, unit } => {
            let z =
                ExtScalar::root_of_unity(ring, (ring.root_order().unwrap() / big_n * a) as i64, m);
            let c0 = unit.mul(&ExtScalar::one(ring, m).sub(&z));
            let c1 = unit.mul(&z).neg();
            (
                PowerSeries::from_coeffs(ring, vec![c0, c1])
                    .pad(n)
                    .truncate(n),
                None,
                AUDIT_LAYERS,
            )
        }
        SystemKind::Constant { c } => (PowerSeries::constant(c, n), None, AUDIT_LAYERS),
        SystemKind::Explicit { layers } => {
            let r_max = layers.len() as u32 - 1;
            let (f, residue) = crt_recover(sys, r_max, n)?;
            (f, Some((r_max, residue)), r_max)
        }
    };
    sys.check_norms(top)?;
    if residue.is_none() {
        for r in 0..=top {
            let lhs = eval_in_layer(&f, r, true);
            let rhs = sys.layer(r)?.frobenius_pow(r as i64);
            if !lhs.agrees(&rhs) {
                return Err(Error::NormFailure(format!(
                    "closed form fails the defining property at layer {r}"
                )));
            }
        }
    }
    let pole = !f.coeff(0).is_unit();
    Ok(ColemanSeries {
        f,
        pole,
        residue,
        audited_layers: top,
    })
}

/// `Y^k mod Phi_{p^r}(Y)` in the basis `Y^i`, `i < phi(p^r)`.
fn reduce_power(p: u64, r: u32, k: u64) -> Vec<i64> {
    let dim = layer_dim(p, r);
    let mut v = vec![0i64; dim];
    if r == 0 {
        v[0] = 1;
        return v;
    }
    let idx = (k % p.pow(r)) as usize;
    if idx < dim {
        v[idx] = 1;
    } else {
        let step = p.pow(r - 1) as usize;
        for j in 0..(p as usize - 1) {
            v[j * step + idx - dim] = -1;
        }
    }
    v
}

/// Inverse of an invertible square rational matrix by Gauss-Jordan elimination.
fn invert(mut a: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &d;
            inv[col][j] = &inv[col][j] / &d;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] = &a[r][j] - t;
                let t = &f * &inv[col][j];
                inv[r][j] = &inv[r][j] - t;
            }
        }
    }
    Some(inv)
}

/// Chinese remaindering across `Phi_{p^r}(1 + T)`, `r <= r_max`.
///
/// The evaluation matrix is inverted exactly; its denominators are powers
/// of `p`, and the largest one is the precision lost. Coefficient `i >= 1`
/// of `f` is then known modulo `p^(R - floor(log_p i))`, the ambiguity left
/// by multiples of `(1+T)^(p^R) - 1`.
fn crt_recover(sys: &NormSystem, r_max: u32, n: usize) -> Result<(PowerSeries, Vec<ExtScalar>)> {
    let ring = sys.ring();
    let p = ring.prime();
    let size = p.pow(r_max) as usize;
    if n > size {
        return Err(Error::InsufficientLayers(format!(
            "{n} coefficients requested from {} layers",
            r_max + 1
        )));
    }
    let mut data: Vec<ExtScalar> = Vec::with_capacity(size);
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(size);
    for r in 0..=r_max {
        let u = sys.layer(r)?.frobenius_pow(r as i64);
        data.extend(u.coeffs().iter().cloned());
        let cols: Vec<Vec<i64>> = (0..size as u64).map(|k| reduce_power(p, r, k)).collect();
        for i in 0..layer_dim(p, r) {
            rows.push(
                cols.iter()
                    .map(|c| BigRational::from_integer(BigInt::from(c[i])))
                    .collect(),
            );
        }
    }
    let inv = invert(rows).expect("CRT matrix is invertible over Q");
    let loss = inv
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .map(|x| (-rational_valuation(x, p)).max(0) as u32)
        .max()
        .unwrap_or(0);
    let prec = data.iter().map(|c| c.precision()).min().unwrap_or(0);
    if prec <= loss {
        return Err(Error::PrecisionExhausted(format!(
            "CRT across {} layers loses {loss} digits",
            r_max + 1
        )));
    }
    let pl = BigRational::from_integer(BigInt::from(p).pow(loss));
    let mut g = Vec::with_capacity(size);
    for row in &inv {
        let mut acc = ExtScalar::zero(ring, prec);
        for (x, d) in row.iter().zip(&data) {
            if x.is_zero() {
                continue;
            }
            let scaled = x * &pl;
            let neg = scaled.is_negative();
            let c = rational_mod_pm(&scaled.abs(), p, prec)? as i64;
            let term = d.reduce(prec).mul_int(c);
            acc = if neg { acc.sub(&term) } else { acc.add(&term) };
        }
        g.push(acc.div_p_pow(loss)?);
    }
    // f(T) = g(1 + T)
    let q = ring.ppow(prec);
    let binom = binomial_table(size, q);
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = ExtScalar::zero(ring, prec - loss);
        for (k, gk) in g.iter().enumerate().skip(i) {
            acc = acc.add(&gk.mul_int(binom[k][i] as i64));
        }
        let cap = if i == 0 {
            u32::MAX
        } else {
            r_max.saturating_sub(crate::arith::ilog(i as u64, p))
        };
        coeffs.push(acc.reduce(cap));
    }
    Ok((PowerSeries::from_coeffs(ring, coeffs), g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<ExtRing> {
        ExtRing::cyclotomic(5, 12, 8)
    }

    #[test]
    fn cyclotomic_closed_form() {
        let r = ring();
        let sys = NormSystem::cyclotomic(&r, 3, 1).unwrap();
        let col = coleman_series(&sys, 4).unwrap();
        assert!(!col.pole);
        let z = ExtScalar::root_of_unity(&r, 4, 8);
        assert!(col.f.coeff(1).agrees(&z.neg()));
        assert!(col.f.coeff(2).is_zero());
    }

    #[test]
    fn constant_teichmuller_system() {
        let r = ring();
        let c = ExtScalar::root_of_unity(&r, 5, 8);
        let col = coleman_series(&NormSystem::constant(&c).unwrap(), 3).unwrap();
        assert!(col.f.coeff(0).agrees(&c));
        assert!(NormSystem::constant(&ExtScalar::from_int(&r, 2, 8)).is_err());
    }

    #[test]
    fn explicit_layers_round_trip() {
        let r = ring();
        let m = r.cap();
        let z3 = ExtScalar::root_of_unity(&r, 4, m);
        let f0 = PowerSeries::from_coeffs(&r, vec![ExtScalar::one(&r, m).sub(&z3), z3.neg()]);
        let sys = NormSystem::from_polynomial(&f0, 2).unwrap();
        sys.check_norms(2).unwrap();
        let col = coleman_series(&sys, 25).unwrap();
        let (layers, res) = col.residue.clone().unwrap();
        assert_eq!(layers, 2);
        // residue of f0(Y - 1) = 1 - zeta_3 Y is itself
        assert!(res[0].agrees(&ExtScalar::one(&r, m)));
        assert!(res[1].agrees(&z3.neg()));
        assert!(res[2..].iter().all(|c| c.is_zero()));
        assert!(res[0].precision() >= 1);
        assert!(matches!(
            coleman_series(&sys, 26),
            Err(Error::InsufficientLayers(_))
        ));
    }

    #[test]
    fn perturbed_layers_are_rejected() {
        let r = ring();
        let sys = NormSystem::cyclotomic(&r, 3, 1).unwrap();
        let mut layers: Vec<LayerElement> = (0..=2).map(|k| sys.layer(k).unwrap()).collect();
        let bump =
            LayerElement::zeta(5, 2, &r, r.cap()).scale(&ExtScalar::from_int(&r, 5, r.cap()));
        layers[2] = layers[2].add(&bump);
        let bad = NormSystem::explicit(&r, layers).unwrap();
        let res = bad.check_norms(2);
        assert!(matches!(res, Err(Error::NormFailure(_))), "{res:?}");
        // a polynomial that is not a Coleman series gives incompatible layers
        let g = PowerSeries::from_ints(&r, &[1, 0, 1], 3, r.cap());
        let sys = NormSystem::from_polynomial(&g, 2).unwrap();
        assert!(matches!(sys.check_norms(2), Err(Error::NormFailure(_))));
    }
}
