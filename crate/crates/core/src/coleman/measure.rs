use std::sync::Arc;

use rayon::prelude::*;

use super::binomial_table;
use super::system::ColemanSeries;
use crate::arith::{ilog, mul_mod, stirling2_table, val};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar, PadicScalar, RamRing};
use crate::series::{newton_interpolate, Generator, PowerSeries};

/// A measure on `Z_p` through its Amice transform `q(1 + T) = int (1+T)^x dmu`.
#[derive(Clone, Debug)]
pub struct PadicMeasure {
    /// coefficients `c_k` of `T^k` in `q`
    pub q: PowerSeries,
    /// `D q = (1+T) dq/dT`, the transform of `x mu`
    pub dq: PowerSeries,
}

impl PadicMeasure {
    pub fn ring(&self) -> &Arc<ExtRing> {
        self.q.ring()
    }

    pub fn zero(ring: &Arc<ExtRing>, n: usize) -> Self {
        PadicMeasure {
            q: PowerSeries::zero(ring, n, ring.cap()),
            dq: PowerSeries::zero(ring, n, ring.cap()),
        }
    }

    /// `sum w_i mu_i`.
    pub fn weighted_sum(terms: &[(ExtScalar, PadicMeasure)]) -> Result<Self> {
        let (w0, m0) = terms
            .first()
            .ok_or_else(|| Error::Invalid("empty sum of measures".into()))?;
        let mut q = m0.q.scale(w0);
        let mut dq = m0.dq.scale(w0);
        for (w, m) in &terms[1..] {
            q = q.add(&m.q.scale(w));
            dq = dq.add(&m.dq.scale(w));
        }
        Ok(PadicMeasure { q, dq })
    }
}

/// `g -> Fr(g)((1+T)^p - 1)`.
pub fn psi(g: &PowerSeries) -> Result<PowerSeries> {
    let ring = g.ring();
    let p = ring.prime();
    let n = g.trunc();
    let q = ring.ppow(ring.cap());
    let binom = binomial_table(p as usize, q);
    let inner = (0..n)
        .map(|i| {
            let c = if i >= 1 && i <= p as usize {
                binom[p as usize][i] as i64
            } else {
                0
            };
            ExtScalar::from_int(ring, c, ring.cap())
        })
        .collect();
    let inner = PowerSeries::from_coeffs(ring, inner);
    g.map(|c| c.frobenius()).compose(&inner)
}

/// `(1+T) d/dT`.
pub fn theta_derivative(g: &PowerSeries) -> PowerSeries {
    let ring = g.ring();
    let n = g.trunc();
    let coeffs = (0..n.saturating_sub(1))
        .map(|j| {
            g.coeff(j + 1)
                .mul_int(j as i64 + 1)
                .add(&g.coeff(j).mul_int(j as i64))
        })
        .collect();
    PowerSeries::from_coeffs(ring, coeffs)
}

/// Restriction tables for residue classes: binomials and
/// `P(L, e) = sum_{r = e mod p} C(L, r) (-1)^(L-r) = (1/p) sum_c zeta^(ce) (zeta^c - 1)^L`.
struct Projector {
    p: u64,
    binom: Vec<Vec<u64>>,
    classes: Vec<Vec<u64>>,
    q: u64,
}

impl Projector {
    fn new(ring: &Arc<ExtRing>, n: usize) -> Self {
        let p = ring.prime();
        let q = ring.ppow(ring.cap());
        let binom = binomial_table(n, q);
        let classes = (0..=n)
            .map(|l| {
                let mut row = vec![0u64; p as usize];
                for (r, &c) in binom[l].iter().enumerate().take(l + 1) {
                    let c = if (l - r) % 2 == 0 { c } else { (q - c) % q };
                    let e = r % p as usize;
                    row[e] = (row[e] + c) % q;
                }
                row
            })
            .collect();
        Projector {
            p,
            binom,
            classes,
            q,
        }
    }

    /// Coefficients `0..k` of the transform of the restriction to `b + pZ_p`.
    ///
    /// Coefficient `i` sees the unknown tail `l >= n` through factors of
    /// valuation at least `ceil((n - i)/(p - 1)) - 1`.
    fn project(&self, g: &PowerSeries, b: u64, k: usize) -> PowerSeries {
        let ring = g.ring();
        let n = g.trunc();
        let p = self.p;
        let coeffs = (0..k.min(n))
            .map(|i| {
                let e = ((b as i64 - i as i64).rem_euclid(p as i64)) as usize;
                let mut acc = ExtScalar::zero(ring, ring.cap());
                for l in i..n {
                    let w = mul_mod(self.binom[l][i], self.classes[l - i][e], self.q);
                    if w != 0 {
                        acc = acc.add(&g.coeff(l).mul_int(signed(w, self.q)));
                    }
                }
                let tail = ((n - i) as u32).div_ceil(p as u32 - 1).saturating_sub(1);
                let prec = g.coeffs()[i..]
                    .iter()
                    .map(|c| c.precision())
                    .min()
                    .unwrap_or(0);
                acc.reduce(tail.min(prec))
            })
            .collect();
        PowerSeries::from_coeffs(ring, coeffs)
    }
}

fn signed(w: u64, q: u64) -> i64 {
    if w > q / 2 {
        -((q - w) as i64)
    } else {
        w as i64
    }
}

/// Transform of the restriction of a measure to `b + pZ_p`, first `k` coefficients.
pub fn project_residue(g: &PowerSeries, b: u64, k: usize) -> PowerSeries {
    Projector::new(g.ring(), g.trunc()).project(g, b, k)
}

/// [`project_residue`] computed in `W[zeta_p]` as `(1/p) sum_c zeta^(-cb) g(zeta^c (1+T) - 1)`.
pub fn project_residue_ramified(g: &PowerSeries, b: u64, k: usize) -> Result<PowerSeries> {
    let ring = g.ring();
    let p = ring.prime();
    let n = g.trunc();
    let work = g.precision();
    if work < 2 {
        return Err(Error::PrecisionExhausted(
            "ramified projection needs two digits".into(),
        ));
    }
    let ram = RamRing::new(ring, work);
    let q = ring.ppow(work);
    let binom = binomial_table(n, q);
    let mut coeffs = Vec::with_capacity(k);
    for i in 0..k.min(n) {
        let mut total = ram.zero();
        for c in 0..p {
            let z = ram.zeta(c);
            let pi = ram.sub(&z, &ram.one());
            // sum_l g_l C(l, i) pi^(l - i)
            let mut inner = ram.zero();
            for l in (i..n).rev() {
                let w = g
                    .coeff(l)
                    .reduce(work)
                    .mul_int(binom[l][i] as i64)
                    .assume_exact(work);
                inner = ram.add(&ram.mul(&inner, &pi), &ram.from_base(&w));
            }
            let twist = ram.zeta((c * ((i as u64 + p * p - b % p) % p)) % p);
            total = ram.add(&total, &ram.mul(&twist, &inner));
        }
        let v = ram.to_base(&ram.div_p(&total)?)?.reduce(work - 1);
        let tail = ((n - i) as u32).div_ceil(p as u32 - 1).saturating_sub(1);
        coeffs.push(v.reduce(tail));
    }
    Ok(PowerSeries::from_coeffs(ring, coeffs))
}

/// The measure `(1 - psi/p) log f` of a Coleman series with unit constant term.
///
/// `q` is computed from `p^E log f` with `E = floor(log_p(n - 1))`, which
/// clears the denominators of the logarithm, at a cost of `E + 1` digits.
/// `D q = D log f - psi(D log f)` is computed separately without
/// denominators. On every input the following are asserted: `psi(log f)`
/// equals the trace `sum_{zeta^p = 1} log f(zeta(1+T) - 1)`, `q` has
/// vanishing trace, and `D` applied to `q` agrees with `D q`.
pub fn coleman_measure(col: &ColemanSeries) -> Result<PadicMeasure> {
    let f = &col.f;
    if col.pole || !f.coeff(0).is_unit() {
        return Err(Error::ConvergenceDomain("f(0) is not a unit of W".into()));
    }
    let ring = f.ring();
    let p = ring.prime();
    let n = f.trunc();
    if n < 2 {
        return Err(Error::Invalid(
            "the Coleman series needs at least two coefficients".into(),
        ));
    }
    let m = f.precision();
    let finv = f.inverse()?;
    // D log f = (1+T) f'/f
    let fp = f.derivative();
    let one_t = PowerSeries::from_ints(ring, &[1, 1], n - 1, ring.cap());
    let dlog = one_t.mul(&fp).mul(&finv.truncate(n - 1));
    let dq = dlog.sub(&psi(&dlog)?);

    let e = ilog(n as u64 - 1, p);
    let f0 = f.coeff(0).clone();
    let u = f
        .scale(&f0.inverse()?)
        .sub(&PowerSeries::one(ring, n, ring.cap()));
    let pe = p.pow(e) as i64;
    let mut log = PowerSeries::constant(&f0.log_unit()?.mul_int(pe), n);
    let mut pw = u.clone();
    for k in 1..n {
        let v = val(k as u64, p);
        let unit = (k as u64 / p.pow(v)) as i64;
        let c = ExtScalar::from_int(ring, p.pow(e - v) as i64, m).div_int(unit)?;
        let term = pw.scale(&c);
        log = if k % 2 == 1 {
            log.add(&term)
        } else {
            log.sub(&term)
        };
        pw = pw.mul(&u);
    }
    let psi_log = psi(&log)?;
    let proj = Projector::new(ring, n);
    let trace = proj.project(&log, 0, n).map(|c| c.mul_int(p as i64));
    if !trace.agrees(&psi_log.truncate(trace.trunc())) {
        return Err(Error::TraceNotZero(
            "psi(log f) differs from the trace of log f".into(),
        ));
    }
    let scaled = log.map(|c| c.mul_int(p as i64)).sub(&psi_log);
    let q = PowerSeries::from_coeffs(
        ring,
        scaled
            .coeffs()
            .iter()
            .map(|c| {
                c.div_p_pow(e + 1)
                    .map_err(|_| Error::TraceNotZero("(1 - psi/p) log f is not integral".into()))
            })
            .collect::<Result<Vec<_>>>()?,
    );
    let q0 = proj.project(&q, 0, n);
    if q0.coeffs().iter().any(|c| !c.is_zero()) {
        return Err(Error::TraceNotZero("the measure charges pZ_p".into()));
    }
    if !theta_derivative(&q).agrees(&dq) {
        return Err(Error::TraceNotZero("the two routes to D q disagree".into()));
    }
    Ok(PadicMeasure { q, dq })
}

/// Moments `int_{b + pZ_p} x^j d(x mu)` for `b = 0..p` and `j <= max_j`.
pub fn residue_moments(mu: &PadicMeasure, max_j: usize) -> Vec<Vec<ExtScalar>> {
    let ring = mu.ring();
    let p = ring.prime();
    let q = ring.ppow(ring.cap());
    let stirling = stirling2_table(max_j, q);
    let proj = Projector::new(ring, mu.dq.trunc());
    (0..p)
        .into_par_iter()
        .map(|b| {
            let gb = proj.project(&mu.dq, b, max_j + 1);
            (0..=max_j)
                .map(|j| {
                    // D^j at T = 0 is sum_i S(j, i) i! g_i
                    let mut acc = ExtScalar::zero(ring, ring.cap());
                    let mut fact = 1u64;
                    for i in 0..=j {
                        if i > 0 {
                            fact = mul_mod(fact, i as u64, q);
                        }
                        let w = mul_mod(stirling[j][i], fact, q);
                        acc = acc.add(&gb.coeff_or_unknown(i).mul_int(signed(w, q)));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Output of [`measure_to_series`].
#[derive(Clone, Debug)]
pub struct MeasureSeries {
    pub series: PowerSeries,
    /// `M_s` for `s = 0..=n_out+1`
    pub moments: Vec<ExtScalar>,
    /// `theta` restricted to `(Z/p)^*` is `omega^j`
    pub omega_twist: u64,
    /// `M_0` from residue projection agrees with the total mass and the interpolant at `X = 0`
    pub mass_consistent: bool,
}

/// `h` with `h(t^s - 1) = M_s = int omega^(j-s)(x) x^s dmu` for `s = 0..=n_out+1`,
/// where `omega^j` is the part of `theta` at `p`.
///
/// `M_0` comes from projecting `q`, `M_s` for `s >= 1` from projecting `D q`.
pub fn measure_to_series(
    mu: &PadicMeasure,
    theta: &DirichletCharacter,
    g: &Generator,
    n_out: usize,
) -> Result<MeasureSeries> {
    let ring = mu.ring();
    let p = ring.prime();
    let m = ring.cap();
    let j = omega_exponent(theta, ring)?;
    let top = n_out + 1;
    let mom = residue_moments(mu, top);
    let proj = Projector::new(ring, mu.q.trunc());
    let omega: Vec<ExtScalar> = (0..p)
        .map(|b| {
            if b == 0 {
                ExtScalar::zero(ring, m)
            } else {
                ExtScalar::from_padic(
                    ring,
                    &PadicScalar::new(b as i64, p, m)
                        .teichmuller()
                        .expect("unit"),
                )
            }
        })
        .collect();
    let weight = |b: u64, e: i64| -> ExtScalar {
        let e = e.rem_euclid(p as i64 - 1) as u64;
        omega[b as usize].pow(e)
    };
    let mut moments = Vec::with_capacity(top + 1);
    let mut mass = ExtScalar::zero(ring, m);
    for b in 1..p {
        let qb = proj.project(&mu.q, b, 1);
        mass = mass.add(&qb.coeff(0).mul(&weight(b, j as i64)));
    }
    moments.push(mass.clone());
    for s in 1..=top {
        let mut acc = ExtScalar::zero(ring, m);
        for b in 1..p {
            acc = acc.add(&mom[b as usize][s - 1].mul(&weight(b, j as i64 - s as i64)));
        }
        moments.push(acc);
    }
    let nodes: Vec<ExtScalar> = (0..=top)
        .map(|s| ExtScalar::from_padic(ring, &g.node(s as i64)))
        .collect();
    let series = newton_interpolate(&nodes, &moments, n_out)?;
    if series.precision() == 0 {
        return Err(Error::PrecisionExhausted(
            "interpolation of the moments left no precision".into(),
        ));
    }
    let total = mu.q.coeff(0);
    let mass_consistent = series.coeff(0).agrees(&mass) && (j != 0 || total.agrees(&mass));
    Ok(MeasureSeries {
        series,
        moments,
        omega_twist: j,
        mass_consistent,
    })
}

/// `j` with `theta = omega^j` on `(Z/p)^*`.
pub fn omega_exponent(theta: &DirichletCharacter, ring: &Arc<ExtRing>) -> Result<u64> {
    let p = ring.prime();
    if !theta.modulus().is_multiple_of(p) {
        return Ok(0);
    }
    let part = theta.component(p);
    let omega = DirichletCharacter::teichmuller(ring)?;
    (0..p - 1)
        .find(|&j| omega.pow(j as i64) == part)
        .ok_or_else(|| Error::Invalid(format!("the p-part of {theta} is not a power of omega")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coleman::{coleman_series, NormSystem};

    fn ring() -> Arc<ExtRing> {
        ExtRing::cyclotomic(5, 12, 10)
    }

    fn measure(a: u64, n: usize) -> PadicMeasure {
        let sys = NormSystem::cyclotomic(&ring(), 3, a).unwrap();
        coleman_measure(&coleman_series(&sys, n).unwrap()).unwrap()
    }

    #[test]
    fn teichmuller_constant_has_zero_measure() {
        let r = ring();
        let c = ExtScalar::root_of_unity(&r, 7, r.cap());
        let mu = coleman_measure(&coleman_series(&NormSystem::constant(&c).unwrap(), 20).unwrap())
            .unwrap();
        assert!(mu.q.coeffs().iter().all(|x| x.is_zero()));
        assert!(mu.dq.coeffs().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn total_mass_oracle() {
        // c_0 = log(1 - zeta_3) - log(1 - zeta_3^5) / 5
        let r = ring();
        let mu = measure(1, 30);
        let z = ExtScalar::root_of_unity(&r, 4, r.cap());
        let one = ExtScalar::one(&r, r.cap());
        let a = one.sub(&z).log_unit().unwrap();
        let b = one.sub(&z.pow(5)).log_unit().unwrap().div_p_pow(1).unwrap();
        let want = a.sub(&b);
        assert!(mu.q.coeff(0).agrees(&want));
        assert!(mu.q.coeff(0).precision() >= 5);
    }

    #[test]
    fn two_projection_routes_agree() {
        let mu = measure(2, 24);
        for b in 0..5 {
            let a = project_residue(&mu.dq, b, 6);
            let c = project_residue_ramified(&mu.dq, b, 6).unwrap();
            assert!(a.agrees(&c), "b = {b}");
            assert!(a.precision() >= 3);
        }
    }

    #[test]
    fn moments_match_direct_sums() {
        // x mu for 1 - zeta(1+T) restricted to units: -sum_{p !| n} n^j zeta^n,
        // so the class sums over b recombine to D^j (D q)(0)
        let mu = measure(1, 40);
        let mom = residue_moments(&mu, 4);
        let mut d = mu.dq.clone();
        for j in 0..=4 {
            let mut total = mom[0][j].clone();
            for row in &mom[1..] {
                total = total.add(&row[j]);
            }
            assert!(total.agrees(d.coeff(0)), "j = {j}");
            assert!(mom[0][j].is_zero());
            d = theta_derivative(&d);
        }
    }

    #[test]
    fn zero_measure_gives_zero_series() {
        let r = ring();
        let mu = PadicMeasure::zero(&r, 30);
        let theta = DirichletCharacter::trivial(3);
        let out = measure_to_series(&mu, &theta, &Generator::simple(5, 10), 4).unwrap();
        assert!(out.series.coeffs().iter().all(|c| c.is_zero()));
        assert!(out.mass_consistent);
    }

    #[test]
    fn pole_case_is_rejected() {
        let r = ring();
        let f = PowerSeries::from_ints(&r, &[5, 1], 4, r.cap());
        let col = ColemanSeries {
            f,
            pole: true,
            residue: None,
            audited_layers: 0,
        };
        assert!(matches!(
            coleman_measure(&col),
            Err(Error::ConvergenceDomain(_))
        ));
    }
}
