//! The Kubota-Leopoldt series `xi_theta` by interpolation of `L_p` values,
//! its derivative objects and its Iwasawa invariants.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::max_precision;
use crate::characters::{fixture_ring, lp_value, DirichletCharacter};
use crate::error::{Error, Result};
use crate::padic::{ExtRing, ExtScalar, ScalarJson};
use crate::series::{
    newton_interpolate, weierstrass_data, xi_n, Generator, PowerSeries, SeriesJson, WeierstrassData,
};

/// How `xi` is tied to `L_p` values.
///
/// `Main`: `xi(t^s - 1) = L_p(omega^2 theta^-1, s - 1)`.
/// `Testcase`: `xi(t^(1-s) - 1) = L_p(theta, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Main,
    Testcase,
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(Convention::Main),
            "testcase" => Ok(Convention::Testcase),
            other => Err(Error::Invalid(format!("unknown convention {other:?}"))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Main => "main",
            Convention::Testcase => "testcase",
        })
    }
}

impl Convention {
    /// The exponent `s` with node `t^s - 1` at which the value `L_p(chi, 1-k)` sits.
    pub fn node_exponent(self, k: usize) -> i64 {
        match self {
            Convention::Main => 2 - k as i64,
            Convention::Testcase => k as i64,
        }
    }

    /// The character whose `L_p` values are interpolated.
    pub fn interpolated_character(
        self,
        theta: &DirichletCharacter,
        ring: &Arc<ExtRing>,
    ) -> Result<DirichletCharacter> {
        match self {
            Convention::Main => {
                let omega = DirichletCharacter::teichmuller(ring)?;
                Ok(omega.pow(2).mul(&theta.inv()))
            }
            Convention::Testcase => Ok(theta.clone()),
        }
    }
}

/// One interpolation node and the comparison made there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    /// `L_p(chi, 1 - k)`
    pub k: usize,
    /// node `t^s - 1`
    pub s: i64,
    pub held_out: bool,
    pub expected: ScalarJson,
    pub evaluated: ScalarJson,
    /// digits on which the comparison was made
    pub precision: u32,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct LpSeries {
    pub series: PowerSeries,
    pub generator: Generator,
    pub convention: Convention,
    pub theta: DirichletCharacter,
    pub audit: Vec<AuditEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSeriesJson {
    pub convention: Convention,
    pub theta: String,
    pub series: SeriesJson,
    /// precision of each coefficient
    pub coefficient_precision: Vec<u32>,
    pub audit: Vec<AuditEntry>,
}

impl LpSeries {
    pub fn ring(&self) -> &Arc<ExtRing> {
        self.series.ring()
    }

    /// Smallest precision among the first `k` coefficients.
    pub fn guaranteed(&self, k: usize) -> u32 {
        self.series
            .coeffs()
            .iter()
            .take(k)
            .map(|c| c.precision())
            .min()
            .unwrap_or(0)
    }

    pub fn audit_passed(&self) -> bool {
        self.audit.iter().all(|a| a.pass)
    }

    pub fn eval_at_ts(&self, s: i64) -> Result<ExtScalar> {
        self.series.eval_at_ts(s, &self.generator)
    }

    pub fn to_json(&self) -> LpSeriesJson {
        LpSeriesJson {
            convention: self.convention,
            theta: crate::characters::format_fractions(&self.theta.fractions()),
            series: self.series.to_json(&ring_label(self.ring())),
            coefficient_precision: self.series.coeffs().iter().map(|c| c.precision()).collect(),
            audit: self.audit.clone(),
        }
    }
}

pub(crate) fn ring_label(ring: &ExtRing) -> String {
    match ring.root_order() {
        Some(d) => format!("Z_{}[zeta_{}]", ring.prime(), d),
        None => format!("Z_{}[y]/({:?})", ring.prime(), ring.modulus_poly()),
    }
}

/// Guard nodes held out of the interpolation and audited afterwards.
pub const HELD_OUT: usize = 2;

/// `xi_theta` modulo `X^n` from `n` interpolation nodes plus
/// [`HELD_OUT`] audit nodes, values computed at precision `m`.
///
/// The theta values live in the ring of [`fixture_ring`].
pub fn kubota_leopoldt(
    theta: &DirichletCharacter,
    convention: Convention,
    m: u32,
    n: usize,
    g: &Generator,
) -> Result<LpSeries> {
    let p = g.prime();
    let cap = max_precision(p).min(m + 4);
    let ring = fixture_ring(p, theta, cap);
    kubota_leopoldt_in(theta, convention, m, n, g, &ring)
}

pub fn kubota_leopoldt_in(
    theta: &DirichletCharacter,
    convention: Convention,
    m: u32,
    n: usize,
    g: &Generator,
    ring: &Arc<ExtRing>,
) -> Result<LpSeries> {
    let p = g.prime();
    if n == 0 {
        return Err(Error::Invalid("truncation must be positive".into()));
    }
    if !theta.is_even() {
        return Err(Error::HypothesisViolation(format!(
            "theta = {theta} is odd"
        )));
    }
    let chi = convention.interpolated_character(theta, ring)?;
    if chi.is_trivial() {
        return Err(Error::HypothesisViolation(
            "the interpolated character is trivial; L_p has a pole".into(),
        ));
    }
    if convention == Convention::Main {
        let cond = theta.conductor();
        let np = theta.modulus();
        if !np.is_multiple_of(p) || (cond != np && cond != np / p) {
            return Err(Error::HypothesisViolation(format!(
                "theta = {theta} has conductor {cond}"
            )));
        }
    }
    let total = n + HELD_OUT;
    let values: Vec<ExtScalar> = (1..=total)
        .into_par_iter()
        .map(|k| lp_value(&chi, k, ring, m))
        .collect::<Result<Vec<_>>>()?;
    let nodes: Vec<ExtScalar> = (1..=total)
        .map(|k| ExtScalar::from_padic(ring, &g.node(convention.node_exponent(k))))
        .collect();
    let series = newton_interpolate(&nodes[..n], &values[..n], n)?;
    if series.precision() == 0 {
        return Err(Error::PrecisionExhausted(format!(
            "interpolation losses consumed all {m} digits"
        )));
    }
    let mut audit = Vec::with_capacity(total);
    for k in 1..=total {
        let got = series.eval_at(&nodes[k - 1])?;
        let want = &values[k - 1];
        let precision = got.precision().min(want.precision());
        audit.push(AuditEntry {
            k,
            s: convention.node_exponent(k),
            held_out: k > n,
            expected: want.to_json(),
            evaluated: got.to_json(),
            precision,
            pass: got.agrees(want),
        });
    }
    let out = LpSeries {
        series,
        generator: *g,
        convention,
        theta: theta.clone(),
        audit,
    };
    if let Some(bad) = out.audit.iter().find(|a| !a.pass) {
        return Err(Error::Invalid(format!(
            "interpolation audit failed at L_p(chi, {})",
            1 - bad.k as i64
        )));
    }
    Ok(out)
}

/// `xi_n(xi, 1)`, the derivative object `xi'`.
pub fn xi_prime(xi: &LpSeries) -> PowerSeries {
    xi_n(&xi.series, 1)
}

/// `(xi(t^(s+p^h) - 1) - xi(t^s - 1)) / p^h`, a difference quotient in `s`.
pub fn lp_derivative_fd(xi: &LpSeries, s: i64, h: u32) -> Result<ExtScalar> {
    let p = xi.generator.prime();
    let step = crate::arith::checked_pow(p, h)
        .ok_or_else(|| Error::BoundExceeded(format!("p^{h}")))? as i64;
    let a = xi.eval_at_ts(s + step)?;
    let b = xi.eval_at_ts(s)?;
    let d = a.sub(&b);
    if d.precision() <= h {
        return Err(Error::PrecisionExhausted(format!(
            "difference known to {} digits, step p^{h}",
            d.precision()
        )));
    }
    d.div_p_pow(h)
}

/// `(mu, lambda)` of `xi` with certification.
pub fn invariants(xi: &LpSeries) -> Result<(u32, usize)> {
    let WeierstrassData { mu, lambda, .. } = weierstrass_data(&xi.series)?;
    Ok((mu, lambda))
}

/// The substitution `X -> t^2 (1+X)^-1 - 1` relating the two conventions
/// for the pair `theta`, `omega^2 theta^-1`; it is an involution.
pub fn mirror_substitution(ring: &Arc<ExtRing>, g: &Generator, n: usize) -> Result<PowerSeries> {
    let m = ring.cap();
    let t2 = ExtScalar::from_padic(ring, &g.power(2));
    let inv = PowerSeries::from_ints(ring, &[1, 1], n, m).inverse()?;
    let mut out = inv.scale(&t2);
    let c0 = out.coeff(0).sub(&ExtScalar::one(ring, m));
    let mut coeffs = out.coeffs().to_vec();
    coeffs[0] = c0;
    out = PowerSeries::from_coeffs(ring, coeffs);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::find_eisenstein_pairs;
    use crate::series::{tilde_xi_1, GeneratorMode};

    fn fixture(p: u64, n: u64) -> DirichletCharacter {
        find_eisenstein_pairs(p..=p, n..=n)[0].character()
    }

    #[test]
    fn constant_term_contract() {
        let theta = fixture(5, 17);
        let g = Generator::simple(5, 12);
        let xi = kubota_leopoldt(&theta, Convention::Main, 8, 5, &g).unwrap();
        assert!(xi.audit_passed());
        // xi(0) against -(1 - theta^-1(p) p) B_{2,theta^-1} / 2
        let ring = xi.ring().clone();
        let psi = theta.inv().primitive();
        let b = crate::characters::generalized_bernoulli(2, &psi, &ring, 8).unwrap();
        let euler = ExtScalar::one(&ring, 8).sub(&psi.value(&ring, 5, 8).mul_int(5));
        let want = euler.mul(&b).neg().div_int(2).unwrap();
        let got = xi.eval_at_ts(0).unwrap();
        assert!(got.agrees(&want));
        assert!(got.precision() >= 3);
        assert!(want.valuation() >= 1);
    }

    #[test]
    fn held_out_nodes_and_guaranteed_precision() {
        let g = Generator::simple(7, 12);
        let theta = fixture(7, 13);
        let xi = kubota_leopoldt(&theta, Convention::Main, 10, 6, &g).unwrap();
        assert_eq!(xi.audit.iter().filter(|a| a.held_out).count(), 2);
        assert!(xi
            .audit
            .iter()
            .filter(|a| a.held_out)
            .all(|a| a.pass && a.precision >= 3));
        assert!(xi.guaranteed(4) >= 3, "{:?}", xi.series);
        let (mu, _) = invariants(&xi).unwrap();
        assert_eq!(mu, 0);
    }

    #[test]
    fn conventions_are_mirror_images() {
        let p = 5;
        let theta = fixture(p, 17);
        let g = Generator::simple(p, 12);
        let main = kubota_leopoldt(&theta, Convention::Main, 10, 6, &g).unwrap();
        let ring = main.ring().clone();
        let omega = DirichletCharacter::teichmuller(&ring).unwrap();
        let mirror = omega.pow(2).mul(&theta.inv()).normalized();
        let tc = kubota_leopoldt_in(&mirror, Convention::Testcase, 10, 6, &g, &ring).unwrap();
        let sub = mirror_substitution(&ring, &g, 6).unwrap();
        // the substitution is an involution
        let x = PowerSeries::x(&ring, 6, ring.cap());
        assert!(sub.compose(&sub).unwrap().agrees(&x));
        let a = tc.series.compose(&sub).unwrap();
        assert!(a.agrees(&main.series));
        assert!(
            a.coeffs().iter().take(3).all(|c| c.precision() >= 2),
            "{a:?}"
        );
        let b = main.series.compose(&sub).unwrap();
        assert!(b.agrees(&tc.series));
    }

    #[test]
    fn derivative_objects() {
        let p = 7;
        let theta = fixture(p, 13);
        let g = Generator::new(GeneratorMode::Simple, p, 12).unwrap();
        let xi = kubota_leopoldt(&theta, Convention::Main, 10, 6, &g).unwrap();
        let d = xi_prime(&xi);
        assert!(tilde_xi_1(&xi.series).unwrap().at_x_zero().agrees(&d));
        // the ratio of the difference quotient to xi' is log t for every s
        let log_t = ExtScalar::from_padic(xi.ring(), &g.t().log().unwrap());
        let h = 2;
        for s in [0i64, 1, 3] {
            let fd = lp_derivative_fd(&xi, s, h).unwrap();
            let node = ExtScalar::from_padic(xi.ring(), &g.node(s));
            let dv = d.eval_at(&node).unwrap();
            let approx = dv.mul(&log_t).reduce(h);
            assert!(fd.reduce(h).agrees(&approx), "s = {s}");
        }
        let c = PowerSeries::constant(&ExtScalar::from_int(xi.ring(), 3, 8), 4);
        assert!(xi_n(&c, 1).coeffs().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rejects_bad_input() {
        let ring = ExtRing::cyclotomic(5, 4, 8);
        let omega = DirichletCharacter::teichmuller(&ring).unwrap();
        let g = Generator::simple(5, 8);
        assert!(matches!(
            kubota_leopoldt(&omega, Convention::Main, 6, 4, &g),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(matches!(
            kubota_leopoldt(&omega.pow(2), Convention::Main, 6, 4, &g),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
