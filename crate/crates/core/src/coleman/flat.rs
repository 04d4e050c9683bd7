use serde::{Deserialize, Serialize};

use super::measure::{coleman_measure, measure_to_series};
use super::system::{coleman_series, NormSystem, SystemKind};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::padic::{ExtScalar, ScalarJson};
use crate::series::Generator;

/// How Frobenius acts on the coefficients of the ground-level map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlatAction {
    /// `u -> (1 - p^-1) log <u>`
    Trivial,
    /// `u -> (1 - phi/p) log <u>` with `phi` the Frobenius of `W`
    Frobenius,
}

/// The ground-level Coleman map: `p -> 0` and `u -> (1 - phi/p) log u` on units.
pub fn coleman_flat(u: &ExtScalar, action: FlatAction) -> Result<ExtScalar> {
    let v = u.valuation();
    if v >= u.precision() {
        return Err(Error::Invalid(
            "the ground-level map needs a nonzero element".into(),
        ));
    }
    let unit = u.div_p_pow(v)?;
    let l = unit.log_unit()?;
    let shifted = match action {
        FlatAction::Trivial => l.clone(),
        FlatAction::Frobenius => l.frobenius(),
    };
    Ok(l.reduce(l.precision() - 1).sub(&shifted.div_p_pow(1)?))
}

/// Both sides of `ev_0 (1 - phi^-1) Col = Col_flat cor`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatReport {
    pub lhs: ScalarJson,
    pub rhs: ScalarJson,
    pub precision: u32,
    pub agree: bool,
    /// the sum over `a` was weighted by `theta^-1(a)`
    pub folded: bool,
}

/// Terms of the Coleman series used for the comparison.
const FLAT_TERMS: usize = 48;

/// Compare the constant term of `(1 - phi^-1)` applied to the series of
/// the measure with the ground-level map of the corestriction
/// `N_{1->0}(u_1)`. With `theta` the cyclotomic system is summed over its
/// conjugates `a` in `(Z/N)^*` with weight `theta^-1(a)`; `phi` acts on the
/// `W`-part only, so it is applied before the weights.
pub fn col_vs_flat_check(
    sys: &NormSystem,
    theta: Option<&DirichletCharacter>,
    g: &Generator,
) -> Result<FlatReport> {
    let ring = sys.ring();
    let m = ring.cap();
    let terms: Vec<(ExtScalar, NormSystem)> = match theta {
        None => vec![(ExtScalar::one(ring, m), sys.clone())],
        Some(th) => {
            let SystemKind::Cyclotomic { n, .. } = sys.kind() else {
                return Err(Error::Invalid("folding needs a cyclotomic system".into()));
            };
            if th.modulus() != *n {
                return Err(Error::Invalid(format!(
                    "theta has modulus {}, the system level is {n}",
                    th.modulus()
                )));
            }
            let inv = th.inv();
            (1..*n)
                .filter(|&a| inv.exponent(a as i64).is_some())
                .map(|a| Ok((inv.value(ring, a as i64, m), sys.galois_conjugate(a)?)))
                .collect::<Result<_>>()?
        }
    };
    let trivial = DirichletCharacter::trivial(1);
    let mut lhs = ExtScalar::zero(ring, m);
    let mut rhs = ExtScalar::zero(ring, m);
    for (w, s) in &terms {
        let col = coleman_series(s, FLAT_TERMS)?;
        let mu = coleman_measure(&col)?;
        let h = measure_to_series(&mu, &trivial, g, 2)?;
        let h0 = h.series.coeff(0).clone();
        lhs = lhs.add(&w.mul(&h0.sub(&h0.frobenius_pow(-1))));
        let cor = s.layer(1)?.norm_down()?.coeffs()[0].clone();
        rhs = rhs.add(&w.mul(&coleman_flat(&cor, FlatAction::Frobenius)?));
    }
    let precision = lhs.precision().min(rhs.precision());
    Ok(FlatReport {
        lhs: lhs.to_json(),
        rhs: rhs.to_json(),
        precision,
        agree: lhs.agrees(&rhs),
        folded: theta.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ExtRing;

    #[test]
    fn flat_map_basics() {
        let r = ExtRing::cyclotomic(5, 12, 8);
        let p = ExtScalar::from_int(&r, 5, 8);
        assert!(coleman_flat(&p, FlatAction::Trivial).unwrap().is_zero());
        assert!(coleman_flat(&ExtScalar::one(&r, 8), FlatAction::Frobenius)
            .unwrap()
            .is_zero());
        let u = ExtScalar::from_int(&r, 7, 8);
        let a = coleman_flat(&u, FlatAction::Trivial).unwrap();
        let b = coleman_flat(&u.mul(&u), FlatAction::Trivial).unwrap();
        assert!(b.agrees(&a.mul_int(2)));
        // on Z_p both actions coincide
        assert!(coleman_flat(&u, FlatAction::Frobenius).unwrap().agrees(&a));
        // a Teichmuller factor is invisible
        let w = ExtScalar::root_of_unity(&r, 1, 8);
        assert!(coleman_flat(&u.mul(&w), FlatAction::Frobenius)
            .unwrap()
            .agrees(&a));
    }

    #[test]
    fn cyclotomic_three_at_five() {
        let r = ExtRing::cyclotomic(5, 12, 10);
        let g = Generator::simple(5, 10);
        let sys = NormSystem::cyclotomic(&r, 3, 1).unwrap();
        let rep = col_vs_flat_check(&sys, None, &g).unwrap();
        assert!(rep.agree, "{rep:?}");
        assert!(rep.precision >= 3);
        // a Teichmuller rescaling changes neither side
        let c = ExtScalar::root_of_unity(&r, 3, 10);
        let rep2 = col_vs_flat_check(&sys.scaled(&c).unwrap(), None, &g).unwrap();
        assert_eq!(rep.lhs, rep2.lhs);
        assert_eq!(rep.rhs, rep2.rhs);
    }

    #[test]
    fn constant_system_has_both_sides_zero() {
        let r = ExtRing::cyclotomic(5, 12, 10);
        let c = ExtScalar::root_of_unity(&r, 5, 10);
        let rep = col_vs_flat_check(
            &NormSystem::constant(&c).unwrap(),
            None,
            &Generator::simple(5, 10),
        )
        .unwrap();
        assert!(rep.agree);
        assert!(rep.lhs.coeffs.iter().all(|c| c == "0"));
    }
}
