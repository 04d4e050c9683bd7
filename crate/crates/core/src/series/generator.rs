use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PadicScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorMode {
    /// `t = 1 + p`
    Simple,
    /// `(1 - 1/p) log t = 1`, i.e. `t = exp(p/(p-1))`
    Normalized,
}

impl std::str::FromStr for GeneratorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(GeneratorMode::Simple),
            "normalized" => Ok(GeneratorMode::Normalized),
            _ => Err(Error::Invalid(format!("unknown generator mode {s}"))),
        }
    }
}

/// A topological generator `t` of `1 + pZ_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    t: PadicScalar,
    mode: GeneratorMode,
}

impl Generator {
    pub fn new(mode: GeneratorMode, p: u64, m: u32) -> Result<Self> {
        let t = match mode {
            GeneratorMode::Simple => PadicScalar::new(1 + p as i64, p, m),
            GeneratorMode::Normalized => {
                PadicScalar::from_ratio(p as i64, p as i64 - 1, p, m)?.exp()?
            }
        };
        Ok(Generator { t, mode })
    }

    pub fn simple(p: u64, m: u32) -> Self {
        Self::new(GeneratorMode::Simple, p, m).expect("1 + p is a generator")
    }

    pub fn t(&self) -> PadicScalar {
        self.t
    }

    pub fn mode(&self) -> GeneratorMode {
        self.mode
    }

    pub fn prime(&self) -> u64 {
        self.t.prime()
    }

    /// `t^s` for any integer `s`.
    pub fn power(&self, s: i64) -> PadicScalar {
        let base = if s < 0 {
            self.t.inverse().expect("t is a unit")
        } else {
            self.t
        };
        base.pow(s.unsigned_abs())
    }

    /// The evaluation point `t^s - 1`.
    pub fn node(&self, s: i64) -> PadicScalar {
        let x = self.power(s);
        x.sub(&PadicScalar::one(x.prime(), x.precision()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let g = Generator::simple(5, 6);
        assert_eq!(g.node(1).value(), 5);
        assert!(g.node(0).is_zero());
        assert!(g.power(-1).mul(&g.t()).agrees(&PadicScalar::one(5, 6)));
        let n = Generator::new(GeneratorMode::Normalized, 5, 8).unwrap();
        let t = n.t();
        assert_eq!(t.value() % 5, 1);
        assert_ne!(t.value() % 25, 1);
        // (1 - 1/p) log t = 1  <=>  (p - 1) log t = p
        assert!(t
            .log()
            .unwrap()
            .mul_int(4)
            .agrees(&PadicScalar::new(5, 5, 8)));
    }
}
